//! Mass profiles `2m(x)` and the quantities derived pointwise from them:
//! the mass-weighted coordinate `x̄(x) = ∫₀ˣ √(2m)`, its inverse, the
//! superpotential that makes `[A, A†] = 1`, and the partner potentials.
//!
//! Internally every profile is described through `g(x) = √(2m(x))`; the
//! operator algebra only ever needs `s = 1/g` and its first two derivatives.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;

/// Shape of the mass function.
#[derive(Clone, Debug)]
pub enum ProfileKind {
    /// `2m = 1`.
    Constant,
    /// `2m = cosh²(αx)`, graded-alloy profile.
    Cosh { alpha: f64 },
    /// `2m = ((α + x²)/(1 + x²))²`, α > 0.
    Rational { alpha: f64 },
    /// Monotone-cubic interpolation of `√(2m)` through sampled points.
    Tabulated(Arc<MassTable>),
}

#[derive(Clone, Debug)]
pub struct MassProfile {
    kind: ProfileKind,
    label: String,
}

/// Pointwise data of a profile at one position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalMass {
    /// `√(2m(x))`
    pub g: f64,
    /// `d/dx √(2m(x))`
    pub dg: f64,
    pub xbar: f64,
}

impl LocalMass {
    /// `s = 1/√(2m)`
    pub fn s(&self) -> f64 {
        1.0 / self.g
    }

    /// `s′ = −g′/g²`
    pub fn ds(&self) -> f64 {
        -self.dg / (self.g * self.g)
    }

    /// `[2m]^{1/4}`
    pub fn quarter_power(&self) -> f64 {
        self.g.sqrt()
    }

    /// `d/dx [2m]^{1/4}`
    pub fn d_quarter_power(&self) -> f64 {
        0.5 * self.dg / self.g.sqrt()
    }
}

impl MassProfile {
    pub fn constant() -> Self {
        MassProfile {
            kind: ProfileKind::Constant,
            label: "constant".into(),
        }
    }

    /// Any real α is allowed; α = 0 is the constant mass.
    pub fn cosh(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("cosh profile needs finite alpha, got {alpha}")));
        }
        Ok(MassProfile {
            kind: ProfileKind::Cosh { alpha },
            label: format!("cosh(alpha={alpha})"),
        })
    }

    pub fn rational(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "rational profile needs alpha > 0, got {alpha}"
            )));
        }
        Ok(MassProfile {
            kind: ProfileKind::Rational { alpha },
            label: format!("rational(alpha={alpha})"),
        })
    }

    /// Profile interpolated through `(x, 2m)` samples with strictly increasing `x`.
    pub fn tabulated(samples: &[(f64, f64)], label: impl Into<String>) -> Result<Self> {
        let table = MassTable::new(samples)?;
        Ok(MassProfile {
            kind: ProfileKind::Tabulated(Arc::new(table)),
            label: label.into(),
        })
    }

    /// Loads a two-column `x,two_m` CSV. A header line and `#` comments are allowed.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let samples = parse_mass_csv(&text)?;
        Self::tabulated(&samples, path.display().to_string())
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Family name as used on the command line and in CSV output.
    pub fn family(&self) -> &'static str {
        match self.kind {
            ProfileKind::Constant => "constant",
            ProfileKind::Cosh { .. } => "cosh",
            ProfileKind::Rational { .. } => "rational",
            ProfileKind::Tabulated(_) => "tabulated",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Cosh { alpha } | ProfileKind::Rational { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// True when `2m(−x) = 2m(x)`.
    pub fn is_even(&self) -> bool {
        match &self.kind {
            ProfileKind::Tabulated(t) => t.is_even(),
            _ => true,
        }
    }

    /// Range of `x` over which the profile is defined; `None` means all reals.
    pub fn table_range(&self) -> Option<(f64, f64)> {
        match &self.kind {
            ProfileKind::Tabulated(t) => Some(t.range()),
            _ => None,
        }
    }

    fn check_in_range(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite position {x}")));
        }
        if let Some((a, b)) = self.table_range() {
            if x < a || x > b {
                return Err(Error::Domain(format!(
                    "x = {x} outside tabulated range [{a}, {b}]"
                )));
            }
        }
        Ok(())
    }

    /// `2m(x)`.
    pub fn mass2(&self, x: f64) -> Result<f64> {
        self.check_in_range(x)?;
        let g = self.g(x);
        Ok(g * g)
    }

    /// `x̄(x) = ∫₀ˣ √(2m(y)) dy`.
    pub fn xbar(&self, x: f64) -> Result<f64> {
        self.check_in_range(x)?;
        match &self.kind {
            ProfileKind::Tabulated(t) => t.xbar(x),
            _ => Ok(self.local(x).xbar),
        }
    }

    /// Solves `x̄(x) = u` by safeguarded Newton iteration.
    pub fn xbar_inverse(&self, u: f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::Domain(format!("non-finite target {u}")));
        }
        match self.kind {
            ProfileKind::Constant => return Ok(u),
            ProfileKind::Cosh { alpha: 0.0 } => return Ok(u),
            ProfileKind::Cosh { alpha } => {
                // sinh is monotone, closed-form inverse exists
                let a = alpha.abs();
                let x = (a * u).asinh() / a;
                if x.is_finite() {
                    return Ok(x);
                }
            }
            _ => {}
        }

        // bracket
        let (mut lo, mut hi) = match self.table_range() {
            Some((a, b)) => (a, b),
            None => {
                let mut lo = -1.0_f64;
                let mut hi = 1.0_f64;
                let mut expansions = 0;
                while self.xbar(lo)? > u || self.xbar(hi)? < u {
                    lo *= 2.0;
                    hi *= 2.0;
                    expansions += 1;
                    if expansions > 1000 || !hi.is_finite() {
                        return Err(Error::numerical(
                            format!("cannot bracket x̄⁻¹({u})"),
                            f64::NAN,
                            f64::INFINITY,
                        ));
                    }
                }
                (lo, hi)
            }
        };
        if self.xbar(lo)? > u || self.xbar(hi)? < u {
            return Err(Error::numerical(
                format!("x̄⁻¹({u}) lies outside the tabulated range"),
                f64::NAN,
                f64::INFINITY,
            ));
        }

        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = self.xbar(x)? - u;
            if r == 0.0 {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = x - r / self.g(x);
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || hi - lo <= 1e-15 * (1.0 + x.abs()) {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::numerical(
            format!("x̄⁻¹({u}) did not converge"),
            x,
            hi - lo,
        ))
    }

    /// `W(x) = ½[(1/√(2m))′ + x̄(x)]`, the superpotential with unit commutator.
    pub fn superpotential(&self, x: f64) -> Result<f64> {
        self.check_stencil_range(x)?;
        let loc = self.local(x);
        Ok(0.5 * (loc.ds() + loc.xbar))
    }

    /// `V = W² − (W/√(2m))′`.
    pub fn potential_v(&self, x: f64) -> Result<f64> {
        self.check_stencil_range(x)?;
        let d = self.derivs(x);
        let w = 0.5 * (d.ds + d.xbar);
        let dw = 0.5 * (d.d2s + 1.0 / d.s);
        Ok(w * w - (dw * d.s + w * d.ds))
    }

    /// `Ṽ = V + 2W′/√(2m) − (1/√(2m))(1/√(2m))″`.
    pub fn partner_potential(&self, x: f64) -> Result<f64> {
        self.check_stencil_range(x)?;
        let d = self.derivs(x);
        let dw = 0.5 * (d.d2s + 1.0 / d.s);
        Ok(self.potential_v(x)? + 2.0 * dw * d.s - d.s * d.d2s)
    }

    fn check_stencil_range(&self, x: f64) -> Result<()> {
        self.check_in_range(x)?;
        if let ProfileKind::Tabulated(t) = &self.kind {
            let h = tab_step(x);
            let (a, b) = t.range();
            if x - 2.0 * h < a || x + 2.0 * h > b {
                return Err(Error::Domain(format!(
                    "x = {x} too close to the table edge for derivative stencils"
                )));
            }
        }
        Ok(())
    }

    /// `√(2m(x))`; tabulated profiles are clamped outside their range.
    pub(crate) fn g(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant => 1.0,
            ProfileKind::Cosh { alpha } => (alpha * x).cosh(),
            ProfileKind::Rational { alpha } => (alpha + x * x) / (1.0 + x * x),
            ProfileKind::Tabulated(t) => t.eval(x),
        }
    }

    /// Infallible pointwise data used inside wavefunction evaluators.
    ///
    /// Tabulated profiles are clamped to their end values outside the table.
    pub fn local(&self, x: f64) -> LocalMass {
        match &self.kind {
            ProfileKind::Constant => LocalMass {
                g: 1.0,
                dg: 0.0,
                xbar: x,
            },
            ProfileKind::Cosh { alpha } => {
                let a = *alpha;
                let ax = a * x;
                let xbar = if a == 0.0 { x } else { ax.sinh() / a };
                LocalMass {
                    g: ax.cosh(),
                    dg: a * ax.sinh(),
                    xbar,
                }
            }
            ProfileKind::Rational { alpha } => {
                let a = *alpha;
                let q = 1.0 + x * x;
                LocalMass {
                    g: (a + x * x) / q,
                    dg: 2.0 * x * (1.0 - a) / (q * q),
                    xbar: x + (a - 1.0) * x.atan(),
                }
            }
            ProfileKind::Tabulated(t) => {
                let (a, b) = t.range();
                let xc = x.clamp(a, b);
                let xbar_c = t.xbar(xc).unwrap_or(f64::NAN);
                // x̄ continues linearly beyond the table with the clamped slope
                let g = t.eval(xc);
                LocalMass {
                    g,
                    dg: if x == xc { t.eval_deriv(x) } else { 0.0 },
                    xbar: xbar_c + g * (x - xc),
                }
            }
        }
    }

    fn derivs(&self, x: f64) -> Derivs {
        match &self.kind {
            ProfileKind::Tabulated(t) => {
                let h = tab_step(x);
                let s = |y: f64| 1.0 / t.eval(y);
                Derivs {
                    s: s(x),
                    ds: quad::stencil_d1(s, x, h),
                    d2s: quad::stencil_d2(s, x, h),
                    xbar: t.xbar(x).unwrap_or(f64::NAN),
                }
            }
            _ => {
                let loc = self.local(x);
                let d2g = match self.kind {
                    ProfileKind::Cosh { alpha } => alpha * alpha * (alpha * x).cosh(),
                    ProfileKind::Rational { alpha } => {
                        let q = 1.0 + x * x;
                        2.0 * (1.0 - alpha) * (1.0 - 3.0 * x * x) / (q * q * q)
                    }
                    _ => 0.0,
                };
                let g = loc.g;
                Derivs {
                    s: 1.0 / g,
                    ds: loc.ds(),
                    d2s: (2.0 * loc.dg * loc.dg - g * d2g) / (g * g * g),
                    xbar: loc.xbar,
                }
            }
        }
    }
}

impl fmt::Display for MassProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

struct Derivs {
    s: f64,
    ds: f64,
    d2s: f64,
    xbar: f64,
}

fn tab_step(x: f64) -> f64 {
    1e-4 * (1.0 + x.abs())
}

/// Sampled `√(2m)` with monotone (Fritsch–Carlson) cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct MassTable {
    xs: Vec<f64>,
    gs: Vec<f64>,
    slopes: Vec<f64>,
    /// `x̄` at each knot, measured from the origin (or the nearest table end).
    cumulative: Vec<f64>,
}

impl MassTable {
    fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain("a mass table needs at least two samples".into()));
        }
        for (i, &(x, m2)) in samples.iter().enumerate() {
            if !(x.is_finite() && m2.is_finite()) {
                return Err(Error::Domain(format!("sample {i} is not finite")));
            }
            if m2 <= 0.0 {
                return Err(Error::Domain(format!(
                    "sample {i}: 2m = {m2} is not positive"
                )));
            }
            if i > 0 && x <= samples[i - 1].0 {
                return Err(Error::Domain(format!(
                    "sample {i}: x = {x} is not strictly increasing"
                )));
            }
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let gs: Vec<f64> = samples.iter().map(|s| s.1.sqrt()).collect();
        let slopes = pchip_slopes(&xs, &gs);
        let mut table = MassTable {
            xs,
            gs,
            slopes,
            cumulative: Vec::new(),
        };
        table.cumulative = table.knot_integrals()?;

        // positivity and monotonicity of x̄ on a probe grid
        let (a, b) = table.range();
        let probes = 10_000;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=probes {
            let x = a + (b - a) * i as f64 / probes as f64;
            let g = table.eval(x);
            if !(g > 0.0) {
                return Err(Error::Domain(format!("interpolated mass not positive at x = {x}")));
            }
            let xb = table.xbar(x)?;
            if xb <= prev {
                return Err(Error::Domain(format!("x̄ not increasing near x = {x}")));
            }
            prev = xb;
        }
        Ok(table)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn origin(&self) -> f64 {
        let (a, b) = self.range();
        0.0_f64.clamp(a, b)
    }

    fn is_even(&self) -> bool {
        let n = self.xs.len();
        (0..n).all(|i| {
            let j = n - 1 - i;
            (self.xs[i] + self.xs[j]).abs() <= 1e-12 * (1.0 + self.xs[i].abs())
                && (self.gs[i] - self.gs[j]).abs() <= 1e-12 * self.gs[i]
        })
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.range();
        let x = x.clamp(a, b);
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.gs[i] + h10 * h * self.slopes[i] + h01 * self.gs[i + 1] + h11 * h * self.slopes[i + 1]
    }

    fn eval_deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let d00 = 6.0 * t * t - 6.0 * t;
        let d10 = 3.0 * t * t - 4.0 * t + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * t * t - 2.0 * t;
        (d00 * self.gs[i] + d01 * self.gs[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
    }

    fn simpson(&self, a: f64, b: f64) -> Result<f64> {
        let tol = 1e-13 * (1.0 + (b - a).abs());
        quad::adaptive_simpson(&|y| self.eval(y), a, b, tol, 30)
    }

    fn knot_integrals(&self) -> Result<Vec<f64>> {
        let n = self.xs.len();
        let mut from_first = vec![0.0; n];
        for i in 1..n {
            from_first[i] = from_first[i - 1] + self.simpson(self.xs[i - 1], self.xs[i])?;
        }
        let o = self.origin();
        let i = self.segment(o);
        let at_origin = from_first[i] + self.simpson(self.xs[i], o)?;
        Ok(from_first.into_iter().map(|v| v - at_origin).collect())
    }

    fn xbar(&self, x: f64) -> Result<f64> {
        let i = self.segment(x);
        Ok(self.cumulative[i] + self.simpson(self.xs[i], x)?)
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            s = 0.0;
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            s = 3.0 * d0;
        }
        s
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// Parses `x,two_m` rows; errors carry 1-based line numbers.
pub fn parse_mass_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = row.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 2 columns, found {}", cols.len()),
            });
        }
        if out.is_empty() && cols[0].eq_ignore_ascii_case("x") {
            continue;
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("`{s}`: {e}"),
            })
        };
        let x = parse(cols[0])?;
        let m2 = parse(cols[1])?;
        if let Some(&(px, _)) = out.last() {
            if x <= px {
                return Err(Error::Parse {
                    line,
                    msg: format!("x = {x} does not increase"),
                });
            }
        }
        out.push((x, m2));
    }
    if out.len() < 2 {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "need at least two samples".into(),
        });
    }
    Ok(out)
}
