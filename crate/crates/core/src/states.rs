//! Position-space wavefunctions, the analytic eigenstates of `H = A†A`, and the
//! ladder operators
//!
//! ```text
//! Aψ  =  ψ′/√(2m) + Wψ
//! A†ψ = −(ψ/√(2m))′ + Wψ
//! ```
//!
//! acting on them.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::profiles::MassProfile;
use crate::quad;

/// Highest Hermite order the recurrence is trusted with.
pub const MAX_HERMITE_ORDER: usize = 200;
/// Highest eigenstate index offered.
pub const MAX_LEVEL: usize = 60;

type Eval = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A complex position-space state given by closed-form evaluators.
///
/// Cloning is cheap; evaluators are shared.
#[derive(Clone)]
pub struct Wavefunction {
    value: Eval,
    derivative: Option<Eval>,
    profile: MassProfile,
    label: String,
    normalized: bool,
    support: Option<(f64, f64)>,
}

impl fmt::Debug for Wavefunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Wavefunction")
            .field("label", &self.label)
            .field("profile", &self.profile.label())
            .field("analytic_derivative", &self.derivative.is_some())
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl Wavefunction {
    pub fn new<V>(profile: MassProfile, label: impl Into<String>, value: V) -> Self
    where
        V: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Wavefunction {
            value: Arc::new(value),
            derivative: None,
            profile,
            label: label.into(),
            normalized: false,
            support: None,
        }
    }

    pub fn with_derivative<D>(mut self, derivative: D) -> Self
    where
        D: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Marks the state as unit-norm (checked by callers that rely on it).
    pub fn normalized(mut self, yes: bool) -> Self {
        self.normalized = yes;
        self
    }

    /// Interval outside of which the state is negligible (|ψ| well below 1e-14).
    /// Quadratures widen their window to cover it.
    pub fn with_support(mut self, support: Option<(f64, f64)>) -> Self {
        self.support = support;
        self
    }

    pub fn support_hint(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn profile(&self) -> &MassProfile {
        &self.profile
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    #[inline]
    pub fn value(&self, x: f64) -> Complex64 {
        (self.value)(x)
    }

    /// ψ′(x), analytic when available, otherwise a five-point stencil.
    pub fn derivative(&self, x: f64) -> Complex64 {
        match &self.derivative {
            Some(d) => d(x),
            None => quad::stencil_d1(|y| (self.value)(y), x, self.stencil_step(x)),
        }
    }

    /// ψ″(x) by stencil on the derivative (or on the value twice removed).
    pub fn second_derivative(&self, x: f64) -> Complex64 {
        let h = self.stencil_step(x);
        match &self.derivative {
            Some(d) => quad::stencil_d1(|y| d(y), x, h),
            None => quad::stencil_d2(|y| (self.value)(y), x, h),
        }
    }

    // Local oscillator length shrinks like 1/√(2m); the step follows it.
    fn stencil_step(&self, x: f64) -> f64 {
        1e-3 / self.profile.local(x).g.max(1.0)
    }

    /// `c·ψ`; keeps an analytic derivative if there is one.
    pub fn scaled(&self, c: Complex64) -> Wavefunction {
        let v = self.value.clone();
        let mut out = Wavefunction {
            value: Arc::new(move |x| c * v(x)),
            derivative: None,
            profile: self.profile.clone(),
            label: self.label.clone(),
            normalized: self.normalized && (c.norm() - 1.0).abs() < 1e-15,
            support: self.support,
        };
        if let Some(d) = self.derivative.clone() {
            out.derivative = Some(Arc::new(move |x| c * d(x)));
        }
        out
    }

    /// `Σ cₖ ψₖ`. The profile is taken from the first term.
    pub fn linear_combination(terms: &[(Complex64, Wavefunction)], label: impl Into<String>) -> Result<Wavefunction> {
        let first = terms
            .first()
            .ok_or_else(|| Error::State("empty linear combination".into()))?;
        let profile = first.1.profile.clone();
        let values: Vec<(Complex64, Eval)> = terms.iter().map(|(c, w)| (*c, w.value.clone())).collect();
        let mut out = Wavefunction::new(profile, label, move |x| {
            values.iter().map(|(c, v)| c * v(x)).sum()
        });
        if terms.iter().all(|(_, w)| w.derivative.is_some()) {
            let derivs: Vec<(Complex64, Eval)> = terms
                .iter()
                .map(|(c, w)| (*c, w.derivative.clone().expect("checked")))
                .collect();
            out.derivative = Some(Arc::new(move |x| derivs.iter().map(|(c, d)| c * d(x)).sum()));
        }
        out.support = terms.iter().filter_map(|(_, w)| w.support).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)));
        Ok(out)
    }

    /// `self − other`, mostly for residual norms.
    pub fn minus(&self, other: &Wavefunction) -> Wavefunction {
        Wavefunction::linear_combination(
            &[
                (Complex64::new(1.0, 0.0), self.clone()),
                (Complex64::new(-1.0, 0.0), other.clone()),
            ],
            format!("{} - {}", self.label, other.label),
        )
        .expect("two terms")
    }

    /// Writes `x,re,im` samples on the given grid.
    pub fn write_csv<W: Write>(&self, grid: &[f64], mut out: W) -> Result<()> {
        writeln!(out, "x,re,im")?;
        for &x in grid {
            let v = self.value(x);
            writeln!(out, "{:e},{:e},{:e}", x, v.re, v.im)?;
        }
        Ok(())
    }
}

/// Physicists' Hermite polynomial `H_n(u)` by three-term recurrence.
pub fn hermite(n: usize, u: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::Capability(format!(
            "Hermite order {n} exceeds {MAX_HERMITE_ORDER}"
        )));
    }
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = 2.0 * u * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Orthonormal Hermite functions `(h_n(ξ), h_{n−1}(ξ))`,
/// `h_n = (2ⁿ n! √π)^{-1/2} H_n(ξ) e^{−ξ²/2}`, by their own three-term recurrence.
/// Far tails underflow to zero instead of overflowing.
fn hermite_functions(n: usize, xi: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-xi * xi / 2.0).exp();
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * xi * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `ψ_n(x) = [√(2π) 2ⁿ n!]^{-1/2} [2m]^{1/4} e^{−x̄²/4} H_n(x̄/√2)`.
pub fn eigenstate(profile: &MassProfile, n: usize) -> Result<Wavefunction> {
    if n > MAX_LEVEL {
        return Err(Error::Capability(format!("eigenstate level {n} exceeds {MAX_LEVEL}")));
    }
    let scale = 2f64.powf(-0.25);
    let root_n = (n as f64).sqrt();

    // Returns (φ, φ_u) in the x̄ coordinate, φ(u) = 2^{-1/4} h_n(u/√2).
    let shape = move |u: f64| -> (f64, f64) {
        let xi = u / SQRT_2;
        let (h, hm1) = hermite_functions(n, xi);
        (scale * h, scale * (root_n * hm1 - xi * h / SQRT_2))
    };

    let pv = profile.clone();
    let pd = profile.clone();
    Ok(Wavefunction::new(profile.clone(), format!("psi_{n}[{}]", profile.label()), move |x| {
        let loc = pv.local(x);
        Complex64::new(loc.quarter_power() * shape(loc.xbar).0, 0.0)
    })
    .with_derivative(move |x| {
        let loc = pd.local(x);
        let (phi, dphi) = shape(loc.xbar);
        Complex64::new(loc.d_quarter_power() * phi + loc.quarter_power() * loc.g * dphi, 0.0)
    })
    .normalized(true)
    .with_support({
        let turn = (4.0 * n as f64 + 2.0).sqrt();
        xbar_window(profile, -turn, turn)
    }))
}

/// Extra room in `x̄` past the classically allowed region; `e^{−14²/4}` is below 1e-21.
const XBAR_MARGIN: f64 = 14.0;

/// `x` interval covering `x̄ ∈ [lo − margin, hi + margin]`, if the profile can invert it.
pub(crate) fn xbar_window(profile: &MassProfile, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let a = profile.xbar_inverse(lo - XBAR_MARGIN).ok()?;
    let b = profile.xbar_inverse(hi + XBAR_MARGIN).ok()?;
    Some((a, b))
}

/// `(Aψ)(x) = ψ′(x)/√(2m) + W(x)ψ(x)`.
pub fn apply_a(profile: &MassProfile, psi: &Wavefunction) -> Wavefunction {
    let p = profile.clone();
    let psi_c = psi.clone();
    Wavefunction::new(profile.clone(), format!("A {}", psi.label()), move |x| {
        let loc = p.local(x);
        let w = 0.5 * (loc.ds() + loc.xbar);
        psi_c.derivative(x) * loc.s() + psi_c.value(x) * w
    })
    .with_support(psi.support)
}

/// `(A†ψ)(x) = −[ψ/√(2m)]′ + W(x)ψ(x)`.
pub fn apply_adag(profile: &MassProfile, psi: &Wavefunction) -> Wavefunction {
    let p = profile.clone();
    let psi_c = psi.clone();
    Wavefunction::new(profile.clone(), format!("A+ {}", psi.label()), move |x| {
        let loc = p.local(x);
        let s = loc.s();
        let ds = loc.ds();
        let w = 0.5 * (ds + loc.xbar);
        let v = psi_c.value(x);
        -(psi_c.derivative(x) * s + v * ds) + v * w
    })
    .with_support(psi.support)
}

/// `A†Aψ`, plus `ψ/2` when `shifted` (the `E_n = n + ½` convention).
pub fn hamiltonian_apply(profile: &MassProfile, psi: &Wavefunction, shifted: bool) -> Wavefunction {
    let hpsi = apply_adag(profile, &apply_a(profile, psi));
    let label = format!("H {}", psi.label());
    if shifted {
        Wavefunction::linear_combination(
            &[(Complex64::new(1.0, 0.0), hpsi), (Complex64::new(0.5, 0.0), psi.clone())],
            label,
        )
        .expect("two terms")
    } else {
        hpsi.with_label(label)
    }
    .with_support(psi.support)
}
