//! Shared numerical engine: adaptive Gauss–Kronrod quadrature on a finite
//! window of the real line, adaptive Simpson for tabulated data, five-point
//! stencils, and the physical position/momentum moments of a state.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::Wavefunction;

/// Tolerances and integration window shared by every quadrature in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to a single initial panel.
    pub max_depth: u32,
    pub domain: (f64, f64),
    /// Number of equal panels the window is split into before adapting.
    /// Keeps narrow peaks from slipping between the nodes of a single rule.
    pub panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 48,
            domain: (-12.0, 12.0),
            panels: 64,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        let (a, b) = self.domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Domain(format!("degenerate domain [{a}, {b}]")));
        }
        if self.panels == 0 {
            return Err(Error::Domain("at least one initial panel is required".into()));
        }
        Ok(())
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = (a, b);
        self
    }

    /// Same configuration with both tolerances scaled by `factor`.
    pub fn scaled_tolerances(mut self, factor: f64) -> Self {
        self.abs_tol *= factor;
        self.rel_tol *= factor;
        self
    }
}

/// Value of an integral together with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
pub(crate) const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
pub(crate) const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
pub(crate) const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Abscissae of the 15-point rule mapped onto `[a, b]`, in the order
/// `center, then (center - h·XGK[k], center + h·XGK[k])` for `k = 0..7`.
pub(crate) fn kronrod_nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [c; 15];
    for k in 0..7 {
        out[1 + 2 * k] = c - h * XGK[k];
        out[2 + 2 * k] = c + h * XGK[k];
    }
    out
}

/// QUADPACK-style error estimate for one real component of a 15-point panel.
///
/// `fv` holds the values at `kronrod_nodes` order.
pub(crate) fn gk15_component(fv: &[f64; 15], half: f64) -> (f64, f64) {
    let fc = fv[0];
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = (fc * WGK[7]).abs();
    for k in 0..7 {
        let (l, r) = (fv[1 + 2 * k], fv[2 + 2 * k]);
        resk += WGK[k] * (l + r);
        resabs += WGK[k] * (l.abs() + r.abs());
        if k % 2 == 1 {
            resg += WG[k / 2] * (l + r);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for k in 0..7 {
        resasc += WGK[k] * ((fv[1 + 2 * k] - mean).abs() + (fv[2 + 2 * k] - mean).abs());
    }
    let habs = half.abs();
    let value = resk * half;
    let resabs = resabs * habs;
    let resasc = resasc * habs;
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let nodes = kronrod_nodes(a, b);
    let mut re = [0.0; 15];
    let mut im = [0.0; 15];
    for (i, &x) in nodes.iter().enumerate() {
        let v = f(x);
        re[i] = v.re;
        im[i] = v.im;
    }
    let half = 0.5 * (b - a);
    let (vr, er) = gk15_component(&re, half);
    let (vi, ei) = gk15_component(&im, half);
    (Complex64::new(vr, vi), er.hypot(ei))
}

const MAX_EVALUATIONS: usize = 4_000_000;

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 15-point Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The window is first cut into `cfg.panels` equal pieces; afterwards the
/// panel with the largest error estimate is bisected until the summed error
/// meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_on<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("non-finite limits [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let panels = cfg.panels.max(1);
    let width = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(panels * 4);
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let (value, error) = gk15(&f, lo, hi);
        evaluations += 15;
        total += value;
        total_err += error;
        heap.push(Panel {
            a: lo,
            b: hi,
            depth: 0,
            value,
            error,
        });
    }

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= cfg.max_depth
            || !(worst.error.is_finite())
            || evaluations >= MAX_EVALUATIONS
        {
            return Err(Error::numerical(
                format!(
                    "adaptive quadrature on [{a}, {b}] exceeded depth {} near [{}, {}]",
                    cfg.max_depth, worst.a, worst.b
                ),
                total.re,
                total_err,
            ));
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        evaluations += 30;
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            depth: worst.depth + 1,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            depth: worst.depth + 1,
            value: rv,
            error: re,
        });
    }
    // Recompute from the panels to shed the drift of the running sums.
    let (value, error) = heap
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Integral of a complex function over the configured domain.
pub fn integrate<F>(f: F, cfg: &QuadConfig) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    integrate_on(f, cfg.domain.0, cfg.domain.1, cfg)
}

/// Real-valued convenience wrapper returning `(value, error)`.
pub fn integrate_real<F>(f: F, cfg: &QuadConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let est = integrate(|x| Complex64::new(f(x), 0.0), cfg)?;
    Ok((est.value.re, est.error))
}

/// Adaptive Simpson quadrature of a real function; used for tabulated mass
/// profiles, whose interpolant is piecewise cubic.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> std::result::Result<f64, f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(delta.abs());
        }
        let l = step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }

    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, max_depth).map_err(|achieved| {
        Error::numerical(
            format!("adaptive Simpson on [{a}, {b}] did not converge"),
            whole,
            achieved,
        )
    })
}

/// Five-point central first derivative.
pub fn stencil_d1<T, F>(f: F, x: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)) * 8.0) * (1.0 / (12.0 * h))
}

/// Five-point central second derivative.
pub fn stencil_d2<T, F>(f: F, x: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    ((f(x - h) + f(x + h)) * 16.0 - (f(x - 2.0 * h) + f(x + 2.0 * h)) - f(x) * 30.0)
        * (1.0 / (12.0 * h * h))
}

/// Physical x–p statistics of a state with both squeezing conventions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
    /// `var_x * var_p`
    pub product: f64,
    /// `2·var − 1`
    pub sx_var: f64,
    pub sp_var: f64,
    /// `2·σ − 1`
    pub sx_std: f64,
    pub sp_std: f64,
    /// Sum of the quadrature error estimates that went into the report.
    pub quad_err: f64,
}

impl MomentReport {
    pub fn from_variances(mean_x: f64, var_x: f64, mean_p: f64, var_p: f64, quad_err: f64) -> Self {
        MomentReport {
            mean_x,
            var_x,
            mean_p,
            var_p,
            product: var_x * var_p,
            sx_var: 2.0 * var_x - 1.0,
            sp_var: 2.0 * var_p - 1.0,
            sx_std: 2.0 * var_x.sqrt() - 1.0,
            sp_std: 2.0 * var_p.sqrt() - 1.0,
            quad_err,
        }
    }

    pub fn sigma_x(&self) -> f64 {
        self.var_x.sqrt()
    }

    pub fn sigma_p(&self) -> f64 {
        self.var_p.sqrt()
    }
}

/// `cfg` with its window widened to cover the support hints of `states`.
pub fn covering(cfg: &QuadConfig, states: &[&Wavefunction]) -> QuadConfig {
    let mut out = cfg.clone();
    for (a, b) in states.iter().filter_map(|s| s.support_hint()) {
        out.domain = (out.domain.0.min(a), out.domain.1.max(b));
    }
    out
}

/// Norm of a state, `∫|ψ|²`, with its error estimate.
pub fn norm_squared(psi: &Wavefunction, cfg: &QuadConfig) -> Result<(f64, f64)> {
    integrate_real(|x| psi.value(x).norm_sqr(), &covering(cfg, &[psi]))
}

/// ⟨φ|ψ⟩ over the configured domain, widened to both supports.
pub fn inner(phi: &Wavefunction, psi: &Wavefunction, cfg: &QuadConfig) -> Result<Estimate> {
    integrate(|x| phi.value(x).conj() * psi.value(x), &covering(cfg, &[phi, psi]))
}

/// ‖φ − ψ‖₂ over the configured domain, widened to both supports.
pub fn l2_distance(phi: &Wavefunction, psi: &Wavefunction, cfg: &QuadConfig) -> Result<f64> {
    let cfg = covering(cfg, &[phi, psi]);
    let (d2, _) = integrate_real(|x| (phi.value(x) - psi.value(x)).norm_sqr(), &cfg)?;
    Ok(d2.max(0.0).sqrt())
}

/// Position and canonical-momentum moments of `psi`.
///
/// Momentum is `−i d/dx`; `⟨p²⟩` is taken as `∫|ψ′|²`. States whose norm is
/// within `1e-6` of one are renormalized, anything else is rejected.
pub fn moments(psi: &Wavefunction, cfg: &QuadConfig) -> Result<MomentReport> {
    let cfg = &covering(cfg, &[psi]);
    let (norm, mut err) = norm_squared(psi, cfg)?;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::State(format!(
            "state `{}` has norm {norm:.9}, expected 1",
            psi.label()
        )));
    }
    let (x1, e) = integrate_real(|x| x * psi.value(x).norm_sqr(), cfg)?;
    err += e;
    let (x2, e) = integrate_real(|x| x * x * psi.value(x).norm_sqr(), cfg)?;
    err += e;
    // ⟨p⟩ = ∫ ψ* (−i ψ′) = Im ∫ ψ* ψ′ for a decaying state.
    let p1 = integrate(|x| psi.value(x).conj() * psi.derivative(x), cfg)?;
    err += p1.error;
    let (p2, e) = integrate_real(|x| psi.derivative(x).norm_sqr(), cfg)?;
    err += e;

    let mean_x = x1 / norm;
    let mean_p = p1.value.im / norm;
    let var_x = x2 / norm - mean_x * mean_x;
    let var_p = p2 / norm - mean_p * mean_p;
    if !(var_x > 0.0 && var_p > 0.0) {
        return Err(Error::numerical(
            format!("non-positive variance for `{}`", psi.label()),
            var_x.min(var_p),
            err,
        ));
    }
    Ok(MomentReport::from_variances(mean_x, var_x, mean_p, var_p, err))
}
