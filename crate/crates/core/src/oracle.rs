//! Independent check of the analytic spectrum: a flux-conservative finite
//! difference discretization of `−(ψ′/2m)′ + Vψ` with Dirichlet walls, solved
//! by Sturm-sequence bisection and inverse iteration.
//!
//! Nothing here touches the ladder operators or the closed-form eigenstates
//! except [`compare_states`], which is the comparison itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::MassProfile;
use crate::states::eigenstate;

/// Highest number of levels [`eigen_lowest`] will extract.
pub const MAX_LEVELS: usize = 12;

/// Symmetric tridiagonal matrix on the interior points `x_i = a + (i+1)h`,
/// `h = (b − a)/(n + 1)`.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
    pub diag: Vec<f64>,
    /// `offdiag[i]` couples points `i` and `i + 1`.
    pub offdiag: Vec<f64>,
}

impl DiscreteOperator {
    pub fn x(&self, i: usize) -> f64 {
        self.a + (i + 1) as f64 * self.h
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let r = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < self.n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `lambda` (negative LDLᵀ pivots).
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.n {
            let e2 = if i > 0 { self.offdiag[i - 1] * self.offdiag[i - 1] } else { 0.0 };
            q = self.diag[i] - lambda - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + e2.sqrt() + lambda.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < self.n {
                s += self.offdiag[i] * v[i + 1];
            }
            out[i] = s;
        }
    }
}

/// Flux-conservative discretization with `1/2m` sampled at half points.
pub fn discretize(profile: &MassProfile, a: f64, b: f64, n: usize) -> Result<DiscreteOperator> {
    if !(b > a) || n < 3 {
        return Err(Error::Domain(format!("need b > a and N >= 3, got [{a}, {b}], N = {n}")));
    }
    let h = (b - a) / (n + 1) as f64;
    // coupling[k] sits at a + (k + ½)h, k = 0..=n
    let coupling: Vec<f64> = (0..=n)
        .map(|k| Ok(1.0 / (profile.mass2(a + (k as f64 + 0.5) * h)? * h * h)))
        .collect::<Result<_>>()?;
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let x = a + (i + 1) as f64 * h;
        diag.push(profile.potential_v(x)? + coupling[i] + coupling[i + 1]);
    }
    let offdiag = (0..n - 1).map(|i| -coupling[i + 1]).collect();
    Ok(DiscreteOperator {
        a,
        b,
        n,
        h,
        diag,
        offdiag,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

/// Lowest levels of a discrete operator, optionally compared with `ψ_n`.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors normalized so that `Σ v_i² h = 1`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `|⟨numeric_n, ψ_n⟩|`, filled by [`compare_states`].
    pub overlaps: Vec<f64>,
    pub grid: GridMeta,
    pub h: f64,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    n: usize,
    energy: f64,
    overlap: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    levels: Vec<LevelJson>,
    grid: GridMeta,
}

impl SpectrumReport {
    /// `{levels: [{n, energy, overlap}], grid: {a, b, N}}`
    pub fn to_json(&self) -> Result<String> {
        let levels = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(n, &energy)| LevelJson {
                n,
                energy,
                overlap: self.overlaps.get(n).copied(),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&SpectrumJson {
            levels,
            grid: self.grid,
        })?)
    }

    pub fn spacings(&self) -> Vec<f64> {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

fn bisect_level(op: &DiscreteOperator, level: usize, mut lo: f64, mut hi: f64) -> f64 {
    // invariant: count_below(lo) <= level < count_below(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if op.count_below(mid) > level {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (lo.abs().max(hi.abs())).max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − λ) x = rhs` for a tridiagonal `T` with partial pivoting.
fn shifted_solve(op: &DiscreteOperator, lambda: f64, rhs: &[f64]) -> Vec<f64> {
    let n = op.n;
    // rows stored as (main, upper, upper2) after elimination
    let mut d: Vec<f64> = op.diag.iter().map(|v| v - lambda).collect();
    let mut du: Vec<f64> = op.offdiag.clone();
    du.push(0.0);
    let mut du2 = vec![0.0; n];
    let mut dl: Vec<f64> = op.offdiag.clone();
    let mut b = rhs.to_vec();
    let tiny = f64::EPSILON * op.diag.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = f;
        } else {
            // swap rows i and i+1
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du2[i] = du[i + 1];
            du[i] = tmp;
            du[i + 1] = -f * du2[i];
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
            dl[i] = f;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= du2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    x
}

fn inverse_iteration(op: &DiscreteOperator, lambda: f64, level: usize) -> Result<Vec<f64>> {
    let n = op.n;
    let scale = op.diag.iter().chain(&op.offdiag).fold(0.0f64, |m, v| m.max(v.abs()));
    // deterministic, non-degenerate start vector
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 + level * 104729) % 97) as f64 / 97.0).collect();
    let mut tv = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..8 {
        let mut w = shifted_solve(op, lambda, &v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        op.apply(&w, &mut tv);
        residual = tv
            .iter()
            .zip(&w)
            .map(|(t, x)| (t - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        v = w;
        if residual <= 1e3 * f64::EPSILON * scale {
            return Ok(v);
        }
    }
    Err(Error::numerical(
        format!("inverse iteration stagnated for level {level}"),
        lambda,
        residual,
    ))
}

/// Lowest `k` eigenpairs of `op`, ascending.
pub fn eigen_lowest(op: &DiscreteOperator, k: usize) -> Result<SpectrumReport> {
    if k == 0 || k > MAX_LEVELS {
        return Err(Error::Capability(format!("can extract 1..={MAX_LEVELS} levels, asked for {k}")));
    }
    if k > op.n {
        return Err(Error::Domain(format!("{k} levels requested from a {}-point grid", op.n)));
    }
    let (lo, hi) = op.gershgorin();
    let pad = 1e-9 * (hi - lo).max(1.0);
    let eigenvalues: Vec<f64> = (0..k).map(|level| bisect_level(op, level, lo - pad, hi + pad)).collect();
    let eigenvectors = eigenvalues
        .iter()
        .enumerate()
        .map(|(level, &lambda)| {
            let mut v = inverse_iteration(op, lambda, level)?;
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * op.h).sqrt();
            // sign convention: positive first significant lobe
            let pivot = v.iter().copied().find(|x| x.abs() > 1e-6 * norm).unwrap_or(1.0);
            let s = pivot.signum() / norm;
            v.iter_mut().for_each(|x| *x *= s);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        eigenvalues,
        eigenvectors,
        overlaps: Vec::new(),
        grid: GridMeta {
            a: op.a,
            b: op.b,
            n: op.n,
        },
        h: op.h,
    })
}

/// Fills `overlaps[n] = |⟨numeric_n, ψ_n⟩|` for `n ≤ nmax` by the trapezoid
/// rule on the solver grid, flipping eigenvector signs to align with `ψ_n`.
pub fn compare_states(mut report: SpectrumReport, profile: &MassProfile, nmax: usize) -> Result<SpectrumReport> {
    if report.eigenvalues.len() <= nmax {
        return Err(Error::Domain(format!(
            "report holds {} levels, {} needed",
            report.eigenvalues.len(),
            nmax + 1
        )));
    }
    let h = report.h;
    let a = report.grid.a;
    let mut overlaps = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let psi = eigenstate(profile, n)?;
        let v = &mut report.eigenvectors[n];
        // Dirichlet ends vanish, so the trapezoid rule reduces to a plain sum
        let dot: f64 = v
            .iter()
            .enumerate()
            .map(|(i, &vi)| vi * psi.value(a + (i + 1) as f64 * h).re)
            .sum::<f64>()
            * h;
        if dot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let overlap = dot.abs();
        if overlap < 0.5 {
            return Err(Error::numerical(
                format!("level {n}: overlap {overlap:.4} with the analytic state signals a mismatched grid"),
                overlap,
                1.0 - overlap,
            ));
        }
        overlaps.push(overlap);
    }
    report.overlaps = overlaps;
    Ok(report)
}

/// Discretize, solve and compare in one call.
pub fn validate_spectrum(profile: &MassProfile, a: f64, b: f64, n: usize, levels: usize) -> Result<SpectrumReport> {
    let op = discretize(profile, a, b, n)?;
    let report = eigen_lowest(&op, levels)?;
    compare_states(report, profile, levels - 1)
}
