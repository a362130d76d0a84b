//! Wigner quasi-probability `W(x,p) = (1/π)∫ψ*(x+y) e^{2ipy} ψ(x−y) dy` on a
//! uniform phase-space grid, with normalization, marginal and negativity checks.
//!
//! The ordering makes `∫W dx = |ψ̂(p)|²` for the momentum `−i d/dx`; swapping
//! `x ± y` reflects `p → −p`, which leaves real-`z` states unchanged.
//!
//! Each row `x = x_i` is one vector-valued adaptive Gauss–Kronrod integral over
//! `y`: all momenta of the row share the panels and the state evaluations,
//! and a panel is refined until every momentum meets its tolerance.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, gk15_component, kronrod_nodes, QuadConfig};
use crate::states::Wavefunction;

/// `|ψ|` below which the state is treated as zero when truncating `y`.
pub const SUPPORT_THRESHOLD: f64 = 1e-13;
/// Largest imaginary residue tolerated before it is discarded.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-9;
/// Negativity must exceed this multiple of the worst cell error.
pub const NEGATIVITY_MARGIN: f64 = 10.0;
/// Default number of points on each axis.
pub const DEFAULT_POINTS: usize = 257;
/// Largest `|ψ|²` tolerated at the ends of the x axis.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-10;

/// Uniformly spaced axis `start + k·step`, `k < len`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    /// `len` points from `a` to `b` inclusive.
    pub fn linspace(a: f64, b: f64, len: usize) -> Result<Self> {
        if len < 2 || !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("bad axis [{a}, {b}] with {len} points")));
        }
        Ok(Axis {
            start: a,
            step: (b - a) / (len - 1) as f64,
            len,
        })
    }

    pub fn at(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.at(k)).collect()
    }
}

/// Phase-space samples of a Wigner function, row-major in `x`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_axis: Axis,
    pub p_axis: Axis,
    /// `values[i * p_axis.len + j] = W(x_i, p_j)`
    pub values: Vec<f64>,
    /// Quadrature error estimate of each cell (already divided by π).
    pub cell_errors: Vec<f64>,
    pub max_cell_error: f64,
    /// Largest `|Im W|` seen before it was dropped.
    pub max_imag_residue: f64,
    /// Cells whose integral stopped short of the tolerance.
    pub failed_cells: usize,
    pub total_mass: f64,
    pub min_value: f64,
    pub min_location: (f64, f64),
    pub max_abs: f64,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_axis.len + j]
    }

    /// Long-form `x,p,w` CSV.
    pub fn write_long_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,p,w")?;
        for i in 0..self.x_axis.len {
            let x = self.x_axis.at(i);
            for j in 0..self.p_axis.len {
                writeln!(out, "{:e},{:e},{:e}", x, self.p_axis.at(j), self.get(i, j))?;
            }
        }
        Ok(())
    }

    /// Matrix form: one `# x0 dx nx p0 dp np` header line, then one row per `x`.
    pub fn write_matrix<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# {:e} {:e} {} {:e} {:e} {}",
            self.x_axis.start, self.x_axis.step, self.x_axis.len, self.p_axis.start, self.p_axis.step, self.p_axis.len
        )?;
        for i in 0..self.x_axis.len {
            let row: Vec<String> = (0..self.p_axis.len).map(|j| format!("{:e}", self.get(i, j))).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Half-width in `x̄` of the default window; `|ψ|` has fallen to about `e^{−30}` there.
pub const XBAR_HALF_WIDTH: f64 = 11.0;
/// Momentum half-width of the default window in units of `σ_p`.
pub const P_SIGMAS: f64 = 10.0;

/// Default phase-space window for a coherent state with label `z`:
/// `x̄ ∈ 2 Re z ± XBAR_HALF_WIDTH` mapped back to `x`, and `p` over
/// `⟨p⟩ ± max(6, P_SIGMAS·σ_p)`, 257 points each.
pub fn default_axes(profile: &crate::profiles::MassProfile, z: Complex64) -> Result<(Axis, Axis)> {
    let c = 2.0 * z.re;
    let m = quad::moments(&crate::coherent::coherent_state(profile, z)?, &QuadConfig::default())?;
    let half = (P_SIGMAS * m.sigma_p()).max(6.0);
    Ok((
        Axis::linspace(
            profile.xbar_inverse(c - XBAR_HALF_WIDTH)?,
            profile.xbar_inverse(c + XBAR_HALF_WIDTH)?,
            DEFAULT_POINTS,
        )?,
        Axis::linspace(m.mean_p - half, m.mean_p + half, DEFAULT_POINTS)?,
    ))
}

/// Interval outside of which `|ψ| < SUPPORT_THRESHOLD` on the quadrature domain.
pub fn support(psi: &Wavefunction, cfg: &QuadConfig) -> Option<(f64, f64)> {
    let (a, b) = quad::covering(cfg, &[psi]).domain;
    let n = 24_000;
    let h = (b - a) / n as f64;
    let inside: Vec<usize> = (0..=n)
        .filter(|&k| psi.value(a + h * k as f64).norm() >= SUPPORT_THRESHOLD)
        .collect();
    let (&first, &last) = (inside.first()?, inside.last()?);
    Some(((a + h * first as f64 - h).max(a), (a + h * last as f64 + h).min(b)))
}

struct VecPanel {
    a: f64,
    b: f64,
    depth: u32,
    values: Vec<Complex64>,
    errors: Vec<f64>,
    worst: f64,
}

fn vec_gk15(psi: &Wavefunction, x: f64, p_axis: &Axis, a: f64, b: f64) -> (Vec<Complex64>, Vec<f64>) {
    let np = p_axis.len;
    let nodes = kronrod_nodes(a, b);
    let mut re = vec![[0.0; 15]; np];
    let mut im = vec![[0.0; 15]; np];
    for (k, &y) in nodes.iter().enumerate() {
        let g = psi.value(x + y).conj() * psi.value(x - y);
        // e^{2i p_j y} by recurrence along the uniform p axis
        let step = Complex64::from_polar(1.0, 2.0 * p_axis.step * y);
        let mut phase = Complex64::from_polar(1.0, 2.0 * p_axis.start * y);
        for j in 0..np {
            let v = g * phase;
            re[j][k] = v.re;
            im[j][k] = v.im;
            phase *= step;
        }
    }
    let half = 0.5 * (b - a);
    let mut values = Vec::with_capacity(np);
    let mut errors = Vec::with_capacity(np);
    for j in 0..np {
        let (vr, er) = gk15_component(&re[j], half);
        let (vi, ei) = gk15_component(&im[j], half);
        values.push(Complex64::new(vr, vi));
        errors.push(er.hypot(ei));
    }
    (values, errors)
}

struct RowResult {
    values: Vec<Complex64>,
    errors: Vec<f64>,
    failed: usize,
}

fn wigner_row(psi: &Wavefunction, x: f64, p_axis: &Axis, span: (f64, f64), cfg: &QuadConfig) -> RowResult {
    let np = p_axis.len;
    let half_width = (span.1 - x).min(x - span.0);
    if half_width <= 0.0 {
        return RowResult {
            values: vec![Complex64::new(0.0, 0.0); np],
            errors: vec![0.0; np],
            failed: 0,
        };
    }
    let pmax = p_axis.start.abs().max(p_axis.end().abs());
    // roughly one oscillation of the fastest kernel per panel
    let n0 = ((2.0 * half_width * (2.0 * pmax + 1.0) / 3.0).ceil() as usize).max(16);
    let width = 2.0 * half_width / n0 as f64;

    let mut panels: Vec<VecPanel> = Vec::with_capacity(n0 * 2);
    let mut totals = vec![Complex64::new(0.0, 0.0); np];
    let mut errs = vec![0.0; np];
    let push = |panels: &mut Vec<VecPanel>, a: f64, b: f64, depth: u32, totals: &mut [Complex64], errs: &mut [f64]| {
        let (values, errors) = vec_gk15(psi, x, p_axis, a, b);
        for j in 0..np {
            totals[j] += values[j];
            errs[j] += errors[j];
        }
        let worst = errors.iter().cloned().fold(0.0, f64::max);
        panels.push(VecPanel {
            a,
            b,
            depth,
            values,
            errors,
            worst,
        });
    };
    for k in 0..n0 {
        let a = -half_width + width * k as f64;
        let b = if k + 1 == n0 { half_width } else { a + width };
        push(&mut panels, a, b, 0, &mut totals, &mut errs);
    }

    let converged = |totals: &[Complex64], errs: &[f64]| {
        (0..np).all(|j| errs[j] <= cfg.abs_tol.max(cfg.rel_tol * totals[j].norm()))
    };
    let mut budget = 20_000usize;
    while !converged(&totals, &errs) {
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.worst.total_cmp(&b.1.worst))
            .expect("non-empty");
        if panels[idx].depth >= cfg.max_depth || budget == 0 {
            break;
        }
        budget -= 1;
        let old = panels.swap_remove(idx);
        for j in 0..np {
            totals[j] -= old.values[j];
            errs[j] -= old.errors[j];
        }
        let mid = 0.5 * (old.a + old.b);
        push(&mut panels, old.a, mid, old.depth + 1, &mut totals, &mut errs);
        push(&mut panels, mid, old.b, old.depth + 1, &mut totals, &mut errs);
    }

    // resum to drop the drift of the running totals
    let mut values = vec![Complex64::new(0.0, 0.0); np];
    let mut errors = vec![0.0; np];
    for panel in &panels {
        for j in 0..np {
            values[j] += panel.values[j];
            errors[j] += panel.errors[j];
        }
    }
    let failed = (0..np)
        .filter(|&j| errors[j] > cfg.abs_tol.max(cfg.rel_tol * values[j].norm()))
        .count();
    RowResult { values, errors, failed }
}

/// Wigner function of `psi` on the `x_axis × p_axis` grid.
///
/// Cells that fail to converge keep their best estimate and are counted in
/// `failed_cells`; the transform itself only fails on invalid input.
pub fn wigner_transform(psi: &Wavefunction, x_axis: &Axis, p_axis: &Axis, cfg: &QuadConfig) -> Result<WignerGrid> {
    cfg.validate()?;
    let span = support(psi, cfg).ok_or_else(|| Error::State(format!("`{}` vanishes on the domain", psi.label())))?;
    let rows: Vec<RowResult> = (0..x_axis.len)
        .into_par_iter()
        .map(|i| wigner_row(psi, x_axis.at(i), p_axis, span, cfg))
        .collect();

    let np = p_axis.len;
    let mut values = Vec::with_capacity(x_axis.len * np);
    let mut cell_errors = Vec::with_capacity(x_axis.len * np);
    let mut max_imag_residue: f64 = 0.0;
    let mut failed_cells = 0;
    for row in &rows {
        failed_cells += row.failed;
        for j in 0..np {
            values.push(row.values[j].re / PI);
            cell_errors.push(row.errors[j] / PI);
            max_imag_residue = max_imag_residue.max(row.values[j].im.abs() / PI);
        }
    }

    let mut min_value = f64::INFINITY;
    let mut min_location = (f64::NAN, f64::NAN);
    let mut max_abs: f64 = 0.0;
    let mut sum = 0.0;
    for i in 0..x_axis.len {
        for j in 0..np {
            let w = values[i * np + j];
            sum += w;
            max_abs = max_abs.max(w.abs());
            if w < min_value {
                min_value = w;
                min_location = (x_axis.at(i), p_axis.at(j));
            }
        }
    }
    Ok(WignerGrid {
        x_axis: *x_axis,
        p_axis: *p_axis,
        max_cell_error: cell_errors.iter().cloned().fold(0.0, f64::max),
        values,
        cell_errors,
        max_imag_residue,
        failed_cells,
        total_mass: sum * x_axis.step * p_axis.step,
        min_value,
        min_location,
        max_abs,
    })
}

/// Consistency checks of a computed grid against its state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerDiagnostics {
    pub total_mass: f64,
    /// `max_i |Σ_j W(x_i,p_j)Δp − |ψ(x_i)|²|`
    pub marginal_x_error: f64,
    /// `max_j |Σ_i W(x_i,p_j)Δx − |ψ̂(p_j)|²|`
    pub marginal_p_error: f64,
    pub min_value: f64,
    pub min_location: (f64, f64),
    pub max_abs: f64,
    pub max_imag_residue: f64,
    pub max_cell_error: f64,
    pub failed_cells: usize,
    /// `min_value < −NEGATIVITY_MARGIN · max_cell_error`
    #[serde(rename = "negativity")]
    pub negative: bool,
}

/// Total mass, marginals and the negativity verdict for `grid`.
///
/// The momentum marginal is compared with `|ψ̂(p)|²`,
/// `ψ̂(p) = (2π)^{-1/2}∫ψ(x)e^{−ipx}dx`, evaluated by quadrature.
pub fn wigner_diagnostics(grid: &WignerGrid, psi: &Wavefunction, cfg: &QuadConfig) -> Result<WignerDiagnostics> {
    let edge = psi.value(grid.x_axis.start).norm_sqr().max(psi.value(grid.x_axis.end()).norm_sqr());
    if edge >= EDGE_DENSITY_LIMIT {
        return Err(Error::Domain(format!(
            "x grid [{}, {}] does not cover the state (|psi|^2 = {edge:e} at the edge)",
            grid.x_axis.start,
            grid.x_axis.end()
        )));
    }
    let (nx, np) = (grid.x_axis.len, grid.p_axis.len);
    let marginal_x_error = (0..nx)
        .map(|i| {
            let s: f64 = (0..np).map(|j| grid.get(i, j)).sum::<f64>() * grid.p_axis.step;
            (s - psi.value(grid.x_axis.at(i)).norm_sqr()).abs()
        })
        .fold(0.0, f64::max);

    let span = support(psi, cfg).unwrap_or(cfg.domain);
    let ft_cfg = cfg.clone().with_domain(span.0, span.1);
    let p_errors: Vec<f64> = (0..np)
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let p = grid.p_axis.at(j);
            let ft = quad::integrate(|x| psi.value(x) * Complex64::from_polar(1.0, -p * x), &ft_cfg)?;
            let density = ft.value.norm_sqr() / (2.0 * PI);
            let s: f64 = (0..nx).map(|i| grid.get(i, j)).sum::<f64>() * grid.x_axis.step;
            Ok((s - density).abs())
        })
        .collect::<Result<_>>()?;
    let marginal_p_error = p_errors.into_iter().fold(0.0, f64::max);

    Ok(WignerDiagnostics {
        total_mass: grid.total_mass,
        marginal_x_error,
        marginal_p_error,
        min_value: grid.min_value,
        min_location: grid.min_location,
        max_abs: grid.max_abs,
        max_imag_residue: grid.max_imag_residue,
        max_cell_error: grid.max_cell_error,
        failed_cells: grid.failed_cells,
        negative: grid.min_value < -NEGATIVITY_MARGIN * grid.max_cell_error,
    })
}
