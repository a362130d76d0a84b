//! Displacement-operator coherent states `D(z)|0⟩` of the effective-mass
//! oscillator, in coordinate form, as a Fock series, and under time evolution.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::MassProfile;
use crate::quad::{self, QuadConfig};
use crate::states::{apply_a, apply_adag, eigenstate, xbar_window, Wavefunction, MAX_LEVEL};

/// Largest |z| accepted; keeps the packet well inside the default window.
pub const MAX_DISPLACEMENT: f64 = 10.0;

/// Parameters of a (possibly time-evolved) coherent state.
#[derive(Clone, Debug)]
pub struct CoherentSpec {
    pub profile: MassProfile,
    pub z: Complex64,
    pub t: f64,
}

impl CoherentSpec {
    pub fn new(profile: MassProfile, z: Complex64, t: f64) -> Result<Self> {
        check_guard(z)?;
        if !t.is_finite() {
            return Err(Error::Domain(format!("non-finite time {t}")));
        }
        Ok(CoherentSpec { profile, z, t })
    }

    pub fn state(&self) -> Result<Wavefunction> {
        evolve(&self.profile, self.z, self.t)
    }
}

fn check_guard(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > MAX_DISPLACEMENT {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds the guard {MAX_DISPLACEMENT}",
            z.norm()
        )));
    }
    Ok(())
}

/// `ψ_cs(x) = (2π)^{-1/4} e^{−(|z|²−z²)/2} [2m]^{1/4} e^{−(x̄−2z)²/4}`.
pub fn coherent_state(profile: &MassProfile, z: Complex64) -> Result<Wavefunction> {
    check_guard(z)?;
    // exponent kept in one piece so large |Im z| does not overflow the prefactor
    let offset = -(z.norm_sqr() - z * z) / 2.0 - (2.0 * PI).ln() / 4.0;
    let gauss = move |u: f64| {
        let d = Complex64::new(u, 0.0) - 2.0 * z;
        (offset - d * d / 4.0).exp()
    };
    let pv = profile.clone();
    let pd = profile.clone();
    Ok(Wavefunction::new(
        profile.clone(),
        format!("cs(z={z})[{}]", profile.label()),
        move |x| {
            let loc = pv.local(x);
            gauss(loc.xbar) * loc.quarter_power()
        },
    )
    .with_derivative(move |x| {
        let loc = pd.local(x);
        let phi = gauss(loc.xbar);
        let dphi = -(Complex64::new(loc.xbar, 0.0) - 2.0 * z) / 2.0 * phi;
        phi * loc.d_quarter_power() + dphi * (loc.quarter_power() * loc.g)
    })
    .normalized(true)
    .with_support(xbar_window(profile, 2.0 * z.re, 2.0 * z.re)))
}

/// `c_n = e^{−|z|²/2} zⁿ/√(n!)` for `n = 0..=nmax`.
pub fn coherent_coefficients(z: Complex64, nmax: usize) -> Result<Vec<Complex64>> {
    if nmax > MAX_LEVEL {
        return Err(Error::Capability(format!("nmax {nmax} exceeds {MAX_LEVEL}")));
    }
    let mut out = Vec::with_capacity(nmax + 1);
    let mut c = Complex64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    out.push(c);
    for n in 1..=nmax {
        c = c * z / (n as f64).sqrt();
        out.push(c);
    }
    Ok(out)
}

/// Truncated Fock series `Σ_{n≤nmax} c_n ψ_n`.
pub fn fock_reconstruction(profile: &MassProfile, z: Complex64, nmax: usize) -> Result<Wavefunction> {
    let coeffs = coherent_coefficients(z, nmax)?;
    let terms = coeffs
        .into_iter()
        .enumerate()
        .map(|(n, c)| Ok((c, eigenstate(profile, n)?)))
        .collect::<Result<Vec<_>>>()?;
    Wavefunction::linear_combination(&terms, format!("fock(z={z}, nmax={nmax})"))
}

/// `ψ_cs(x, t) = e^{−it/2} ψ_cs(x; z e^{−it})`, the evolution under `A†A + ½`.
///
/// Each Fock component picks up `e^{−i(n+½)t}`, which resums to the
/// rotated label and the common half-quantum phase.
pub fn evolve(profile: &MassProfile, z: Complex64, t: f64) -> Result<Wavefunction> {
    check_guard(z)?;
    let rotated = z * Complex64::from_polar(1.0, -t);
    let phase = Complex64::from_polar(1.0, -t / 2.0);
    Ok(coherent_state(profile, rotated)?
        .scaled(phase)
        .with_label(format!("cs(z={z}, t={t})[{}]", profile.label())))
}

/// Variances of the ladder quadratures X and Y in a given state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureVariances {
    pub var_x: f64,
    pub var_y: f64,
}

impl QuadratureVariances {
    pub fn product(&self) -> f64 {
        self.var_x * self.var_y
    }
}

/// `Var X`, `Var Y` for `X = (A+A†)/√2`, `Y = −i(A−A†)/√2`, by quadrature.
pub fn quadrature_variances(profile: &MassProfile, z: Complex64, cfg: &QuadConfig) -> Result<QuadratureVariances> {
    let psi = coherent_state(profile, z)?;
    state_quadrature_variances(profile, &psi, cfg)
}

/// Ladder-quadrature variances of an arbitrary normalized state.
pub fn state_quadrature_variances(
    profile: &MassProfile,
    psi: &Wavefunction,
    cfg: &QuadConfig,
) -> Result<QuadratureVariances> {
    let a = apply_a(profile, psi);
    let ad = apply_adag(profile, psi);
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mi = Complex64::new(0.0, -FRAC_1_SQRT_2);
    let xpsi = Wavefunction::linear_combination(&[(s, a.clone()), (s, ad.clone())], "X psi")?;
    let ypsi = Wavefunction::linear_combination(&[(mi, a), (-mi, ad)], "Y psi")?;
    let variance = |op_psi: &Wavefunction| -> Result<f64> {
        let mean = quad::inner(psi, op_psi, cfg)?.value.re;
        let (second, _) = quad::norm_squared(op_psi, cfg)?;
        Ok(second - mean * mean)
    };
    Ok(QuadratureVariances {
        var_x: variance(&xpsi)?,
        var_y: variance(&ypsi)?,
    })
}

/// `⟨x̄⟩` of a state, the mean of the mass-weighted coordinate.
pub fn mean_xbar(psi: &Wavefunction, cfg: &QuadConfig) -> Result<f64> {
    let p = psi.profile().clone();
    let cfg = quad::covering(cfg, &[psi]);
    let (v, _) = quad::integrate_real(|x| p.local(x).xbar * psi.value(x).norm_sqr(), &cfg)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{l2_distance, norm_squared};

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_is_ground_state() {
        for p in [MassProfile::constant(), MassProfile::cosh(1.3).unwrap(), MassProfile::rational(0.6).unwrap()] {
            let cs = coherent_state(&p, cz(0.0, 0.0)).unwrap();
            let g = eigenstate(&p, 0).unwrap();
            for x in [-4.0, -1.0, 0.0, 0.3, 2.0] {
                assert!((cs.value(x) - g.value(x)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn complex_label_normalized() {
        let cfg = QuadConfig::default();
        let p = MassProfile::cosh(1.0).unwrap();
        let (n, _) = norm_squared(&coherent_state(&p, cz(1.0, 0.5)).unwrap(), &cfg).unwrap();
        assert!((n - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coefficient_examples() {
        let c = coherent_coefficients(cz(0.0, 0.0), 5).unwrap();
        assert_eq!(c[0], cz(1.0, 0.0));
        assert!(c[1..].iter().all(|v| v.norm() == 0.0));
        let c = coherent_coefficients(cz(1.0, 0.0), 30).unwrap();
        let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(coherent_coefficients(cz(1.0, 0.0), 61).is_err());
    }

    #[test]
    fn guard_enforced() {
        let p = MassProfile::constant();
        assert!(matches!(coherent_state(&p, cz(10.5, 0.0)), Err(Error::Domain(_))));
        assert!(CoherentSpec::new(p, cz(0.0, 11.0), 0.0).is_err());
    }

    #[test]
    fn full_period_flips_sign() {
        let p = MassProfile::rational(1.4).unwrap();
        let z = cz(0.7, 0.0);
        let cs = coherent_state(&p, z).unwrap();
        let ev = evolve(&p, z, 2.0 * PI).unwrap();
        for x in [-1.0, 0.0, 1.0, 2.0] {
            let r = ev.value(x) / cs.value(x);
            assert!((r - cz(-1.0, 0.0)).norm() < 1e-10, "{r}");
        }
        let same = evolve(&p, z, 0.0).unwrap();
        assert_eq!(same.value(0.4), cs.value(0.4));
    }

    #[test]
    fn evolution_matches_phased_fock_sum() {
        let cfg = QuadConfig::default();
        let p = MassProfile::cosh(0.9).unwrap();
        let z = cz(0.6, -0.3);
        let t = 1.1;
        let coeffs = coherent_coefficients(z, 40).unwrap();
        let terms: Vec<_> = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let phase = Complex64::from_polar(1.0, -(n as f64 + 0.5) * t);
                (c * phase, eigenstate(&p, n).unwrap())
            })
            .collect();
        let series = Wavefunction::linear_combination(&terms, "series").unwrap();
        let d = l2_distance(&series, &evolve(&p, z, t).unwrap(), &cfg).unwrap();
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn quadrature_variances_are_half() {
        let cfg = QuadConfig::default();
        let v = quadrature_variances(&MassProfile::cosh(1.5).unwrap(), cz(1.0, 0.0), &cfg).unwrap();
        assert!((v.var_x - 0.5).abs() < 1e-6 && (v.var_y - 0.5).abs() < 1e-6, "{v:?}");
        assert!((v.product() - 0.25).abs() < 1e-6);
    }
}
