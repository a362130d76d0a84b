use std::f64::consts::PI;

use pdmcs_core::verify::commutator_density;
use pdmcs_core::MassProfile;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn mass_examples() {
    close(MassProfile::constant().mass2(3.7).unwrap(), 1.0, 0.0);
    close(MassProfile::cosh(1.0).unwrap().mass2(0.0).unwrap(), 1.0, 1e-15);
    close(MassProfile::rational(4.0).unwrap().mass2(0.0).unwrap(), 16.0, 1e-12);
}

#[test]
fn xbar_examples() {
    let c1 = MassProfile::cosh(1.0).unwrap();
    close(c1.xbar(0.0).unwrap(), 0.0, 0.0);
    close(c1.xbar(1.0).unwrap(), 1f64.sinh(), 1e-14);
    close(c1.xbar(1.0).unwrap(), 1.17520, 1e-5);
    let r2 = MassProfile::rational(2.0).unwrap();
    close(r2.xbar(1.0).unwrap(), 1.0 + PI / 4.0, 1e-14);
    close(c1.xbar_inverse(2f64.sinh()).unwrap(), 2.0, 1e-10);
    close(MassProfile::constant().xbar_inverse(1.234).unwrap(), 1.234, 0.0);
}

#[test]
fn superpotential_and_potentials() {
    let c = MassProfile::constant();
    close(c.superpotential(1.0).unwrap(), 0.5, 1e-15);
    close(MassProfile::cosh(1.0).unwrap().superpotential(0.0).unwrap(), 0.0, 1e-15);
    for x in [-3.0, -0.4, 0.0, 1.1, 4.0] {
        close(c.potential_v(x).unwrap(), x * x / 4.0 - 0.5, 1e-13);
    }
    close(c.partner_potential(0.0).unwrap(), 0.5, 1e-15);
    let c1 = MassProfile::cosh(1.0).unwrap();
    close(c1.partner_potential(1.0).unwrap(), c1.potential_v(1.0).unwrap() + 1.0, 1e-12);
}

/// `V = W² − (W′/√2m + W(1/√2m)′)` rebuilt from stencils on `W` and `2m`.
#[test]
fn potential_matches_stencil_oracle() {
    let h = 1e-3;
    for p in [MassProfile::cosh(1.0).unwrap(), MassProfile::rational(0.7).unwrap()] {
        for x in [0.0, 0.6, -1.3] {
            let s = |y: f64| 1.0 / p.mass2(y).unwrap().sqrt();
            let w = |y: f64| p.superpotential(y).unwrap();
            let d = |f: &dyn Fn(f64) -> f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
            let v = w(x).powi(2) - (d(&w) * s(x) + w(x) * d(&s));
            close(p.potential_v(x).unwrap(), v, 1e-9);
        }
    }
}

/// The ground state of `A†A` for constant mass is annihilated by `−d²/dx² + V`.
#[test]
fn constant_ground_state_has_zero_energy() {
    let c = MassProfile::constant();
    let psi = |x: f64| (2.0 * PI).powf(-0.25) * (-x * x / 4.0).exp();
    let h = 1e-3;
    for k in -40..=40 {
        let x = k as f64 * 0.2;
        let d2 = (-psi(x - 2.0 * h) + 16.0 * psi(x - h) - 30.0 * psi(x) + 16.0 * psi(x + h) - psi(x + 2.0 * h)) / (12.0 * h * h);
        assert!((-d2 + c.potential_v(x).unwrap() * psi(x)).abs() < 1e-8);
    }
}

#[test]
fn partner_shift_examples() {
    for p in [MassProfile::constant(), MassProfile::cosh(1.3).unwrap(), MassProfile::rational(0.6).unwrap()] {
        for x in [-2.0, 0.0, 3.0] {
            close(p.partner_potential(x).unwrap() - p.potential_v(x).unwrap(), 1.0, 1e-8);
        }
    }
}

#[test]
fn rational_one_is_constant_mass() {
    let r = MassProfile::rational(1.0).unwrap();
    let c = MassProfile::constant();
    for x in [-7.0, -0.5, 0.0, 2.25, 11.0] {
        assert_eq!(r.mass2(x).unwrap(), c.mass2(x).unwrap());
        assert_eq!(r.xbar(x).unwrap(), c.xbar(x).unwrap());
        assert_eq!(r.potential_v(x).unwrap(), c.potential_v(x).unwrap());
    }
}

#[test]
fn parameter_guards() {
    assert!(MassProfile::rational(0.0).is_err());
    assert!(MassProfile::rational(-1.0).is_err());
    assert!(MassProfile::cosh(f64::NAN).is_err());
}

#[test]
fn tabulated_profile_follows_its_samples() {
    let exact = MassProfile::cosh(0.8).unwrap();
    let samples: Vec<(f64, f64)> = (0..=1200)
        .map(|k| {
            let x = -6.0 + 0.01 * k as f64;
            (x, exact.mass2(x).unwrap())
        })
        .collect();
    let table = MassProfile::tabulated(&samples, "cosh table").unwrap();
    for x in [-3.0, -0.25, 0.0, 1.7, 4.4] {
        close(table.mass2(x).unwrap(), exact.mass2(x).unwrap(), 1e-6);
        close(table.xbar(x).unwrap(), exact.xbar(x).unwrap(), 1e-6);
        close(table.xbar_inverse(table.xbar(x).unwrap()).unwrap(), x, 1e-9);
    }
    close(table.partner_potential(1.0).unwrap() - table.potential_v(1.0).unwrap(), 1.0, 1e-5);
}

#[test]
fn tabulated_rejects_bad_tables() {
    assert!(MassProfile::tabulated(&[(0.0, 1.0), (1.0, -1.0), (2.0, 1.0)], "neg").is_err());
    assert!(MassProfile::tabulated(&[(0.0, 1.0), (0.0, 1.0), (2.0, 1.0)], "dup").is_err());
    assert!(MassProfile::tabulated(&[(0.0, 1.0)], "short").is_err());
}

#[test]
fn csv_profile_reports_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mass.csv");
    std::fs::write(&path, "x,mass2\n0,1\n1,oops\n").unwrap();
    let msg = MassProfile::from_csv(&path).unwrap_err().to_string();
    assert!(msg.contains("line 3"), "{msg}");
}

fn builtin() -> impl Strategy<Value = MassProfile> {
    prop_oneof![
        (0.5f64..2.0).prop_map(|a| MassProfile::cosh(a).unwrap()),
        (0.5f64..2.0).prop_map(|a| MassProfile::rational(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip(p in builtin(), x in -6.0f64..6.0) {
        let back = p.xbar_inverse(p.xbar(x).unwrap()).unwrap();
        prop_assert!((back - x).abs() < 1e-10);
    }

    #[test]
    fn xbar_increasing_and_mass_positive(p in builtin(), x in -12.0f64..12.0, dx in 1e-6f64..1.0) {
        prop_assert!(p.mass2(x).unwrap() > 0.0);
        prop_assert!(p.xbar(x + dx).unwrap() > p.xbar(x).unwrap());
    }

    #[test]
    fn commutator_identity(p in builtin(), x in -5.0f64..5.0) {
        let c = commutator_density(&p, |y| p.superpotential(y), x).unwrap();
        prop_assert!((c - 1.0).abs() < 1e-6, "commutator density {c}");
    }

    #[test]
    fn partner_shift(p in builtin(), x in -8.0f64..8.0) {
        let d = p.partner_potential(x).unwrap() - p.potential_v(x).unwrap();
        prop_assert!((d - 1.0).abs() < 1e-8);
    }

    #[test]
    fn small_alpha_cosh_degenerates(x in -6.0f64..6.0) {
        let tiny = MassProfile::cosh(1e-12).unwrap();
        let c = MassProfile::constant();
        prop_assert!((tiny.mass2(x).unwrap() - c.mass2(x).unwrap()).abs() < 1e-10);
        prop_assert!((tiny.xbar(x).unwrap() - c.xbar(x).unwrap()).abs() < 1e-10);
        prop_assert!((tiny.superpotential(x).unwrap() - c.superpotential(x).unwrap()).abs() < 1e-10);
    }
}
