use std::f64::consts::PI;

use pdmcs_core::verify::coherent_wigner;
use pdmcs_core::wigner::{wigner_diagnostics, wigner_transform};
use pdmcs_core::{coherent_state, Axis, Complex64, MassProfile, QuadConfig};
use proptest::prelude::*;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn vacuum_peak_value() {
    let psi = coherent_state(&MassProfile::constant(), cz(0.0, 0.0)).unwrap();
    let axis = Axis::linspace(-1.0, 1.0, 3).unwrap();
    let g = wigner_transform(&psi, &axis, &axis, &QuadConfig::default()).unwrap();
    assert!((g.get(1, 1) - 1.0 / PI).abs() < 1e-6);
}

#[test]
fn constant_mass_grid_on_the_square() {
    let cfg = QuadConfig::default();
    let psi = coherent_state(&MassProfile::constant(), cz(0.0, 0.0)).unwrap();
    let axis = Axis::linspace(-8.0, 8.0, 257).unwrap();
    let g = wigner_transform(&psi, &axis, &axis, &cfg).unwrap();
    let d = wigner_diagnostics(&g, &psi, &cfg).unwrap();
    assert!((d.total_mass - 1.0).abs() < 1e-3);
    assert!(d.marginal_x_error < 1e-4, "{}", d.marginal_x_error);
    assert!(d.min_value >= -1e-9);
    assert!(!d.negative);
}

#[test]
fn displaced_gaussian_closed_form() {
    // constant mass: W = e^{−(x−2a)²/2 − 2(p−b)²}/π for z = a + ib
    let cfg = QuadConfig::default();
    let z = cz(0.6, -0.4);
    let psi = coherent_state(&MassProfile::constant(), z).unwrap();
    let xs = Axis::linspace(-2.0, 4.0, 13).unwrap();
    let ps = Axis::linspace(-2.0, 1.5, 8).unwrap();
    let g = wigner_transform(&psi, &xs, &ps, &cfg).unwrap();
    for i in 0..xs.len {
        for j in 0..ps.len {
            let (x, p) = (xs.at(i), ps.at(j));
            let expect = (-(x - 1.2).powi(2) / 2.0 - 2.0 * (p + 0.4).powi(2)).exp() / PI;
            assert!((g.get(i, j) - expect).abs() < 1e-8, "({x}, {p})");
        }
    }
}

#[test]
fn momentum_marginal_matches_the_fourier_transform() {
    for (p, z) in [(MassProfile::constant(), cz(0.6, -0.4)), (MassProfile::rational(0.8).unwrap(), cz(0.5, 0.7))] {
        let (_, d) = coherent_wigner(&p, z).unwrap();
        assert!(d.marginal_p_error < 1e-4, "{}", d.marginal_p_error);
        assert!(d.marginal_x_error < 1e-4, "{}", d.marginal_x_error);
    }
}

#[test]
fn cosh_state_is_negative_somewhere() {
    let (_, d) = coherent_wigner(&MassProfile::cosh(1.2).unwrap(), cz(0.2, 0.0)).unwrap();
    assert!(d.min_value < 0.0);
    assert!(d.negative);
    assert!(d.max_imag_residue < 1e-9);
    assert!((d.total_mass - 1.0).abs() < 1e-3);
    assert!(d.marginal_x_error < 1e-4);
    assert!(d.max_abs <= 1.0 / PI + 1e-9);
}

#[test]
fn rational_state_is_negative_somewhere() {
    let (_, d) = coherent_wigner(&MassProfile::rational(0.5).unwrap(), cz(1.5, 0.0)).unwrap();
    assert!(d.negative, "min {} vs cell error {}", d.min_value, d.max_cell_error);
    assert!((d.total_mass - 1.0).abs() < 1e-3);
    assert!(d.marginal_x_error < 1e-4);
}

#[test]
fn narrow_window_is_a_domain_error() {
    let cfg = QuadConfig::default();
    let psi = coherent_state(&MassProfile::constant(), cz(0.0, 0.0)).unwrap();
    let xs = Axis::linspace(-2.0, 2.0, 9).unwrap();
    let g = wigner_transform(&psi, &xs, &xs, &cfg).unwrap();
    assert!(matches!(wigner_diagnostics(&g, &psi, &cfg), Err(pdmcs_core::Error::Domain(_))));
}

#[test]
fn file_formats() {
    let psi = coherent_state(&MassProfile::constant(), cz(0.0, 0.0)).unwrap();
    let axis = Axis::linspace(-1.0, 1.0, 3).unwrap();
    let g = wigner_transform(&psi, &axis, &axis, &QuadConfig::default()).unwrap();
    let mut long = Vec::new();
    g.write_long_csv(&mut long).unwrap();
    let long = String::from_utf8(long).unwrap();
    assert_eq!(long.lines().next(), Some("x,p,w"));
    assert_eq!(long.lines().count(), 10);
    let mut mat = Vec::new();
    g.write_matrix(&mut mat).unwrap();
    let mat = String::from_utf8(mat).unwrap();
    assert!(mat.starts_with("# "));
    assert_eq!(mat.lines().count(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn invariants_on_coarse_grids(alpha in 0.6f64..1.8, re in 0.0f64..1.5, im in -0.5f64..0.5, cosh in any::<bool>()) {
        let cfg = QuadConfig::default();
        let p = if cosh { MassProfile::cosh(alpha).unwrap() } else { MassProfile::rational(alpha).unwrap() };
        let z = cz(re, im);
        let psi = coherent_state(&p, z).unwrap();
        let (xs, ps) = pdmcs_core::wigner::default_axes(&p, z).unwrap();
        let xs = Axis::linspace(xs.start, xs.end(), 129).unwrap();
        let ps = Axis::linspace(ps.start, ps.end(), 129).unwrap();
        let g = wigner_transform(&psi, &xs, &ps, &cfg).unwrap();
        let d = wigner_diagnostics(&g, &psi, &cfg).unwrap();
        prop_assert!(d.max_imag_residue < 1e-9);
        prop_assert!((d.total_mass - 1.0).abs() < 1e-3, "mass {}", d.total_mass);
        prop_assert!(d.max_abs <= 1.0 / PI + 1e-9);
        prop_assert_eq!(d.failed_cells, 0);
    }

    #[test]
    fn real_label_even_profile_is_symmetric_in_p(alpha in 0.6f64..1.8, re in 0.0f64..1.5) {
        let cfg = QuadConfig::default();
        let p = MassProfile::cosh(alpha).unwrap();
        let psi = coherent_state(&p, cz(re, 0.0)).unwrap();
        let xs = Axis::linspace(-1.5, 1.5, 7).unwrap();
        let ps = Axis::linspace(-3.0, 3.0, 13).unwrap();
        let g = wigner_transform(&psi, &xs, &ps, &cfg).unwrap();
        for i in 0..xs.len {
            for j in 0..ps.len {
                prop_assert!((g.get(i, j) - g.get(i, ps.len - 1 - j)).abs() < 1e-9);
            }
        }
    }
}
