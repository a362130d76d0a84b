use pdmcs_core::oracle::{compare_states, discretize, eigen_lowest, validate_spectrum};
use pdmcs_core::{MassProfile, MAX_LEVELS};
use proptest::prelude::*;

#[test]
fn hand_stencil_entries() {
    let c = MassProfile::constant();
    let op = discretize(&c, -10.0, 10.0, 5).unwrap();
    let h: f64 = 20.0 / 6.0;
    for i in 0..5 {
        let x = -10.0 + (i + 1) as f64 * h;
        assert!((op.diag[i] - (2.0 / (h * h) + c.potential_v(x).unwrap())).abs() < 1e-12);
    }
    for e in &op.offdiag {
        assert!((e + 1.0 / (h * h)).abs() < 1e-15);
    }
}

#[test]
fn gershgorin_brackets_the_ground_level() {
    let op = discretize(&MassProfile::cosh(1.0).unwrap(), -6.0, 6.0, 400).unwrap();
    let (lo, _) = op.gershgorin();
    let e0 = eigen_lowest(&op, 1).unwrap().eigenvalues[0];
    assert!(lo <= 0.0 && lo <= e0);
}

#[test]
fn constant_mass_spectrum() {
    let rep = validate_spectrum(&MassProfile::constant(), -10.0, 10.0, 2000, 4).unwrap();
    for (n, e) in rep.eigenvalues.iter().enumerate() {
        assert!((e - n as f64).abs() < 1e-4, "E{n} = {e}");
    }
    assert!(rep.overlaps.iter().all(|&o| o > 0.99999), "{:?}", rep.overlaps);
    let v0 = &rep.eigenvectors[0];
    assert!(v0[0].abs() < 1e-8 && v0[v0.len() - 1].abs() < 1e-8);
}

#[test]
fn rational_one_matches_constant() {
    let a = eigen_lowest(&discretize(&MassProfile::constant(), -10.0, 10.0, 800).unwrap(), 4).unwrap();
    let b = eigen_lowest(&discretize(&MassProfile::rational(1.0).unwrap(), -10.0, 10.0, 800).unwrap(), 4).unwrap();
    assert_eq!(a.eigenvalues, b.eigenvalues);
}

#[test]
fn cosh_spacing_and_overlaps() {
    let rep = validate_spectrum(&MassProfile::cosh(1.0).unwrap(), -6.0, 6.0, 3000, 6).unwrap();
    for s in rep.spacings() {
        assert!((s - 1.0).abs() < 1e-3, "{s}");
    }
    assert!(rep.eigenvalues[0].abs() < 1e-3);
    let rep = validate_spectrum(&MassProfile::cosh(1.5).unwrap(), -6.0, 6.0, 4000, 4).unwrap();
    assert!(rep.overlaps.iter().all(|&o| o > 0.9999), "{:?}", rep.overlaps);
}

#[test]
fn rational_spacing() {
    let rep = validate_spectrum(&MassProfile::rational(1.2).unwrap(), -10.0, 10.0, 3000, 6).unwrap();
    for s in rep.spacings() {
        assert!((s - 1.0).abs() < 2e-3, "{s}");
    }
    assert!(rep.eigenvalues[0].abs() < 1e-3);
}

#[test]
fn second_order_convergence() {
    let p = MassProfile::constant();
    let e: Vec<f64> = [500, 1000, 2000]
        .iter()
        .map(|&n| eigen_lowest(&discretize(&p, -10.0, 10.0, n).unwrap(), 1).unwrap().eigenvalues[0].abs())
        .collect();
    for w in e.windows(2) {
        let r = w[0] / w[1];
        assert!((3.5..=4.5).contains(&r), "ratio {r}");
    }
}

#[test]
fn eigenvectors_are_orthonormal() {
    let rep = eigen_lowest(&discretize(&MassProfile::rational(0.8).unwrap(), -10.0, 10.0, 1500).unwrap(), 6).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let dot: f64 = rep.eigenvectors[i].iter().zip(&rep.eigenvectors[j]).map(|(a, b)| a * b).sum::<f64>() * rep.h;
            let t = if i == j { 1.0 } else { 0.0 };
            assert!((dot - t).abs() < 1e-8, "[{i}][{j}] {dot}");
        }
    }
}

#[test]
fn guards_and_json() {
    let op = discretize(&MassProfile::constant(), -10.0, 10.0, 200).unwrap();
    assert!(eigen_lowest(&op, 0).is_err());
    assert!(eigen_lowest(&op, MAX_LEVELS + 1).is_err());
    assert!(discretize(&MassProfile::constant(), 1.0, -1.0, 100).is_err());
    let rep = compare_states(eigen_lowest(&op, 3).unwrap(), &MassProfile::constant(), 2).unwrap();
    let v: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
    assert_eq!(v["levels"].as_array().unwrap().len(), 3);
    assert_eq!(v["grid"]["N"], 200);
    assert!(v["levels"][1]["overlap"].as_f64().unwrap() > 0.99);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sturm_count_matches_eigenvalues(alpha in 0.5f64..2.0) {
        let op = discretize(&MassProfile::rational(alpha).unwrap(), -10.0, 10.0, 600).unwrap();
        let rep = eigen_lowest(&op, 5).unwrap();
        for (k, &e) in rep.eigenvalues.iter().enumerate() {
            prop_assert_eq!(op.count_below(e - 1e-6), k);
            prop_assert_eq!(op.count_below(e + 1e-6), k + 1);
        }
    }

    #[test]
    fn unit_spacing_for_random_alpha(alpha in 0.5f64..2.0, cosh in any::<bool>()) {
        let (p, a, b) = if cosh {
            (MassProfile::cosh(alpha).unwrap(), -6.0, 6.0)
        } else {
            (MassProfile::rational(alpha).unwrap(), -10.0, 10.0)
        };
        let rep = validate_spectrum(&p, a, b, 3000, 5).unwrap();
        for s in rep.spacings() {
            prop_assert!((s - 1.0).abs() < 2e-3, "spacing {s}");
        }
    }
}
