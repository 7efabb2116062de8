use std::f64::consts::PI;

use approx::assert_relative_eq;
use pfk_core::capacity::{ball_capacity, cheeger_constant, condenser_capacity, CondenserProblem};
use pfk_core::discretize::rasterize;
use pfk_core::spectral::{bessel_zero, eigen_grid, eigen_radial_shoot, SolverOptions};
use pfk_core::verify::{radial_integral, run_suite, CatalogEntry, VerifyConfig};
use pfk_core::Domain;

#[test]
fn shooting_matches_bessel_zeros() {
    let j0 = bessel_zero(0.0, 1).unwrap();
    assert_relative_eq!(eigen_radial_shoot(2, 2.0, 1.0, 1e-12).unwrap().lambda, j0 * j0, max_relative = 1e-9);
    let j1 = bessel_zero(1.0, 1).unwrap();
    // n = 4 reduces to J_1
    assert_relative_eq!(eigen_radial_shoot(4, 2.0, 1.0, 1e-12).unwrap().lambda, j1 * j1, max_relative = 1e-9);
}

#[test]
fn grid_rectangle_p2() {
    let m = rasterize(&Domain::rectangle(2.0, 1.0).unwrap(), 48).unwrap();
    let e = eigen_grid(&m, 2.0, &SolverOptions::default()).unwrap();
    assert!(e.converged);
    assert_relative_eq!(e.lambda, PI * PI * 1.25, max_relative = 0.02);
}

#[test]
fn grid_condenser_concentric_disks() {
    let prob = CondenserProblem::from_domains(&Domain::ball(2, 0.5).unwrap(), &Domain::ball(2, 1.0).unwrap(), 2.0, 64).unwrap();
    let c = condenser_capacity(&prob, &SolverOptions::default()).unwrap();
    assert_relative_eq!(c.value, 2.0 * PI / 2f64.ln(), max_relative = 0.01);
}

#[test]
fn ball_capacity_against_potential_energy() {
    // p > n: potential 1 - (r/R)^a on B_R, a = (p-n)/(p-1)
    for (n, p) in [(2usize, 3.0), (2, 5.0), (3, 4.5)] {
        let a = (p - n as f64) / (p - 1.0);
        let e = radial_integral(n, 1.0, |r| (a * r.powf(a - 1.0)).powf(p)).unwrap();
        assert_relative_eq!(e, ball_capacity(n, p, 1.0).unwrap().value, max_relative = 1e-5);
    }
}

#[test]
fn cheeger_of_square() {
    assert_relative_eq!(cheeger_constant(&Domain::rectangle(1.0, 1.0).unwrap()).unwrap(), 2.0 + PI.sqrt(), max_relative = 1e-12);
}

#[test]
fn small_suite_passes_and_is_reproducible() {
    let catalog = vec![CatalogEntry::new("square", Domain::rectangle(1.0, 1.0).unwrap())];
    let cfg = VerifyConfig {
        resolution: 32,
        mazya_family: 8,
        prop1_levels: 60,
        ..VerifyConfig::default()
    };
    let a = run_suite(&catalog, &[2.0], &cfg).unwrap();
    assert!(a.all_passed(), "{:?}", a.failures().collect::<Vec<_>>());
    assert!(a.find("faber_krahn").count() > 0);
    let b = run_suite(&catalog, &[2.0], &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn corrupted_tolerance_is_reported_by_name() {
    let catalog = vec![CatalogEntry::new("square", Domain::rectangle(1.0, 1.0).unwrap())];
    let mut cfg = VerifyConfig {
        resolution: 24,
        mazya_family: 4,
        prop1_levels: 40,
        ..VerifyConfig::default()
    };
    cfg.tolerances.set("faber_krahn", -1.0).unwrap();
    let s = run_suite(&catalog, &[2.0], &cfg).unwrap();
    let failed: Vec<_> = s.failures().map(|r| r.name.as_str()).collect();
    assert!(failed.contains(&"faber_krahn"));
}
