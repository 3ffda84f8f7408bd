mod common;

use std::f64::consts::PI;

use common::mean_se;
use singulab_core::error::Error;
use singulab_core::fields::{
    default_truncation_order, BargmannFockField, Degree, KernelKind, KernelSpec, PlanarField,
};
use singulab_core::kacrice::*;
use singulab_core::polycore::{sample_kostlan, KostlanSpec};
use singulab_core::singulab::*;

fn zeros(m: usize) -> SingularityClass {
    SingularityClass::ZeroSet(m)
}

fn kernel(kind: KernelKind, m: usize) -> KernelSpec {
    KernelSpec::new(kind, m, m).unwrap()
}

#[test]
fn closed_form_counts() {
    assert_eq!(expected_zeros_closed_form(1, 100).value, 20.0);
    assert_eq!(expected_zeros_closed_form(2, 1).value, 2.0);
    assert_eq!(expected_zeros_closed_form(2, 9).value, 18.0);
}

#[test]
fn cartwright_sturmfels_values() {
    assert_eq!(cartwright_sturmfels_bound(1, 3).unwrap(), 5);
    assert_eq!(cartwright_sturmfels_bound(2, 2).unwrap(), 4);
    assert_eq!(cartwright_sturmfels_bound(1, 2).unwrap(), 3);
    assert_eq!(cartwright_sturmfels_sphere_bound(1, 2).unwrap(), 4);
    assert_eq!(cartwright_sturmfels_sphere_bound(2, 3).unwrap(), 14);
    assert!(cartwright_sturmfels_bound(1, 1).is_err());
}

#[test]
fn quadratic_forms_respect_the_critical_point_bound() {
    for (m, d, trials) in [(1usize, 2u32, 200u64), (1, 5, 100), (2, 2, 40), (2, 4, 40)] {
        let bound = cartwright_sturmfels_bound(m, d).unwrap() as usize;
        let sphere = cartwright_sturmfels_sphere_bound(m, d).unwrap() as usize;
        for s in 0..trials {
            let p = sample_kostlan(&KostlanSpec::new(m, 1, d, 40_000 + s).unwrap());
            let n = find_singular_points(&p, SingularityClass::CriticalPoints).unwrap().count();
            // critical points come in antipodal pairs
            assert_eq!(n % 2, 0);
            assert!(n / 2 <= bound, "m {m} d {d}: {n}");
            assert!(n <= sphere, "m {m} d {d}: {n}");
            if d == 2 {
                assert_eq!(n, sphere);
            }
        }
    }
}

#[test]
fn bargmann_fock_density_at_origin() {
    let est = kac_rice_density(zeros(1), &kernel(KernelKind::BargmannFock, 1), &[0.0], 100_000, 3).unwrap();
    assert!((est.value - 1.0 / PI).abs() < 3.0 * est.stderr);
    // crossing counts of sampled fields on [-1, 1]
    let order = default_truncation_order(1);
    let counts: Vec<f64> = (0..3000)
        .map(|s| {
            let x = BargmannFockField::sample(1, 1, order, 70_000 + s).unwrap();
            let n = 2000;
            let v: Vec<f64> = (0..=n)
                .map(|i| x.value(&[-1.0 + 2.0 * i as f64 / n as f64]).unwrap()[0])
                .collect();
            v.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count() as f64
        })
        .collect();
    let (mean, se) = mean_se(&counts);
    let per_length = mean / 2.0;
    assert!((per_length - est.value).abs() < 3.0 * (se / 2.0 + est.stderr), "{per_length}");
}

#[test]
fn rescaled_density_converges_to_bargmann_fock() {
    let u = [0.3, -0.2];
    let inf = kac_rice_density(zeros(2), &kernel(KernelKind::BargmannFock, 2), &u, 20_000, 9).unwrap();
    for d in [100u32, 1000, 10_000] {
        let fin = kac_rice_density(zeros(2), &kernel(KernelKind::RescaledKostlan(d), 2), &u, 20_000, 9).unwrap();
        assert!((fin.value - inf.value).abs() < 2.0 / d as f64, "d {d}");
    }
}

#[test]
fn independent_seeds_agree() {
    let k = kernel(KernelKind::WeightedY(Degree::Finite(20)), 2);
    let a = kac_rice_density(zeros(2), &k, &[0.4, 0.1], 100_000, 1).unwrap();
    let b = kac_rice_density(zeros(2), &k, &[0.4, 0.1], 100_000, 2).unwrap();
    assert!((a.value - b.value).abs() < 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt());
}

#[test]
fn densities_are_nonnegative_and_bounded() {
    let kinds = [
        KernelKind::BargmannFock,
        KernelKind::RescaledKostlan(7),
        KernelKind::WeightedY(Degree::Infinite),
        KernelKind::WeightedY(Degree::Finite(12)),
    ];
    let pts: Vec<Vec<f64>> = (0..6)
        .map(|i| {
            let t = i as f64 * 1.1;
            vec![t.cos() * i as f64 / 6.0, t.sin() * i as f64 / 6.0]
        })
        .collect();
    for kind in kinds {
        let prof = density_profile(zeros(2), &kernel(kind, 2), pts.clone(), 2000, 5).unwrap();
        for v in &prof.values {
            assert!(v.is_finite() && *v >= 0.0 && *v < 10.0);
        }
        assert_eq!(density_dump(&prof).lines().count(), pts.len());
        assert_eq!(density_dump(&prof).lines().next().unwrap().split(' ').count(), 4);
    }
}

#[test]
fn unsupported_classes_are_rejected() {
    let k = KernelSpec::new(KernelKind::BargmannFock, 2, 1).unwrap();
    assert!(matches!(
        kac_rice_density(SingularityClass::CriticalPoints, &k, &[0.0, 0.0], 100, 1),
        Err(Error::UnsupportedClass(_))
    ));
}

#[test]
fn constant_density_integrates_to_disk_area() {
    let (v, se) = integrate_density(
        |_, _| Ok(DensityEstimate { value: 1.0, stderr: 0.0 }),
        2,
        1.0,
        1000,
        4,
    )
    .unwrap();
    assert!((v - PI).abs() < 1e-3);
    assert_eq!(se, 0.0);
}

#[test]
fn circle_count_from_density_matches_closed_form() {
    let k = kernel(KernelKind::RescaledKostlan(25), 1);
    let e = integrate_expected_count(zeros(1), &k, Region::Sphere, 1, 1_000_000, 11).unwrap();
    assert!((e.value - 10.0).abs() < 0.1, "{}", e.value);
    assert_eq!(e.method, CountMethod::KacRiceMc);
}

fn empirical_mean(m: usize, d: u32, trials: u64, seed: u64) -> (f64, f64) {
    let counts: Vec<f64> = (0..trials)
        .map(|s| {
            let p = sample_kostlan(&KostlanSpec::new(m, m, d, seed + s).unwrap());
            find_singular_points(&p, zeros(m)).unwrap().count() as f64
        })
        .collect();
    mean_se(&counts)
}

#[test]
fn three_estimators_agree() {
    for (m, d, trials) in [(1usize, 25u32, 2000u64), (1, 100, 1000), (2, 9, 300)] {
        let closed = expected_zeros_closed_form(m, d).value;
        let kr = integrate_expected_count(
            zeros(m),
            &kernel(KernelKind::RescaledKostlan(d), m),
            Region::Sphere,
            1,
            200_000,
            21,
        )
        .unwrap();
        let (emp, se) = empirical_mean(m, d, trials, 80_000 + d as u64);
        assert!((kr.value - closed).abs() < 3.0 * kr.stderr, "{m} {d}: {} vs {closed}", kr.value);
        assert!((emp - closed).abs() < 3.0 * se, "{m} {d}: {emp} vs {closed}");
        assert!((emp - kr.value).abs() < 3.0 * (se * se + kr.stderr * kr.stderr).sqrt());
    }
}

#[test]
fn disk_integral_of_bargmann_fock_density() {
    // Stationary field: E #zeros in D² = π ρ(0).
    let k = kernel(KernelKind::BargmannFock, 2);
    let e = integrate_expected_count(zeros(2), &k, Region::Disk { radius: 1.0 }, 200, 5000, 8).unwrap();
    let rho0 = kac_rice_density(zeros(2), &k, &[0.0, 0.0], 200_000, 9).unwrap();
    assert!((e.value - PI * rho0.value).abs() < 3.0 * (e.stderr + PI * rho0.stderr));
}

#[test]
fn sqrt_law_constants() {
    let c1 = sqrt_law_constant(zeros(1), &SqrtLawConfig::new(1, 4000, 5)).unwrap();
    assert!((c1.value - 2.0).abs() < 3.0 * c1.stderr, "{:?}", c1);
    let c2 = sqrt_law_constant(zeros(2), &SqrtLawConfig::new(2, 400, 6)).unwrap();
    assert!((c2.value - 2.0).abs() < 3.0 * c2.stderr, "{:?}", c2);
    assert!(sqrt_law_constant(zeros(1), &SqrtLawConfig::new(1, 0, 5)).is_err());
}
