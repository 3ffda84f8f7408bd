mod common;

use common::*;
use singulab_core::fields::{sample_coupled, Degree};
use singulab_core::geom::{dot3, geodesic, to_vec3};
use singulab_core::polycore::{sample_kostlan, AffinePolynomialMap, HomogeneousPoly, KostlanSpec, PolynomialMap};
use singulab_core::singulab::*;
use std::f64::consts::PI;

fn kostlan(m: usize, k: usize, d: u32, seed: u64) -> PolynomialMap {
    sample_kostlan(&KostlanSpec::new(m, k, d, seed).unwrap())
}

fn linear(coeffs: &[f64]) -> HomogeneousPoly {
    let m = coeffs.len() - 1;
    let mut p = HomogeneousPoly::zero(m, 1);
    for (i, &c) in coeffs.iter().enumerate() {
        let mut e = vec![0u32; m + 1];
        e[i] = 1;
        p.set_coefficient(&e, c);
    }
    p
}

#[test]
fn linear_form_on_circle_has_two_zeros() {
    let f = PolynomialMap::scalar(linear(&[1.0, 0.0]));
    let r = find_zeros_circle(&f).unwrap();
    assert_eq!(r.count(), 2);
    for p in &r.points {
        assert!(p.x[0].abs() < 1e-12);
        assert!((p.x[1].abs() - 1.0).abs() < 1e-12);
    }
}

/// `Re((x0 + i x1)^d)` has zeros at `θ = (2j + 1)π / (2d)`.
fn real_part_power(d: u32) -> HomogeneousPoly {
    let mut p = HomogeneousPoly::zero(1, d);
    for j in (0..=d).step_by(2) {
        // Σ_j C(d, j) x0^{d-j} (i x1)^j, real part: j even with sign (-1)^{j/2}
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let c: f64 = (0..j).map(|t| (d - t) as f64 / (t + 1) as f64).product();
        p.set_coefficient(&[d - j, j], sign * c);
    }
    p
}

#[test]
fn real_part_of_power_has_equally_spaced_zeros() {
    for d in [3u32, 8, 25] {
        let f = PolynomialMap::scalar(real_part_power(d));
        let r = find_zeros_circle(&f).unwrap();
        assert_eq!(r.count(), 2 * d as usize);
        let mut angles: Vec<f64> = r.points.iter().map(|p| p.x[1].atan2(p.x[0]).rem_euclid(2.0 * PI)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (j, a) in angles.iter().enumerate() {
            let expected = (2 * j + 1) as f64 * PI / (2 * d) as f64;
            assert!((a - expected).abs() < 1e-10, "d={d} j={j}");
        }
    }
}

#[test]
fn circle_zero_count_mean_at_degree_100() {
    let counts: Vec<f64> = (0..400)
        .map(|s| find_zeros_circle(&kostlan(1, 1, 100, 7000 + s)).unwrap().count() as f64)
        .collect();
    let (m, se) = mean_se(&counts);
    assert!((m - 20.0).abs() < 3.0 * se, "mean {m} se {se}");
}

#[test]
fn circle_zeros_match_sign_scan_oracle() {
    for s in 0..20 {
        let f = kostlan(1, 1, 30, 100 + s);
        let p = f.component(0);
        let oracle = sign_scan_circle(|t| p.eval(&[t.cos(), t.sin()]), 100_000);
        assert_eq!(find_zeros_circle(&f).unwrap().count(), oracle);
    }
}

#[test]
fn height_function_critical_points() {
    let psi = PolynomialMap::scalar(linear(&[1.0, 0.0, 0.0]));
    let crit = find_singular_points(&psi, SingularityClass::CriticalPoints).unwrap();
    assert_eq!(crit.count(), 2);
    for p in &crit.points {
        assert!((p.x[0].abs() - 1.0).abs() < 1e-10);
    }
    let min = find_singular_points(&psi, SingularityClass::Minima).unwrap();
    assert_eq!(min.count(), 1);
    assert!((min.points[0].x[0] + 1.0).abs() < 1e-10);
}

#[test]
fn coordinate_pair_zero_set_is_antipodal_pair() {
    let psi = PolynomialMap::new(vec![linear(&[0.0, 1.0, 0.0]), linear(&[0.0, 0.0, 1.0])]).unwrap();
    let r = find_singular_points(&psi, SingularityClass::ZeroSet(2)).unwrap();
    assert_eq!(r.count(), 2);
    for p in &r.points {
        assert!((p.x[0].abs() - 1.0).abs() < 1e-10);
        assert!(p.residual < ACCEPT_RESIDUAL);
    }
}

#[test]
fn critical_points_match_extrema_oracle() {
    // Euler characteristic 2 on S²: #crit = 2(#min + #max) − 2.
    for s in 0..6 {
        let psi = kostlan(2, 1, 5, 500 + s);
        let p = psi.component(0).clone();
        let rot = generic_rotation(0.37 + s as f64);
        let ll = latlong(|x| p.eval(x), 400, &rot);
        let (mins, maxs) = ll.clustered_extrema(&rot, 0.05);
        let oracle = 2 * (mins + maxs) - 2;
        let crit = find_singular_points(&psi, SingularityClass::CriticalPoints).unwrap();
        assert_eq!(crit.count(), oracle, "seed {s}");
        let minima = find_singular_points(&psi, SingularityClass::Minima).unwrap();
        assert_eq!(minima.count(), mins, "seed {s}");
        // Minima are critical points.
        for q in &minima.points {
            assert!(crit
                .points
                .iter()
                .any(|c| geodesic(&to_vec3(&c.x), &to_vec3(&q.x)) < crit.dedup_radius));
        }
    }
}

#[test]
fn accepted_points_meet_residual_and_separation_invariants() {
    for s in 0..5 {
        let psi = kostlan(2, 2, 9, 40 + s);
        let r = find_singular_points(&psi, SingularityClass::ZeroSet(2)).unwrap();
        for (i, p) in r.points.iter().enumerate() {
            assert!(p.residual < ACCEPT_RESIDUAL);
            assert!(p.iterations <= MAX_NEWTON_ITERATIONS);
            for q in &r.points[i + 1..] {
                assert!(geodesic(&to_vec3(&p.x), &to_vec3(&q.x)) > r.dedup_radius);
            }
        }
        // Odd degree: the zero set is antipodally symmetric.
        for p in &r.points {
            let neg = [-p.x[0], -p.x[1], -p.x[2]];
            assert!(r.points.iter().any(|q| geodesic(&to_vec3(&q.x), &neg) < 1e-8));
        }
        assert!(r.count() <= 1000 * 81);
    }
}

#[test]
fn point_counts_stable_under_finer_seeding() {
    for s in 0..5 {
        let psi = kostlan(2, 2, 12, 900 + s);
        let a = sphere_class_points(&psi, SingularityClass::ZeroSet(2), &SphereSearch::for_degree(12)).unwrap();
        let h = SphereSearch::for_degree(12).spacing / 2.0;
        let b = sphere_class_points(&psi, SingularityClass::ZeroSet(2), &SphereSearch::with_spacing(h)).unwrap();
        assert_eq!(a.count(), b.count());
    }
}

#[test]
fn equator_is_one_closed_component() {
    let f = linear(&[1.0, 0.0, 0.0]);
    let c = extract_zero_curve(&f).unwrap();
    assert_eq!(c.components.len(), 1);
    let comp = &c.components[0];
    assert!(comp.closed);
    assert_eq!(comp.vertices.first().unwrap().x, comp.vertices.last().unwrap().x);
    for w in comp.vertices.windows(2) {
        assert!(geodesic(&w[0].x, &w[1].x) < 2.0 * c.cell_size * 2f64.sqrt());
    }
    for v in &comp.vertices {
        assert!(v.x[0].abs() < 1e-10);
    }
    assert!((comp.length() - 2.0 * PI).abs() < 1e-2);
}

#[test]
fn two_latitude_circles() {
    // x0² − t²|x|² with t = 1/2
    let mut f = HomogeneousPoly::zero(2, 2);
    f.set_coefficient(&[2, 0, 0], 0.75);
    f.set_coefficient(&[0, 2, 0], -0.25);
    f.set_coefficient(&[0, 0, 2], -0.25);
    let c = extract_zero_curve(&f).unwrap();
    assert_eq!(c.components.len(), 2);
    assert!(c.components.iter().all(|p| p.closed));
    for comp in &c.components {
        for v in &comp.vertices {
            assert!((v.x[0].abs() - 0.5).abs() < 1e-9);
        }
    }
}

#[test]
fn component_count_matches_flood_fill_oracle() {
    for s in 0..4 {
        let f = kostlan(2, 1, 20, 300 + s).component(0).clone();
        let c = extract_zero_curve(&f).unwrap();
        let ll = latlong(|x| f.eval(x), 480, &generic_rotation(1.1 + s as f64));
        assert_eq!(c.components.len(), ll.sign_regions() - 1, "seed {s}");
        // Odd degree: antipodal symmetry of the zero set.
        let odd = kostlan(2, 1, 9, 20 + s).component(0).clone();
        let co = extract_zero_curve(&odd).unwrap();
        let v = co.components[0].vertices[0].x;
        let neg = [-v[0], -v[1], -v[2]];
        assert!(odd.eval(&neg).abs() < 1e-8);
    }
}

#[test]
fn whitney_normal_form_has_single_cusp_at_origin() {
    let mut f = AffinePolynomialMap::zero(2, 2, 3);
    f.set_coefficient(0, &[3, 0], 1.0).unwrap();
    f.set_coefficient(0, &[1, 1], -1.0).unwrap();
    f.set_coefficient(1, &[0, 1], 1.0).unwrap();
    let fold = extract_planar_fold(&f, 1.0, 0.02).unwrap();
    for comp in &fold.components {
        for v in &comp.vertices {
            assert!((3.0 * v.x[0] * v.x[0] - v.x[1]).abs() < 1e-9);
        }
    }
    let cusps = find_planar_cusps(&f, 1.0, 0.02).unwrap();
    assert_eq!(cusps.count(), 1);
    assert!(cusps.points[0].x[0].abs() < 1e-8 && cusps.points[0].x[1].abs() < 1e-8);
}

#[test]
fn linear_map_has_no_fold_or_cusps() {
    let psi = PolynomialMap::new(vec![linear(&[0.0, 1.0, 0.0]), linear(&[0.0, 0.0, 1.0])]).unwrap();
    // Fold of a linear map on S² is the great circle x0 = 0; no cusps on it.
    let cusps = find_cusps(&psi).unwrap();
    assert_eq!(cusps.count(), 0);
    let mut planar = AffinePolynomialMap::zero(2, 2, 1);
    planar.set_coefficient(0, &[1, 0], 1.0).unwrap();
    planar.set_coefficient(1, &[0, 1], 2.0).unwrap();
    assert!(extract_planar_fold(&planar, 1.0, 0.05).unwrap().components.is_empty());
    assert_eq!(find_planar_cusps(&planar, 1.0, 0.05).unwrap().count(), 0);
}

#[test]
fn cusp_count_stable_under_finer_fold_grid() {
    for s in 0..4 {
        let psi = kostlan(2, 2, 8, 60 + s);
        let d = fold_polynomial(&psi).unwrap();
        let h = curve_cell_size(d.degree());
        let coarse = cusps_on_fold(&psi, &d, &extract_zero_curve_with(&d, h).unwrap()).unwrap();
        let fine = cusps_on_fold(&psi, &d, &extract_zero_curve_with(&d, h / 2.0).unwrap()).unwrap();
        assert_eq!(coarse.count(), fine.count(), "seed {s}");
        for p in &coarse.points {
            assert!(fine
                .points
                .iter()
                .any(|q| geodesic(&to_vec3(&p.x), &to_vec3(&q.x)) < 2.0 * h));
            assert!(p.residual < 1e-6);
        }
    }
}

#[test]
fn fold_polynomial_is_frame_determinant() {
    let psi = kostlan(2, 2, 4, 3);
    let d = fold_polynomial(&psi).unwrap();
    for x in [[0.6, 0.0, 0.8], [0.0, -1.0, 0.0], [0.48, 0.6, 0.64]] {
        let (e1, e2) = singulab_core::geom::oriented_frame3(&x);
        let j = psi.ambient_jets(&x, 1);
        let g = |c: usize, e: &[f64; 3]| dot3(&to_vec3(&j[c].gradient), e);
        let det = g(0, &e1) * g(1, &e2) - g(0, &e2) * g(1, &e1);
        assert!((d.eval(&x) - det).abs() < 1e-10 * (1.0 + det.abs()));
    }
}

#[test]
fn circle_knot_has_no_crossings() {
    let n = 256;
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    let k = knot_from_points(pts, 0.3, 1).unwrap();
    assert_eq!(k.crossings, 0);
    assert!(k.min_distance > EMBEDDING_FLOOR);
}

#[test]
fn trefoil_has_three_crossings() {
    let n = 600;
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [
                t.sin() + 2.0 * (2.0 * t).sin(),
                t.cos() - 2.0 * (2.0 * t).cos(),
                -(3.0 * t).sin(),
            ]
        })
        .collect();
    let k = knot_from_points(pts.clone(), 0.3, 1).unwrap();
    let proj: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    assert_eq!(brute_force_crossings(&proj), 3);
    assert_eq!(k.crossings, 3);
}

#[test]
fn kostlan_knots_pass_audit_and_match_crossing_oracle() {
    for s in 0..10 {
        let k = sample_knot(20, min_knot_points(20), 40 + s).unwrap();
        assert!(k.min_distance > EMBEDDING_FLOOR);
        if k.retries == 0 {
            let proj: Vec<[f64; 2]> = k.points.iter().map(|p| [p[0], p[1]]).collect();
            assert_eq!(brute_force_crossings(&proj), k.crossings);
        }
    }
    assert!(sample_knot(50, 100, 1).is_err());
}

#[test]
fn coupled_knots_share_tables() {
    let a = sample_knot(12, min_knot_points(50), 9).unwrap();
    let pair = sample_coupled(2, 3, singulab_core::fields::default_truncation_order(2), 9).unwrap();
    let v = pair.view(Degree::Finite(12));
    use singulab_core::fields::PlanarField;
    let x = v.value(&[1.0, 0.0]).unwrap();
    assert!((x[0] - a.points[0][0]).abs() < 1e-14);
}

#[test]
fn dumps_roundtrip() {
    let f = linear(&[0.0, 0.0, 1.0]);
    let c = extract_zero_curve(&f).unwrap();
    let text = dump_curves(&c);
    let parsed = parse_curve_dump(&text).unwrap();
    assert_eq!(parsed.len(), c.components.len());
    assert_eq!(parsed[0].len(), c.components[0].vertices.len());
    assert_eq!(parsed[0][0].1, c.components[0].vertices[0].x);
    let psi = PolynomialMap::scalar(linear(&[1.0, 0.0, 0.0]));
    let pts = find_singular_points(&psi, SingularityClass::CriticalPoints).unwrap();
    assert_eq!(dump_points(&pts).lines().count(), 2);
}
