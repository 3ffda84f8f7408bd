mod common;

use common::*;
use proptest::prelude::*;
use singulab_core::error::Error;
use singulab_core::fields::{sample_coupled, Degree, PlanarField};
use singulab_core::geom::Vec3;
use singulab_core::polycore::{sample_kostlan, HomogeneousPoly, KostlanSpec, PolynomialMap};
use singulab_core::rng::SimRng;
use singulab_core::singulab::*;
use singulab_core::topo::*;

fn scalar(m: usize, d: u32, seed: u64) -> HomogeneousPoly {
    sample_kostlan(&KostlanSpec::new(m, 1, d, seed).unwrap())
        .component(0)
        .clone()
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
fn sphere_b0_matches_flood_fill() {
    let f = scalar(2, 30, 4242);
    let c = extract_zero_curve(&f).unwrap();
    let s = betti_of(&c, None);
    let ll = latlong(|x| f.eval(x), 600, &generic_rotation(0.71));
    assert_eq!(s.b0, ll.sign_regions() - 1);
    assert_eq!(s.b1, s.b0);
}

#[test]
fn equator_has_two_height_critical_points() {
    let c = extract_zero_curve(&linear(&[0.0, 0.0, 1.0])).unwrap();
    let a = morse_audit(&c, &[1.0, 0.0, 0.0]).unwrap();
    assert_eq!(a.crit_count, 2);
    assert_eq!(a.b0, 1);
    assert!(a.pass);
}

#[test]
fn latitude_circles_are_degenerate_along_the_axis() {
    let mut f = HomogeneousPoly::zero(2, 2);
    f.set_coefficient(&[2, 0, 0], 0.75);
    f.set_coefficient(&[0, 2, 0], -0.25);
    f.set_coefficient(&[0, 0, 2], -0.25);
    let c = extract_zero_curve(&f).unwrap();
    assert!(matches!(
        morse_audit(&c, &[1.0, 0.0, 0.0]),
        Err(Error::DegenerateDirection(_))
    ));
    let (a, _) = morse_audit_generic(&c, 3, 5).unwrap();
    assert_eq!(a.crit_count, 4);
    assert!(a.pass);
}

/// Critical points of `⟨dir, ·⟩` on `{f = 0}` solved directly as the common
/// zeros of `f` and `x · (∇f × dir)`, without tracing the curve.
fn algebraic_crit_count(f: &HomogeneousPoly, dir: &Vec3) -> usize {
    let g: Vec<HomogeneousPoly> = (0..3).map(|i| f.partial(i)).collect();
    let mut h = HomogeneousPoly::zero(2, f.degree());
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        // (∇f × dir)_i = ∂_j f · dir_k − ∂_k f · dir_j
        let mut c = g[j].scaled(dir[k]);
        c.add_scaled(&g[k], -dir[j]);
        h.add_scaled(&c.mul_variable(i), 1.0);
    }
    let map = PolynomialMap::new(vec![f.clone(), h]).unwrap();
    find_singular_points(&map, SingularityClass::ZeroSet(2)).unwrap().count()
}

#[test]
fn morse_inequality_on_random_curves() {
    let mut rng = SimRng::new(77);
    let (mut audits, mut checked, mut exact) = (0, 0, 0);
    for s in 0..6 {
        let f = scalar(2, 20, 900 + s);
        let c = extract_zero_curve(&f).unwrap();
        for _ in 0..20 {
            let v = rng.unit_vector(3);
            let dir = [v[0], v[1], v[2]];
            let a = match morse_audit(&c, &dir) {
                Ok(a) => a,
                Err(Error::DegenerateDirection(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            audits += 1;
            assert!(a.pass);
            if audits % 5 == 1 {
                // Sub-cell ovals are invisible to the default grid; any
                // disagreement must disappear at a quarter of the cell size.
                let alg = algebraic_crit_count(&f, &a.direction);
                checked += 1;
                if alg == a.crit_count {
                    exact += 1;
                } else {
                    let fine = extract_zero_curve_with(&f, c.cell_size / 4.0).unwrap();
                    assert_eq!(morse_audit(&fine, &a.direction).unwrap().crit_count, alg);
                }
            }
        }
    }
    assert!(audits >= 100);
    assert!(exact * 5 >= checked * 4, "{exact} of {checked}");
}

#[test]
fn trig_bump_on_linear_circle_function() {
    let f = linear(&[0.0, 1.0]);
    let spec = PerturbationSpec {
        amplitude: 0.1,
        omega: 40.0,
        mode: PerturbationMode::TrigBump,
        seed: 5,
    };
    let t = semicontinuity_trial(&f, &spec).unwrap();
    assert_eq!(t.b0_base, 2);
    assert!(t.both_transversal);
    let pert = Perturbation::build(&spec, 1).unwrap();
    let oracle = sign_scan_circle(
        |a| {
            let x = [a.cos(), a.sin()];
            f.eval(&x) + pert.eval(&x)
        },
        100_000,
    );
    assert_eq!(t.b0_pert, Some(oracle));
    assert!(oracle >= 2);
}

#[test]
fn zero_amplitude_is_identity() {
    for m in [1, 2] {
        let f = scalar(m, 10, 31);
        for mode in [PerturbationMode::TrigBump, PerturbationMode::RandomHighDegree(60)] {
            let spec = PerturbationSpec {
                amplitude: 0.0,
                omega: 10.0,
                mode,
                seed: 1,
            };
            let t = semicontinuity_trial(&f, &spec).unwrap();
            assert_eq!(t.b0_pert, Some(t.b0_base));
        }
    }
}

#[test]
fn perturbation_sup_is_bounded_by_amplitude() {
    for m in [1, 2] {
        for (i, mode) in [PerturbationMode::TrigBump, PerturbationMode::RandomHighDegree(40)]
            .into_iter()
            .enumerate()
        {
            let spec = PerturbationSpec {
                amplitude: 0.3,
                omega: 25.0,
                mode,
                seed: 17 + i as u64,
            };
            let p = Perturbation::build(&spec, m).unwrap();
            assert!(p.grid_sup() <= 0.3);
        }
    }
}

#[test]
fn random_perturbations_never_lose_components() {
    let mut accepted = 0;
    for s in 0..30 {
        let f = scalar(1, 10, 5000 + s);
        let spec = PerturbationSpec {
            amplitude: auto_amplitude(&f).unwrap(),
            omega: 0.0,
            mode: PerturbationMode::RandomHighDegree(60),
            seed: 9000 + s,
        };
        let t = semicontinuity_trial(&f, &spec).unwrap();
        if !t.both_transversal {
            continue;
        }
        accepted += 1;
        let pert = Perturbation::build(&spec, 1).unwrap();
        let oracle = sign_scan_circle(
            |a| {
                let x = [a.cos(), a.sin()];
                f.eval(&x) + pert.eval(&x)
            },
            100_000,
        );
        assert_eq!(t.b0_base, sign_scan_circle(|a| f.eval(&[a.cos(), a.sin()]), 100_000));
        assert_eq!(t.b0_pert, Some(oracle));
        assert!(oracle >= t.b0_base);
    }
    assert!(accepted >= 28);
    for s in 0..4 {
        let f = scalar(2, 10, 6000 + s);
        let spec = PerturbationSpec {
            amplitude: auto_amplitude(&f).unwrap(),
            omega: 0.0,
            mode: PerturbationMode::RandomHighDegree(60),
            seed: 9100 + s,
        };
        let t = semicontinuity_trial(&f, &spec).unwrap();
        assert!(t.both_transversal);
        assert!(t.b0_pert.unwrap() >= t.b0_base);
        let pert = Perturbation::build(&spec, 2).unwrap();
        let ll = latlong(|x| f.eval(x) + pert.eval(x), 600, &generic_rotation(0.2 + s as f64));
        assert_eq!(t.b0_pert.unwrap(), ll.sign_regions() - 1);
    }
}

#[test]
fn constant_sampler_gives_point_mass() {
    let run = betti_histogram(|_| Ok(3), 200).unwrap();
    assert_eq!(run.histogram.probability(3), 1.0);
    assert_eq!(tv_distance(&run.histogram, &run.histogram), 0.0);
    assert_eq!(run.histogram.dump(), "3 1.00000000000000000e0\n");
    assert!(betti_histogram(|_| Ok(0), 10).is_err());
}

#[test]
fn degenerate_samples_are_discarded() {
    let run = betti_histogram(
        |i| {
            if i % 50 == 0 {
                Err(Error::degenerate("flat"))
            } else {
                Ok(i % 3)
            }
        },
        200,
    )
    .unwrap();
    assert_eq!(run.discarded, 4);
    assert_eq!(run.histogram.total(), 196);
}

#[test]
fn interior_components_match_planar_flood_fill() {
    let mut checked = 0;
    for s in 0..12 {
        let pair = sample_coupled(2, 1, 30, 700 + s).unwrap();
        for degree in [Degree::Finite(16), Degree::Infinite] {
            let summary = disk_interior_b0(&pair, degree).unwrap();
            let view = pair.view(degree);
            let g = |a: f64, b: f64| view.value(&[a, b]).unwrap()[0];
            let (count, ambiguous) = planar_inside_regions(g, DISK_HALF_WIDTH, 880, 0.03);
            if ambiguous > 0 {
                continue;
            }
            checked += 1;
            assert_eq!(summary.interior_b0, count, "seed {s} {degree}");
            assert!(summary.interior_b0 <= summary.clipped_b0);
            assert!(summary.b1 <= summary.b0);
        }
    }
    assert!(checked >= 12);
}

fn histogram_strategy() -> impl Strategy<Value = Histogram> {
    prop::collection::vec(0usize..8, 1..40).prop_map(Histogram::from_values)
}

proptest! {
    #[test]
    fn tv_is_a_metric(a in histogram_strategy(), b in histogram_strategy(), c in histogram_strategy()) {
        let ab = tv_distance(&a, &b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - tv_distance(&b, &a)).abs() < 1e-15);
        prop_assert!(tv_distance(&a, &a) == 0.0);
        prop_assert!(ab <= tv_distance(&a, &c) + tv_distance(&c, &b) + 1e-12);
    }

    #[test]
    fn betti_invariant_under_fragment_permutation(seed in 0u64..1000, cut in 1usize..5) {
        let f = scalar(2, 8, seed);
        let c = extract_zero_curve(&f).unwrap();
        let base = betti_of(&c, None);
        // Split every closed polyline into open fragments sharing endpoints,
        // then reverse and shuffle them.
        let mut pieces = Vec::new();
        for comp in &c.components {
            let v = &comp.vertices;
            let step = (v.len() - 1).div_ceil(cut).max(1);
            let mut i = 0;
            while i + 1 < v.len() {
                let j = (i + step).min(v.len() - 1);
                pieces.push(Polyline { vertices: v[i..=j].to_vec(), closed: false });
                i = j;
            }
        }
        let mut rng = SimRng::new(seed);
        for p in pieces.iter_mut() {
            if rng.uniform() < 0.5 {
                p.vertices.reverse();
            }
        }
        for i in (1..pieces.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            pieces.swap(i, j);
        }
        let shuffled = CurveResult { components: pieces, ..c.clone() };
        let got = betti_of(&shuffled, None);
        prop_assert_eq!(got.b0, base.b0);
        prop_assert_eq!(got.b1, base.b1);
    }
}
