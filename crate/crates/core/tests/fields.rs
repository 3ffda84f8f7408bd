use nalgebra::DMatrix;
use singulab_core::fields::*;
use singulab_core::polycore::{sample_kostlan, HomogeneousPoly, KostlanSpec, PolynomialMap};
use singulab_core::rng::SimRng;

fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, u: &[f64], h: f64) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let mut a = u.to_vec();
            let mut b = u.to_vec();
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn constant_polynomial_is_constant_one() {
    let p = PolynomialMap::scalar(HomogeneousPoly::monomial(&[5, 0], 1.0));
    let x = RescaledField::new(p);
    let j = x.rescaled_jet(&[0.0], 1).unwrap();
    assert_eq!(j.value[0], 1.0);
    assert_eq!(j.gradient[(0, 0)], 0.0);
}

#[test]
fn linear_term_has_inverse_sqrt_degree_slope() {
    let d = 9;
    let p = PolynomialMap::scalar(HomogeneousPoly::monomial(&[d - 1, 1], 1.0));
    let x = RescaledField::new(p);
    let j = x.rescaled_jet(&[0.0], 1).unwrap();
    let fd = fd_gradient(|u| x.value(u).unwrap()[0], &[0.0], 1e-5);
    assert!((j.gradient[(0, 0)] - 1.0 / 3.0).abs() < 1e-12);
    assert!((j.gradient[(0, 0)] - fd[0]).abs() < 1e-6);
}

#[test]
fn rescaled_jet_matches_substitution_and_finite_differences() {
    let p = sample_kostlan(&KostlanSpec::new(2, 1, 7, 11).unwrap());
    let x = RescaledField::new(p.clone());
    let sd = 7f64.sqrt();
    let mut rng = SimRng::new(3);
    for _ in 0..10 {
        let u = [rng.uniform() * 2.0 - 1.0, rng.uniform() * 2.0 - 1.0];
        let j = x.rescaled_jet(&u, 2).unwrap();
        // Homogeneity: P(y) = |y|^d P(y/|y|).
        let y = [1.0, u[0] / sd, u[1] / sd];
        let n = (y.iter().map(|t| t * t).sum::<f64>()).sqrt();
        let yn: Vec<f64> = y.iter().map(|t| t / n).collect();
        let via_sphere = n.powi(7) * singulab_core::polycore::evaluate_map(&p, &yn).unwrap()[0];
        assert!((via_sphere - j.value[0]).abs() <= 1e-9 * (1.0 + j.value[0].abs()));
        let f = |v: &[f64]| x.value(v).unwrap()[0];
        let g = fd_gradient(f, &u, 1e-5);
        for a in 0..2 {
            assert!((g[a] - j.gradient[(0, a)]).abs() < 1e-6);
            let ga = |v: &[f64]| x.rescaled_jet(v, 1).unwrap().gradient[(0, a)];
            let h = fd_gradient(ga, &u, 1e-5);
            for b in 0..2 {
                assert!((h[b] - j.hessian[0][(a, b)]).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn rescaled_domain_is_capped() {
    let p = sample_kostlan(&KostlanSpec::new(1, 1, 4, 1).unwrap());
    let x = RescaledField::new(p);
    assert!(matches!(
        x.rescaled_jet(&[3.5], 0),
        Err(singulab_core::Error::OutOfDomain { .. })
    ));
    assert!(x.rescaled_jet(&[3.0], 0).is_ok());
}

fn tail_oracle(radius: f64, m: usize, order: u32) -> f64 {
    // Direct partial sum; terms computed iteratively in linear space.
    let x = m as f64 * radius * radius;
    let mut term = 1.0;
    let mut total = 0.0;
    for j in 1..=200u32 {
        term *= x / j as f64;
        if j > order {
            total += term;
        }
    }
    total
}

#[test]
fn truncation_order_unit_radius_line() {
    // Tail Σ_{j>10} 1/j! ≈ 2.7e-8 and Σ_{j>11} 1/j! ≈ 2.3e-9 against ε² = 1e-8.
    assert!(tail_oracle(1.0, 1, 10) > 1e-8);
    assert!(tail_oracle(1.0, 1, 11) < 1e-8);
    assert_eq!(truncation_order(1.0, 1e-4, 1, 1), 11);
}

#[test]
fn truncation_order_loose_tolerance() {
    for r in [0.25, 0.5, 1.0] {
        assert!(truncation_order(r, 0.999, 1, 1) <= 2);
    }
}

#[test]
fn truncation_order_matches_brute_force_scan() {
    for (r, m, eps) in [(1.0, 2, 1e-4), (1.5, 2, 1e-6), (0.7, 3, 1e-3), (1.5, 1, 1e-6)] {
        let brute = (1..=60).find(|&dd| tail_oracle(r, m, dd) < eps * eps).unwrap();
        assert_eq!(truncation_order(r, eps, m, 1), brute, "r={r} m={m}");
        assert!((truncation_tail(r, m, brute) / tail_oracle(r, m, brute) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn coupled_views_agree_at_origin_and_in_linear_terms() {
    let pair = sample_coupled(2, 2, 20, 5).unwrap();
    let inf = eval_coupled(&pair, Degree::Infinite, &[0.0, 0.0], 1).unwrap();
    for d in [1, 3, 16, 400] {
        let j = eval_coupled(&pair, Degree::Finite(d), &[0.0, 0.0], 1).unwrap();
        for c in 0..2 {
            assert_eq!(j.value[c], pair.gamma(c)[0]);
            assert_eq!(j.value[c], inf.value[c]);
            for a in 0..2 {
                assert!((j.gradient[(c, a)] - inf.gradient[(c, a)]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn bargmann_fock_coefficient_variances() {
    let pair = sample_coupled(2, 1, 6, 9).unwrap();
    let b = pair.basis();
    for i in 0..b.len() {
        let s = pair.coefficient_scale(Degree::Infinite, i);
        let beta = b.exponents(i);
        let fact: f64 = beta.iter().map(|&e| (1..=e).product::<u32>() as f64).product();
        assert!((s * s - 1.0 / fact).abs() < 1e-14);
    }
}

#[test]
fn finite_view_has_kostlan_coefficient_variances() {
    // Coefficient of u^β in X_d is ξ_{(d-|β|, β)} d^{-|β|/2}, Var = multinomial / d^{|β|}.
    let d = 5u32;
    let pair = sample_coupled(2, 1, 8, 9).unwrap();
    let b = pair.basis();
    for i in 0..b.len() {
        let beta = b.exponents(i);
        let nb: u32 = beta.iter().sum();
        let s = pair.coefficient_scale(Degree::Finite(d), i);
        if nb > d {
            assert_eq!(s, 0.0);
            continue;
        }
        let f = |n: u32| (1..=n).product::<u32>() as f64;
        let multi = f(d) / (f(d - nb) * f(beta[0]) * f(beta[1]));
        assert!((s * s - multi / (d as f64).powi(nb as i32)).abs() < 1e-13);
    }
}

fn sup_distance(pair: &CoupledPair, d: u32) -> f64 {
    let a = pair.view(Degree::Finite(d));
    let b = pair.view(Degree::Infinite);
    let mut sup: f64 = 0.0;
    for i in 0..41 {
        for j in 0..41 {
            let u = [-1.0 + i as f64 / 20.0, -1.0 + j as f64 / 20.0];
            if u[0] * u[0] + u[1] * u[1] > 1.0 {
                continue;
            }
            let x = a.value(&u).unwrap()[0];
            let y = b.value(&u).unwrap()[0];
            sup = sup.max((x - y).abs());
        }
    }
    sup
}

#[test]
fn coupled_median_distance_decreases() {
    let mut d16 = Vec::new();
    let mut d256 = Vec::new();
    for seed in 0..50 {
        let pair = sample_coupled(2, 1, default_truncation_order(2), seed).unwrap();
        d16.push(sup_distance(&pair, 16));
        d256.push(sup_distance(&pair, 256));
    }
    let med = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    assert!(med(&mut d256) < med(&mut d16));
}

#[test]
fn doubling_truncation_changes_limit_field_little() {
    let eps = DEFAULT_TOLERANCE;
    let order = truncation_order(1.0, eps, 2, 1);
    for seed in 0..20 {
        let a = sample_coupled(2, 1, order, seed).unwrap().view(Degree::Infinite);
        let b = sample_coupled(2, 1, 2 * order, seed).unwrap().view(Degree::Infinite);
        for i in 0..21 {
            for j in 0..21 {
                let u = [-1.0 + i as f64 / 10.0, -1.0 + j as f64 / 10.0];
                if u[0] * u[0] + u[1] * u[1] > 1.0 {
                    continue;
                }
                let diff = (a.value(&u).unwrap()[0] - b.value(&u).unwrap()[0]).abs();
                assert!(diff < 10.0 * eps, "seed {seed}: {diff}");
            }
        }
    }
}

fn fd_kernel_jet(spec: &KernelSpec, u: &[f64], h: f64) -> DMatrix<f64> {
    // Finite-difference mixed partials of K(u, v) at v = u.
    let m = u.len();
    let k = |a: &[f64], b: &[f64]| spec.value(a, b);
    let mut c = DMatrix::zeros(m + 1, m + 1);
    c[(0, 0)] = k(u, u);
    for i in 0..m {
        let mut up = u.to_vec();
        let mut um = u.to_vec();
        up[i] += h;
        um[i] -= h;
        let di = (k(&up, u) - k(&um, u)) / (2.0 * h);
        c[(i + 1, 0)] = di;
        c[(0, i + 1)] = di;
        for j in 0..m {
            let mut vp = u.to_vec();
            let mut vm = u.to_vec();
            vp[j] += h;
            vm[j] -= h;
            c[(i + 1, j + 1)] =
                (k(&up, &vp) - k(&up, &vm) - k(&um, &vp) + k(&um, &vm)) / (4.0 * h * h);
        }
    }
    c
}

#[test]
fn kernel_jets_at_origin_are_identity() {
    for kind in [
        KernelKind::BargmannFock,
        KernelKind::RescaledKostlan(7),
        KernelKind::WeightedY(Degree::Infinite),
        KernelKind::WeightedY(Degree::Finite(7)),
    ] {
        let spec = KernelSpec::new(kind, 2, 2).unwrap();
        let c = kernel_jet_covariance(&spec, &[0.0, 0.0], 1).unwrap();
        assert_eq!(c.nrows(), 6);
        assert!((c - DMatrix::<f64>::identity(6, 6)).abs().max() < 1e-14);
        let fd = fd_kernel_jet(&spec, &[0.0, 0.0], 1e-4);
        assert!((fd - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-6);
    }
}

#[test]
fn kernel_jets_match_finite_differences() {
    let mut rng = SimRng::new(17);
    for kind in [
        KernelKind::BargmannFock,
        KernelKind::RescaledKostlan(12),
        KernelKind::WeightedY(Degree::Infinite),
        KernelKind::WeightedY(Degree::Finite(12)),
    ] {
        let spec = KernelSpec::new(kind, 2, 1).unwrap();
        for _ in 0..5 {
            let u = [rng.uniform() * 1.6 - 0.8, rng.uniform() * 1.6 - 0.8];
            let c = kernel_jet_covariance(&spec, &u, 1).unwrap();
            let fd = fd_kernel_jet(&spec, &u, 1e-4);
            assert!((&c - &fd).abs().max() < 1e-6 * (1.0 + c.abs().max()), "{kind:?}");
            let kd = spec.derivatives(&u, &[0.3, -0.1]);
            let kt = spec.derivatives(&[0.3, -0.1], &u);
            assert!((kd.value - kt.value).abs() < 1e-12 * kd.value.abs().max(1.0));
        }
    }
}

#[test]
fn kostlan_kernel_converges_to_bargmann_fock() {
    let mut rng = SimRng::new(23);
    let bf = KernelSpec::new(KernelKind::BargmannFock, 2, 1).unwrap();
    for _ in 0..5 {
        let u = [rng.uniform() - 0.5, rng.uniform() - 0.5];
        let a = kernel_jet_covariance(&bf, &u, 1).unwrap();
        for d in [100u32, 1000, 10000] {
            let s = KernelSpec::new(KernelKind::RescaledKostlan(d), 2, 1).unwrap();
            let b = kernel_jet_covariance(&s, &u, 1).unwrap();
            assert!((&a - &b).abs().max() < 2.0 / d as f64);
        }
    }
}

#[test]
fn kernel_matches_empirical_covariance() {
    // Kernel identity E X_d(u) X_d(v) = (1 + uᵀv/d)^d via Kostlan samples.
    let d = 6u32;
    let spec = KernelSpec::new(KernelKind::RescaledKostlan(d), 1, 1).unwrap();
    let n = 4000;
    let pairs = [([0.0], [0.0]), ([0.5], [-0.3]), ([1.0], [0.9])];
    let mut sums = vec![(0.0, 0.0); pairs.len()];
    for t in 0..n {
        let x = RescaledField::new(sample_kostlan(&KostlanSpec::new(1, 1, d, 1000 + t).unwrap()));
        for (i, (u, v)) in pairs.iter().enumerate() {
            let p = x.value(u).unwrap()[0] * x.value(v).unwrap()[0];
            sums[i].0 += p;
            sums[i].1 += p * p;
        }
    }
    for (i, (u, v)) in pairs.iter().enumerate() {
        let mean = sums[i].0 / n as f64;
        let se = ((sums[i].1 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - spec.value(u, v)).abs() < 5.0 * se);
    }
}

#[test]
fn weight_factor_values() {
    assert_eq!(weight_factor(Degree::Infinite, &[0.0, 0.0]), 1.0);
    assert_eq!(weight_factor(Degree::Finite(9), &[0.0]), 1.0);
    assert!((weight_factor(Degree::Infinite, &[0.6, 0.8]) - (-0.5f64).exp()).abs() < 1e-15);
}

#[test]
fn weighted_gradient_matches_finite_differences() {
    let pair = sample_coupled(2, 2, 24, 31).unwrap();
    let mut rng = SimRng::new(2);
    for degree in [Degree::Infinite, Degree::Finite(20)] {
        let y = weighted_field_y(pair.view(degree), degree);
        for _ in 0..5 {
            let u = [rng.uniform() * 1.6 - 0.8, rng.uniform() * 1.6 - 0.8];
            let j = y.jet(&u, 2).unwrap();
            for c in 0..2 {
                let g = fd_gradient(|v| y.value(v).unwrap()[c], &u, 1e-5);
                for a in 0..2 {
                    assert!((g[a] - j.gradient[(c, a)]).abs() < 1e-6);
                    let h = fd_gradient(|v| y.jet(v, 1).unwrap().gradient[(c, a)], &u, 1e-5);
                    for b in 0..2 {
                        assert!((h[b] - j.hessian[c][(a, b)]).abs() < 1e-6);
                    }
                }
            }
        }
    }
}

#[test]
fn weighted_at_origin_equals_unweighted() {
    let pair = sample_coupled(1, 1, 10, 4).unwrap();
    let x = pair.view(Degree::Infinite);
    let y = weighted_field_y(&x, Degree::Infinite);
    assert_eq!(y.value(&[0.0]).unwrap(), x.value(&[0.0]).unwrap());
}
