use adaptive_mls::mls::mls_coefficients_scaled;
use adaptive_mls::oracle::determinant_coefficients;
use adaptive_mls::partition::weno_weights;
use adaptive_mls::{KernelKind, NodeSet, PartitionCover, PuConfig, Samples, WeightKernel};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = KernelKind> {
    prop_oneof![
        Just(KernelKind::Wendland2),
        Just(KernelKind::Wendland4),
        Just(KernelKind::Gaussian),
        Just(KernelKind::Matern2),
        Just(KernelKind::InverseMultiquadric),
    ]
}

/// Perturbed uniform grid on `[0, 1]` with `n` nodes.
fn jittered(n: usize, jitter: &[f64]) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                i as f64 * h
            } else {
                (i as f64 + 0.3 * jitter[i % jitter.len()]) * h
            }
        })
        .collect()
}

fn gamma_for(kind: KernelKind) -> f64 {
    if kind.is_compact() {
        0.15
    } else {
        0.7
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_form_a_partition_of_unity(
        kind in kind(),
        degree in 0usize..=2,
        n in 25usize..60,
        jitter in prop::collection::vec(-1.0f64..1.0, 8),
        values in prop::collection::vec(-5.0f64..5.0, 60),
        xs in prop::collection::vec(0.0f64..=1.0, 10),
    ) {
        let nodes = NodeSet::new(jittered(n, &jitter)).unwrap();
        let samples = Samples::from_node_set(nodes, values[..n].to_vec()).unwrap();
        let kernel = WeightKernel::new(kind).unwrap();
        let cover = PartitionCover::build(samples, PuConfig::new(kernel, degree, gamma_for(kind))).unwrap();
        for x in xs {
            let b = cover.evaluate(x).unwrap();
            let st: f64 = b.terms.iter().map(|t| t.theta).sum();
            let sb: f64 = b.terms.iter().map(|t| t.beta).sum();
            prop_assert!((st - 1.0).abs() <= 1e-12);
            prop_assert!((sb - 1.0).abs() <= 1e-12);
            for t in &b.terms {
                prop_assert!((0.0..=1.0).contains(&t.theta));
                prop_assert!((0.0..=1.0).contains(&t.beta));
            }
            let lo = b.terms.iter().map(|t| t.local_value).fold(f64::INFINITY, f64::min);
            let hi = b.terms.iter().map(|t| t.local_value).fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
            prop_assert!(b.value_nonlinear >= lo - slack && b.value_nonlinear <= hi + slack);
        }
    }

    #[test]
    fn both_operators_reproduce_polynomials(
        kind in kind(),
        degree in 0usize..=3,
        n in 30usize..60,
        jitter in prop::collection::vec(-1.0f64..1.0, 8),
        coef in prop::collection::vec(-3.0f64..3.0, 4),
        xs in prop::collection::vec(0.0f64..=1.0, 10),
    ) {
        let p = |x: f64| coef[..=degree].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let nodes = NodeSet::new(jittered(n, &jitter)).unwrap();
        let samples = Samples::from_fn(nodes, p).unwrap();
        let kernel = WeightKernel::new(kind).unwrap();
        let cover = PartitionCover::build(samples, PuConfig::new(kernel, degree, gamma_for(kind))).unwrap();
        for x in xs {
            let b = cover.evaluate(x).unwrap();
            let scale = 1.0 + p(x).abs();
            prop_assert!((b.value_linear - p(x)).abs() <= 1e-9 * scale);
            prop_assert!((b.value_nonlinear - p(x)).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn solver_matches_determinant_expansion(
        degree in 0usize..=2,
        extra in 0usize..=3,
        gaps in prop::collection::vec(0.1f64..1.0, 7),
        weights in prop::collection::vec(0.05f64..1.0, 7),
        x in -1.0f64..4.0,
    ) {
        let n = degree + 1 + extra;
        let nodes: Vec<f64> = gaps[..n].iter().scan(0.0, |acc, g| { *acc += g; Some(*acc) }).collect();
        let qr = mls_coefficients_scaled(x, &nodes, &weights[..n], degree, 1.0).unwrap();
        let det = determinant_coefficients(x, &nodes, &weights[..n], degree).unwrap();
        for (a, b) in qr.iter().zip(&det) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        let total: f64 = qr.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn weno_weights_are_a_convex_combination(
        thetas in prop::collection::vec(0.0f64..1.0, 1..6),
        indicators in prop::collection::vec(0.0f64..10.0, 6),
        t in 0.0f64..6.0,
    ) {
        let total: f64 = thetas.iter().sum();
        prop_assume!(total > 1e-6);
        let thetas: Vec<f64> = thetas.iter().map(|v| v / total).collect();
        let (beta, _) = weno_weights(&thetas, &indicators[..thetas.len()], t, 1e-14);
        let sum: f64 = beta.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(beta.iter().all(|b| (0.0..=1.0).contains(b)));
    }

    #[test]
    fn kernels_are_bounded_and_nonincreasing(kind in kind(), a in 0.0f64..20.0, b in 0.0f64..20.0) {
        let k = WeightKernel::new(kind).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!((0.0..=1.0).contains(&k.eval(lo)));
        prop_assert!(k.eval(hi) <= k.eval(lo));
    }
}
