//! Fast consistency suites run by `adaptive-mls selftest`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::experiments::{evaluation_grid, GridSpec, OperatorParams, TestFunction, JUMP};
use crate::kernels::{KernelKind, WeightKernel};
use crate::mls::mls_coefficients_scaled;
use crate::nodes::Samples;
use crate::oracle::determinant_coefficients;
use crate::partition::PartitionCover;

#[derive(Debug, Clone, Default)]
pub struct SelftestOptions {
    /// Replace every smoothness indicator by zero before the WENO suite runs.
    /// Negative control: that suite must then fail.
    pub corrupt_indicators: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type Suite = dyn Fn() -> Result<String, String>;

pub fn run(options: &SelftestOptions) -> Vec<SuiteResult> {
    let suites: [(&'static str, Box<Suite>); 4] = [
        ("oracle-equivalence", Box::new(oracle_equivalence)),
        ("partition-of-unity", Box::new(partition_of_unity)),
        ("polynomial-reproduction", Box::new(polynomial_reproduction)),
        ("weno-suppression", {
            let corrupt = options.corrupt_indicators;
            Box::new(move || weno_suppression(corrupt))
        }),
    ];
    suites
        .into_iter()
        .map(|(name, suite)| {
            let start = Instant::now();
            let outcome = suite();
            let elapsed = start.elapsed();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SuiteResult {
                name,
                passed,
                detail,
                elapsed,
            }
        })
        .collect()
}

fn kernel(kind: KernelKind) -> WeightKernel {
    WeightKernel::new(kind).expect("built-in kernel")
}

/// QR-based coefficients against the determinant expansion on random small
/// instances, plus the unit-weight three-node closed form.
pub fn oracle_equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 100 {
        let degree = rng.random_range(0..=2usize);
        let n = rng.random_range(degree + 1..=6usize);
        let mut nodes: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        nodes.sort_by(f64::total_cmp);
        if nodes.windows(2).any(|w| w[1] - w[0] < 0.05) {
            continue;
        }
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let x = rng.random_range(-1.0..1.0);
        let qr = mls_coefficients_scaled(x, &nodes, &weights, degree, 1.0)
            .map_err(|e| format!("solver: {e}"))?;
        let det = determinant_coefficients(x, &nodes, &weights, degree)
            .map_err(|e| format!("oracle: {e}"))?;
        for (a, b) in qr.iter().zip(&det) {
            worst = worst.max((a - b).abs());
        }
        cases += 1;
    }
    if worst > 1e-10 {
        return Err(format!("max |C_qr - C_det| = {worst:.3e} > 1e-10"));
    }
    let mut worst_closed = 0.0f64;
    for i in 0..20 {
        let x = 2.0 * i as f64 / 19.0;
        let c = mls_coefficients_scaled(x, &[0.0, 1.0, 2.0], &[1.0; 3], 1, 1.0)
            .map_err(|e| e.to_string())?;
        let expected = [(5.0 - 3.0 * x) / 6.0, 1.0 / 3.0, (3.0 * x - 1.0) / 6.0];
        for (a, b) in c.iter().zip(expected) {
            worst_closed = worst_closed.max((a - b).abs());
        }
    }
    if worst_closed > 1e-12 {
        return Err(format!("closed form mismatch {worst_closed:.3e} > 1e-12"));
    }
    Ok(format!(
        "100 cases, max diff {worst:.2e}; closed form max diff {worst_closed:.2e}"
    ))
}

/// `Σθ = Σβ = 1` and all weights in `[0, 1]` on the evaluation grid.
pub fn partition_of_unity() -> Result<String, String> {
    let mut checked = 0usize;
    for kind in [KernelKind::Wendland2, KernelKind::Wendland4, KernelKind::Gaussian] {
        for degree in [2, 3] {
            let params = OperatorParams::new(kernel(kind), degree);
            let cover = crate::experiments::build_cover(
                TestFunction::G,
                &GridSpec::Uniform { level: 7 },
                &params,
            )
            .map_err(|e| e.to_string())?;
            for z in evaluation_grid() {
                let b = cover.evaluate(z).map_err(|e| e.to_string())?;
                let st: f64 = b.terms.iter().map(|t| t.theta).sum();
                let sb: f64 = b.terms.iter().map(|t| t.beta).sum();
                if (st - 1.0).abs() > 1e-12 || (sb - 1.0).abs() > 1e-12 {
                    return Err(format!("{kind} d={degree} x={z}: Σθ={st}, Σβ={sb}"));
                }
                let in_unit = |v: f64| (0.0..=1.0).contains(&v);
                if !b.terms.iter().all(|t| in_unit(t.theta) && in_unit(t.beta)) {
                    return Err(format!("{kind} d={degree} x={z}: weight outside [0, 1]"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} evaluations"))
}

/// Both operators reproduce random polynomials of degree `<= d`.
pub fn polynomial_reproduction() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0B);
    let mut worst = 0.0f64;
    for kind in [KernelKind::Wendland2, KernelKind::Gaussian] {
        for degree in 0..=3usize {
            for grid in [
                GridSpec::Uniform { level: 6 },
                GridSpec::Random { n: 65, seed: 11 },
            ] {
                let coef: Vec<f64> = (0..=degree).map(|_| rng.random_range(-2.0..2.0)).collect();
                let p = |x: f64| coef.iter().rev().fold(0.0, |acc, c| acc * x + c);
                let params = OperatorParams::new(kernel(kind), degree);
                let nodes = grid.nodes().map_err(|e| e.to_string())?;
                let samples = Samples::from_fn(nodes, p).map_err(|e| e.to_string())?;
                let cover = PartitionCover::build(samples, params.pu_config())
                    .map_err(|e| e.to_string())?;
                for z in evaluation_grid().into_iter().step_by(10) {
                    let b = cover.evaluate(z).map_err(|e| e.to_string())?;
                    let scale = 1.0 + p(z).abs();
                    for v in [b.value_linear, b.value_nonlinear] {
                        let err = (v - p(z)).abs() / scale;
                        worst = worst.max(err);
                        if err > 1e-9 {
                            return Err(format!("{kind} d={degree} {grid:?} x={z}: rel err {err:.3e}"));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

const SUPPRESSION_BOUND: f64 = 1e-3;

/// Subdomains straddling the jump of `g` must receive negligible nonlinear weight
/// wherever a subdomain that avoids the jump is active.
pub fn weno_suppression(corrupt_indicators: bool) -> Result<String, String> {
    let params = OperatorParams::new(kernel(KernelKind::Wendland2), 2);
    let mut cover =
        crate::experiments::build_cover(TestFunction::G, &GridSpec::Uniform { level: 8 }, &params)
            .map_err(|e| e.to_string())?;
    if corrupt_indicators {
        let zeros = vec![0.0; cover.subdomains().len()];
        cover.set_indicators(&zeros);
    }
    let xs = cover.samples().nodes().to_vec();
    let straddles = |k: usize| {
        let m = &cover.subdomains()[k].members;
        xs[m.start] <= JUMP && xs[m.end - 1] > JUMP
    };
    let mut worst = 0.0f64;
    let mut points = 0;
    for z in evaluation_grid() {
        let b = cover.evaluate(z).map_err(|e| e.to_string())?;
        if !b.terms.iter().any(|t| !straddles(t.k)) {
            continue;
        }
        for t in b.terms.iter().filter(|t| straddles(t.k)) {
            worst = worst.max(t.beta);
        }
        points += 1;
    }
    if worst > SUPPRESSION_BOUND {
        return Err(format!(
            "straddling subdomain kept weight {worst:.3e} > {SUPPRESSION_BOUND:.0e}"
        ));
    }
    Ok(format!("{points} points, max straddling weight {worst:.2e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for r in run(&SelftestOptions::default()) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn corrupted_indicators_fail_weno_suite() {
        let results = run(&SelftestOptions {
            corrupt_indicators: true,
        });
        let weno = results.iter().find(|r| r.name == "weno-suppression").unwrap();
        assert!(!weno.passed);
        assert!(results.iter().filter(|r| r.name != "weno-suppression").all(|r| r.passed));
    }
}
