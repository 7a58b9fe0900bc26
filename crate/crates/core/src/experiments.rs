//! Convergence and discontinuity experiments on `[-3, 3]`.
//!
//! Errors are measured on `z_j = j / 1000`, `j = 0..=1000`, as
//! `MAE_l = max_j |f(z_j) - I^l(z_j)|`, and rates as
//! `r_l = log(MAE_{l-1} / MAE_l) / log(h_{l-1} / h_l)` with `h` the computed
//! fill distance of each level's grid.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{KernelKind, WeightKernel};
use crate::nodes::{NodeSet, Samples};
use crate::partition::{EvalBreakdown, PartitionCover, PuConfig, DEFAULT_EPS_WENO, DEFAULT_T};

pub const INTERVAL: (f64, f64) = (-3.0, 3.0);
/// Location of the jump in [`TestFunction::G`] and [`TestFunction::Z`].
pub const JUMP: f64 = 2.0 / 3.0;
pub const EVAL_POINTS: usize = 1001;

/// `z_j = j / 1000` for `j = 0..=1000`.
pub fn evaluation_grid() -> Vec<f64> {
    (0..EVAL_POINTS).map(|j| j as f64 / 1000.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `sin(πx)`
    Sin,
    /// `sin(πx)` for `x <= 2/3`, `-sin(πx)` beyond.
    G,
    /// `5(x - 1/4)³ e^{x²}` for `x <= 2/3`, `1.5 - (x - 1/4)³ e^{x²}` beyond.
    Z,
}

impl TestFunction {
    pub fn eval(self, x: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            TestFunction::Sin => (PI * x).sin(),
            TestFunction::G => {
                if x <= JUMP {
                    (PI * x).sin()
                } else {
                    -(PI * x).sin()
                }
            }
            TestFunction::Z => {
                let core = (x - 0.25).powi(3) * (x * x).exp();
                if x <= JUMP {
                    5.0 * core
                } else {
                    1.5 - core
                }
            }
        }
    }

    pub fn has_jump(self) -> bool {
        !matches!(self, TestFunction::Sin)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFunction::Sin => "sin",
            TestFunction::G => "g",
            TestFunction::Z => "z",
        })
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sin" => Ok(TestFunction::Sin),
            "g" => Ok(TestFunction::G),
            "z" => Ok(TestFunction::Z),
            other => Err(Error::InvalidConfig(format!("unknown test function `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Linear,
    Nonlinear,
}

impl Method {
    pub fn value(self, b: &EvalBreakdown) -> f64 {
        match self {
            Method::Linear => b.value_linear,
            Method::Nonlinear => b.value_nonlinear,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Linear => "linear",
            Method::Nonlinear => "nonlinear",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "mlspu" => Ok(Method::Linear),
            "nonlinear" | "nl" | "nl-mlspu" => Ok(Method::Nonlinear),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// A concrete node set on `[-3, 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpec {
    /// `x_i = -3 + 3 i / 2^{l-1}`, `i = 0..=2^l`.
    Uniform { level: u32 },
    /// `n - 2` sorted uniform draws in `(-3, 3)` plus both endpoints.
    Random { n: usize, seed: u64 },
}

impl GridSpec {
    pub fn nodes(&self) -> Result<NodeSet> {
        match *self {
            GridSpec::Uniform { level } => {
                if !(1..=30).contains(&level) {
                    return Err(Error::InvalidConfig(format!("level {level} out of range 1..=30")));
                }
                let half = (1u64 << (level - 1)) as f64;
                let n = 1usize << level;
                NodeSet::new((0..=n).map(|i| -3.0 + 3.0 * i as f64 / half).collect())
            }
            GridSpec::Random { n, seed } => {
                if n < 2 {
                    return Err(Error::TooFewNodes { count: n, required: 2 });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (a, b) = INTERVAL;
                loop {
                    let mut xs: Vec<f64> = Vec::with_capacity(n);
                    xs.push(a);
                    xs.extend((0..n - 2).map(|_| rng.random_range(a..b)));
                    xs.push(b);
                    xs.sort_by(f64::total_cmp);
                    // ties (including a draw landing on -3) are redrawn
                    if xs.windows(2).all(|w| w[0] < w[1]) {
                        return NodeSet::new(xs);
                    }
                }
            }
        }
    }
}

/// How to generate the grid of each level in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    /// Fresh draw per level from a seed derived from the master seed.
    Random { seed: u64 },
}

impl GridKind {
    pub fn at_level(&self, level: u32) -> GridSpec {
        match *self {
            GridKind::Uniform => GridSpec::Uniform { level },
            GridKind::Random { seed } => GridSpec::Random {
                n: (1usize << level) + 1,
                seed: level_seed(seed, level),
            },
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            GridKind::Uniform => "uniform",
            GridKind::Random { .. } => "random",
        }
    }
}

fn level_seed(seed: u64, level: u32) -> u64 {
    seed ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Shape parameter used for the tabulated experiments: 0.15 for compactly
/// supported kernels, 0.7 for globally supported ones.
pub fn default_gamma(kind: KernelKind) -> f64 {
    if kind.is_compact() {
        0.15
    } else {
        0.7
    }
}

/// Operator parameters shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub kernel: WeightKernel,
    pub degree: usize,
    pub gamma: f64,
    pub t: f64,
    pub eps_weno: f64,
}

impl OperatorParams {
    pub fn new(kernel: WeightKernel, degree: usize) -> Self {
        OperatorParams {
            kernel,
            degree,
            gamma: default_gamma(kernel.kind()),
            t: DEFAULT_T,
            eps_weno: DEFAULT_EPS_WENO,
        }
    }

    pub fn pu_config(&self) -> PuConfig {
        PuConfig::new(self.kernel, self.degree, self.gamma)
            .with_t(self.t)
            .with_eps(self.eps_weno)
    }

    /// Radius of every subdomain on a grid with fill distance `h`.
    pub fn subdomain_radius(&self, h: f64) -> f64 {
        self.kernel.effective_radius() * h / self.gamma
    }
}

/// Samples `func` on `grid` and builds the cover with centers at the nodes.
pub fn build_cover(func: TestFunction, grid: &GridSpec, params: &OperatorParams) -> Result<PartitionCover> {
    let samples = Samples::from_fn(grid.nodes()?, |x| func.eval(x))?;
    PartitionCover::build(samples, params.pu_config())
}

/// Evaluates both operators at every point, in parallel, preserving order.
pub fn evaluate_many(cover: &PartitionCover, xs: &[f64]) -> Result<Vec<EvalBreakdown>> {
    xs.par_iter().map(|&x| cover.evaluate(x)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub level: u32,
    pub n: usize,
    pub h: f64,
    pub mae: f64,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub method: Method,
    pub kernel: KernelKind,
    pub degree: usize,
    pub grid: &'static str,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    fn from_levels(
        method: Method,
        params: &OperatorParams,
        grid: &GridKind,
        levels: &[(u32, usize, f64, f64)],
    ) -> Self {
        let mut rows: Vec<ErrorRow> = Vec::with_capacity(levels.len());
        for &(level, n, h, mae) in levels {
            let rate = rows
                .last()
                .map(|prev| (prev.mae / mae).ln() / (prev.h / h).ln());
            rows.push(ErrorRow {
                level,
                n,
                h,
                mae,
                rate,
            });
        }
        ErrorReport {
            method,
            kernel: params.kernel.kind(),
            degree: params.degree,
            grid: grid.label(),
            rows,
        }
    }

    pub fn row(&self, level: u32) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.level == level)
    }

    /// Mean of the rates over the given levels (those without a rate are skipped).
    pub fn mean_rate(&self, levels: impl IntoIterator<Item = u32>) -> Option<f64> {
        let rates: Vec<f64> = levels
            .into_iter()
            .filter_map(|l| self.row(l).and_then(|r| r.rate))
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }

    /// Label in the `MLSPU^p_K` / `NL-MLSPU^p_K` style.
    pub fn label(&self) -> String {
        let prefix = match self.method {
            Method::Linear => "MLSPU",
            Method::Nonlinear => "NL-MLSPU",
        };
        format!("{prefix}{}_{}", self.degree, self.kernel)
    }
}

/// Error table for SIN on successive levels, for both operators at once.
pub fn run_convergence_pair(
    params: &OperatorParams,
    levels: &[u32],
    grid: GridKind,
) -> Result<(ErrorReport, ErrorReport)> {
    if levels.is_empty() {
        return Err(Error::InvalidConfig("empty level list".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("levels must be strictly increasing".into()));
    }
    let zs = evaluation_grid();
    let exact: Vec<f64> = zs.iter().map(|&z| TestFunction::Sin.eval(z)).collect();
    let mut lin = Vec::with_capacity(levels.len());
    let mut nl = Vec::with_capacity(levels.len());
    for &level in levels {
        let spec = grid.at_level(level);
        let run = || -> Result<(usize, f64, f64, f64)> {
            let cover = build_cover(TestFunction::Sin, &spec, params)?;
            let evals = evaluate_many(&cover, &zs)?;
            let max_err = |m: Method| {
                evals
                    .iter()
                    .zip(&exact)
                    .map(|(b, f)| (m.value(b) - f).abs())
                    .fold(0.0f64, f64::max)
            };
            Ok((
                cover.samples().len(),
                cover.fill_distance(),
                max_err(Method::Linear),
                max_err(Method::Nonlinear),
            ))
        };
        let (n, h, e_lin, e_nl) = run().map_err(|e| e.at_level(level))?;
        lin.push((level, n, h, e_lin));
        nl.push((level, n, h, e_nl));
    }
    Ok((
        ErrorReport::from_levels(Method::Linear, params, &grid, &lin),
        ErrorReport::from_levels(Method::Nonlinear, params, &grid, &nl),
    ))
}

pub fn run_convergence(
    method: Method,
    params: &OperatorParams,
    levels: &[u32],
    grid: GridKind,
) -> Result<ErrorReport> {
    let (lin, nl) = run_convergence_pair(params, levels, grid)?;
    Ok(match method {
        Method::Linear => lin,
        Method::Nonlinear => nl,
    })
}

/// Overshoot and away-from-jump accuracy of one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OvershootReport {
    pub method: Method,
    pub kernel: KernelKind,
    pub degree: usize,
    /// Largest excursion above the data maximum or below the data minimum on `[0, 1]`.
    pub max_overshoot: f64,
    /// Max error on `z_j` with `|z_j - 2/3| > exclusion_radius`.
    pub smooth_region_mae: f64,
    pub exclusion_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub exact: f64,
    pub linear: f64,
    pub nonlinear: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuityResult {
    pub linear: OvershootReport,
    pub nonlinear: OvershootReport,
    /// Dense samples of both operators across the whole node hull.
    pub curve: Vec<CurvePoint>,
}

impl DiscontinuityResult {
    pub fn report(&self, method: Method) -> &OvershootReport {
        match method {
            Method::Linear => &self.linear,
            Method::Nonlinear => &self.nonlinear,
        }
    }
}

/// Runs both operators on a function with a jump at 2/3.
pub fn run_discontinuity(
    func: TestFunction,
    params: &OperatorParams,
    grid: &GridSpec,
    curve_points: usize,
) -> Result<DiscontinuityResult> {
    let cover = build_cover(func, grid, params)?;
    let (data_min, data_max) = cover.samples().value_range();
    let exclusion_radius = params.subdomain_radius(cover.fill_distance());

    let zs = evaluation_grid();
    let evals = evaluate_many(&cover, &zs)?;
    let report = |method: Method| {
        let mut max_overshoot = 0.0f64;
        let mut smooth_region_mae = 0.0f64;
        for (&z, b) in zs.iter().zip(&evals) {
            let v = method.value(b);
            max_overshoot = max_overshoot.max(v - data_max).max(data_min - v);
            if (z - JUMP).abs() > exclusion_radius {
                smooth_region_mae = smooth_region_mae.max((v - func.eval(z)).abs());
            }
        }
        OvershootReport {
            method,
            kernel: params.kernel.kind(),
            degree: params.degree,
            max_overshoot,
            smooth_region_mae,
            exclusion_radius,
        }
    };

    let (a, b) = cover.domain();
    let xs: Vec<f64> = match curve_points {
        0 => Vec::new(),
        1 => vec![a],
        n => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    };
    let curve = evaluate_many(&cover, &xs)?
        .into_iter()
        .map(|e| CurvePoint {
            x: e.x,
            exact: func.eval(e.x),
            linear: e.value_linear,
            nonlinear: e.value_nonlinear,
        })
        .collect();

    Ok(DiscontinuityResult {
        linear: report(Method::Linear),
        nonlinear: report(Method::Nonlinear),
        curve,
    })
}
