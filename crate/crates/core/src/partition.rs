//! Partition-of-unity MLS with WENO-style nonlinear blending.
//!
//! The domain is covered by subdomains `Ω_k`, one per center `x̃_k`, holding the
//! nodes with `w(γ_k |x_i - x̃_k| / h) > 0`. At an evaluation point `x` every
//! active subdomain (`δ_k(x) = w(γ_k |x - x̃_k| / h) > 0`) contributes a local
//! weighted MLS value `p_k(x)` fitted on its own members with weights
//! `w(γ_k |x - x_i| / h)`.
//!
//! * linear operator: `Σ θ_k p_k(x)` with `θ_k = δ_k / Σ δ_j`;
//! * nonlinear operator: `Σ β_k p_k(x)` with `α_k = θ_k / (I_k^t + ε)` and
//!   `β_k = α_k / Σ α_j`.
//!
//! `I_k` is the mean absolute residual of an unweighted degree-`d` least-squares
//! fit on the members of `Ω_k`; it is tiny on smooth data and `O(1)` when the
//! subdomain straddles a jump, which drives `β_k` of that subdomain to zero.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::kernels::WeightKernel;
use crate::mls::{unweighted_ls_fit, weighted_fit, LocalPolynomial};
use crate::nodes::Samples;

pub const DEFAULT_T: f64 = 4.0;
pub const DEFAULT_EPS_WENO: f64 = 1e-14;

/// Parameters of the partition-of-unity operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PuConfig {
    pub kernel: WeightKernel,
    pub degree: usize,
    /// Exponent applied to the smoothness indicators.
    pub t: f64,
    pub eps_weno: f64,
    /// Shape parameter shared by every subdomain unless `gammas` is set.
    pub gamma: f64,
    /// Per-center shape parameters; must match the number of centers.
    pub gammas: Option<Vec<f64>>,
    /// Subdomain centers; the data nodes when `None`.
    pub centers: Option<Vec<f64>>,
    /// Interval that must be covered; the node hull when `None`.
    pub domain: Option<(f64, f64)>,
}

impl PuConfig {
    pub fn new(kernel: WeightKernel, degree: usize, gamma: f64) -> Self {
        PuConfig {
            kernel,
            degree,
            t: DEFAULT_T,
            eps_weno: DEFAULT_EPS_WENO,
            gamma,
            gammas: None,
            centers: None,
            domain: None,
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_weno = eps;
        self
    }

    pub fn with_centers(mut self, centers: Vec<f64>) -> Self {
        self.centers = Some(centers);
        self
    }

    pub fn with_gammas(mut self, gammas: Vec<f64>) -> Self {
        self.gammas = Some(gammas);
        self
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.domain = Some((a, b));
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidConfig(format!("t = {} must be >= 0", self.t)));
        }
        if !(self.eps_weno > 0.0 && self.eps_weno.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eps = {} must be positive",
                self.eps_weno
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma = {} must be positive",
                self.gamma
            )));
        }
        if let Some(gs) = &self.gammas {
            if let Some(g) = gs.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
                return Err(Error::InvalidConfig(format!("gamma = {g} must be positive")));
            }
        }
        if let Some((a, b)) = self.domain {
            if !(a <= b) {
                return Err(Error::InvalidConfig(format!("empty domain [{a}, {b}]")));
            }
        }
        Ok(())
    }
}

/// One patch `Ω_k` of the cover.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdomain {
    pub index: usize,
    pub center: f64,
    pub gamma: f64,
    /// Geometric radius `r_eff · h / γ_k`.
    pub radius: f64,
    /// Member nodes; contiguous because nodes are sorted.
    pub members: Range<usize>,
    /// Unweighted least-squares fit on the members, centered at `center`.
    pub fit: LocalPolynomial,
    /// Mean absolute residual of `fit` over the members.
    pub indicator: f64,
}

impl Subdomain {
    pub fn member_count(&self) -> usize {
        self.members.len()
    }
}

/// Contribution of one active subdomain at an evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveTerm {
    pub k: usize,
    pub delta: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub local_value: f64,
}

/// Diagnostics for a single evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalBreakdown {
    pub x: f64,
    pub terms: Vec<ActiveTerm>,
    pub value_linear: f64,
    pub value_nonlinear: f64,
    /// Set when `Σ α_k` vanished or overflowed and `β_k = θ_k` was used.
    pub weno_fallback: bool,
}

/// Nonlinear weights `β_k = α_k / Σ α_j` with `α_k = θ_k / (I_k^t + ε)`.
///
/// Falls back to `β = θ` (second return value `true`) when `Σ α_j` is zero or
/// not finite.
pub fn weno_weights(thetas: &[f64], indicators: &[f64], t: f64, eps: f64) -> (Vec<f64>, bool) {
    debug_assert_eq!(thetas.len(), indicators.len());
    let alphas: Vec<f64> = thetas
        .iter()
        .zip(indicators)
        .map(|(&theta, &ind)| theta / (ind.powf(t) + eps))
        .collect();
    let total: f64 = alphas.iter().sum();
    if total > 0.0 && total.is_finite() {
        (alphas.iter().map(|a| a / total).collect(), false)
    } else {
        (thetas.to_vec(), true)
    }
}

/// A validated cover together with the data it was built from.
#[derive(Debug, Clone)]
pub struct PartitionCover {
    samples: Samples,
    config: PuConfig,
    subdomains: Vec<Subdomain>,
    /// Subdomain indices sorted by center.
    by_center: Vec<usize>,
    max_radius: f64,
    domain: (f64, f64),
    h: f64,
}

impl PartitionCover {
    /// Builds `Ω_k`, the unweighted fits and the indicators, then checks that
    /// each subdomain has more than `d + 1` members and that the union covers
    /// the domain.
    pub fn build(samples: Samples, config: PuConfig) -> Result<Self> {
        config.validate()?;
        let h = samples.fill_distance();
        let d = config.degree;
        let centers = config
            .centers
            .clone()
            .unwrap_or_else(|| samples.nodes().to_vec());
        if centers.is_empty() {
            return Err(Error::InvalidConfig("no subdomain centers".into()));
        }
        let gammas = match &config.gammas {
            Some(gs) if gs.len() != centers.len() => {
                return Err(Error::InvalidConfig(format!(
                    "{} shape parameters for {} centers",
                    gs.len(),
                    centers.len()
                )))
            }
            Some(gs) => gs.clone(),
            None => vec![config.gamma; centers.len()],
        };
        let domain = config
            .domain
            .unwrap_or((samples.node_set().first(), samples.node_set().last()));
        if let Some(c) = centers
            .iter()
            .find(|c| !(**c >= domain.0 && **c <= domain.1))
        {
            return Err(Error::InvalidConfig(format!(
                "center {c} outside domain [{}, {}]",
                domain.0, domain.1
            )));
        }

        let kernel = config.kernel;
        let xs = samples.nodes();
        let fs = samples.values();
        let mut subdomains = Vec::with_capacity(centers.len());
        for (k, (&center, &gamma)) in centers.iter().zip(&gammas).enumerate() {
            let inside = |xi: f64| kernel.eval(gamma * (xi - center).abs() / h) > 0.0;
            // membership is an interval around the center: search outward from it
            let mid = xs.partition_point(|&xi| xi < center);
            let lo = xs[..mid].partition_point(|&xi| !inside(xi));
            let hi = mid + xs[mid..].partition_point(|&xi| inside(xi));
            let members = lo..hi;
            if members.len() <= d + 1 {
                return Err(Error::TooFewMembers {
                    k,
                    members: members.len(),
                    required: d + 1,
                });
            }
            let fit = unweighted_ls_fit(&xs[members.clone()], &fs[members.clone()], center, h, d)?;
            let indicator = fit.mean_abs_residual();
            subdomains.push(Subdomain {
                index: k,
                center,
                gamma,
                radius: kernel.effective_radius() * h / gamma,
                members,
                fit: fit.polynomial,
                indicator,
            });
        }

        check_coverage(&subdomains, domain)?;

        let mut by_center: Vec<usize> = (0..subdomains.len()).collect();
        by_center.sort_by(|&a, &b| subdomains[a].center.total_cmp(&subdomains[b].center));
        let max_radius = subdomains
            .iter()
            .map(|s| s.radius)
            .fold(0.0f64, f64::max);
        Ok(PartitionCover {
            samples,
            config,
            subdomains,
            by_center,
            max_radius,
            domain,
            h,
        })
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn config(&self) -> &PuConfig {
        &self.config
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn fill_distance(&self) -> f64 {
        self.h
    }

    /// Overrides the smoothness indicators, e.g. to build synthetic cases.
    pub fn set_indicators(&mut self, indicators: &[f64]) {
        assert_eq!(indicators.len(), self.subdomains.len());
        for (s, &ind) in self.subdomains.iter_mut().zip(indicators) {
            s.indicator = ind;
        }
    }

    /// `δ_k(x)` for subdomain `k`.
    #[inline]
    pub fn delta(&self, k: usize, x: f64) -> f64 {
        let s = &self.subdomains[k];
        self.config.kernel.eval(s.gamma * (x - s.center).abs() / self.h)
    }

    /// Indices `k` with `δ_k(x) > 0`, in increasing center order.
    pub fn active_set(&self, x: f64) -> Vec<usize> {
        let centers = |i: usize| self.subdomains[self.by_center[i]].center;
        let n = self.by_center.len();
        let (lo, hi) = if self.max_radius.is_finite() {
            let lo = partition_point(n, |i| centers(i) <= x - self.max_radius);
            let hi = partition_point(n, |i| centers(i) < x + self.max_radius);
            (lo, hi)
        } else {
            (0, n)
        };
        self.by_center[lo..hi]
            .iter()
            .copied()
            .filter(|&k| self.delta(k, x) > 0.0)
            .collect()
    }

    /// Weighted MLS value of subdomain `k` at `x`, using its members only.
    pub fn local_fit(&self, k: usize, x: f64) -> Result<LocalPolynomial> {
        let s = &self.subdomains[k];
        let xs = &self.samples.nodes()[s.members.clone()];
        let fs = &self.samples.values()[s.members.clone()];
        let ws: Vec<f64> = xs
            .iter()
            .map(|&xi| self.config.kernel.eval(s.gamma * (x - xi).abs() / self.h))
            .collect();
        weighted_fit(x, x, self.h, xs, fs, &ws, self.config.degree)
    }

    /// Both operators at `x` with per-subdomain diagnostics.
    pub fn evaluate(&self, x: f64) -> Result<EvalBreakdown> {
        let active = self.active_set(x);
        if active.is_empty() {
            return Err(Error::Uncovered { x });
        }
        let deltas: Vec<f64> = active.iter().map(|&k| self.delta(k, x)).collect();
        let delta_sum: f64 = deltas.iter().sum();
        let thetas: Vec<f64> = deltas.iter().map(|d| d / delta_sum).collect();
        let indicators: Vec<f64> = active
            .iter()
            .map(|&k| self.subdomains[k].indicator)
            .collect();
        let (betas, weno_fallback) =
            weno_weights(&thetas, &indicators, self.config.t, self.config.eps_weno);

        let mut terms = Vec::with_capacity(active.len());
        let mut value_linear = 0.0;
        let mut value_nonlinear = 0.0;
        for (i, &k) in active.iter().enumerate() {
            let local_value = self.local_fit(k, x)?.coefficients()[0];
            value_linear += thetas[i] * local_value;
            value_nonlinear += betas[i] * local_value;
            terms.push(ActiveTerm {
                k,
                delta: deltas[i],
                theta: thetas[i],
                alpha: thetas[i] / (indicators[i].powf(self.config.t) + self.config.eps_weno),
                beta: betas[i],
                local_value,
            });
        }
        Ok(EvalBreakdown {
            x,
            terms,
            value_linear,
            value_nonlinear,
            weno_fallback,
        })
    }

    pub fn evaluate_linear(&self, x: f64) -> Result<(f64, EvalBreakdown)> {
        let b = self.evaluate(x)?;
        Ok((b.value_linear, b))
    }

    pub fn evaluate_nonlinear(&self, x: f64) -> Result<(f64, EvalBreakdown)> {
        let b = self.evaluate(x)?;
        Ok((b.value_nonlinear, b))
    }

    /// Checks, region by region, whether some active subdomain has a small
    /// indicator. `threshold` defaults to ten times the median indicator.
    pub fn convergence_guard(&self, threshold: Option<f64>) -> GuardReport {
        let threshold = threshold.unwrap_or_else(|| {
            let mut inds: Vec<f64> = self.subdomains.iter().map(|s| s.indicator).collect();
            inds.sort_by(f64::total_cmp);
            let n = inds.len();
            let median = if n % 2 == 1 {
                inds[n / 2]
            } else {
                0.5 * (inds[n / 2 - 1] + inds[n / 2])
            };
            10.0 * median
        });
        let (a, b) = self.domain;
        let mut cuts: Vec<f64> = vec![a, b];
        for s in &self.subdomains {
            for edge in [s.center - s.radius, s.center + s.radius] {
                if edge > a && edge < b {
                    cuts.push(edge);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let regions = cuts
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let active = self.active_set(mid);
                let smooth = active
                    .iter()
                    .any(|&k| self.subdomains[k].indicator <= threshold);
                GuardRegion {
                    lo: w[0],
                    hi: w[1],
                    active,
                    has_smooth: smooth,
                }
            })
            .collect();
        GuardReport { threshold, regions }
    }

    /// Whether some subdomain active at `x` has indicator at most `threshold`.
    pub fn has_smooth_active(&self, x: f64, threshold: f64) -> bool {
        self.active_set(x)
            .iter()
            .any(|&k| self.subdomains[k].indicator <= threshold)
    }
}

/// Region `[lo, hi]` of constant active set (checked at its midpoint).
#[derive(Debug, Clone, PartialEq)]
pub struct GuardRegion {
    pub lo: f64,
    pub hi: f64,
    pub active: Vec<usize>,
    pub has_smooth: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuardReport {
    pub threshold: f64,
    pub regions: Vec<GuardRegion>,
}

impl GuardReport {
    pub fn all_smooth(&self) -> bool {
        self.regions.iter().all(|r| r.has_smooth)
    }

    pub fn region_at(&self, x: f64) -> Option<&GuardRegion> {
        self.regions.iter().find(|r| r.lo <= x && x <= r.hi)
    }
}

fn partition_point(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `[a, b]` must lie inside the union of the open intervals `(c_k - R_k, c_k + R_k)`.
fn check_coverage(subdomains: &[Subdomain], (a, b): (f64, f64)) -> Result<()> {
    let mut spans: Vec<(f64, f64)> = subdomains
        .iter()
        .map(|s| (s.center - s.radius, s.center + s.radius))
        .collect();
    spans.sort_by(|p, q| p.0.total_cmp(&q.0));
    // `reach` is the leftmost point of [a, b] not yet known to be covered
    let mut reach = a;
    let mut i = 0;
    loop {
        let mut best = f64::NEG_INFINITY;
        while i < spans.len() && spans[i].0 < reach {
            best = best.max(spans[i].1);
            i += 1;
        }
        if best <= reach {
            let hi = spans.get(i).map_or(b, |s| s.0.min(b));
            return Err(Error::CoverageGap { lo: reach, hi });
        }
        if best > b {
            return Ok(());
        }
        reach = best;
    }
}
