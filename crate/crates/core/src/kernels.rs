//! Radial weight functions `w: [0, ∞) → [0, 1]`.
//!
//! Every kernel satisfies `w(0) = 1` and is nonincreasing. The Wendland family
//! and the polynomial cutoff `(1 - r^q)^p` vanish for `r >= 1`. The globally
//! supported kinds (Gaussian, inverse multiquadric, Matérn) are truncated to
//! zero once their value drops below a threshold, which gives every kernel a
//! finite effective radius.
//!
//! The C⁴ members (`M4`, `W4`) are divided by 3 so that `w(0) = 1`; a constant
//! factor does not change any weighted fit or partition-of-unity weight.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default truncation threshold for globally supported kernels.
pub const DEFAULT_TRUNCATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Gaussian,
    InverseMultiquadric,
    Matern0,
    Matern2,
    Matern4,
    Wendland0,
    Wendland2,
    Wendland4,
    /// `(1 - r^q)^p` on `[0, 1]`, zero beyond.
    PolyCutoff { p: u32, q: u32 },
}

impl KernelKind {
    pub fn is_compact(self) -> bool {
        matches!(
            self,
            KernelKind::Wendland0
                | KernelKind::Wendland2
                | KernelKind::Wendland4
                | KernelKind::PolyCutoff { .. }
        )
    }

    /// Smoothness of `x ↦ w(|x|)` on the real line.
    pub fn smoothness(self) -> Smoothness {
        use KernelKind::*;
        match self {
            Gaussian | InverseMultiquadric => Smoothness::Infinite,
            Matern0 | Wendland0 => Smoothness::Finite(0),
            Matern2 | Wendland2 => Smoothness::Finite(2),
            Matern4 | Wendland4 => Smoothness::Finite(4),
            PolyCutoff { p, q } => {
                let at_edge = p - 1;
                // |x|^q is smooth at the origin only for even q
                let at_origin = if q % 2 == 0 { u32::MAX } else { q - 1 };
                Smoothness::Finite(at_edge.min(at_origin))
            }
        }
    }

    /// Untruncated kernel value.
    pub fn raw(self, r: f64) -> f64 {
        use KernelKind::*;
        match self {
            Gaussian => (-r * r).exp(),
            InverseMultiquadric => 1.0 / (1.0 + r * r).sqrt(),
            Matern0 => (-r).exp(),
            Matern2 => (-r).exp() * (1.0 + r),
            Matern4 => (-r).exp() * (3.0 + 3.0 * r + r * r) / 3.0,
            Wendland0 => {
                let s = cutoff(1.0 - r);
                s * s
            }
            Wendland2 => cutoff(1.0 - r).powi(4) * (4.0 * r + 1.0),
            Wendland4 => cutoff(1.0 - r).powi(6) * (35.0 * r * r + 18.0 * r + 3.0) / 3.0,
            PolyCutoff { p, q } => {
                if r >= 1.0 {
                    0.0
                } else {
                    (1.0 - r.powi(q as i32)).powi(p as i32)
                }
            }
        }
    }
}

#[inline]
fn cutoff(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        0.0
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use KernelKind::*;
        match self {
            Gaussian => f.write_str("G"),
            InverseMultiquadric => f.write_str("IMQ"),
            Matern0 => f.write_str("M0"),
            Matern2 => f.write_str("M2"),
            Matern4 => f.write_str("M4"),
            Wendland0 => f.write_str("W0"),
            Wendland2 => f.write_str("W2"),
            Wendland4 => f.write_str("W4"),
            PolyCutoff { p, q } => write!(f, "POLY({p},{q})"),
        }
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let kind = match s.to_ascii_uppercase().as_str() {
            "G" => KernelKind::Gaussian,
            "IMQ" => KernelKind::InverseMultiquadric,
            "M0" => KernelKind::Matern0,
            "M2" => KernelKind::Matern2,
            "M4" => KernelKind::Matern4,
            "W0" => KernelKind::Wendland0,
            "W2" => KernelKind::Wendland2,
            "W4" => KernelKind::Wendland4,
            upper => {
                let args = upper
                    .strip_prefix("POLY(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .ok_or_else(|| Error::InvalidKernel(format!("unknown kernel `{s}`")))?;
                let (p, q) = args
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidKernel(format!("expected POLY(p,q), got `{s}`")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidKernel(format!("bad exponent in `{s}`")))
                };
                KernelKind::PolyCutoff {
                    p: parse(p)?,
                    q: parse(q)?,
                }
            }
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Finite(u32),
    Infinite,
}

/// Support of a kernel: exact for compact kinds, unbounded otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    /// `None` when the untruncated kernel has unbounded support.
    pub exact: Option<f64>,
    /// Radius beyond which [`WeightKernel::eval`] returns exactly zero.
    pub effective: f64,
}

/// A validated weight kernel with its truncation rule resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightKernel {
    kind: KernelKind,
    truncation_threshold: f64,
    effective_radius: f64,
}

impl WeightKernel {
    pub fn new(kind: KernelKind) -> Result<Self> {
        Self::with_truncation(kind, DEFAULT_TRUNCATION)
    }

    /// `threshold` only affects globally supported kinds; zero disables truncation.
    pub fn with_truncation(kind: KernelKind, threshold: f64) -> Result<Self> {
        if let KernelKind::PolyCutoff { p, q } = kind {
            if p == 0 || q == 0 {
                return Err(Error::InvalidKernel(format!(
                    "POLY({p},{q}): exponents must be positive"
                )));
            }
        }
        if !(0.0..1.0).contains(&threshold) {
            return Err(Error::InvalidKernel(format!(
                "truncation threshold {threshold} outside [0, 1)"
            )));
        }
        let effective_radius = if kind.is_compact() {
            1.0
        } else {
            truncation_radius(kind, threshold)
        };
        Ok(WeightKernel {
            kind,
            truncation_threshold: threshold,
            effective_radius,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn truncation_threshold(&self) -> f64 {
        self.truncation_threshold
    }

    pub fn effective_radius(&self) -> f64 {
        self.effective_radius
    }

    pub fn support(&self) -> Support {
        Support {
            exact: self.kind.is_compact().then_some(1.0),
            effective: self.effective_radius,
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        self.kind.smoothness()
    }

    /// Kernel value at distance `r >= 0`.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0, "kernel evaluated at negative distance {r}");
        if self.kind.is_compact() {
            return self.kind.raw(r);
        }
        if r >= self.effective_radius {
            0.0
        } else {
            self.kind.raw(r)
        }
    }
}

impl fmt::Display for WeightKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Smallest `r` with `raw(r) <= threshold`.
fn truncation_radius(kind: KernelKind, threshold: f64) -> f64 {
    if threshold == 0.0 {
        return f64::INFINITY;
    }
    if kind == KernelKind::Gaussian {
        return (-threshold.ln()).sqrt();
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while kind.raw(hi) > threshold {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if kind.raw(mid) > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [KernelKind; 9] = [
        KernelKind::Gaussian,
        KernelKind::InverseMultiquadric,
        KernelKind::Matern0,
        KernelKind::Matern2,
        KernelKind::Matern4,
        KernelKind::Wendland0,
        KernelKind::Wendland2,
        KernelKind::Wendland4,
        KernelKind::PolyCutoff { p: 3, q: 2 },
    ];

    #[test]
    fn unit_at_origin() {
        for kind in ALL {
            let k = WeightKernel::new(kind).unwrap();
            assert_eq!(k.eval(0.0), 1.0, "{kind}");
        }
    }

    #[test]
    fn tabulated_values() {
        let w2 = WeightKernel::new(KernelKind::Wendland2).unwrap();
        assert_eq!(w2.eval(1.0), 0.0);
        assert!((w2.eval(0.5) - 0.1875).abs() < 1e-15);
        let g = WeightKernel::new(KernelKind::Gaussian).unwrap();
        assert_eq!(g.eval(5.0), 0.0);
        assert!((g.eval(1.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn compact_kinds_vanish_outside_unit_ball() {
        for kind in ALL.into_iter().filter(|k| k.is_compact()) {
            let k = WeightKernel::new(kind).unwrap();
            for r in [1.0, 1.0 + 1e-12, 1.5, 10.0] {
                assert_eq!(k.eval(r), 0.0, "{kind} at {r}");
            }
            assert_eq!(k.support().exact, Some(1.0));
        }
    }

    #[test]
    fn gaussian_radius_closed_form() {
        let g = WeightKernel::new(KernelKind::Gaussian).unwrap();
        let r = g.effective_radius();
        assert!((r - 4.55228).abs() < 1e-5);
        assert!(((-r * r).exp() - 1e-9).abs() < 1e-12);
        assert_eq!(g.support().exact, None);
    }

    #[test]
    fn bisected_radii() {
        let m0 = WeightKernel::new(KernelKind::Matern0).unwrap();
        assert!((m0.effective_radius() - 1e9f64.ln()).abs() < 1e-9);
        let imq = WeightKernel::new(KernelKind::InverseMultiquadric).unwrap();
        let r = imq.effective_radius();
        assert!((KernelKind::InverseMultiquadric.raw(r) - 1e-9).abs() < 1e-18);
    }

    #[test]
    fn zero_threshold_disables_truncation() {
        let g = WeightKernel::with_truncation(KernelKind::Gaussian, 0.0).unwrap();
        assert!(g.effective_radius().is_infinite());
        assert!(g.eval(5.0) > 0.0);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(WeightKernel::new(KernelKind::PolyCutoff { p: 0, q: 2 }).is_err());
        assert!(WeightKernel::new(KernelKind::PolyCutoff { p: 2, q: 0 }).is_err());
        assert!(WeightKernel::with_truncation(KernelKind::Gaussian, 1.0).is_err());
        assert!(WeightKernel::with_truncation(KernelKind::Gaussian, -1e-3).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in ALL {
            assert_eq!(kind.to_string().parse::<KernelKind>().unwrap(), kind);
        }
        assert_eq!(
            "poly( 2, 5 )".parse::<KernelKind>().unwrap(),
            KernelKind::PolyCutoff { p: 2, q: 5 }
        );
        assert!("W3".parse::<KernelKind>().is_err());
        assert!("POLY(2)".parse::<KernelKind>().is_err());
    }

    #[test]
    fn monotone_and_bounded_on_dense_grid() {
        for kind in ALL {
            let k = WeightKernel::new(kind).unwrap();
            let top = k.effective_radius() * 1.1;
            let mut prev = f64::INFINITY;
            for i in 0..=10_000 {
                let r = top * i as f64 / 10_000.0;
                let v = k.eval(r);
                assert!((0.0..=1.0).contains(&v), "{kind} at {r}: {v}");
                assert!(v <= prev, "{kind} increases at {r}");
                prev = v;
            }
        }
    }

    #[test]
    fn zero_beyond_effective_radius() {
        for kind in ALL {
            let k = WeightKernel::new(kind).unwrap();
            let r = k.effective_radius();
            for s in [1.0, 1.0 + 1e-9, 2.0, 100.0] {
                assert_eq!(k.eval(r * s), 0.0, "{kind}");
            }
            if !kind.is_compact() {
                // just inside, the raw value is retained
                assert!(k.eval(r * (1.0 - 1e-6)) > 0.0, "{kind}");
            }
        }
    }

    #[test]
    fn second_difference_bounded_for_c2_kinds() {
        // C² radial kernels: the symmetric second difference of w(|x|) stays
        // bounded across the origin and across r = 1 as the step shrinks.
        let probe = |k: &WeightKernel, x0: f64| {
            let f = |x: f64| k.eval(x.abs());
            [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&s| (f(x0 + s) - 2.0 * f(x0) + f(x0 - s)) / (s * s))
                .collect::<Vec<_>>()
        };
        let w2 = WeightKernel::new(KernelKind::Wendland2).unwrap();
        for d2 in probe(&w2, 1.0).into_iter().chain(probe(&w2, 0.0)) {
            assert!(d2.abs() < 25.0, "{d2}");
        }
        let m2 = WeightKernel::new(KernelKind::Matern2).unwrap();
        for d2 in probe(&m2, 0.0) {
            assert!(d2.abs() < 2.0, "{d2}");
        }
        // C⁰ kinds: second difference at the origin blows up like 1/step
        let m0 = WeightKernel::new(KernelKind::Matern0).unwrap();
        let d2 = probe(&m0, 0.0);
        assert!(d2[2].abs() > 10.0 * d2[0].abs());
    }

    #[test]
    fn smoothness_metadata() {
        assert_eq!(KernelKind::Wendland4.smoothness(), Smoothness::Finite(4));
        assert_eq!(KernelKind::Gaussian.smoothness(), Smoothness::Infinite);
        assert_eq!(
            KernelKind::PolyCutoff { p: 3, q: 2 }.smoothness(),
            Smoothness::Finite(2)
        );
        assert_eq!(
            KernelKind::PolyCutoff { p: 3, q: 1 }.smoothness(),
            Smoothness::Finite(0)
        );
    }
}
