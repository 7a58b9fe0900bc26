//! Moving least squares quasi-interpolation in one dimension, with a
//! WENO-weighted partition-of-unity variant that stays free of Gibbs
//! oscillations at jump discontinuities.
//!
//! The building blocks are layered:
//!
//! * [`kernels`]: radial weight functions and their effective support;
//! * [`nodes`]: sorted data sites and sampled values;
//! * [`mls`]: weighted / unweighted least-squares fits and the coefficient
//!   functions `C_i(x)`;
//! * [`oracle`]: a determinant-expansion cross-check for `C_i(x)`;
//! * [`partition`]: the cover, smoothness indicators, and the linear and
//!   nonlinear partition-of-unity operators;
//! * [`experiments`]: grids, test functions, error tables and overshoot metrics;
//! * [`selftest`]: quick consistency suites used by the command-line driver.
//!
//! ```
//! use adaptive_mls::{KernelKind, NodeSet, PartitionCover, PuConfig, Samples, WeightKernel};
//!
//! let nodes = NodeSet::new((0..=40).map(|i| i as f64 / 40.0).collect()).unwrap();
//! let samples = Samples::from_fn(nodes, |x| if x <= 0.5 { 0.0 } else { 1.0 }).unwrap();
//! let kernel = WeightKernel::new(KernelKind::Wendland2).unwrap();
//! let cover = PartitionCover::build(samples, PuConfig::new(kernel, 2, 0.15)).unwrap();
//! let b = cover.evaluate(0.52).unwrap();
//! assert!(b.value_nonlinear >= -1e-9 && b.value_nonlinear <= 1.0 + 1e-9);
//! ```

pub mod error;
pub mod experiments;
pub mod format;
pub mod kernels;
pub mod mls;
pub mod nodes;
pub mod oracle;
pub mod partition;
pub mod selftest;

pub use error::{Error, Result};
pub use kernels::{KernelKind, WeightKernel};
pub use mls::{LocalPolynomial, LeastSquaresFit};
pub use nodes::{fill_distance, NodeSet, Samples};
pub use partition::{EvalBreakdown, PartitionCover, PuConfig, Subdomain};
