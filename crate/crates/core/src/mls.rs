//! Weighted and unweighted least-squares polynomial fits in point-value form.
//!
//! For an evaluation point `x` the weighted problem minimizes
//! `Σ_i (p(x_i) - f_i)² w_i` over polynomials of degree `d`. Its solution
//! value `p(x)` is the linear combination `Σ_i C_i(x) f_i`, with `C_i` the
//! first column of `D E (Eᵀ D E)⁻¹`.
//!
//! Systems are solved by a QR factorization of `√D · E` in the scaled
//! monomial basis `((t - x) / s)^j`; the normal matrix `Eᵀ D E` is never formed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::WeightKernel;
use crate::nodes::{NodeSet, Samples};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Polynomial `Σ_j c_j ((t - center) / scale)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPolynomial {
    center: f64,
    scale: f64,
    coefficients: Vec<f64>,
}

impl LocalPolynomial {
    pub fn new(center: f64, scale: f64, coefficients: Vec<f64>) -> Self {
        assert!(scale > 0.0, "polynomial scale must be positive");
        assert!(!coefficients.is_empty(), "polynomial needs a coefficient");
        LocalPolynomial {
            center,
            scale,
            coefficients,
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    #[inline]
    pub fn value_at(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.scale;
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * u + c)
    }

    /// Same polynomial expressed in the basis `((t - center) / scale)^j`.
    pub fn rescaled(&self, scale: f64) -> LocalPolynomial {
        let ratio = scale / self.scale;
        let mut factor = 1.0;
        let coefficients = self
            .coefficients
            .iter()
            .map(|&c| {
                let out = c * factor;
                factor *= ratio;
                out
            })
            .collect();
        LocalPolynomial::new(self.center, scale, coefficients)
    }
}

/// Unweighted fit together with its residuals `p(x_i) - f_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresFit {
    pub polynomial: LocalPolynomial,
    pub residuals: Vec<f64>,
}

impl LeastSquaresFit {
    pub fn mean_abs_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.abs()).sum::<f64>() / self.residuals.len() as f64
    }
}

/// QR factorization of `√D E` restricted to the rows with positive weight.
struct WeightedSystem {
    rows: Vec<usize>,
    sqrt_w: Vec<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl WeightedSystem {
    fn build(
        at: f64,
        center: f64,
        scale: f64,
        xs: &[f64],
        ws: &[f64],
        degree: usize,
    ) -> Result<Self> {
        debug_assert_eq!(xs.len(), ws.len());
        let ncols = degree + 1;
        let rows: Vec<usize> = (0..xs.len()).filter(|&i| ws[i] > 0.0).collect();
        if rows.len() < ncols {
            return Err(Error::RankDeficient {
                x: at,
                rank: rows.len(),
                required: ncols,
            });
        }
        let sqrt_w: Vec<f64> = rows.iter().map(|&i| ws[i].sqrt()).collect();
        let a = DMatrix::from_fn(rows.len(), ncols, |row, col| {
            let u = (xs[rows[row]] - center) / scale;
            sqrt_w[row] * u.powi(col as i32)
        });
        let qr = a.qr();
        let r = qr.r();
        let sv = r.singular_values();
        let largest = sv.max();
        let rank = sv.iter().filter(|&&s| s > RANK_TOLERANCE * largest).count();
        if rank < ncols || !largest.is_finite() {
            return Err(Error::RankDeficient {
                x: at,
                rank,
                required: ncols,
            });
        }
        Ok(WeightedSystem {
            rows,
            sqrt_w,
            q: qr.q(),
            r,
        })
    }

    fn solve(&self, fs: &[f64]) -> Vec<f64> {
        let b = DVector::from_iterator(
            self.rows.len(),
            self.rows
                .iter()
                .zip(&self.sqrt_w)
                .map(|(&i, &sw)| sw * fs[i]),
        );
        let qtb = self.q.tr_mul(&b);
        let c = self
            .r
            .solve_upper_triangular(&qtb)
            .expect("rank-checked triangular factor");
        c.iter().copied().collect()
    }

    /// First row of `(√D E)⁺ √D`, scattered back onto all `n` input rows.
    fn first_coefficient_row(&self, n: usize) -> Vec<f64> {
        let ncols = self.r.ncols();
        let mut e0 = DVector::zeros(ncols);
        e0[0] = 1.0;
        let y = self
            .r
            .tr_solve_upper_triangular(&e0)
            .expect("rank-checked triangular factor");
        let row = &self.q * y;
        let mut out = vec![0.0; n];
        for ((&i, &sw), v) in self.rows.iter().zip(&self.sqrt_w).zip(row.iter()) {
            out[i] = sw * v;
        }
        out
    }
}

/// Minimizer of `Σ w_i (p(x_i) - f_i)²` over degree-`degree` polynomials,
/// expressed in the basis `((t - center) / scale)^j`.
///
/// `at` only labels a [`Error::RankDeficient`] failure.
pub fn weighted_fit(
    at: f64,
    center: f64,
    scale: f64,
    xs: &[f64],
    fs: &[f64],
    ws: &[f64],
    degree: usize,
) -> Result<LocalPolynomial> {
    let system = WeightedSystem::build(at, center, scale, xs, ws, degree)?;
    Ok(LocalPolynomial::new(center, scale, system.solve(fs)))
}

/// MLS coefficient functions `C_i(x)` with the basis scaled by the fill distance.
pub fn mls_coefficients(
    x: f64,
    nodes: &NodeSet,
    weights: &[f64],
    degree: usize,
) -> Result<Vec<f64>> {
    mls_coefficients_scaled(x, nodes.as_slice(), weights, degree, nodes.fill_distance())
}

/// [`mls_coefficients`] with an explicit basis scale; the result does not
/// depend on `scale` beyond rounding.
pub fn mls_coefficients_scaled(
    x: f64,
    nodes: &[f64],
    weights: &[f64],
    degree: usize,
    scale: f64,
) -> Result<Vec<f64>> {
    if nodes.len() != weights.len() {
        return Err(Error::LengthMismatch {
            nodes: nodes.len(),
            values: weights.len(),
        });
    }
    let system = WeightedSystem::build(x, x, scale, nodes, weights, degree)?;
    Ok(system.first_coefficient_row(nodes.len()))
}

/// Weighted MLS fit at `x` with weights `w(γ |x - x_i| / h)`, centered at `x`.
pub fn weighted_mls_fit(
    x: f64,
    samples: &Samples,
    kernel: &WeightKernel,
    gamma: f64,
    degree: usize,
) -> Result<LocalPolynomial> {
    let h = samples.fill_distance();
    let ws: Vec<f64> = samples
        .nodes()
        .iter()
        .map(|&xi| kernel.eval(gamma * (x - xi).abs() / h))
        .collect();
    weighted_fit(x, x, h, samples.nodes(), samples.values(), &ws, degree)
}

/// Ordinary least squares over degree-`degree` polynomials.
pub fn unweighted_ls_fit(
    xs: &[f64],
    fs: &[f64],
    center: f64,
    scale: f64,
    degree: usize,
) -> Result<LeastSquaresFit> {
    if xs.len() != fs.len() {
        return Err(Error::LengthMismatch {
            nodes: xs.len(),
            values: fs.len(),
        });
    }
    let ones = vec![1.0; xs.len()];
    let polynomial = weighted_fit(center, center, scale, xs, fs, &ones, degree)?;
    let residuals = xs
        .iter()
        .zip(fs)
        .map(|(&x, &f)| polynomial.value_at(x) - f)
        .collect();
    Ok(LeastSquaresFit {
        polynomial,
        residuals,
    })
}
