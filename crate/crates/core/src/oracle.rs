//! Closed-form determinant expansion of the MLS coefficient functions.
//!
//! `C_{i0}(x) = n_{i0}(x) / |Eᵀ D E|` where
//!
//! ```text
//! n_{i0}(x) = w_{i0} Σ_{i1..id} w_{i1}···w_{id} (x_{i1}-x)(x_{i2}-x)²···(x_{id}-x)^d Π_{0≤k<l≤d} (x_{il} - x_{ik})
//! ```
//!
//! and `|Eᵀ D E| = Σ_{i0} n_{i0}(x)`. The sum has `N^(d+1)` terms, so this is
//! only usable on tiny instances. It shares no code with the QR solver in
//! [`crate::mls`] and exists to cross-check it.

use crate::error::{Error, Result};

pub const MAX_NODES: usize = 8;
pub const MAX_DEGREE: usize = 3;

pub fn determinant_coefficients(
    x: f64,
    nodes: &[f64],
    weights: &[f64],
    degree: usize,
) -> Result<Vec<f64>> {
    let n = nodes.len();
    if n > MAX_NODES || degree > MAX_DEGREE {
        return Err(Error::OracleLimits {
            max_nodes: MAX_NODES,
            max_degree: MAX_DEGREE,
        });
    }
    if n != weights.len() {
        return Err(Error::LengthMismatch {
            nodes: n,
            values: weights.len(),
        });
    }
    let numerators: Vec<f64> = (0..n)
        .map(|i0| weights[i0] * tuple_sum(x, nodes, weights, degree, i0))
        .collect();
    let det: f64 = numerators.iter().sum();
    let scale: f64 = numerators.iter().map(|v| v.abs()).sum();
    if det == 0.0 || !det.is_finite() || det.abs() <= 1e-13 * scale {
        let rank = weights.iter().filter(|&&w| w > 0.0).count().min(degree);
        return Err(Error::RankDeficient {
            x,
            rank,
            required: degree + 1,
        });
    }
    Ok(numerators.into_iter().map(|v| v / det).collect())
}

/// Σ over `(i1, …, id) ∈ {0..n}^d` for a fixed `i0`.
fn tuple_sum(x: f64, nodes: &[f64], weights: &[f64], degree: usize, i0: usize) -> f64 {
    let n = nodes.len();
    let mut idx = vec![0usize; degree + 1];
    idx[0] = i0;
    let mut total = 0.0;
    loop {
        let mut term = 1.0;
        for j in 1..=degree {
            let i = idx[j];
            term *= weights[i] * (nodes[i] - x).powi(j as i32);
        }
        for l in 1..=degree {
            for k in 0..l {
                term *= nodes[idx[l]] - nodes[idx[k]];
            }
        }
        total += term;

        // odometer over positions 1..=degree
        let mut pos = degree;
        loop {
            if pos == 0 {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_with_general_weights() {
        // three nodes 0, 1, 2 with d = 1 and arbitrary weights
        let (w1, w2, w3) = (0.3, 0.8, 0.55);
        let x = 0.7;
        let c = determinant_coefficients(x, &[0.0, 1.0, 2.0], &[w1, w2, w3], 1).unwrap();
        let den = w1 * w2 + 4.0 * w1 * w3 + w2 * w3;
        let expected = [
            (w1 * w2 + 4.0 * w1 * w3 - (2.0 * w1 * w3 + w1 * w2) * x) / den,
            (2.0 * w2 * w3 + (w2 * w1 - w2 * w3) * x) / den,
            (-w3 * w2 + (2.0 * w3 * w1 + w3 * w2) * x) / den,
        ];
        for (a, b) in c.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn degree_zero_is_shepard() {
        let w = [1.0, 2.0, 3.0];
        let c = determinant_coefficients(5.0, &[0.0, 1.0, 4.0], &w, 0).unwrap();
        assert_eq!(c, vec![1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]);
    }

    #[test]
    fn refuses_large_instances() {
        let nodes: Vec<f64> = (0..9).map(f64::from).collect();
        assert!(matches!(
            determinant_coefficients(0.0, &nodes, &[1.0; 9], 1),
            Err(Error::OracleLimits { .. })
        ));
        assert!(matches!(
            determinant_coefficients(0.0, &[0.0, 1.0, 2.0, 3.0, 4.0], &[1.0; 5], 4),
            Err(Error::OracleLimits { .. })
        ));
    }

    #[test]
    fn singular_system_detected() {
        assert!(matches!(
            determinant_coefficients(0.0, &[0.0, 1.0, 2.0], &[1.0, 0.0, 0.0], 1),
            Err(Error::RankDeficient { .. })
        ));
    }
}
