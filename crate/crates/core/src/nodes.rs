//! Data sites and sampled values.

use crate::error::{Error, Result};

/// Largest and smallest consecutive gap of a strictly increasing node list.
pub fn fill_distance(nodes: &[f64]) -> Result<(f64, f64)> {
    if nodes.len() < 2 {
        return Err(Error::TooFewNodes {
            count: nodes.len(),
            required: 2,
        });
    }
    if let Some(index) = nodes.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut h = 0.0f64;
    let mut h_min = f64::INFINITY;
    for (i, pair) in nodes.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if !(gap > 0.0) {
            return Err(Error::NotIncreasing { index: i + 1 });
        }
        h = h.max(gap);
        h_min = h_min.min(gap);
    }
    Ok((h, h_min))
}

/// Strictly increasing data sites with their fill distance `h` and minimum spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    nodes: Vec<f64>,
    fill_distance: f64,
    min_spacing: f64,
}

impl NodeSet {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        let (fill_distance, min_spacing) = fill_distance(&nodes)?;
        Ok(NodeSet {
            nodes,
            fill_distance,
            min_spacing,
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn fill_distance(&self) -> f64 {
        self.fill_distance
    }

    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    /// `h / h_min`; bounded for quasi-uniform families.
    pub fn quasi_uniformity(&self) -> f64 {
        self.fill_distance / self.min_spacing
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
}

/// Node set with aligned function values `f_i = f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    nodes: NodeSet,
    values: Vec<f64>,
}

impl Samples {
    /// Pairs `(x_i, f_i)` in any order; sorted by `x`, duplicates rejected.
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::LengthMismatch {
                nodes: xs.len(),
                values: values.len(),
            });
        }
        if let Some(index) = xs
            .iter()
            .zip(&values)
            .position(|(x, f)| !x.is_finite() || !f.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        let mut pairs: Vec<(f64, f64)> = xs.into_iter().zip(values).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateNode { x: w[0].0 });
        }
        let (xs, values): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Ok(Samples {
            nodes: NodeSet::new(xs)?,
            values,
        })
    }

    pub fn from_node_set(nodes: NodeSet, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::LengthMismatch {
                nodes: nodes.len(),
                values: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|f| !f.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Samples { nodes, values })
    }

    pub fn from_fn(nodes: NodeSet, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = nodes.as_slice().iter().map(|&x| f(x)).collect();
        Self::from_node_set(nodes, values)
    }

    pub fn node_set(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn nodes(&self) -> &[f64] {
        self.nodes.as_slice()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn fill_distance(&self) -> f64 {
        self.nodes.fill_distance()
    }

    /// Smallest and largest data value.
    pub fn value_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}
