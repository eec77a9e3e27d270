//! Multi-axis rotary embedding over real-valued 3D indices.
//!
//! The `D/2` rotation pairs are split into three contiguous sections, one
//! per index axis. Within a section the frequency ladder restarts at
//! exponent zero: the `d`-th pair of a section rotates by
//! `coord * base^(-2d/D)`. Indices may be fractional or negative.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::IndexPoint;

pub const DEFAULT_BASE: f64 = 10_000.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotaryParams {
    head_dim: usize,
    base: f64,
    sections: [usize; 3],
    /// Per-pair (axis, inverse frequency).
    #[serde(skip)]
    pairs: Vec<(usize, f64)>,
}

impl RotaryParams {
    pub fn new(head_dim: usize, base: f64, sections: [usize; 3]) -> Result<Self> {
        if head_dim == 0 || !head_dim.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("head_dim must be even and positive, got {head_dim}")));
        }
        if !(base.is_finite() && base > 0.0) {
            return Err(Error::InvalidParams(format!("base must be positive, got {base}")));
        }
        let total: usize = sections.iter().sum();
        if total != head_dim / 2 {
            return Err(Error::InvalidParams(format!(
                "sections {},{},{} sum to {total}, expected head_dim/2 = {}",
                sections[0],
                sections[1],
                sections[2],
                head_dim / 2
            )));
        }
        let pairs = sections
            .iter()
            .enumerate()
            .flat_map(|(axis, &count)| (0..count).map(move |d| (axis, base.powf(-2.0 * d as f64 / head_dim as f64))))
            .collect();
        Ok(Self { head_dim, base, sections, pairs })
    }

    /// Sections used when none are given: a quarter of the pairs for each
    /// spatial axis, the rest temporal. `(16, 8, 8)` for `D = 64`.
    pub fn default_sections(head_dim: usize) -> [usize; 3] {
        let spatial = head_dim / 8;
        [(head_dim / 2).saturating_sub(2 * spatial), spatial, spatial]
    }

    pub fn with_default_sections(head_dim: usize) -> Result<Self> {
        Self::new(head_dim, DEFAULT_BASE, Self::default_sections(head_dim))
    }

    pub fn head_dim(&self) -> usize {
        self.head_dim
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn sections(&self) -> [usize; 3] {
        self.sections
    }

    pub fn num_pairs(&self) -> usize {
        self.head_dim / 2
    }

    /// `(axis, inverse frequency)` for every rotation pair.
    pub fn pairs(&self) -> &[(usize, f64)] {
        &self.pairs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadVector(pub Vec<f64>);

impl HeadVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &HeadVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

pub fn rotation_angles(index: &IndexPoint, params: &RotaryParams) -> Vec<f64> {
    params.pairs.iter().map(|&(axis, freq)| index.coords[axis] * freq).collect()
}

/// Rotates each pair `(v[2j], v[2j+1])` by `angles[j]`.
pub fn apply_rotary(vec: &HeadVector, angles: &[f64]) -> Result<HeadVector> {
    if vec.len() != 2 * angles.len() {
        return Err(Error::DimensionMismatch { expected: 2 * angles.len(), actual: vec.len() });
    }
    let mut out = Vec::with_capacity(vec.len());
    for (pair, &theta) in vec.0.chunks_exact(2).zip(angles) {
        let (sin, cos) = theta.sin_cos();
        out.push(pair[0] * cos - pair[1] * sin);
        out.push(pair[0] * sin + pair[1] * cos);
    }
    Ok(HeadVector(out))
}

/// Attention score between a rotated query and a rotated key.
pub fn logit(
    q: &HeadVector,
    q_index: &IndexPoint,
    k: &HeadVector,
    k_index: &IndexPoint,
    params: &RotaryParams,
) -> Result<f64> {
    for v in [q, k] {
        if v.len() != params.head_dim {
            return Err(Error::DimensionMismatch { expected: params.head_dim, actual: v.len() });
        }
    }
    let rq = apply_rotary(q, &rotation_angles(q_index, params))?;
    let rk = apply_rotary(k, &rotation_angles(k_index, params))?;
    Ok(rq.dot(&rk))
}
