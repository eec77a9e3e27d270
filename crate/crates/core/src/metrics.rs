//! Per-Token Distance (PTD) and the text-to-image distance matrix behind it.
//!
//! PTD is the mean absolute deviation of each text token's distances to all
//! image tokens, averaged over text tokens. Zero means every text token sees
//! every image token at the same distance.
//!
//! With several images in one sequence each image is its own reference
//! set: a text token's mean distance is taken per image, and deviations are
//! measured against the mean of the image the column belongs to. For a
//! single image this is the plain row mean.

#![allow(clippy::single_range_in_vec_init)]

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IndexPoint;
use crate::schemes::{IndexedSequence, Modality, SchemeKind};

/// How the distance between two index points is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceConvention {
    /// `|s - s'|` between replicated `(s,s,s)` indices.
    Scalar,
    /// Euclidean distance over the (height, width) axes only.
    Planar,
    /// Full 3-axis Euclidean distance.
    Euclidean,
}

impl DistanceConvention {
    /// Convention used for each scheme unless overridden.
    ///
    /// Flattened schemes measure along the 1D sequence, the spatial scheme
    /// in the 2D image-index plane its grids live in, and the circle scheme
    /// in the full 3D index space its cone occupies.
    pub fn for_scheme(scheme: SchemeKind) -> Self {
        match scheme {
            SchemeKind::Hard | SchemeKind::Unordered => DistanceConvention::Scalar,
            SchemeKind::Spatial => DistanceConvention::Planar,
            SchemeKind::Circle => DistanceConvention::Euclidean,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceConvention::Scalar => "scalar",
            DistanceConvention::Planar => "planar",
            DistanceConvention::Euclidean => "euclidean",
        }
    }

    pub fn distance(&self, a: &IndexPoint, b: &IndexPoint) -> Result<f64> {
        match self {
            DistanceConvention::Scalar => match (a.as_scalar(), b.as_scalar()) {
                (Some(x), Some(y)) => Ok((x - y).abs()),
                _ => Err(Error::NotReplicated),
            },
            DistanceConvention::Planar => Ok((a.height() - b.height()).hypot(a.width() - b.width())),
            DistanceConvention::Euclidean => Ok(a.distance(b)),
        }
    }
}

impl fmt::Display for DistanceConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Self::Scalar),
            "planar" => Ok(Self::Planar),
            "euclidean" => Ok(Self::Euclidean),
            _ => Err(Error::InvalidConfig(format!("unknown distance convention `{s}`"))),
        }
    }
}

/// Text-by-image distances, row-major, with columns grouped by image.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    groups: Vec<Range<usize>>,
}

impl DistanceMatrix {
    /// A matrix whose columns all belong to one image.
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::with_groups(rows, cols, values, vec![0..cols])
    }

    /// `groups` must be contiguous, non-empty column ranges covering `0..cols`.
    pub fn with_groups(rows: usize, cols: usize, values: Vec<f64>, groups: Vec<Range<usize>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::MissingModality);
        }
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch { left: values.len(), right: rows * cols });
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidConfig(format!("distance entries must be finite and non-negative, got {bad}")));
        }
        let mut next = 0;
        for g in &groups {
            if g.start != next || g.end <= g.start {
                return Err(Error::InvalidConfig(format!("column groups must tile 0..{cols}")));
            }
            next = g.end;
        }
        if next != cols {
            return Err(Error::InvalidConfig(format!("column groups must tile 0..{cols}")));
        }
        Ok(Self { rows, cols, values, groups })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, text: usize, image: usize) -> f64 {
        self.values[text * self.cols + image]
    }

    pub fn row(&self, text: usize) -> &[f64] {
        &self.values[text * self.cols..(text + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    /// Column range of each image.
    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }
}

/// Distance matrix under the scheme's default convention.
pub fn distance_matrix(seq: &IndexedSequence) -> Result<DistanceMatrix> {
    distance_matrix_with(seq, DistanceConvention::for_scheme(seq.scheme))
}

pub fn distance_matrix_with(seq: &IndexedSequence, convention: DistanceConvention) -> Result<DistanceMatrix> {
    let text: Vec<&IndexPoint> = seq.text_indices().collect();
    let image: Vec<&IndexPoint> = seq.image_indices().collect();
    if text.is_empty() || image.is_empty() {
        return Err(Error::MissingModality);
    }
    let mut values = Vec::with_capacity(text.len() * image.len());
    for t in &text {
        for i in &image {
            values.push(convention.distance(t, i)?);
        }
    }
    DistanceMatrix::with_groups(text.len(), image.len(), values, image_groups(seq))
}

/// Contiguous column ranges of image tokens sharing a segment.
pub(crate) fn image_groups(seq: &IndexedSequence) -> Vec<Range<usize>> {
    let mut groups: Vec<Range<usize>> = Vec::new();
    let mut last = None;
    for (col, tok) in seq.tokens.iter().filter(|t| t.modality == Modality::Image).enumerate() {
        match groups.last_mut() {
            Some(g) if last == Some(tok.segment_id) => g.end = col + 1,
            _ => groups.push(col..col + 1),
        }
        last = Some(tok.segment_id);
    }
    groups
}

/// Mean absolute deviation of every entry from its row's per-image mean.
pub fn ptd(matrix: &DistanceMatrix) -> f64 {
    let total: f64 = matrix
        .row_iter()
        .map(|row| {
            matrix
                .groups
                .iter()
                .map(|g| {
                    let cells = &row[g.clone()];
                    let mean = cells.iter().sum::<f64>() / cells.len() as f64;
                    cells.iter().map(|d| (d - mean).abs()).sum::<f64>()
                })
                .sum::<f64>()
        })
        .sum();
    total / (matrix.rows as f64 * matrix.cols as f64)
}

/// PTD of a sequence under its scheme's default convention.
pub fn sequence_ptd(seq: &IndexedSequence) -> Result<(f64, DistanceConvention)> {
    let convention = DistanceConvention::for_scheme(seq.scheme);
    Ok((ptd(&distance_matrix_with(seq, convention)?), convention))
}
