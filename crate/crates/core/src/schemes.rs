//! Per-token index assignment for interleaved text/image sequences.
//!
//! Four schemes are supported: raster-flattened (`hard`), one shared index
//! per image (`unordered`), M-RoPE style 2D grids (`spatial`), and the
//! cone construction (`circle`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cip_stages, dual_frame_fusion, grid_coords, CipConfig, GridSpec, IndexPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    Text(usize),
    Image(GridSpec),
}

impl Segment {
    pub fn len(&self) -> usize {
        match self {
            Segment::Text(n) => *n,
            Segment::Image(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Text(n) => write!(f, "t{n}"),
            Segment::Image(g) => write!(f, "i{}x{}", g.width(), g.height()),
        }
    }
}

impl FromStr for Segment {
    type Err = Error;

    /// Parses `t<N>` or `i<W>x<H>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Layout { segment: s.to_string(), reason: reason.to_string() };
        let positive = |digits: &str| -> Result<usize> {
            match digits.parse::<usize>() {
                Ok(0) => Err(bad("sizes must be at least 1")),
                Ok(n) => Ok(n),
                Err(_) => Err(bad("expected t<N> or i<W>x<H>")),
            }
        };
        if let Some(rest) = s.strip_prefix('t') {
            Ok(Segment::Text(positive(rest)?))
        } else if let Some(rest) = s.strip_prefix('i') {
            let (w, h) = rest.split_once('x').ok_or_else(|| bad("expected i<W>x<H>"))?;
            let grid = GridSpec::new(positive(w)?, positive(h)?)?;
            Ok(Segment::Image(grid))
        } else {
            Err(bad("expected t<N> or i<W>x<H>"))
        }
    }
}

/// Parses a comma-separated layout such as `i3x3,t5`.
pub fn parse_layout(s: &str) -> Result<Vec<Segment>> {
    let segments = s.split(',').map(|part| part.trim().parse()).collect::<Result<Vec<Segment>>>()?;
    validate_segments(&segments)?;
    Ok(segments)
}

pub fn format_layout(segments: &[Segment]) -> String {
    segments.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn validate_segments(segments: &[Segment]) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::Layout { segment: String::new(), reason: "layout has no segments".into() });
    }
    if let Some(seg) = segments.iter().find(|s| s.is_empty()) {
        return Err(Error::Layout { segment: seg.to_string(), reason: "sizes must be at least 1".into() });
    }
    Ok(())
}

/// Scheme name without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Hard,
    Unordered,
    Spatial,
    Circle,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [SchemeKind::Hard, SchemeKind::Unordered, SchemeKind::Spatial, SchemeKind::Circle];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Hard => "hard",
            SchemeKind::Unordered => "unordered",
            SchemeKind::Spatial => "spatial",
            SchemeKind::Circle => "circle",
        }
    }

    pub fn with_config(self, config: CipConfig) -> Scheme {
        match self {
            SchemeKind::Hard => Scheme::Hard,
            SchemeKind::Unordered => Scheme::Unordered,
            SchemeKind::Spatial => Scheme::Spatial,
            SchemeKind::Circle => Scheme::Circle(config),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "hard" => Ok(SchemeKind::Hard),
            "unordered" => Ok(SchemeKind::Unordered),
            "spatial" => Ok(SchemeKind::Spatial),
            "circle" => Ok(SchemeKind::Circle),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme `{other}` (expected hard, unordered, spatial or circle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Scheme {
    Hard,
    Unordered,
    Spatial,
    Circle(CipConfig),
}

impl Scheme {
    pub fn kind(&self) -> SchemeKind {
        match self {
            Scheme::Hard => SchemeKind::Hard,
            Scheme::Unordered => SchemeKind::Unordered,
            Scheme::Spatial => SchemeKind::Spatial,
            Scheme::Circle(_) => SchemeKind::Circle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceLayout {
    pub segments: Vec<Segment>,
    pub scheme: Scheme,
}

impl SequenceLayout {
    pub fn new(segments: Vec<Segment>, scheme: Scheme) -> Result<Self> {
        validate_segments(&segments)?;
        Ok(Self { segments, scheme })
    }

    pub fn assign(&self) -> Result<IndexedSequence> {
        match self.scheme {
            Scheme::Hard => assign_hard(&self.segments),
            Scheme::Unordered => assign_unordered(&self.segments),
            Scheme::Spatial => assign_spatial(&self.segments),
            Scheme::Circle(config) => assign_circle(&self.segments, &config),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Text,
    Image,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Token {
    pub modality: Modality,
    pub segment_id: usize,
    pub index: IndexPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexedSequence {
    pub scheme: SchemeKind,
    pub tokens: Vec<Token>,
    /// Running counter value at the start of each segment.
    pub segment_starts: Vec<usize>,
}

impl IndexedSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn text_indices(&self) -> impl Iterator<Item = &IndexPoint> + '_ {
        self.of(Modality::Text)
    }

    pub fn image_indices(&self) -> impl Iterator<Item = &IndexPoint> + '_ {
        self.of(Modality::Image)
    }

    fn of(&self, modality: Modality) -> impl Iterator<Item = &IndexPoint> + '_ {
        self.tokens.iter().filter(move |t| t.modality == modality).map(|t| &t.index)
    }

    /// Compact arrangement summary, e.g. `i3x3@0,t5@3`, giving each
    /// segment's starting counter value.
    pub fn describe(&self, segments: &[Segment]) -> String {
        segments.iter().zip(&self.segment_starts).map(|(s, b)| format!("{s}@{b}")).collect::<Vec<_>>().join(",")
    }
}

struct Builder {
    scheme: SchemeKind,
    tokens: Vec<Token>,
    segment_starts: Vec<usize>,
}

impl Builder {
    fn new(scheme: SchemeKind, segments: &[Segment]) -> Self {
        Self {
            scheme,
            tokens: Vec::with_capacity(segments.iter().map(Segment::len).sum()),
            segment_starts: Vec::with_capacity(segments.len()),
        }
    }

    fn push(&mut self, modality: Modality, segment_id: usize, index: IndexPoint) {
        self.tokens.push(Token { modality, segment_id, index });
    }

    fn finish(self) -> IndexedSequence {
        IndexedSequence { scheme: self.scheme, tokens: self.tokens, segment_starts: self.segment_starts }
    }
}

/// Every token, images flattened in raster order, gets the next scalar index.
pub fn assign_hard(segments: &[Segment]) -> Result<IndexedSequence> {
    validate_segments(segments)?;
    let mut out = Builder::new(SchemeKind::Hard, segments);
    let mut counter = 0usize;
    for (id, seg) in segments.iter().enumerate() {
        out.segment_starts.push(counter);
        let modality = match seg {
            Segment::Text(_) => Modality::Text,
            Segment::Image(_) => Modality::Image,
        };
        for _ in 0..seg.len() {
            out.push(modality, id, IndexPoint::replicated(counter as f64));
            counter += 1;
        }
    }
    Ok(out.finish())
}

/// Text advances the counter per token; each whole image takes one step.
pub fn assign_unordered(segments: &[Segment]) -> Result<IndexedSequence> {
    validate_segments(segments)?;
    let mut out = Builder::new(SchemeKind::Unordered, segments);
    let mut counter = 0usize;
    for (id, seg) in segments.iter().enumerate() {
        out.segment_starts.push(counter);
        match seg {
            Segment::Text(n) => {
                for _ in 0..*n {
                    out.push(Modality::Text, id, IndexPoint::replicated(counter as f64));
                    counter += 1;
                }
            }
            Segment::Image(g) => {
                for _ in 0..g.len() {
                    out.push(Modality::Image, id, IndexPoint::replicated(counter as f64));
                }
                counter += 1;
            }
        }
    }
    Ok(out.finish())
}

/// Walks the segments with the M-RoPE counter: text gets `(t,t,t)`, an
/// image starting at `b` is handed to `image` and then the counter jumps
/// to `b + max(w, h)`.
fn assign_with_grid_offsets(
    scheme: SchemeKind,
    segments: &[Segment],
    mut image: impl FnMut(GridSpec, usize) -> Result<Vec<IndexPoint>>,
) -> Result<IndexedSequence> {
    validate_segments(segments)?;
    let mut out = Builder::new(scheme, segments);
    let mut counter = 0usize;
    for (id, seg) in segments.iter().enumerate() {
        out.segment_starts.push(counter);
        match seg {
            Segment::Text(n) => {
                for _ in 0..*n {
                    out.push(Modality::Text, id, IndexPoint::replicated(counter as f64));
                    counter += 1;
                }
            }
            Segment::Image(g) => {
                for p in image(*g, counter)? {
                    out.push(Modality::Image, id, p);
                }
                counter += g.width().max(g.height());
            }
        }
    }
    Ok(out.finish())
}

/// M-RoPE indices: image token at (row j, col i) gets `(b, b+j, b+i)`.
pub fn assign_spatial(segments: &[Segment]) -> Result<IndexedSequence> {
    assign_with_grid_offsets(SchemeKind::Spatial, segments, |grid, b| {
        let offset = IndexPoint::replicated(b as f64);
        Ok(grid_coords(grid).into_iter().map(|p| p + offset).collect())
    })
}

/// Text as in [`assign_spatial`]; each image becomes its fused circle
/// projection, translated so the circle center sits at `(b, b, b)`.
pub fn assign_circle(segments: &[Segment], config: &CipConfig) -> Result<IndexedSequence> {
    config.validate()?;
    assign_with_grid_offsets(SchemeKind::Circle, segments, |grid, b| {
        let stages = cip_stages(grid, config)?;
        let fused = dual_frame_fusion(&stages.projected, &stages.centered, config.beta)?;
        let offset = IndexPoint::replicated(b as f64);
        Ok(fused.into_iter().map(|p| p + offset).collect())
    })
}
