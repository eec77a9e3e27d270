//! Toy attention probe for position-induced logit dispersion.
//!
//! Every image key shares one content vector, so any spread in a text
//! query's logits across the keys of one image comes from the indices
//! alone. Spreads are taken within each image and the largest is reported.
//! Layer schedules choose, per layer, between the M-RoPE grid indices and
//! the circle indices for the circle scheme; the baseline schemes use
//! their own indices at every layer.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{CipConfig, IndexPoint};
use crate::metrics::{image_groups, sequence_ptd};
use crate::rope::{apply_rotary, rotation_angles, HeadVector, RotaryParams};
use crate::schemes::{assign_circle, assign_spatial, IndexedSequence, Scheme, SchemeKind, Segment, SequenceLayout};

pub const PROTOCOL: &str =
    "content-identical keys: one random query per text token, one shared key for all image tokens";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleStrategy {
    AllCircle,
    UpperHalfCircle,
    LowerHalfCircle,
    Alternating,
}

impl FromStr for ScheduleStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::AllCircle),
            "upper" => Ok(Self::UpperHalfCircle),
            "lower" => Ok(Self::LowerHalfCircle),
            "alt" => Ok(Self::Alternating),
            _ => Err(Error::InvalidConfig(format!("unknown schedule `{s}` (expected all, upper, lower or alt)"))),
        }
    }
}

impl fmt::Display for ScheduleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AllCircle => "all",
            Self::UpperHalfCircle => "upper",
            Self::LowerHalfCircle => "lower",
            Self::Alternating => "alt",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerSchedule {
    assignment: Vec<Variant>,
}

impl LayerSchedule {
    pub fn new(assignment: Vec<Variant>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidConfig("a schedule needs at least one layer".into()));
        }
        Ok(Self { assignment })
    }

    pub fn num_layers(&self) -> usize {
        self.assignment.len()
    }

    /// Variant at a 1-based layer number.
    pub fn variant(&self, layer: usize) -> Option<Variant> {
        layer.checked_sub(1).and_then(|i| self.assignment.get(i)).copied()
    }

    pub fn assignment(&self) -> &[Variant] {
        &self.assignment
    }
}

/// Builds a per-layer plan. The upper/lower split puts layers
/// `1..=ceil(n/2)` in the lower half.
pub fn make_schedule(num_layers: usize, strategy: ScheduleStrategy) -> Result<LayerSchedule> {
    let split = num_layers.div_ceil(2);
    let assignment = (1..=num_layers)
        .map(|layer| {
            let circle = match strategy {
                ScheduleStrategy::AllCircle => true,
                ScheduleStrategy::UpperHalfCircle => layer > split,
                ScheduleStrategy::LowerHalfCircle => layer <= split,
                ScheduleStrategy::Alternating => layer % 2 == 0,
            };
            if circle {
                Variant::Circle
            } else {
                Variant::Original
            }
        })
        .collect();
    LayerSchedule::new(assignment)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerStats {
    pub variant: Variant,
    /// Mean of all text-to-image logits.
    pub mean: f64,
    /// Population standard deviation of all text-to-image logits.
    pub std: f64,
    /// Largest per-query `max - min` across the keys of one image.
    pub spread: f64,
    /// Per-query spread averaged over text queries.
    pub mean_spread: f64,
    /// Largest per-query, per-pair range of relative rotation angles.
    pub angle_spread: f64,
    /// PTD of the indices used at this layer.
    pub ptd: f64,
}

pub type SchemeReport = BTreeMap<usize, LayerStats>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub protocol: &'static str,
    pub layout: String,
    pub seed: u64,
    pub head_dim: usize,
    pub base: f64,
    pub sections: [usize; 3],
    pub schemes: BTreeMap<SchemeKind, SchemeReport>,
}

struct Probe {
    queries: Vec<HeadVector>,
    key: HeadVector,
}

impl Probe {
    /// Standard normal entries scaled by `1/sqrt(D)`.
    fn draw(text_tokens: usize, head_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (head_dim as f64).sqrt();
        let mut draw = || {
            HeadVector(
                (0..head_dim)
                    .map(|_| {
                        let x: f64 = StandardNormal.sample(&mut rng);
                        scale * x
                    })
                    .collect(),
            )
        };
        let queries = (0..text_tokens).map(|_| draw()).collect();
        let key = draw();
        Self { queries, key }
    }
}

fn layer_stats(seq: &IndexedSequence, variant: Variant, probe: &Probe, params: &RotaryParams) -> Result<LayerStats> {
    let text: Vec<&IndexPoint> = seq.text_indices().collect();
    let image: Vec<&IndexPoint> = seq.image_indices().collect();
    if text.is_empty() || image.is_empty() {
        return Err(Error::MissingModality);
    }
    let key_angles: Vec<Vec<f64>> = image.iter().map(|p| rotation_angles(p, params)).collect();
    let keys = key_angles.iter().map(|a| apply_rotary(&probe.key, a)).collect::<Result<Vec<_>>>()?;

    let groups = image_groups(seq);
    let range = |values: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        hi - lo
    };

    let mut logits = Vec::with_capacity(text.len() * image.len());
    let mut spread = 0.0f64;
    let mut spread_sum = 0.0;
    let mut angle_spread = 0.0f64;
    for (q, q_index) in probe.queries.iter().zip(&text) {
        let q_angles = rotation_angles(q_index, params);
        let rq = apply_rotary(q, &q_angles)?;
        let row: Vec<f64> = keys.iter().map(|k| rq.dot(k)).collect();
        let query_spread = groups.iter().map(|g| range(&mut row[g.clone()].iter().copied())).fold(0.0, f64::max);
        spread = spread.max(query_spread);
        spread_sum += query_spread;
        logits.extend(row);

        for g in &groups {
            for (pair, qa) in q_angles.iter().enumerate() {
                let rel = range(&mut key_angles[g.clone()].iter().map(|ka| qa - ka[pair]));
                angle_spread = angle_spread.max(rel);
            }
        }
    }
    let n = logits.len() as f64;
    let mean = logits.iter().sum::<f64>() / n;
    let var = logits.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let (ptd, _) = sequence_ptd(seq)?;
    Ok(LayerStats {
        variant,
        mean,
        std: var.sqrt(),
        spread,
        mean_spread: spread_sum / text.len() as f64,
        angle_spread,
        ptd,
    })
}

/// Runs the probe for one scheme across every scheduled layer.
pub fn run_experiment(
    layout: &SequenceLayout,
    schedule: &LayerSchedule,
    params: &RotaryParams,
    seed: u64,
) -> Result<SchemeReport> {
    let (original, circle) = match layout.scheme {
        Scheme::Circle(config) => (assign_spatial(&layout.segments)?, assign_circle(&layout.segments, &config)?),
        _ => {
            let seq = layout.assign()?;
            (seq.clone(), seq)
        }
    };
    let text_tokens = original.text_indices().count();
    let probe = Probe::draw(text_tokens, params.head_dim(), seed);

    let mut cache: BTreeMap<bool, LayerStats> = BTreeMap::new();
    let mut report = SchemeReport::new();
    for (layer, variant) in (1..).zip(schedule.assignment()) {
        let is_circle = *variant == Variant::Circle;
        let stats = match cache.get(&is_circle) {
            Some(s) => s.clone(),
            None => {
                let seq = if is_circle { &circle } else { &original };
                let s = layer_stats(seq, *variant, &probe, params)?;
                cache.insert(is_circle, s.clone());
                s
            }
        };
        report.insert(layer, stats);
    }
    Ok(report)
}

/// Runs [`run_experiment`] for each scheme with the same seed.
pub fn run_experiments(
    segments: &[Segment],
    schemes: &[SchemeKind],
    config: &CipConfig,
    schedule: &LayerSchedule,
    params: &RotaryParams,
    seed: u64,
) -> Result<ExperimentReport> {
    let mut out = BTreeMap::new();
    for &kind in schemes {
        let layout = SequenceLayout::new(segments.to_vec(), kind.with_config(*config))?;
        out.insert(kind, run_experiment(&layout, schedule, params, seed)?);
    }
    Ok(ExperimentReport {
        protocol: PROTOCOL,
        layout: crate::schemes::format_layout(segments),
        seed,
        head_dim: params.head_dim(),
        base: params.base(),
        sections: params.sections(),
        schemes: out,
    })
}
