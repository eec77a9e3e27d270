//! Circle-projected positional indices for multimodal rotary embeddings.
//!
//! Image token grids are remapped onto a circle orthogonal to the text
//! index line so that every text token sits at the same distance from
//! every image token of an image. The crate provides the projection
//! ([`geometry`]), index assignment for the baseline and circle schemes
//! ([`schemes`]), the Per-Token Distance metric ([`metrics`]), a
//! multi-axis rotary kernel ([`rope`]), a toy attention probe
//! ([`harness`]) and the `circle-rope` command line ([`cli`]).

pub mod cli;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod rope;
pub mod schemes;

pub use error::{Error, Result};
pub use geometry::{CipConfig, GridSpec, IndexPoint, PlaneBasis, RadiusStrategy};
pub use harness::{LayerSchedule, ScheduleStrategy, Variant};
pub use metrics::{DistanceConvention, DistanceMatrix};
pub use rope::{HeadVector, RotaryParams};
pub use schemes::{IndexedSequence, Modality, Scheme, SchemeKind, Segment, SequenceLayout};
