use std::path::PathBuf;

use thiserror::Error;

use crate::label::ExpressionClass;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("empty crop: {region} region of a {height}x{width} image rounds to zero area")]
    EmptyCrop {
        region: String,
        height: usize,
        width: usize,
    },

    #[error("invalid region spec {name}: fractions must satisfy 0 <= lo < hi <= 1")]
    InvalidRegion { name: String },

    #[error("invalid keypoint set: {0}")]
    InvalidKeypoints(String),

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("invalid label {0}: expected 0..=7")]
    InvalidLabel(u8),

    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("dimension mismatch for {id}: expected {expected}, found {found}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("class {class} has {available} records, {needed} requested")]
    InsufficientClass {
        class: ExpressionClass,
        available: usize,
        needed: usize,
    },

    #[error("label conflict for sample {sample_id}: {main} vs {aux}")]
    LabelConflict {
        sample_id: String,
        main: ExpressionClass,
        aux: ExpressionClass,
    },

    #[error("duplicate sample id {0}")]
    DuplicateSampleId(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("missing logits for video {video_id} frame {frame_index}")]
    MissingLogits { video_id: String, frame_index: u32 },

    #[error("missing ground truth for video {video_id} frame {frame_index}")]
    MissingGroundTruth { video_id: String, frame_index: u32 },

    #[error("frames out of order in video {video_id}: frame {frame_index} after {previous}")]
    UnorderedFrames {
        video_id: String,
        frame_index: u32,
        previous: u32,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("bad file format in {path}: {msg}")]
    Format { path: String, msg: String },

    #[error("failed to decode image {path}: {msg}")]
    ImageDecode { path: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attach a path to an I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
