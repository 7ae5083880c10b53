//! Scoring and post-processing: confusion counts, per-class and macro F1,
//! prediction CSVs, and temporal smoothing of frame streams.

pub mod metrics;
pub mod predictions;
pub mod smooth;

pub use metrics::{confusion_counts, macro_f1, ConfusionCounts};
pub use predictions::{
    evaluate_frames, read_predictions_csv, write_predictions_csv, EvalReport,
};
pub use smooth::{
    sliding_window_smooth, smooth_labels, smooth_logits_mean, FramePrediction,
};
