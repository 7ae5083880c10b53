use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::metrics::{confusion_counts, ConfusionCounts};
use crate::eval::smooth::FramePrediction;
use crate::label::{ExpressionClass, NUM_CLASSES};

/// Writes a prediction stream as CSV.
///
/// Columns: `video_id,frame_index,pred`, then `gt` when the first frame has
/// ground truth, then `logit0..logit7` when it has logits; the rest of the
/// stream must match the first frame's shape.
pub fn write_predictions_csv(path: &Path, frames: &[FramePrediction]) -> Result<()> {
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    let with_gt = frames[0].ground_truth.is_some();
    let with_logits = frames[0].logits.is_some();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let wrap = |e: csv::Error| Error::Format {
        path: path.display().to_string(),
        msg: e.to_string(),
    };
    let mut header = vec!["video_id".to_string(), "frame_index".to_string(), "pred".to_string()];
    if with_gt {
        header.push("gt".to_string());
    }
    if with_logits {
        header.extend((0..NUM_CLASSES).map(|i| format!("logit{i}")));
    }
    w.write_record(&header).map_err(wrap)?;
    for frame in frames {
        let mut row = vec![
            frame.video_id.clone(),
            frame.frame_index.to_string(),
            frame.label.to_string(),
        ];
        if with_gt {
            let gt = frame.ground_truth.ok_or_else(|| Error::MissingGroundTruth {
                video_id: frame.video_id.clone(),
                frame_index: frame.frame_index,
            })?;
            row.push(gt.to_string());
        }
        if with_logits {
            let logits = frame.logits.as_ref().ok_or_else(|| Error::MissingLogits {
                video_id: frame.video_id.clone(),
                frame_index: frame.frame_index,
            })?;
            row.extend(logits.iter().map(|v| v.to_string()));
        }
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a prediction CSV, recognizing the optional `gt` and logit columns
/// from the header.
pub fn read_predictions_csv(path: &Path) -> Result<Vec<FramePrediction>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };
    let headers = r.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 3 || cols[0] != "video_id" || cols[1] != "frame_index" || cols[2] != "pred" {
        return Err(parse_err(
            1,
            format!("expected header video_id,frame_index,pred[,gt][,logit0..], got {cols:?}"),
        ));
    }
    let gt_col = (cols.len() > 3 && cols[3] == "gt").then_some(3);
    let logit_start = gt_col.map_or(3, |c| c + 1);
    let has_logits = cols.len() > logit_start;
    if has_logits {
        let expected: Vec<String> = (0..NUM_CLASSES).map(|i| format!("logit{i}")).collect();
        if cols.len() != logit_start + NUM_CLASSES
            || cols[logit_start..].iter().map(|s| s.to_string()).ne(expected)
        {
            return Err(parse_err(1, format!("bad logit columns in {cols:?}")));
        }
    }

    let mut frames = Vec::new();
    for (idx, row) in r.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| parse_err(line, e.to_string()))?;
        if row.len() != cols.len() {
            return Err(parse_err(line, format!("expected {} fields, got {}", cols.len(), row.len())));
        }
        let frame_index: u32 = row[1]
            .parse()
            .map_err(|e| parse_err(line, format!("bad frame_index {:?}: {e}", &row[1])))?;
        let label = parse_class(&row[2]).map_err(|e| parse_err(line, e))?;
        let ground_truth = match gt_col {
            Some(c) => Some(parse_class(&row[c]).map_err(|e| parse_err(line, e))?),
            None => None,
        };
        let logits = if has_logits {
            let mut l = Vec::with_capacity(NUM_CLASSES);
            for field in row.iter().skip(logit_start) {
                let v: f64 = field
                    .parse()
                    .map_err(|e| parse_err(line, format!("bad logit {field:?}: {e}")))?;
                l.push(v);
            }
            Some(l)
        } else {
            None
        };
        frames.push(FramePrediction {
            video_id: row[0].to_string(),
            frame_index,
            label,
            ground_truth,
            logits,
        });
    }
    Ok(frames)
}

fn parse_class(field: &str) -> std::result::Result<usize, String> {
    let raw: u8 = field.parse().map_err(|e| format!("bad class {field:?}: {e}"))?;
    if (raw as usize) < NUM_CLASSES {
        Ok(raw as usize)
    } else {
        Err(format!("class {raw} out of range"))
    }
}

/// Scores a prediction stream against its ground-truth column.
pub fn evaluate_frames(frames: &[FramePrediction]) -> Result<ConfusionCounts> {
    let mut truths = Vec::with_capacity(frames.len());
    let mut preds = Vec::with_capacity(frames.len());
    for frame in frames {
        let gt = frame.ground_truth.ok_or_else(|| Error::MissingGroundTruth {
            video_id: frame.video_id.clone(),
            frame_index: frame.frame_index,
        })?;
        truths.push(gt);
        preds.push(frame.label);
    }
    confusion_counts(&truths, &preds)
}

/// Scored run: overall accuracy, per-class F1 in encoding order, macro F1.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub per_class_f1: [f64; NUM_CLASSES],
    pub macro_f1: f64,
}

impl EvalReport {
    pub fn from_confusion(cm: &ConfusionCounts) -> Self {
        EvalReport {
            accuracy: cm.accuracy(),
            per_class_f1: cm.f1_per_class(),
            macro_f1: cm.macro_f1(),
        }
    }

    pub fn csv_header() -> String {
        let mut cols = vec!["Accuracy".to_string()];
        cols.extend(ExpressionClass::ALL.iter().map(|c| c.name().to_string()));
        cols.push("MacroF1".to_string());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut fields = vec![format!("{:.4}", self.accuracy)];
        fields.extend(self.per_class_f1.iter().map(|v| format!("{v:.4}")));
        fields.push(format!("{:.4}", self.macro_f1));
        fields.join(",")
    }

    /// Two-line CSV: header plus one row of values.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let body = format!("{}\n{}\n", Self::csv_header(), self.csv_row());
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }
}

impl std::fmt::Display for EvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<10} {:.4}", "Accuracy", self.accuracy)?;
        for (class, f1) in ExpressionClass::ALL.iter().zip(&self.per_class_f1) {
            writeln!(f, "{:<10} {f1:.4}", class.name())?;
        }
        write!(f, "{:<10} {:.4}", "MacroF1", self.macro_f1)
    }
}
