use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::label::NUM_CLASSES;

/// One frame's prediction inside a video stream.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePrediction {
    pub video_id: String,
    pub frame_index: u32,
    pub label: usize,
    pub ground_truth: Option<usize>,
    pub logits: Option<Vec<f64>>,
}

/// Window `[i - k/2, i + ceil(k/2) - 1]` clamped to the sequence, so `k`
/// frames when the sequence allows (for k = 50: 25 back, 24 forward).
fn window_bounds(i: usize, n: usize, k: usize) -> (usize, usize) {
    let lo = i.saturating_sub(k / 2);
    let hi = (i + k.div_ceil(2) - 1).min(n - 1);
    (lo, hi)
}

/// Majority-smooths one label sequence with a centered window of size `k`.
///
/// Every output label is the most frequent label among the ORIGINAL labels in
/// the window, so smoothing never cascades. On a tie the frame keeps its own
/// label when it is among the tied classes, otherwise the lowest class index
/// wins. `k = 1` is the identity.
pub fn smooth_labels(labels: &[usize], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidConfig("smoothing window must be positive".to_string()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= NUM_CLASSES) {
        return Err(Error::InvalidLabel(bad as u8));
    }
    let n = labels.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = window_bounds(i, n, k);
        let mut counts = [0usize; NUM_CLASSES];
        for &l in &labels[lo..=hi] {
            counts[l] += 1;
        }
        let best = *counts.iter().max().expect("non-empty window");
        let winner = if counts[labels[i]] == best {
            labels[i]
        } else {
            counts.iter().position(|&c| c == best).expect("max exists")
        };
        out.push(winner);
    }
    Ok(out)
}

/// Per-video slot lists in input order, with frame ordering enforced.
fn video_slots(frames: &[FramePrediction]) -> Result<Vec<Vec<usize>>> {
    let mut by_video: HashMap<&str, usize> = HashMap::new();
    let mut slots: Vec<Vec<usize>> = Vec::new();
    for (i, frame) in frames.iter().enumerate() {
        let entry = *by_video.entry(frame.video_id.as_str()).or_insert_with(|| {
            slots.push(Vec::new());
            slots.len() - 1
        });
        if let Some(&prev) = slots[entry].last() {
            if frames[prev].frame_index >= frame.frame_index {
                return Err(Error::UnorderedFrames {
                    video_id: frame.video_id.clone(),
                    frame_index: frame.frame_index,
                    previous: frames[prev].frame_index,
                });
            }
        }
        slots[entry].push(i);
    }
    Ok(slots)
}

/// Majority-smooths every video in a prediction stream independently.
///
/// Frames of one video are treated as consecutive (windows are positional,
/// ignoring frame-index gaps) and must appear in strictly increasing
/// frame-index order. Output frames keep their input positions.
pub fn sliding_window_smooth(frames: &[FramePrediction], k: usize) -> Result<Vec<FramePrediction>> {
    let mut out = frames.to_vec();
    for slots in video_slots(frames)? {
        let labels: Vec<usize> = slots.iter().map(|&i| frames[i].label).collect();
        let smoothed = smooth_labels(&labels, k)?;
        for (&slot, label) in slots.iter().zip(smoothed) {
            out[slot].label = label;
        }
    }
    Ok(out)
}

/// Logit-averaging variant: each frame's label becomes the arg-max of the
/// mean logits over its window. Every frame must carry logits.
pub fn smooth_logits_mean(frames: &[FramePrediction], k: usize) -> Result<Vec<FramePrediction>> {
    if k == 0 {
        return Err(Error::InvalidConfig("smoothing window must be positive".to_string()));
    }
    let mut out = frames.to_vec();
    for slots in video_slots(frames)? {
        let logits: Vec<&[f64]> = slots
            .iter()
            .map(|&i| {
                frames[i].logits.as_deref().ok_or_else(|| Error::MissingLogits {
                    video_id: frames[i].video_id.clone(),
                    frame_index: frames[i].frame_index,
                })
            })
            .collect::<Result<_>>()?;
        let n = slots.len();
        for (pos, &slot) in slots.iter().enumerate() {
            let (lo, hi) = window_bounds(pos, n, k);
            let width = logits[lo].len();
            let mut mean = vec![0.0; width];
            for row in &logits[lo..=hi] {
                for (m, &v) in mean.iter_mut().zip(row.iter()) {
                    *m += v;
                }
            }
            let count = (hi - lo + 1) as f64;
            for m in &mut mean {
                *m /= count;
            }
            let mut best = 0;
            for (j, &v) in mean.iter().enumerate().skip(1) {
                if v > mean[best] {
                    best = j;
                }
            }
            out[slot].label = best;
        }
    }
    Ok(out)
}
