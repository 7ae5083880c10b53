use crate::error::{Error, Result};
use crate::label::NUM_CLASSES;

/// 8x8 confusion matrix indexed `[truth][prediction]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    counts: [[usize; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionCounts {
    pub fn new() -> Self {
        ConfusionCounts {
            counts: [[0; NUM_CLASSES]; NUM_CLASSES],
        }
    }

    pub fn record(&mut self, truth: usize, pred: usize) {
        self.counts[truth][pred] += 1;
    }

    pub fn count(&self, truth: usize, pred: usize) -> usize {
        self.counts[truth][pred]
    }

    pub fn true_positives(&self, class: usize) -> usize {
        self.counts[class][class]
    }

    pub fn false_positives(&self, class: usize) -> usize {
        (0..NUM_CLASSES)
            .filter(|&t| t != class)
            .map(|t| self.counts[t][class])
            .sum()
    }

    pub fn false_negatives(&self, class: usize) -> usize {
        (0..NUM_CLASSES)
            .filter(|&p| p != class)
            .map(|p| self.counts[class][p])
            .sum()
    }

    /// Number of ground-truth members of `class`.
    pub fn support(&self, class: usize) -> usize {
        self.counts[class].iter().sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let correct: usize = (0..NUM_CLASSES).map(|c| self.counts[c][c]).sum();
        correct as f64 / self.total() as f64
    }

    /// `F1 = 2 tp / (2 tp + fp + fn)`; 0 when the class never appears on
    /// either side.
    pub fn f1(&self, class: usize) -> f64 {
        let tp = self.true_positives(class);
        let denom = 2 * tp + self.false_positives(class) + self.false_negatives(class);
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    }

    pub fn f1_per_class(&self) -> [f64; NUM_CLASSES] {
        std::array::from_fn(|c| self.f1(c))
    }

    pub fn macro_f1(&self) -> f64 {
        macro_f1(&self.f1_per_class())
    }
}

impl Default for ConfusionCounts {
    fn default() -> Self {
        Self::new()
    }
}

/// Builds a confusion matrix from parallel truth/prediction slices.
pub fn confusion_counts(truths: &[usize], preds: &[usize]) -> Result<ConfusionCounts> {
    if truths.len() != preds.len() {
        return Err(Error::LengthMismatch {
            left: truths.len(),
            right: preds.len(),
        });
    }
    if truths.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts = ConfusionCounts::new();
    for (&t, &p) in truths.iter().zip(preds) {
        if t >= NUM_CLASSES {
            return Err(Error::InvalidLabel(t as u8));
        }
        if p >= NUM_CLASSES {
            return Err(Error::InvalidLabel(p as u8));
        }
        counts.record(t, p);
    }
    Ok(counts)
}

/// Unweighted mean of the eight per-class F1 scores.
pub fn macro_f1(per_class: &[f64; NUM_CLASSES]) -> f64 {
    per_class.iter().sum::<f64>() / NUM_CLASSES as f64
}
