use crate::error::{Error, Result};
use crate::label::{ExpressionClass, NUM_CLASSES};

/// One embedded frame: identity, provenance, label, and feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub sample_id: String,
    pub video_id: String,
    pub frame_index: u32,
    pub label: ExpressionClass,
    pub vector: Vec<f32>,
}

/// A collection of embedding records with one shared vector dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDataset {
    dim: usize,
    records: Vec<EmbeddingRecord>,
}

impl EmbeddingDataset {
    /// Builds a dataset, checking every record against the stated dimension.
    pub fn new(dim: usize, records: Vec<EmbeddingRecord>) -> Result<Self> {
        for rec in &records {
            if rec.vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    id: rec.sample_id.clone(),
                    expected: dim,
                    found: rec.vector.len(),
                });
            }
        }
        Ok(EmbeddingDataset { dim, records })
    }

    /// Infers the dimension from the first record.
    pub fn from_records(records: Vec<EmbeddingRecord>) -> Result<Self> {
        let dim = records.first().map(|r| r.vector.len()).ok_or(Error::EmptyDataset)?;
        Self::new(dim, records)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn get(&self, idx: usize) -> &EmbeddingRecord {
        &self.records[idx]
    }

    /// Record count per class, indexed by class encoding.
    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0usize; NUM_CLASSES];
        for rec in &self.records {
            counts[rec.label.index()] += 1;
        }
        counts
    }

    /// Indices of the records whose label matches `class`, in dataset order.
    pub fn indices_of_class(&self, class: ExpressionClass) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == class)
            .map(|(i, _)| i)
            .collect()
    }
}
