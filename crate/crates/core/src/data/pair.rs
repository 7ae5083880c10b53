use std::collections::HashMap;

use crate::data::record::{EmbeddingDataset, EmbeddingRecord};
use crate::error::{Error, Result};

/// A two-view dataset: main and auxiliary embeddings joined on sample id.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    main: EmbeddingDataset,
    aux: EmbeddingDataset,
}

/// What an inner join kept and dropped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairReport {
    pub matched: usize,
    pub dropped_main: usize,
    pub dropped_aux: usize,
}

impl std::fmt::Display for PairReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} pairs matched, {} main-only dropped, {} aux-only dropped",
            self.matched, self.dropped_main, self.dropped_aux
        )
    }
}

impl PairedDataset {
    /// Inner-joins two datasets on `sample_id`, keeping main-view order.
    ///
    /// Duplicate sample ids on either side and label disagreements between the
    /// views are errors; records present on only one side are counted in the
    /// report and dropped.
    pub fn join(main: EmbeddingDataset, aux: EmbeddingDataset) -> Result<(Self, PairReport)> {
        let mut aux_by_id: HashMap<&str, usize> = HashMap::with_capacity(aux.len());
        for (i, rec) in aux.records().iter().enumerate() {
            if aux_by_id.insert(rec.sample_id.as_str(), i).is_some() {
                return Err(Error::DuplicateSampleId(rec.sample_id.clone()));
            }
        }
        let mut seen_main: HashMap<&str, ()> = HashMap::with_capacity(main.len());
        let mut main_keep: Vec<EmbeddingRecord> = Vec::new();
        let mut aux_keep: Vec<EmbeddingRecord> = Vec::new();
        let mut report = PairReport::default();
        for rec in main.records() {
            if seen_main.insert(rec.sample_id.as_str(), ()).is_some() {
                return Err(Error::DuplicateSampleId(rec.sample_id.clone()));
            }
            match aux_by_id.get(rec.sample_id.as_str()) {
                Some(&ai) => {
                    let aux_rec = aux.get(ai);
                    if aux_rec.label != rec.label {
                        return Err(Error::LabelConflict {
                            sample_id: rec.sample_id.clone(),
                            main: rec.label,
                            aux: aux_rec.label,
                        });
                    }
                    report.matched += 1;
                    main_keep.push(rec.clone());
                    aux_keep.push(aux_rec.clone());
                }
                None => report.dropped_main += 1,
            }
        }
        report.dropped_aux = aux.len() - report.matched;
        if main_keep.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let paired = PairedDataset {
            main: EmbeddingDataset::new(main.dim(), main_keep)?,
            aux: EmbeddingDataset::new(aux.dim(), aux_keep)?,
        };
        Ok((paired, report))
    }

    /// Pairs two datasets that are already aligned index by index.
    pub fn from_aligned(main: EmbeddingDataset, aux: EmbeddingDataset) -> Result<Self> {
        if main.len() != aux.len() {
            return Err(Error::LengthMismatch {
                left: main.len(),
                right: aux.len(),
            });
        }
        for (m, a) in main.records().iter().zip(aux.records()) {
            if m.sample_id != a.sample_id {
                return Err(Error::DuplicateSampleId(format!(
                    "misaligned ids {} vs {}",
                    m.sample_id, a.sample_id
                )));
            }
            if m.label != a.label {
                return Err(Error::LabelConflict {
                    sample_id: m.sample_id.clone(),
                    main: m.label,
                    aux: a.label,
                });
            }
        }
        if main.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(PairedDataset { main, aux })
    }

    pub fn main(&self) -> &EmbeddingDataset {
        &self.main
    }

    pub fn aux(&self) -> &EmbeddingDataset {
        &self.aux
    }

    pub fn len(&self) -> usize {
        self.main.len()
    }

    pub fn is_empty(&self) -> bool {
        self.main.is_empty()
    }

    /// Both views of pair `idx` plus the shared label index.
    pub fn pair(&self, idx: usize) -> (&EmbeddingRecord, &EmbeddingRecord) {
        (self.main.get(idx), self.aux.get(idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::ExpressionClass;

    fn rec(id: &str, label: ExpressionClass, fill: f32) -> EmbeddingRecord {
        EmbeddingRecord {
            sample_id: id.to_string(),
            video_id: "v".to_string(),
            frame_index: 0,
            label,
            vector: vec![fill; 2],
        }
    }

    fn ds(records: Vec<EmbeddingRecord>) -> EmbeddingDataset {
        EmbeddingDataset::new(2, records).unwrap()
    }

    #[test]
    fn join_drops_unmatched_and_counts() {
        let main = ds(vec![
            rec("a", ExpressionClass::Happy, 1.0),
            rec("b", ExpressionClass::Sad, 2.0),
            rec("c", ExpressionClass::Fear, 3.0),
        ]);
        let aux = ds(vec![
            rec("b", ExpressionClass::Sad, 20.0),
            rec("a", ExpressionClass::Happy, 10.0),
            rec("z", ExpressionClass::Other, 99.0),
        ]);
        let (paired, report) = PairedDataset::join(main, aux).unwrap();
        assert_eq!(report, PairReport { matched: 2, dropped_main: 1, dropped_aux: 1 });
        assert_eq!(paired.len(), 2);
        // Main order preserved; aux re-aligned to it.
        assert_eq!(paired.main().get(0).sample_id, "a");
        assert_eq!(paired.aux().get(0).vector[0], 10.0);
        assert_eq!(paired.aux().get(1).vector[0], 20.0);
    }

    #[test]
    fn label_conflict_is_fatal() {
        let main = ds(vec![rec("a", ExpressionClass::Happy, 1.0)]);
        let aux = ds(vec![rec("a", ExpressionClass::Sad, 2.0)]);
        match PairedDataset::join(main, aux).unwrap_err() {
            Error::LabelConflict { sample_id, main, aux } => {
                assert_eq!(sample_id, "a");
                assert_eq!(main, ExpressionClass::Happy);
                assert_eq!(aux, ExpressionClass::Sad);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_fatal() {
        let main = ds(vec![
            rec("a", ExpressionClass::Happy, 1.0),
            rec("a", ExpressionClass::Happy, 1.5),
        ]);
        let aux = ds(vec![rec("a", ExpressionClass::Happy, 2.0)]);
        assert!(matches!(
            PairedDataset::join(main, aux).unwrap_err(),
            Error::DuplicateSampleId(id) if id == "a"
        ));
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let main = ds(vec![rec("a", ExpressionClass::Happy, 1.0)]);
        let aux = ds(vec![rec("b", ExpressionClass::Happy, 2.0)]);
        assert!(matches!(
            PairedDataset::join(main, aux).unwrap_err(),
            Error::EmptyDataset
        ));
    }

    #[test]
    fn aligned_constructor_checks_ids_and_labels() {
        let main = ds(vec![rec("a", ExpressionClass::Happy, 1.0)]);
        let aux = ds(vec![rec("a", ExpressionClass::Happy, 2.0)]);
        assert!(PairedDataset::from_aligned(main.clone(), aux).is_ok());
        let aux_bad = ds(vec![rec("x", ExpressionClass::Happy, 2.0)]);
        assert!(PairedDataset::from_aligned(main, aux_bad).is_err());
    }
}
