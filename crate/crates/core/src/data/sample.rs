use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::record::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::label::ExpressionClass;

/// Draws `per_class` records from every class without replacement.
///
/// Classes are visited in encoding order and sampled with a ChaCha8 stream
/// seeded from `seed`, so the same inputs always select the same records.
/// Selected indices keep the dataset's original order within each class and
/// the per-class blocks are concatenated class by class.
pub fn uniform_class_sample(
    ds: &EmbeddingDataset,
    per_class: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::with_capacity(per_class * ExpressionClass::ALL.len());
    for class in ExpressionClass::ALL {
        let pool = ds.indices_of_class(class);
        if pool.len() < per_class {
            return Err(Error::InsufficientClass {
                class,
                available: pool.len(),
                needed: per_class,
            });
        }
        let mut chosen: Vec<usize> = rand::seq::index::sample(&mut rng, pool.len(), per_class)
            .into_iter()
            .collect();
        chosen.sort_unstable();
        picked.extend(chosen.into_iter().map(|i| pool[i]));
    }
    Ok(picked)
}

/// Materializes sampled indices into a new dataset.
pub fn subset(ds: &EmbeddingDataset, indices: &[usize]) -> Result<EmbeddingDataset> {
    let records = indices.iter().map(|&i| ds.get(i).clone()).collect();
    EmbeddingDataset::new(ds.dim(), records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::record::EmbeddingRecord;

    fn dataset(per_class: usize) -> EmbeddingDataset {
        let mut records = Vec::new();
        for class in ExpressionClass::ALL {
            for i in 0..per_class {
                records.push(EmbeddingRecord {
                    sample_id: format!("{class}_{i}"),
                    video_id: "v".to_string(),
                    frame_index: i as u32,
                    label: class,
                    vector: vec![class.index() as f32],
                });
            }
        }
        EmbeddingDataset::new(1, records).unwrap()
    }

    #[test]
    fn balanced_and_deterministic() {
        let ds = dataset(20);
        let a = uniform_class_sample(&ds, 5, 99).unwrap();
        let b = uniform_class_sample(&ds, 5, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        let sub = subset(&ds, &a).unwrap();
        assert_eq!(sub.class_counts(), [5; 8]);
    }

    #[test]
    fn different_seeds_differ() {
        let ds = dataset(50);
        let a = uniform_class_sample(&ds, 10, 1).unwrap();
        let b = uniform_class_sample(&ds, 10, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn no_replacement_within_class() {
        let ds = dataset(10);
        let idx = uniform_class_sample(&ds, 10, 7).unwrap();
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), idx.len());
    }

    #[test]
    fn scarce_class_is_reported() {
        let ds = dataset(3);
        match uniform_class_sample(&ds, 4, 0).unwrap_err() {
            Error::InsufficientClass { class, available, needed } => {
                assert_eq!(class, ExpressionClass::Neutral);
                assert_eq!((available, needed), (3, 4));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
