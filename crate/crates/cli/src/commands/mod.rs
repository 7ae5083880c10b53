pub mod evaluate;
pub mod report;
pub mod sample;
pub mod smooth;
pub mod synthesize;
pub mod train;

use std::path::Path;

use anyhow::Context;
use viewfuse::data::EmbeddingDataset;
use viewfuse::Tensor;

/// Loads an embedding file (binary or CSV) with a path-bearing error.
pub fn load_dataset(path: &Path) -> anyhow::Result<EmbeddingDataset> {
    viewfuse::data::load_embeddings(path)
        .with_context(|| format!("loading embeddings {}", path.display()))
}

/// Copies records `indices` of a dataset into an f64 batch tensor.
pub fn batch_tensor(ds: &EmbeddingDataset, indices: &[usize]) -> Tensor {
    let mut t = Tensor::zeros(&[indices.len(), ds.dim()]);
    for (row, &i) in indices.iter().enumerate() {
        for (dst, &src) in t.row_mut(row).iter_mut().zip(&ds.get(i).vector) {
            *dst = src as f64;
        }
    }
    t
}

/// Saves an embedding dataset, choosing CSV for `.csv` paths and the binary
/// format otherwise, atomically.
pub fn save_dataset(path: &Path, ds: &EmbeddingDataset) -> anyhow::Result<()> {
    crate::config::write_atomic(path, |tmp| {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            viewfuse::data::save_embeddings_csv(tmp, ds)?;
        } else {
            viewfuse::data::save_embeddings_binary(tmp, ds)?;
        }
        Ok(())
    })
    .with_context(|| format!("writing embeddings {}", path.display()))
}
