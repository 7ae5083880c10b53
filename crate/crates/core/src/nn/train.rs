use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::pair::PairedDataset;
use crate::error::{Error, Result};
use crate::nn::adam::{AdamConfig, AdamState};
use crate::nn::model::{FusionConfig, FusionModel};
use crate::tensor::Tensor;

/// Training schedule for the fusion network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub iters: usize,
    pub batch: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iters: 100,
            batch: 512,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

/// Trained model plus the per-iteration batch-summed loss curve.
#[derive(Debug, Clone)]
pub struct TrainResult {
    pub model: FusionModel,
    pub losses: Vec<f64>,
}

/// Trains a fusion model with Adam on shuffled mini-batches.
///
/// All randomness (parameter init, then shuffling) comes from one ChaCha8
/// stream seeded with `cfg.seed`, so a run is fully reproducible. The batch
/// size is capped at the dataset size; the index order is reshuffled whenever
/// fewer than a full batch remains.
pub fn train_fusion(
    ds: &PairedDataset,
    model_cfg: &FusionConfig,
    cfg: &TrainConfig,
) -> Result<TrainResult> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cfg.batch == 0 {
        return Err(Error::InvalidConfig("batch size must be positive".to_string()));
    }
    let d = model_cfg.dim;
    if ds.main().dim() != d {
        return Err(Error::DimensionMismatch {
            id: "main view".to_string(),
            expected: d,
            found: ds.main().dim(),
        });
    }
    if ds.aux().dim() != d {
        return Err(Error::DimensionMismatch {
            id: "aux view".to_string(),
            expected: d,
            found: ds.aux().dim(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = FusionModel::seeded_with(model_cfg, &mut rng)?;
    let mut adam = AdamState::for_params(cfg.adam, &model.params())?;

    let n = ds.len();
    let batch = cfg.batch.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut pos = n;
    let mut losses = Vec::with_capacity(cfg.iters);
    let mut f_main = Tensor::zeros(&[batch, d]);
    let mut f_aux = Tensor::zeros(&[batch, d]);
    let mut labels = vec![0usize; batch];

    for iter in 0..cfg.iters {
        if pos + batch > n {
            order.shuffle(&mut rng);
            pos = 0;
        }
        for (slot, &idx) in order[pos..pos + batch].iter().enumerate() {
            let (m, a) = ds.pair(idx);
            for (dst, &src) in f_main.row_mut(slot).iter_mut().zip(&m.vector) {
                *dst = src as f64;
            }
            for (dst, &src) in f_aux.row_mut(slot).iter_mut().zip(&a.vector) {
                *dst = src as f64;
            }
            labels[slot] = m.label.index();
        }
        pos += batch;

        let (loss, grads) = model.loss_and_grads(&f_main, &f_aux, &labels);
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("training loss at iteration {}", iter + 1)));
        }
        adam.step(&mut model.params_mut(), &grads.params);
        losses.push(loss);
    }

    Ok(TrainResult { model, losses })
}
