use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::pair::PairedDataset;
use crate::data::record::{EmbeddingDataset, EmbeddingRecord};
use crate::error::{Error, Result};
use crate::label::{ExpressionClass, NUM_CLASSES};

/// Noise scale at which a single view hits ~0.70 top-1 accuracy under the
/// nearest-prototype rule.
pub const TWO_VIEW_SIGMA: f64 = 0.5096662988583585;

/// Cross-view noise correlation at which averaging the two views hits ~0.95.
///
/// Negative correlation makes the views complementary: part of each view's
/// error cancels in the average, so the pair is far more separable than
/// either view alone.
pub const TWO_VIEW_RHO: f64 = -0.29719713790476043;

/// Parameters for the generated two-view benchmark dataset.
#[derive(Debug, Clone, Copy)]
pub struct SyntheticConfig {
    pub per_class: usize,
    pub sigma: f64,
    pub rho: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            per_class: 125,
            sigma: TWO_VIEW_SIGMA,
            rho: TWO_VIEW_RHO,
            seed: 0,
        }
    }
}

/// Generates a paired dataset whose views are individually weak but jointly
/// strong.
///
/// Each sample of class `c` is the one-hot prototype `e_c` plus Gaussian
/// noise: view A uses `sigma * eps`, view B uses
/// `sigma * (rho * eps + sqrt(1 - rho^2) * eta)` with independent `eta`, so
/// both views have the same marginal noise but correlate across views by
/// `rho`. Classes are generated in encoding order from one ChaCha8 stream.
pub fn generate_two_view(cfg: &SyntheticConfig) -> Result<PairedDataset> {
    if cfg.per_class == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(-1.0..=1.0).contains(&cfg.rho) || !cfg.sigma.is_finite() || cfg.sigma < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "sigma {} / rho {} out of range",
            cfg.sigma, cfg.rho
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cross = (1.0 - cfg.rho * cfg.rho).sqrt();
    let mut main = Vec::with_capacity(cfg.per_class * NUM_CLASSES);
    let mut aux = Vec::with_capacity(cfg.per_class * NUM_CLASSES);
    for class in ExpressionClass::ALL {
        for i in 0..cfg.per_class {
            let mut va = [0f32; NUM_CLASSES];
            let mut vb = [0f32; NUM_CLASSES];
            for d in 0..NUM_CLASSES {
                let proto = if d == class.index() { 1.0 } else { 0.0 };
                let eps: f64 = StandardNormal.sample(&mut rng);
                let eta: f64 = StandardNormal.sample(&mut rng);
                va[d] = (proto + cfg.sigma * eps) as f32;
                vb[d] = (proto + cfg.sigma * (cfg.rho * eps + cross * eta)) as f32;
            }
            let sample_id = format!("c{}_{i:05}", class.index());
            let video_id = format!("vid{}", class.index());
            main.push(EmbeddingRecord {
                sample_id: sample_id.clone(),
                video_id: video_id.clone(),
                frame_index: i as u32,
                label: class,
                vector: va.to_vec(),
            });
            aux.push(EmbeddingRecord {
                sample_id,
                video_id,
                frame_index: i as u32,
                label: class,
                vector: vb.to_vec(),
            });
        }
    }
    PairedDataset::from_aligned(
        EmbeddingDataset::new(NUM_CLASSES, main)?,
        EmbeddingDataset::new(NUM_CLASSES, aux)?,
    )
}

/// Nearest-prototype decision: the coordinate with the largest value, lowest
/// index on ties. For this generator it is the Bayes rule per view, and also
/// the Bayes rule on the element-wise average of the two views.
pub fn prototype_predict(v: &[f32]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}
