use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::dense::{relu, relu_backward, DenseLayer};
use crate::tensor::Tensor;

/// How the two view embeddings are combined before the key/value projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyGenStrategy {
    /// Element-wise mean through one square dense layer.
    Mean,
    /// Concatenation through one down-projecting dense layer.
    Concat,
    /// Mean expanded to `2d` and contracted back; two layers.
    UpDownMean,
    /// Concatenation kept at `2d` through two hidden layers, then contracted;
    /// three layers.
    UpDownConcat,
}

impl KeyGenStrategy {
    pub const ALL: [KeyGenStrategy; 4] = [
        KeyGenStrategy::Mean,
        KeyGenStrategy::Concat,
        KeyGenStrategy::UpDownMean,
        KeyGenStrategy::UpDownConcat,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            KeyGenStrategy::Mean => "mean",
            KeyGenStrategy::Concat => "concat",
            KeyGenStrategy::UpDownMean => "updown-mean",
            KeyGenStrategy::UpDownConcat => "updown-concat",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(KeyGenStrategy::Mean),
            "concat" => Ok(KeyGenStrategy::Concat),
            "updown-mean" | "updown_mean" => Ok(KeyGenStrategy::UpDownMean),
            "updown-concat" | "updown_concat" => Ok(KeyGenStrategy::UpDownConcat),
            other => Err(Error::InvalidConfig(format!(
                "unknown key-generator strategy {other:?} \
                 (expected mean, concat, updown-mean, or updown-concat)"
            ))),
        }
    }

    /// Stable numeric code used by the checkpoint format.
    pub fn code(&self) -> u8 {
        match self {
            KeyGenStrategy::Mean => 0,
            KeyGenStrategy::Concat => 1,
            KeyGenStrategy::UpDownMean => 2,
            KeyGenStrategy::UpDownConcat => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(KeyGenStrategy::Mean),
            1 => Ok(KeyGenStrategy::Concat),
            2 => Ok(KeyGenStrategy::UpDownMean),
            3 => Ok(KeyGenStrategy::UpDownConcat),
            other => Err(Error::InvalidConfig(format!("unknown strategy code {other}"))),
        }
    }

    /// Whether the raw input is the mean (`d`) or the concatenation (`2d`).
    pub fn input_dim(&self, d: usize) -> usize {
        match self {
            KeyGenStrategy::Mean | KeyGenStrategy::UpDownMean => d,
            KeyGenStrategy::Concat | KeyGenStrategy::UpDownConcat => 2 * d,
        }
    }

    /// Dense layer shapes as `(out, in)` pairs, in forward order.
    pub fn layer_dims(&self, d: usize) -> Vec<(usize, usize)> {
        match self {
            KeyGenStrategy::Mean => vec![(d, d)],
            KeyGenStrategy::Concat => vec![(d, 2 * d)],
            KeyGenStrategy::UpDownMean => vec![(2 * d, d), (d, 2 * d)],
            KeyGenStrategy::UpDownConcat => vec![(2 * d, 2 * d), (2 * d, 2 * d), (d, 2 * d)],
        }
    }

    pub fn layer_count(&self) -> usize {
        match self {
            KeyGenStrategy::Mean | KeyGenStrategy::Concat => 1,
            KeyGenStrategy::UpDownMean => 2,
            KeyGenStrategy::UpDownConcat => 3,
        }
    }
}

impl std::fmt::Display for KeyGenStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The fused-feature generator: view combination plus a small dense stack
/// with ReLU between layers and a linear final layer.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyGenerator {
    strategy: KeyGenStrategy,
    d: usize,
    layers: Vec<DenseLayer>,
}

/// Forward activations needed to run the generator backward.
#[derive(Debug, Clone)]
pub struct KeyGenCache {
    /// Combined input (mean or concatenation of the views).
    pub combined: Tensor,
    /// Input to each dense layer, in forward order.
    layer_inputs: Vec<Tensor>,
    /// Linear output of each dense layer, before any ReLU.
    layer_linear: Vec<Tensor>,
}

/// Gradients of the generator: per-layer parameter grads plus the gradients
/// flowing back into each view embedding.
#[derive(Debug, Clone)]
pub struct KeyGenGradients {
    pub weights: Vec<Tensor>,
    pub biases: Vec<Tensor>,
    pub d_main: Tensor,
    pub d_aux: Tensor,
}

impl KeyGenerator {
    pub fn seeded<R: Rng>(strategy: KeyGenStrategy, d: usize, rng: &mut R) -> Self {
        let layers = strategy
            .layer_dims(d)
            .into_iter()
            .map(|(out, inp)| DenseLayer::seeded(out, inp, rng))
            .collect();
        KeyGenerator { strategy, d, layers }
    }

    /// Wraps existing layers, enforcing the strategy's layer count and shapes.
    pub fn from_layers(
        strategy: KeyGenStrategy,
        d: usize,
        layers: Vec<DenseLayer>,
    ) -> Result<Self> {
        let dims = strategy.layer_dims(d);
        if layers.len() != dims.len() {
            return Err(Error::InvalidConfig(format!(
                "strategy {strategy} requires {} layers, got {}",
                dims.len(),
                layers.len()
            )));
        }
        for (i, (layer, (out, inp))) in layers.iter().zip(&dims).enumerate() {
            if layer.out_dim() != *out || layer.in_dim() != *inp {
                return Err(Error::InvalidConfig(format!(
                    "strategy {strategy} layer {i} must be {out}x{inp}, \
                     got {}x{}",
                    layer.out_dim(),
                    layer.in_dim()
                )));
            }
        }
        Ok(KeyGenerator { strategy, d, layers })
    }

    pub fn strategy(&self) -> KeyGenStrategy {
        self.strategy
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    fn combine(&self, f_main: &Tensor, f_aux: &Tensor) -> Tensor {
        let batch = f_main.rows();
        match self.strategy {
            KeyGenStrategy::Mean | KeyGenStrategy::UpDownMean => {
                let mut u = f_main.clone();
                for (a, &b) in u.data_mut().iter_mut().zip(f_aux.data()) {
                    *a = (*a + b) / 2.0;
                }
                u
            }
            KeyGenStrategy::Concat | KeyGenStrategy::UpDownConcat => {
                let mut u = Tensor::zeros(&[batch, 2 * self.d]);
                for i in 0..batch {
                    let row = u.row_mut(i);
                    row[..self.d].copy_from_slice(f_main.row(i));
                    row[self.d..].copy_from_slice(f_aux.row(i));
                }
                u
            }
        }
    }

    /// `f_main, f_aux (batch, d) -> fused (batch, d)` plus the cache.
    pub fn forward(&self, f_main: &Tensor, f_aux: &Tensor) -> (Tensor, KeyGenCache) {
        assert_eq!(f_main.shape(), f_aux.shape(), "view shapes");
        assert_eq!(f_main.cols(), self.d, "view dim");
        let combined = self.combine(f_main, f_aux);
        let mut layer_inputs = Vec::with_capacity(self.layers.len());
        let mut layer_linear = Vec::with_capacity(self.layers.len());
        let mut x = combined.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            layer_inputs.push(x.clone());
            let y = layer.forward(&x);
            layer_linear.push(y.clone());
            x = if i + 1 < self.layers.len() { relu(&y) } else { y };
        }
        (
            x,
            KeyGenCache {
                combined,
                layer_inputs,
                layer_linear,
            },
        )
    }

    /// Backward through the dense stack and the view combination.
    pub fn backward(&self, cache: &KeyGenCache, d_fused: &Tensor) -> KeyGenGradients {
        let n = self.layers.len();
        let mut weights = vec![Tensor::zeros(&[1]); n];
        let mut biases = vec![Tensor::zeros(&[1]); n];
        let mut d = d_fused.clone();
        for i in (0..n).rev() {
            let grads = self.layers[i].backward(&cache.layer_inputs[i], &d);
            weights[i] = grads.weight;
            biases[i] = grads.bias;
            d = grads.input;
            if i > 0 {
                d = relu_backward(&cache.layer_linear[i - 1], &d);
            }
        }
        let batch = d.rows();
        let (d_main, d_aux) = match self.strategy {
            KeyGenStrategy::Mean | KeyGenStrategy::UpDownMean => {
                let mut half = d.clone();
                for v in half.data_mut() {
                    *v *= 0.5;
                }
                (half.clone(), half)
            }
            KeyGenStrategy::Concat | KeyGenStrategy::UpDownConcat => {
                let mut dm = Tensor::zeros(&[batch, self.d]);
                let mut da = Tensor::zeros(&[batch, self.d]);
                for i in 0..batch {
                    dm.row_mut(i).copy_from_slice(&d.row(i)[..self.d]);
                    da.row_mut(i).copy_from_slice(&d.row(i)[self.d..]);
                }
                (dm, da)
            }
        };
        KeyGenGradients {
            weights,
            biases,
            d_main,
            d_aux,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn strategy_layer_counts() {
        assert_eq!(KeyGenStrategy::Mean.layer_count(), 1);
        assert_eq!(KeyGenStrategy::Concat.layer_count(), 1);
        assert_eq!(KeyGenStrategy::UpDownMean.layer_count(), 2);
        assert_eq!(KeyGenStrategy::UpDownConcat.layer_count(), 3);
        for s in KeyGenStrategy::ALL {
            assert_eq!(s.layer_dims(8).len(), s.layer_count());
        }
    }

    #[test]
    fn parse_round_trips() {
        for s in KeyGenStrategy::ALL {
            assert_eq!(KeyGenStrategy::parse(s.as_str()).unwrap(), s);
            assert_eq!(KeyGenStrategy::from_code(s.code()).unwrap(), s);
        }
        assert!(KeyGenStrategy::parse("maxpool").is_err());
        assert!(KeyGenStrategy::from_code(4).is_err());
    }

    #[test]
    fn from_layers_enforces_shape() {
        let d = 4;
        let good: Vec<DenseLayer> = KeyGenStrategy::UpDownMean
            .layer_dims(d)
            .into_iter()
            .map(|(o, i)| DenseLayer::zeros(o, i))
            .collect();
        assert!(KeyGenerator::from_layers(KeyGenStrategy::UpDownMean, d, good.clone()).is_ok());
        // Wrong count.
        assert!(KeyGenerator::from_layers(KeyGenStrategy::UpDownMean, d, good[..1].to_vec()).is_err());
        // Wrong shape.
        let bad = vec![DenseLayer::zeros(d, d), DenseLayer::zeros(d, d)];
        assert!(KeyGenerator::from_layers(KeyGenStrategy::UpDownMean, d, bad).is_err());
    }

    #[test]
    fn mean_identity_generator_averages_views() {
        let d = 3;
        let gen =
            KeyGenerator::from_layers(KeyGenStrategy::Mean, d, vec![DenseLayer::identity(d)])
                .unwrap();
        let a = Tensor::from_vec(&[1, 3], vec![2.0, 4.0, 6.0]).unwrap();
        let b = Tensor::from_vec(&[1, 3], vec![0.0, 0.0, 2.0]).unwrap();
        let (fused, _) = gen.forward(&a, &b);
        assert_eq!(fused.data(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn output_dim_is_d_for_every_strategy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = 6;
        let a = Tensor::from_vec(&[2, d], (0..12).map(|i| i as f64 * 0.1).collect()).unwrap();
        let b = Tensor::from_vec(&[2, d], (0..12).map(|i| -(i as f64) * 0.1).collect()).unwrap();
        for s in KeyGenStrategy::ALL {
            let gen = KeyGenerator::seeded(s, d, &mut rng);
            let (fused, _) = gen.forward(&a, &b);
            assert_eq!(fused.shape(), &[2, d], "{s}");
        }
    }

    #[test]
    fn backward_matches_finite_differences_all_strategies() {
        let d = 4;
        let eps = 1e-6;
        for (si, s) in KeyGenStrategy::ALL.into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(40 + si as u64);
            let gen = KeyGenerator::seeded(s, d, &mut rng);
            let a = Tensor::from_vec(
                &[3, d],
                (0..3 * d).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let b = Tensor::from_vec(
                &[3, d],
                (0..3 * d).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let d_fused = Tensor::from_vec(
                &[3, d],
                (0..3 * d).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let (_, cache) = gen.forward(&a, &b);
            let grads = gen.backward(&cache, &d_fused);
            let loss = |gen: &KeyGenerator, a: &Tensor, b: &Tensor| {
                let (f, _) = gen.forward(a, b);
                f.data().iter().zip(d_fused.data()).map(|(x, y)| x * y).sum::<f64>()
            };
            // Parameter gradients, every layer.
            for li in 0..gen.layers().len() {
                let mut probe = gen.clone();
                for idx in 0..probe.layers()[li].weight.len() {
                    let orig = probe.layers()[li].weight.data()[idx];
                    probe.layers_mut()[li].weight.data_mut()[idx] = orig + eps;
                    let up = loss(&probe, &a, &b);
                    probe.layers_mut()[li].weight.data_mut()[idx] = orig - eps;
                    let down = loss(&probe, &a, &b);
                    probe.layers_mut()[li].weight.data_mut()[idx] = orig;
                    let fd = (up - down) / (2.0 * eps);
                    let an = grads.weights[li].data()[idx];
                    assert!((an - fd).abs() < 1e-5, "{s} layer {li} w{idx}: {an} vs {fd}");
                }
            }
            // View gradients.
            for idx in 0..a.len() {
                let mut ap = a.clone();
                let orig = ap.data()[idx];
                ap.data_mut()[idx] = orig + eps;
                let up = loss(&gen, &ap, &b);
                ap.data_mut()[idx] = orig - eps;
                let down = loss(&gen, &ap, &b);
                let fd = (up - down) / (2.0 * eps);
                let an = grads.d_main.data()[idx];
                assert!((an - fd).abs() < 1e-5, "{s} main {idx}: {an} vs {fd}");
            }
            for idx in 0..b.len() {
                let mut bp = b.clone();
                let orig = bp.data()[idx];
                bp.data_mut()[idx] = orig + eps;
                let up = loss(&gen, &a, &bp);
                bp.data_mut()[idx] = orig - eps;
                let down = loss(&gen, &a, &bp);
                let fd = (up - down) / (2.0 * eps);
                let an = grads.d_aux.data()[idx];
                assert!((an - fd).abs() < 1e-5, "{s} aux {idx}: {an} vs {fd}");
            }
        }
    }
}
