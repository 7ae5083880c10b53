use crate::error::{Error, Result};
use crate::nn::linalg::{matmul, matmul_nt, matmul_tn};
use crate::tensor::Tensor;

/// Head layout for multi-head attention over a `d_model` feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttentionConfig {
    pub d_model: usize,
    pub n_heads: usize,
}

impl AttentionConfig {
    pub fn new(d_model: usize, n_heads: usize) -> Result<Self> {
        if d_model == 0 || n_heads == 0 || !d_model.is_multiple_of(n_heads) {
            return Err(Error::InvalidConfig(format!(
                "d_model {d_model} not divisible into {n_heads} heads"
            )));
        }
        Ok(AttentionConfig { d_model, n_heads })
    }

    pub fn d_k(&self) -> usize {
        self.d_model / self.n_heads
    }
}

/// Row-wise numerically stable softmax.
pub fn softmax_rows(x: &Tensor) -> Tensor {
    let mut out = x.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Backward of row softmax: `ds = p * (dp - sum(dp * p))` per row.
pub fn softmax_rows_backward(p: &Tensor, d_p: &Tensor) -> Tensor {
    assert_eq!(p.shape(), d_p.shape(), "softmax backward shapes");
    let mut out = d_p.clone();
    for i in 0..p.rows() {
        let pr = p.row(i);
        let dot: f64 = pr.iter().zip(out.row(i)).map(|(a, b)| a * b).sum();
        let or = out.row_mut(i);
        for (g, &pv) in or.iter_mut().zip(pr) {
            *g = pv * (*g - dot);
        }
    }
    out
}

/// Scaled dot-product attention `softmax(Q K^T / sqrt(d_k)) V`.
///
/// `q (n_q, d_k)`, `k (n_k, d_k)`, `v (n_k, d_v)`. Returns the output
/// `(n_q, d_v)` and the attention weights `(n_q, n_k)`.
pub fn scaled_dot_attention(q: &Tensor, k: &Tensor, v: &Tensor) -> (Tensor, Tensor) {
    assert_eq!(q.cols(), k.cols(), "q/k feature dims");
    assert_eq!(k.rows(), v.rows(), "k/v sequence lengths");
    let scale = 1.0 / (q.cols() as f64).sqrt();
    let mut scores = matmul_nt(q, k);
    for s in scores.data_mut() {
        *s *= scale;
    }
    let weights = softmax_rows(&scores);
    let out = matmul(&weights, v);
    (out, weights)
}

/// Backward of [`scaled_dot_attention`] given the cached weights.
///
/// Returns `(dq, dk, dv)` for upstream gradient `d_out (n_q, d_v)`.
pub fn scaled_dot_attention_backward(
    q: &Tensor,
    k: &Tensor,
    v: &Tensor,
    weights: &Tensor,
    d_out: &Tensor,
) -> (Tensor, Tensor, Tensor) {
    let scale = 1.0 / (q.cols() as f64).sqrt();
    let d_v = matmul_tn(weights, d_out);
    let d_weights = matmul_nt(d_out, v);
    let mut d_scores = softmax_rows_backward(weights, &d_weights);
    for s in d_scores.data_mut() {
        *s *= scale;
    }
    let d_q = matmul(&d_scores, k);
    let d_k = matmul_tn(&d_scores, q);
    (d_q, d_k, d_v)
}

/// Cache of a batched single-token multi-head pass, for the backward step.
#[derive(Debug, Clone)]
pub struct MultiheadCache {
    /// Attention weight per (sample, head); always 1 for one-token sequences.
    pub weights: Tensor,
}

/// Multi-head attention where every sample is a one-token sequence.
///
/// `q`, `k`, `v` are `(batch, d_model)`; each head attends over its own
/// `d_k` slice. With a single key the softmax weight is exactly 1, so the
/// output equals `v` value for value, but the full score/softmax chain is
/// still evaluated so gradients flow through the same formulas as the
/// general case.
pub fn multihead_single_token(
    q: &Tensor,
    k: &Tensor,
    v: &Tensor,
    cfg: &AttentionConfig,
) -> (Tensor, MultiheadCache) {
    let batch = q.rows();
    assert_eq!(q.shape(), k.shape(), "q/k shapes");
    assert_eq!(q.shape(), v.shape(), "q/v shapes");
    assert_eq!(q.cols(), cfg.d_model, "d_model");
    let dk = cfg.d_k();
    let scale = 1.0 / (dk as f64).sqrt();
    let mut out = Tensor::zeros(&[batch, cfg.d_model]);
    let mut weights = Tensor::zeros(&[batch, cfg.n_heads]);
    for i in 0..batch {
        let (qr, kr, vr) = (q.row(i), k.row(i), v.row(i));
        for h in 0..cfg.n_heads {
            let lo = h * dk;
            let score: f64 = (0..dk).map(|j| qr[lo + j] * kr[lo + j]).sum::<f64>() * scale;
            // Stable softmax over the one-logit row; always exactly 1.
            let max = score;
            let p = (score - max).exp();
            weights.row_mut(i)[h] = p;
            let or = out.row_mut(i);
            for j in 0..dk {
                or[lo + j] = p * vr[lo + j];
            }
        }
    }
    (out, MultiheadCache { weights })
}

/// Backward of [`multihead_single_token`]; returns `(dq, dk, dv)`.
pub fn multihead_single_token_backward(
    q: &Tensor,
    k: &Tensor,
    v: &Tensor,
    cache: &MultiheadCache,
    d_out: &Tensor,
    cfg: &AttentionConfig,
) -> (Tensor, Tensor, Tensor) {
    let batch = q.rows();
    let dk = cfg.d_k();
    let scale = 1.0 / (dk as f64).sqrt();
    let mut d_q = Tensor::zeros(&[batch, cfg.d_model]);
    let mut d_k = Tensor::zeros(&[batch, cfg.d_model]);
    let mut d_v = Tensor::zeros(&[batch, cfg.d_model]);
    for i in 0..batch {
        for h in 0..cfg.n_heads {
            let lo = h * dk;
            let p = cache.weights.row(i)[h];
            let g = d_out.row(i);
            let vr = v.row(i);
            // dv = p * g; dp = g . v; ds = p * (dp - dp * p), zero when p = 1.
            let mut dp = 0.0;
            for j in 0..dk {
                d_v.row_mut(i)[lo + j] = p * g[lo + j];
                dp += g[lo + j] * vr[lo + j];
            }
            let ds = p * (dp - dp * p) * scale;
            let (qr, kr) = (q.row(i), k.row(i));
            for j in 0..dk {
                d_q.row_mut(i)[lo + j] = ds * kr[lo + j];
                d_k.row_mut(i)[lo + j] = ds * qr[lo + j];
            }
        }
    }
    (d_q, d_k, d_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Tensor {
        let data = (0..rows * cols).map(|_| rng.random_range(-3.0..3.0)).collect();
        Tensor::from_vec(&[rows, cols], data).unwrap()
    }

    #[test]
    fn softmax_rows_are_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let (rows, cols) = (rng.random_range(1..5), rng.random_range(1..7));
            let x = random(&mut rng, rows, cols);
            let p = softmax_rows(&x);
            for i in 0..p.rows() {
                let sum: f64 = p.row(i).iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
                assert!(p.row(i).iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn softmax_handles_extreme_logits() {
        let x = Tensor::from_vec(&[1, 3], vec![1000.0, -1000.0, 999.0]).unwrap();
        let p = softmax_rows(&x);
        assert!(p.data().iter().all(|v| v.is_finite()));
        let sum: f64 = p.data().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_key_returns_value_row_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let nq = rng.random_range(1..4);
            let q = random(&mut rng, nq, 5);
            let k = random(&mut rng, 1, 5);
            let v = random(&mut rng, 1, 6);
            let (out, w) = scaled_dot_attention(&q, &k, &v);
            for i in 0..out.rows() {
                assert_eq!(w.at(i, 0), 1.0);
                assert_eq!(out.row(i), v.row(0));
            }
        }
    }

    #[test]
    fn output_stays_in_value_convex_hull() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let (nq, nk, d) = (
                rng.random_range(1..4),
                rng.random_range(1..6),
                rng.random_range(1..5),
            );
            let q = random(&mut rng, nq, d);
            let k = random(&mut rng, nk, d);
            let v = random(&mut rng, nk, d);
            let (out, _) = scaled_dot_attention(&q, &k, &v);
            for j in 0..d {
                let col: Vec<f64> = (0..nk).map(|r| v.at(r, j)).collect();
                let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                for i in 0..nq {
                    let o = out.at(i, j);
                    assert!(o >= lo - 1e-12 && o <= hi + 1e-12);
                }
            }
        }
    }

    #[test]
    fn general_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let q = random(&mut rng, 2, 3);
        let k = random(&mut rng, 4, 3);
        let v = random(&mut rng, 4, 3);
        let (_, w) = scaled_dot_attention(&q, &k, &v);
        let d_out = random(&mut rng, 2, 3);
        let (dq, dk, dv) = scaled_dot_attention_backward(&q, &k, &v, &w, &d_out);
        let loss = |q: &Tensor, k: &Tensor, v: &Tensor| {
            let (o, _) = scaled_dot_attention(q, k, v);
            o.data().iter().zip(d_out.data()).map(|(a, b)| a * b).sum::<f64>()
        };
        let eps = 1e-6;
        let check = |t: &Tensor, grad: &Tensor, which: usize| {
            for idx in 0..t.len() {
                let mut tq = q.clone();
                let mut tk = k.clone();
                let mut tv = v.clone();
                let target = match which {
                    0 => &mut tq,
                    1 => &mut tk,
                    _ => &mut tv,
                };
                let orig = t.data()[idx];
                target.data_mut()[idx] = orig + eps;
                let up = loss(&tq, &tk, &tv);
                let target = match which {
                    0 => &mut tq,
                    1 => &mut tk,
                    _ => &mut tv,
                };
                target.data_mut()[idx] = orig - eps;
                let down = loss(&tq, &tk, &tv);
                let fd = (up - down) / (2.0 * eps);
                assert!(
                    (grad.data()[idx] - fd).abs() < 1e-5,
                    "tensor {which} idx {idx}: {} vs {fd}",
                    grad.data()[idx]
                );
            }
        };
        check(&q, &dq, 0);
        check(&k, &dk, 1);
        check(&v, &dv, 2);
    }

    #[test]
    fn single_token_multihead_passes_values_through() {
        let cfg = AttentionConfig::new(8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random(&mut rng, 3, 8);
        let k = random(&mut rng, 3, 8);
        let v = random(&mut rng, 3, 8);
        let (out, cache) = multihead_single_token(&q, &k, &v, &cfg);
        assert_eq!(out, v);
        assert!(cache.weights.data().iter().all(|&p| p == 1.0));
        let d_out = random(&mut rng, 3, 8);
        let (dq, dk, dv) = multihead_single_token_backward(&q, &k, &v, &cache, &d_out, &cfg);
        assert_eq!(dv, d_out);
        assert!(dq.data().iter().all(|&g| g == 0.0));
        assert!(dk.data().iter().all(|&g| g == 0.0));
    }
}
