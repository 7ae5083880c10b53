use crate::nn::attention::softmax_rows;
use crate::tensor::Tensor;

/// Floor on per-sample log-probabilities so a saturated softmax cannot
/// produce an infinite loss.
const LOG_PROB_FLOOR: f64 = -700.0;

fn log_softmax_at(row: &[f64], target: usize) -> f64 {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum: f64 = row.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
    (row[target] - max - log_sum).max(LOG_PROB_FLOOR)
}

/// Cross-entropy summed over the batch: `L = -sum_i log softmax(z_i)[y_i]`.
pub fn cross_entropy_sum(logits: &Tensor, labels: &[usize]) -> f64 {
    assert_eq!(logits.rows(), labels.len(), "logits/labels batch");
    labels
        .iter()
        .enumerate()
        .map(|(i, &y)| -log_softmax_at(logits.row(i), y))
        .sum()
}

/// Loss plus its gradient `softmax(z) - onehot(y)` per row (no batch mean:
/// the loss is a sum, so the gradient is too).
pub fn cross_entropy_grad(logits: &Tensor, labels: &[usize]) -> (f64, Tensor) {
    let loss = cross_entropy_sum(logits, labels);
    let mut grad = softmax_rows(logits);
    for (i, &y) in labels.iter().enumerate() {
        grad.row_mut(i)[y] -= 1.0;
    }
    (loss, grad)
}

/// Arg-max decision per row, lowest index on exact ties.
pub fn predict(logits: &Tensor) -> Vec<usize> {
    (0..logits.rows())
        .map(|i| {
            let row = logits.row(i);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_logits_cost_ln_num_classes() {
        let logits = Tensor::zeros(&[4, 8]);
        let labels = vec![0, 3, 5, 7];
        let loss = cross_entropy_sum(&logits, &labels);
        let expected = 4.0 * (8f64).ln();
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn perfect_prediction_costs_almost_nothing() {
        let mut logits = Tensor::zeros(&[2, 3]);
        logits.row_mut(0)[1] = 50.0;
        logits.row_mut(1)[2] = 50.0;
        let loss = cross_entropy_sum(&logits, &[1, 2]);
        assert!(loss < 1e-12);
    }

    #[test]
    fn extreme_wrong_logits_stay_finite() {
        let mut logits = Tensor::zeros(&[1, 2]);
        logits.row_mut(0)[0] = 1e4;
        let loss = cross_entropy_sum(&logits, &[1]);
        assert!(loss.is_finite());
        assert!(loss <= -LOG_PROB_FLOOR + 1.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut logits = Tensor::from_vec(
            &[3, 4],
            (0..12).map(|_| rng.random_range(-2.0..2.0)).collect(),
        )
        .unwrap();
        let labels = vec![1, 0, 3];
        let (_, grad) = cross_entropy_grad(&logits, &labels);
        let eps = 1e-6;
        for idx in 0..logits.len() {
            let orig = logits.data()[idx];
            logits.data_mut()[idx] = orig + eps;
            let up = cross_entropy_sum(&logits, &labels);
            logits.data_mut()[idx] = orig - eps;
            let down = cross_entropy_sum(&logits, &labels);
            logits.data_mut()[idx] = orig;
            let fd = (up - down) / (2.0 * eps);
            assert!((grad.data()[idx] - fd).abs() < 1e-6, "logit {idx}");
        }
    }

    #[test]
    fn loss_scales_with_batch_not_mean() {
        // Duplicating the batch must double the summed loss.
        let logits = Tensor::from_vec(&[1, 3], vec![0.2, -0.4, 1.0]).unwrap();
        let single = cross_entropy_sum(&logits, &[2]);
        let doubled = Tensor::from_vec(&[2, 3], vec![0.2, -0.4, 1.0, 0.2, -0.4, 1.0]).unwrap();
        let double = cross_entropy_sum(&doubled, &[2, 2]);
        assert!((double - 2.0 * single).abs() < 1e-12);
    }

    #[test]
    fn predict_breaks_ties_low() {
        let logits = Tensor::from_vec(&[2, 3], vec![1.0, 1.0, 0.0, 0.0, 2.0, 2.0]).unwrap();
        assert_eq!(predict(&logits), vec![0, 1]);
    }
}
