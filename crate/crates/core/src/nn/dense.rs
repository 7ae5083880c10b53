use rand::Rng;

use crate::nn::linalg::{col_sum, matmul, matmul_nt, matmul_tn};
use crate::tensor::Tensor;

/// Fully connected layer `y = x W^T + b` with weight shape `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weight: Tensor,
    pub bias: Tensor,
}

/// Gradients of a dense layer for one backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseGradients {
    pub weight: Tensor,
    pub bias: Tensor,
    pub input: Tensor,
}

impl DenseLayer {
    /// Uniform init in `(-1/sqrt(in), 1/sqrt(in))`; weight rows first, then bias.
    pub fn seeded<R: Rng>(out_dim: usize, in_dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let weight = Tensor::from_vec(
            &[out_dim, in_dim],
            (0..out_dim * in_dim).map(|_| rng.random_range(-bound..bound)).collect(),
        )
        .expect("sized from dims");
        let bias = Tensor::vector((0..out_dim).map(|_| rng.random_range(-bound..bound)).collect());
        DenseLayer { weight, bias }
    }

    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        DenseLayer {
            weight: Tensor::zeros(&[out_dim, in_dim]),
            bias: Tensor::zeros(&[out_dim]),
        }
    }

    /// Square identity map with zero bias.
    pub fn identity(dim: usize) -> Self {
        let mut weight = Tensor::zeros(&[dim, dim]);
        for i in 0..dim {
            weight.row_mut(i)[i] = 1.0;
        }
        DenseLayer {
            weight,
            bias: Tensor::zeros(&[dim]),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.rows()
    }

    /// `x (batch, in) -> (batch, out)`.
    pub fn forward(&self, x: &Tensor) -> Tensor {
        let mut y = matmul_nt(x, &self.weight);
        let b = self.bias.data();
        for i in 0..y.rows() {
            let row = y.row_mut(i);
            for (v, &bv) in row.iter_mut().zip(b) {
                *v += bv;
            }
        }
        y
    }

    /// Backward for `y = x W^T + b`: `dW = dy^T x`, `db = col_sum(dy)`,
    /// `dx = dy W`.
    pub fn backward(&self, x: &Tensor, d_out: &Tensor) -> DenseGradients {
        DenseGradients {
            weight: matmul_tn(d_out, x),
            bias: col_sum(d_out),
            input: matmul(d_out, &self.weight),
        }
    }
}

/// Element-wise ReLU.
pub fn relu(x: &Tensor) -> Tensor {
    let mut y = x.clone();
    for v in y.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    y
}

/// Backward of ReLU: passes gradient where the forward input was positive.
pub fn relu_backward(x: &Tensor, d_out: &Tensor) -> Tensor {
    assert_eq!(x.shape(), d_out.shape(), "relu_backward shapes");
    let mut dx = d_out.clone();
    for (g, &v) in dx.data_mut().iter_mut().zip(x.data()) {
        if v <= 0.0 {
            *g = 0.0;
        }
    }
    dx
}
