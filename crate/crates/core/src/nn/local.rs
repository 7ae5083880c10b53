use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Width-3 learnable convolution over the feature axis, zero-padded, no bias.
///
/// `out[p] = k0 x[p-1] + k1 x[p] + k2 x[p+1]`, mixing each feature with its
/// immediate neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAttention {
    pub kernel: Tensor,
}

impl LocalAttention {
    pub fn seeded<R: Rng>(rng: &mut R) -> Self {
        let bound = 1.0 / 3f64.sqrt();
        LocalAttention {
            kernel: Tensor::vector((0..3).map(|_| rng.random_range(-bound..bound)).collect()),
        }
    }

    pub fn from_kernel(kernel: [f64; 3]) -> Self {
        LocalAttention {
            kernel: Tensor::vector(kernel.to_vec()),
        }
    }

    /// The identity kernel `[0, 1, 0]`.
    pub fn identity() -> Self {
        Self::from_kernel([0.0, 1.0, 0.0])
    }

    pub fn from_tensor(kernel: Tensor) -> Result<Self> {
        if kernel.shape() != [3] {
            return Err(Error::InvalidConfig(format!(
                "local attention kernel must have 3 taps, got shape {:?}",
                kernel.shape()
            )));
        }
        Ok(LocalAttention { kernel })
    }

    /// `x (batch, d) -> (batch, d)`.
    pub fn forward(&self, x: &Tensor) -> Tensor {
        let (batch, d) = (x.rows(), x.cols());
        let k = self.kernel.data();
        let mut out = Tensor::zeros(&[batch, d]);
        for i in 0..batch {
            let xr = x.row(i);
            let or = out.row_mut(i);
            for p in 0..d {
                let mut acc = k[1] * xr[p];
                if p > 0 {
                    acc += k[0] * xr[p - 1];
                }
                if p + 1 < d {
                    acc += k[2] * xr[p + 1];
                }
                or[p] = acc;
            }
        }
        out
    }

    /// Backward: returns `(d_kernel, d_x)`.
    ///
    /// `d_x[q] = k0 g[q+1] + k1 g[q] + k2 g[q-1]`;
    /// `d_k[j] = sum over rows and positions of g[p] * x[p+j-1]`.
    pub fn backward(&self, x: &Tensor, d_out: &Tensor) -> (Tensor, Tensor) {
        assert_eq!(x.shape(), d_out.shape(), "local backward shapes");
        let (batch, d) = (x.rows(), x.cols());
        let k = self.kernel.data();
        let mut d_kernel = Tensor::zeros(&[3]);
        let mut d_x = Tensor::zeros(&[batch, d]);
        for i in 0..batch {
            let xr = x.row(i);
            let gr = d_out.row(i);
            for p in 0..d {
                let g = gr[p];
                if p > 0 {
                    d_kernel.data_mut()[0] += g * xr[p - 1];
                }
                d_kernel.data_mut()[1] += g * xr[p];
                if p + 1 < d {
                    d_kernel.data_mut()[2] += g * xr[p + 1];
                }
            }
            let dr = d_x.row_mut(i);
            for q in 0..d {
                let mut acc = k[1] * gr[q];
                if q + 1 < d {
                    acc += k[0] * gr[q + 1];
                }
                if q > 0 {
                    acc += k[2] * gr[q - 1];
                }
                dr[q] = acc;
            }
        }
        (d_kernel, d_x)
    }
}
