use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig {
            lr,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad adam hyperparameters {self:?}")))
        }
    }
}

/// Per-parameter first and second moment estimates with bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    cfg: AdamConfig,
    t: u64,
    m: Vec<Tensor>,
    v: Vec<Tensor>,
}

impl AdamState {
    /// Fresh state for the given parameter list.
    pub fn for_params(cfg: AdamConfig, params: &[&Tensor]) -> Result<Self> {
        cfg.validate()?;
        Ok(AdamState {
            cfg,
            t: 0,
            m: params.iter().map(|p| Tensor::zeros_like(p)).collect(),
            v: params.iter().map(|p| Tensor::zeros_like(p)).collect(),
        })
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One update:
    /// `m = b1 m + (1-b1) g`, `v = b2 v + (1-b2) g^2`, then
    /// `theta -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)`.
    pub fn step(&mut self, params: &mut [&mut Tensor], grads: &[Tensor]) {
        assert_eq!(params.len(), self.m.len(), "adam param count");
        assert_eq!(grads.len(), self.m.len(), "adam grad count");
        self.t += 1;
        let b1 = self.cfg.beta1;
        let b2 = self.cfg.beta2;
        let c1 = 1.0 - b1.powi(self.t as i32);
        let c2 = 1.0 - b2.powi(self.t as i32);
        for ((param, grad), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            assert_eq!(param.shape(), grad.shape(), "adam shapes");
            let pd = param.data_mut();
            let gd = grad.data();
            let md = m.data_mut();
            let vd = v.data_mut();
            for i in 0..pd.len() {
                let g = gd[i];
                md[i] = b1 * md[i] + (1.0 - b1) * g;
                vd[i] = b2 * vd[i] + (1.0 - b2) * g * g;
                let m_hat = md[i] / c1;
                let v_hat = vd[i] / c2;
                pd[i] -= self.cfg.lr * m_hat / (v_hat.sqrt() + self.cfg.eps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_has_closed_form() {
        // At t=1 the bias corrections cancel the decay exactly, so the step is
        // lr * g / (|g| + eps).
        let cfg = AdamConfig::default();
        let mut theta = Tensor::vector(vec![1.0, -2.0, 0.5]);
        let grads = vec![Tensor::vector(vec![0.3, -0.7, 0.0])];
        let mut state = AdamState::for_params(cfg, &[&theta]).unwrap();
        let before = theta.clone();
        state.step(&mut [&mut theta], &grads);
        for i in 0..3 {
            let g: f64 = grads[0].data()[i];
            let expected = before.data()[i] - cfg.lr * g / (g.abs() + cfg.eps);
            assert!((theta.data()[i] - expected).abs() < 1e-15, "elem {i}");
        }
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn converges_on_a_quadratic() {
        let cfg = AdamConfig::with_lr(0.1);
        let mut theta = Tensor::vector(vec![-4.0]);
        let mut state = AdamState::for_params(cfg, &[&theta]).unwrap();
        for _ in 0..2000 {
            let g = 2.0 * (theta.data()[0] - 3.0);
            let grads = vec![Tensor::vector(vec![g])];
            state.step(&mut [&mut theta], &grads);
        }
        assert!((theta.data()[0] - 3.0).abs() < 1e-3, "theta {}", theta.data()[0]);
    }

    #[test]
    fn deterministic_across_runs() {
        let cfg = AdamConfig::default();
        let run = || {
            let mut theta = Tensor::vector(vec![0.1, 0.2]);
            let mut state = AdamState::for_params(cfg, &[&theta]).unwrap();
            for i in 0..50 {
                let grads = vec![Tensor::vector(vec![(i as f64).sin(), 0.5])];
                state.step(&mut [&mut theta], &grads);
            }
            theta
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let theta = Tensor::vector(vec![0.0]);
        let bad = AdamConfig {
            beta1: 1.0,
            ..Default::default()
        };
        assert!(AdamState::for_params(bad, &[&theta]).is_err());
        let bad = AdamConfig {
            lr: 0.0,
            ..Default::default()
        };
        assert!(AdamState::for_params(bad, &[&theta]).is_err());
    }
}
