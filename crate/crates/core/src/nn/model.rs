use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::label::NUM_CLASSES;
use crate::nn::attention::{
    multihead_single_token, multihead_single_token_backward, AttentionConfig, MultiheadCache,
};
use crate::nn::dense::{relu, relu_backward, DenseLayer};
use crate::nn::keygen::{KeyGenStrategy, KeyGenerator};
use crate::nn::local::LocalAttention;
use crate::tensor::Tensor;

/// Architecture of the fusion network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FusionConfig {
    pub dim: usize,
    pub n_heads: usize,
    pub strategy: KeyGenStrategy,
}

impl FusionConfig {
    pub fn attention(&self) -> Result<AttentionConfig> {
        AttentionConfig::new(self.dim, self.n_heads)
    }
}

/// Attention fusion network over a pair of view embeddings.
///
/// The main view supplies the query and the residual path; the key generator
/// folds both views into the fused feature that supplies keys and values.
/// Attention output is projected, mixed by a width-3 local attention, added
/// back onto the main view, and classified by a two-layer head.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionModel {
    attention: AttentionConfig,
    strategy: KeyGenStrategy,
    pub keygen: KeyGenerator,
    pub q_proj: DenseLayer,
    pub k_proj: DenseLayer,
    pub v_proj: DenseLayer,
    pub out_proj: DenseLayer,
    pub local: LocalAttention,
    pub cls_hidden: DenseLayer,
    pub cls_out: DenseLayer,
}

/// Forward activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub f_main: Tensor,
    pub fused: Tensor,
    kg_cache: crate::nn::keygen::KeyGenCache,
    q: Tensor,
    k: Tensor,
    v: Tensor,
    mh_cache: MultiheadCache,
    att: Tensor,
    proj: Tensor,
    /// Attention block output after the skip connection.
    pub block: Tensor,
    hidden_lin: Tensor,
    hidden: Tensor,
    pub logits: Tensor,
}

/// Parameter gradients in [`FusionModel::param_names`] order, plus the
/// gradients reaching the two input embeddings.
#[derive(Debug, Clone)]
pub struct FusionGradients {
    pub params: Vec<Tensor>,
    pub d_main: Tensor,
    pub d_aux: Tensor,
}

impl FusionModel {
    /// Seeded init; parameters are drawn in [`Self::param_names`] order from
    /// one ChaCha8 stream.
    pub fn seeded(cfg: &FusionConfig, seed: u64) -> Result<Self> {
        Self::seeded_with(cfg, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Seeded init drawing from a caller-owned stream, so later draws (batch
    /// shuffling, for instance) continue the same sequence.
    pub fn seeded_with<R: rand::Rng>(cfg: &FusionConfig, rng: &mut R) -> Result<Self> {
        let attention = cfg.attention()?;
        let d = cfg.dim;
        let keygen = KeyGenerator::seeded(cfg.strategy, d, rng);
        let q_proj = DenseLayer::seeded(d, d, rng);
        let k_proj = DenseLayer::seeded(d, d, rng);
        let v_proj = DenseLayer::seeded(d, d, rng);
        let out_proj = DenseLayer::seeded(d, d, rng);
        let local = LocalAttention::seeded(rng);
        let cls_hidden = DenseLayer::seeded(d, d, rng);
        let cls_out = DenseLayer::seeded(NUM_CLASSES, d, rng);
        Ok(FusionModel {
            attention,
            strategy: cfg.strategy,
            keygen,
            q_proj,
            k_proj,
            v_proj,
            out_proj,
            local,
            cls_hidden,
            cls_out,
        })
    }

    pub fn config(&self) -> FusionConfig {
        FusionConfig {
            dim: self.attention.d_model,
            n_heads: self.attention.n_heads,
            strategy: self.strategy,
        }
    }

    pub fn dim(&self) -> usize {
        self.attention.d_model
    }

    pub fn strategy(&self) -> KeyGenStrategy {
        self.strategy
    }

    /// `f_main, f_aux (batch, d) -> logits (batch, 8)` with the full cache.
    pub fn forward(&self, f_main: &Tensor, f_aux: &Tensor) -> ForwardCache {
        let (fused, kg_cache) = self.keygen.forward(f_main, f_aux);
        let q = self.q_proj.forward(f_main);
        let k = self.k_proj.forward(&fused);
        let v = self.v_proj.forward(&fused);
        let (att, mh_cache) = multihead_single_token(&q, &k, &v, &self.attention);
        let proj = self.out_proj.forward(&att);
        let loc = self.local.forward(&proj);
        let mut block = loc;
        for (b, &m) in block.data_mut().iter_mut().zip(f_main.data()) {
            *b += m;
        }
        let hidden_lin = self.cls_hidden.forward(&block);
        let hidden = relu(&hidden_lin);
        let logits = self.cls_out.forward(&hidden);
        ForwardCache {
            f_main: f_main.clone(),
            fused,
            kg_cache,
            q,
            k,
            v,
            mh_cache,
            att,
            proj,
            block,
            hidden_lin,
            hidden,
            logits,
        }
    }

    /// Forward without keeping activations.
    pub fn logits(&self, f_main: &Tensor, f_aux: &Tensor) -> Tensor {
        self.forward(f_main, f_aux).logits
    }

    /// Backward from `d_logits` through every parameter and both inputs.
    pub fn backward(&self, cache: &ForwardCache, d_logits: &Tensor) -> FusionGradients {
        let g_out = self.cls_out.backward(&cache.hidden, d_logits);
        let d_hidden_lin = relu_backward(&cache.hidden_lin, &g_out.input);
        let g_hidden = self.cls_hidden.backward(&cache.block, &d_hidden_lin);
        // The skip connection feeds d_block to both the local path and f_main.
        let d_block = g_hidden.input;
        let (d_kernel, d_proj) = self.local.backward(&cache.proj, &d_block);
        let g_proj = self.out_proj.backward(&cache.att, &d_proj);
        let (d_q, d_k, d_v) = multihead_single_token_backward(
            &cache.q,
            &cache.k,
            &cache.v,
            &cache.mh_cache,
            &g_proj.input,
            &self.attention,
        );
        let g_q = self.q_proj.backward(&cache.f_main, &d_q);
        let g_k = self.k_proj.backward(&cache.fused, &d_k);
        let g_v = self.v_proj.backward(&cache.fused, &d_v);
        let mut d_fused = g_k.input;
        for (a, &b) in d_fused.data_mut().iter_mut().zip(g_v.input.data()) {
            *a += b;
        }
        let g_kg = self.keygen.backward(&cache.kg_cache, &d_fused);

        let mut d_main = d_block;
        for ((a, &b), &c) in d_main
            .data_mut()
            .iter_mut()
            .zip(g_q.input.data())
            .zip(g_kg.d_main.data())
        {
            *a += b + c;
        }

        let mut params = Vec::new();
        for (w, b) in g_kg.weights.into_iter().zip(g_kg.biases) {
            params.push(w);
            params.push(b);
        }
        params.push(g_q.weight);
        params.push(g_q.bias);
        params.push(g_k.weight);
        params.push(g_k.bias);
        params.push(g_v.weight);
        params.push(g_v.bias);
        params.push(g_proj.weight);
        params.push(g_proj.bias);
        params.push(d_kernel);
        params.push(g_hidden.weight);
        params.push(g_hidden.bias);
        params.push(g_out.weight);
        params.push(g_out.bias);
        FusionGradients {
            params,
            d_main,
            d_aux: g_kg.d_aux,
        }
    }

    /// Summed cross-entropy and all gradients for one labeled batch.
    pub fn loss_and_grads(
        &self,
        f_main: &Tensor,
        f_aux: &Tensor,
        labels: &[usize],
    ) -> (f64, FusionGradients) {
        let cache = self.forward(f_main, f_aux);
        let (loss, d_logits) = crate::nn::loss::cross_entropy_grad(&cache.logits, labels);
        (loss, self.backward(&cache, &d_logits))
    }

    /// Canonical parameter names, defining storage and update order.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for i in 0..self.keygen.layers().len() {
            names.push(format!("keygen.{i}.weight"));
            names.push(format!("keygen.{i}.bias"));
        }
        for p in ["q_proj", "k_proj", "v_proj", "out_proj"] {
            names.push(format!("{p}.weight"));
            names.push(format!("{p}.bias"));
        }
        names.push("local.kernel".to_string());
        for p in ["classifier.hidden", "classifier.output"] {
            names.push(format!("{p}.weight"));
            names.push(format!("{p}.bias"));
        }
        names
    }

    /// Parameters in [`Self::param_names`] order.
    pub fn params(&self) -> Vec<&Tensor> {
        let mut out = Vec::new();
        for layer in self.keygen.layers() {
            out.push(&layer.weight);
            out.push(&layer.bias);
        }
        for layer in [&self.q_proj, &self.k_proj, &self.v_proj, &self.out_proj] {
            out.push(&layer.weight);
            out.push(&layer.bias);
        }
        out.push(&self.local.kernel);
        for layer in [&self.cls_hidden, &self.cls_out] {
            out.push(&layer.weight);
            out.push(&layer.bias);
        }
        out
    }

    /// Mutable parameters in [`Self::param_names`] order.
    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::new();
        for layer in self.keygen.layers_mut() {
            out.push(&mut layer.weight);
            out.push(&mut layer.bias);
        }
        for layer in [
            &mut self.q_proj,
            &mut self.k_proj,
            &mut self.v_proj,
            &mut self.out_proj,
        ] {
            out.push(&mut layer.weight);
            out.push(&mut layer.bias);
        }
        out.push(&mut self.local.kernel);
        for layer in [&mut self.cls_hidden, &mut self.cls_out] {
            out.push(&mut layer.weight);
            out.push(&mut layer.bias);
        }
        out
    }

    /// Rebuilds a model from its parts, revalidating the key-generator shape.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        cfg: &FusionConfig,
        keygen_layers: Vec<DenseLayer>,
        q_proj: DenseLayer,
        k_proj: DenseLayer,
        v_proj: DenseLayer,
        out_proj: DenseLayer,
        local: LocalAttention,
        cls_hidden: DenseLayer,
        cls_out: DenseLayer,
    ) -> Result<Self> {
        let attention = cfg.attention()?;
        let keygen = KeyGenerator::from_layers(cfg.strategy, cfg.dim, keygen_layers)?;
        Ok(FusionModel {
            attention,
            strategy: cfg.strategy,
            keygen,
            q_proj,
            k_proj,
            v_proj,
            out_proj,
            local,
            cls_hidden,
            cls_out,
        })
    }
}
