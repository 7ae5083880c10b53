//! The fusion network and its training loop, with every gradient derived and
//! applied by hand: dense layers, scaled dot-product attention, the key
//! generator, width-3 local attention, summed cross-entropy, and Adam.

pub mod adam;
pub mod attention;
pub mod checkpoint;
pub mod dense;
pub mod keygen;
mod linalg;
pub mod local;
pub mod loss;
pub mod model;
pub mod train;

pub use adam::{AdamConfig, AdamState};
pub use attention::{
    multihead_single_token, multihead_single_token_backward, scaled_dot_attention,
    scaled_dot_attention_backward, softmax_rows, softmax_rows_backward, AttentionConfig,
    MultiheadCache,
};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use dense::{relu, relu_backward, DenseGradients, DenseLayer};
pub use keygen::{KeyGenCache, KeyGenGradients, KeyGenStrategy, KeyGenerator};
pub use local::LocalAttention;
pub use loss::{cross_entropy_grad, cross_entropy_sum, predict};
pub use model::{ForwardCache, FusionConfig, FusionGradients, FusionModel};
pub use train::{train_fusion, TrainConfig, TrainResult};
