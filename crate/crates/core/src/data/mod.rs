//! Embedding datasets: record types, binary and CSV storage, class-balanced
//! sampling, two-view pairing, and a seeded toy encoder.

pub mod binio;
pub mod csvio;
pub mod encoder;
pub mod pair;
pub mod record;
pub mod sample;
pub mod synthetic;

pub use binio::{load_embeddings, load_embeddings_binary, save_embeddings_binary};
pub use csvio::{load_embeddings_csv, save_embeddings_csv};
pub use encoder::ToyEncoder;
pub use pair::{PairReport, PairedDataset};
pub use record::{EmbeddingDataset, EmbeddingRecord};
pub use sample::{subset, uniform_class_sample};
pub use synthetic::{
    generate_two_view, prototype_predict, SyntheticConfig, TWO_VIEW_RHO, TWO_VIEW_SIGMA,
};
