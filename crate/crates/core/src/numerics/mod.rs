//! Dense tensors, a small feed-forward network with exact reverse-mode
//! gradients, optimizers, seeded random streams and binary checkpoints.
//!
//! Everything here is single-threaded and deterministic: identical inputs
//! give byte-identical outputs.

pub mod checkpoint;
pub mod grad;
pub mod loss;
pub mod mix;
pub mod mlp;
pub mod optim;
pub mod rng;
pub mod tensor;

pub use grad::{mlp_value_and_grad, value_and_grad, FeatureMixing, GenericBranch, GradientRecord};
pub use loss::{softmax_rows, LossSpec};
pub use mlp::{Activation, Dense, Mlp, MlpSpec, ModelBundle, ParamGroup};
pub use optim::{optimizer_step, OptimizerConfig, OptimizerState};
pub use rng::{derive_seed, seeded_rng, substream, Rng};
pub use tensor::Tensor;
