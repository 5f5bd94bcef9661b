//! Vendor (source) and client (target) training wrappers.

pub mod client;
pub mod log;
pub mod model;
pub mod pseudo;
pub mod train;
pub mod vendor;

pub use client::{client_adapt, ClientConfig, EvalProbe};
pub use log::{EpochRecord, TrainLog, TRAIN_LOG_HEADER};
pub use model::{accuracy, dataset_inputs, evaluate, evaluate_with, ModelConfig, SfdaModel};
pub use pseudo::pseudo_label_centroids;
pub use train::MixedInputs;
pub use vendor::{vendor_train, VendorConfig};
