//! Generic-domain mixup laboratory.
//!
//! The crate builds mixup domains between original samples and their
//! generic-domain counterparts (edge maps in input space, augmented
//! sub-domain feature means in feature space), trains vendor/client
//! source-free adaptation pipelines on them, and measures the
//! transferability/discriminability trade-off with trained domain and task
//! classifiers. `theoremlab` checks the mixup H-divergence inequality by
//! Monte-Carlo on Gaussian setups.

pub mod error;
pub mod experiment;
pub mod genericdomain;
pub mod metrics;
pub mod numerics;
pub mod sfda;
pub mod synthdata;
pub mod theoremlab;

pub use error::{Error, Result};
