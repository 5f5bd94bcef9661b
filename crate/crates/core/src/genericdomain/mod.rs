//! Generic-domain constructions and the mixup translations built on them.

pub mod augment;
pub mod edges;
pub mod mixup;

pub use augment::{apply_augmentation, AugmentationKind, StyleReference};
pub use edges::{sobel_edges, EdgeParams};
pub use mixup::{
    build_mixup_dataset, edge_mixup, feature_generic, feature_mixup, model_input, FeatureMixupBatch,
    FeatureMixupProducer, MixupConfig, MixupMode, MixupProduct,
};
