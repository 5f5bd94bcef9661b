//! Controlled domain-shift datasets whose target labels exist but are kept
//! in a separate [`EvalLabels`] structure.

pub mod dataset;
pub mod gaussian;
pub mod io;
pub mod moons;
pub mod shapes;
pub mod stem;

pub use dataset::{
    split, split_indices, split_with_eval_labels, DomainDataset, DomainRole, EvalLabels, LabeledSample, PayloadKind,
};
pub use gaussian::{gen_gaussian_domains, GaussianCell, GaussianDomainConfig, GaussianDomainSpec, GeneratedDomain};
pub use moons::{gen_two_moons, rotate_about, MoonsConfig, MOONS_CENTROID};
pub use shapes::{gen_shape_texture, BackgroundTexture, DomainStyle, ShapeTextureConfig};
