#![allow(dead_code)]

use genmix::experiment::{BenchmarkSpec, ExperimentConfig};
use genmix::synthdata::{gen_shape_texture, DomainDataset, EvalLabels, ShapeTextureConfig};

/// Small shape-texture draw for fast end-to-end checks.
pub fn small_shapes(seed: u64) -> (DomainDataset, DomainDataset, EvalLabels) {
    gen_shape_texture(&ShapeTextureConfig {
        samples_per_class: 12,
        seed,
        ..ShapeTextureConfig::default()
    })
    .unwrap()
}

/// Experiment config with a small benchmark and short training.
pub fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.benchmark = BenchmarkSpec::ShapeTexture(ShapeTextureConfig {
        samples_per_class: 12,
        ..ShapeTextureConfig::default()
    });
    cfg.vendor.epochs = 3;
    cfg.client.epochs = 2;
    cfg.metrics.epochs = 50;
    cfg
}

pub fn bits(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| v.to_bits()).collect()
}
