//! Input-space (edge) and feature-space mixup towards a generic domain.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::augment::{apply_augmentation, AugmentationKind};
use super::edges::{sobel_edges, EdgeParams};
use crate::error::{Error, Result};
use crate::numerics::mix::{check_lambda, convex_mix, convex_mix_slice, mean_of};
use crate::numerics::{derive_seed, ModelBundle, Tensor};
use crate::synthdata::stem::conv_stem;
use crate::synthdata::{DomainDataset, LabeledSample, PayloadKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixupMode {
    #[default]
    Edge,
    Feature,
}

impl MixupMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MixupMode::Edge => "edge",
            MixupMode::Feature => "feature",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixupConfig {
    pub lambda: f64,
    pub mode: MixupMode,
    /// Number of sub-domains including the original view.
    pub k: usize,
    pub augmentations: Vec<AugmentationKind>,
    pub stop_gradient: bool,
    pub edge: EdgeParams,
}

impl Default for MixupConfig {
    fn default() -> Self {
        MixupConfig {
            lambda: 0.1,
            mode: MixupMode::Edge,
            k: 5,
            augmentations: AugmentationKind::default_set(),
            stop_gradient: true,
            edge: EdgeParams::default(),
        }
    }
}

impl MixupConfig {
    pub fn edge(lambda: f64) -> Self {
        MixupConfig {
            lambda,
            ..Default::default()
        }
    }

    pub fn feature(lambda: f64) -> Self {
        MixupConfig {
            lambda,
            mode: MixupMode::Feature,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        if self.mode == MixupMode::Feature {
            if self.k == 0 {
                return Err(Error::config("mixup.k", "K must be at least 1"));
            }
            if self.augmentations.len() + 1 < self.k {
                return Err(Error::config(
                    "mixup.augmentations",
                    format!(
                        "K={} needs at least {} augmentations, got {}",
                        self.k,
                        self.k - 1,
                        self.augmentations.len()
                    ),
                ));
            }
            for a in &self.augmentations[..self.k - 1] {
                a.validate()?;
            }
        }
        Ok(())
    }
}

/// `x_m = λ·E(x) + (1−λ)·x` with `E` the Sobel edge map.
pub fn edge_mixup(x: &[f64], kind: PayloadKind, lambda: f64, params: &EdgeParams) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        if !kind.is_image() {
            return Err(Error::Kind("edge mixup needs image payloads".into()));
        }
        return Ok(x.to_vec());
    }
    let g = sobel_edges(x, kind, params)?;
    Ok(convex_mix_slice(x, &g, lambda))
}

/// `z_g`: elementwise mean of the sub-domain features.
pub fn feature_generic(z_aug: &[Tensor]) -> Result<Tensor> {
    mean_of(z_aug)
}

pub fn feature_mixup(z: &Tensor, z_g: &Tensor, lambda: f64) -> Result<Tensor> {
    convex_mix(z, z_g, lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMixupBatch {
    pub z: Tensor,
    pub z_aug: Vec<Tensor>,
    pub z_g: Tensor,
    pub z_m: Tensor,
    pub detached: bool,
}

/// Per-batch producer for feature mixup. The augmented inputs are fixed
/// once; their features are recomputed with the current backbone on every
/// call. View 0 is the original sample.
#[derive(Clone, Debug)]
pub struct FeatureMixupProducer {
    pub lambda: f64,
    pub stop_gradient: bool,
    views: Vec<Vec<Vec<f64>>>,
}

impl FeatureMixupProducer {
    pub fn k(&self) -> usize {
        self.views.len()
    }

    pub fn len(&self) -> usize {
        self.views.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Model inputs of view `v` for the given sample indices.
    pub fn view_batch(&self, v: usize, idx: &[usize]) -> Result<Tensor> {
        let rows: Vec<&[f64]> = idx.iter().map(|&i| self.views[v][i].as_slice()).collect();
        Tensor::from_rows(&rows)
    }

    pub fn all_views(&self, idx: &[usize]) -> Result<Vec<Tensor>> {
        (0..self.k()).map(|v| self.view_batch(v, idx)).collect()
    }

    pub fn batch(&self, model: &ModelBundle, idx: &[usize]) -> Result<FeatureMixupBatch> {
        let z = model.features(&self.view_batch(0, idx)?)?;
        let mut z_aug = vec![z.clone()];
        for v in 1..self.k() {
            z_aug.push(model.features(&self.view_batch(v, idx)?)?);
        }
        let z_g = feature_generic(&z_aug)?;
        let z_m = feature_mixup(&z, &z_g, self.lambda)?;
        Ok(FeatureMixupBatch {
            z,
            z_aug,
            z_g,
            z_m,
            detached: self.stop_gradient,
        })
    }
}

pub enum MixupProduct {
    Materialized(DomainDataset),
    Features(FeatureMixupProducer),
}

/// Optional fixed preprocessing applied after augmentation.
pub fn model_input(payload: &[f64], kind: PayloadKind, stem: bool) -> Result<Vec<f64>> {
    match (stem, kind) {
        (false, _) => Ok(payload.to_vec()),
        (
            true,
            PayloadKind::Image {
                height,
                width,
                channels,
            },
        ) => conv_stem(payload, height, width, channels),
        (true, PayloadKind::Vector { .. }) => Err(Error::Kind("conv stem needs image payloads".into())),
    }
}

/// Converts `D` into `D_m`. Edge mode materializes the mixed inputs (raw
/// payloads, before any stem); feature mode returns a producer whose views
/// are already model inputs. `seed` drives the random augmentations.
pub fn build_mixup_dataset(d: &DomainDataset, cfg: &MixupConfig, seed: u64, stem: bool) -> Result<MixupProduct> {
    cfg.validate()?;
    match cfg.mode {
        MixupMode::Edge => {
            if !d.payload_kind.is_image() {
                return Err(Error::Kind("edge mixup needs image payloads".into()));
            }
            let payloads: Vec<Vec<f64>> = d
                .samples
                .par_iter()
                .map(|s| edge_mixup(&s.payload, d.payload_kind, cfg.lambda, &cfg.edge))
                .collect::<Result<_>>()?;
            let samples = payloads
                .into_iter()
                .zip(&d.samples)
                .map(|(payload, s)| LabeledSample {
                    payload,
                    label: s.label,
                })
                .collect();
            Ok(MixupProduct::Materialized(DomainDataset {
                role: d.role.mixup(),
                samples,
                class_count: d.class_count,
                payload_kind: d.payload_kind,
                provenance: format!("{}; edge-mixup lambda={}", d.provenance, cfg.lambda),
            }))
        }
        MixupMode::Feature => {
            let mut views = Vec::with_capacity(cfg.k);
            for v in 0..cfg.k {
                let aug = if v == 0 {
                    &AugmentationKind::Identity
                } else {
                    &cfg.augmentations[v - 1]
                };
                let label = format!("augment/{v}");
                let rows: Vec<Vec<f64>> = d
                    .samples
                    .par_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let s_seed = derive_seed(seed, &format!("{label}/{i}"));
                        let x = apply_augmentation(&s.payload, d.payload_kind, aug, s_seed)?;
                        model_input(&x, d.payload_kind, stem)
                    })
                    .collect::<Result<_>>()?;
                views.push(rows);
            }
            Ok(MixupProduct::Features(FeatureMixupProducer {
                lambda: cfg.lambda,
                stop_gradient: cfg.stop_gradient,
                views,
            }))
        }
    }
}
