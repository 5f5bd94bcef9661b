use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::log::{EpochRecord, TrainLog};
use super::model::{ModelConfig, SfdaModel};
use super::train::{batches, MixedInputs};
use crate::error::{Error, Result};
use crate::genericdomain::MixupConfig;
use crate::numerics::{derive_seed, optimizer_step, substream, LossSpec, OptimizerConfig, OptimizerState, ParamGroup};
use crate::synthdata::DomainDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VendorConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    pub label_smoothing: f64,
    /// Set by the experiment layer, not read from config files.
    #[serde(skip)]
    pub mixup: MixupConfig,
    pub model: ModelConfig,
    /// A warning is logged when the final source accuracy is below this.
    pub source_acc_floor: f64,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for VendorConfig {
    fn default() -> Self {
        VendorConfig {
            epochs: 60,
            batch_size: 32,
            optimizer: OptimizerConfig::adam(1e-3),
            label_smoothing: 0.1,
            mixup: MixupConfig::default(),
            model: ModelConfig::default(),
            source_acc_floor: 0.0,
            seed: 0,
        }
    }
}

impl VendorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::config("vendor", "epochs and batch_size must be positive"));
        }
        if !(0.0..1.0).contains(&self.label_smoothing) {
            return Err(Error::config("vendor.label_smoothing", "must lie in [0, 1)"));
        }
        self.optimizer.validate()?;
        self.mixup.validate()?;
        self.model.validate()
    }
}

/// Supervised training on `D_{s_m}` with label-smoothed cross-entropy. The
/// logged source accuracy is the running accuracy on the training batches.
pub fn vendor_train(source: &DomainDataset, cfg: &VendorConfig) -> Result<(SfdaModel, TrainLog)> {
    cfg.validate()?;
    if !source.role.is_source_like() {
        return Err(Error::Role(format!("vendor training on a {} dataset", source.role)));
    }
    if !source.is_labeled() {
        return Err(Error::Role("vendor training needs a fully labelled source".into()));
    }
    let start = Instant::now();
    let labels = source.labels()?;
    let mut model = SfdaModel::init(
        &cfg.model,
        source.payload_kind,
        source.class_count,
        &mut substream(cfg.seed, "vendor/init"),
    )?;
    let inputs = MixedInputs::build(
        source,
        &cfg.mixup,
        model.conv_stem,
        derive_seed(cfg.seed, "vendor/augment"),
    )?;
    let mut shuffle = substream(cfg.seed, "vendor/shuffle");
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut state = OptimizerState::new();
    let mut log = TrainLog::default();

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle);
        let (mut total, mut seen, mut hits) = (0.0, 0usize, 0usize);
        for idx in batches(&order, cfg.batch_size) {
            let y: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
            let loss = LossSpec::CrossEntropy {
                labels: &y,
                smoothing: cfg.label_smoothing,
            };
            let rec = inputs.grad(&model.net, idx, &loss)?;
            optimizer_step(
                &mut model.net.params_mut(ParamGroup::All),
                &rec.grads,
                &mut state,
                &cfg.optimizer,
            )?;
            total += rec.loss * idx.len() as f64;
            hits += rec.predictions.iter().zip(&y).filter(|(p, t)| p == t).count();
            seen += idx.len();
        }
        log.push(EpochRecord {
            epoch,
            loss_total: total / seen as f64,
            src_acc: Some(hits as f64 / seen as f64),
            ..Default::default()
        })?;
    }
    if let Some(acc) = log.last().and_then(|r| r.src_acc) {
        if acc < cfg.source_acc_floor {
            log.warnings.push(format!(
                "source accuracy {acc:.4} below floor {:.4}",
                cfg.source_acc_floor
            ));
        }
    }
    log.wall_time = start.elapsed();
    Ok((model, log))
}
