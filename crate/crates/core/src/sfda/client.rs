use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::log::{EpochRecord, TrainLog};
use super::model::SfdaModel;
use super::pseudo::pseudo_label_centroids;
use super::train::{batches, MixedInputs};
use crate::error::{Error, Result};
use crate::genericdomain::MixupConfig;
use crate::numerics::{
    derive_seed, optimizer_step, softmax_rows, substream, LossSpec, OptimizerConfig, OptimizerState, ParamGroup,
};
use crate::synthdata::DomainDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClientConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    /// Set by the experiment layer, not read from config files.
    #[serde(skip)]
    pub mixup: MixupConfig,
    /// Pseudo-labels are recomputed every this many epochs.
    pub refresh_interval: usize,
    pub w_ent: f64,
    pub w_div: f64,
    pub w_pl: f64,
    pub freeze_classifier: bool,
    /// Iterations on the original target after adaptation. Defaults to 10%
    /// of the adaptation iterations.
    pub finetune_iterations: Option<usize>,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            epochs: 10,
            batch_size: 32,
            optimizer: OptimizerConfig::adam(5e-4),
            mixup: MixupConfig::default(),
            refresh_interval: 1,
            w_ent: 1.0,
            w_div: 1.0,
            w_pl: 0.3,
            freeze_classifier: true,
            finetune_iterations: None,
            seed: 0,
        }
    }
}

impl ClientConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.refresh_interval == 0 {
            return Err(Error::config(
                "client",
                "batch_size and refresh_interval must be positive",
            ));
        }
        if [self.w_ent, self.w_div, self.w_pl].iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::config("client.weights", "loss weights must be non-negative"));
        }
        self.optimizer.validate()?;
        self.mixup.validate()
    }

    pub fn finetune_budget(&self, adapt_iterations: usize) -> usize {
        self.finetune_iterations
            .unwrap_or_else(|| (adapt_iterations as f64 * 0.1).round() as usize)
    }
}

/// Read-only accuracy probe supplied by the experimenter; the client never
/// touches target labels itself.
pub type EvalProbe<'a> = &'a (dyn Fn(&SfdaModel) -> Result<f64> + Sync);

fn pseudo_labels(model: &SfdaModel, inputs: &MixedInputs) -> Result<Vec<usize>> {
    let all: Vec<usize> = (0..inputs.len()).collect();
    let z = inputs.features(&model.net, &all)?;
    let p = softmax_rows(&model.net.classifier.forward(&z)?);
    pseudo_label_centroids(&z, &p)
}

struct Phase<'a> {
    inputs: &'a MixedInputs,
    iterations: usize,
}

/// SHOT-style information maximization plus centroid pseudo-labels on
/// `D_{t_m}`, followed by a short finetune on the original target.
pub fn client_adapt(
    model: &SfdaModel,
    target: &DomainDataset,
    cfg: &ClientConfig,
    probe: Option<EvalProbe<'_>>,
) -> Result<(SfdaModel, TrainLog)> {
    cfg.validate()?;
    if target.has_any_label() {
        return Err(Error::Quarantine(format!(
            "{} dataset handed to the client carries labels",
            target.role
        )));
    }
    let start = Instant::now();
    let mut model = model.clone();
    let stem = model.conv_stem;
    let mixed = MixedInputs::build(target, &cfg.mixup, stem, derive_seed(cfg.seed, "client/augment"))?;
    let original = MixedInputs::build(target, &MixupConfig::edge(0.0), stem, 0)?;
    let per_epoch = mixed.len().div_ceil(cfg.batch_size);
    let phases = [
        Phase {
            inputs: &mixed,
            iterations: cfg.epochs * per_epoch,
        },
        Phase {
            inputs: &original,
            iterations: cfg.finetune_budget(cfg.epochs * per_epoch),
        },
    ];

    let group = if cfg.freeze_classifier {
        ParamGroup::Backbone
    } else {
        ParamGroup::All
    };
    let n_backbone = model.net.num_backbone_params();
    let mut shuffle = substream(cfg.seed, "client/shuffle");
    let mut state = OptimizerState::new();
    let mut log = TrainLog::default();
    let mut epoch = 0;

    for phase in &phases {
        let mut done = 0;
        let mut labels = Vec::new();
        let mut order: Vec<usize> = (0..phase.inputs.len()).collect();
        let mut phase_epoch = 0;
        while done < phase.iterations {
            if phase_epoch % cfg.refresh_interval == 0 {
                labels = pseudo_labels(&model, phase.inputs)?;
            }
            phase_epoch += 1;
            epoch += 1;
            order.shuffle(&mut shuffle);
            let mut sums = [0.0; 4];
            let mut seen = 0usize;
            for idx in batches(&order, cfg.batch_size) {
                if done == phase.iterations {
                    break;
                }
                let y: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
                let loss = LossSpec::Composite(vec![
                    (cfg.w_ent, LossSpec::Entropy),
                    (cfg.w_div, LossSpec::Diversity),
                    (
                        cfg.w_pl,
                        LossSpec::CrossEntropy {
                            labels: &y,
                            smoothing: 0.0,
                        },
                    ),
                ]);
                let rec = phase.inputs.grad(&model.net, idx, &loss)?;
                let grads = match group {
                    ParamGroup::Backbone => &rec.grads[..n_backbone],
                    ParamGroup::All => &rec.grads[..],
                };
                optimizer_step(&mut model.net.params_mut(group), grads, &mut state, &cfg.optimizer)?;
                let w = idx.len() as f64;
                sums[0] += rec.loss * w;
                for (s, v) in sums[1..].iter_mut().zip(&rec.parts) {
                    *s += v * w;
                }
                seen += idx.len();
                done += 1;
            }
            let n = seen as f64;
            log.push(EpochRecord {
                epoch,
                loss_total: sums[0] / n,
                loss_ent: Some(sums[1] / n),
                loss_div: Some(sums[2] / n),
                loss_pl: Some(sums[3] / n),
                src_acc: None,
                tgt_acc: probe.map(|p| p(&model)).transpose()?,
            })?;
        }
    }
    log.wall_time = start.elapsed();
    Ok((model, log))
}
