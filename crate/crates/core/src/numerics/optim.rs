use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OptimizerConfig {
    SgdMomentum {
        lr: f64,
        #[serde(default = "default_momentum")]
        momentum: f64,
    },
    Adam {
        lr: f64,
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

fn default_momentum() -> f64 {
    0.9
}
fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}

impl OptimizerConfig {
    pub fn adam(lr: f64) -> Self {
        OptimizerConfig::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn sgd(lr: f64, momentum: f64) -> Self {
        OptimizerConfig::SgdMomentum { lr, momentum }
    }

    pub fn lr(&self) -> f64 {
        match *self {
            OptimizerConfig::SgdMomentum { lr, .. } | OptimizerConfig::Adam { lr, .. } => lr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr() > 0.0) || !self.lr().is_finite() {
            return Err(Error::config("optimizer.lr", format!("{} must be > 0", self.lr())));
        }
        match *self {
            OptimizerConfig::SgdMomentum { momentum, .. } if !(0.0..1.0).contains(&momentum) => {
                Err(Error::config("optimizer.momentum", "must lie in [0, 1)"))
            }
            OptimizerConfig::Adam { beta1, beta2, eps, .. }
                if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || eps <= 0.0 =>
            {
                Err(Error::config("optimizer", "betas must lie in [0, 1) and eps > 0"))
            }
            _ => Ok(()),
        }
    }
}

/// Moment buffers for one parameter group.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OptimizerState {
    pub step: u64,
    first: Vec<Tensor>,
    second: Vec<Tensor>,
}

impl OptimizerState {
    pub fn new() -> Self {
        Self::default()
    }
}

/// One update. SGD: `v ← μv + g; p ← p − lr·v`. Adam: bias-corrected moments.
pub fn optimizer_step(
    params: &mut [&mut Tensor],
    grads: &[Tensor],
    state: &mut OptimizerState,
    cfg: &OptimizerConfig,
) -> Result<()> {
    cfg.validate()?;
    if params.len() != grads.len() {
        return Err(Error::dim(
            "optimizer_step",
            format!("{} params, {} grads", params.len(), grads.len()),
        ));
    }
    for (p, g) in params.iter().zip(grads) {
        p.same_shape(g, "optimizer_step")?;
    }
    if state.first.is_empty() {
        state.first = grads.iter().map(|g| Tensor::zeros(g.shape())).collect();
        state.second = grads.iter().map(|g| Tensor::zeros(g.shape())).collect();
    } else if state.first.len() != grads.len() {
        return Err(Error::dim("optimizer_step", "state does not match parameter group"));
    }
    state.step += 1;
    match *cfg {
        OptimizerConfig::SgdMomentum { lr, momentum } => {
            for ((p, g), v) in params.iter_mut().zip(grads).zip(&mut state.first) {
                for ((pv, &gv), vv) in p.data_mut().iter_mut().zip(g.data()).zip(v.data_mut()) {
                    *vv = momentum * *vv + gv;
                    *pv -= lr * *vv;
                }
            }
        }
        OptimizerConfig::Adam { lr, beta1, beta2, eps } => {
            let t = state.step as i32;
            let c1 = 1.0 - beta1.powi(t);
            let c2 = 1.0 - beta2.powi(t);
            for (((p, g), m), v) in params
                .iter_mut()
                .zip(grads)
                .zip(&mut state.first)
                .zip(&mut state.second)
            {
                for (((pv, &gv), mv), vv) in p
                    .data_mut()
                    .iter_mut()
                    .zip(g.data())
                    .zip(m.data_mut())
                    .zip(v.data_mut())
                {
                    *mv = beta1 * *mv + (1.0 - beta1) * gv;
                    *vv = beta2 * *vv + (1.0 - beta2) * gv * gv;
                    let mhat = *mv / c1;
                    let vhat = *vv / c2;
                    *pv -= lr * mhat / (vhat.sqrt() + eps);
                }
            }
        }
    }
    for p in params.iter() {
        p.check_finite("optimizer_step")?;
    }
    Ok(())
}
