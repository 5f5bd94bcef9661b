use super::loss::LossSpec;
use super::mix::{check_lambda, convex_mix, mean_of};
use super::mlp::{Mlp, ModelBundle};
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Generic-domain features entering a feature-space mixup.
#[derive(Clone, Copy, Debug)]
pub enum GenericBranch<'a> {
    /// Precomputed `z_g`, treated as a constant: no gradient reaches the
    /// parameters through it.
    Detached(&'a Tensor),
    /// Augmented input batches; `z_g` is the mean of their backbone
    /// features and gradients flow through every branch.
    Live(&'a [Tensor]),
}

/// Replace `h(x)` by `λ·z_g + (1−λ)·h(x)` before the classifier.
#[derive(Clone, Copy, Debug)]
pub struct FeatureMixing<'a> {
    pub generic: GenericBranch<'a>,
    pub lambda: f64,
}

/// Loss value and gradients aligned with [`ModelBundle::params`].
#[derive(Clone, Debug, PartialEq)]
pub struct GradientRecord {
    pub loss: f64,
    pub parts: Vec<f64>,
    pub grads: Vec<Tensor>,
    /// Argmax of the logits the loss was evaluated on.
    pub predictions: Vec<usize>,
}

impl GradientRecord {
    pub fn backbone_grads(&self, model: &ModelBundle) -> &[Tensor] {
        &self.grads[..model.num_backbone_params()]
    }
}

pub fn value_and_grad(
    model: &ModelBundle,
    batch: &Tensor,
    mixing: Option<FeatureMixing<'_>>,
    loss: &LossSpec<'_>,
) -> Result<GradientRecord> {
    let trace = model.backbone.forward_trace(batch)?;
    let z = &trace.output;

    let mut live_traces = Vec::new();
    let (z_in, lambda) = match mixing {
        None => (z.clone(), 0.0),
        Some(m) => {
            check_lambda(m.lambda)?;
            let z_g = match m.generic {
                GenericBranch::Detached(t) => t.clone(),
                GenericBranch::Live(augs) => {
                    for a in augs {
                        live_traces.push(model.backbone.forward_trace(a)?);
                    }
                    let feats: Vec<Tensor> = live_traces.iter().map(|t| t.output.clone()).collect();
                    mean_of(&feats)?
                }
            };
            (convex_mix(z, &z_g, m.lambda)?, m.lambda)
        }
    };

    let c_trace = model.classifier.forward_trace(&z_in)?;
    let out = loss.evaluate(&c_trace.output)?;
    let (c_grads, grad_zm) = model.classifier.backward(&c_trace, &out.grad)?;

    let mut grad_z = grad_zm.clone();
    if lambda != 0.0 {
        grad_z.scale(1.0 - lambda);
    }
    let mut grads = model.backbone.param_grads(&trace, &grad_z)?;

    if !live_traces.is_empty() {
        let mut grad_aug = grad_zm;
        grad_aug.scale(lambda / live_traces.len() as f64);
        for t in &live_traces {
            let g = model.backbone.param_grads(t, &grad_aug)?;
            for (acc, gi) in grads.iter_mut().zip(&g) {
                acc.add_assign(gi)?;
            }
        }
    }
    grads.extend(c_grads);
    for g in &grads {
        g.check_finite("value_and_grad")?;
    }
    Ok(GradientRecord {
        loss: out.value,
        parts: out.parts,
        grads,
        predictions: c_trace.output.argmax_rows(),
    })
}

/// Gradient of a loss on a standalone MLP (domain/task probe classifiers).
pub fn mlp_value_and_grad(mlp: &Mlp, batch: &Tensor, loss: &LossSpec<'_>) -> Result<GradientRecord> {
    let trace = mlp.forward_trace(batch)?;
    let out = loss.evaluate(&trace.output)?;
    let grads = mlp.param_grads(&trace, &out.grad)?;
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numeric {
            op: "mlp_value_and_grad",
        });
    }
    Ok(GradientRecord {
        loss: out.value,
        parts: out.parts,
        grads,
        predictions: trace.output.argmax_rows(),
    })
}
