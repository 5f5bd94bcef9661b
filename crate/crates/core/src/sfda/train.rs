//! Batch plumbing shared by the vendor and client loops.

use crate::error::Result;
use crate::genericdomain::{build_mixup_dataset, FeatureMixupProducer, MixupConfig, MixupMode, MixupProduct};
use crate::numerics::mix::{convex_mix, mean_of};
use crate::numerics::{value_and_grad, FeatureMixing, GenericBranch, GradientRecord, LossSpec, ModelBundle, Tensor};
use crate::synthdata::DomainDataset;

use super::model::dataset_inputs;

/// Model inputs of the (possibly mixed) training domain.
pub struct MixedInputs {
    /// Edge mode: mixed inputs. Feature mode: original inputs.
    pub x: Tensor,
    /// Present in feature mode with `λ > 0`.
    pub producer: Option<FeatureMixupProducer>,
}

impl MixedInputs {
    /// `λ = 0` short-circuits to the original inputs in both modes.
    pub fn build(d: &DomainDataset, mix: &MixupConfig, stem: bool, seed: u64) -> Result<Self> {
        mix.validate()?;
        if mix.lambda == 0.0 {
            return Ok(MixedInputs {
                x: dataset_inputs(d, stem)?,
                producer: None,
            });
        }
        match (mix.mode, build_mixup_dataset(d, mix, seed, stem)?) {
            (MixupMode::Edge, MixupProduct::Materialized(m)) => Ok(MixedInputs {
                x: dataset_inputs(&m, stem)?,
                producer: None,
            }),
            (_, MixupProduct::Features(p)) => Ok(MixedInputs {
                x: p.view_batch(0, &(0..p.len()).collect::<Vec<_>>())?,
                producer: Some(p),
            }),
            (MixupMode::Feature, MixupProduct::Materialized(_)) => unreachable!(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn grad(&self, net: &ModelBundle, idx: &[usize], loss: &LossSpec<'_>) -> Result<GradientRecord> {
        let x = self.x.select_rows(idx);
        match &self.producer {
            None => value_and_grad(net, &x, None, loss),
            Some(p) => {
                let views = p.all_views(idx)?;
                if p.stop_gradient {
                    let z_g = generic_features(net, &views)?;
                    let mixing = FeatureMixing {
                        generic: GenericBranch::Detached(&z_g),
                        lambda: p.lambda,
                    };
                    value_and_grad(net, &x, Some(mixing), loss)
                } else {
                    let mixing = FeatureMixing {
                        generic: GenericBranch::Live(&views),
                        lambda: p.lambda,
                    };
                    value_and_grad(net, &x, Some(mixing), loss)
                }
            }
        }
    }

    /// Features the classifier sees for rows `idx`: `h(x)` or `z_m`.
    pub fn features(&self, net: &ModelBundle, idx: &[usize]) -> Result<Tensor> {
        let z = net.features(&self.x.select_rows(idx))?;
        match &self.producer {
            None => Ok(z),
            Some(p) => convex_mix(&z, &generic_features(net, &p.all_views(idx)?)?, p.lambda),
        }
    }
}

fn generic_features(net: &ModelBundle, views: &[Tensor]) -> Result<Tensor> {
    let feats = views.iter().map(|v| net.features(v)).collect::<Result<Vec<_>>>()?;
    mean_of(&feats)
}

pub fn batches(order: &[usize], batch_size: usize) -> impl Iterator<Item = &[usize]> {
    order.chunks(batch_size.max(1))
}
