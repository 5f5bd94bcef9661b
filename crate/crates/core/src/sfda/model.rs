use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genericdomain::model_input;
use crate::numerics::{Activation, Mlp, MlpSpec, ModelBundle, Tensor};
use crate::synthdata::{DomainDataset, EvalLabels, PayloadKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub hidden: Vec<usize>,
    pub feat_dim: usize,
    /// Run the fixed convolution stem on image payloads before the MLP.
    /// Vector payloads are fed as they are.
    pub conv_stem: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden: vec![64],
            feat_dim: 32,
            conv_stem: true,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feat_dim == 0 || self.hidden.contains(&0) {
            return Err(Error::config("model", "layer widths must be positive"));
        }
        Ok(())
    }

    /// Whether the stem is applied to payloads of this kind.
    pub fn uses_stem(&self, kind: PayloadKind) -> bool {
        self.conv_stem && kind.is_image()
    }

    pub fn input_dim(&self, kind: PayloadKind) -> Result<usize> {
        match (self.uses_stem(kind), kind) {
            (true, PayloadKind::Image { height, width, .. }) => {
                let (h, w) = crate::synthdata::stem::stem_output_dims(height, width);
                Ok(h * w * crate::synthdata::stem::STEM_CHANNELS)
            }
            (_, k) => Ok(k.len()),
        }
    }
}

/// Network plus the fixed input preprocessing it was trained with.
#[derive(Clone, Debug, PartialEq)]
pub struct SfdaModel {
    pub net: ModelBundle,
    pub conv_stem: bool,
}

impl SfdaModel {
    /// Backbone: hidden ReLU layers then a tanh feature layer; classifier:
    /// one linear layer.
    pub fn init<R: rand::Rng>(cfg: &ModelConfig, kind: PayloadKind, classes: usize, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        let mut widths = vec![cfg.input_dim(kind)?];
        widths.extend(&cfg.hidden);
        widths.push(cfg.feat_dim);
        let mut acts = vec![Activation::Relu; widths.len() - 1];
        *acts.last_mut().unwrap() = Activation::Tanh;
        let backbone = Mlp::init(MlpSpec::new(widths, acts, false)?, rng)?;
        let classifier = Mlp::init(MlpSpec::head(vec![cfg.feat_dim, classes], Activation::Identity)?, rng)?;
        Ok(SfdaModel {
            net: ModelBundle::new(backbone, classifier)?,
            conv_stem: cfg.uses_stem(kind),
        })
    }

    pub fn inputs(&self, d: &DomainDataset) -> Result<Tensor> {
        dataset_inputs(d, self.conv_stem)
    }

    pub fn predict(&self, d: &DomainDataset) -> Result<Vec<usize>> {
        self.net.predict(&self.inputs(d)?)
    }

    pub fn features(&self, d: &DomainDataset) -> Result<Tensor> {
        self.net.features(&self.inputs(d)?)
    }
}

/// Model-ready input matrix for every sample of `d`.
pub fn dataset_inputs(d: &DomainDataset, stem: bool) -> Result<Tensor> {
    if !stem {
        return d.payload_matrix();
    }
    let rows: Vec<Vec<f64>> = d
        .samples
        .par_iter()
        .map(|s| model_input(&s.payload, d.payload_kind, true))
        .collect::<Result<_>>()?;
    Tensor::from_rows(&rows)
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::dim(
            "accuracy",
            format!("{} predictions for {} labels", pred.len(), truth.len()),
        ));
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Top-1 accuracy on a labelled dataset.
pub fn evaluate(model: &SfdaModel, d: &DomainDataset) -> Result<f64> {
    let labels = d.labels()?;
    accuracy(&model.predict(d)?, &labels)
}

/// Top-1 accuracy on an unlabelled dataset against its quarantined labels.
pub fn evaluate_with(model: &SfdaModel, d: &DomainDataset, labels: &EvalLabels) -> Result<f64> {
    if labels.len() != d.len() {
        return Err(Error::dim(
            "evaluate",
            format!("{} eval labels for {} samples", labels.len(), d.len()),
        ));
    }
    accuracy(&model.predict(d)?, labels.as_slice())
}
