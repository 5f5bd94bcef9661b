use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the pre-activation `x` and output `y`.
    fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// Architecture of a fully connected stack. `activations[i]` follows layer
/// `i`, so there is one entry per weight layer (including the last).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub layer_widths: Vec<usize>,
    pub activations: Vec<Activation>,
    /// Outputs are logits to be read through a softmax (task/domain heads).
    pub has_softmax_head: bool,
}

impl MlpSpec {
    pub fn new(layer_widths: Vec<usize>, activations: Vec<Activation>, has_softmax_head: bool) -> Result<Self> {
        let spec = MlpSpec {
            layer_widths,
            activations,
            has_softmax_head,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Hidden layers share `hidden_act`; the output layer is linear.
    pub fn head(widths: Vec<usize>, hidden_act: Activation) -> Result<Self> {
        let n = widths.len().saturating_sub(1);
        let mut acts = vec![hidden_act; n];
        if let Some(last) = acts.last_mut() {
            *last = Activation::Identity;
        }
        MlpSpec::new(widths, acts, true)
    }

    /// Every layer, including the output, uses `act`.
    pub fn uniform(widths: Vec<usize>, act: Activation) -> Result<Self> {
        let n = widths.len().saturating_sub(1);
        MlpSpec::new(widths, vec![act; n], false)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_widths.len() < 2 {
            return Err(Error::config("layer_widths", "need at least 2 entries"));
        }
        if self.layer_widths.iter().any(|&w| w == 0) {
            return Err(Error::config("layer_widths", "widths must be positive"));
        }
        if self.activations.len() != self.layer_widths.len() - 1 {
            return Err(Error::config(
                "activations",
                format!(
                    "{} activations for {} layers",
                    self.activations.len(),
                    self.layer_widths.len() - 1
                ),
            ));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }
}

/// One affine layer; `weight` is `[in, out]`, `bias` is `[out]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weight: Tensor,
    pub bias: Tensor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    spec: MlpSpec,
    layers: Vec<Dense>,
}

/// Intermediate values of a forward pass, kept for the backward pass.
#[derive(Clone, Debug)]
pub struct MlpTrace {
    inputs: Vec<Tensor>,
    pre: Vec<Tensor>,
    pub output: Tensor,
}

impl Mlp {
    /// Glorot-uniform weights (He-uniform before ReLU), zero biases.
    pub fn init<R: Rng>(spec: MlpSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let layers = spec
            .layer_widths
            .windows(2)
            .zip(&spec.activations)
            .map(|(w, act)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = match act {
                    Activation::Relu => (6.0 / fan_in as f64).sqrt(),
                    _ => (6.0 / (fan_in + fan_out) as f64).sqrt(),
                };
                let data = (0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)).collect();
                Dense {
                    weight: Tensor::new(vec![fan_in, fan_out], data).unwrap(),
                    bias: Tensor::zeros(&[fan_out]),
                }
            })
            .collect();
        Ok(Mlp { spec, layers })
    }

    pub fn from_layers(spec: MlpSpec, layers: Vec<Dense>) -> Result<Self> {
        spec.validate()?;
        if layers.len() != spec.layer_widths.len() - 1 {
            return Err(Error::dim("mlp", "layer count does not match spec"));
        }
        for (i, (l, w)) in layers.iter().zip(spec.layer_widths.windows(2)).enumerate() {
            if l.weight.shape() != [w[0], w[1]] || l.bias.shape() != [w[1]] {
                return Err(Error::dim(
                    "mlp",
                    format!(
                        "layer {i}: weight {:?} bias {:?} for widths {}->{}",
                        l.weight.shape(),
                        l.bias.shape(),
                        w[0],
                        w[1]
                    ),
                ));
            }
        }
        Ok(Mlp { spec, layers })
    }

    /// Single square layer with identity weights and zero bias.
    pub fn identity(width: usize) -> Self {
        let mut w = Tensor::zeros(&[width, width]);
        for i in 0..width {
            w.data_mut()[i * width + i] = 1.0;
        }
        Mlp {
            spec: MlpSpec::uniform(vec![width, width], Activation::Identity).unwrap(),
            layers: vec![Dense {
                weight: w,
                bias: Tensor::zeros(&[width]),
            }],
        }
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn params(&self) -> Vec<&Tensor> {
        self.layers.iter().flat_map(|l| [&l.weight, &l.bias]).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers
            .iter_mut()
            .flat_map(|l| [&mut l.weight, &mut l.bias])
            .collect()
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        x.require_matrix("forward", self.spec.input_dim())?;
        let mut h = x.clone();
        for (layer, act) in self.layers.iter().zip(&self.spec.activations) {
            let mut z = h.matmul(&layer.weight)?;
            add_bias(&mut z, &layer.bias);
            for v in z.data_mut() {
                *v = act.apply(*v);
            }
            h = z;
        }
        h.check_finite("forward")?;
        Ok(h)
    }

    pub fn forward_trace(&self, x: &Tensor) -> Result<MlpTrace> {
        x.require_matrix("forward", self.spec.input_dim())?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = x.clone();
        for (layer, act) in self.layers.iter().zip(&self.spec.activations) {
            let mut z = h.matmul(&layer.weight)?;
            add_bias(&mut z, &layer.bias);
            let mut out = z.clone();
            for v in out.data_mut() {
                *v = act.apply(*v);
            }
            inputs.push(h);
            pre.push(z);
            h = out;
        }
        h.check_finite("forward")?;
        Ok(MlpTrace { inputs, pre, output: h })
    }

    /// Returns per-parameter gradients (weight, bias per layer) and the
    /// gradient with respect to the input batch.
    pub fn backward(&self, trace: &MlpTrace, grad_out: &Tensor) -> Result<(Vec<Tensor>, Tensor)> {
        let (grads, input) = self.backward_impl(trace, grad_out, true)?;
        Ok((grads, input.expect("input gradient requested")))
    }

    /// Parameter gradients only; skips the input-gradient product of the
    /// first layer.
    pub fn param_grads(&self, trace: &MlpTrace, grad_out: &Tensor) -> Result<Vec<Tensor>> {
        Ok(self.backward_impl(trace, grad_out, false)?.0)
    }

    fn backward_impl(
        &self,
        trace: &MlpTrace,
        grad_out: &Tensor,
        input_grad: bool,
    ) -> Result<(Vec<Tensor>, Option<Tensor>)> {
        trace.output.same_shape(grad_out, "backward")?;
        let n_layers = self.layers.len();
        let mut grads: Vec<Tensor> = Vec::with_capacity(2 * n_layers);
        let mut upstream = grad_out.clone();
        let mut outputs_after: Option<&Tensor> = Some(&trace.output);
        for l in (0..n_layers).rev() {
            let act = self.spec.activations[l];
            let pre = &trace.pre[l];
            // Output of layer l is the input of layer l+1 (or the final output).
            let out = match outputs_after {
                Some(t) => t,
                None => &trace.inputs[l + 1],
            };
            let mut delta = upstream;
            for ((d, &x), &y) in delta.data_mut().iter_mut().zip(pre.data()).zip(out.data()) {
                *d *= act.derivative(x, y);
            }
            let gw = trace.inputs[l].t_matmul(&delta)?;
            let cols = delta.cols();
            let mut gb = vec![0.0; cols];
            for r in 0..delta.rows() {
                for (b, v) in gb.iter_mut().zip(delta.row(r)) {
                    *b += v;
                }
            }
            if l > 0 || input_grad {
                upstream = delta.matmul_t(&self.layers[l].weight)?;
            } else {
                upstream = Tensor::zeros(&[0]);
            }
            grads.push(Tensor::new(vec![cols], gb)?);
            grads.push(gw);
            outputs_after = None;
        }
        grads.reverse();
        Ok((grads, input_grad.then_some(upstream)))
    }
}

fn add_bias(z: &mut Tensor, bias: &Tensor) {
    let b = bias.data();
    for r in 0..z.rows() {
        for (v, bv) in z.row_mut(r).iter_mut().zip(b) {
            *v += bv;
        }
    }
}

/// Backbone `h` and task classifier `f_c`, split at the feature space.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelBundle {
    pub backbone: Mlp,
    pub classifier: Mlp,
}

/// Which parameters an update touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamGroup {
    All,
    Backbone,
}

impl ModelBundle {
    pub fn new(backbone: Mlp, classifier: Mlp) -> Result<Self> {
        if backbone.spec.output_dim() != classifier.spec.input_dim() {
            return Err(Error::dim(
                "model_bundle",
                format!(
                    "backbone outputs {} features, classifier expects {}",
                    backbone.spec.output_dim(),
                    classifier.spec.input_dim()
                ),
            ));
        }
        Ok(ModelBundle { backbone, classifier })
    }

    pub fn input_dim(&self) -> usize {
        self.backbone.spec.input_dim()
    }

    pub fn feat_dim(&self) -> usize {
        self.backbone.spec.output_dim()
    }

    pub fn class_count(&self) -> usize {
        self.classifier.spec.output_dim()
    }

    /// `(h(x), f_c(h(x)))`.
    pub fn forward(&self, batch: &Tensor) -> Result<(Tensor, Tensor)> {
        let features = self.backbone.forward(batch)?;
        let logits = self.classifier.forward(&features)?;
        Ok((features, logits))
    }

    pub fn features(&self, batch: &Tensor) -> Result<Tensor> {
        self.backbone.forward(batch)
    }

    pub fn predict(&self, batch: &Tensor) -> Result<Vec<usize>> {
        Ok(self.forward(batch)?.1.argmax_rows())
    }

    /// Backbone parameters first, then classifier parameters.
    pub fn params(&self) -> Vec<&Tensor> {
        let mut p = self.backbone.params();
        p.extend(self.classifier.params());
        p
    }

    pub fn params_mut(&mut self, group: ParamGroup) -> Vec<&mut Tensor> {
        let mut p = self.backbone.params_mut();
        if group == ParamGroup::All {
            p.extend(self.classifier.params_mut());
        }
        p
    }

    pub fn num_backbone_params(&self) -> usize {
        2 * self.backbone.layers.len()
    }

    /// Overwrites all parameters in `params()` order.
    pub fn set_params(&mut self, values: Vec<Tensor>) -> Result<()> {
        let mut slots = self.params_mut(ParamGroup::All);
        if slots.len() != values.len() {
            return Err(Error::dim(
                "set_params",
                format!("{} tensors for {} parameters", values.len(), slots.len()),
            ));
        }
        for (slot, v) in slots.iter().zip(&values) {
            slot.same_shape(v, "set_params")?;
        }
        for (slot, v) in slots.iter_mut().zip(values) {
            **slot = v;
        }
        Ok(())
    }
}
