//! Losses over logits. Every loss returns its value and the gradient with
//! respect to the logits batch.

use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Loss vocabulary used by vendor and client training.
#[derive(Clone, Debug)]
pub enum LossSpec<'a> {
    /// Mean cross-entropy against `(1-s)·onehot + s/C` targets.
    CrossEntropy { labels: &'a [usize], smoothing: f64 },
    /// Mean per-sample prediction entropy.
    Entropy,
    /// `Σ_k p̄_k ln p̄_k`, the negative entropy of the mean prediction.
    Diversity,
    /// Weighted sum; component values are reported in order.
    Composite(Vec<(f64, LossSpec<'a>)>),
}

#[derive(Clone, Debug)]
pub struct LossOutput {
    pub value: f64,
    pub grad: Tensor,
    /// Unweighted component values (single entry for non-composite losses).
    pub parts: Vec<f64>,
}

pub fn log_softmax_rows(logits: &Tensor) -> Tensor {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        for v in row.iter_mut() {
            *v -= lse;
        }
    }
    out
}

pub fn softmax_rows(logits: &Tensor) -> Tensor {
    let mut out = log_softmax_rows(logits);
    for v in out.data_mut() {
        *v = v.exp();
    }
    out
}

impl LossSpec<'_> {
    pub fn evaluate(&self, logits: &Tensor) -> Result<LossOutput> {
        if logits.shape().len() != 2 {
            return Err(Error::dim("loss", format!("logits shape {:?}", logits.shape())));
        }
        let out = match self {
            LossSpec::CrossEntropy { labels, smoothing } => cross_entropy(logits, labels, *smoothing)?,
            LossSpec::Entropy => entropy(logits),
            LossSpec::Diversity => diversity(logits),
            LossSpec::Composite(terms) => {
                let mut grad = Tensor::zeros(logits.shape());
                let mut value = 0.0;
                let mut parts = Vec::with_capacity(terms.len());
                for (w, term) in terms {
                    let t = term.evaluate(logits)?;
                    value += w * t.value;
                    for (g, tg) in grad.data_mut().iter_mut().zip(t.grad.data()) {
                        *g += w * tg;
                    }
                    parts.push(t.value);
                }
                LossOutput { value, grad, parts }
            }
        };
        if !out.value.is_finite() {
            return Err(Error::Numeric { op: self.name() });
        }
        out.grad.check_finite(self.name())?;
        Ok(out)
    }

    fn name(&self) -> &'static str {
        match self {
            LossSpec::CrossEntropy { .. } => "cross_entropy",
            LossSpec::Entropy => "entropy",
            LossSpec::Diversity => "diversity",
            LossSpec::Composite(_) => "composite_loss",
        }
    }
}

fn cross_entropy(logits: &Tensor, labels: &[usize], smoothing: f64) -> Result<LossOutput> {
    let (n, c) = (logits.rows(), logits.cols());
    if labels.len() != n {
        return Err(Error::dim(
            "cross_entropy",
            format!("{} labels for {n} rows", labels.len()),
        ));
    }
    if !(0.0..1.0).contains(&smoothing) {
        return Err(Error::config("label_smoothing", "must lie in [0, 1)"));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= c) {
        return Err(Error::dim("cross_entropy", format!("label {bad} >= {c} classes")));
    }
    let logp = log_softmax_rows(logits);
    let mut grad = Tensor::zeros(logits.shape());
    let off = smoothing / c as f64;
    let mut value = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let lp = logp.row(r);
        let g = grad.row_mut(r);
        for k in 0..c {
            let q = if k == y { 1.0 - smoothing + off } else { off };
            value -= q * lp[k];
            g[k] = (lp[k].exp() - q) / n as f64;
        }
    }
    Ok(LossOutput {
        value: value / n as f64,
        grad,
        parts: vec![value / n as f64],
    })
}

fn entropy(logits: &Tensor) -> LossOutput {
    let (n, c) = (logits.rows(), logits.cols());
    let logp = log_softmax_rows(logits);
    let mut grad = Tensor::zeros(logits.shape());
    let mut value = 0.0;
    for r in 0..n {
        let lp = logp.row(r);
        let h: f64 = -lp.iter().map(|&l| l.exp() * l).sum::<f64>();
        value += h;
        let g = grad.row_mut(r);
        for k in 0..c {
            // dH/dl_k = -p_k (ln p_k + H)
            g[k] = -lp[k].exp() * (lp[k] + h) / n as f64;
        }
    }
    LossOutput {
        value: value / n as f64,
        grad,
        parts: vec![value / n as f64],
    }
}

fn diversity(logits: &Tensor) -> LossOutput {
    let (n, c) = (logits.rows(), logits.cols());
    let p = softmax_rows(logits);
    let mut mean = vec![0.0; c];
    for r in 0..n {
        for (m, v) in mean.iter_mut().zip(p.row(r)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let log_mean: Vec<f64> = mean.iter().map(|m| m.ln()).collect();
    let value: f64 = mean.iter().zip(&log_mean).map(|(m, l)| m * l).sum();
    let mut grad = Tensor::zeros(logits.shape());
    for r in 0..n {
        let pr = p.row(r);
        let avg: f64 = pr.iter().zip(&log_mean).map(|(a, l)| a * l).sum();
        let g = grad.row_mut(r);
        for k in 0..c {
            g[k] = pr[k] * (log_mean[k] - avg) / n as f64;
        }
    }
    LossOutput {
        value,
        grad,
        parts: vec![value],
    }
}
