//! Convex-combination and averaging primitives shared by input-space and
//! feature-space mixup.

use super::tensor::Tensor;
use crate::error::{Error, Result};

pub fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::config("lambda", format!("{lambda} is outside [0, 1]")))
    }
}

/// `λ·generic + (1−λ)·orig` elementwise.
///
/// The endpoints return exact copies, and the interior is evaluated as
/// `orig + λ(generic − orig)` clamped to the segment, so `generic == orig`
/// is a bitwise fixed point and results never leave `[min, max]`.
pub fn convex_mix_slice(orig: &[f64], generic: &[f64], lambda: f64) -> Vec<f64> {
    debug_assert_eq!(orig.len(), generic.len());
    if lambda == 0.0 {
        return orig.to_vec();
    }
    if lambda == 1.0 {
        return generic.to_vec();
    }
    orig.iter()
        .zip(generic)
        .map(|(&a, &b)| {
            let v = a + lambda * (b - a);
            v.clamp(a.min(b), a.max(b))
        })
        .collect()
}

pub fn convex_mix(orig: &Tensor, generic: &Tensor, lambda: f64) -> Result<Tensor> {
    check_lambda(lambda)?;
    orig.same_shape(generic, "mixup")?;
    Tensor::new(
        orig.shape().to_vec(),
        convex_mix_slice(orig.data(), generic.data(), lambda),
    )
}

/// Elementwise mean of equally shaped tensors, computed as
/// `t₁ + Σᵢ(tᵢ − t₁)/K` so that identical inputs reproduce themselves exactly.
pub fn mean_of(items: &[Tensor]) -> Result<Tensor> {
    let first = items
        .first()
        .ok_or_else(|| Error::config("K", "need at least one tensor to average"))?;
    for t in &items[1..] {
        first.same_shape(t, "feature_mean")?;
    }
    let k = items.len() as f64;
    let mut acc = vec![0.0; first.len()];
    for t in &items[1..] {
        for ((a, &v), &f) in acc.iter_mut().zip(t.data()).zip(first.data()) {
            *a += v - f;
        }
    }
    let data = first.data().iter().zip(&acc).map(|(&f, &a)| f + a / k).collect();
    Tensor::new(first.shape().to_vec(), data)
}
