use crate::error::{Error, Result};
use crate::numerics::Tensor;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine distance; zero vectors are at distance 1 from everything.
fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    1.0 - a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb)
}

fn nearest(z: &Tensor, centroids: &[Option<Vec<f64>>]) -> Vec<usize> {
    (0..z.rows())
        .map(|i| {
            let mut best = (f64::INFINITY, 0);
            for (k, c) in centroids.iter().enumerate() {
                if let Some(c) = c {
                    let d = cosine_distance(z.row(i), c);
                    if d < best.0 {
                        best = (d, k);
                    }
                }
            }
            best.1
        })
        .collect()
}

fn weighted_centroids(z: &Tensor, weight: impl Fn(usize, usize) -> f64, classes: usize) -> Vec<Option<Vec<f64>>> {
    (0..classes)
        .map(|k| {
            let mut acc = vec![0.0; z.cols()];
            let mut total = 0.0;
            for i in 0..z.rows() {
                let w = weight(i, k);
                if w != 0.0 {
                    total += w;
                    for (a, v) in acc.iter_mut().zip(z.row(i)) {
                        *a += w * v;
                    }
                }
            }
            (total > 0.0).then(|| acc.into_iter().map(|a| a / total).collect())
        })
        .collect()
}

/// Two rounds of nearest-centroid labelling: soft centroids from `probs`,
/// then hard centroids from the round-1 labels. Ties go to the lowest class.
pub fn pseudo_label_centroids(features: &Tensor, probs: &Tensor) -> Result<Vec<usize>> {
    features.require_matrix("pseudo_label_centroids", features.cols())?;
    if probs.shape().len() != 2 || probs.rows() != features.rows() {
        return Err(Error::dim(
            "pseudo_label_centroids",
            format!("features {:?}, probabilities {:?}", features.shape(), probs.shape()),
        ));
    }
    let classes = probs.cols();
    let soft = weighted_centroids(features, |i, k| probs.row(i)[k], classes);
    let round1 = nearest(features, &soft);
    let hard = weighted_centroids(features, |i, k| f64::from(u8::from(round1[i] == k)), classes);
    let merged: Vec<Option<Vec<f64>>> = hard.into_iter().zip(soft).map(|(h, s)| h.or(s)).collect();
    Ok(nearest(features, &merged))
}
