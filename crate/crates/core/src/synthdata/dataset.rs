use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{substream, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainRole {
    Source,
    Target,
    SourceGeneric,
    TargetGeneric,
    SourceMixup,
    TargetMixup,
}

impl DomainRole {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainRole::Source => "source",
            DomainRole::Target => "target",
            DomainRole::SourceGeneric => "source-generic",
            DomainRole::TargetGeneric => "target-generic",
            DomainRole::SourceMixup => "source-mixup",
            DomainRole::TargetMixup => "target-mixup",
        }
    }

    pub fn is_source_like(self) -> bool {
        matches!(
            self,
            DomainRole::Source | DomainRole::SourceGeneric | DomainRole::SourceMixup
        )
    }

    pub fn mixup(self) -> DomainRole {
        if self.is_source_like() {
            DomainRole::SourceMixup
        } else {
            DomainRole::TargetMixup
        }
    }

    pub fn generic(self) -> DomainRole {
        if self.is_source_like() {
            DomainRole::SourceGeneric
        } else {
            DomainRole::TargetGeneric
        }
    }
}

impl fmt::Display for DomainRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DomainRole {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "source" => DomainRole::Source,
            "target" => DomainRole::Target,
            "source-generic" => DomainRole::SourceGeneric,
            "target-generic" => DomainRole::TargetGeneric,
            "source-mixup" => DomainRole::SourceMixup,
            "target-mixup" => DomainRole::TargetMixup,
            other => return Err(Error::Role(format!("unknown domain role `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayloadKind {
    Vector {
        dim: usize,
    },
    Image {
        height: usize,
        width: usize,
        channels: usize,
    },
}

impl PayloadKind {
    pub fn len(self) -> usize {
        match self {
            PayloadKind::Vector { dim } => dim,
            PayloadKind::Image {
                height,
                width,
                channels,
            } => height * width * channels,
        }
    }

    pub fn is_image(self) -> bool {
        matches!(self, PayloadKind::Image { .. })
    }
}

/// One sample. Image payloads are flattened row-major `H×W×C` in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub payload: Vec<f64>,
    pub label: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainDataset {
    pub role: DomainRole,
    pub samples: Vec<LabeledSample>,
    pub class_count: usize,
    pub payload_kind: PayloadKind,
    /// Free-form description of the generator config and seed.
    pub provenance: String,
}

/// Ground-truth target labels, kept apart from the target dataset so that
/// client-side code never sees them. Only evaluation helpers accept them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalLabels {
    labels: Vec<usize>,
}

impl EvalLabels {
    pub fn new(labels: Vec<usize>) -> Self {
        EvalLabels { labels }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> EvalLabels {
        EvalLabels {
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

impl DomainDataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(|s| s.label.is_some())
    }

    pub fn has_any_label(&self) -> bool {
        self.samples.iter().any(|s| s.label.is_some())
    }

    /// Labels of a fully labelled dataset.
    pub fn labels(&self) -> Result<Vec<usize>> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.label
                    .ok_or_else(|| Error::Role(format!("sample {i} of {} dataset has no label", self.role)))
            })
            .collect()
    }

    pub fn payload_matrix(&self) -> Result<Tensor> {
        Tensor::from_rows(&self.samples.iter().map(|s| &s.payload[..]).collect::<Vec<_>>())
    }

    pub fn batch(&self, idx: &[usize]) -> Result<Tensor> {
        Tensor::from_rows(&idx.iter().map(|&i| &self.samples[i].payload[..]).collect::<Vec<_>>())
    }

    pub fn subset(&self, idx: &[usize]) -> DomainDataset {
        DomainDataset {
            role: self.role,
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
            class_count: self.class_count,
            payload_kind: self.payload_kind,
            provenance: self.provenance.clone(),
        }
    }

    pub fn with_role(mut self, role: DomainRole) -> Self {
        self.role = role;
        self
    }

    /// Per-class counts of labelled samples.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.class_count];
        for s in &self.samples {
            if let Some(y) = s.label {
                c[y] += 1;
            }
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.payload_kind.len();
        for (i, s) in self.samples.iter().enumerate() {
            if s.payload.len() != n {
                return Err(Error::dim(
                    "dataset",
                    format!("sample {i} has {} values, payload kind needs {n}", s.payload.len()),
                ));
            }
            if let Some(y) = s.label {
                if y >= self.class_count {
                    return Err(Error::dim(
                        "dataset",
                        format!("sample {i} label {y} >= {}", self.class_count),
                    ));
                }
            }
            if self.payload_kind.is_image() && s.payload.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Kind(format!("sample {i} has image values outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Stratified, seeded train/eval index split. Without labels the split is a
/// plain seeded shuffle. Indices on each side are returned in ascending order.
pub fn split_indices(labels: Option<&[usize]>, n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::config("fraction", format!("{fraction} is outside (0, 1)")));
    }
    let mut rng = substream(seed, "split");
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    match labels {
        Some(l) => {
            if l.len() != n {
                return Err(Error::dim("split", format!("{} labels for {n} samples", l.len())));
            }
            for (i, &y) in l.iter().enumerate() {
                groups.entry(y).or_default().push(i);
            }
        }
        None => {
            groups.insert(0, (0..n).collect());
        }
    }
    let mut train = Vec::new();
    let mut eval = Vec::new();
    for (_, mut members) in groups {
        members.shuffle(&mut rng);
        let k = (members.len() as f64 * fraction).round() as usize;
        train.extend_from_slice(&members[..k]);
        eval.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    eval.sort_unstable();
    Ok((train, eval))
}

/// Splits a labelled dataset (stratified) or an unlabelled one (shuffled).
pub fn split(dataset: &DomainDataset, fraction: f64, seed: u64) -> Result<(DomainDataset, DomainDataset)> {
    let labels = if dataset.is_labeled() {
        Some(dataset.labels()?)
    } else {
        None
    };
    let (a, b) = split_indices(labels.as_deref(), dataset.len(), fraction, seed)?;
    Ok((dataset.subset(&a), dataset.subset(&b)))
}

/// Splits an unlabelled target dataset together with its quarantined labels,
/// stratifying on those labels.
pub fn split_with_eval_labels(
    dataset: &DomainDataset,
    labels: &EvalLabels,
    fraction: f64,
    seed: u64,
) -> Result<((DomainDataset, EvalLabels), (DomainDataset, EvalLabels))> {
    let (a, b) = split_indices(Some(labels.as_slice()), dataset.len(), fraction, seed)?;
    Ok((
        (dataset.subset(&a), labels.subset(&a)),
        (dataset.subset(&b), labels.subset(&b)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n_per_class: usize, classes: usize) -> DomainDataset {
        let samples = (0..n_per_class * classes)
            .map(|i| LabeledSample {
                payload: vec![i as f64],
                label: Some(i % classes),
            })
            .collect();
        DomainDataset {
            role: DomainRole::Source,
            samples,
            class_count: classes,
            payload_kind: PayloadKind::Vector { dim: 1 },
            provenance: "toy".into(),
        }
    }

    #[test]
    fn half_split_is_stratified() {
        let d = toy(50, 4);
        let (a, b) = split(&d, 0.5, 3).unwrap();
        assert_eq!((a.len(), b.len()), (100, 100));
        assert_eq!(a.class_counts(), vec![25; 4]);
        assert_eq!(b.class_counts(), vec![25; 4]);
    }

    #[test]
    fn split_partitions_and_is_deterministic() {
        let d = toy(13, 3);
        let (a, b) = split(&d, 0.3, 9).unwrap();
        let mut all: Vec<f64> = a.samples.iter().chain(&b.samples).map(|s| s.payload[0]).collect();
        all.sort_by(f64::total_cmp);
        let orig: Vec<f64> = d.samples.iter().map(|s| s.payload[0]).collect();
        assert_eq!(all, orig);
        assert_eq!(split(&d, 0.3, 9).unwrap(), (a, b));
    }

    #[test]
    fn fraction_out_of_range() {
        let d = toy(2, 2);
        for f in [0.0, 1.0, -0.5, 1.5] {
            assert!(matches!(split(&d, f, 0), Err(Error::Config { .. })));
        }
    }

    #[test]
    fn role_round_trip() {
        for r in [
            DomainRole::Source,
            DomainRole::Target,
            DomainRole::SourceGeneric,
            DomainRole::TargetGeneric,
            DomainRole::SourceMixup,
            DomainRole::TargetMixup,
        ] {
            assert_eq!(r.as_str().parse::<DomainRole>().unwrap(), r);
        }
        assert!("sourcey".parse::<DomainRole>().is_err());
    }
}
