//! Text dataset files.
//!
//! ```text
//! gmxdata v1
//! # class_count 4
//! # provenance shape-texture seed=7
//! source 2 image 32x32x3 0.5 0.25 ...
//! target - vector 2 0.125 -1.5
//! ```
//!
//! One record per line: role, label (`-` when absent), payload kind and
//! dims, then the payload values in shortest round-trip decimal form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::dataset::{DomainDataset, DomainRole, EvalLabels, LabeledSample, PayloadKind};
use crate::error::{Error, Result};

pub const HEADER: &str = "gmxdata v1";

pub fn format_dataset(d: &DomainDataset) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(out, "# class_count {}", d.class_count);
    let _ = writeln!(out, "# provenance {}", d.provenance.replace('\n', " "));
    let kind = match d.payload_kind {
        PayloadKind::Vector { dim } => format!("vector {dim}"),
        PayloadKind::Image {
            height,
            width,
            channels,
        } => format!("image {height}x{width}x{channels}"),
    };
    for s in &d.samples {
        out.push_str(d.role.as_str());
        match s.label {
            Some(y) => {
                let _ = write!(out, " {y}");
            }
            None => out.push_str(" -"),
        }
        out.push(' ');
        out.push_str(&kind);
        for v in &s.payload {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_dataset(text: &str) -> Result<DomainDataset> {
    let err = |line: usize, reason: String| Error::Parse {
        location: format!("line {line}"),
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(err(1, format!("expected header `{HEADER}`"))),
    }
    let mut class_count = None;
    let mut provenance = String::new();
    let mut role = None;
    let mut kind = None;
    let mut samples = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            if let Some(v) = meta.strip_prefix("class_count") {
                class_count = Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|e| err(lineno, format!("class_count: {e}")))?,
                );
            } else if let Some(v) = meta.strip_prefix("provenance") {
                provenance = v.trim().to_string();
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_ascii_whitespace();
        let mut next = |what: &str| fields.next().ok_or_else(|| err(lineno, format!("missing {what}")));
        let r: DomainRole = next("role")?.parse().map_err(|e: Error| err(lineno, e.to_string()))?;
        let label = match next("label")? {
            "-" => None,
            l => Some(l.parse::<usize>().map_err(|e| err(lineno, format!("label: {e}")))?),
        };
        let k = match next("payload kind")? {
            "vector" => PayloadKind::Vector {
                dim: next("dim")?.parse().map_err(|e| err(lineno, format!("dim: {e}")))?,
            },
            "image" => {
                let dims = next("dims")?;
                let parts: Vec<usize> = dims
                    .split('x')
                    .map(|p| p.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| err(lineno, format!("image dims `{dims}`: {e}")))?;
                if parts.len() != 3 {
                    return Err(err(lineno, format!("image dims `{dims}` must be HxWxC")));
                }
                PayloadKind::Image {
                    height: parts[0],
                    width: parts[1],
                    channels: parts[2],
                }
            }
            other => return Err(err(lineno, format!("unknown payload kind `{other}`"))),
        };
        let payload: Vec<f64> = fields
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(lineno, format!("value: {e}")))?;
        if payload.len() != k.len() {
            return Err(err(
                lineno,
                format!("{} values for payload of {}", payload.len(), k.len()),
            ));
        }
        if *role.get_or_insert(r) != r {
            return Err(err(lineno, "mixed domain roles in one file".into()));
        }
        if *kind.get_or_insert(k) != k {
            return Err(err(lineno, "mixed payload kinds in one file".into()));
        }
        samples.push(LabeledSample { payload, label });
    }
    let role = role.ok_or_else(|| err(1, "no records".into()))?;
    let class_count = class_count.unwrap_or_else(|| samples.iter().filter_map(|s| s.label).max().map_or(0, |m| m + 1));
    let d = DomainDataset {
        role,
        samples,
        class_count,
        payload_kind: kind.unwrap(),
        provenance,
    };
    d.validate()?;
    Ok(d)
}

pub fn save_dataset(d: &DomainDataset, path: &Path) -> Result<()> {
    fs::write(path, format_dataset(d)).map_err(|e| Error::io(path, e))
}

pub fn load_dataset(path: &Path) -> Result<DomainDataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text).map_err(|e| match e {
        Error::Parse { location, reason } => Error::Parse {
            location: format!("{}:{location}", path.display()),
            reason,
        },
        other => other,
    })
}

/// `index,label` sidecar for quarantined target labels.
pub fn format_eval_labels(labels: &EvalLabels) -> String {
    let mut out = String::from("index,label\n");
    for (i, y) in labels.as_slice().iter().enumerate() {
        let _ = writeln!(out, "{i},{y}");
    }
    out
}

pub fn parse_eval_labels(text: &str) -> Result<EvalLabels> {
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            location: format!("labels line {}", i + 1),
            reason: format!("expected `index,label`, got `{line}`"),
        };
        let (idx, y) = line.split_once(',').ok_or_else(bad)?;
        let idx: usize = idx.trim().parse().map_err(|_| bad())?;
        if idx != labels.len() {
            return Err(bad());
        }
        labels.push(y.trim().parse().map_err(|_| bad())?);
    }
    Ok(EvalLabels::new(labels))
}

pub fn save_eval_labels(labels: &EvalLabels, path: &Path) -> Result<()> {
    fs::write(path, format_eval_labels(labels)).map_err(|e| Error::io(path, e))
}

pub fn load_eval_labels(path: &Path) -> Result<EvalLabels> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_eval_labels(&text)
}
