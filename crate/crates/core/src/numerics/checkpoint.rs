//! Flat binary parameter checkpoints: the magic `GMX1`, then for every
//! tensor its rank, its dims and its values, all little-endian 64-bit.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::mlp::ModelBundle;
use super::tensor::Tensor;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GMX1";

pub fn encode(tensors: &[&Tensor]) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    for t in tensors {
        out.extend_from_slice(&(t.shape().len() as u64).to_le_bytes());
        for &d in t.shape() {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for &v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Vec<Tensor>> {
    let bad = |reason: &str| Error::Parse {
        location: "checkpoint".into(),
        reason: reason.into(),
    };
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(bad("missing GMX1 magic"));
    }
    let mut cur = &bytes[4..];
    let next_u64 = |cur: &mut &[u8]| -> Result<u64> {
        let mut b = [0u8; 8];
        cur.read_exact(&mut b).map_err(|_| bad("truncated record"))?;
        Ok(u64::from_le_bytes(b))
    };
    let mut tensors = Vec::new();
    while !cur.is_empty() {
        let rank = next_u64(&mut cur)? as usize;
        if rank == 0 || rank > 8 {
            return Err(bad("implausible tensor rank"));
        }
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(next_u64(&mut cur)? as usize);
        }
        let n: usize = shape.iter().product();
        if cur.len() < n * 8 {
            return Err(bad("truncated tensor data"));
        }
        let data = (0..n)
            .map(|_| next_u64(&mut cur).map(f64::from_bits))
            .collect::<Result<Vec<_>>>()?;
        tensors.push(Tensor::new(shape, data)?);
    }
    Ok(tensors)
}

pub fn write_model<W: Write>(model: &ModelBundle, mut w: W) -> std::io::Result<()> {
    w.write_all(&encode(&model.params()))
}

pub fn save_model(model: &ModelBundle, path: &Path) -> Result<()> {
    fs::write(path, encode(&model.params())).map_err(|e| Error::io(path, e))
}

/// Loads parameters into a model of matching architecture.
pub fn load_model_into(model: &mut ModelBundle, path: &Path) -> Result<()> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    model.set_params(decode(&bytes)?)
}
