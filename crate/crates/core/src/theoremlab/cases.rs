use crate::error::{Error, Result};

use super::setup::LinearFd;

/// Rows of the sign/magnitude case table for `a = λ·f_d(z_g)` and
/// `b = (1−λ)·f_d(z)`. Zero counts as non-positive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CaseTableCounts {
    /// `a > 0, b > 0`.
    pub row1: u64,
    /// `a > 0, b ≤ 0, a > −b`.
    pub row2_1: u64,
    /// `a > 0, b ≤ 0, a ≤ −b`.
    pub row2_2: u64,
    /// `a ≤ 0, b > 0, b > −a`.
    pub row3_1: u64,
    /// `a ≤ 0, b > 0, b ≤ −a`.
    pub row3_2: u64,
    /// `a ≤ 0, b ≤ 0`.
    pub row4: u64,
}

impl CaseTableCounts {
    pub fn total(&self) -> u64 {
        self.row1 + self.row2_1 + self.row2_2 + self.row3_1 + self.row3_2 + self.row4
    }

    /// Rows on which `a + b > 0`.
    pub fn positive(&self) -> u64 {
        self.row1 + self.row2_1 + self.row3_1
    }
}

fn check_pairs(z_g: &[f64], z: &[f64]) -> Result<()> {
    if z_g.len() != z.len() {
        return Err(Error::dim(
            "case_table",
            format!("{} generic vs {} original draws", z_g.len(), z.len()),
        ));
    }
    Ok(())
}

fn terms(zg: f64, z: f64, lambda: f64, f_d: &LinearFd) -> (f64, f64) {
    (lambda * f_d.eval(zg), (1.0 - lambda) * f_d.eval(z))
}

pub fn exact_case_decomposition(z_g: &[f64], z: &[f64], lambda: f64, f_d: &LinearFd) -> Result<CaseTableCounts> {
    check_pairs(z_g, z)?;
    let mut c = CaseTableCounts::default();
    for (&g, &x) in z_g.iter().zip(z) {
        let (a, b) = terms(g, x, lambda, f_d);
        match (a > 0.0, b > 0.0) {
            (true, true) => c.row1 += 1,
            (true, false) if a > -b => c.row2_1 += 1,
            (true, false) => c.row2_2 += 1,
            (false, true) if b > -a => c.row3_1 += 1,
            (false, true) => c.row3_2 += 1,
            (false, false) => c.row4 += 1,
        }
    }
    Ok(c)
}

/// Direct count of `λ·f_d(z_g) + (1−λ)·f_d(z) > 0`.
pub fn direct_positive_count(z_g: &[f64], z: &[f64], lambda: f64, f_d: &LinearFd) -> Result<u64> {
    check_pairs(z_g, z)?;
    Ok(z_g
        .iter()
        .zip(z)
        .filter(|(&g, &x)| {
            let (a, b) = terms(g, x, lambda, f_d);
            a + b > 0.0
        })
        .count() as u64)
}

/// Count of `λ·f_d(z_g) > (1−λ)·f_d(z)` and its complement.
pub fn zeta_counts(z_g: &[f64], z: &[f64], lambda: f64, f_d: &LinearFd) -> Result<(u64, u64)> {
    check_pairs(z_g, z)?;
    let hit = z_g
        .iter()
        .zip(z)
        .filter(|(&g, &x)| {
            let (a, b) = terms(g, x, lambda, f_d);
            a > b
        })
        .count() as u64;
    Ok((hit, z.len() as u64 - hit))
}

/// `ζ = Pr[λ·f_d(z_g) > (1−λ)·f_d(z)]`.
pub fn zeta(z_g: &[f64], z: &[f64], lambda: f64, f_d: &LinearFd) -> Result<f64> {
    let (hit, _) = zeta_counts(z_g, z, lambda, f_d)?;
    if z.is_empty() {
        return Err(Error::config("zeta", "no draws"));
    }
    Ok(hit as f64 / z.len() as f64)
}
