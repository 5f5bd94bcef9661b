use std::fmt::Write as _;

use rayon::prelude::*;

use super::cases::{exact_case_decomposition, zeta, CaseTableCounts};
use super::setup::{optimal_threshold, Independence, LinearFd, TheoremSetup};
use crate::error::{Error, Result};
use crate::metrics::binomial_stderr;
use crate::numerics::mix::convex_mix_slice;

pub const PERFECT_SEPARATION: &str = "perfect accuracy for domain classifier";
pub const GENERIC_INSEPARABLE: &str = "generic domains impossible to separate";

/// Per-λ Monte-Carlo quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaRow {
    pub lambda: f64,
    pub phi_sm: f64,
    pub phi_tm: f64,
    pub zeta_s: f64,
    pub zeta_t: f64,
    pub dh_mix: f64,
    pub fact_gap: f64,
    /// Binomial stderr of `dh_mix`.
    pub stderr: f64,
    pub cases_s: CaseTableCounts,
    pub cases_t: CaseTableCounts,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub lambda: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub f_d: LinearFd,
    pub phi_s: f64,
    pub phi_t: f64,
    pub phi_sg: f64,
    pub phi_tg: f64,
    pub dh_orig: f64,
    pub dh_orig_stderr: f64,
    pub rows: Vec<LambdaRow>,
    pub assertions: Vec<Assertion>,
}

pub const THEOREM_HEADER: &str =
    "lambda,phi_s,phi_t,phi_sg,phi_tg,phi_sm,phi_tm,zeta_s,zeta_t,dH_orig,dH_mix,fact_gap,stderr";

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(THEOREM_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                r.lambda,
                self.phi_s,
                self.phi_t,
                self.phi_sg,
                self.phi_tg,
                r.phi_sm,
                r.phi_tm,
                r.zeta_s,
                r.zeta_t,
                self.dh_orig,
                r.dh_mix,
                r.fact_gap,
                r.stderr
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for a in &self.assertions {
            let _ = writeln!(
                s,
                "{} {} lambda={:.6} {}",
                if a.pass { "PASS" } else { "FAIL" },
                a.name,
                a.lambda,
                a.detail
            );
        }
        let _ = writeln!(s, "{}", if self.passed() { "OVERALL PASS" } else { "OVERALL FAIL" });
        s
    }
}

fn domain_accuracy(f_d: &LinearFd, source: &[f64], target: &[f64]) -> f64 {
    0.5 * ((1.0 - f_d.positive_rate(source)) + f_d.positive_rate(target))
}

fn paired(z: &[f64], from: &super::setup::Gaussian1d, to: &super::setup::Gaussian1d) -> Vec<f64> {
    z.iter()
        .map(|v| to.mean + to.std * (v - from.mean) / from.std)
        .collect()
}

pub fn verify_theorem1(setup: &TheoremSetup) -> Result<TheoremReport> {
    setup.validate()?;
    let n = setup.samples;
    let z_s = setup.source.sample(n, setup.seed, "theorem/source")?;
    let z_t = setup.target.sample(n, setup.seed, "theorem/target")?;
    let (z_sg, z_tg) = match setup.independence {
        Independence::Independent => (
            setup.source_generic.sample(n, setup.seed, "theorem/source-generic")?,
            setup.target_generic.sample(n, setup.seed, "theorem/target-generic")?,
        ),
        Independence::Paired => (
            paired(&z_s, &setup.source, &setup.source_generic),
            paired(&z_t, &setup.target, &setup.target_generic),
        ),
    };

    let (f_d, _) = match setup.f_d {
        Some(f) => (f, 0.0),
        None => optimal_threshold(&z_s, &z_t),
    };
    if setup.assert_assumptions {
        let acc = domain_accuracy(&f_d, &z_s, &z_t);
        if acc <= 0.999 {
            return Err(Error::Assumption {
                assumption: PERFECT_SEPARATION,
                detail: format!("domain classifier accuracy {acc:.6} on the original domains is not above 0.999"),
            });
        }
        let acc_g = domain_accuracy(&f_d, &z_sg, &z_tg);
        if (acc_g - 0.5).abs() > 0.01 {
            return Err(Error::Assumption {
                assumption: GENERIC_INSEPARABLE,
                detail: format!(
                    "domain classifier accuracy {acc_g:.6} on the generic domains is not within 0.5 +- 0.01"
                ),
            });
        }
    }

    let phi_s = f_d.positive_rate(&z_s);
    let phi_t = f_d.positive_rate(&z_t);
    let phi_sg = f_d.positive_rate(&z_sg);
    let phi_tg = f_d.positive_rate(&z_tg);
    let dh_orig = (phi_t - phi_s).abs();
    let dh_orig_stderr = (binomial_stderr(phi_s, n).powi(2) + binomial_stderr(phi_t, n).powi(2)).sqrt();

    let rows = setup
        .lambdas
        .par_iter()
        .map(|&lambda| -> Result<LambdaRow> {
            let z_sm = convex_mix_slice(&z_s, &z_sg, lambda);
            let z_tm = convex_mix_slice(&z_t, &z_tg, lambda);
            let phi_sm = f_d.positive_rate(&z_sm);
            let phi_tm = f_d.positive_rate(&z_tm);
            let zeta_s = zeta(&z_sg, &z_s, lambda, &f_d)?;
            let zeta_t = zeta(&z_tg, &z_t, lambda, &f_d)?;
            let (mix_fd, dh_mix) = optimal_threshold(&z_sm, &z_tm);
            let stderr = (binomial_stderr(mix_fd.positive_rate(&z_sm), n).powi(2)
                + binomial_stderr(mix_fd.positive_rate(&z_tm), n).powi(2))
            .sqrt();
            Ok(LambdaRow {
                lambda,
                phi_sm,
                phi_tm,
                zeta_s,
                zeta_t,
                dh_mix,
                fact_gap: (phi_sm - (phi_s * (1.0 - zeta_s) + zeta_s / 2.0)).abs(),
                stderr,
                cases_s: exact_case_decomposition(&z_sg, &z_s, lambda, &f_d)?,
                cases_t: exact_case_decomposition(&z_tg, &z_t, lambda, &f_d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut assertions = Vec::new();
    for r in &rows {
        let tol = 3.0 * (r.stderr.powi(2) + dh_orig_stderr.powi(2)).sqrt();
        assertions.push(Assertion {
            name: "dH_mix_le_dH_orig".into(),
            lambda: r.lambda,
            pass: r.dh_mix <= dh_orig + tol,
            detail: format!("dH_mix={:.6} dH_orig={:.6} tol={:.6}", r.dh_mix, dh_orig, tol),
        });
        let tol_s = 3.0 * (binomial_stderr(r.phi_sm, n).powi(2) + binomial_stderr(phi_s, n).powi(2)).sqrt();
        assertions.push(Assertion {
            name: "source_error_increases".into(),
            lambda: r.lambda,
            pass: r.phi_sm >= phi_s - tol_s,
            detail: format!("phi_sm={:.6} phi_s={:.6} tol={:.6}", r.phi_sm, phi_s, tol_s),
        });
        let tol_t = 3.0 * (binomial_stderr(r.phi_tm, n).powi(2) + binomial_stderr(phi_t, n).powi(2)).sqrt();
        assertions.push(Assertion {
            name: "target_accuracy_decreases".into(),
            lambda: r.lambda,
            pass: r.phi_tm <= phi_t + tol_t,
            detail: format!("phi_tm={:.6} phi_t={:.6} tol={:.6}", r.phi_tm, phi_t, tol_t),
        });
        let direct = z_s
            .iter()
            .zip(&z_sg)
            .filter(|(&x, &g)| r.lambda * f_d.eval(g) + (1.0 - r.lambda) * f_d.eval(x) > 0.0)
            .count() as u64;
        assertions.push(Assertion {
            name: "case_table_exact".into(),
            lambda: r.lambda,
            pass: r.cases_s.positive() == direct && r.cases_s.total() == n as u64,
            detail: format!("rows 1+2.1+3.1={} direct={}", r.cases_s.positive(), direct),
        });
    }
    Ok(TheoremReport {
        f_d,
        phi_s,
        phi_t,
        phi_sg,
        phi_tg,
        dh_orig,
        dh_orig_stderr,
        rows,
        assertions,
    })
}
