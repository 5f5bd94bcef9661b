use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss_total: f64,
    pub loss_ent: Option<f64>,
    pub loss_div: Option<f64>,
    pub loss_pl: Option<f64>,
    pub src_acc: Option<f64>,
    pub tgt_acc: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    pub records: Vec<EpochRecord>,
    /// Not written to CSV, so that logs of identical runs stay identical.
    pub wall_time: Duration,
    pub warnings: Vec<String>,
}

pub const TRAIN_LOG_HEADER: &str = "epoch,loss_total,loss_ent,loss_div,loss_pl,src_acc,tgt_acc";

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl TrainLog {
    pub fn push(&mut self, r: EpochRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if r.epoch <= last.epoch {
                return Err(Error::config(
                    "train_log",
                    format!("epoch {} after {}", r.epoch, last.epoch),
                ));
            }
        }
        for a in [r.src_acc, r.tgt_acc].into_iter().flatten() {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Numeric {
                    op: "train_log accuracy",
                });
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(TRAIN_LOG_HEADER);
        s.push('\n');
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{:.6},{},{},{},{},{}",
                r.epoch,
                r.loss_total,
                cell(r.loss_ent),
                cell(r.loss_div),
                cell(r.loss_pl),
                cell(r.src_acc),
                cell(r.tgt_acc)
            );
        }
        s
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}
