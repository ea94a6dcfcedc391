use std::io::Write;

use super::chain::{InequalityReport, StepStatus};
use crate::error::Result;

pub const CHAIN_CSV_HEADER: [&str; 11] = ["family", "N", "k", "q", "p", "beta", "step", "lhs", "rhs", "slack", "pass"];

/// One row per step per report.
pub fn write_chain_csv<W: Write>(reports: &[InequalityReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CHAIN_CSV_HEADER)?;
    for r in reports {
        for s in &r.steps {
            let pass = match &s.status {
                StepStatus::Pass => "true",
                StepStatus::Fail => "false",
                StepStatus::Skipped(_) => "skipped",
            };
            w.write_record([
                r.family.clone(),
                r.n.to_string(),
                r.params.k.to_string(),
                r.params.q.to_string(),
                r.params.p.to_string(),
                r.params.beta.to_string(),
                s.name.clone(),
                s.lhs.to_string(),
                s.rhs.to_string(),
                s.slack().to_string(),
                pass.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
