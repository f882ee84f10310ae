use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use lrssc::admm::SolverTrace;

pub const TRACE_HEADER: &str = "iter,r_jc1,r_jc2,r_jj,lagrangian,mu1,mu2";
pub const KKT_HEADER: &str = "termination,iterations,r1,r2,r3,r4,r5,knee_adjusted";

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn format_trace(trace: &SolverTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter,
            cell(r.r_jc1),
            cell(r.r_jc2),
            cell(r.r_jj),
            cell(r.lagrangian),
            cell(r.mu1),
            cell(r.mu2)
        );
    }
    out
}

pub fn format_kkt(trace: &SolverTrace) -> String {
    let mut out = String::from(KKT_HEADER);
    out.push('\n');
    let k = trace.kkt;
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        trace.termination,
        trace.iterations(),
        cell(k.map(|k| k.r1)),
        cell(k.and_then(|k| k.r2)),
        cell(k.map(|k| k.r3)),
        cell(k.map(|k| k.r4)),
        cell(k.and_then(|k| k.r5)),
        trace.knee_adjusted
    );
    out
}

pub fn write_trace(path: &Path, trace: &SolverTrace) -> Result<()> {
    std::fs::write(path, format_trace(trace)).with_context(|| format!("writing {}", path.display()))
}

pub fn write_kkt(path: &Path, trace: &SolverTrace) -> Result<()> {
    std::fs::write(path, format_kkt(trace)).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lrssc::admm::{IterationRecord, Termination};

    #[test]
    fn two_block_rows_leave_unused_columns_empty() {
        let mut t = SolverTrace::new();
        t.records.push(IterationRecord {
            iter: 1,
            r_jc1: Some(0.5),
            r_jj: Some(0.25),
            lagrangian: Some(3.0),
            mu2: Some(5.0),
            ..Default::default()
        });
        t.termination = Termination::Converged;
        assert_eq!(format_trace(&t), format!("{TRACE_HEADER}\n1,5e-1,,2.5e-1,3e0,,5e0\n"));
        assert_eq!(format_kkt(&t), format!("{KKT_HEADER}\nconverged,1,,,,,,false\n"));
    }
}
