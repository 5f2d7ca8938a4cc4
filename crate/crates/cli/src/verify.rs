//! Re-reads the per-run CSVs of an output directory and checks that every
//! recorded duality gap is bounded by the scaled sum of regrets.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};
use crate::report::RUN_COLUMNS;
use crate::run::AGGREGATE_FILE;

/// Absolute slack, scaled by the larger of one and the compared magnitudes.
pub const VERIFY_SLACK: f64 = 1e-9;

#[derive(Debug, Default, Serialize)]
pub struct VerifyReport {
    pub files: usize,
    pub rows: usize,
    /// Rows that carry a duality gap.
    pub checked: usize,
    pub violations: Vec<String>,
}

fn run_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let input = |message: String| CliError::Input {
        path: dir.to_path_buf(),
        message,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| input(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "csv") && p.file_name().is_some_and(|n| n != AGGREGATE_FILE)
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(input("no run CSVs found".into()));
    }
    Ok(files)
}

fn parse(path: &Path, raw: &str) -> Result<Option<f64>> {
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse().map(Some).map_err(|_| CliError::Input {
        path: path.to_path_buf(),
        message: format!("{raw:?} is not a number"),
    })
}

pub fn verify(dir: &Path) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    for path in run_files(dir)? {
        let input = |message: String| CliError::Input {
            path: path.clone(),
            message,
        };
        let mut rdr = csv::Reader::from_path(&path).map_err(|e| input(e.to_string()))?;
        let header = rdr.headers().map_err(|e| input(e.to_string()))?.clone();
        if header.iter().ne(RUN_COLUMNS) {
            return Err(input(format!("unexpected header {header:?}")));
        }
        for record in rdr.records() {
            let record = record.map_err(|e| input(e.to_string()))?;
            report.rows += 1;
            let gap = parse(&path, &record[1])?;
            let regret = parse(&path, &record[2])?
                .ok_or_else(|| input(format!("iteration {} has no regret", &record[0])))?;
            if let Some(gap) = gap {
                report.checked += 1;
                let slack = VERIFY_SLACK * 1f64.max(gap.abs()).max(regret.abs());
                let bounded = gap <= regret + slack;
                if !bounded {
                    let name = path.file_name().unwrap_or_default().to_string_lossy();
                    report
                        .violations
                        .push(format!("{name} iteration {}: gap {gap:e} > {regret:e}", &record[0]));
                }
            }
        }
        report.files += 1;
    }
    Ok(report)
}
