//! Metric CSVs. Floats carry 17 significant digits; undefined metrics are
//! empty fields.

use crate::error::{CliError, Result};

pub const RUN_COLUMNS: [&str; 4] = [
    "iteration",
    "duality_gap_avg_iterates",
    "regret_sum_scaled",
    "primal_objective",
];

/// One recorded checkpoint of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub iteration: usize,
    pub duality_gap: Option<f64>,
    pub regret_sum_scaled: f64,
    pub primal_objective: Option<f64>,
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn field(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Config(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Config(format!("csv: {e}"))
}

pub fn run_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RUN_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.iteration.to_string(),
            field(r.duality_gap),
            format_float(r.regret_sum_scaled),
            field(r.primal_objective),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Mean and population standard deviation of the defined values.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

type Metric = fn(&Row) -> Option<f64>;

/// Per-algorithm, per-iteration mean and standard deviation across seeds.
/// Iterations missing from some runs (different horizons) average over the
/// runs that recorded them; `runs` counts those.
pub fn aggregate_csv(groups: &[(&str, Vec<&[Row]>)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["algorithm".to_string(), "iteration".to_string(), "runs".to_string()];
    for col in &RUN_COLUMNS[1..] {
        header.push(format!("{col}_mean"));
        header.push(format!("{col}_std"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for (algorithm, runs) in groups {
        let mut iterations: Vec<usize> = runs.iter().flat_map(|r| r.iter().map(|row| row.iteration)).collect();
        iterations.sort_unstable();
        iterations.dedup();
        for t in iterations {
            let at: Vec<&Row> = runs
                .iter()
                .filter_map(|r| r.iter().find(|row| row.iteration == t))
                .collect();
            let mut record = vec![algorithm.to_string(), t.to_string(), at.len().to_string()];
            let metrics: [Metric; 3] = [|r| r.duality_gap, |r| Some(r.regret_sum_scaled), |r| r.primal_objective];
            for metric in metrics {
                let values: Vec<f64> = at.iter().filter_map(|r| metric(r)).collect();
                match mean_std(&values) {
                    Some((m, s)) => record.extend([format_float(m), format_float(s)]),
                    None => record.extend([String::new(), String::new()]),
                }
            }
            w.write_record(&record).map_err(csv_err)?;
        }
    }
    finish(w)
}
