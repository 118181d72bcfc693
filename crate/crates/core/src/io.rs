//! Result files: `runs.csv`, `summary.json`, `hist.csv` and `levels.csv`.
//!
//! Floating-point fields are written with Rust's shortest round-trip
//! formatting (scientific notation in `runs.csv`), so statistics recomputed from `runs.csv` match the ones in
//! `summary.json` and reruns produce byte-identical files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, RawConfig};
use crate::error::FormatError;
use crate::estimators::LevelRecord;
use crate::harness::{RecordStatus, ReplicationSummary, RunRecord};

const RUNS_HEADER: [&str; 5] = ["run_id", "pf_hat", "levels", "n_evals", "status"];

/// Writes one row per run. `bins > 0` appends the columns
/// `pi_hat_1..pi_hat_bins`.
pub fn write_runs_csv<W: Write>(
    out: W,
    records: &[RunRecord],
    bins: usize,
) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = RUNS_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend((1..=bins).map(|j| format!("pi_hat_{j}")));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.run_id.to_string(),
            r.pf_hat.map(|p| format!("{p:e}")).unwrap_or_default(),
            r.levels.to_string(),
            r.n_evals.to_string(),
            r.status.to_string(),
        ];
        for j in 0..bins {
            row.push(
                r.pi_hats
                    .get(j)
                    .map(|p| format!("{p:e}"))
                    .unwrap_or_default(),
            );
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn field(rec: &csv::StringRecord, i: usize, line: usize) -> Result<&str, FormatError> {
    rec.get(i).ok_or_else(|| FormatError::Malformed {
        line,
        reason: format!("missing column {}", i + 1),
    })
}

fn num<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T, FormatError> {
    s.trim().parse().map_err(|_| FormatError::Malformed {
        line,
        reason: format!("invalid {what} `{s}`"),
    })
}

fn opt_f64(s: &str, what: &str, line: usize) -> Result<Option<f64>, FormatError> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        num(s, what, line).map(Some)
    }
}

/// Parses a `runs.csv` file back into records.
pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    if header.len() < RUNS_HEADER.len() || header.iter().zip(RUNS_HEADER).any(|(a, b)| a != b) {
        return Err(FormatError::Malformed {
            line: 1,
            reason: "unexpected header".into(),
        });
    }
    let bins = header.len() - RUNS_HEADER.len();
    for (j, name) in header.iter().skip(RUNS_HEADER.len()).enumerate() {
        if name != format!("pi_hat_{}", j + 1) {
            return Err(FormatError::Malformed {
                line: 1,
                reason: format!("unexpected column `{name}`"),
            });
        }
    }
    let mut records = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let row = row?;
        let line = k + 2;
        let status: RecordStatus = field(&row, 4, line)?
            .parse()
            .map_err(|reason| FormatError::Malformed { line, reason })?;
        let mut pi_hats = Vec::with_capacity(bins);
        for j in 0..bins {
            if let Some(p) = opt_f64(field(&row, 5 + j, line)?, "pi_hat", line)? {
                pi_hats.push(p);
            }
        }
        records.push(RunRecord {
            run_id: num(field(&row, 0, line)?, "run_id", line)?,
            pf_hat: opt_f64(field(&row, 1, line)?, "pf_hat", line)?,
            levels: num(field(&row, 2, line)?, "levels", line)?,
            n_evals: num(field(&row, 3, line)?, "n_evals", line)?,
            status,
            pi_hats,
        });
    }
    Ok(records)
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    #[serde(flatten)]
    pub summary: ReplicationSummary,
    /// Fully resolved configuration of the experiment.
    pub config: RawConfig,
}

impl SummaryFile {
    pub fn new(summary: ReplicationSummary, config: &ExperimentConfig) -> Self {
        SummaryFile {
            summary,
            config: config.to_raw(),
        }
    }
}

pub fn write_summary_json<W: Write>(mut out: W, file: &SummaryFile) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut out, file)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_summary_json<R: Read>(input: R) -> Result<SummaryFile, FormatError> {
    Ok(serde_json::from_reader(input)?)
}

/// Width of the `log10(pf_hat)` histogram bins.
pub const HIST_WIDTH: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Histogram of `log10(pf_hat)` over usable runs, with bin edges on
/// multiples of [`HIST_WIDTH`] covering the data range.
pub fn log_histogram(records: &[RunRecord]) -> Vec<HistBin> {
    let idx: Vec<i64> = records
        .iter()
        .filter(|r| r.is_usable())
        .filter_map(|r| r.pf_hat)
        .map(|p| (p.log10() / HIST_WIDTH).floor() as i64)
        .collect();
    let (Some(&lo), Some(&hi)) = (idx.iter().min(), idx.iter().max()) else {
        return Vec::new();
    };
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for k in idx {
        counts[(k - lo) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let k = lo + i as i64;
            HistBin {
                lo: k as f64 * HIST_WIDTH,
                hi: (k + 1) as f64 * HIST_WIDTH,
                count,
            }
        })
        .collect()
}

pub fn write_hist_csv<W: Write>(out: W, bins: &[HistBin]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["log10_lo", "log10_hi", "count"])?;
    for b in bins {
        w.write_record([
            format!("{:.1}", b.lo),
            format!("{:.1}", b.hi),
            b.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-level trace: thresholds and particle counts per bin.
pub fn write_levels_csv<W: Write>(out: W, trace: &[LevelRecord]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    let bins = trace.first().map_or(0, |r| r.thresholds.len());
    let mut header: Vec<String> = ["level", "seeds", "finished_mass", "unresolved_bound"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=bins).map(|j| format!("gamma_{j}")));
    header.extend((1..=bins).map(|j| format!("count_{j}")));
    w.write_record(&header)?;
    for r in trace {
        let mut row = vec![
            r.level.to_string(),
            r.seeds.map(|m| m.to_string()).unwrap_or_default(),
            r.finished_mass.to_string(),
            r.unresolved_bound.to_string(),
        ];
        row.extend(r.thresholds.iter().map(|g| g.to_string()));
        row.extend(r.counts.iter().map(|c| c.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
