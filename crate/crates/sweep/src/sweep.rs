//! Grid sweeps, CSV output and run metadata.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::SweepConfig;
use crate::error::SweepError;
use crate::pipeline::{evaluate_point, SweepRecord};

pub const CSV_HEADER: [&str; 8] = ["e", "omega", "mu_min", "has_lindbladian", "frobenius_to_exact", "best_branch", "degenerate_flag", "wall_time_ms"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub points: usize,
    pub lindbladian: usize,
    pub non_lindbladian: usize,
    pub unbounded: usize,
    pub nan_points: usize,
    pub degenerate: usize,
    pub wall_time_ms: u64,
}

impl SweepSummary {
    pub fn from_records(records: &[SweepRecord]) -> Self {
        let mut s = SweepSummary { points: records.len(), ..Default::default() };
        for r in records {
            if r.mu_min.is_nan() {
                s.nan_points += 1;
            } else if r.has_lindbladian {
                s.lindbladian += 1;
            } else {
                s.non_lindbladian += 1;
                if r.mu_min.is_infinite() {
                    s.unbounded += 1;
                }
            }
            if r.degenerate_flag {
                s.degenerate += 1;
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

/// Grid points in output order: `ω` outer, `E` inner.
pub fn grid_points(config: &SweepConfig) -> Vec<(f64, f64)> {
    let es = config.e_range.values();
    config.omega_range.values().into_iter().flat_map(|w| es.iter().map(move |&e| (e, w))).collect()
}

/// Evaluates every grid point on `config.workers` threads with a static block partition.
pub fn compute_sweep(config: &SweepConfig) -> Result<SweepOutput, SweepError> {
    config.validate()?;
    let start = Instant::now();
    let points = grid_points(config);
    let chunk = points.len().div_ceil(config.workers.min(points.len()));
    let results: Vec<Vec<Result<SweepRecord, SweepError>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|block| scope.spawn(move || block.iter().map(|&(e, w)| evaluate_point(config, e, w)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let records = results.into_iter().flatten().collect::<Result<Vec<_>, _>>()?;
    let mut summary = SweepSummary::from_records(&records);
    summary.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(SweepOutput { records, summary })
}

/// `nan`, `inf`, or 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SweepError + '_ {
    move |source| SweepError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> SweepError + '_ {
    move |source| SweepError::Csv { path: path.display().to_string(), source }
}

pub fn write_csv<W: std::io::Write>(out: W, records: &[SweepRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            format_float(r.e),
            format_float(r.omega),
            format_float(r.mu_min),
            r.has_lindbladian.to_string(),
            format_float(r.frobenius_to_exact),
            r.best_branch.to_string(),
            r.degenerate_flag.to_string(),
            r.wall_time_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>, SweepError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let malformed = |reason: String| SweepError::Malformed { path: path.display().to_string(), reason };
    let header = reader.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(malformed(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let bad = |i: usize| malformed(format!("row {}: bad `{}` value `{}`", line + 1, CSV_HEADER[i], field(i)));
        let f = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
        let b = |i: usize| field(i).parse::<bool>().map_err(|_| bad(i));
        out.push(SweepRecord {
            e: f(0)?,
            omega: f(1)?,
            mu_min: f(2)?,
            has_lindbladian: b(3)?,
            frobenius_to_exact: f(4)?,
            best_branch: field(5).parse().map_err(|_| bad(5))?,
            degenerate_flag: b(6)?,
            wall_time_ms: field(7).parse().map_err(|_| bad(7))?,
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct Integrator {
    method: &'static str,
    steps_per_period: usize,
    t0: f64,
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    version: &'static str,
    config: &'a SweepConfig,
    integrator: Integrator,
    tol_mu: f64,
    summary: &'a SweepSummary,
}

/// Sidecar path `<output stem>.meta.json`.
pub fn metadata_path(output: &Path) -> PathBuf {
    output.with_extension("meta.json")
}

pub fn metadata_json(config: &SweepConfig, summary: &SweepSummary) -> Result<String, SweepError> {
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        config,
        integrator: Integrator { method: "rk4", steps_per_period: config.steps_per_period, t0: 0.0 },
        tol_mu: floquet_core::markovianity::TOL_MU,
        summary,
    };
    Ok(serde_json::to_string_pretty(&meta)?)
}

/// Validates, computes and writes the CSV and its metadata sidecar.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput, SweepError> {
    config.validate()?;
    let path = &config.output_path;
    let file = File::create(path).map_err(io_err(path))?;
    let meta_path = metadata_path(path);
    let meta_file = File::create(&meta_path).map_err(io_err(&meta_path))?;
    let output = compute_sweep(config)?;
    write_csv(file, &output.records).map_err(csv_err(path))?;
    serde_json::to_writer_pretty(meta_file, &serde_json::from_str::<serde_json::Value>(&metadata_json(config, &output.summary)?)?)?;
    Ok(output)
}
