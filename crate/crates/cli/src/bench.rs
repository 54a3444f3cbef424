use std::fs;
use std::time::Instant;

use serde::Serialize;
use surface_threshold::analysis::FileHeader;
use surface_threshold::decoder::{
    estimate_decoder_threshold, logical_error_rate, read_rate_rows, write_rate_rows, DecoderMode,
    DecoderThreshold, RateEstimate,
};

use crate::config::RunConfig;
use crate::output::OutDir;
use crate::CliError;

pub const BENCH_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
struct BenchSummary {
    format_version: u32,
    config_hash: String,
    master_seed: u64,
    thresholds: Vec<ModeSummary>,
}

#[derive(Debug, Serialize)]
struct ModeSummary {
    mode: DecoderMode,
    threshold: Option<DecoderThreshold>,
    error: Option<String>,
}

/// Failure-rate grid for every mode, distance and rate, then one threshold
/// per mode. The rate table is rewritten after every point so an interrupted
/// run resumes where it stopped.
pub fn decode_bench(config: &RunConfig, out: &OutDir, dry_run: bool) -> Result<(), CliError> {
    let seed = config.seed()?;
    let bench = config.bench()?;
    let hash = config.bench_hash()?;
    if bench.trials == 0 {
        return Err(CliError::Usage("bench.trials must be at least 1".into()));
    }
    let modes = bench
        .modes
        .iter()
        .map(|m| DecoderMode::parse(m).ok_or_else(|| CliError::Usage(format!("unknown decoder mode {m:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(DecoderMode, usize, f64)> = modes
        .iter()
        .flat_map(|&m| bench.distances.iter().flat_map(move |&d| bench.p.iter().map(move |&p| (m, d, p))))
        .collect();
    if dry_run {
        for (m, d, p) in &points {
            println!("{} d = {d} p = {p}: {} trials", m.label(), bench.trials);
        }
        return Ok(());
    }

    let header = FileHeader {
        config_hash: hash.clone(),
        master_seed: seed,
        extra: vec![("bench_format_version".into(), BENCH_FORMAT_VERSION.to_string())],
    };
    let table_path = out.path("bench", "rates.tsv");
    let mut rates: Vec<RateEstimate> = match fs::read_to_string(&table_path) {
        Ok(text) if FileHeader::parse(&text).get("config_hash") == Some(&hash) => read_rate_rows(&text)?,
        _ => Vec::new(),
    };
    for &(mode, d, p) in &points {
        if rates.iter().any(|r| r.mode == mode && r.d == d && r.p == p) {
            continue;
        }
        let started = Instant::now();
        let r = logical_error_rate(d, p, mode, bench.trials, seed)?;
        eprintln!(
            "{} d = {d} p = {p}: {} / {} failures ({:.1} s)",
            mode.label(),
            r.failures,
            r.trials,
            started.elapsed().as_secs_f64()
        );
        rates.push(r);
        write_table(out, &header, &points, &rates)?;
    }
    let path = write_table(out, &header, &points, &rates)?;

    let mut all_bracketed = true;
    let mut thresholds = Vec::new();
    for &mode in &modes {
        let subset: Vec<RateEstimate> = rates.iter().filter(|r| r.mode == mode).cloned().collect();
        let summary = match estimate_decoder_threshold(&subset) {
            Ok(t) => {
                println!("{}: p_th = {:.5} +- {:.5}", mode.label(), t.p_th, t.spread);
                ModeSummary {
                    mode,
                    threshold: Some(t),
                    error: None,
                }
            }
            Err(e) => {
                println!("{}: {e}", mode.label());
                all_bracketed = false;
                ModeSummary {
                    mode,
                    threshold: None,
                    error: Some(e.to_string()),
                }
            }
        };
        thresholds.push(summary);
    }
    let summary = BenchSummary {
        format_version: BENCH_FORMAT_VERSION,
        config_hash: hash.clone(),
        master_seed: seed,
        thresholds,
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n";
    let summary_path = out.write("bench", "summary.json", &text)?;
    out.record(
        seed,
        &[(out.relative(&path), hash.clone()), (out.relative(&summary_path), hash)],
    )?;
    if all_bracketed {
        Ok(())
    } else {
        Err(CliError::Check("a decoder threshold is not bracketed; partial curves were written".into()))
    }
}

/// Rows in grid order, so the table does not depend on resume history.
fn write_table(
    out: &OutDir,
    header: &FileHeader,
    points: &[(DecoderMode, usize, f64)],
    rates: &[RateEstimate],
) -> Result<std::path::PathBuf, CliError> {
    let ordered: Vec<RateEstimate> = points
        .iter()
        .filter_map(|&(m, d, p)| rates.iter().find(|r| r.mode == m && r.d == d && r.p == p).cloned())
        .collect();
    let mut text = String::new();
    header.write(&mut text, "decoder failure rates");
    text.push_str(&write_rate_rows(&ordered));
    out.write("bench", "rates.tsv", &text)
}
