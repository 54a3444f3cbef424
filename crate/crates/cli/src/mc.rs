use std::fs;
use std::time::Instant;

use serde::Serialize;
use surface_threshold::analysis::{
    find_crossing, nishimori_energy_check, read_raw_series, threshold_scan, write_curve_table, write_raw_series,
    xi_curves, CrossingResult, FileHeader, NishimoriCheck, ThresholdEstimate, Verdict,
};
use surface_threshold::ptmc::{run_disorder_ensemble, RunOptions, RunOutcome, SampleResult};

use crate::config::RunConfig;
use crate::output::OutDir;
use crate::CliError;

pub fn mc_run(config: &RunConfig, out: &OutDir, resume: bool, dry_run: bool) -> Result<(), CliError> {
    let seed = config.seed()?;
    let mc = config.mc()?;
    let hash = config.mc_hash()?;
    let runs = mc.runs(seed)?;
    for (p, spec) in &runs {
        let stem = mc.stem(*p, spec.l);
        let raw = out.path("raw", &format!("{stem}.tsv"));
        if dry_run {
            let protocol = &spec.protocol;
            println!(
                "{stem}: {} samples, {} temperatures in [{}, {}], equilibration <= {} sweeps, {} measurement sweeps -> {}",
                protocol.samples,
                spec.ladder.len(),
                mc.ladder.t_min,
                mc.ladder.t_max,
                protocol.max_equilibration_sweeps(),
                protocol.measure_sweeps,
                raw.display()
            );
            continue;
        }
        if raw_is_current(&raw, &hash) {
            eprintln!("{stem}: up to date");
            continue;
        }
        let checkpoint = out.path("checkpoints", &format!("{stem}.ckpt"));
        if checkpoint.exists() && !resume {
            return Err(CliError::Usage(format!(
                "{} exists; pass --resume to continue it",
                checkpoint.display()
            )));
        }
        fs::create_dir_all(checkpoint.parent().unwrap()).map_err(|e| CliError::Io(e.to_string()))?;
        let started = Instant::now();
        eprintln!("{stem}: running");
        let options = RunOptions {
            checkpoint: Some(checkpoint.clone()),
            resume,
            halt_after_checkpoints: None,
        };
        let RunOutcome::Completed(results) = run_disorder_ensemble(spec, &options)? else {
            unreachable!("runs without a halt hook always complete");
        };
        let header = FileHeader {
            config_hash: hash.clone(),
            master_seed: seed,
            extra: vec![
                ("model".into(), spec.model.label().into()),
                ("p".into(), p.to_string()),
                ("L".into(), spec.l.to_string()),
                ("nishimori_beta".into(), spec.model.nishimori_beta()?.to_string()),
            ],
        };
        let path = out.write("raw", &format!("{stem}.tsv"), &write_raw_series(&header, &results))?;
        let converged = results.iter().filter(|r| r.equilibration.converged).count();
        eprintln!(
            "{stem}: done in {:.0} s, equilibration converged for {converged}/{} samples",
            started.elapsed().as_secs_f64(),
            results.len()
        );
        for (k, rate) in mean_exchange_rates(&results).into_iter().enumerate() {
            if !(0.05..0.95).contains(&rate) {
                eprintln!(
                    "{stem}: warning: exchange acceptance {rate:.3} between rungs {k} and {} lies outside (0.05, 0.95)",
                    k + 1
                );
            }
        }
        out.record(seed, &[(out.relative(&path), hash.clone())])?;
        fs::remove_file(&checkpoint).map_err(|e| CliError::Io(format!("{}: {e}", checkpoint.display())))?;
    }
    Ok(())
}

/// Swap acceptance per adjacent rung pair, averaged over disorder samples.
fn mean_exchange_rates(results: &[SampleResult]) -> Vec<f64> {
    let pairs = results.first().map_or(0, |r| r.exchange_rates.len());
    (0..pairs)
        .map(|k| results.iter().map(|r| r.exchange_rates[k]).sum::<f64>() / results.len() as f64)
        .collect()
}

fn raw_is_current(path: &std::path::Path, hash: &str) -> bool {
    fs::read_to_string(path).is_ok_and(|t| t.lines().any(|l| l == format!("# config_hash {hash}")))
}

#[derive(Debug, Serialize)]
struct AnalysisSummary {
    format_version: u32,
    config_hash: String,
    master_seed: u64,
    model: String,
    points: Vec<PointSummary>,
    threshold: Option<ThresholdEstimate>,
    threshold_error: Option<String>,
}

#[derive(Debug, Serialize)]
struct PointSummary {
    #[serde(flatten)]
    crossing: CrossingResult,
    /// Disorder samples per size.
    samples: Vec<(usize, usize)>,
    /// Fraction of samples whose equilibration test passed, per size.
    converged: Vec<(usize, f64)>,
    /// Energy at the Nishimori point against its exact value, per size.
    nishimori_energy: Vec<NishimoriCheck>,
}

/// Reads every raw series, classifies each `p` and scans for the threshold.
/// Returns `false` when the threshold is not bracketed or sizes are missing.
pub fn analyze(config: &RunConfig, out: &OutDir) -> Result<bool, CliError> {
    let seed = config.seed()?;
    let mc = config.mc()?;
    let hash = config.analysis_hash()?;
    let mut missing = Vec::new();
    let mut loaded = Vec::new();
    for &p in &mc.p {
        for &l in &mc.sizes {
            let path = out.path("raw", &format!("{}.tsv", mc.stem(p, l)));
            match fs::read_to_string(&path) {
                Ok(text) => loaded.push((p, read_raw_series(&text)?)),
                Err(_) => missing.push(format!("(p = {p}, L = {l})")),
            }
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Io(format!("missing raw series for {}", missing.join(", "))));
    }

    let mut points = Vec::new();
    let mut recorded = Vec::new();
    for &p in &mc.p {
        let raws: Vec<_> = loaded.iter().filter(|(q, _)| *q == p).map(|(_, r)| r).collect();
        let series: Vec<_> = raws.iter().map(|r| r.series.clone()).collect();
        let samples = series.iter().map(|s| (s.l, s.samples())).collect();
        let converged = raws
            .iter()
            .map(|r| {
                let n = r.eq_converged.len().max(1) as f64;
                (r.series.l, r.eq_converged.iter().filter(|&&c| c).count() as f64 / n)
            })
            .collect();
        let model = mc.model_at(p);
        let (beta_n, exact) = (model.nishimori_beta()?, model.nishimori_energy()?);
        let nishimori_energy: Vec<NishimoriCheck> =
            raws.iter().filter_map(|r| nishimori_energy_check(r, beta_n, exact)).collect();
        for c in &nishimori_energy {
            if c.z().abs() > 3.0 {
                eprintln!(
                    "p = {p}, L = {}: warning: Nishimori energy {:.5} +- {:.5} differs from exact {:.5}",
                    c.l, c.measured, c.err, c.exact
                );
            }
        }
        let crossing = match xi_curves(&series, config.analysis.resamples, seed) {
            Ok(curves) => {
                let header = FileHeader {
                    config_hash: hash.clone(),
                    master_seed: seed,
                    extra: vec![("p".into(), p.to_string())],
                };
                let name = format!("xi_{}_p{p}.tsv", mc.kind_label());
                let path = out.write("analysis", &name, &write_curve_table(&header, &curves))?;
                recorded.push((out.relative(&path), hash.clone()));
                find_crossing(&curves, config.analysis.z)
            }
            Err(e) => {
                eprintln!("p = {p}: {e}");
                CrossingResult {
                    p,
                    verdict: Verdict::Inconclusive,
                    t_c: None,
                    pairs: Vec::new(),
                }
            }
        };
        println!(
            "p = {p}: {}{}",
            crossing.verdict.label(),
            crossing.t_c.map_or(String::new(), |(t, e)| format!(", T_c = {t:.4} +- {e:.4}"))
        );
        points.push(PointSummary {
            crossing,
            samples,
            converged,
            nishimori_energy,
        });
    }

    let grid: Vec<_> = points.iter().map(|s| (s.crossing.p, s.crossing.verdict)).collect();
    let (threshold, threshold_error) = match threshold_scan(&grid) {
        Ok(t) => {
            println!("p_c = {} +- {} (bracket {} .. {})", t.p_c, t.half_width, t.bracket.0, t.bracket.1);
            (Some(t), None)
        }
        Err(e) => {
            println!("{e}");
            (None, Some(e.to_string()))
        }
    };
    let bracketed = threshold.is_some();
    let summary = AnalysisSummary {
        format_version: 1,
        config_hash: hash.clone(),
        master_seed: seed,
        model: mc.kind_label().into(),
        points,
        threshold,
        threshold_error,
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n";
    let path = out.write("analysis", "summary.json", &text)?;
    recorded.push((out.relative(&path), hash));
    out.record(seed, &recorded)?;
    Ok(bracketed && mc.sizes.len() >= 2)
}
