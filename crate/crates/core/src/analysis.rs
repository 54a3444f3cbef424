//! Correlation lengths, finite-size crossings and threshold brackets.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ptmc::{SampleResult, SPIN_OFFSETS};
use crate::rbim::CellSpinLattice;
use crate::rng;

pub use crate::rbim::domain_wall_delta;

/// `|sum_i s_i exp(i k x_i)|^2 / L^2` for one snapshot of `(x, s)` pairs.
pub fn susceptibility(spins: &[(f64, f64)], l: usize, k: f64) -> f64 {
    let (re, im) = spins.iter().fold((0.0, 0.0), |(re, im), &(x, s)| {
        (re + s * (k * x).cos(), im + s * (k * x).sin())
    });
    (re * re + im * im) / (l * l) as f64
}

/// All `4 L^2` spins of a lattice with their x-positions.
pub fn lattice_spins(lattice: &CellSpinLattice) -> Vec<(f64, f64)> {
    (0..lattice.num_cells())
        .flat_map(|c| {
            let x = (c % lattice.width()) as f64;
            lattice
                .spins(c)
                .into_iter()
                .zip(SPIN_OFFSETS)
                .map(move |(s, off)| (x + off, s as f64))
        })
        .collect()
}

/// Smallest non-zero wave number on a ring of `l` cells.
pub fn k_min(l: usize) -> f64 {
    2.0 * PI / l as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationLength {
    pub xi: f64,
    /// Set when `chi0 < chik`, which only happens through noise.
    pub clamped: bool,
}

/// Second-moment correlation length
/// `xi = sqrt(chi0 / chik - 1) / (2 sin(k_min / 2))`.
pub fn correlation_length(chi0: f64, chik: f64, l: usize) -> Result<CorrelationLength> {
    if !(chik > 0.0) {
        return Err(Error::Degenerate(format!("chi(k_min) = {chik} must be positive")));
    }
    let r = chi0 / chik - 1.0;
    let scale = 2.0 * (k_min(l) / 2.0).sin();
    if r < 0.0 {
        return Ok(CorrelationLength { xi: 0.0, clamped: true });
    }
    Ok(CorrelationLength {
        xi: r.sqrt() / scale,
        clamped: false,
    })
}

/// Per-sample thermal means for one `(p, L)`: `chi0[sample][t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub p: f64,
    pub l: usize,
    pub temperatures: Vec<f64>,
    pub chi0: Vec<Vec<f64>>,
    pub chik: Vec<Vec<f64>>,
}

impl ObservableSeries {
    pub fn from_results(p: f64, l: usize, results: &[SampleResult]) -> Result<Self> {
        let first = results
            .first()
            .ok_or_else(|| Error::Insufficient(format!("no samples for p = {p}, L = {l}")))?;
        let temperatures = first.means.iter().map(|m| 1.0 / m.beta).collect();
        Ok(ObservableSeries {
            p,
            l,
            temperatures,
            chi0: results.iter().map(|r| r.means.iter().map(|m| m.chi0).collect()).collect(),
            chik: results.iter().map(|r| r.means.iter().map(|m| m.chik).collect()).collect(),
        })
    }

    pub fn samples(&self) -> usize {
        self.chi0.len()
    }

    fn xi_over_l(&self, idx: &[usize], t: usize) -> f64 {
        let n = idx.len() as f64;
        let c0 = idx.iter().map(|&i| self.chi0[i][t]).sum::<f64>() / n;
        let ck = idx.iter().map(|&i| self.chik[i][t]).sum::<f64>() / n;
        correlation_length(c0, ck, self.l).map_or(0.0, |x| x.xi) / self.l as f64
    }
}

/// Disorder-averaged `xi / L` against temperature for one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiCurve {
    pub p: f64,
    pub l: usize,
    pub temperatures: Vec<f64>,
    pub xi_over_l: Vec<f64>,
    pub err: Vec<f64>,
    pub chi0: Vec<f64>,
    pub chik: Vec<f64>,
    pub samples: usize,
}

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// `xi / L` curves with bootstrap errors over disorder samples.
pub fn xi_curves(series: &[ObservableSeries], resamples: usize, seed: u64) -> Result<Vec<XiCurve>> {
    if series.len() < 2 {
        return Err(Error::Insufficient(format!("need at least 2 sizes, got {}", series.len())));
    }
    let temps = &series[0].temperatures;
    if temps.len() < 3 {
        return Err(Error::Insufficient(format!("need at least 3 temperatures, got {}", temps.len())));
    }
    series.iter().map(|s| xi_curve(s, temps, resamples, seed)).collect()
}

pub fn xi_curve(s: &ObservableSeries, temps: &[f64], resamples: usize, seed: u64) -> Result<XiCurve> {
    if s.temperatures.len() != temps.len() || s.temperatures.iter().zip(temps).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::Parameter(format!("L = {} uses a different temperature grid", s.l)));
    }
    let n = s.samples();
    if n < 2 {
        return Err(Error::Insufficient(format!("L = {}: need at least 2 samples, got {n}", s.l)));
    }
    let all: Vec<usize> = (0..n).collect();
    let nt = temps.len();
    let central: Vec<f64> = (0..nt).map(|t| s.xi_over_l(&all, t)).collect();
    let mut rng = rng::stream(seed, &[s.l as u64, s.p.to_bits()], 0);
    // Welford accumulation: identical resamples give exactly zero spread.
    let mut mean = vec![0.0; nt];
    let mut m2 = vec![0.0; nt];
    let mut idx = vec![0; n];
    for r in 0..resamples {
        idx.iter_mut().for_each(|i| *i = rng.gen_range(0..n));
        for t in 0..nt {
            let v = s.xi_over_l(&idx, t);
            let delta = v - mean[t];
            mean[t] += delta / (r + 1) as f64;
            m2[t] += delta * (v - mean[t]);
        }
    }
    let r = resamples.max(2) as f64;
    let err = m2.iter().map(|&m| (m / (r - 1.0)).max(0.0).sqrt()).collect();
    let avg = |v: &Vec<Vec<f64>>, t: usize| v.iter().map(|x| x[t]).sum::<f64>() / n as f64;
    Ok(XiCurve {
        p: s.p,
        l: s.l,
        temperatures: temps.to_vec(),
        xi_over_l: central,
        err,
        chi0: (0..nt).map(|t| avg(&s.chi0, t)).collect(),
        chik: (0..nt).map(|t| avg(&s.chik, t)).collect(),
        samples: n,
    })
}

/// Monotone piecewise-cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d = vec![delta[0]; 2];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
                let v = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
                if v * d0 <= 0.0 {
                    0.0
                } else if d0 * d1 <= 0.0 && v.abs() > 3.0 * d0.abs() {
                    3.0 * d0
                } else {
                    v
                }
            };
            d[0] = end(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s).powi(2),
            s * (1.0 - s).powi(2),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

fn linear(x: &[f64], y: &[f64], t: f64) -> f64 {
    let n = x.len();
    let i = x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
    let s = (t - x[i]) / (x[i + 1] - x[i]);
    y[i] + s * (y[i + 1] - y[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Crossing,
    NoCrossing,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Crossing => "crossing",
            Verdict::NoCrossing => "no-crossing",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub sizes: (usize, usize),
    /// Intersection temperature and its error, when the pair crosses.
    pub t_cross: Option<(f64, f64)>,
    /// Every interpolated intersection with its error.
    pub candidates: Vec<(f64, f64)>,
    /// The larger size lies significantly above somewhere.
    pub larger_above: bool,
    /// The smaller size lies significantly above somewhere.
    pub smaller_above: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub p: f64,
    pub verdict: Verdict,
    pub t_c: Option<(f64, f64)>,
    pub pairs: Vec<PairCrossing>,
}

/// Significance, in combined standard errors, for calling a curve above
/// another and for two intersections to agree.
pub const CROSSING_Z: f64 = 2.0;

fn pair_crossing(a: &XiCurve, b: &XiCurve, z: f64) -> PairCrossing {
    let t = &a.temperatures;
    let (fa, fb) = (Pchip::new(t, &a.xi_over_l), Pchip::new(t, &b.xi_over_l));
    let diff = |x: f64| fb.eval(x) - fa.eval(x);
    let sigma = |x: f64| (linear(t, &a.err, x).powi(2) + linear(t, &b.err, x).powi(2)).sqrt();
    let mut larger_above = false;
    let mut smaller_above = false;
    for i in 0..t.len() {
        let d = b.xi_over_l[i] - a.xi_over_l[i];
        let s = (a.err[i].powi(2) + b.err[i].powi(2)).sqrt();
        larger_above |= d > z * s;
        smaller_above |= d < -z * s;
    }
    let mut roots = Vec::new();
    if larger_above && smaller_above {
        for w in t.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (dlo, dhi) = (diff(lo), diff(hi));
            if dlo == 0.0 {
                roots.push(lo);
                continue;
            }
            if dlo * dhi > 0.0 {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if diff(mid) * dlo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    let slope = |x: f64| {
        let h = 1e-4 * (t[t.len() - 1] - t[0]);
        (diff(x + h) - diff(x - h)) / (2.0 * h)
    };
    let candidates: Vec<(f64, f64)> = roots
        .into_iter()
        .map(|r| (r, sigma(r) / slope(r).abs().max(1e-300)))
        .collect();
    // On its own a pair keeps its steepest, least noise-driven intersection.
    let t_cross = candidates.iter().copied().min_by(|x, y| x.1.total_cmp(&y.1));
    PairCrossing {
        sizes: (a.l, b.l),
        t_cross,
        candidates,
        larger_above,
        smaller_above,
    }
}

/// With several intersections on a pair, keeps the one that agrees with
/// candidates of the most other pairs; ties go to the smaller error.
fn pick_clustered(pairs: &mut [PairCrossing], z: f64) {
    let agree = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() <= z * (a.1 * a.1 + b.1 * b.1).sqrt();
    let chosen: Vec<Option<(f64, f64)>> = (0..pairs.len())
        .map(|i| {
            let support = |c: (f64, f64)| {
                (0..pairs.len())
                    .filter(|&j| j != i && pairs[j].candidates.iter().any(|&o| agree(c, o)))
                    .count()
            };
            pairs[i]
                .candidates
                .iter()
                .copied()
                .max_by(|&a, &b| support(a).cmp(&support(b)).then(b.1.total_cmp(&a.1)))
        })
        .collect();
    for (pair, c) in pairs.iter_mut().zip(chosen) {
        if c.is_some() {
            pair.t_cross = c;
        }
    }
}

/// Classifies a set of curves for one `p`.
///
/// A pair crosses when each curve lies significantly above the other
/// somewhere in the window. All pairs crossing at mutually consistent
/// temperatures gives `Crossing`; no pair crossing with the smaller sizes
/// above gives `NoCrossing`; anything else is `Inconclusive`.
pub fn find_crossing(curves: &[XiCurve], z: f64) -> CrossingResult {
    let mut sorted: Vec<&XiCurve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.l);
    let p = sorted.first().map_or(f64::NAN, |c| c.p);
    let mut pairs = Vec::new();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            pairs.push(pair_crossing(sorted[i], sorted[j], z));
        }
    }
    let inconclusive = |pairs| CrossingResult {
        p,
        verdict: Verdict::Inconclusive,
        t_c: None,
        pairs,
    };
    if pairs.is_empty() {
        return inconclusive(pairs);
    }
    if pairs.iter().all(|c| c.t_cross.is_some()) {
        pick_clustered(&mut pairs, z);
        let xs: Vec<(f64, f64)> = pairs.iter().map(|c| c.t_cross.unwrap()).collect();
        let agree = xs
            .iter()
            .all(|a| xs.iter().all(|b| (a.0 - b.0).abs() <= z * (a.1 * a.1 + b.1 * b.1).sqrt()));
        if !agree {
            return inconclusive(pairs);
        }
        let w: f64 = xs.iter().map(|x| 1.0 / (x.1 * x.1).max(1e-300)).sum();
        let mean = xs.iter().map(|x| x.0 / (x.1 * x.1).max(1e-300)).sum::<f64>() / w;
        // Pairs share curves, so their errors are not independent; quote the
        // best single pair rather than the inverse-variance combination.
        let err = xs.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        return CrossingResult {
            p,
            verdict: Verdict::Crossing,
            t_c: Some((mean, err)),
            pairs,
        };
    }
    if pairs.iter().all(|c| !c.larger_above) && pairs.iter().any(|c| c.smaller_above) {
        return CrossingResult {
            p,
            verdict: Verdict::NoCrossing,
            t_c: None,
            pairs,
        };
    }
    inconclusive(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub p_c: f64,
    pub half_width: f64,
    /// Largest crossing and smallest non-crossing rate.
    pub bracket: (f64, f64),
    pub grid: Vec<(f64, Verdict)>,
}

/// Brackets the threshold between the largest crossing `p` and the smallest
/// non-crossing `p` above it; reports the midpoint.
pub fn threshold_scan(verdicts: &[(f64, Verdict)]) -> Result<ThresholdEstimate> {
    let mut grid = verdicts.to_vec();
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = grid.iter().filter(|v| v.1 == Verdict::Crossing).map(|v| v.0).fold(f64::NAN, f64::max);
    if lo.is_nan() {
        return Err(Error::Unbracketed("no crossing in the grid; extend it to lower p".into()));
    }
    let hi = grid
        .iter()
        .filter(|v| v.1 == Verdict::NoCrossing && v.0 > lo)
        .map(|v| v.0)
        .fold(f64::NAN, f64::min);
    if hi.is_nan() {
        return Err(Error::Unbracketed(format!(
            "no non-crossing rate above p = {lo}; extend the grid to higher p"
        )));
    }
    Ok(ThresholdEstimate {
        p_c: 0.5 * (lo + hi),
        half_width: 0.5 * (hi - lo),
        bracket: (lo, hi),
        grid,
    })
}

pub const RAW_FORMAT_VERSION: u32 = 1;

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileHeader {
    pub config_hash: String,
    pub master_seed: u64,
    pub extra: Vec<(String, String)>,
}

impl FileHeader {
    pub fn write(&self, out: &mut String, kind: &str) {
        writeln!(out, "# {kind}").unwrap();
        writeln!(out, "# format_version {RAW_FORMAT_VERSION}").unwrap();
        writeln!(out, "# config_hash {}", self.config_hash).unwrap();
        writeln!(out, "# master_seed {}", self.master_seed).unwrap();
        for (k, v) in &self.extra {
            writeln!(out, "# {k} {v}").unwrap();
        }
    }

    pub fn parse(text: &str) -> BTreeMap<String, String> {
        text.lines()
            .filter_map(|l| l.strip_prefix("# "))
            .filter_map(|l| l.split_once(' '))
            .map(|(k, v)| (k.to_string(), v.trim().to_string()))
            .collect()
    }
}

const RAW_COLUMNS: &str = "sample\tT\tbeta\tchi0\tchik\tenergy\tsnapshots\teq_sweeps\teq_converged";

/// Tab-separated per-sample thermal means.
pub fn write_raw_series(header: &FileHeader, results: &[SampleResult]) -> String {
    let mut out = String::new();
    header.write(&mut out, "raw series");
    writeln!(out, "{RAW_COLUMNS}").unwrap();
    for r in results {
        for m in &r.means {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.sample,
                1.0 / m.beta,
                m.beta,
                m.chi0,
                m.chik,
                m.energy,
                m.snapshots,
                r.equilibration.sweeps,
                r.equilibration.converged as u8
            )
            .unwrap();
        }
    }
    out
}

/// Parsed raw series: header fields and per-sample rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub header: BTreeMap<String, String>,
    pub series: ObservableSeries,
    /// Total energy per sample and temperature.
    pub energy: Vec<Vec<f64>>,
    pub eq_sweeps: Vec<u64>,
    pub eq_converged: Vec<bool>,
}

pub fn read_raw_series(text: &str) -> Result<RawSeries> {
    let bad = |m: String| Error::Format(format!("raw series: {m}"));
    let header = FileHeader::parse(text);
    if header.get("format_version").map(String::as_str) != Some("1") {
        return Err(bad("missing or unsupported format_version".into()));
    }
    let field = |k: &str| header.get(k).ok_or_else(|| bad(format!("missing header field {k}")));
    let p: f64 = field("p")?.parse().map_err(|_| bad("bad p".into()))?;
    let l: usize = field("L")?.parse().map_err(|_| bad("bad L".into()))?;
    let mut rows = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    if rows.next() != Some(RAW_COLUMNS) {
        return Err(bad("unexpected column header".into()));
    }
    #[derive(Default)]
    struct Rows {
        t: Vec<f64>,
        chi0: Vec<f64>,
        chik: Vec<f64>,
        energy: Vec<f64>,
        eq_sweeps: u64,
        eq_converged: bool,
    }
    let mut samples: BTreeMap<usize, Rows> = BTreeMap::new();
    for row in rows {
        let f: Vec<&str> = row.split('\t').collect();
        if f.len() != 9 {
            return Err(bad(format!("row has {} fields", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number {s:?}")));
        let sample: usize = f[0].parse().map_err(|_| bad("bad sample".into()))?;
        let e = samples.entry(sample).or_default();
        e.t.push(num(f[1])?);
        e.chi0.push(num(f[3])?);
        e.chik.push(num(f[4])?);
        e.energy.push(num(f[5])?);
        e.eq_sweeps = f[7].parse().map_err(|_| bad("bad eq_sweeps".into()))?;
        e.eq_converged = f[8] == "1";
    }
    let temperatures = samples.values().next().map(|s| s.t.clone()).unwrap_or_default();
    if samples.values().any(|s| s.t != temperatures) {
        return Err(bad("samples use different temperature grids".into()));
    }
    let rows: Vec<Rows> = samples.into_values().collect();
    Ok(RawSeries {
        series: ObservableSeries {
            p,
            l,
            temperatures,
            chi0: rows.iter().map(|s| s.chi0.clone()).collect(),
            chik: rows.iter().map(|s| s.chik.clone()).collect(),
        },
        energy: rows.iter().map(|s| s.energy.clone()).collect(),
        eq_sweeps: rows.iter().map(|s| s.eq_sweeps).collect(),
        eq_converged: rows.iter().map(|s| s.eq_converged).collect(),
        header,
    })
}

/// Disorder-averaged energy per cell at the Nishimori point against its
/// exact value; a disagreement flags poor equilibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NishimoriCheck {
    pub l: usize,
    pub exact: f64,
    pub measured: f64,
    pub err: f64,
}

impl NishimoriCheck {
    pub fn z(&self) -> f64 {
        (self.measured - self.exact) / self.err
    }
}

/// Interpolates the per-cell energy linearly in `beta` to `beta_n`.
/// Returns `None` when `beta_n` lies outside the ladder or there are fewer
/// than two samples.
pub fn nishimori_energy_check(raw: &RawSeries, beta_n: f64, exact: f64) -> Option<NishimoriCheck> {
    let s = &raw.series;
    let n = raw.energy.len();
    if n < 2 {
        return None;
    }
    let cells = (s.l * s.l) as f64;
    let betas: Vec<f64> = s.temperatures.iter().map(|t| 1.0 / t).collect();
    // Temperatures increase, so betas decrease.
    let i = (0..betas.len().saturating_sub(1)).find(|&i| betas[i] >= beta_n && beta_n >= betas[i + 1])?;
    let w = (betas[i] - beta_n) / (betas[i] - betas[i + 1]);
    let per_sample: Vec<f64> = raw
        .energy
        .iter()
        .map(|e| ((1.0 - w) * e[i] + w * e[i + 1]) / cells)
        .collect();
    let mean = per_sample.iter().sum::<f64>() / n as f64;
    let var = per_sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some(NishimoriCheck {
        l: s.l,
        exact,
        measured: mean,
        err: (var / n as f64).sqrt(),
    })
}

/// Plot-ready table of curves.
pub fn write_curve_table(header: &FileHeader, curves: &[XiCurve]) -> String {
    let mut out = String::new();
    header.write(&mut out, "xi/L curves");
    writeln!(out, "p\tL\tT\txi_over_L\terr\tchi0\tchik\tn_samples").unwrap();
    for c in curves {
        for t in 0..c.temperatures.len() {
            writeln!(
                out,
                "{}\t{}\t{:.10}\t{:.10e}\t{:.10e}\t{:.10e}\t{:.10e}\t{}",
                c.p, c.l, c.temperatures[t], c.xi_over_l[t], c.err[t], c.chi0[t], c.chik[t], c.samples
            )
            .unwrap();
        }
    }
    out
}
