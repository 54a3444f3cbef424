//! Minimum-weight matching decoders and their logical error rates.
//!
//! Two matching graphs share the X-stabilizer nodes plus one boundary node.
//! The iid graph has one edge per data qubit, weighted by the qubit's total
//! marginal flip rate. The correlation-aware graph weights those edges by the
//! single-qubit rate alone and adds one edge per diagonal edge of the
//! error-edge map, so a pair error costs one edge instead of two.

use mwmatching::{Matching, SENTINEL};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eem::{log_odds, mechanism_coset_table, CosetTable, EdgeFamily, EdgeSet, EffectiveParams};
use crate::error::{Error, Result};
use crate::layout::{CodeLayout, MechanismSet, Syndrome};
use crate::rng;

const TAG_TRIAL: u64 = 0x5452_4941;

/// Largest defect count the subset-pairing matcher accepts.
pub const DEFECT_CAP: usize = 22;

/// Edge weights are rounded to multiples of `1 / WEIGHT_SCALE` for the
/// integer blossom solver.
pub const WEIGHT_SCALE: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderMode {
    /// Pair errors folded into independent single-qubit rates.
    Iid,
    /// Pair errors matched as their own edges.
    CorrelationAware,
}

impl DecoderMode {
    pub fn label(self) -> &'static str {
        match self {
            DecoderMode::Iid => "iid",
            DecoderMode::CorrelationAware => "correlated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "iid" => Some(DecoderMode::Iid),
            "correlated" | "correlation-aware" => Some(DecoderMode::CorrelationAware),
            _ => None,
        }
    }
}

/// How defects are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Matcher {
    /// Blossom algorithm; no defect limit.
    #[default]
    Blossom,
    /// Exact subset dynamic programme; syndromes above [`DEFECT_CAP`] are discarded.
    SubsetDp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingEdge {
    pub ends: [usize; 2],
    pub weight: f64,
    /// Data qubits flipped when the edge is used.
    pub support: Vec<usize>,
    pub family: EdgeFamily,
}

/// Decoding graph with all-pairs shortest paths.
#[derive(Debug, Clone)]
pub struct MatchingGraph {
    mode: DecoderMode,
    num_qubits: usize,
    boundary: usize,
    edges: Vec<MatchingEdge>,
    dist: Vec<f64>,
    /// Qubits flipped by the shortest path between two nodes.
    paths: Vec<Vec<u32>>,
}

/// Single-qubit flip probability with the pair channels folded in: the
/// chance of an odd number of flips among the single mechanism and the
/// `pairs` pair mechanisms containing the qubit.
pub fn marginal_flip_probability(p1: f64, p2: f64, pairs: usize) -> f64 {
    if p2 == 0.0 || pairs == 0 {
        return p1;
    }
    0.5 * (1.0 - (1.0 - 2.0 * p1) * (1.0 - 2.0 * p2).powi(pairs as i32))
}

fn check_open_half(name: &str, p: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { p >= 0.0 } else { p > 0.0 };
    if ok && p < 0.5 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {p} must lie in (0, 1/2)")))
    }
}

impl MatchingGraph {
    /// `p2 = 0` is accepted; zero-probability edges are left out.
    pub fn build(layout: &CodeLayout, p1: f64, p2: f64, mode: DecoderMode) -> Result<Self> {
        check_open_half("p1", p1, false)?;
        check_open_half("p2", p2, true)?;
        let eem = EdgeSet::build(layout);
        // Diagonal rates vanish with p2; those edges are simply absent.
        let params = (p2 > 0.0).then(|| EffectiveParams::new(p1, p2)).transpose()?;
        let mut pairs_of = vec![0usize; layout.num_qubits()];
        for pair in layout.pairs() {
            pairs_of[pair.qubits[0]] += 1;
            pairs_of[pair.qubits[1]] += 1;
        }
        let mut edges = Vec::new();
        for (e, edge) in eem.edges().iter().enumerate() {
            let p = match (mode, edge.family) {
                (DecoderMode::Iid, EdgeFamily::L1) => {
                    marginal_flip_probability(p1, p2, pairs_of[edge.support[0]])
                }
                (DecoderMode::Iid, _) => continue,
                (DecoderMode::CorrelationAware, EdgeFamily::L1) => p1,
                (DecoderMode::CorrelationAware, _) => match &params {
                    Some(params) => eem.edge_probability(e, params),
                    None => continue,
                },
            };
            edges.push(MatchingEdge {
                ends: edge.ends,
                weight: log_odds(p),
                support: edge.support.clone(),
                family: edge.family,
            });
        }
        Ok(Self::from_edges(mode, layout.num_qubits(), eem.boundary_node(), edges))
    }

    /// Floyd-Warshall over the node graph, keeping the cheapest parallel edge.
    fn from_edges(mode: DecoderMode, num_qubits: usize, boundary: usize, edges: Vec<MatchingEdge>) -> Self {
        let n = boundary + 1;
        let mut dist = vec![f64::INFINITY; n * n];
        let mut first: Vec<Option<usize>> = vec![None; n * n];
        let mut via: Vec<Option<usize>> = vec![None; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        for (k, e) in edges.iter().enumerate() {
            let [a, b] = e.ends;
            if e.weight < dist[a * n + b] {
                dist[a * n + b] = e.weight;
                dist[b * n + a] = e.weight;
                first[a * n + b] = Some(k);
                first[b * n + a] = Some(k);
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let d = dik + dist[k * n + j];
                    if d < dist[i * n + j] {
                        dist[i * n + j] = d;
                        via[i * n + j] = Some(k);
                    }
                }
            }
        }
        let mut paths = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                if dist[i * n + j].is_infinite() {
                    continue;
                }
                let mut flips = vec![false; num_qubits];
                let mut stack = vec![(i, j)];
                while let Some((a, b)) = stack.pop() {
                    match via[a * n + b] {
                        Some(k) => {
                            stack.push((a, k));
                            stack.push((k, b));
                        }
                        None => {
                            if let Some(e) = first[a * n + b] {
                                for &q in &edges[e].support {
                                    flips[q] ^= true;
                                }
                            }
                        }
                    }
                }
                let path: Vec<u32> = (0..num_qubits).filter(|&q| flips[q]).map(|q| q as u32).collect();
                paths[j * n + i] = path.clone();
                paths[i * n + j] = path;
            }
        }
        MatchingGraph {
            mode,
            num_qubits,
            boundary,
            edges,
            dist,
            paths,
        }
    }

    pub fn mode(&self) -> DecoderMode {
        self.mode
    }

    pub fn edges(&self) -> &[MatchingEdge] {
        &self.edges
    }

    pub fn boundary_node(&self) -> usize {
        self.boundary
    }

    pub fn num_nodes(&self) -> usize {
        self.boundary + 1
    }

    /// Shortest-path weight between two nodes.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.num_nodes() + b]
    }

    /// Same graph with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| MatchingEdge {
                weight: e.weight * factor,
                ..e.clone()
            })
            .collect();
        Self::from_edges(self.mode, self.num_qubits, self.boundary, edges)
    }

    fn path(&self, a: usize, b: usize) -> &[u32] {
        &self.paths[a * self.num_nodes() + b]
    }

    /// Total weight of a pairing.
    pub fn pairing_weight(&self, syndrome: &Syndrome, pairing: &Pairing) -> f64 {
        let d = syndrome.defects();
        pairing
            .iter()
            .map(|&(i, j)| match j {
                Some(j) => self.distance(d[i], d[j]),
                None => self.distance(d[i], self.boundary),
            })
            .sum()
    }

    /// Correction support of a pairing.
    pub fn correction(&self, syndrome: &Syndrome, pairing: &Pairing) -> Vec<bool> {
        let d = syndrome.defects();
        let mut z = vec![false; self.num_qubits];
        for &(i, j) in pairing {
            let other = j.map_or(self.boundary, |j| d[j]);
            for &q in self.path(d[i], other) {
                z[q as usize] ^= true;
            }
        }
        z
    }
}

/// Defect `i` paired with defect `j`, or with the boundary when `None`.
/// Indices refer to positions in the syndrome's defect list.
pub type Pairing = Vec<(usize, Option<usize>)>;

/// Minimum-weight pairing via the blossom algorithm. Each defect gets a
/// boundary twin; twins pair among themselves at zero cost.
pub fn blossom_pairing(graph: &MatchingGraph, syndrome: &Syndrome) -> Result<Pairing> {
    let d = syndrome.defects();
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let b = graph.boundary;
    let to_int = |w: f64| (w * WEIGHT_SCALE).round() as i64;
    let mut raw: Vec<(usize, usize, i64)> = Vec::new();
    for i in 0..n {
        let wib = graph.distance(d[i], b);
        if wib.is_finite() {
            raw.push((i, n + i, to_int(wib)));
        }
        for j in i + 1..n {
            let wij = graph.distance(d[i], d[j]);
            // A defect pair costlier than both boundary routes never helps.
            if wij.is_finite() && !(wij >= wib + graph.distance(d[j], b)) {
                raw.push((i, j, to_int(wij)));
            }
            raw.push((n + i, n + j, 0));
        }
    }
    let top = raw.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    if top > i32::MAX as i64 / 4 {
        return Err(Error::Capacity(format!("matching weights overflow at {} defects", n)));
    }
    let edges = raw.into_iter().map(|(i, j, w)| (i, j, (top - w) as i32)).collect();
    let mate = Matching::new(edges).max_cardinality().solve();
    let mut pairing = Vec::with_capacity(n);
    for i in 0..n {
        let m = *mate.get(i).unwrap_or(&SENTINEL);
        if m == SENTINEL {
            return Err(Error::Degenerate(format!("defect {} left unmatched", d[i])));
        }
        if m == n + i {
            pairing.push((i, None));
        } else if m < n && m > i {
            pairing.push((i, Some(m)));
        } else if m >= n {
            return Err(Error::Degenerate("defect matched to a foreign boundary twin".into()));
        }
    }
    Ok(pairing)
}

/// Exact minimum-weight pairing by dynamic programming over defect subsets:
/// the lowest remaining defect either goes to the boundary or pairs with one
/// other remaining defect.
pub fn subset_dp_pairing(graph: &MatchingGraph, syndrome: &Syndrome) -> Result<Pairing> {
    let d = syndrome.defects();
    let n = d.len();
    if n > DEFECT_CAP {
        return Err(Error::Capacity(format!("{n} defects exceed the cap of {DEFECT_CAP}")));
    }
    let full = (1usize << n) - 1;
    let mut cost = vec![f64::INFINITY; full + 1];
    let mut choice = vec![0u8; full + 1];
    cost[0] = 0.0;
    let to_b: Vec<f64> = d.iter().map(|&s| graph.distance(s, graph.boundary)).collect();
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = to_b[i] + cost[rest];
        let mut pick = i;
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let c = graph.distance(d[i], d[j]) + cost[rest & !(1 << j)];
            if c < best {
                best = c;
                pick = j;
            }
        }
        cost[mask] = best;
        choice[mask] = pick as u8;
    }
    if cost[full].is_infinite() {
        return Err(Error::Degenerate("syndrome cannot be matched".into()));
    }
    let mut pairing = Vec::with_capacity(n);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask] as usize;
        if j == i {
            pairing.push((i, None));
            mask &= !(1 << i);
        } else {
            pairing.push((i, Some(j)));
            mask &= !(1 << i) & !(1 << j);
        }
    }
    Ok(pairing)
}

/// Correction support for a syndrome.
pub fn decode(graph: &MatchingGraph, syndrome: &Syndrome) -> Result<Vec<bool>> {
    decode_with(graph, syndrome, Matcher::Blossom)
}

pub fn decode_with(graph: &MatchingGraph, syndrome: &Syndrome, matcher: Matcher) -> Result<Vec<bool>> {
    let pairing = match matcher {
        Matcher::Blossom => blossom_pairing(graph, syndrome)?,
        Matcher::SubsetDp => subset_dp_pairing(graph, syndrome)?,
    };
    Ok(graph.correction(syndrome, &pairing))
}

/// Maximum-likelihood coset choice for small codes.
#[derive(Debug, Clone)]
pub struct MlDecoder {
    table: CosetTable,
}

impl MlDecoder {
    /// Errors with capacity for `d > 3`.
    pub fn new(layout: &CodeLayout, p1: f64, p2: f64) -> Result<Self> {
        Ok(MlDecoder {
            table: mechanism_coset_table(layout, p1, p2)?,
        })
    }

    /// `true` when the odd coset (odd overlap with the logical X support) is
    /// more probable.
    pub fn decode(&self, syndrome: &Syndrome) -> Result<bool> {
        let sums = self.table.get(syndrome)?;
        Ok(sums.logical > sums.trivial)
    }
}

/// Maximum-likelihood coset parity for one syndrome.
pub fn ml_decode(layout: &CodeLayout, syndrome: &Syndrome, p1: f64, p2: f64) -> Result<bool> {
    MlDecoder::new(layout, p1, p2)?.decode(syndrome)
}

/// One decoded noise realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeTrial {
    pub mechanisms: MechanismSet,
    pub syndrome: Syndrome,
    pub correction: Vec<bool>,
    /// Overlap parity of error plus correction with the logical X support.
    pub residual_logical: bool,
    pub success: bool,
}

/// Noise of trial `index` in the stream `seed`; identical across decoders.
pub fn trial_mechanisms(layout: &CodeLayout, p1: f64, p2: f64, seed: u64, index: u64) -> Result<MechanismSet> {
    let tags = [TAG_TRIAL, layout.distance() as u64, p1.to_bits(), p2.to_bits(), index];
    layout.sample_mechanisms_with(p1, p2, &mut rng::stream(seed, &tags, 0))
}

/// Decodes one realisation and checks the correction reproduces the syndrome.
pub fn run_trial(layout: &CodeLayout, graph: &MatchingGraph, mechanisms: MechanismSet, matcher: Matcher) -> Result<DecodeTrial> {
    let error = mechanisms.net_support(layout);
    let syndrome = layout.syndrome_of(&error);
    let correction = decode_with(graph, &syndrome, matcher)?;
    assert_eq!(layout.syndrome_of(&correction), syndrome, "correction must reproduce the syndrome");
    let residual: Vec<bool> = error.iter().zip(&correction).map(|(a, b)| a ^ b).collect();
    let residual_logical = layout.logical_parity(&residual);
    Ok(DecodeTrial {
        mechanisms,
        syndrome,
        correction,
        residual_logical,
        success: !residual_logical,
    })
}

/// Monte Carlo failure rate with a 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub d: usize,
    pub p: f64,
    pub mode: DecoderMode,
    pub trials: u64,
    pub failures: u64,
    /// Trials whose syndrome exceeded the matcher's capacity.
    pub discards: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let phat = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Logical failure rate of matching at `p1 = p2 = p`.
pub fn logical_error_rate(d: usize, p: f64, mode: DecoderMode, trials: u64, seed: u64) -> Result<RateEstimate> {
    logical_error_rate_with(d, p, p, mode, trials, seed, Matcher::Blossom)
}

pub fn logical_error_rate_with(
    d: usize,
    p1: f64,
    p2: f64,
    mode: DecoderMode,
    trials: u64,
    seed: u64,
    matcher: Matcher,
) -> Result<RateEstimate> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let layout = CodeLayout::new(d)?;
    let (failures, discards) = if p1 == 0.0 && p2 == 0.0 {
        (0, 0)
    } else {
        let graph = MatchingGraph::build(&layout, p1, p2, mode)?;
        let outcomes: Vec<Option<bool>> = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<Option<bool>> {
                let mech = trial_mechanisms(&layout, p1, p2, seed, t)?;
                match run_trial(&layout, &graph, mech, matcher) {
                    Ok(trial) => Ok(Some(trial.success)),
                    Err(Error::Capacity(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<_>>()?;
        let discards = outcomes.iter().filter(|o| o.is_none()).count() as u64;
        let failures = outcomes.iter().filter(|o| **o == Some(false)).count() as u64;
        (failures, discards)
    };
    let kept = trials - discards;
    let (ci_low, ci_high) = wilson_interval(failures, kept);
    Ok(RateEstimate {
        d,
        p: p1,
        mode,
        trials,
        failures,
        discards,
        rate: if kept == 0 { f64::NAN } else { failures as f64 / kept as f64 },
        ci_low,
        ci_high,
    })
}

/// Threshold from pairwise crossings of failure-rate curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderThreshold {
    pub mode: DecoderMode,
    pub p_th: f64,
    /// Half the range of the pairwise crossings.
    pub spread: f64,
    pub crossings: Vec<((usize, usize), f64)>,
}

/// Crossing of each size pair by linear interpolation of log failure rate
/// in `p`; the threshold is their mean.
pub fn estimate_decoder_threshold(rates: &[RateEstimate]) -> Result<DecoderThreshold> {
    let mode = rates
        .first()
        .ok_or_else(|| Error::Insufficient("no rates".into()))?
        .mode;
    let mut sizes: Vec<usize> = rates.iter().map(|r| r.d).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(Error::Insufficient(format!("need at least 2 sizes, got {}", sizes.len())));
    }
    let curve = |d: usize| -> Vec<(f64, f64)> {
        let mut c: Vec<(f64, f64)> = rates
            .iter()
            .filter(|r| r.d == d && r.mode == mode)
            .map(|r| {
                let kept = (r.trials - r.discards).max(1) as f64;
                // Zero counts sit at half an event so the logarithm stays finite.
                (r.p, (r.failures as f64).max(0.5).ln() - kept.ln())
            })
            .collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    };
    let mut crossings = Vec::new();
    for (a, &da) in sizes.iter().enumerate() {
        for &db in &sizes[a + 1..] {
            let (ca, cb) = (curve(da), curve(db));
            if ca.len() != cb.len() || ca.iter().zip(&cb).any(|(x, y)| x.0 != y.0) {
                return Err(Error::Parameter(format!("sizes {da} and {db} use different p grids")));
            }
            let diff: Vec<(f64, f64)> = ca.iter().zip(&cb).map(|(x, y)| (x.0, y.1 - x.1)).collect();
            // Below threshold the larger code fails less often.
            if let Some(w) = diff.windows(2).find(|w| w[0].1 < 0.0 && w[1].1 >= 0.0) {
                let t = -w[0].1 / (w[1].1 - w[0].1);
                crossings.push(((da, db), w[0].0 + t * (w[1].0 - w[0].0)));
            }
        }
    }
    if crossings.is_empty() {
        return Err(Error::Unbracketed(format!("no size pair crosses in the {} grid", mode.label())));
    }
    let ps: Vec<f64> = crossings.iter().map(|c| c.1).collect();
    let mean = ps.iter().sum::<f64>() / ps.len() as f64;
    let lo = ps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(DecoderThreshold {
        mode,
        p_th: mean,
        spread: 0.5 * (hi - lo),
        crossings,
    })
}

pub const BENCH_COLUMNS: &str = "d\tp\tmode\ttrials\tfailures\tdiscards\trate\tci_low\tci_high";

/// Tab-separated benchmark table body (without provenance header).
pub fn write_rate_rows(rates: &[RateEstimate]) -> String {
    let mut out = String::new();
    out.push_str(BENCH_COLUMNS);
    out.push('\n');
    for r in rates {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.8e}\t{:.8e}\t{:.8e}\n",
            r.d,
            r.p,
            r.mode.label(),
            r.trials,
            r.failures,
            r.discards,
            r.rate,
            r.ci_low,
            r.ci_high
        ));
    }
    out
}

/// Parses rows written by [`write_rate_rows`]; `#` lines are skipped.
pub fn read_rate_rows(text: &str) -> Result<Vec<RateEstimate>> {
    let bad = |m: String| Error::Format(format!("rate table: {m}"));
    let mut rows = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    if rows.next() != Some(BENCH_COLUMNS) {
        return Err(bad("unexpected column header".into()));
    }
    rows.map(|row| {
        let f: Vec<&str> = row.split('\t').collect();
        if f.len() != 9 {
            return Err(bad(format!("row has {} fields", f.len())));
        }
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("bad integer {s:?}")));
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number {s:?}")));
        Ok(RateEstimate {
            d: int(f[0])? as usize,
            p: num(f[1])?,
            mode: DecoderMode::parse(f[2]).ok_or_else(|| bad(format!("bad mode {:?}", f[2])))?,
            trials: int(f[3])?,
            failures: int(f[4])?,
            discards: int(f[5])?,
            rate: num(f[6])?,
            ci_low: num(f[7])?,
            ci_high: num(f[8])?,
        })
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(d: usize, p: f64, mode: DecoderMode) -> (CodeLayout, MatchingGraph) {
        let layout = CodeLayout::new(d).unwrap();
        let g = MatchingGraph::build(&layout, p, p, mode).unwrap();
        (layout, g)
    }

    #[test]
    fn marginal_matches_explicit_convolution() {
        let (p1, p2): (f64, f64) = (0.03, 0.05);
        let two = p1 * (1.0 - p2).powi(2) + (1.0 - p1) * 2.0 * p2 * (1.0 - p2) + p1 * p2 * p2;
        assert!((marginal_flip_probability(p1, p2, 2) - two).abs() < 1e-15);
        assert_eq!(marginal_flip_probability(p1, 0.0, 4), p1);
    }

    #[test]
    fn edge_counts() {
        let layout = CodeLayout::new(3).unwrap();
        let eem = EdgeSet::build(&layout);
        let (_, iid) = graph(3, 0.02, DecoderMode::Iid);
        let (_, cor) = graph(3, 0.02, DecoderMode::CorrelationAware);
        assert_eq!(iid.edges().len(), eem.count(EdgeFamily::L1));
        assert_eq!(cor.edges().len(), eem.len());
    }

    #[test]
    fn zero_pair_rate_gives_identical_graphs() {
        let layout = CodeLayout::new(4).unwrap();
        let a = MatchingGraph::build(&layout, 0.05, 0.0, DecoderMode::Iid).unwrap();
        let b = MatchingGraph::build(&layout, 0.05, 0.0, DecoderMode::CorrelationAware).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn weights_positive_and_boundary_reachable() {
        for mode in [DecoderMode::Iid, DecoderMode::CorrelationAware] {
            let (_, g) = graph(5, 0.45, mode);
            assert!(g.edges().iter().all(|e| e.weight > 0.0));
            for s in 0..g.boundary_node() {
                assert!(g.distance(s, g.boundary_node()).is_finite());
            }
        }
    }

    #[test]
    fn rejects_bad_rates() {
        let layout = CodeLayout::new(3).unwrap();
        assert!(MatchingGraph::build(&layout, 0.0, 0.1, DecoderMode::Iid).is_err());
        assert!(MatchingGraph::build(&layout, 0.1, 0.5, DecoderMode::Iid).is_err());
    }

    #[test]
    fn empty_and_adjacent_syndromes() {
        let (layout, g) = graph(5, 0.01, DecoderMode::Iid);
        assert!(decode(&g, &Syndrome::default()).unwrap().iter().all(|&b| !b));
        // A bulk qubit lights its two neighbouring X stabilizers.
        let q = layout.qubit_at(crate::layout::Coord::new(4, 4)).unwrap();
        let mut z = vec![false; layout.num_qubits()];
        z[q] = true;
        let s = layout.syndrome_of(&z);
        assert_eq!(s.len(), 2);
        assert_eq!(decode(&g, &s).unwrap(), z);
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 1000);
        assert!(lo < 0.03 && 0.03 < hi);
        assert_eq!(wilson_interval(0, 100).0, 0.0);
    }

    #[test]
    fn zero_noise_never_fails() {
        let r = logical_error_rate(5, 0.0, DecoderMode::Iid, 100, 1).unwrap();
        assert_eq!((r.failures, r.rate), (0, 0.0));
        assert!(logical_error_rate(5, 0.01, DecoderMode::Iid, 0, 1).is_err());
    }

    #[test]
    fn rate_table_roundtrip() {
        let r = logical_error_rate(3, 0.05, DecoderMode::CorrelationAware, 500, 3).unwrap();
        let back = read_rate_rows(&write_rate_rows(std::slice::from_ref(&r))).unwrap();
        assert_eq!(back[0].failures, r.failures);
        assert_eq!(back[0].mode, r.mode);
    }

    #[test]
    fn ml_prefers_trivial_coset_for_empty_syndrome() {
        let layout = CodeLayout::new(3).unwrap();
        assert!(!ml_decode(&layout, &Syndrome::default(), 0.01, 0.01).unwrap());
        assert!(ml_decode(&CodeLayout::new(4).unwrap(), &Syndrome::default(), 0.01, 0.01).is_err());
    }
}
