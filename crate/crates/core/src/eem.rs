//! Error-edge map.
//!
//! Every error mechanism is owned by exactly one edge of the ancilla graph:
//! a single-qubit flip by the qubit's edge (family `l1`), and a pair flip by
//! the diagonal edge (`l2` or `l3`) of its plaquette that joins the two
//! vertices it lights up. The two pairs owned by a bulk diagonal edge multiply
//! to the plaquette stabilizer, so only their parity matters. Edge indicators
//! are therefore independent Bernoulli variables with rates
//! `p1`, `2 p2 (1 - p2)` (bulk diagonal) and `p2` (boundary diagonal, one pair).

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::layout::{CodeLayout, MechanismSet, PairKind, Syndrome};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeFamily {
    /// One per data qubit (horizontal or vertical edge).
    L1,
    /// Upper-left to lower-right diagonal of a plaquette.
    L2,
    /// Upper-right to lower-left diagonal of a plaquette.
    L3,
}

impl EdgeFamily {
    pub fn label(self) -> &'static str {
        match self {
            EdgeFamily::L1 => "l1",
            EdgeFamily::L2 => "l2",
            EdgeFamily::L3 => "l3",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "l1" => Some(EdgeFamily::L1),
            "l2" => Some(EdgeFamily::L2),
            "l3" => Some(EdgeFamily::L3),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeOwner {
    Qubit(usize),
    Pairs { plaquette: usize, pairs: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub family: EdgeFamily,
    /// Endpoint nodes; X-stabilizer indices or [`EdgeSet::boundary_node`].
    pub ends: [usize; 2],
    pub owner: EdgeOwner,
    /// Representative Z support of one indicator.
    pub support: Vec<usize>,
    /// Plaquettes the edge borders (l1) or lies inside (l2, l3).
    pub cells: Vec<usize>,
}

impl Edge {
    /// Diagonal edge owning a single pair mechanism (no cancellation partner).
    pub fn is_lone_diagonal(&self) -> bool {
        matches!(&self.owner, EdgeOwner::Pairs { pairs, .. } if pairs.len() == 1)
    }

    pub fn touches_boundary(&self, boundary: usize) -> bool {
        self.ends.contains(&boundary)
    }
}

#[derive(Debug, Clone)]
pub struct EdgeSet {
    edges: Vec<Edge>,
    qubit_edge: Vec<usize>,
    pair_edge: Vec<usize>,
    boundary_node: usize,
}

impl EdgeSet {
    pub fn build(layout: &CodeLayout) -> Self {
        let boundary_node = layout.x_stabilizers().len();
        let ends_of = |support: &[usize]| -> [usize; 2] {
            let mut z = vec![false; layout.num_qubits()];
            for &q in support {
                z[q] ^= true;
            }
            let s = layout.syndrome_of(&z);
            match s.defects() {
                [a, b] => [*a, *b],
                [a] => [*a, boundary_node],
                other => panic!("edge support lights {} vertices", other.len()),
            }
        };

        let mut edges = Vec::new();
        let mut qubit_edge = Vec::with_capacity(layout.num_qubits());
        for q in 0..layout.num_qubits() {
            let cells = layout
                .z_stabilizers()
                .iter()
                .enumerate()
                .filter(|(_, s)| s.qubits.contains(&q))
                .map(|(i, _)| i)
                .collect();
            qubit_edge.push(edges.len());
            edges.push(Edge {
                family: EdgeFamily::L1,
                ends: ends_of(&[q]),
                owner: EdgeOwner::Qubit(q),
                support: vec![q],
                cells,
            });
        }

        let mut pair_edge = vec![usize::MAX; layout.pairs().len()];
        for (family, kind) in [(EdgeFamily::L2, PairKind::Diagonal), (EdgeFamily::L3, PairKind::AntiDiagonal)] {
            for plaquette in 0..layout.z_stabilizers().len() {
                let owned: Vec<usize> = layout
                    .pairs()
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.plaquette == plaquette && p.kind == kind)
                    .map(|(i, _)| i)
                    .collect();
                if owned.is_empty() {
                    continue;
                }
                let support = layout.pairs()[owned[0]].qubits.to_vec();
                for &p in &owned {
                    pair_edge[p] = edges.len();
                }
                edges.push(Edge {
                    family,
                    ends: ends_of(&support),
                    owner: EdgeOwner::Pairs {
                        plaquette,
                        pairs: owned,
                    },
                    support,
                    cells: vec![plaquette],
                });
            }
        }

        EdgeSet {
            edges,
            qubit_edge,
            pair_edge,
            boundary_node,
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn family(&self, family: EdgeFamily) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.family == family)
    }

    pub fn count(&self, family: EdgeFamily) -> usize {
        self.family(family).count()
    }

    pub fn qubit_edge(&self, q: usize) -> usize {
        self.qubit_edge[q]
    }

    pub fn pair_edge(&self, pair: usize) -> usize {
        self.pair_edge[pair]
    }

    pub fn boundary_node(&self) -> usize {
        self.boundary_node
    }

    /// Effective error rate carried by an edge.
    pub fn edge_probability(&self, edge: usize, params: &EffectiveParams) -> f64 {
        let e = &self.edges[edge];
        match e.family {
            EdgeFamily::L1 => params.pbar1,
            _ if e.is_lone_diagonal() => params.p2,
            EdgeFamily::L2 => params.pbar2,
            EdgeFamily::L3 => params.pbar3,
        }
    }

    /// Edge indicators `n_E` of a mechanism set.
    pub fn indicators(&self, mechanisms: &MechanismSet) -> Vec<bool> {
        let mut n = vec![false; self.edges.len()];
        for (q, &f) in mechanisms.single_fires.iter().enumerate() {
            n[self.qubit_edge[q]] ^= f;
        }
        for (p, &f) in mechanisms.pair_fires.iter().enumerate() {
            n[self.pair_edge[p]] ^= f;
        }
        n
    }

    /// Z support of a chain given by edge indicators (one representative pair
    /// per diagonal edge).
    pub fn chain_support(&self, n_edges: &[bool], num_qubits: usize) -> Vec<bool> {
        let mut z = vec![false; num_qubits];
        for (e, _) in n_edges.iter().enumerate().filter(|(_, &b)| b) {
            for &q in &self.edges[e].support {
                z[q] ^= true;
            }
        }
        z
    }

    /// Sum of `n_e ln(pbar_e / (1 - pbar_e))`: log of the chain weight
    /// relative to the empty chain.
    pub fn chain_log_weight(&self, n_edges: &[bool], params: &EffectiveParams) -> f64 {
        n_edges
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(e, _)| {
                let p = self.edge_probability(e, params);
                (p / (1.0 - p)).ln()
            })
            .sum()
    }

    /// Draws each edge indicator independently with its effective rate.
    pub fn sample_indicators<R: Rng>(&self, params: &EffectiveParams, rng: &mut R) -> Vec<bool> {
        (0..self.edges.len())
            .map(|e| rng.gen::<f64>() < self.edge_probability(e, params))
            .collect()
    }

    /// Quenched edge signs `eta = 1 - 2 n`.
    pub fn sample_signs(&self, params: &EffectiveParams, seed: u64) -> EdgeSigns {
        let mut rng = rng::stream(seed, &[0x4544_4745], 0);
        let n = self.sample_indicators(params, &mut rng);
        EdgeSigns::from_indicators(self, &n)
    }
}

/// Effective rates and log-odds couplings of the three edge families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub p1: f64,
    pub p2: f64,
    pub pbar1: f64,
    pub pbar2: f64,
    pub pbar3: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    /// `j2 / j1`.
    pub j2p: f64,
    /// `j3 / j1`.
    pub j3p: f64,
    /// Inverse temperature of the Nishimori line, `j1 / 2`.
    pub beta_n: f64,
}

impl EffectiveParams {
    /// Both diagonal directions share the pair rate, so `pbar3 = pbar2`.
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::Parameter(format!(
                    "{name} = {p} must lie in (0, 1/2)"
                )));
            }
        }
        let pbar1 = p1;
        let pbar2 = 2.0 * p2 * (1.0 - p2);
        let pbar3 = pbar2;
        for (family, pbar) in [("l1", pbar1), ("l2", pbar2), ("l3", pbar3)] {
            if pbar <= 0.0 || pbar >= 1.0 {
                return Err(Error::InfiniteCoupling { family, pbar });
            }
        }
        let j1 = log_odds(pbar1);
        let j2 = log_odds(pbar2);
        let j3 = log_odds(pbar3);
        Ok(EffectiveParams {
            p1,
            p2,
            pbar1,
            pbar2,
            pbar3,
            j1,
            j2,
            j3,
            j2p: j2 / j1,
            j3p: j3 / j1,
            beta_n: 0.5 * j1,
        })
    }

    pub fn nishimori_temperature(&self) -> f64 {
        1.0 / self.beta_n
    }
}

/// `ln((1 - p) / p)`.
pub fn log_odds(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

/// Probability mass of the two cosets consistent with one syndrome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosetSums {
    /// Errors with even overlap with the logical X support.
    pub trivial: f64,
    /// Errors with odd overlap.
    pub logical: f64,
}

impl CosetSums {
    pub fn total(&self) -> f64 {
        self.trivial + self.logical
    }

    /// Probability that a recovery in the coset of parity `parity` succeeds.
    pub fn success_given(&self, parity: bool) -> f64 {
        let hit = if parity { self.logical } else { self.trivial };
        hit / self.total()
    }
}

/// Coset sums for every syndrome of a small code, indexed by syndrome mask.
#[derive(Debug, Clone)]
pub struct CosetTable {
    sums: Vec<CosetSums>,
}

impl CosetTable {
    pub fn get(&self, syndrome: &Syndrome) -> Result<CosetSums> {
        let sums = *self
            .sums
            .get(syndrome.mask() as usize)
            .ok_or_else(|| Error::Parameter("syndrome outside the code".into()))?;
        if sums.total() <= 0.0 {
            return Err(Error::EmptyCoset);
        }
        Ok(sums)
    }

    pub fn by_mask(&self, mask: usize) -> CosetSums {
        self.sums[mask]
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }
}

/// Largest distance the exhaustive coset oracles accept.
pub const ORACLE_MAX_DISTANCE: usize = 3;

/// One enumerable item: syndrome mask, logical parity and weight class.
#[derive(Debug, Clone, Copy)]
struct Item {
    mask: u64,
    parity: bool,
    class: usize,
}

/// Counts subsets of `items` by (syndrome mask, parity, per-class counts)
/// using a Gray-code walk.
struct SubsetHistogram {
    class_sizes: Vec<usize>,
    radix: usize,
    counts: Vec<u64>,
}

impl SubsetHistogram {
    fn build(items: &[Item], num_masks: usize, class_sizes: Vec<usize>) -> Self {
        let radix: usize = class_sizes.iter().map(|n| n + 1).product();
        let mut counts = vec![0u64; num_masks * 2 * radix];
        let strides: Vec<usize> = class_sizes
            .iter()
            .scan(1usize, |acc, &n| {
                let s = *acc;
                *acc *= n + 1;
                Some(s)
            })
            .collect();
        let mut mask = 0u64;
        let mut parity = false;
        let mut offset = 0usize;
        let mut on = vec![false; items.len()];
        counts[0] += 1;
        for i in 1u64..(1u64 << items.len()) {
            let bit = i.trailing_zeros() as usize;
            let it = items[bit];
            mask ^= it.mask;
            parity ^= it.parity;
            if on[bit] {
                offset -= strides[it.class];
            } else {
                offset += strides[it.class];
            }
            on[bit] = !on[bit];
            counts[((mask as usize) * 2 + parity as usize) * radix + offset] += 1;
        }
        SubsetHistogram {
            class_sizes,
            radix,
            counts,
        }
    }

    /// Probability weight of each count vector for per-class rates.
    fn weights(&self, rates: &[f64]) -> Vec<f64> {
        (0..self.radix)
            .map(|mut idx| {
                let mut w = 1.0;
                for (c, &n) in self.class_sizes.iter().enumerate() {
                    let k = idx % (n + 1);
                    idx /= n + 1;
                    w *= rates[c].powi(k as i32) * (1.0 - rates[c]).powi((n - k) as i32);
                }
                w
            })
            .collect()
    }

    /// Folds counts into per-(mask, parity) probabilities.
    fn collapse(&self, rates: &[f64]) -> Vec<f64> {
        let w = self.weights(rates);
        self.counts
            .chunks(self.radix)
            .map(|row| row.iter().zip(&w).map(|(&c, &w)| c as f64 * w).sum())
            .collect()
    }
}

fn check_oracle_capacity(layout: &CodeLayout) -> Result<()> {
    if layout.distance() > ORACLE_MAX_DISTANCE {
        return Err(Error::Capacity(format!(
            "exhaustive coset enumeration supports d <= {ORACLE_MAX_DISTANCE}, got d = {}",
            layout.distance()
        )));
    }
    Ok(())
}

fn support_item(layout: &CodeLayout, support: &[usize], class: usize) -> Item {
    let mut z = vec![false; layout.num_qubits()];
    for &q in support {
        z[q] ^= true;
    }
    Item {
        mask: layout.syndrome_of(&z).mask(),
        parity: layout.logical_parity(&z),
        class,
    }
}

/// Exact coset probabilities of every syndrome, summed over mechanism sets.
///
/// Singles and pairs are enumerated separately and combined by an XOR
/// convolution over (syndrome, parity); the result is the full
/// `2^(singles + pairs)` sum.
pub fn mechanism_coset_table(layout: &CodeLayout, p1: f64, p2: f64) -> Result<CosetTable> {
    check_oracle_capacity(layout)?;
    crate::layout::check_probability("p1", p1)?;
    crate::layout::check_probability("p2", p2)?;
    let num_masks = 1usize << layout.x_stabilizers().len();
    let singles: Vec<Item> = (0..layout.num_qubits())
        .map(|q| support_item(layout, &[q], 0))
        .collect();
    let pairs: Vec<Item> = layout
        .pairs()
        .iter()
        .map(|p| support_item(layout, &p.qubits, 0))
        .collect();
    let hs = SubsetHistogram::build(&singles, num_masks, vec![singles.len()]).collapse(&[p1]);
    let hp = SubsetHistogram::build(&pairs, num_masks, vec![pairs.len()]).collapse(&[p2]);

    let mut out = vec![0.0; num_masks * 2];
    for (a, &wa) in hs.iter().enumerate().filter(|(_, &w)| w != 0.0) {
        for (b, &wb) in hp.iter().enumerate().filter(|(_, &w)| w != 0.0) {
            let mask = (a >> 1) ^ (b >> 1);
            let parity = (a ^ b) & 1;
            out[mask * 2 + parity] += wa * wb;
        }
    }
    Ok(CosetTable {
        sums: out
            .chunks(2)
            .map(|c| CosetSums {
                trivial: c[0],
                logical: c[1],
            })
            .collect(),
    })
}

/// Coset probabilities for one syndrome, summed over all mechanism sets.
pub fn class_sum_oracle(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    p1: f64,
    p2: f64,
) -> Result<CosetSums> {
    mechanism_coset_table(layout, p1, p2)?.get(syndrome)
}

/// Coset probabilities for every syndrome, summed over edge chains with the
/// product weights of the error-edge map.
pub fn chain_coset_table(
    layout: &CodeLayout,
    edges: &EdgeSet,
    params: &EffectiveParams,
) -> Result<CosetTable> {
    check_oracle_capacity(layout)?;
    let num_masks = 1usize << layout.x_stabilizers().len();
    // Group edges by effective rate so counts stay small.
    let mut rates: Vec<f64> = Vec::new();
    let mut items = Vec::with_capacity(edges.len());
    for (e, edge) in edges.edges().iter().enumerate() {
        let p = edges.edge_probability(e, params);
        let class = match rates.iter().position(|&r| r == p) {
            Some(c) => c,
            None => {
                rates.push(p);
                rates.len() - 1
            }
        };
        items.push(support_item(layout, &edge.support, class));
    }
    let mut sizes = vec![0; rates.len()];
    for it in &items {
        sizes[it.class] += 1;
    }
    let hist = SubsetHistogram::build(&items, num_masks, sizes);
    // Collapse with log-weights of each count vector.
    let base: f64 = (0..edges.len())
        .map(|e| (1.0 - edges.edge_probability(e, params)).ln())
        .sum();
    let logw: Vec<f64> = rates.iter().map(|&p| (p / (1.0 - p)).ln()).collect();
    let weights: Vec<f64> = (0..hist.radix)
        .map(|mut idx| {
            let mut lw = base;
            for (c, &n) in hist.class_sizes.iter().enumerate() {
                let k = idx % (n + 1);
                idx /= n + 1;
                lw += k as f64 * logw[c];
            }
            lw.exp()
        })
        .collect();
    let flat: Vec<f64> = hist
        .counts
        .chunks(hist.radix)
        .map(|row| row.iter().zip(&weights).map(|(&c, &w)| c as f64 * w).sum())
        .collect();
    Ok(CosetTable {
        sums: flat
            .chunks(2)
            .map(|c| CosetSums {
                trivial: c[0],
                logical: c[1],
            })
            .collect(),
    })
}

/// Edge-chain coset sums for one syndrome.
pub fn chain_class_sums(
    layout: &CodeLayout,
    edges: &EdgeSet,
    syndrome: &Syndrome,
    params: &EffectiveParams,
) -> Result<CosetSums> {
    chain_coset_table(layout, edges, params)?.get(syndrome)
}

/// Quenched sign per edge of a planar [`EdgeSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSigns {
    pub families: Vec<EdgeFamily>,
    pub eta: Vec<i8>,
}

impl EdgeSigns {
    pub const FORMAT_VERSION: u32 = 1;

    pub fn from_indicators(edges: &EdgeSet, n: &[bool]) -> Self {
        EdgeSigns {
            families: edges.edges().iter().map(|e| e.family).collect(),
            eta: n.iter().map(|&b| if b { -1 } else { 1 }).collect(),
        }
    }

    pub fn indicators(&self) -> Vec<bool> {
        self.eta.iter().map(|&s| s < 0).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# edge signs").unwrap();
        writeln!(out, "version {}", Self::FORMAT_VERSION).unwrap();
        writeln!(out, "edges {}", self.eta.len()).unwrap();
        for (i, (f, s)) in self.families.iter().zip(&self.eta).enumerate() {
            writeln!(out, "{} {i} {:+}", f.label(), s).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let bad = |m: &str| Error::Format(format!("edge signs: {m}"));
        let version = lines
            .next()
            .and_then(|l| l.strip_prefix("version "))
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| bad("missing version"))?;
        if version != Self::FORMAT_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let n = lines
            .next()
            .and_then(|l| l.strip_prefix("edges "))
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| bad("missing edge count"))?;
        let mut families = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [f, idx, s] = parts[..] else {
                return Err(bad(&format!("line {i}: expected 3 fields")));
            };
            if idx.parse::<usize>().ok() != Some(i) {
                return Err(bad(&format!("line {i}: index out of order")));
            }
            families.push(EdgeFamily::parse(f).ok_or_else(|| bad(&format!("family {f}")))?);
            eta.push(match s {
                "+1" => 1,
                "-1" => -1,
                _ => return Err(bad(&format!("sign {s}"))),
            });
        }
        if eta.len() != n {
            return Err(bad(&format!("expected {n} edges, found {}", eta.len())));
        }
        Ok(EdgeSigns { families, eta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Coord;

    #[test]
    fn edge_counts() {
        let l2 = CodeLayout::new(2).unwrap();
        let e2 = EdgeSet::build(&l2);
        assert_eq!(e2.count(EdgeFamily::L1), 5);
        let l3 = CodeLayout::new(3).unwrap();
        let e3 = EdgeSet::build(&l3);
        assert_eq!(e3.count(EdgeFamily::L1), 13);
        // Hand count for d = 3: 6 plaquettes, each with one edge per
        // diagonal direction (2 bulk, 4 on the left/right boundary).
        assert_eq!(e3.count(EdgeFamily::L2), 6);
        assert_eq!(e3.count(EdgeFamily::L3), 6);
        let lone = e3.edges().iter().filter(|e| e.is_lone_diagonal()).count();
        assert_eq!(lone, 8);
    }

    #[test]
    fn every_mechanism_has_one_owner() {
        for d in 2..6 {
            let l = CodeLayout::new(d).unwrap();
            let e = EdgeSet::build(&l);
            let mut owned = vec![0; l.pairs().len()];
            for edge in e.edges() {
                if let EdgeOwner::Pairs { pairs, .. } = &edge.owner {
                    assert!((1..=2).contains(&pairs.len()));
                    for &p in pairs {
                        owned[p] += 1;
                    }
                }
            }
            assert!(owned.iter().all(|&c| c == 1));
            for q in 0..l.num_qubits() {
                assert_eq!(e.edges()[e.qubit_edge(q)].owner, EdgeOwner::Qubit(q));
            }
            // Bulk plaquettes own two pairs per diagonal edge.
            for edge in e.edges().iter().filter(|e| e.family != EdgeFamily::L1) {
                let bulk = !l.z_stabilizers()[edge.cells[0]].boundary;
                assert_eq!(edge.is_lone_diagonal(), !bulk);
            }
        }
    }

    #[test]
    fn indicator_cancellation() {
        let l = CodeLayout::new(3).unwrap();
        let e = EdgeSet::build(&l);
        let m = MechanismSet::empty(&l);
        assert!(e.indicators(&m).iter().all(|&b| !b));
        let (k, edge) = e
            .family(EdgeFamily::L2)
            .find(|(_, e)| !e.is_lone_diagonal())
            .unwrap();
        let EdgeOwner::Pairs { pairs, .. } = &edge.owner else {
            unreachable!()
        };
        let mut one = MechanismSet::empty(&l);
        one.pair_fires[pairs[0]] = true;
        assert!(e.indicators(&one)[k]);
        let mut both = one.clone();
        both.pair_fires[pairs[1]] = true;
        assert!(!e.indicators(&both)[k]);
        // Both pairs compose to the plaquette stabilizer.
        let support = both.net_support(&l);
        let plaquette = &l.z_stabilizers()[edge.cells[0]];
        let expected: Vec<bool> = (0..l.num_qubits())
            .map(|q| plaquette.qubits.contains(&q))
            .collect();
        assert_eq!(support, expected);
    }

    #[test]
    fn effective_params_values() {
        let p = EffectiveParams::new(0.03, 0.03).unwrap();
        assert!((p.j1 - 3.476099).abs() < 1e-5);
        assert!((p.pbar2 - 0.0582).abs() < 1e-12);
        assert!((p.j2 - 2.783908).abs() < 1e-5);
        assert!((p.j2p - 0.800871).abs() < 1e-5);
        assert!((p.beta_n - 1.738049).abs() < 1e-5);
        let t = p.nishimori_temperature();
        assert!((t - 0.575358).abs() < 1e-5 && (0.5..=1.0).contains(&t));
        assert_eq!(p.pbar2, p.pbar3);
        let q = EffectiveParams::new(0.2, 0.1).unwrap();
        assert!((q.pbar2 - 0.18).abs() < 1e-15);
    }

    #[test]
    fn effective_params_errors() {
        assert!(matches!(
            EffectiveParams::new(0.03, 0.0),
            Err(Error::InfiniteCoupling { family: "l2", .. })
        ));
        assert!(matches!(EffectiveParams::new(0.6, 0.1), Err(Error::Parameter(_))));
    }

    #[test]
    fn couplings_decrease_with_rate() {
        let mut last = f64::INFINITY;
        for i in 1..50 {
            let j = log_odds(i as f64 / 100.0);
            assert!(j < last);
            last = j;
        }
        assert_eq!(log_odds(0.5), 0.0);
    }

    #[test]
    fn chain_weights() {
        let l = CodeLayout::new(3).unwrap();
        let e = EdgeSet::build(&l);
        let params = EffectiveParams::new(0.03, 0.03).unwrap();
        let mut n = vec![false; e.len()];
        assert_eq!(e.chain_log_weight(&n, &params), 0.0);
        n[e.qubit_edge(0)] = true;
        assert!((e.chain_log_weight(&n, &params) + 3.476099).abs() < 1e-5);
        let mut prev = e.chain_log_weight(&n, &params);
        for k in 1..e.len() {
            n[k] = true;
            let w = e.chain_log_weight(&n, &params);
            assert!(w < prev);
            prev = w;
        }
    }

    #[test]
    fn zero_noise_oracle() {
        let l = CodeLayout::new(3).unwrap();
        let s = class_sum_oracle(&l, &Syndrome::default(), 0.0, 0.0).unwrap();
        assert_eq!((s.trivial, s.logical), (1.0, 0.0));
        assert!(matches!(
            class_sum_oracle(&l, &Syndrome(vec![0]), 0.0, 0.0),
            Err(Error::EmptyCoset)
        ));
        assert!(matches!(
            class_sum_oracle(&CodeLayout::new(4).unwrap(), &Syndrome::default(), 0.1, 0.1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn oracle_is_normalised() {
        let l = CodeLayout::new(3).unwrap();
        let t = mechanism_coset_table(&l, 0.07, 0.04).unwrap();
        let total: f64 = (0..t.len()).map(|m| t.by_mask(m).total()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn signs_text_roundtrip() {
        let l = CodeLayout::new(3).unwrap();
        let e = EdgeSet::build(&l);
        let params = EffectiveParams::new(0.2, 0.2).unwrap();
        let signs = e.sample_signs(&params, 5);
        assert_eq!(EdgeSigns::from_text(&signs.to_text()).unwrap(), signs);
        assert!(EdgeSigns::from_text("version 2\nedges 0\n").is_err());
    }

    #[test]
    fn boundary_diagonal_touches_boundary_node() {
        let l = CodeLayout::new(3).unwrap();
        let e = EdgeSet::build(&l);
        for edge in e.edges().iter().filter(|e| e.is_lone_diagonal()) {
            assert!(edge.touches_boundary(e.boundary_node()));
        }
        let q = l.qubit_at(Coord::new(0, 0)).unwrap();
        assert!(e.edges()[e.qubit_edge(q)].touches_boundary(e.boundary_node()));
    }
}
