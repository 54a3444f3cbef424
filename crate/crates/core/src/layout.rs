//! Planar (unrotated) surface-code geometry and the correlated phase-flip
//! noise model.
//!
//! Positions live on a `(2d-1) x (2d-1)` integer grid with `y` pointing up.
//! Data qubits sit where `x + y` is even, vertex (X) stabilizers where `y` is
//! even and `x` odd, plaquette (Z) stabilizers where `y` is odd and `x` even.
//! Z errors are only seen by X stabilizers; chains of Z errors terminate on
//! the left (`x = 0`) and right (`x = 2d-2`) boundaries.
//!
//! Pair mechanisms are every pair of data qubits that are diagonal neighbours
//! on the grid:
//!
//! * [`PairKind::Diagonal`]: `{q(x,y), q(x-1,y+1)}`. Its two-qubit Z flips
//!   the two X stabilizers on the upper-left/lower-right diagonal of the
//!   shared plaquette.
//! * [`PairKind::AntiDiagonal`]: `{q(x,y), q(x+1,y+1)}`, the other diagonal.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Self {
        Coord { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub coord: Coord,
    pub qubits: Vec<usize>,
    /// Stabilizer touches a code boundary (weight 3).
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// Shares the upper-left/lower-right diagonal of its plaquette.
    Diagonal,
    /// Shares the upper-right/lower-left diagonal of its plaquette.
    AntiDiagonal,
}

impl PairKind {
    pub fn label(self) -> &'static str {
        match self {
            PairKind::Diagonal => "diag",
            PairKind::AntiDiagonal => "anti",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairMechanism {
    pub qubits: [usize; 2],
    pub kind: PairKind,
    /// Index into the Z stabilizers of the unique plaquette holding both qubits.
    pub plaquette: usize,
}

/// Geometry of a distance-`d` planar surface code.
#[derive(Debug, Clone)]
pub struct CodeLayout {
    distance: usize,
    qubits: Vec<Coord>,
    qubit_at: HashMap<Coord, usize>,
    x_stabilizers: Vec<Stabilizer>,
    z_stabilizers: Vec<Stabilizer>,
    x_stab_at: HashMap<Coord, usize>,
    z_stab_at: HashMap<Coord, usize>,
    /// X stabilizers touching each qubit (one or two).
    qubit_x_stabs: Vec<Vec<usize>>,
    logical_x: Vec<usize>,
    logical_z: Vec<usize>,
    pairs: Vec<PairMechanism>,
}

impl CodeLayout {
    pub fn new(distance: usize) -> Result<Self> {
        if distance < 2 {
            return Err(Error::InvalidDistance(distance));
        }
        let n = (2 * distance - 1) as i32;
        let inside = |c: Coord| (0..n).contains(&c.x) && (0..n).contains(&c.y);

        let mut qubits = Vec::new();
        let mut x_sites = Vec::new();
        let mut z_sites = Vec::new();
        for y in 0..n {
            for x in 0..n {
                let c = Coord::new(x, y);
                match ((x + y) % 2 == 0, y % 2 == 0) {
                    (true, _) => qubits.push(c),
                    (false, true) => x_sites.push(c),
                    (false, false) => z_sites.push(c),
                }
            }
        }
        let qubit_at: HashMap<Coord, usize> =
            qubits.iter().enumerate().map(|(i, &c)| (c, i)).collect();

        let neighbours = |c: Coord| -> Vec<usize> {
            [(0, 1), (1, 0), (0, -1), (-1, 0)]
                .iter()
                .map(|&(dx, dy)| Coord::new(c.x + dx, c.y + dy))
                .filter(|&q| inside(q))
                .map(|q| qubit_at[&q])
                .collect()
        };
        let build = |sites: &[Coord]| -> Vec<Stabilizer> {
            sites
                .iter()
                .map(|&c| {
                    let qubits = neighbours(c);
                    let boundary = qubits.len() < 4;
                    Stabilizer {
                        coord: c,
                        qubits,
                        boundary,
                    }
                })
                .collect()
        };
        let x_stabilizers = build(&x_sites);
        let z_stabilizers = build(&z_sites);
        let x_stab_at = x_sites.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let z_stab_at: HashMap<Coord, usize> =
            z_sites.iter().enumerate().map(|(i, &c)| (c, i)).collect();

        let mut qubit_x_stabs = vec![Vec::new(); qubits.len()];
        for (s, stab) in x_stabilizers.iter().enumerate() {
            for &q in &stab.qubits {
                qubit_x_stabs[q].push(s);
            }
        }

        let logical_x = qubits
            .iter()
            .enumerate()
            .filter(|(_, c)| c.x == 0)
            .map(|(i, _)| i)
            .collect();
        let logical_z = qubits
            .iter()
            .enumerate()
            .filter(|(_, c)| c.y == 0)
            .map(|(i, _)| i)
            .collect();

        let mut pairs = Vec::new();
        for (a, &c) in qubits.iter().enumerate() {
            for (dx, kind) in [(-1, PairKind::Diagonal), (1, PairKind::AntiDiagonal)] {
                let partner = Coord::new(c.x + dx, c.y + 1);
                let Some(&b) = qubit_at.get(&partner) else {
                    continue;
                };
                // The shared plaquette is the corner of the 2x2 box with y odd.
                let corner = if c.y % 2 == 1 {
                    Coord::new(partner.x, c.y)
                } else {
                    Coord::new(c.x, partner.y)
                };
                let plaquette = z_stab_at[&corner];
                pairs.push(PairMechanism {
                    qubits: [a, b],
                    kind,
                    plaquette,
                });
            }
        }

        Ok(CodeLayout {
            distance,
            qubits,
            qubit_at,
            x_stabilizers,
            z_stabilizers,
            x_stab_at,
            z_stab_at,
            qubit_x_stabs,
            logical_x,
            logical_z,
            pairs,
        })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[Coord] {
        &self.qubits
    }

    pub fn qubit_at(&self, c: Coord) -> Option<usize> {
        self.qubit_at.get(&c).copied()
    }

    pub fn x_stabilizers(&self) -> &[Stabilizer] {
        &self.x_stabilizers
    }

    pub fn z_stabilizers(&self) -> &[Stabilizer] {
        &self.z_stabilizers
    }

    pub fn x_stab_at(&self, c: Coord) -> Option<usize> {
        self.x_stab_at.get(&c).copied()
    }

    pub fn z_stab_at(&self, c: Coord) -> Option<usize> {
        self.z_stab_at.get(&c).copied()
    }

    /// X stabilizers adjacent to a data qubit.
    pub fn qubit_x_stabs(&self, q: usize) -> &[usize] {
        &self.qubit_x_stabs[q]
    }

    /// Support of the logical X operator (left column).
    pub fn logical_x(&self) -> &[usize] {
        &self.logical_x
    }

    /// Support of the logical Z operator (bottom row).
    pub fn logical_z(&self) -> &[usize] {
        &self.logical_z
    }

    pub fn pairs(&self) -> &[PairMechanism] {
        &self.pairs
    }

    /// X stabilizers with odd overlap with a Z support, sorted.
    pub fn syndrome_of(&self, z_support: &[bool]) -> Syndrome {
        let mut parity = vec![false; self.x_stabilizers.len()];
        for (q, _) in z_support.iter().enumerate().filter(|(_, &b)| b) {
            for &s in &self.qubit_x_stabs[q] {
                parity[s] ^= true;
            }
        }
        Syndrome(
            parity
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    pub fn syndrome(&self, mechanisms: &MechanismSet) -> Syndrome {
        self.syndrome_of(&mechanisms.net_support(self))
    }

    /// Parity of the overlap with the logical X support; `true` means odd.
    pub fn logical_parity(&self, z_support: &[bool]) -> bool {
        self.logical_x
            .iter()
            .fold(false, |acc, &q| acc ^ z_support[q])
    }

    /// Classifies a syndrome-free Z support as a stabilizer or a logical.
    pub fn logical_class(&self, z_support: &[bool]) -> Result<LogicalClass> {
        if z_support.len() != self.num_qubits() {
            return Err(Error::Dimension {
                expected: self.num_qubits(),
                found: z_support.len(),
            });
        }
        let s = self.syndrome_of(z_support);
        if !s.is_empty() {
            return Err(Error::Precondition(format!(
                "support has non-empty syndrome {:?}",
                s.0
            )));
        }
        Ok(if self.logical_parity(z_support) {
            LogicalClass::Logical
        } else {
            LogicalClass::Trivial
        })
    }

    /// Samples which mechanisms fire: each single with `p1`, each pair with `p2`.
    pub fn sample_mechanisms(&self, p1: f64, p2: f64, seed: u64) -> Result<MechanismSet> {
        let mut rng = rng::stream(seed, &[0x4D45_4348], 0);
        self.sample_mechanisms_with(p1, p2, &mut rng)
    }

    pub fn sample_mechanisms_with<R: Rng>(
        &self,
        p1: f64,
        p2: f64,
        rng: &mut R,
    ) -> Result<MechanismSet> {
        check_probability("p1", p1)?;
        check_probability("p2", p2)?;
        let single_fires = (0..self.num_qubits()).map(|_| rng.gen::<f64>() < p1).collect();
        let pair_fires = (0..self.pairs.len()).map(|_| rng.gen::<f64>() < p2).collect();
        Ok(MechanismSet {
            single_fires,
            pair_fires,
        })
    }

    /// Plain-text description used for golden-file checks.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let join = |v: &[usize]| {
            v.iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "# planar surface code layout v1").unwrap();
        writeln!(out, "distance {}", self.distance).unwrap();
        writeln!(out, "qubits {}", self.qubits.len()).unwrap();
        for (i, c) in self.qubits.iter().enumerate() {
            writeln!(out, "q {i} {} {}", c.x, c.y).unwrap();
        }
        for (kind, stabs) in [("x", &self.x_stabilizers), ("z", &self.z_stabilizers)] {
            writeln!(out, "{kind}_stabilizers {}", stabs.len()).unwrap();
            for (i, s) in stabs.iter().enumerate() {
                let b = if s.boundary { "boundary" } else { "bulk" };
                writeln!(
                    out,
                    "{kind} {i} {} {} {b} : {}",
                    s.coord.x,
                    s.coord.y,
                    join(&s.qubits)
                )
                .unwrap();
            }
        }
        writeln!(out, "logical_x : {}", join(&self.logical_x)).unwrap();
        writeln!(out, "logical_z : {}", join(&self.logical_z)).unwrap();
        writeln!(out, "pairs {}", self.pairs.len()).unwrap();
        for (i, p) in self.pairs.iter().enumerate() {
            writeln!(
                out,
                "pair {i} {} : {} {} plaquette {}",
                p.kind.label(),
                p.qubits[0],
                p.qubits[1],
                p.plaquette
            )
            .unwrap();
        }
        out
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {p} is not a probability")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalClass {
    Trivial,
    Logical,
}

/// Defect set: indices of flipped X stabilizers, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Syndrome(pub Vec<usize>);

impl Syndrome {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn defects(&self) -> &[usize] {
        &self.0
    }

    /// Bit mask of the defects; only valid for fewer than 64 stabilizers.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &s| m | (1 << s))
    }

    pub fn from_mask(mask: u64) -> Self {
        Syndrome((0..64).filter(|s| mask >> s & 1 == 1).collect())
    }
}

/// Which error mechanisms fired in one noise realisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismSet {
    pub single_fires: Vec<bool>,
    pub pair_fires: Vec<bool>,
}

impl MechanismSet {
    pub fn empty(layout: &CodeLayout) -> Self {
        MechanismSet {
            single_fires: vec![false; layout.num_qubits()],
            pair_fires: vec![false; layout.pairs().len()],
        }
    }

    /// Net Z support after all fired mechanisms compose.
    pub fn net_support(&self, layout: &CodeLayout) -> Vec<bool> {
        let mut support = self.single_fires.clone();
        for (p, _) in self.pair_fires.iter().enumerate().filter(|(_, &f)| f) {
            for &q in &layout.pairs()[p].qubits {
                support[q] ^= true;
            }
        }
        support
    }

    pub fn fired_count(&self) -> usize {
        self.single_fires.iter().chain(&self.pair_fires).filter(|&&b| b).count()
    }
}
