//! Constrained random-bond Ising model on the square-octagonal lattice.
//!
//! Each cell carries four triangle spins: `s1` left, `s2` top, `s3` right,
//! `s4` bottom, with `s1 s2 s3 s4 = +1`. Cell `(x, y + 1)` sits below cell
//! `(x, y)`. Couplings, per cell:
//!
//! * horizontal l1 bond `eta_h * s3(x, y) * s1(x + 1, y)`;
//! * vertical l1 bond `eta_v * s4(x, y) * s2(x, y + 1)`;
//! * diagonal l2 `k2 * eta2 * (s1 s2 + s3 s4)`;
//! * diagonal l3 `k3 * eta3 * (s1 s4 + s2 s3)`.
//!
//! Each diagonal edge is cut in two halves, so the per-half coupling is
//! `k = J' / 2` with `J' = J_diag / J_1`; at `beta = J_1 / 2` the Boltzmann
//! weight equals the chain likelihood.

use std::fmt::Write as _;

use rand::Rng;

use crate::eem::{EdgeFamily, EdgeOwner, EdgeSet, EdgeSigns, EffectiveParams};
use crate::error::{Error, Result};
use crate::layout::{CodeLayout, Coord};
use crate::rng;

/// Spin values of the 8 legal cell states. Bits 0..2 store `s1..s3`
/// (set bit = -1); `s4` is their product.
pub const SPINS: [[i8; 4]; 8] = {
    let mut t = [[0i8; 4]; 8];
    let mut c = 0;
    while c < 8 {
        let s1: i8 = if c & 1 != 0 { -1 } else { 1 };
        let s2: i8 = if c & 2 != 0 { -1 } else { 1 };
        let s3: i8 = if c & 4 != 0 { -1 } else { 1 };
        t[c] = [s1, s2, s3, s1 * s2 * s3];
        c += 1;
    }
    t
};

pub(crate) const SPINS_F: [[f64; 4]; 8] = {
    let mut t = [[0.0; 4]; 8];
    let mut c = 0;
    while c < 8 {
        let mut k = 0;
        while k < 4 {
            t[c][k] = SPINS[c][k] as f64;
            k += 1;
        }
        c += 1;
    }
    t
};

/// Pair-flip masks, in the order (1,2), (1,3), (1,4), (2,3), (2,4), (3,4).
pub const PAIR_MASKS: [u8; 6] = [0b011, 0b101, 0b001, 0b110, 0b010, 0b100];

/// Mask that flips all four spins of a cell.
pub const FULL_FLIP: u8 = 0b111;

/// Code of a legal spin quadruple.
pub fn encode_cell(s: [i8; 4]) -> Result<u8> {
    if s.iter().any(|&v| v != 1 && v != -1) || s.iter().map(|&v| v as i32).product::<i32>() != 1
    {
        return Err(Error::Parameter(format!("illegal cell spins {s:?}")));
    }
    Ok(s[..3]
        .iter()
        .enumerate()
        .fold(0u8, |acc, (k, &v)| acc | (((v < 0) as u8) << k)))
}

pub fn decode_cell(code: u8) -> [i8; 4] {
    SPINS[code as usize & 7]
}

/// Diagonal composites in product form: `u = 1 - (a - 1)(b - 1) / 2` with
/// `a`, `b` the two half-edge products. Returns `(u2, u3)`.
pub fn diagonal_composites(s: [i8; 4]) -> (i8, i8) {
    let f = |a: i8, b: i8| 1 - (a - 1) * (b - 1) / 2;
    (f(s[0] * s[1], s[2] * s[3]), f(s[0] * s[3], s[1] * s[2]))
}

/// Periodic `width x height` lattice of cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpinLattice {
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

impl CellSpinLattice {
    /// All spins up, `l x l` cells.
    pub fn new(l: usize) -> Self {
        Self::rect(l, l)
    }

    pub fn rect(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "empty lattice");
        CellSpinLattice {
            width,
            height,
            cells: vec![0; width * height],
        }
    }

    pub fn random<R: Rng>(width: usize, height: usize, rng: &mut R) -> Self {
        let mut l = Self::rect(width, height);
        for c in &mut l.cells {
            *c = rng.gen_range(0..8);
        }
        l
    }

    pub fn from_codes(width: usize, height: usize, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != width * height {
            return Err(Error::Dimension {
                expected: width * height,
                found: cells.len(),
            });
        }
        if cells.iter().any(|&c| c > 7) {
            return Err(Error::Format("cell code above 7".into()));
        }
        Ok(CellSpinLattice {
            width,
            height,
            cells,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn codes(&self) -> &[u8] {
        &self.cells
    }

    pub fn code(&self, cell: usize) -> u8 {
        self.cells[cell]
    }

    pub fn set_code(&mut self, cell: usize, code: u8) {
        self.cells[cell] = code & 7;
    }

    pub fn spins(&self, cell: usize) -> [i8; 4] {
        SPINS[self.cells[cell] as usize]
    }

    /// Flips spin pair `choice` (index into [`PAIR_MASKS`]) of one cell.
    pub fn flip_pair(&mut self, cell: usize, choice: usize) -> Result<()> {
        let mask = pair_mask(choice)?;
        self.cells[cell] ^= mask;
        Ok(())
    }

    /// Checks every cell against the product constraint; always true for
    /// code-stored states, kept as a debug guard.
    pub fn constraint_holds(&self) -> bool {
        self.cells
            .iter()
            .all(|&c| SPINS[c as usize].iter().map(|&v| v as i32).product::<i32>() == 1)
    }

    /// Mixed-radix index of the whole state, for exact enumeration.
    pub fn state_index(&self) -> usize {
        self.cells.iter().rev().fold(0, |acc, &c| acc * 8 + c as usize)
    }

    pub fn from_state_index(width: usize, height: usize, mut index: usize) -> Self {
        let mut l = Self::rect(width, height);
        for c in &mut l.cells {
            *c = (index % 8) as u8;
            index /= 8;
        }
        l
    }

    pub fn right(&self, cell: usize) -> usize {
        let (x, y) = (cell % self.width, cell / self.width);
        y * self.width + (x + 1) % self.width
    }

    pub fn left(&self, cell: usize) -> usize {
        let (x, y) = (cell % self.width, cell / self.width);
        y * self.width + (x + self.width - 1) % self.width
    }

    pub fn down(&self, cell: usize) -> usize {
        (cell + self.width) % self.cells.len()
    }

    pub fn up(&self, cell: usize) -> usize {
        (cell + self.cells.len() - self.width) % self.cells.len()
    }
}

pub(crate) fn pair_mask(choice: usize) -> Result<u8> {
    PAIR_MASKS
        .get(choice)
        .copied()
        .ok_or_else(|| Error::Parameter(format!("pair choice {choice} not in 0..6")))
}

/// Quenched signs and couplings of a periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct BondDisorder {
    pub width: usize,
    pub height: usize,
    /// Bond from cell `c` to its right neighbour.
    pub eta_h: Vec<i8>,
    /// Bond from cell `c` to the cell below.
    pub eta_v: Vec<i8>,
    pub eta2: Vec<i8>,
    pub eta3: Vec<i8>,
    /// Per-half coupling of l2 diagonals.
    pub k2: f64,
    /// Per-half coupling of l3 diagonals.
    pub k3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallDirection {
    /// Seam crossing the horizontal bonds between the last and first column.
    Vertical,
    /// Seam crossing the vertical bonds between the last and first row.
    Horizontal,
}

impl BondDisorder {
    pub const FORMAT_VERSION: u32 = 1;

    pub fn uniform(width: usize, height: usize, k2: f64, k3: f64) -> Self {
        let n = width * height;
        BondDisorder {
            width,
            height,
            eta_h: vec![1; n],
            eta_v: vec![1; n],
            eta2: vec![1; n],
            eta3: vec![1; n],
            k2,
            k3,
        }
    }

    /// Couplings `k = J' / 2` for the given noise rates.
    pub fn couplings(params: &EffectiveParams) -> (f64, f64) {
        (0.5 * params.j2p, 0.5 * params.j3p)
    }

    /// Signs drawn with the effective edge rates of `params`.
    pub fn sample_with<R: Rng>(
        width: usize,
        height: usize,
        params: &EffectiveParams,
        rng: &mut R,
    ) -> Self {
        let (k2, k3) = Self::couplings(params);
        let mut b = Self::uniform(width, height, k2, k3);
        let mut draw = |p: f64, v: &mut Vec<i8>| {
            for s in v.iter_mut() {
                *s = if rng.gen::<f64>() < p { -1 } else { 1 };
            }
        };
        draw(params.pbar1, &mut b.eta_h);
        draw(params.pbar1, &mut b.eta_v);
        draw(params.pbar2, &mut b.eta2);
        draw(params.pbar3, &mut b.eta3);
        b
    }

    pub fn sample(l: usize, params: &EffectiveParams, seed: u64) -> Self {
        let mut rng = rng::stream(seed, &[0x424F_4E44], 0);
        Self::sample_with(l, l, params, &mut rng)
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    fn check(&self, lattice: &CellSpinLattice) -> Result<()> {
        if (lattice.width, lattice.height) != (self.width, self.height) {
            return Err(Error::Dimension {
                expected: self.num_cells(),
                found: lattice.num_cells(),
            });
        }
        Ok(())
    }

    /// Flips the l1 bonds crossing one non-contractible seam.
    pub fn insert_domain_wall(&self, direction: WallDirection) -> Self {
        let mut out = self.clone();
        match direction {
            WallDirection::Vertical => {
                for y in 0..self.height {
                    out.eta_h[y * self.width + self.width - 1] *= -1;
                }
            }
            WallDirection::Horizontal => {
                for x in 0..self.width {
                    out.eta_v[(self.height - 1) * self.width + x] *= -1;
                }
            }
        }
        out
    }

    /// Flips the l1 bonds incident on `cell`; paired with flipping all four
    /// spins of that cell this leaves the energy unchanged.
    pub fn gauge_flip(&mut self, cell: usize) {
        let lat = CellSpinLattice::rect(self.width, self.height);
        for b in [cell, lat.left(cell)] {
            self.eta_h[b] *= -1;
        }
        for b in [cell, lat.up(cell)] {
            self.eta_v[b] *= -1;
        }
        // Self-bonds on width- or height-1 lattices were flipped twice; they
        // couple a cell to itself and are already gauge invariant.
    }

    /// Energy of the whole lattice.
    pub fn energy(&self, lattice: &CellSpinLattice) -> Result<f64> {
        self.check(lattice)?;
        let mut e = 0.0;
        for c in 0..lattice.num_cells() {
            let s = &SPINS_F[lattice.cells[c] as usize];
            let r = &SPINS_F[lattice.cells[lattice.right(c)] as usize];
            let d = &SPINS_F[lattice.cells[lattice.down(c)] as usize];
            e -= self.eta_h[c] as f64 * s[2] * r[0]
                + self.eta_v[c] as f64 * s[3] * d[1]
                + self.k2 * self.eta2[c] as f64 * (s[0] * s[1] + s[2] * s[3])
                + self.k3 * self.eta3[c] as f64 * (s[0] * s[3] + s[1] * s[2]);
        }
        Ok(e)
    }

    /// Energy of all terms that involve `cell`, with `cell` in state `code`.
    #[inline]
    pub(crate) fn local_energy(&self, lattice: &CellSpinLattice, cell: usize, code: u8) -> f64 {
        let s = &SPINS_F[code as usize];
        let cells = &lattice.cells;
        let (l, r, u, d) = (
            lattice.left(cell),
            lattice.right(cell),
            lattice.up(cell),
            lattice.down(cell),
        );
        let mut e = self.k2 * self.eta2[cell] as f64 * (s[0] * s[1] + s[2] * s[3])
            + self.k3 * self.eta3[cell] as f64 * (s[0] * s[3] + s[1] * s[2]);
        if r == cell {
            e += self.eta_h[cell] as f64 * s[2] * s[0];
        } else {
            e += self.eta_h[cell] as f64 * s[2] * SPINS_F[cells[r] as usize][0];
            e += self.eta_h[l] as f64 * SPINS_F[cells[l] as usize][2] * s[0];
        }
        if d == cell {
            e += self.eta_v[cell] as f64 * s[3] * s[1];
        } else {
            e += self.eta_v[cell] as f64 * s[3] * SPINS_F[cells[d] as usize][1];
            e += self.eta_v[u] as f64 * SPINS_F[cells[u] as usize][3] * s[1];
        }
        -e
    }

    /// Energy change of flipping pair `choice` of `cell`, in O(1).
    pub fn delta_energy(&self, lattice: &CellSpinLattice, cell: usize, choice: usize) -> Result<f64> {
        self.check(lattice)?;
        let mask = pair_mask(choice)?;
        Ok(self.delta_mask(lattice, cell, mask))
    }

    #[inline]
    pub(crate) fn delta_mask(&self, lattice: &CellSpinLattice, cell: usize, mask: u8) -> f64 {
        let code = lattice.cells[cell];
        self.local_energy(lattice, cell, code ^ mask) - self.local_energy(lattice, cell, code)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# bond disorder").unwrap();
        writeln!(out, "version {}", Self::FORMAT_VERSION).unwrap();
        writeln!(out, "size {} {}", self.width, self.height).unwrap();
        writeln!(out, "couplings {:e} {:e}", self.k2, self.k3).unwrap();
        for (family, v) in [
            ("l1h", &self.eta_h),
            ("l1v", &self.eta_v),
            ("l2", &self.eta2),
            ("l3", &self.eta3),
        ] {
            for (i, s) in v.iter().enumerate() {
                writeln!(out, "{family} {i} {s:+}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Format(format!("bond disorder: {m}"));
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<Vec<String>> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(bad(format!("expected {key}, found {line:?}")));
            }
            Ok(parts.map(String::from).collect())
        };
        let version = header("version")?;
        if version != [Self::FORMAT_VERSION.to_string()] {
            return Err(bad(format!("unsupported version {version:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|e| bad(e.to_string()));
        let flt = |s: &str| s.parse::<f64>().map_err(|e| bad(e.to_string()));
        let size = header("size")?;
        let couplings = header("couplings")?;
        if size.len() != 2 || couplings.len() != 2 {
            return Err(bad("malformed header".into()));
        }
        let mut b = Self::uniform(num(&size[0])?, num(&size[1])?, flt(&couplings[0])?, flt(&couplings[1])?);
        let n = b.num_cells();
        let mut seen = 0;
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [family, idx, s] = parts[..] else {
                return Err(bad(format!("malformed line {line:?}")));
            };
            let v = match family {
                "l1h" => &mut b.eta_h,
                "l1v" => &mut b.eta_v,
                "l2" => &mut b.eta2,
                "l3" => &mut b.eta3,
                _ => return Err(bad(format!("unknown family {family}"))),
            };
            let i = num(idx)?;
            if i >= n {
                return Err(bad(format!("index {i} out of range")));
            }
            v[i] = match s {
                "+1" => 1,
                "-1" => -1,
                _ => return Err(bad(format!("sign {s}"))),
            };
            seen += 1;
        }
        if seen != 4 * n {
            return Err(bad(format!("expected {} signs, found {seen}", 4 * n)));
        }
        Ok(b)
    }
}

/// Largest cell count accepted by exhaustive enumeration (`8^6` states).
pub const ENUMERATION_MAX_CELLS: usize = 6;

fn check_enumeration(cells: usize) -> Result<()> {
    if cells > ENUMERATION_MAX_CELLS {
        return Err(Error::Capacity(format!(
            "exact enumeration supports at most {ENUMERATION_MAX_CELLS} cells, got {cells}"
        )));
    }
    Ok(())
}

/// `ln sum exp(x)` without overflow.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Energies of all legal states, indexed by [`CellSpinLattice::state_index`].
pub fn enumerate_energies(bonds: &BondDisorder) -> Result<Vec<f64>> {
    check_enumeration(bonds.num_cells())?;
    let n = 1usize << (3 * bonds.num_cells());
    (0..n)
        .map(|i| bonds.energy(&CellSpinLattice::from_state_index(bonds.width, bonds.height, i)))
        .collect()
}

/// `ln Z` over constraint-satisfying states.
pub fn enumerate_partition_function(bonds: &BondDisorder, beta: f64) -> Result<f64> {
    Ok(log_sum_exp(enumerate_energies(bonds)?.into_iter().map(|e| -beta * e)))
}

/// Exact Boltzmann probabilities of all legal states.
pub fn boltzmann_distribution(bonds: &BondDisorder, beta: f64) -> Result<Vec<f64>> {
    let e = enumerate_energies(bonds)?;
    let log_z = log_sum_exp(e.iter().map(|e| -beta * e));
    Ok(e.iter().map(|e| (-beta * e - log_z).exp()).collect())
}

/// Free-energy cost `ln Z[bonds] - ln Z[bonds with wall]`.
pub fn domain_wall_delta(bonds: &BondDisorder, beta: f64, direction: WallDirection) -> Result<f64> {
    let wall = bonds.insert_domain_wall(direction);
    Ok(enumerate_partition_function(bonds, beta)? - enumerate_partition_function(&wall, beta)?)
}

/// Which inter-cell spin labels the l1 bonds couple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjacency {
    /// Right triangle to left triangle, bottom triangle to top triangle.
    Standard,
    /// Horizontal bonds from the bottom triangle and vertical bonds from the
    /// right triangle; inconsistent with the diagonal labels.
    Transposed,
}

impl Adjacency {
    /// Spin indices `(left cell, right cell)` and `(upper cell, lower cell)`.
    fn labels(self) -> ([usize; 2], [usize; 2]) {
        match self {
            Adjacency::Standard => ([2, 0], [3, 1]),
            Adjacency::Transposed => ([3, 0], [2, 1]),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    edge: usize,
    a: (usize, usize),
    /// `None` couples to the fixed exterior spin `+1`.
    b: Option<(usize, usize)>,
    /// Fraction of the edge log-odds carried by this term.
    share: f64,
}

/// Open-boundary model of a planar code, one cell per plaquette. Used to
/// compare thermodynamic success probabilities with exact coset sums.
#[derive(Debug, Clone)]
pub struct PlanarModel {
    width: usize,
    height: usize,
    terms: Vec<Term>,
    wall_edges: Vec<usize>,
}

impl PlanarModel {
    pub fn new(layout: &CodeLayout, edges: &EdgeSet, adjacency: Adjacency) -> Result<Self> {
        let d = layout.distance() as i32;
        let width = d as usize;
        let height = (d - 1) as usize;
        let cell_at = |x: i32, y: i32| -> Option<usize> {
            layout.z_stab_at(Coord::new(x, y))?;
            let col = (x / 2) as usize;
            let row = ((2 * d - 3 - y) / 2) as usize;
            Some(row * width + col)
        };
        let (h, v) = adjacency.labels();
        let mut terms = Vec::new();
        for (e, edge) in edges.edges().iter().enumerate() {
            match (&edge.family, &edge.owner) {
                (EdgeFamily::L1, EdgeOwner::Qubit(q)) => {
                    let c = layout.qubits()[*q];
                    if c.x % 2 != 0 {
                        let a = cell_at(c.x - 1, c.y).expect("west cell");
                        let b = cell_at(c.x + 1, c.y).expect("east cell");
                        terms.push(Term { edge: e, a: (a, h[0]), b: Some((b, h[1])), share: 0.5 });
                    } else {
                        match (cell_at(c.x, c.y + 1), cell_at(c.x, c.y - 1)) {
                            (Some(up), Some(down)) => terms.push(Term {
                                edge: e,
                                a: (up, v[0]),
                                b: Some((down, v[1])),
                                share: 0.5,
                            }),
                            (None, Some(down)) => terms.push(Term { edge: e, a: (down, v[1]), b: None, share: 0.5 }),
                            (Some(up), None) => terms.push(Term { edge: e, a: (up, v[0]), b: None, share: 0.5 }),
                            (None, None) => unreachable!("qubit without plaquette"),
                        }
                    }
                }
                (family, EdgeOwner::Pairs { plaquette, .. }) => {
                    let pc = layout.z_stabilizers()[*plaquette].coord;
                    let cell = cell_at(pc.x, pc.y).expect("plaquette cell");
                    let halves = if *family == EdgeFamily::L2 {
                        [(0, 1), (2, 3)]
                    } else {
                        [(0, 3), (1, 2)]
                    };
                    for (i, j) in halves {
                        terms.push(Term { edge: e, a: (cell, i), b: Some((cell, j)), share: 0.25 });
                    }
                }
                _ => unreachable!("edge family and owner disagree"),
            }
        }
        let wall_edges = layout.logical_z().iter().map(|&q| edges.qubit_edge(q)).collect();
        check_enumeration(width * height)?;
        Ok(PlanarModel {
            width,
            height,
            terms,
            wall_edges,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    /// `ln Z` at the likelihood temperature: each term weighs
    /// `share * J_e * eta_e * s_a * s_b` with `J_e` the log-odds of its edge.
    pub fn log_partition(&self, edges: &EdgeSet, signs: &EdgeSigns, params: &EffectiveParams, wall: bool) -> f64 {
        let mut eta: Vec<f64> = signs.eta.iter().map(|&s| s as f64).collect();
        if wall {
            for &e in &self.wall_edges {
                eta[e] = -eta[e];
            }
        }
        let coupling: Vec<f64> = (0..edges.len())
            .map(|e| crate::eem::log_odds(edges.edge_probability(e, params)) * eta[e])
            .collect();
        let n = self.num_cells();
        let mut spins = vec![[1.0f64; 4]; n];
        let mut logw = Vec::with_capacity(1 << (3 * n));
        for state in 0..(1usize << (3 * n)) {
            for (c, s) in spins.iter_mut().enumerate() {
                *s = SPINS_F[(state >> (3 * c)) & 7];
            }
            let w: f64 = self
                .terms
                .iter()
                .map(|t| {
                    let sa = spins[t.a.0][t.a.1];
                    let sb = t.b.map_or(1.0, |(c, k)| spins[c][k]);
                    t.share * coupling[t.edge] * sa * sb
                })
                .sum();
            logw.push(w);
        }
        log_sum_exp(logw)
    }

    /// `Z[eta] / (Z[eta] + Z[eta with the logical seam flipped])`.
    pub fn success_probability(&self, edges: &EdgeSet, signs: &EdgeSigns, params: &EffectiveParams) -> f64 {
        let a = self.log_partition(edges, signs, params, false);
        let b = self.log_partition(edges, signs, params, true);
        1.0 / (1.0 + (b - a).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn codes_roundtrip() {
        for c in 0..8u8 {
            let s = decode_cell(c);
            assert_eq!(s.iter().map(|&v| v as i32).product::<i32>(), 1);
            assert_eq!(encode_cell(s).unwrap(), c);
        }
        assert!(encode_cell([1, 1, 1, -1]).is_err());
    }

    #[test]
    fn pair_masks_flip_the_named_pairs() {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for c in 0..8u8 {
            for (m, &(i, j)) in PAIR_MASKS.iter().zip(&pairs) {
                let a = decode_cell(c);
                let b = decode_cell(c ^ m);
                for k in 0..4 {
                    assert_eq!(a[k] != b[k], k == i || k == j);
                }
            }
            let full = decode_cell(c ^ FULL_FLIP);
            assert!(full.iter().zip(decode_cell(c)).all(|(x, y)| *x == -y));
        }
    }

    #[test]
    fn uniform_energy() {
        let b = BondDisorder::uniform(2, 2, 0.3, 0.7);
        let e = b.energy(&CellSpinLattice::new(2)).unwrap();
        assert!((e + 4.0 * (2.0 + 2.0 * 0.3 + 2.0 * 0.7)).abs() < 1e-12);
    }

    #[test]
    fn size_mismatch() {
        let b = BondDisorder::uniform(2, 2, 0.3, 0.7);
        assert!(matches!(b.energy(&CellSpinLattice::new(3)), Err(Error::Dimension { .. })));
        assert!(b.delta_energy(&CellSpinLattice::new(2), 0, 6).is_err());
    }

    #[test]
    fn wall_flips_one_bond_per_row() {
        let b = BondDisorder::uniform(3, 3, 0.4, 0.4);
        for dir in [WallDirection::Vertical, WallDirection::Horizontal] {
            let w = b.insert_domain_wall(dir);
            let flipped = w.eta_h.iter().chain(&w.eta_v).filter(|&&s| s < 0).count();
            assert_eq!(flipped, 3);
            assert_eq!(w.insert_domain_wall(dir), b);
        }
    }

    #[test]
    fn enumeration_limits() {
        let b = BondDisorder::uniform(2, 2, 0.4, 0.4);
        let z = enumerate_partition_function(&b, 0.0).unwrap();
        assert!((z - 4.0 * 8f64.ln()).abs() < 1e-12);
        assert!(matches!(
            enumerate_partition_function(&BondDisorder::uniform(3, 3, 0.4, 0.4), 1.0),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn disorder_text_roundtrip() {
        let p = EffectiveParams::new(0.1, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = BondDisorder::sample_with(3, 2, &p, &mut rng);
        assert_eq!(BondDisorder::from_text(&b.to_text()).unwrap(), b);
        assert!(BondDisorder::from_text("version 9\n").is_err());
    }

    #[test]
    fn sampled_couplings_halve_reduced_ratio() {
        let p = EffectiveParams::new(0.03, 0.03).unwrap();
        let b = BondDisorder::sample(4, &p, 1);
        assert!((b.k2 - 0.5 * p.j2p).abs() < 1e-15);
        assert_eq!(b.k2, b.k3);
    }
}
