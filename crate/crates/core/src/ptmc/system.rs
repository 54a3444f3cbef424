use std::f64::consts::PI;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::rbim::{BondDisorder, CellSpinLattice, PAIR_MASKS, SPINS, SPINS_F};
use crate::reference::SquareRbim;

/// Spin sums needed for `chi(0)` and `chi(k_min)` with `k_min = (2 pi / L, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinSums {
    pub m0: f64,
    pub mk_re: f64,
    pub mk_im: f64,
}

impl SpinSums {
    /// `|sum s|^2 / L^2`.
    pub fn chi0(&self, l: usize) -> f64 {
        self.m0 * self.m0 / (l * l) as f64
    }

    /// `|sum s exp(i k x)|^2 / L^2`.
    pub fn chik(&self, l: usize) -> f64 {
        (self.mk_re * self.mk_re + self.mk_im * self.mk_im) / (l * l) as f64
    }
}

/// A model the tempering engine can drive.
pub trait SpinSystem: Sync {
    type State: Clone + Send + PartialEq + std::fmt::Debug;

    fn linear_size(&self) -> usize;

    /// Proposed moves in one sweep.
    fn moves_per_sweep(&self) -> usize;

    fn ordered_state(&self) -> Self::State;

    fn random_state<R: Rng>(&self, rng: &mut R) -> Self::State;

    fn energy(&self, state: &Self::State) -> f64;

    /// One Metropolis sweep at inverse temperature `beta`; `energy` is updated
    /// in place. Returns the number of accepted moves.
    fn sweep<R: Rng>(&self, state: &mut Self::State, beta: f64, energy: &mut f64, rng: &mut R)
        -> u64;

    fn spin_sums(&self, state: &Self::State) -> SpinSums;

    fn encode_state(&self, state: &Self::State) -> Vec<u8>;

    fn decode_state(&self, bytes: &[u8]) -> Result<Self::State>;
}

/// Uniform index below `n` and pair choice from one 64-bit draw.
#[inline]
fn draw_move<R: RngCore>(rng: &mut R, n: usize) -> (usize, usize) {
    let r = rng.next_u64();
    let cell = (((r >> 32) * n as u64) >> 32) as usize;
    let choice = (((r & 0xFFFF_FFFF) * 6) >> 32) as usize;
    (cell, choice)
}

#[inline]
fn metropolis<R: Rng>(delta: f64, beta: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp()
}

/// x-offsets of the four triangle spins inside a cell.
pub const SPIN_OFFSETS: [f64; 4] = [-0.25, 0.0, 0.25, 0.0];

/// Neighbours and signed couplings of one cell, laid out for the sweep kernel.
#[derive(Debug, Clone, Copy)]
struct CellCouplings {
    /// Left, up, right, down neighbour cells.
    nbr: [u32; 4],
    /// Couplings of `s1` to the left cell's `s3`, `s2` to the upper cell's
    /// `s4`, `s3` to the right cell's `s1`, `s4` to the lower cell's `s2`.
    j: [f64; 4],
    k2: f64,
    k3: f64,
}

/// The constrained model on a periodic lattice.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    bonds: BondDisorder,
    /// `(cos, sin)` of `k_min * x` per column and spin label.
    phases: Vec<[(f64, f64); 4]>,
    /// Empty when the lattice has self-bonds (width or height 1).
    table: Vec<CellCouplings>,
}

impl ConstrainedSystem {
    pub fn new(bonds: BondDisorder) -> Self {
        let l = bonds.width as f64;
        let phases = (0..bonds.width)
            .map(|x| {
                let mut p = [(0.0, 0.0); 4];
                for (k, off) in SPIN_OFFSETS.iter().enumerate() {
                    let a = 2.0 * PI * (x as f64 + off) / l;
                    p[k] = (a.cos(), a.sin());
                }
                p
            })
            .collect();
        let lat = CellSpinLattice::rect(bonds.width, bonds.height);
        let table = if bonds.width > 1 && bonds.height > 1 {
            (0..bonds.num_cells())
                .map(|c| {
                    let (l, u, r, d) = (lat.left(c), lat.up(c), lat.right(c), lat.down(c));
                    CellCouplings {
                        nbr: [l as u32, u as u32, r as u32, d as u32],
                        j: [
                            bonds.eta_h[l] as f64,
                            bonds.eta_v[u] as f64,
                            bonds.eta_h[c] as f64,
                            bonds.eta_v[c] as f64,
                        ],
                        k2: bonds.k2 * bonds.eta2[c] as f64,
                        k3: bonds.k3 * bonds.eta3[c] as f64,
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        ConstrainedSystem { bonds, phases, table }
    }

    #[inline]
    fn fast_delta(&self, cells: &[u8], cell: usize, mask: u8) -> f64 {
        let t = &self.table[cell];
        let code = cells[cell];
        let s = &SPINS_F[code as usize];
        let n = &SPINS_F[(code ^ mask) as usize];
        let h = [
            t.j[0] * SPINS_F[cells[t.nbr[0] as usize] as usize][2],
            t.j[1] * SPINS_F[cells[t.nbr[1] as usize] as usize][3],
            t.j[2] * SPINS_F[cells[t.nbr[2] as usize] as usize][0],
            t.j[3] * SPINS_F[cells[t.nbr[3] as usize] as usize][1],
        ];
        let e = |s: &[f64; 4]| {
            h[0] * s[0]
                + h[1] * s[1]
                + h[2] * s[2]
                + h[3] * s[3]
                + t.k2 * (s[0] * s[1] + s[2] * s[3])
                + t.k3 * (s[0] * s[3] + s[1] * s[2])
        };
        e(s) - e(n)
    }

    pub fn bonds(&self) -> &BondDisorder {
        &self.bonds
    }
}

impl SpinSystem for ConstrainedSystem {
    type State = CellSpinLattice;

    fn linear_size(&self) -> usize {
        self.bonds.width
    }

    fn moves_per_sweep(&self) -> usize {
        self.bonds.num_cells()
    }

    fn ordered_state(&self) -> CellSpinLattice {
        CellSpinLattice::rect(self.bonds.width, self.bonds.height)
    }

    fn random_state<R: Rng>(&self, rng: &mut R) -> CellSpinLattice {
        CellSpinLattice::random(self.bonds.width, self.bonds.height, rng)
    }

    fn energy(&self, state: &CellSpinLattice) -> f64 {
        self.bonds.energy(state).expect("state matches bonds")
    }

    fn sweep<R: Rng>(&self, state: &mut CellSpinLattice, beta: f64, energy: &mut f64, rng: &mut R) -> u64 {
        let n = state.num_cells();
        let mut accepted = 0;
        for _ in 0..n {
            let (cell, choice) = draw_move(rng, n);
            let mask = PAIR_MASKS[choice];
            let delta = if self.table.is_empty() {
                self.bonds.delta_mask(state, cell, mask)
            } else {
                self.fast_delta(state.codes(), cell, mask)
            };
            if metropolis(delta, beta, rng) {
                state.set_code(cell, state.code(cell) ^ mask);
                *energy += delta;
                accepted += 1;
            }
        }
        debug_assert!(state.constraint_holds());
        accepted
    }

    fn spin_sums(&self, state: &CellSpinLattice) -> SpinSums {
        let w = state.width();
        let mut sums = SpinSums::default();
        for (c, &code) in state.codes().iter().enumerate() {
            let s = SPINS[code as usize];
            let ph = &self.phases[c % w];
            for k in 0..4 {
                let v = s[k] as f64;
                sums.m0 += v;
                sums.mk_re += v * ph[k].0;
                sums.mk_im += v * ph[k].1;
            }
        }
        sums
    }

    fn encode_state(&self, state: &CellSpinLattice) -> Vec<u8> {
        state.codes().to_vec()
    }

    fn decode_state(&self, bytes: &[u8]) -> Result<CellSpinLattice> {
        CellSpinLattice::from_codes(self.bonds.width, self.bonds.height, bytes.to_vec())
    }
}

/// The square-lattice ±J model, one spin per site.
#[derive(Debug, Clone)]
pub struct ReferenceSystem {
    model: SquareRbim,
    phases: Vec<(f64, f64)>,
}

impl ReferenceSystem {
    pub fn new(model: SquareRbim) -> Self {
        let l = model.linear_size();
        let phases = (0..l)
            .map(|x| {
                let a = 2.0 * PI * x as f64 / l as f64;
                (a.cos(), a.sin())
            })
            .collect();
        ReferenceSystem { model, phases }
    }

    pub fn model(&self) -> &SquareRbim {
        &self.model
    }
}

impl SpinSystem for ReferenceSystem {
    type State = Vec<i8>;

    fn linear_size(&self) -> usize {
        self.model.linear_size()
    }

    fn moves_per_sweep(&self) -> usize {
        self.model.linear_size().pow(2)
    }

    fn ordered_state(&self) -> Vec<i8> {
        vec![1; self.model.linear_size().pow(2)]
    }

    fn random_state<R: Rng>(&self, rng: &mut R) -> Vec<i8> {
        (0..self.model.linear_size().pow(2))
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect()
    }

    fn energy(&self, state: &Vec<i8>) -> f64 {
        self.model.energy(state)
    }

    fn sweep<R: Rng>(&self, state: &mut Vec<i8>, beta: f64, energy: &mut f64, rng: &mut R) -> u64 {
        let n = state.len();
        let mut accepted = 0;
        for _ in 0..n {
            let (i, _) = draw_move(rng, n);
            let delta = self.model.delta_energy(state, i);
            if metropolis(delta, beta, rng) {
                state[i] = -state[i];
                *energy += delta;
                accepted += 1;
            }
        }
        accepted
    }

    fn spin_sums(&self, state: &Vec<i8>) -> SpinSums {
        let l = self.model.linear_size();
        let mut sums = SpinSums::default();
        for (i, &s) in state.iter().enumerate() {
            let v = s as f64;
            let (c, sn) = self.phases[i % l];
            sums.m0 += v;
            sums.mk_re += v * c;
            sums.mk_im += v * sn;
        }
        sums
    }

    fn encode_state(&self, state: &Vec<i8>) -> Vec<u8> {
        state.iter().map(|&s| (s < 0) as u8).collect()
    }

    fn decode_state(&self, bytes: &[u8]) -> Result<Vec<i8>> {
        let n = self.model.linear_size().pow(2);
        if bytes.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: bytes.len(),
            });
        }
        bytes
            .iter()
            .map(|&b| match b {
                0 => Ok(1),
                1 => Ok(-1),
                _ => Err(Error::Format(format!("spin byte {b}"))),
            })
            .collect()
    }
}
