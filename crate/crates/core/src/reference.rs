//! Square-lattice ±J random-bond Ising model.
//!
//! The limit of the constrained model when pair errors vanish: the diagonal
//! couplings diverge, the four spins of each cell lock together and only the
//! l1 bonds remain. Used to validate the simulation pipeline.

use rand::Rng;

use crate::error::{Error, Result};
use crate::layout::check_probability;

#[derive(Debug, Clone, PartialEq)]
pub struct SquareRbim {
    l: usize,
    /// Bond from site `i` to its right neighbour.
    pub jh: Vec<i8>,
    /// Bond from site `i` to the site below.
    pub jv: Vec<i8>,
}

impl SquareRbim {
    pub fn ferromagnet(l: usize) -> Self {
        SquareRbim {
            l,
            jh: vec![1; l * l],
            jv: vec![1; l * l],
        }
    }

    /// Each bond is antiferromagnetic with probability `p`.
    pub fn sample_with<R: Rng>(l: usize, p: f64, rng: &mut R) -> Result<Self> {
        check_probability("p", p)?;
        if l < 2 {
            return Err(Error::Parameter(format!("lattice size {l} below 2")));
        }
        let mut m = Self::ferromagnet(l);
        for j in m.jh.iter_mut().chain(m.jv.iter_mut()) {
            *j = if rng.gen::<f64>() < p { -1 } else { 1 };
        }
        Ok(m)
    }

    pub fn linear_size(&self) -> usize {
        self.l
    }

    #[inline]
    pub(crate) fn right(&self, i: usize) -> usize {
        let (x, y) = (i % self.l, i / self.l);
        y * self.l + (x + 1) % self.l
    }

    #[inline]
    pub(crate) fn left(&self, i: usize) -> usize {
        let (x, y) = (i % self.l, i / self.l);
        y * self.l + (x + self.l - 1) % self.l
    }

    #[inline]
    pub(crate) fn down(&self, i: usize) -> usize {
        (i + self.l) % (self.l * self.l)
    }

    #[inline]
    pub(crate) fn up(&self, i: usize) -> usize {
        (i + self.l * self.l - self.l) % (self.l * self.l)
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        (0..spins.len())
            .map(|i| {
                let s = spins[i] as i32;
                -(self.jh[i] as i32 * s * spins[self.right(i)] as i32
                    + self.jv[i] as i32 * s * spins[self.down(i)] as i32) as f64
            })
            .sum()
    }

    /// Energy change of flipping spin `i`.
    #[inline]
    pub fn delta_energy(&self, spins: &[i8], i: usize) -> f64 {
        let field = self.jh[i] as i32 * spins[self.right(i)] as i32
            + self.jh[self.left(i)] as i32 * spins[self.left(i)] as i32
            + self.jv[i] as i32 * spins[self.down(i)] as i32
            + self.jv[self.up(i)] as i32 * spins[self.up(i)] as i32;
        (2 * spins[i] as i32 * field) as f64
    }
}

/// Nishimori inverse temperature of the ±J model, `0.5 ln((1 - p) / p)`.
pub fn nishimori_beta(p: f64) -> f64 {
    0.5 * ((1.0 - p) / p).ln()
}
