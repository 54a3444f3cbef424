//! Threshold tools for the planar surface code under correlated pair noise.

pub mod analysis;
pub mod decoder;
pub mod eem;
pub mod error;
pub mod layout;
pub mod ptmc;
pub mod rbim;
pub mod reference;
pub mod rng;
pub mod validation;

pub use eem::{EdgeFamily, EdgeSet, EffectiveParams};
pub use error::{Error, Result};
pub use layout::{CodeLayout, Coord, LogicalClass, MechanismSet, PairKind, Syndrome};

/// README and book chapters, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/effective-edges.md")]
    mod effective_edges {}
    #[doc = include_str!("../../../book/src/spin-model.md")]
    mod spin_model {}
    #[doc = include_str!("../../../book/src/equivalence.md")]
    mod equivalence {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/crossings.md")]
    mod crossings {}
    #[doc = include_str!("../../../book/src/decoding.md")]
    mod decoding {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
