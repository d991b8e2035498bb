//! Storage of weak light pulses as dark-state polaritons in inhomogeneously
//! broadened solids.

pub mod analytic;
pub mod bloch;
pub mod constants;
pub mod drive;
pub mod ensemble;
pub mod export;
pub mod error;
pub mod feasibility;
pub mod grid;
pub mod material;
pub mod polariton;
pub mod validation;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/maxwell_bloch.md")]
    mod maxwell_bloch {}
    #[doc = include_str!("../../../book/src/polaritons.md")]
    mod polaritons {}
    #[doc = include_str!("../../../book/src/feasibility.md")]
    mod feasibility {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
