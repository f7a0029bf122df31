//! Nominal classification over a hierarchy of criteria by similarity and
//! dissimilarity to reference actions, with stochastic acceptability analysis
//! of card-deck preference information and robust classification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod document;
pub mod engine;
pub mod error;
pub mod export;
pub mod hierarchy;
pub mod likeness;
pub mod lp;
pub mod robust;
pub mod sampler;
pub mod smaa;
pub mod srf;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/documents.md")]
    mod documents {}
    #[doc = include_str!("../../../book/src/likeness.md")]
    mod likeness {}
    #[doc = include_str!("../../../book/src/decks.md")]
    mod decks {}
    #[doc = include_str!("../../../book/src/smaa.md")]
    mod smaa {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/service.md")]
    mod service {}
}
