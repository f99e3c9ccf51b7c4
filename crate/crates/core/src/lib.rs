//! Traversal, dwell and sojourn timescales for one-dimensional wave scattering.
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod derivative;
pub mod em_pulse;
pub mod error;
pub mod first_passage;
pub mod potentials;
pub mod quadrature;
pub mod scatter;
pub mod timescales;

pub use error::{Error, Result};
