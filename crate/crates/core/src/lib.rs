#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deformation;
pub mod error;
pub mod experiment;
pub mod flow;
pub mod frames;
pub mod grid;
pub mod hamiltonian;
pub mod linalg;
pub mod shift;
pub mod symbol;
pub mod weyl;

pub use error::{Error, Result};
