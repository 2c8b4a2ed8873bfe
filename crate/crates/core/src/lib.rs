#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Quantum-jump simulation of a periodically driven qubit exchanging energy
//! with a small electronic calorimeter.

pub mod effective;
pub mod error;
pub mod floquet;
pub mod io;
pub mod linalg;
pub mod params;
pub mod qubit;
pub mod sim;
pub mod stats;
pub mod thermo;
pub mod units;

pub use error::{Error, ErrorKind, Result};
