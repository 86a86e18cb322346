//! Topological degeneracy test for real parametrized Hamiltonians.
//!
//! An eigenframe is carried around a closed loop in parameter space. If any
//! eigenvector comes back with flipped sign, or if the loop of frames is not
//! contractible in SO(n), the loop must enclose a degeneracy on every surface it
//! bounds. When the frame loop is contractible the [`extension`] module builds a
//! gap-open Hamiltonian on the disc that matches the boundary data, which shows
//! that nothing more can be inferred from the loop alone.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extension;
pub mod linalg;
pub mod models;
pub mod topology;
pub mod transport;

pub use error::{Error, Result};
