//! Finite-dimensional workbench for refined torsion.
//!
//! The crate computes determinant-line torsion of finite cochain
//! complexes, the refined torsion attached to a chirality operator, the
//! graded determinant of the finite odd signature operator with
//! spectral-cut bookkeeping, sign-refined eta invariants, combinatorial
//! torsion of twisted CW systems, and holomorphy diagnostics for analytic
//! families of such objects.

pub mod config;
pub mod corpus;
pub mod cw;
pub mod detline;
pub mod error;
pub mod families;
pub mod jsonfmt;
pub mod linalg;
pub mod randgen;
pub mod refined;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
