//! Exact engine for the dynamics of affine maps T(x) = Ax + c given in
//! Jordan-block form: closed-form expansion of the iterates T^k x and of
//! their running averages, classification of both sequences (bounded,
//! divergent, convergent, bounded away from zero), and brute-force oracles
//! that every closed form is checked against. All arithmetic is exact over
//! Gaussian rationals by default, with a float fallback for long empirical
//! sweeps.

pub mod averages;
pub mod combinatorics;
pub mod error;
pub mod gallery;
pub mod iterates;
pub mod jordan;
pub mod kpoly;
pub mod parallel;
pub mod property_p;
pub mod sampling;
pub mod scalar;
pub mod verdict;

pub use error::{Error, Result};
pub use jordan::{BlockVector, JordanBlock, JordanSystem, Segment};
pub use scalar::{Mode, Scalar};
pub use verdict::{BlockKind, BlockVerdict, CaseLabel, Verdict, VerdictKind};
