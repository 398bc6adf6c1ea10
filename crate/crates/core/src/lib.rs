//! Birkhoff-James orthogonality on finite-dimensional real normed spaces.
//!
//! `x ⊥_B y` when `‖x‖ <= ‖x + λy‖` for every real `λ`, and likewise for
//! operators under the operator norm. The crate decides both relations,
//! computes norm-attainment sets, tests left/right symmetry of points and
//! operators, and ships executable reproductions of the classical worked
//! examples in [`catalog`].

pub mod catalog;
pub mod cones;
pub mod error;
pub(crate) mod linalg;
pub mod operators;
pub(crate) mod par;
pub(crate) mod sampling;
pub mod settings;
pub mod spaces;
pub mod symmetry;

pub use cones::{TriState, Verdict};
pub use error::{Error, Result};
pub use operators::{NormAttainment, OperatorMatrix, OrthDecision};
pub use settings::Settings;
pub use spaces::{DerivativeInterval, Exponent, Space, SpaceDescriptor, SupportFace};
pub use symmetry::{Counterexample, SymmetryKind, SymmetryOutcome, SymmetryVerdict};
