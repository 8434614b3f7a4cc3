//! Substitution rules for one-dimensional interval projection tilings.
//!
//! A tiling is cut out of `Z²` by a strip parallel to the expanding
//! eigenvector of a primitive unimodular matrix `M`; all geometry is carried
//! out exactly in the quadratic field generated by the eigenvalue. On top of
//! the staircase dynamics the crate derives every substitution rule of a
//! tiling from a choice of subwindow, classifies rules as local or not,
//! counts fixed tilings, inverts rules as free-group automorphisms and
//! renormalizes the associated interval exchanges.
//!
//! ```
//! use tilingforge::{derive_rule, lattice::{UniMatrix, Vec2}, LabelStyle};
//!
//! let rule = derive_rule(UniMatrix::new(1, 1, 1, 0), &Vec2::int(-1, 1), &Vec2::int(-1, 1)).unwrap();
//! assert_eq!(rule.format(LabelStyle::Letters), "a→ab, b→a");
//! ```

pub mod analysis;
pub mod cli;
pub mod freegroup;
pub mod iet;
pub mod lattice;
pub mod quadfield;
pub mod render;
pub mod staircase;
pub mod substitution;

pub use quadfield::{QfNum, QuadField};
pub use staircase::{Label, LabelStyle, Shape, Tiling};
pub use substitution::{derive_rule, SubstitutionRule};

use quadfield::QuadField as Field;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched fields: {0} and {1}")]
    FieldMismatch(Field, Field),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i64),
    #[error("matrix is not primitive")]
    NotPrimitive,
    #[error("degenerate matrix: {0}")]
    Degenerate(String),
    #[error("degenerate window: {0}")]
    DegenerateWindow(String),
    #[error("subwindow not contained in window: {0}")]
    Containment(String),
    #[error("unsatisfied precondition: {0}")]
    Precondition(String),
    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("patch does not occur in the tiling")]
    Unrealizable,
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("invalid input: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
