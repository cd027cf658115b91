//! Finite-precision arithmetic in two-layer `p`-adic fields: an unramified layer
//! `W = Z_p[ω]` with `ω` a Teichmüller root of unity, then optionally a tame
//! Kummer layer `ρ^e = π` or a cyclotomic layer `Φ_{p^ν}(ζ) = 0` over it.

pub mod element;
pub mod field;
pub mod finite_field;
pub mod modarith;
pub mod solvers;

pub use element::{norm, partial_norm, trace, FieldElement};
pub use field::{Automorphism, Field, FieldSpec, RamifiedLayer, DEFAULT_MAX_RESIDUE_SIZE};
pub use finite_field::{DlogTable, GaloisField};
pub use solvers::{
    hensel_root, primitive_root_of_unity, solve_h90, solve_unit_norm, subfield_root_of_unity,
    teichmuller,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("field mismatch: {0}")]
    Mismatch(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("obstruction: {0}")]
    Obstruction(String),
    #[error("parameters too large: {0}")]
    TooLarge(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;
