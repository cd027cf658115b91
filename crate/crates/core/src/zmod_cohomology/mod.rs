//! Cohomology of finite abelian groups with coefficients in finitely generated
//! modules `⊕ Z/d_j`, by brute-force linear algebra on inhomogeneous cochains.

mod cochain;
mod cyclic;
mod groupcoh;
mod induced;
mod infres;
mod module;

use thiserror::Error;

use crate::groups::GroupError;
use crate::linalg::LinalgError;

pub use cochain::{Cochain, CochainSpace};
pub use cyclic::{chi, cyclic_integral_space, genchange, GenChange};
pub use groupcoh::{
    cohomology, cup_h2_hminus2, h1_bruteforce, h2_bruteforce, solve_coboundary, CohomologyGroup,
};
pub use induced::{dim_shift_backward, dim_shift_forward, InducedFlavor, InducedModule};
pub use infres::{
    fixed_module, inflate, infres_invert, restriction_trivializer,
    restriction_trivializer_via_dimshift, FixedModule, InfResResult,
};
pub use module::{FiniteGModule, GroupView};

pub const DEFAULT_MAX_GROUP_ORDER: usize = 16;
pub const DEFAULT_MAX_MODULE_ORDER: u128 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("not a {degree}-cocycle; first failure at {witness}")]
    NotCocycle { degree: usize, witness: String },
    #[error("2-cocycle is not normalised (c(e,e) != 0)")]
    NotNormalized,
    #[error("H1-nonzero: H^1(H, A) has invariants {orders:?}")]
    H1Nonzero { orders: Vec<u64> },
    #[error("restriction-nontrivial: the class does not vanish on H")]
    RestrictionNontrivial,
    #[error("{k} is not a unit modulo {n}")]
    NotCoprime { k: u64, n: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CohomologyError>;
