//! Explicit fundamental classes of abelian extensions `L/K` of `Q_p`.
//!
//! The tower `K ⊂ L ⊂ LM`, with `M/K` unramified of degree `n = [L:K]`, is
//! realised as a single [`Field`](crate::padic_fields::Field); elements of `L`
//! are the elements fixed by `H = <σ_0^f>`.

pub mod classes;
pub mod pipeline;
pub mod tower;
pub mod tuple;

use std::fmt;

use crate::padic_fields::PadicError;

pub use classes::{
    artin_evaluate, artin_normalization, artin_table, invariant_cyclic_unramified, norm_group,
    restriction_invariant, row_norm, tuple_fingerprint, ArtinNormalization, ArtinRow, ClassVector,
    Fingerprint, Invariant, NormGroup,
};
pub use pipeline::{
    compute_b, compute_c_prime, compute_etas, compute_gamma, fundamental_tuple,
    fundamental_tuple_at, guard_digits, tame_tuple, with_guard_retry, FundamentalData, GUARD_ENV,
};
pub use tower::{Tower, DEFAULT_PRECISION, WILD_PRECISION};
pub use tuple::{
    cocycle_from_tuple, tuple_from_cocycle, unramified_cocycle, verify_cocycle, CocycleReport,
    EncodingTuple, LocalCocycle,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FundclassError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("pipeline check failed: {0}")]
    Pipeline(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl FundclassError {
    pub fn is_precision(&self) -> bool {
        matches!(self, FundclassError::Padic(PadicError::Precision(_)))
    }
}

pub type Result<T> = std::result::Result<T, FundclassError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Unramified { n: u64 },
    TameAbelian { e: u64, f: u64 },
    CyclotomicWild { nu: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSpec {
    pub p: u64,
    pub family: Family,
    /// Requested precision in `p`-adic digits.
    pub precision: u32,
    /// Residue `u` of the Teichmüller unit in the tame radicand `π = ω(u)·p`.
    pub twist: u64,
}

impl ExtensionSpec {
    pub fn new(p: u64, family: Family) -> Self {
        let precision = match family {
            Family::CyclotomicWild { nu } if nu >= 2 => WILD_PRECISION,
            _ => DEFAULT_PRECISION,
        };
        ExtensionSpec {
            p,
            family,
            precision,
            twist: 1,
        }
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_twist(mut self, twist: u64) -> Self {
        self.twist = twist;
        self
    }

    /// `[L:K]`.
    pub fn degree(&self) -> u64 {
        match self.family {
            Family::Unramified { n } => n,
            Family::TameAbelian { e, f } => e * f,
            Family::CyclotomicWild { nu } => (self.p - 1) * self.p.pow(nu - 1),
        }
    }

    /// `self` with `TameAbelian { e: 1, f }` rewritten as `Unramified { n: f }`.
    pub fn canonical(&self) -> Self {
        let mut s = self.clone();
        if let Family::TameAbelian { e: 1, f } = s.family {
            s.family = Family::Unramified { n: f };
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p;
        if !crate::padic_fields::finite_field::is_prime(p) {
            return Err(FundclassError::Input(format!("p must be prime, got {p}")));
        }
        if self.precision == 0 {
            return Err(FundclassError::Input("precision must be positive".into()));
        }
        match self.family {
            Family::Unramified { n: 0 } => {
                return Err(FundclassError::Input("n must be positive".into()))
            }
            Family::TameAbelian { e, f } => {
                if e == 0 || f == 0 {
                    return Err(FundclassError::Input("e and f must be positive".into()));
                }
                if !(p - 1).is_multiple_of(e) {
                    return Err(FundclassError::Input(format!(
                        "e={e} must divide p-1={} for an abelian extension",
                        p - 1
                    )));
                }
            }
            Family::CyclotomicWild { nu } => {
                if p == 2 {
                    return Err(FundclassError::Input(
                        "cyclotomic family requires odd p".into(),
                    ));
                }
                if nu == 0 {
                    return Err(FundclassError::Input("nu must be positive".into()));
                }
            }
            _ => {}
        }
        if self.twist != 1 {
            if !matches!(self.canonical().family, Family::TameAbelian { .. }) {
                return Err(FundclassError::Input(
                    "a uniformiser twist applies to tame extensions only".into(),
                ));
            }
            if self.twist == 0 || self.twist >= p {
                return Err(FundclassError::Input(format!("twist must lie in 1..{p}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Unramified { n } => write!(f, "unramified p={} n={n}", self.p)?,
            Family::TameAbelian { e, f: ff } => write!(f, "tame p={} e={e} f={ff}", self.p)?,
            Family::CyclotomicWild { nu } => write!(f, "cyclotomic p={} nu={nu}", self.p)?,
        }
        if self.twist != 1 {
            write!(f, " twist={}", self.twist)?;
        }
        write!(f, " prec={}", self.precision)
    }
}
