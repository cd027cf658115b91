use std::sync::Arc;

use crate::groups::{AbelianPresentation, GroupElement};
use crate::padic_fields::{Automorphism, Field, FieldElement, FieldSpec, RamifiedLayer};

use super::{ExtensionSpec, Family, FundclassError, Result};

pub const DEFAULT_PRECISION: u32 = 32;
/// Default for cyclotomic towers with `ν >= 2`.
pub const WILD_PRECISION: u32 = 48;

/// `K = Q_p ⊂ L ⊂ LM`, with `M` unramified of degree `n` and
/// `Gal(LM/K) = <σ_0> ⊕ <σ_1>`.
#[derive(Debug, Clone)]
pub struct Tower {
    pub spec: ExtensionSpec,
    pub field: Arc<Field>,
    /// `[L:K]`.
    pub n: u64,
    /// Inertia degree of `L/K`.
    pub f: u64,
    /// `Gal(LM/K)` on the generators `sigma`.
    pub galois: AbelianPresentation,
    pub sigma: Vec<Automorphism>,
    /// `Gal(L/K)`, generated by the restrictions of `sigma[indices[k]]`.
    pub quotient: AbelianPresentation,
    pub indices: Vec<usize>,
    /// `σ_0^f`, generating `H = Gal(LM/L)` of order `n / f`.
    pub h_gen: Automorphism,
    pub h_order: u64,
    /// Uniformiser of `K`.
    pub pi: FieldElement,
    /// Uniformiser of `K_π = (LM)^{<σ_0>}`.
    pub varpi: FieldElement,
}

pub(crate) fn least_primitive_root(m: u64, p: u64) -> u64 {
    let phi = m - m / p;
    let factors = crate::padic_fields::finite_field::prime_factors(phi);
    (2..m)
        .find(|&x| {
            x % p != 0
                && factors
                    .iter()
                    .all(|&l| crate::padic_fields::finite_field::pow_mod(x, phi / l, m) != 1)
        })
        .unwrap_or(1)
}

impl Tower {
    /// Builds the tower with coefficients modulo `p^working`.
    pub fn new(spec: &ExtensionSpec, working: u32) -> Result<Tower> {
        spec.validate()?;
        let spec_c = spec.canonical();
        let p = spec.p;
        let n = spec_c.degree();
        let d = n as usize;
        match spec_c.family {
            Family::Unramified { n } => {
                let field = Field::new(FieldSpec::unramified(p, d, working))?;
                let quotient = if n == 1 {
                    AbelianPresentation::trivial()
                } else {
                    cyc(n)?
                };
                let indices = if n == 1 { vec![] } else { vec![0] };
                let pi = FieldElement::from_int(&field, p as i128);
                Ok(Tower {
                    spec: spec.clone(),
                    sigma: vec![field.frobenius()],
                    galois: cyc(n)?,
                    quotient,
                    indices,
                    h_gen: field.identity_automorphism(),
                    h_order: 1,
                    varpi: pi.clone(),
                    pi,
                    n,
                    f: n,
                    field,
                })
            }
            Family::TameAbelian { e, f } => {
                let fspec = FieldSpec {
                    p,
                    d,
                    layer: RamifiedLayer::Tame {
                        e,
                        unit: spec.twist,
                        root_degree: f as usize,
                    },
                    prec: working,
                };
                let field = Field::new(fspec)?;
                let s0 = field.frobenius();
                let s1 = field.automorphism(0, 1)?;
                let (quotient, indices) = if f == 1 {
                    (cyc(e)?, vec![1])
                } else {
                    (pres(vec![f, e])?, vec![0, 1])
                };
                Ok(Tower {
                    spec: spec.clone(),
                    galois: pres(vec![n, e])?,
                    sigma: vec![s0, s1],
                    quotient,
                    indices,
                    h_gen: field.auto_pow(&s0, f),
                    h_order: e,
                    pi: FieldElement::base_uniformizer(&field),
                    varpi: FieldElement::ramified_generator(&field),
                    n,
                    f,
                    field,
                })
            }
            Family::CyclotomicWild { nu } => {
                let field = Field::new(FieldSpec::cyclotomic(p, d, nu, working))?;
                let x = least_primitive_root(field.pnu(), p);
                let s0 = field.frobenius();
                let s1 = field.automorphism(0, x)?;
                Ok(Tower {
                    spec: spec.clone(),
                    galois: pres(vec![n, n])?,
                    sigma: vec![s0, s1],
                    quotient: cyc(n)?,
                    indices: vec![1],
                    h_gen: s0,
                    h_order: n,
                    pi: FieldElement::from_int(&field, p as i128),
                    varpi: FieldElement::uniformizer(&field),
                    n,
                    f: 1,
                    field,
                })
            }
        }
    }

    /// Requested precision, in digits.
    pub fn precision(&self) -> u32 {
        self.spec.precision
    }

    /// `∏ σ_i^{g_i}` for `g ∈ Gal(LM/K)`.
    pub fn auto_of(&self, g: &GroupElement) -> Automorphism {
        g.0.iter()
            .zip(&self.sigma)
            .fold(self.field.identity_automorphism(), |acc, (&k, s)| {
                self.field.compose(&acc, &self.field.auto_pow(s, k))
            })
    }

    /// Automorphism of `LM` restricting to `q ∈ Gal(L/K)`.
    pub fn quotient_auto(&self, q: &GroupElement) -> Automorphism {
        q.0.iter()
            .zip(&self.indices)
            .fold(self.field.identity_automorphism(), |acc, (&k, &i)| {
                self.field
                    .compose(&acc, &self.field.auto_pow(&self.sigma[i], k))
            })
    }

    /// Automorphism for the `k`-th generator of `Gal(L/K)`.
    pub fn generator_auto(&self, k: usize) -> Automorphism {
        self.sigma[self.indices[k]]
    }

    /// Image of `g ∈ Gal(LM/K)` in `Gal(L/K)`.
    pub fn project(&self, g: &GroupElement) -> GroupElement {
        GroupElement(
            self.indices
                .iter()
                .zip(self.quotient.orders())
                .map(|(&i, &o)| g.0[i] % o)
                .collect(),
        )
    }

    pub fn h_autos(&self) -> Vec<Automorphism> {
        (0..self.h_order)
            .map(|k| self.field.auto_pow(&self.h_gen, k))
            .collect()
    }

    pub fn quotient_autos(&self) -> Vec<Automorphism> {
        (0..self.quotient.order() as usize)
            .map(|i| self.quotient_auto(&self.quotient.element_at(i)))
            .collect()
    }

    pub fn galois_autos(&self) -> Vec<Automorphism> {
        (0..self.galois.order() as usize)
            .map(|i| self.auto_of(&self.galois.element_at(i)))
            .collect()
    }

    /// `x ∈ L`, tested as `σ_0^f(x) ≡ x` at the requested precision.
    pub fn in_l(&self, x: &FieldElement) -> Result<bool> {
        Ok(x.apply(&self.h_gen).congruent(x, self.precision() as i64)?)
    }

    /// Ramification index of `L/K`.
    pub fn ramification(&self) -> u64 {
        self.n / self.f
    }

    pub fn check_in_l(&self, what: &str, x: &FieldElement) -> Result<()> {
        if self.in_l(x)? {
            Ok(())
        } else {
            Err(FundclassError::Pipeline(format!(
                "{what} is not fixed by σ_0^f"
            )))
        }
    }
}

fn cyc(n: u64) -> Result<AbelianPresentation> {
    pres(vec![n])
}

fn pres(orders: Vec<u64>) -> Result<AbelianPresentation> {
    AbelianPresentation::new(orders).map_err(|e| FundclassError::Input(e.to_string()))
}
