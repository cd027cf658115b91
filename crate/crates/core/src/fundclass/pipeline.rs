//! `γ → b, c′ → η → (α, β)` for the tower `K ⊂ L ⊂ LM`.

use crate::groups::GroupElement;
use crate::padic_fields::{
    norm, partial_norm, solve_h90, solve_unit_norm, subfield_root_of_unity, FieldElement,
    PadicError,
};

use super::tower::Tower;
use super::tuple::EncodingTuple;
use super::{ExtensionSpec, Family, FundclassError, Result};

pub const GUARD_ENV: &str = "FUNDCLASS_GUARD_DIGITS";
const DEFAULT_GUARD: u32 = 8;
const GUARD_RETRIES: u32 = 3;

/// Guard digits from `FUNDCLASS_GUARD_DIGITS`, default 8.
pub fn guard_digits() -> u32 {
    std::env::var(GUARD_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_GUARD)
}

/// Runs `f(working)` with `working = precision + guard`, doubling the guard on precision errors.
pub fn with_guard_retry<T>(spec: &ExtensionSpec, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let guard = guard_digits();
    let mut attempt = 0;
    loop {
        match f(spec.precision + (guard << attempt)) {
            Err(e) if e.is_precision() && attempt < GUARD_RETRIES => attempt += 1,
            r => return r,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FundamentalData {
    pub gamma: FieldElement,
    /// One per generator of `Gal(L/K)`, aligned with `Tower::indices`.
    pub eta: Vec<FieldElement>,
    /// `b_g` by enumeration index of `Gal(LM/K)`.
    pub b: Vec<FieldElement>,
}

fn digits(tower: &Tower) -> i64 {
    tower.precision() as i64
}

/// `γ ∈ LM` with `N_{LM/L}(γ) = π`.
pub fn compute_gamma(tower: &Tower) -> Result<FieldElement> {
    if tower.h_order == 1 {
        return Ok(tower.pi.clone());
    }
    let hn = norm(&tower.varpi, &tower.h_autos())?;
    let u = tower.pi.div(&hn)?;
    let eta = solve_unit_norm(&tower.field, &tower.h_gen, tower.h_order, &u)?;
    let gamma = tower.varpi.mul(&eta)?;
    if !norm(&gamma, &tower.h_autos())?.congruent(&tower.pi, digits(tower))? {
        return Err(FundclassError::Pipeline("N_{LM/L}(gamma) != pi".into()));
    }
    Ok(gamma)
}

fn sigma0_pow(tower: &Tower, k: i64) -> crate::padic_fields::Automorphism {
    tower
        .field
        .auto_pow(&tower.sigma[0], k.rem_euclid(tower.n as i64) as u64)
}

/// `b_g = g(∏_{i=1}^{⌊a/f⌋} σ_0^{-fi}(γ))` for `g = σ_0^a τ`.
pub fn compute_b(tower: &Tower, gamma: &FieldElement, g: &GroupElement) -> Result<FieldElement> {
    let a = g.0[0];
    let mut acc = FieldElement::one(&tower.field);
    for i in 1..=(a / tower.f) as i64 {
        acc = acc.mul(&gamma.apply(&sigma0_pow(tower, -(tower.f as i64) * i)))?;
    }
    Ok(acc.apply(&tower.auto_of(g)))
}

/// `c′(g, g′) = π^{⌊(a+a′)/n⌋} · b_{gg′} / (g(b_{g′}) · b_g)`.
pub fn compute_c_prime(
    tower: &Tower,
    gamma: &FieldElement,
    g: &GroupElement,
    h: &GroupElement,
) -> Result<FieldElement> {
    let gh = tower.galois.compose(g, h);
    let wraps = (g.0[0] + h.0[0]) / tower.n;
    let num = tower
        .pi
        .pow(wraps as i64)?
        .mul(&compute_b(tower, gamma, &gh)?)?;
    let den = compute_b(tower, gamma, h)?
        .apply(&tower.auto_of(g))
        .mul(&compute_b(tower, gamma, g)?)?;
    Ok(num.div(&den)?)
}

/// `η_i` with `σ_0^f(η_i)/η_i = σ_i(γ)/γ`, one per generator of `Gal(L/K)`.
pub fn compute_etas(tower: &Tower, gamma: &FieldElement) -> Result<Vec<FieldElement>> {
    let mut out = Vec::new();
    for &i in &tower.indices {
        let t = gamma.apply(&tower.sigma[i]).div(gamma)?;
        let eta =
            solve_h90(&tower.field, &tower.h_gen, tower.h_order, &t).map_err(|e| match e {
                PadicError::Obstruction(m) => {
                    FundclassError::Pipeline(format!("gamma contract broken at sigma_{i}: {m}"))
                }
                e => e.into(),
            })?;
        if !eta
            .apply(&tower.h_gen)
            .div(&eta)?
            .congruent(&t, digits(tower))?
        {
            return Err(FundclassError::Pipeline(format!(
                "Hilbert 90 equation for eta_{i} fails"
            )));
        }
        out.push(eta);
    }
    Ok(out)
}

fn tuple_from_etas(
    tower: &Tower,
    gamma: &FieldElement,
    eta: &[FieldElement],
) -> Result<EncodingTuple> {
    let orders = tower.quotient.orders().to_vec();
    let mut alpha = Vec::new();
    for (k, &i) in tower.indices.iter().enumerate() {
        let s = tower.sigma[i];
        alpha.push(if i == 0 {
            gamma.div(&partial_norm(&eta[k], &s, tower.f)?)?
        } else {
            partial_norm(&eta[k], &s, orders[k])?.inverse()?
        });
    }
    let mut beta = Vec::new();
    for (a, &i) in tower.indices.iter().enumerate() {
        let mut row = Vec::new();
        for (b, &j) in tower.indices.iter().enumerate() {
            let left = eta[a].apply(&tower.sigma[j]).div(&eta[a])?;
            let right = eta[b].div(&eta[b].apply(&tower.sigma[i]))?;
            row.push(left.mul(&right)?);
        }
        beta.push(row);
    }
    Ok(EncodingTuple {
        indices: tower.indices.clone(),
        orders,
        alpha,
        beta,
    })
}

/// The general route at working precision `working`.
pub fn fundamental_tuple_at(
    spec: &ExtensionSpec,
    working: u32,
) -> Result<(Tower, FundamentalData, EncodingTuple)> {
    let tower = Tower::new(spec, working)?;
    let gamma = compute_gamma(&tower)?;
    let eta = compute_etas(&tower, &gamma)?;
    let b = (0..tower.galois.order() as usize)
        .map(|i| compute_b(&tower, &gamma, &tower.galois.element_at(i)))
        .collect::<Result<Vec<_>>>()?;
    let t = tuple_from_etas(&tower, &gamma, &eta)?;
    t.check_laws(&tower)?;
    Ok((tower, FundamentalData { gamma, eta, b }, t))
}

/// The general route, with the guard-digit retry policy.
pub fn fundamental_tuple(spec: &ExtensionSpec) -> Result<(Tower, FundamentalData, EncodingTuple)> {
    with_guard_retry(spec, |w| fundamental_tuple_at(spec, w))
}

/// Closed form for tame `L = K_f(ρ)`, `ρ^e = π`:
/// `α = (ρ, ζ^{-1})`, `β_01 = ζ^{-(p-1)/e}`, `β_10 = ζ^{(p-1)/e}` with `ζ` of order `p^f - 1`.
pub fn tame_tuple(spec: &ExtensionSpec) -> Result<(Tower, EncodingTuple)> {
    let Family::TameAbelian { e, f } = spec.canonical().family else {
        return Err(FundclassError::Input(
            "tame_tuple needs a tame family with e > 1".into(),
        ));
    };
    with_guard_retry(spec, |w| {
        let tower = Tower::new(spec, w)?;
        let p = spec.p;
        let zeta = subfield_root_of_unity(&tower.field, f as usize, p.pow(f as u32) - 1)?;
        let zinv = zeta.inverse()?;
        let one = FieldElement::one(&tower.field);
        let t = if f == 1 {
            EncodingTuple {
                indices: vec![1],
                orders: vec![e],
                alpha: vec![zinv],
                beta: vec![vec![one]],
            }
        } else {
            let k = ((p - 1) / e) as i64;
            EncodingTuple {
                indices: vec![0, 1],
                orders: vec![f, e],
                alpha: vec![FieldElement::ramified_generator(&tower.field), zinv],
                beta: vec![vec![one.clone(), zeta.pow(-k)?], vec![zeta.pow(k)?, one]],
            }
        };
        t.check_laws(&tower)?;
        Ok((tower, t))
    })
}
