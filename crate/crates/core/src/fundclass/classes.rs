//! Norm groups `N(L^×) ⊂ K^× = Q_p^×`, the reciprocity map read off a tuple,
//! and class fingerprints.
//!
//! `Q_p^×` is coordinatised as `(v, t, l)`: `v` the valuation, `t` the discrete
//! logarithm of the residue to the least primitive root mod `p`, and `l` the
//! exponent of `1 + p` in the principal unit modulo `p^k`.

use serde_json::{json, Value};

use crate::groups::GroupElement;
use crate::linalg::ext_gcd;
use crate::padic_fields::FieldElement;

use super::tower::{least_primitive_root, Tower};
use super::tuple::{cocycle_from_tuple, EncodingTuple};
use super::{Family, FundclassError, Result};

pub type ClassVector = [i128; 3];

/// `N(L^×)` as a full-rank lattice in coordinates, in Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormGroup {
    pub p: u64,
    /// Principal units are read modulo `p^level`.
    pub level: u32,
    /// Upper triangular, positive pivots, entries above a pivot reduced into `[0, pivot)`.
    pub hnf: [ClassVector; 3],
}

fn hnf(mut rows: Vec<ClassVector>) -> Result<[ClassVector; 3]> {
    let mut out = [[0i128; 3]; 3];
    for col in 0..3 {
        loop {
            rows.retain(|r| r.iter().any(|&x| x != 0));
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            for &i in &nz {
                if i != piv {
                    let q = rows[i][col].div_euclid(rows[piv][col]);
                    let pr = rows[piv];
                    for (x, y) in rows[i].iter_mut().zip(pr) {
                        *x -= q * y;
                    }
                }
            }
        }
        let Some(i) = rows.iter().position(|r| r[col] != 0) else {
            return Err(FundclassError::Internal(
                "norm lattice is not of full rank".into(),
            ));
        };
        let mut r = rows.swap_remove(i);
        if r[col] < 0 {
            r.iter_mut().for_each(|x| *x = -*x);
        }
        out[col] = r;
    }
    for col in 0..3 {
        for above in 0..col {
            let q = out[above][col].div_euclid(out[col][col]);
            let pr = out[col];
            for (x, y) in out[above].iter_mut().zip(pr) {
                *x -= q * y;
            }
        }
    }
    Ok(out)
}

impl NormGroup {
    pub fn new(p: u64, level: u32, generators: &[ClassVector]) -> Result<Self> {
        let mut rows = generators.to_vec();
        rows.push([0, p as i128 - 1, 0]);
        rows.push([0, 0, (p as i128).pow(level - 1)]);
        Ok(NormGroup {
            p,
            level,
            hnf: hnf(rows)?,
        })
    }

    /// `[K^× : N(L^×)]`.
    pub fn index(&self) -> u64 {
        (0..3).map(|i| self.hnf[i][i] as u64).product()
    }

    /// Canonical representative of `v + N(L^×)`; zero iff `v` is a norm.
    pub fn reduce(&self, mut v: ClassVector) -> ClassVector {
        for (col, row) in self.hnf.iter().enumerate() {
            let q = v[col].div_euclid(row[col]);
            for (x, y) in v.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        v
    }

    pub fn class_order(&self, v: ClassVector) -> u64 {
        let mut k = 1u64;
        while self.reduce(v.map(|x| x * k as i128)) != [0; 3] {
            k += 1;
        }
        k
    }

    /// Coordinates of `a ∈ Q_p^×`.
    pub fn coordinates(&self, a: &FieldElement) -> Result<ClassVector> {
        let (v, u) = a
            .as_rational()
            .ok_or_else(|| FundclassError::Pipeline("element does not lie in Q_p".into()))?;
        if a.prec() < self.level {
            return Err(crate::padic_fields::PadicError::Precision(
                "too few digits for a norm-group class".into(),
            )
            .into());
        }
        let p = self.p as u128;
        let g = least_primitive_root(self.p, self.p) as u128;
        let r = u % p;
        let t = (0..p - 1)
            .find(|&k| pow_mod(g, k, p) == r)
            .ok_or_else(|| FundclassError::Internal("residue discrete logarithm".into()))?;
        let pk = p.pow(self.level);
        let uk = u % pk;
        // ω(u) ≡ u^{p^{k-1}} mod p^k
        let w = pow_mod(uk, p.pow(self.level - 1), pk);
        let (_, winv, _) = ext_gcd(w as i128, pk as i128);
        let one_unit = (uk as i128 * winv.rem_euclid(pk as i128)).rem_euclid(pk as i128) as u128;
        let l = (0..p.pow(self.level - 1))
            .find(|&j| pow_mod(1 + p, j, pk) == one_unit % pk)
            .ok_or_else(|| FundclassError::Internal("principal unit logarithm".into()))?;
        Ok([v as i128, t as i128, l as i128])
    }

    pub fn class_of(&self, a: &FieldElement) -> Result<ClassVector> {
        Ok(self.reduce(self.coordinates(a)?))
    }

    pub fn is_member(&self, a: &FieldElement) -> Result<bool> {
        Ok(self.class_of(a)? == [0; 3])
    }

    pub fn to_json(&self) -> Value {
        json!(self.hnf.iter().map(vec_json).collect::<Vec<_>>())
    }
}

fn vec_json(v: &ClassVector) -> Value {
    json!(v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn pow_mod(mut a: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % m;
        }
        a = a * a % m;
        e >>= 1;
    }
    r
}

/// The norm group of `L/K` for the supported families.
pub fn norm_group(tower: &Tower) -> Result<NormGroup> {
    let p = tower.spec.p;
    match tower.spec.canonical().family {
        Family::Unramified { n } => NormGroup::new(p, 1, &[[n as i128, 0, 0], [0, 1, 0]]),
        Family::TameAbelian { e, f } => {
            // N(ρ) = ((-1)^{e-1} ω(u) p)^f
            let sign_u = if e % 2 == 0 {
                p - tower.spec.twist
            } else {
                tower.spec.twist
            };
            let g = least_primitive_root(p, p) as u128;
            let t = (0..p - 1)
                .find(|&k| pow_mod(g, k as u128, p as u128) == sign_u as u128)
                .unwrap_or(0);
            NormGroup::new(p, 1, &[[0, e as i128, 0], [f as i128, (f * t) as i128, 0]])
        }
        Family::CyclotomicWild { nu } => NormGroup::new(p, nu, &[[1, 0, 0]]),
    }
}

/// `N_{L^{<σ_i>}/K}(α_i)` as the product over quotient elements with zero `i`-th coordinate.
pub fn row_norm(tower: &Tower, t: &EncodingTuple, k: usize) -> Result<FieldElement> {
    let mut acc = FieldElement::one(&tower.field);
    for idx in 0..tower.quotient.order() as usize {
        let q = tower.quotient.element_at(idx);
        if q.0[k] == 0 {
            acc = acc.mul(&t.alpha[k].apply(&tower.quotient_auto(&q)))?;
        }
    }
    Ok(acc.truncate(tower.precision() as i64))
}

#[derive(Debug, Clone)]
pub struct ArtinRow {
    /// `N(α_i)`, an element of `K`.
    pub element: FieldElement,
    pub class: ClassVector,
    /// `σ_i|_L`.
    pub image: GroupElement,
}

/// Rows `(N(α_i), σ_i|_L)`, after checking `∏_k c(σ_i^k, σ_i) = α_i` on the expanded cocycle.
pub fn artin_table(tower: &Tower, t: &EncodingTuple) -> Result<Vec<ArtinRow>> {
    let ng = norm_group(tower)?;
    let c = cocycle_from_tuple(t, tower)?;
    let digits = tower.precision() as i64;
    let mut rows = Vec::new();
    for k in 0..t.rank() {
        let s = tower.quotient.generator(k);
        let mut cup = FieldElement::one(&tower.field);
        for j in 0..t.orders[k] as i64 {
            cup = cup.mul(c.value(&tower.quotient.power(&s, j), &s))?;
        }
        if !cup.congruent(&t.alpha[k], digits)? {
            return Err(FundclassError::Pipeline(format!(
                "cup product at sigma_{} differs from alpha",
                t.indices[k]
            )));
        }
        let element = row_norm(tower, t, k)?;
        rows.push(ArtinRow {
            class: ng.class_of(&element)?,
            element,
            image: s,
        });
    }
    Ok(rows)
}

/// `θ(a)`: decomposes the class of `a` over the row classes.
pub fn artin_evaluate(tower: &Tower, rows: &[ArtinRow], a: &FieldElement) -> Result<GroupElement> {
    let ng = norm_group(tower)?;
    let target = ng.class_of(a)?;
    let q = &tower.quotient;
    for idx in 0..q.order() as usize {
        let g = q.element_at(idx);
        let mut v = [0i128; 3];
        for (row, &k) in rows.iter().zip(&g.0) {
            for (x, y) in v.iter_mut().zip(row.class) {
                *x += k as i128 * y;
            }
        }
        if ng.reduce(v) == target {
            return Ok(g);
        }
    }
    Err(FundclassError::Internal(
        "row classes do not generate K^x/N(L^x)".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtinNormalization {
    /// `θ(u)` acts as `ζ ↦ ζ^{u^{-1}}`.
    Inverse,
    /// `θ(u)` acts as `ζ ↦ ζ^u`.
    Direct,
    Ambiguous,
    Neither,
}

impl ArtinNormalization {
    pub fn name(self) -> &'static str {
        match self {
            ArtinNormalization::Inverse => "inverse",
            ArtinNormalization::Direct => "direct",
            ArtinNormalization::Ambiguous => "ambiguous",
            ArtinNormalization::Neither => "neither",
        }
    }
}

/// Compares `θ(u)` with `ζ ↦ ζ^{u^{±1}}` on every unit residue `u mod p^ν`.
pub fn artin_normalization(tower: &Tower, rows: &[ArtinRow]) -> Result<ArtinNormalization> {
    let Family::CyclotomicWild { nu } = tower.spec.family else {
        return Err(FundclassError::Input(
            "normalisation test needs a cyclotomic tower".into(),
        ));
    };
    let m = tower.field.pnu();
    let x = tower.sigma[1].ram;
    let (mut inverse, mut direct) = (true, true);
    for u in (1..m).filter(|u| u % tower.spec.p != 0) {
        let g = artin_evaluate(
            tower,
            rows,
            &FieldElement::from_int(&tower.field, u as i128),
        )?;
        let acts = pow_mod(x as u128, g.0[0] as u128, m as u128) as u64;
        let uinv = (1..m).find(|&w| w * u % m == 1).expect("unit mod p^nu");
        inverse &= acts == uinv;
        direct &= acts == u;
    }
    let _ = nu;
    Ok(match (inverse, direct) {
        (true, false) => ArtinNormalization::Inverse,
        (false, true) => ArtinNormalization::Direct,
        (true, true) => ArtinNormalization::Ambiguous,
        (false, false) => ArtinNormalization::Neither,
    })
}

/// Reduced fraction in `[0, 1)`.
pub type Invariant = (u64, u64);

fn reduce_fraction(num: i128, den: u64) -> Invariant {
    let n = num.rem_euclid(den as i128) as u64;
    let g = crate::groups::gcd_u64(n, den).max(1);
    (n / g, den / g)
}

/// `v(∏_k c(σ^k, σ)) / n mod 1` for a cocycle on a cyclic unramified extension.
pub fn invariant_cyclic_unramified(c: &super::tuple::LocalCocycle) -> Result<Invariant> {
    if c.group.rank() > 1 || c.field().ram_degree() != 1 || c.field().abs_ramification() != 1 {
        return Err(FundclassError::Input(
            "invariant needs a cyclic unramified extension".into(),
        ));
    }
    let n = c.order() as u64;
    if n == 1 {
        return Ok((0, 1));
    }
    let s = c.group.generator(0);
    let mut cup = FieldElement::one(c.field());
    for k in 0..n as i64 {
        cup = cup.mul(c.value(&c.group.power(&s, k), &s))?;
    }
    let (v, _) = cup.valuation()?;
    Ok(reduce_fraction(v as i128, n))
}

/// `v_{L^{<σ_0>}}(α_0) / f mod 1`, the invariant of the restriction to the unramified part.
pub fn restriction_invariant(tower: &Tower, t: &EncodingTuple) -> Result<Option<Invariant>> {
    let Some(k) = t.indices.iter().position(|&i| i == 0) else {
        return Ok(None);
    };
    let (num, den) = t.alpha[k].valuation()?;
    let scaled = tower.ramification() as i128 * num as i128;
    if scaled % den as i128 != 0 {
        return Err(FundclassError::Pipeline(
            "alpha_0 has fractional valuation in L^<sigma_0>".into(),
        ));
    }
    Ok(Some(reduce_fraction(scaled / den as i128, tower.f)))
}

/// Class data shared by cohomologous tuples: the norm lattice, row classes and restriction invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub lattice: [ClassVector; 3],
    pub classes: Vec<ClassVector>,
    pub orders: Vec<u64>,
    pub restriction: Option<Invariant>,
}

impl Fingerprint {
    pub fn to_json(&self) -> Value {
        json!({
            "lattice": self.lattice.iter().map(vec_json).collect::<Vec<_>>(),
            "classes": self.classes.iter().map(vec_json).collect::<Vec<_>>(),
            "orders": self.orders.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "restriction": self.restriction.map(|(a, b)| format!("{a}/{b}")),
        })
    }
}

pub fn tuple_fingerprint(tower: &Tower, t: &EncodingTuple) -> Result<Fingerprint> {
    let ng = norm_group(tower)?;
    let mut classes = Vec::new();
    for k in 0..t.rank() {
        classes.push(ng.class_of(&row_norm(tower, t, k)?)?);
    }
    Ok(Fingerprint {
        lattice: ng.hnf,
        orders: classes.iter().map(|&v| ng.class_order(v)).collect(),
        classes,
        restriction: restriction_invariant(tower, t)?,
    })
}
