//! Elements `p^shift · Σ c_{r,i} X^r ω^i` with the grid `c` known modulo
//! `p^prec`, where `X` is `ρ` (tame) or `ζ` (cyclotomic).
//!
//! Grids are kept normalised: either all coefficients vanish, or at least one
//! is prime to `p`. The absolute precision is `shift + prec` digits.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::field::{Automorphism, Field};
use super::{PadicError, Result};

#[derive(Clone)]
pub struct FieldElement {
    field: Arc<Field>,
    shift: i64,
    prec: u32,
    coeffs: Vec<u128>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldElement({}, p^{} * {:?}, prec {})",
            self.field.id(),
            self.shift,
            self.coeffs,
            self.prec
        )
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.field.d();
        let rows: Vec<String> = self
            .coeffs
            .chunks(d)
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        if self.shift != 0 {
            write!(f, "p^{}*", self.shift)?;
        }
        write!(f, "[{}] +O(p^{})", rows.join(","), self.abs_prec())
    }
}

fn binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    // Lucas' theorem.
    let (mut n, mut k, mut r) = (n, k, 1u64);
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..b {
            c = c * (a - i) % p;
        }
        let mut den = 1u64;
        for i in 1..=b {
            den = den * i % p;
        }
        c = c * super::finite_field::pow_mod(den, p - 2, p) % p;
        r = r * c % p;
        n /= p;
        k /= p;
    }
    r
}

impl FieldElement {
    pub(crate) fn from_parts(
        field: &Arc<Field>,
        mut coeffs: Vec<u128>,
        shift: i64,
        prec: u32,
    ) -> Self {
        let prec = prec.min(field.prec());
        let m = field.ppow(prec);
        for c in coeffs.iter_mut() {
            *c %= m;
        }
        let mut x = FieldElement {
            field: field.clone(),
            shift,
            prec,
            coeffs,
        };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        let p = self.field.p() as u128;
        if self.coeffs.iter().all(|&c| c == 0) {
            return;
        }
        while self.coeffs.iter().all(|&c| c % p == 0) {
            for c in self.coeffs.iter_mut() {
                *c /= p;
            }
            self.shift += 1;
            self.prec -= 1;
        }
    }

    fn grid_len(field: &Field) -> usize {
        field.d() * field.ram_degree()
    }

    pub fn zero(field: &Arc<Field>) -> Self {
        FieldElement {
            field: field.clone(),
            shift: 0,
            prec: field.prec(),
            coeffs: vec![0; Self::grid_len(field)],
        }
    }

    pub fn one(field: &Arc<Field>) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Arc<Field>, x: i128) -> Self {
        let mut coeffs = vec![0; Self::grid_len(field)];
        coeffs[0] = field.ring().from_i128(x);
        Self::from_parts(field, coeffs, 0, field.prec())
    }

    /// An element of the unramified layer from `ω`-coordinates.
    pub fn from_unramified(field: &Arc<Field>, coords: &[u128]) -> Self {
        let mut coeffs = vec![0; Self::grid_len(field)];
        for (c, &x) in coeffs.iter_mut().zip(coords) {
            *c = x % field.modulus();
        }
        Self::from_parts(field, coeffs, 0, field.prec())
    }

    /// Builds an element from rows indexed by the ramified power.
    pub fn from_rows(
        field: &Arc<Field>,
        rows: &[Vec<u128>],
        shift: i64,
        prec: u32,
    ) -> Result<Self> {
        let (r, d) = (field.ram_degree(), field.d());
        if rows.len() != r || rows.iter().any(|row| row.len() != d) {
            return Err(PadicError::InvalidInput(format!(
                "expected a {r}x{d} coefficient grid"
            )));
        }
        Ok(Self::from_parts(field, rows.concat(), shift, prec))
    }

    pub fn omega_power(field: &Arc<Field>, k: u64) -> Self {
        Self::from_unramified(field, &field.omega_pow(k % (field.q() - 1).max(1)))
    }

    /// `ρ` (tame), `ζ` (cyclotomic) or `p` (no ramified layer).
    pub fn ramified_generator(field: &Arc<Field>) -> Self {
        if field.ram_degree() == 1 {
            return Self::from_int(field, field.p() as i128);
        }
        let mut coeffs = vec![0; Self::grid_len(field)];
        coeffs[field.d()] = 1;
        Self::from_parts(field, coeffs, 0, field.prec())
    }

    /// A uniformiser: `ρ`, `ζ - 1`, or `p`.
    pub fn uniformizer(field: &Arc<Field>) -> Self {
        let x = Self::ramified_generator(field);
        if field.is_cyclotomic() {
            x.sub(&Self::one(field)).expect("same field")
        } else {
            x
        }
    }

    /// `π = ρ^e` for the tame layer, `p` otherwise.
    pub fn base_uniformizer(field: &Arc<Field>) -> Self {
        let mut coeffs = vec![0; Self::grid_len(field)];
        coeffs[0] = if field.is_tame() {
            field.pi_value()
        } else {
            field.p() as u128
        };
        Self::from_parts(field, coeffs, 0, field.prec())
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Trusted digits of the coefficient grid.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// The element is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        self.shift + self.prec as i64
    }

    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    pub fn rows(&self) -> Vec<Vec<u128>> {
        self.coeffs
            .chunks(self.field.d())
            .map(|r| r.to_vec())
            .collect()
    }

    /// Lowers the absolute precision to at most `digits`.
    pub fn truncate(&self, digits: i64) -> Self {
        let prec = (digits - self.shift).clamp(0, self.prec as i64) as u32;
        Self::from_parts(&self.field, self.coeffs.clone(), self.shift, prec)
    }

    /// All coefficients vanish at the current precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.spec() == other.field.spec() {
            Ok(())
        } else {
            Err(PadicError::Mismatch(format!(
                "{} vs {}",
                self.field.id(),
                other.field.id()
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let s = self.shift.min(other.shift);
        let (da, db) = ((self.shift - s) as u64, (other.shift - s) as u64);
        let prec = (self.prec as u64 + da)
            .min(other.prec as u64 + db)
            .min(self.field.prec() as u64) as u32;
        let ring = self.field.ring();
        let scale = |k: u64| {
            if k >= prec as u64 {
                0
            } else {
                self.field.ppow(k as u32)
            }
        };
        let (fa, fb) = (scale(da), scale(db));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ring.add(ring.mul(a, fa), ring.mul(b, fb)))
            .collect();
        Ok(Self::from_parts(&self.field, coeffs, s, prec))
    }

    pub fn neg(&self) -> Self {
        let ring = self.field.ring();
        let coeffs = self.coeffs.iter().map(|&c| ring.neg(c)).collect();
        Self::from_parts(&self.field, coeffs, self.shift, self.prec)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.field.mul_grid(&self.coeffs, &other.coeffs);
        Ok(Self::from_parts(
            &self.field,
            coeffs,
            self.shift + other.shift,
            self.prec.min(other.prec),
        ))
    }

    pub fn mul_int(&self, k: i128) -> Self {
        self.mul(&Self::from_int(&self.field, k))
            .expect("same field")
    }

    /// The grid reduced mod `p` in the basis `λ^i ω^k`, `λ = X - 1` for the
    /// cyclotomic layer and `λ = X` otherwise.
    fn lambda_rows_mod_p(&self) -> Vec<Vec<u64>> {
        let p = self.field.p();
        let d = self.field.d();
        let rows: Vec<Vec<u64>> = self
            .coeffs
            .chunks(d)
            .map(|r| r.iter().map(|&c| (c % p as u128) as u64).collect())
            .collect();
        if !self.field.is_cyclotomic() {
            return rows;
        }
        let r = rows.len();
        (0..r)
            .map(|i| {
                let mut out = vec![0u64; d];
                for (k, row) in rows.iter().enumerate().skip(i) {
                    let c = binomial_mod(k as u64, i as u64, p);
                    if c == 0 {
                        continue;
                    }
                    for t in 0..d {
                        out[t] = (out[t] + c * row[t]) % p;
                    }
                }
                out
            })
            .collect()
    }

    /// Valuation of the grid in uniformiser units, `0 <= j < e_abs`.
    fn grid_valuation(&self) -> u64 {
        self.lambda_rows_mod_p()
            .iter()
            .position(|row| row.iter().any(|&c| c != 0))
            .expect("normalised grid") as u64
    }

    /// Valuation in units of a uniformiser of this field.
    pub fn valuation_units(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(PadicError::Precision(
                "valuation undetermined at current precision".into(),
            ));
        }
        Ok(self.shift * self.field.abs_ramification() as i64 + self.grid_valuation() as i64)
    }

    /// Valuation normalised by `v(p) = 1`, as a reduced fraction.
    pub fn valuation(&self) -> Result<(i64, u64)> {
        let v = self.valuation_units()?;
        let e = self.field.abs_ramification();
        let g = crate::groups::gcd_u64(v.unsigned_abs(), e).max(1);
        Ok((v / g as i64, e / g))
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.valuation_units(), Ok(0))
    }

    /// Image in the residue field, in `ω̄`-coordinates.
    pub fn residue(&self) -> Result<Vec<u64>> {
        let d = self.field.d();
        if self.is_zero() {
            if self.abs_prec() >= 1 {
                return Ok(vec![0; d]);
            }
            return Err(PadicError::Precision(
                "residue undetermined at current precision".into(),
            ));
        }
        match self.valuation_units()? {
            0 => Ok(self.lambda_rows_mod_p().swap_remove(0)),
            v if v > 0 => Ok(vec![0; d]),
            _ => Err(PadicError::InvalidInput(
                "residue of a non-integral element".into(),
            )),
        }
    }

    fn unit_grid_inverse(&self) -> Result<Self> {
        let field = &self.field;
        let res = field.residue_field();
        let rbar = self.residue()?;
        let inv = res
            .inverse(&rbar)
            .ok_or_else(|| PadicError::Internal("unit with zero residue".into()))?;
        let lift: Vec<u128> = inv.iter().map(|&c| c as u128).collect();
        let mut y = Self::from_unramified(field, &lift).truncate(self.prec as i64);
        let one = Self::one(field);
        let bound = 2
            + (64 - ((field.abs_ramification() * (self.prec as u64 + 1)).leading_zeros())) as usize;
        for _ in 0..=bound {
            let err = one.sub(&self.mul(&y)?)?.truncate(self.prec as i64);
            if err.is_zero() {
                return Ok(y);
            }
            y = y.add(&y.mul(&err)?)?.truncate(self.prec as i64);
        }
        Err(PadicError::NoConvergence("Newton inverse".into()))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(PadicError::Precision(
                "division by an element indistinguishable from zero".into(),
            ));
        }
        let j = self.grid_valuation();
        let grid = Self::from_parts(&self.field, self.coeffs.clone(), 0, self.prec);
        let inv = if j == 0 {
            grid.unit_grid_inverse()?
        } else {
            let e = self.field.abs_ramification();
            let lift = Self::uniformizer(&self.field).pow_nonneg(e - j)?;
            let scaled = grid.mul(&lift)?;
            // valuation e: the grid is p times a unit
            if scaled.shift < 1 {
                return Err(PadicError::Internal(
                    "uniformiser scaling left a non-multiple of p".into(),
                ));
            }
            if scaled.prec == 0 {
                return Err(PadicError::Precision("too few digits to invert".into()));
            }
            let unit = Self::from_parts(&self.field, scaled.coeffs.clone(), 0, scaled.prec);
            let mut r = unit.unit_grid_inverse()?.mul(&lift)?;
            r.shift -= scaled.shift;
            r
        };
        let mut out = inv;
        out.shift -= self.shift;
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.mul(&other.inverse()?)
    }

    fn pow_nonneg(&self, mut k: u64) -> Result<Self> {
        let mut r = Self::one(&self.field);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(r)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            self.pow_nonneg(k as u64)
        } else {
            self.inverse()?.pow_nonneg(k.unsigned_abs())
        }
    }

    pub fn apply(&self, s: &Automorphism) -> Self {
        let coeffs = self.field.apply_grid(s, &self.coeffs);
        Self::from_parts(&self.field, coeffs, self.shift, self.prec)
    }

    /// Coefficientwise congruence modulo `p^digits`.
    pub fn congruent(&self, other: &Self, digits: i64) -> Result<bool> {
        let diff = self.sub(other)?;
        if diff.abs_prec() < digits {
            return Err(PadicError::Precision(format!(
                "comparison mod p^{digits} needs more digits than the {} available",
                diff.abs_prec()
            )));
        }
        Ok(diff.is_zero() || diff.shift >= digits)
    }

    /// Congruence at the smaller of the two absolute precisions.
    pub fn agrees(&self, other: &Self) -> bool {
        let digits = self.abs_prec().min(other.abs_prec());
        self.congruent(other, digits).unwrap_or(false)
    }

    /// `(v, u)` with value `p^v · u` when the element lies in `Q_p` (`u` prime to `p`).
    pub fn as_rational(&self) -> Option<(i64, u128)> {
        if self.is_zero() || self.coeffs[1..].iter().any(|&c| c != 0) {
            return None;
        }
        Some((self.shift, self.coeffs[0]))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .coeffs
            .chunks(self.field.d())
            .map(|r| Value::Array(r.iter().map(|c| Value::String(c.to_string())).collect()))
            .collect();
        let mut m = Map::new();
        m.insert("field".into(), json!(self.field.id()));
        m.insert("prec".into(), json!(self.prec.to_string()));
        m.insert("coeffs".into(), Value::Array(rows));
        if self.shift != 0 {
            m.insert("shift".into(), json!(self.shift.to_string()));
        }
        Value::Object(m)
    }

    pub fn from_json(field: &Arc<Field>, v: &Value) -> Result<Self> {
        let bad = |m: &str| PadicError::InvalidInput(format!("element JSON: {m}"));
        let id = v
            .get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing field"))?;
        if id != field.id() {
            return Err(PadicError::Mismatch(format!("{id} vs {}", field.id())));
        }
        let num = |x: &Value| -> Option<String> {
            x.as_str()
                .map(str::to_string)
                .or_else(|| x.as_i64().map(|n| n.to_string()))
        };
        let prec: u32 = v
            .get("prec")
            .and_then(num)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("prec"))?;
        let shift: i64 = match v.get("shift") {
            None => 0,
            Some(x) => num(x)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("shift"))?,
        };
        let rows = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("coeffs"))?;
        let mut grid = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| bad("coefficient row"))?;
            let mut out = Vec::new();
            for c in row {
                let c: u128 = num(c)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("coefficient"))?;
                if prec > field.prec() || c >= field.ppow(prec) {
                    return Err(bad("coefficient out of range"));
                }
                out.push(c);
            }
            grid.push(out);
        }
        let x = Self::from_rows(field, &grid, shift, prec)?;
        if x.shift != shift || x.prec != prec {
            return Err(bad("grid is not normalised"));
        }
        Ok(x)
    }
}

/// `∏ s(x)` over the listed automorphisms.
pub fn norm(x: &FieldElement, autos: &[Automorphism]) -> Result<FieldElement> {
    autos
        .iter()
        .try_fold(FieldElement::one(x.field()), |acc, s| acc.mul(&x.apply(s)))
}

/// `Σ s(x)` over the listed automorphisms.
pub fn trace(x: &FieldElement, autos: &[Automorphism]) -> Result<FieldElement> {
    autos
        .iter()
        .try_fold(FieldElement::zero(x.field()), |acc, s| acc.add(&x.apply(s)))
}

/// `s^{(n)}(x) = x · s(x) ⋯ s^{n-1}(x)`.
pub fn partial_norm(x: &FieldElement, s: &Automorphism, n: u64) -> Result<FieldElement> {
    let mut acc = FieldElement::one(x.field());
    let mut cur = x.clone();
    for k in 0..n {
        acc = acc.mul(&cur)?;
        if k + 1 < n {
            cur = cur.apply(s);
        }
    }
    Ok(acc)
}
