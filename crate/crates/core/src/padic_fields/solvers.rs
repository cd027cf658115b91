use std::sync::Arc;

use crate::linalg::ext_gcd;

use super::element::{partial_norm, trace, FieldElement};
use super::field::{Automorphism, Field};
use super::{PadicError, Result};

/// `ω(a)`: the fixed point of `y ↦ y^q` above the residue `a`.
pub fn teichmuller(field: &Arc<Field>, a: &[u64]) -> Result<FieldElement> {
    if a.len() != field.d() || a.iter().all(|&c| c % field.p() == 0) {
        return Err(PadicError::InvalidInput(
            "Teichmüller lift of zero or of a malformed residue".into(),
        ));
    }
    let lift: Vec<u128> = a.iter().map(|&c| (c % field.p()) as u128).collect();
    let mut y = FieldElement::from_unramified(field, &lift);
    // Each step gains one digit.
    for _ in 0..field.prec() + 2 {
        let next = y.pow(field.q() as i64)?;
        if next.coeffs() == y.coeffs() && next.shift() == y.shift() {
            return Ok(y);
        }
        y = next;
    }
    Err(PadicError::NoConvergence("Teichmüller iteration".into()))
}

/// `ω^{(q-1)/m}`, a primitive `m`-th root of unity.
pub fn primitive_root_of_unity(field: &Arc<Field>, m: u64) -> Result<FieldElement> {
    let q1 = field.q() - 1;
    if m == 0 || !q1.is_multiple_of(m) {
        return Err(PadicError::InvalidInput(format!(
            "{m} does not divide q - 1 = {q1}"
        )));
    }
    Ok(FieldElement::omega_power(field, q1 / m))
}

/// A primitive `m`-th root of unity drawn from the canonical `(p^r - 1)`-th root
/// of the degree-`r` unramified subfield.
pub fn subfield_root_of_unity(field: &Arc<Field>, r: usize, m: u64) -> Result<FieldElement> {
    if r == 0 || !field.d().is_multiple_of(r) {
        return Err(PadicError::InvalidInput(format!(
            "{r} does not divide d = {}",
            field.d()
        )));
    }
    let mr = field.p().pow(r as u32) - 1;
    if m == 0 || !mr.is_multiple_of(m) {
        return Err(PadicError::InvalidInput(format!(
            "{m} does not divide {mr}"
        )));
    }
    let exp = field.subfield_root_exponent(r) as u128 * (mr / m) as u128 % (field.q() - 1) as u128;
    Ok(FieldElement::omega_power(field, exp as u64))
}

fn horner(poly: &[FieldElement], x: &FieldElement) -> Result<FieldElement> {
    poly.iter()
        .rev()
        .try_fold(FieldElement::zero(x.field()), |acc, c| acc.mul(x)?.add(c))
}

/// Newton's method from `a`, requiring `v(f(a)) > 2 v(f'(a))`.
pub fn hensel_root(poly: &[FieldElement], a: &FieldElement) -> Result<FieldElement> {
    let deriv: Vec<FieldElement> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul_int(k as i128))
        .collect();
    let fa = horner(poly, a)?;
    if fa.is_zero() {
        return Ok(a.clone());
    }
    let dfa = horner(&deriv, a)?;
    if dfa.is_zero() || fa.valuation_units()? <= 2 * dfa.valuation_units()? {
        return Err(PadicError::NoConvergence(
            "Hensel condition v(f(a)) > 2 v(f'(a)) fails".into(),
        ));
    }
    let mut x = a.clone();
    let bound = 8 + 2
        * (64 - (a.field().abs_ramification() * a.field().prec() as u64).leading_zeros()) as usize;
    for _ in 0..bound {
        let fx = horner(poly, &x)?;
        if fx.is_zero() {
            return Ok(x);
        }
        x = x.sub(&fx.div(&horner(&deriv, &x)?)?)?;
    }
    Err(PadicError::NoConvergence(
        "Newton iteration did not settle".into(),
    ))
}

fn powers(field: &Field, s: &Automorphism, h: u64) -> Vec<Automorphism> {
    (0..h).map(|k| field.auto_pow(s, k)).collect()
}

/// `η` with `∏_{k<h} s^k(η) = u`, for `s` a power of Frobenius of order `h`.
///
/// The residue equation is solved by discrete logarithm; the lift uses the
/// Newton step `η ← η·(1 + c·(u/N(η) - 1))` with `Tr(c) = 1`.
pub fn solve_unit_norm(
    field: &Arc<Field>,
    s: &Automorphism,
    h: u64,
    u: &FieldElement,
) -> Result<FieldElement> {
    if s.ram != field.identity_automorphism().ram {
        return Err(PadicError::InvalidInput(
            "norm equation needs an unramified automorphism".into(),
        ));
    }
    if !u.is_unit() {
        return Err(PadicError::InvalidInput(
            "right-hand side must be a unit".into(),
        ));
    }
    if !u.apply(s).agrees(u) {
        return Err(PadicError::InvalidInput(
            "right-hand side is not fixed by the automorphism".into(),
        ));
    }
    let one = FieldElement::one(field);
    if u.congruent(&one, u.abs_prec())? {
        return Ok(one);
    }
    let autos = powers(field, s, h);
    let q1 = (field.q() - 1) as i128;
    let res = field.residue_field();
    let tu = field
        .dlog_table()
        .log(res, &u.residue()?)
        .ok_or_else(|| PadicError::Internal("residue discrete logarithm".into()))?
        as i128;
    let p = field.p() as i128;
    let d = field.d() as u64;
    let sum = (0..h).fold(0i128, |acc, k| {
        let e = (s.frob * k) % d;
        (acc + (0..e).fold(1i128, |x, _| x * p % q1)) % q1
    });
    let (g, x, _) = ext_gcd(sum, q1);
    if tu % g != 0 {
        return Err(PadicError::Internal("residue is not a norm".into()));
    }
    let t = ((tu / g) * x).rem_euclid(q1 / g);
    let mut eta = FieldElement::omega_power(field, t as u64);

    let c = (0..field.q() - 1)
        .map(|j| FieldElement::omega_power(field, j))
        .find_map(|w| {
            let tr = trace(&w, &autos).ok()?;
            tr.is_unit().then(|| w.div(&tr).ok()).flatten()
        })
        .ok_or_else(|| PadicError::Internal("no trace-one element".into()))?;
    let bound =
        4 + 2 * (64 - (field.abs_ramification() * field.prec() as u64).leading_zeros()) as usize;
    for _ in 0..bound {
        let eps = u.div(&partial_norm(&eta, s, h)?)?.sub(&one)?;
        if eps.is_zero() {
            return Ok(eta);
        }
        eta = eta.mul(&one.add(&c.mul(&eps)?)?)?;
    }
    Err(PadicError::NoConvergence("norm equation lift".into()))
}

/// `η` with `s(η)/η = t`, via the Poincaré series `b = Σ t_k s^k(c)` and `η = b^{-1}`.
pub fn solve_h90(
    field: &Arc<Field>,
    s: &Automorphism,
    h: u64,
    t: &FieldElement,
) -> Result<FieldElement> {
    if !t.is_unit() {
        return Err(PadicError::InvalidInput(
            "Hilbert 90 input must be a unit".into(),
        ));
    }
    let one = FieldElement::one(field);
    if !partial_norm(t, s, h)?.agrees(&one) {
        return Err(PadicError::Obstruction("norm of t is not 1".into()));
    }
    if t.agrees(&one) {
        return Ok(one);
    }
    for j in 0..field.q() - 1 {
        let c = FieldElement::omega_power(field, j);
        let mut b = FieldElement::zero(field);
        let mut tk = one.clone();
        let mut sc = c;
        for _ in 0..h {
            b = b.add(&tk.mul(&sc)?)?;
            tk = t.mul(&tk.apply(s))?;
            sc = sc.apply(s);
        }
        if b.is_unit() {
            return b.inverse();
        }
    }
    Err(PadicError::Internal(
        "every Poincaré series candidate was a non-unit".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_fields::element::norm;
    use crate::padic_fields::field::FieldSpec;

    #[test]
    fn teichmuller_examples() {
        let q5 = Field::new(FieldSpec::unramified(5, 1, 32)).unwrap();
        assert!(teichmuller(&q5, &[1])
            .unwrap()
            .agrees(&FieldElement::one(&q5)));
        let t2 = teichmuller(&q5, &[2]).unwrap();
        assert!(t2.pow(2).unwrap().agrees(&teichmuller(&q5, &[4]).unwrap()));
        assert!(teichmuller(&q5, &[0]).is_err());
        // the canonical root of unity of Q_5 is ω(2)
        assert!(primitive_root_of_unity(&q5, 4).unwrap().agrees(&t2));

        let q7 = Field::new(FieldSpec::unramified(7, 1, 20)).unwrap();
        let t3 = teichmuller(&q7, &[3]).unwrap();
        let one = FieldElement::one(&q7);
        let orders: Vec<bool> = (1..=6).map(|k| t3.pow(k).unwrap().agrees(&one)).collect();
        assert_eq!(orders, vec![false, false, false, false, false, true]);
    }

    #[test]
    fn subfield_roots_are_compatible() {
        let f = Field::new(FieldSpec::unramified(5, 4, 16)).unwrap();
        let z = subfield_root_of_unity(&f, 1, 4).unwrap();
        let t2 = teichmuller(&f, &[2, 0, 0, 0]).unwrap();
        assert!(z.agrees(&t2));
        let z24 = subfield_root_of_unity(&f, 2, 24).unwrap();
        let frob2 = f.automorphism(2, 0).unwrap();
        assert!(z24.apply(&frob2).agrees(&z24));
        assert!(!z24.pow(12).unwrap().agrees(&FieldElement::one(&f)));
    }

    #[test]
    fn hensel_examples() {
        let q5 = Field::new(FieldSpec::unramified(5, 1, 32)).unwrap();
        let c = |k: i128| FieldElement::from_int(&q5, k);
        let r = hensel_root(&[c(-4), c(0), c(1)], &c(2)).unwrap();
        assert!(r.agrees(&c(2)));
        let r = hensel_root(&[c(-1), c(0), c(0), c(0), c(1)], &c(2)).unwrap();
        assert!(r.agrees(&teichmuller(&q5, &[2]).unwrap()));

        let q3 = Field::new(FieldSpec::unramified(3, 1, 20)).unwrap();
        let c3 = |k: i128| FieldElement::from_int(&q3, k);
        // Φ_9 = x^6 + x^3 + 1 seeded at 1: v(f(1)) = 1, v(f'(1)) = 1
        let phi9: Vec<_> = [1, 0, 0, 1, 0, 0, 1].iter().map(|&k| c3(k)).collect();
        assert!(matches!(
            hensel_root(&phi9, &c3(1)),
            Err(PadicError::NoConvergence(_))
        ));
    }

    #[test]
    fn unit_norm_in_q25() {
        let f = Field::new(FieldSpec::unramified(5, 2, 32)).unwrap();
        let s = f.frobenius();
        let u = FieldElement::from_int(&f, 2);
        let eta = solve_unit_norm(&f, &s, 2, &u).unwrap();
        let autos = [f.identity_automorphism(), s];
        assert!(norm(&eta, &autos).unwrap().congruent(&u, 32).unwrap());
        let one = FieldElement::one(&f);
        assert!(
            partial_norm(&solve_unit_norm(&f, &s, 2, &one).unwrap(), &s, 2)
                .unwrap()
                .congruent(&one, 32)
                .unwrap()
        );
        assert!(solve_unit_norm(&f, &s, 2, &FieldElement::from_int(&f, 5)).is_err());
    }

    #[test]
    fn hilbert_90() {
        let f = Field::new(FieldSpec::unramified(5, 2, 32)).unwrap();
        let s = f.frobenius();
        let one = FieldElement::one(&f);
        assert!(solve_h90(&f, &s, 2, &one).unwrap().agrees(&one));
        let w = FieldElement::omega_power(&f, 7)
            .add(&FieldElement::from_int(&f, 5))
            .unwrap();
        let t = w.apply(&s).div(&w).unwrap();
        let eta = solve_h90(&f, &s, 2, &t).unwrap();
        assert!(eta.apply(&s).div(&eta).unwrap().congruent(&t, 30).unwrap());
        let t2 = teichmuller(&f, &[2, 0]).unwrap();
        assert!(matches!(
            solve_h90(&f, &s, 2, &t2),
            Err(PadicError::Obstruction(_))
        ));
    }
}
