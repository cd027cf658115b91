//! `F_{p^k} = F_p[x]/(g)` with coordinates in the basis `1, x, ..., x^{k-1}`.
//!
//! "Least" always refers to lexicographic order on the coordinate vector
//! `(c_0, c_1, ..., c_{k-1})` with `c_0` most significant.

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    k: usize,
    /// Monic modulus, low degree first, length `k + 1`.
    modpoly: Vec<u64>,
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * a as u128) % p as u128) as u64;
        }
        a = ((a as u128 * a as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo a nonzero `b` over `F_p`.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod_p(*b.last().expect("nonzero divisor"), p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (c as u128 * bi as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

impl GaloisField {
    pub fn new(p: u64, modpoly: Vec<u64>) -> Self {
        let k = modpoly.len() - 1;
        assert_eq!(modpoly[k], 1, "modulus must be monic");
        GaloisField { p, k, modpoly }
    }

    /// `F_p[x]/(g)` for the least monic irreducible `g` of degree `k`.
    pub fn canonical(p: u64, k: usize) -> Self {
        let count = p.pow(k as u32);
        for idx in 0..count {
            let mut g = index_to_coords(idx, p, k);
            g.push(1);
            if Self::is_irreducible(p, &g) {
                return GaloisField::new(p, g);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn is_irreducible(p: u64, g: &[u64]) -> bool {
        let k = g.len() - 1;
        if k == 1 {
            return true;
        }
        if g[0] == 0 {
            return false;
        }
        let f = GaloisField {
            p,
            k,
            modpoly: g.to_vec(),
        };
        let mut x = vec![0u64; k];
        x[1] = 1;
        let mut h = x.clone();
        for _ in 1..=k / 2 {
            h = f.pow(&h, p);
            let mut diff = h.clone();
            diff[1] = (diff[1] + p - 1) % p;
            let gg = poly_gcd(g, &diff, p);
            if gg.len() > 1 {
                return false;
            }
        }
        true
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn modulus_poly(&self) -> &[u64] {
        &self.modpoly
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.k]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1 % self.p;
        v
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter()
            .map(|&x| (x as u128 * c as u128 % self.p as u128) as u64)
            .collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (p, k) = (self.p as u128, self.k);
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        for t in (k..2 * k - 1).rev() {
            let c = prod[t];
            if c == 0 {
                continue;
            }
            for i in 0..k {
                prod[t - k + i] = (prod[t - k + i] + (p - c) * self.modpoly[i] as u128) % p;
            }
            prod[t] = 0;
        }
        prod[..k].iter().map(|&x| x as u64).collect()
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        r
    }

    pub fn inverse(&self, a: &[u64]) -> Option<Vec<u64>> {
        (!self.is_zero(a)).then(|| self.pow(a, self.size() - 2))
    }

    pub fn index(&self, a: &[u64]) -> u64 {
        a.iter().fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn from_index(&self, idx: u64) -> Vec<u64> {
        index_to_coords(idx, self.p, self.k)
    }

    pub fn has_full_order(&self, a: &[u64]) -> bool {
        if self.is_zero(a) {
            return false;
        }
        let n = self.size() - 1;
        prime_factors(n)
            .into_iter()
            .all(|l| self.pow(a, n / l) != self.one())
    }

    /// Least element of multiplicative order `p^k - 1`.
    pub fn canonical_generator(&self) -> Vec<u64> {
        (1..self.size())
            .map(|i| self.from_index(i))
            .find(|a| self.has_full_order(a))
            .expect("cyclic multiplicative group")
    }

    /// Minimal polynomial over `F_p`, monic, low degree first.
    pub fn min_poly(&self, a: &[u64]) -> Vec<u64> {
        let mut conj = vec![a.to_vec()];
        loop {
            let next = self.pow(conj.last().unwrap(), self.p);
            if next == conj[0] {
                break;
            }
            conj.push(next);
        }
        // prod (X - c) with coefficients in F_q, which end up in F_p
        let mut poly: Vec<Vec<u64>> = vec![self.one()];
        for c in &conj {
            let mut next = vec![self.zero(); poly.len() + 1];
            for (i, coef) in poly.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], coef);
                next[i] = self.sub(&next[i], &self.mul(coef, c));
            }
            poly = next;
        }
        poly.iter()
            .map(|c| {
                debug_assert!(
                    c[1..].iter().all(|&x| x == 0),
                    "min poly coefficient outside F_p"
                );
                c[0]
            })
            .collect()
    }

    /// Evaluates a polynomial with `F_p` coefficients at `a`.
    pub fn eval_fp_poly(&self, coeffs: &[u64], a: &[u64]) -> Vec<u64> {
        coeffs.iter().rev().fold(self.zero(), |acc, &c| {
            let mut v = self.mul(&acc, a);
            v[0] = (v[0] + c) % self.p;
            v
        })
    }
}

fn index_to_coords(mut idx: u64, p: u64, k: usize) -> Vec<u64> {
    let mut v = vec![0u64; k];
    for slot in v.iter_mut().rev() {
        *slot = idx % p;
        idx /= p;
    }
    v
}

/// Discrete logarithms to a fixed generator, by table.
#[derive(Debug)]
pub struct DlogTable {
    powers: Vec<u64>,
    logs: HashMap<u64, u64>,
}

impl DlogTable {
    pub fn new(field: &GaloisField, generator: &[u64]) -> Self {
        let n = field.size() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut logs = HashMap::with_capacity(n as usize);
        let mut cur = field.one();
        for i in 0..n {
            let key = field.index(&cur);
            powers.push(key);
            logs.insert(key, i);
            cur = field.mul(&cur, generator);
        }
        DlogTable { powers, logs }
    }

    pub fn log(&self, field: &GaloisField, a: &[u64]) -> Option<u64> {
        self.logs.get(&field.index(a)).copied()
    }

    pub fn power(&self, field: &GaloisField, e: u64) -> Vec<u64> {
        field.from_index(self.powers[(e % self.powers.len() as u64) as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_generators() {
        for (p, g) in [(3u64, 2u64), (5, 2), (7, 3), (11, 2), (13, 2)] {
            let f = GaloisField::canonical(p, 1);
            assert_eq!(f.canonical_generator(), vec![g]);
        }
    }

    #[test]
    fn canonical_modulus_is_irreducible() {
        for (p, k) in [(2u64, 3usize), (3, 2), (5, 2), (5, 4), (7, 3)] {
            let f = GaloisField::canonical(p, k);
            let g = f.canonical_generator();
            let mp = f.min_poly(&g);
            assert_eq!(mp.len(), k + 1);
            assert!(f.is_zero(&f.eval_fp_poly(&mp, &g)));
            // the multiplicative group is cyclic of order p^k - 1
            assert_eq!(f.pow(&g, f.size() - 1), f.one());
        }
    }

    #[test]
    fn dlog_round_trip() {
        let f = GaloisField::canonical(5, 2);
        let g = f.canonical_generator();
        let t = DlogTable::new(&f, &g);
        for e in [0u64, 1, 7, 23] {
            let a = f.pow(&g, e);
            assert_eq!(t.log(&f, &a), Some(e));
            assert_eq!(t.power(&f, e), a);
        }
    }
}
