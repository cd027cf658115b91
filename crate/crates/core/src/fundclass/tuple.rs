//! Encoding tuples `(α_i, β_ij)` and the 2-cocycles they compress.
//!
//! Expansion works in the crossed product with symbols `z_i` and rules
//! `z_i λ = σ_i(λ) z_i`, `z_i^{n_i} = α_i` and `z_i z_j = β_ij z_j z_i`;
//! the element `(a_0, .., a_m)` is represented by `z_0^{a_0} ⋯ z_m^{a_m}`.
//! With this orientation `β_ij = c(σ_i, σ_j) / c(σ_j, σ_i)` recovers the tuple.

use std::collections::HashMap;
use std::thread;

use crate::groups::{AbelianPresentation, GroupElement};
use crate::padic_fields::{partial_norm, Automorphism, Field, FieldElement};

use super::tower::Tower;
use super::{Family, FundclassError, Result};

#[derive(Debug, Clone)]
pub struct EncodingTuple {
    /// Generator labels `i` (`0` for `σ_0|_L`, `1` for `σ_1`).
    pub indices: Vec<usize>,
    pub orders: Vec<u64>,
    pub alpha: Vec<FieldElement>,
    pub beta: Vec<Vec<FieldElement>>,
}

impl EncodingTuple {
    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    /// `β_ii = 1`, `β_ij β_ji = 1`, `σ_i(α_i) = α_i`, and every entry lies in `L`.
    pub fn check_laws(&self, tower: &Tower) -> Result<()> {
        let prec = tower.precision() as i64;
        let one = FieldElement::one(&tower.field);
        let fail = |m: String| Err(FundclassError::Pipeline(m));
        if self.indices != tower.indices || self.orders != tower.quotient.orders() {
            return fail("tuple shape differs from Gal(L/K)".into());
        }
        for (k, a) in self.alpha.iter().enumerate() {
            tower.check_in_l(&format!("alpha_{}", self.indices[k]), a)?;
            if !a.apply(&tower.generator_auto(k)).congruent(a, prec)? {
                return fail(format!(
                    "alpha_{} is not fixed by sigma_{}",
                    self.indices[k], self.indices[k]
                ));
            }
        }
        for i in 0..self.rank() {
            if !self.beta[i][i].congruent(&one, prec)? {
                return fail(format!("beta_{0}{0} != 1", self.indices[i]));
            }
            for j in 0..self.rank() {
                tower.check_in_l("beta", &self.beta[i][j])?;
                if !self.beta[i][j]
                    .mul(&self.beta[j][i])?
                    .congruent(&one, prec)?
                {
                    return fail(format!(
                        "beta_{}{} beta_{}{} != 1",
                        self.indices[i], self.indices[j], self.indices[j], self.indices[i]
                    ));
                }
            }
        }
        Ok(())
    }

    /// Entrywise congruence at `digits`.
    pub fn congruent(&self, other: &Self, digits: i64) -> Result<bool> {
        if self.indices != other.indices || self.orders != other.orders {
            return Ok(false);
        }
        for (a, b) in self.alpha.iter().zip(&other.alpha) {
            if !a.congruent(b, digits)? {
                return Ok(false);
            }
        }
        for (ra, rb) in self.beta.iter().zip(&other.beta) {
            for (a, b) in ra.iter().zip(rb) {
                if !a.congruent(b, digits)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A multiplicative 2-cocycle table on `Gal(L/K)` with values in `L^×`.
#[derive(Debug, Clone)]
pub struct LocalCocycle {
    pub group: AbelianPresentation,
    /// Action of each group element (by enumeration index).
    pub autos: Vec<Automorphism>,
    /// `c(g, h)` at `g * |G| + h`.
    pub table: Vec<FieldElement>,
    /// Digits at which identities are checked.
    pub precision: u32,
}

impl LocalCocycle {
    pub fn order(&self) -> usize {
        self.group.order() as usize
    }

    pub fn get(&self, g: usize, h: usize) -> &FieldElement {
        &self.table[g * self.order() + h]
    }

    pub fn value(&self, g: &GroupElement, h: &GroupElement) -> &FieldElement {
        self.get(self.group.index_of(g), self.group.index_of(h))
    }

    pub fn field(&self) -> &std::sync::Arc<Field> {
        self.table[0].field()
    }

    /// Entrywise `k`-th power.
    pub fn pow(&self, k: i64) -> Result<LocalCocycle> {
        let table = self
            .table
            .iter()
            .map(|x| x.pow(k))
            .collect::<std::result::Result<_, _>>()?;
        Ok(LocalCocycle {
            table,
            ..self.clone()
        })
    }

    fn mul_table(&self) -> Vec<usize> {
        let n = self.order();
        let elems: Vec<GroupElement> = (0..n).map(|i| self.group.element_at(i)).collect();
        let mut t = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] = self
                    .group
                    .index_of(&self.group.compose(&elems[a], &elems[b]));
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleReport {
    pub passed: bool,
    pub triples: u64,
    pub failures: u64,
    /// Lexicographically least failing `(g, h, k)`.
    pub witness: Option<(GroupElement, GroupElement, GroupElement)>,
}

/// Sweeps `g·c(h,k) · c(g,hk) = c(gh,k) · c(g,h)` over all triples, split over `jobs` threads.
pub fn verify_cocycle(c: &LocalCocycle, jobs: usize) -> Result<CocycleReport> {
    let n = c.order();
    let mt = c.mul_table();
    let digits = c.precision as i64;
    let check_g = |g: usize| -> Result<(u64, Option<(usize, usize)>)> {
        let mut fails = 0;
        let mut first = None;
        for h in 0..n {
            for k in 0..n {
                let lhs = c
                    .get(h, k)
                    .apply(&c.autos[g])
                    .mul(c.get(g, mt[h * n + k]))?;
                let rhs = c.get(mt[g * n + h], k).mul(c.get(g, h))?;
                if !lhs.congruent(&rhs, digits)? {
                    fails += 1;
                    first.get_or_insert((h, k));
                }
            }
        }
        Ok((fails, first))
    };
    let jobs = jobs.clamp(1, n.max(1));
    let results: Vec<Result<(u64, Option<(usize, usize)>)>> = if jobs == 1 {
        (0..n).map(check_g).collect()
    } else {
        let mut slots: Vec<Option<Result<(u64, Option<(usize, usize)>)>>> = vec![None; n];
        thread::scope(|s| {
            let chunks: Vec<_> = slots.chunks_mut(n.div_ceil(jobs)).enumerate().collect();
            let size = n.div_ceil(jobs);
            for (ci, chunk) in chunks {
                let check_g = &check_g;
                s.spawn(move || {
                    for (off, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(check_g(ci * size + off));
                    }
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("every slot filled"))
            .collect()
    };
    let mut failures = 0;
    let mut witness = None;
    for (g, r) in results.into_iter().enumerate() {
        let (f, first) = r?;
        failures += f;
        if witness.is_none() {
            if let Some((h, k)) = first {
                witness = Some((
                    c.group.element_at(g),
                    c.group.element_at(h),
                    c.group.element_at(k),
                ));
            }
        }
    }
    Ok(CocycleReport {
        passed: failures == 0,
        triples: (n * n * n) as u64,
        failures,
        witness,
    })
}

/// `c_{M/K}(σ^i, σ^j) = π^{⌊(i+j)/n⌋}` on an unramified tower.
pub fn unramified_cocycle(tower: &Tower) -> Result<LocalCocycle> {
    let Family::Unramified { n } = tower.spec.canonical().family else {
        return Err(FundclassError::Input(
            "unramified cocycle needs an unramified tower".into(),
        ));
    };
    let one = FieldElement::one(&tower.field);
    let group = tower.quotient.clone();
    let order = group.order() as usize;
    let mut table = Vec::with_capacity(order * order);
    for i in 0..order as u64 {
        for j in 0..order as u64 {
            table.push(if i + j >= n {
                tower.pi.clone()
            } else {
                one.clone()
            });
        }
    }
    Ok(LocalCocycle {
        autos: tower.quotient_autos(),
        group,
        table,
        precision: tower.precision(),
    })
}

/// Expands `T` into the cocycle `c(g, g')` defined by `z(g) z(g') = c(g, g') z(gg')`.
pub fn cocycle_from_tuple(t: &EncodingTuple, tower: &Tower) -> Result<LocalCocycle> {
    if t.indices != tower.indices || t.orders != tower.quotient.orders() {
        return Err(FundclassError::Input(
            "tuple shape differs from Gal(L/K)".into(),
        ));
    }
    let field = &tower.field;
    let r = t.rank();
    let gens: Vec<Automorphism> = (0..r).map(|k| tower.generator_auto(k)).collect();
    // comm[(k, j, c, b)]: z_k^c z_j^b = C z_j^b z_k^c for k > j
    let mut comm: HashMap<(usize, usize, u64, u64), FieldElement> = HashMap::new();
    for k in 0..r {
        for j in 0..k {
            for b in 1..t.orders[j] {
                let nb = partial_norm(&t.beta[k][j], &gens[j], b)?;
                for c in 1..t.orders[k] {
                    comm.insert((k, j, c, b), partial_norm(&nb, &gens[k], c)?);
                }
            }
        }
    }
    let word = |c: &[u64]| -> Automorphism {
        c.iter()
            .zip(&gens)
            .fold(field.identity_automorphism(), |acc, (&e, s)| {
                field.compose(&acc, &field.auto_pow(s, e))
            })
    };
    let group = tower.quotient.clone();
    let order = group.order() as usize;
    let one = FieldElement::one(field);
    let mut table = Vec::with_capacity(order * order);
    for gi in 0..order {
        let g = group.element_at(gi);
        for hi in 0..order {
            let h = group.element_at(hi);
            let mut coef = one.clone();
            let mut c = g.0.clone();
            for j in 0..r {
                let b = h.0[j];
                if b == 0 {
                    continue;
                }
                let mut cfac = one.clone();
                let mut passed = field.identity_automorphism();
                for k in j + 1..r {
                    if c[k] > 0 {
                        cfac = cfac.mul(&comm[&(k, j, c[k], b)].apply(&passed))?;
                        passed = field.compose(&passed, &field.auto_pow(&gens[k], c[k]));
                    }
                }
                coef = coef.mul(&cfac.apply(&word(&c[..=j])))?;
                let s = c[j] + b;
                if s >= t.orders[j] {
                    coef = coef.mul(&t.alpha[j].apply(&word(&c[..j])))?;
                }
                c[j] = s % t.orders[j];
            }
            table.push(coef);
        }
    }
    Ok(LocalCocycle {
        autos: tower.quotient_autos(),
        group,
        table,
        precision: tower.precision(),
    })
}

/// `α_i = ∏_{k<n_i} c(σ_i^k, σ_i)` and `β_ij = c(σ_i, σ_j) / c(σ_j, σ_i)`.
pub fn tuple_from_cocycle(c: &LocalCocycle, indices: &[usize]) -> Result<EncodingTuple> {
    let g = &c.group;
    if indices.len() != g.rank() {
        return Err(FundclassError::Input(
            "one index per generator expected".into(),
        ));
    }
    let orders = g.orders().to_vec();
    let gens: Vec<GroupElement> = (0..g.rank()).map(|k| g.generator(k)).collect();
    let mut alpha = Vec::new();
    for (k, s) in gens.iter().enumerate() {
        let mut acc = FieldElement::one(c.field());
        for t in 0..orders[k] as i64 {
            acc = acc.mul(c.value(&g.power(s, t), s))?;
        }
        alpha.push(acc);
    }
    let mut beta = Vec::new();
    for si in &gens {
        let mut row = Vec::new();
        for sj in &gens {
            row.push(c.value(si, sj).div(c.value(sj, si))?);
        }
        beta.push(row);
    }
    Ok(EncodingTuple {
        indices: indices.to_vec(),
        orders,
        alpha,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundclass::ExtensionSpec;

    fn unram(n: u64) -> Tower {
        Tower::new(
            &ExtensionSpec::new(5, Family::Unramified { n }).with_precision(16),
            20,
        )
        .unwrap()
    }

    #[test]
    fn unramified_table_values() {
        let t = unram(3);
        let c = unramified_cocycle(&t).unwrap();
        let one = FieldElement::one(&t.field);
        let s = t.quotient.generator(0);
        let s2 = t.quotient.power(&s, 2);
        assert!(c.value(&s, &s).congruent(&one, 16).unwrap());
        assert!(c.value(&s2, &s2).congruent(&t.pi, 16).unwrap());
        let rep = verify_cocycle(&c, 2).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.triples, 27);
        let c1 = unramified_cocycle(&unram(1)).unwrap();
        assert_eq!(c1.table.len(), 1);
    }

    #[test]
    fn corrupted_table_is_caught() {
        let t = unram(4);
        let mut c = unramified_cocycle(&t).unwrap();
        c.table[5] = c.table[5].mul(&t.pi).unwrap();
        let rep = verify_cocycle(&c, 3).unwrap();
        assert!(!rep.passed);
        assert!(rep.witness.is_some());
        assert_eq!(rep, verify_cocycle(&c, 1).unwrap());
    }

    #[test]
    fn cyclic_expansion_wraps_with_alpha() {
        let t = unram(4);
        let tuple = tuple_from_cocycle(&unramified_cocycle(&t).unwrap(), &t.indices).unwrap();
        assert!(tuple.alpha[0].congruent(&t.pi, 16).unwrap());
        let c = cocycle_from_tuple(&tuple, &t).unwrap();
        let orig = unramified_cocycle(&t).unwrap();
        for (a, b) in c.table.iter().zip(&orig.table) {
            assert!(a.congruent(b, 16).unwrap());
        }
    }
}
