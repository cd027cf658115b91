use std::collections::HashMap;
use std::sync::Arc;

use crate::groups::{AbelianPresentation, GroupElement, SubgroupSpec};
use crate::linalg::lcm;

use super::{CohomologyError, Result, DEFAULT_MAX_MODULE_ORDER};

/// The elements of a subgroup of a presentation, with multiplication tables.
///
/// Index 0 is always the identity.
#[derive(Debug)]
pub struct GroupView {
    ambient: AbelianPresentation,
    elements: Vec<GroupElement>,
    local: HashMap<usize, usize>,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

impl GroupView {
    pub fn full(ambient: &AbelianPresentation, bound: u64) -> Result<Arc<Self>> {
        let elements = ambient.enumerate(bound)?;
        Ok(Arc::new(Self::from_elements(ambient.clone(), elements)))
    }

    pub fn subgroup(ambient: &AbelianPresentation, h: &SubgroupSpec) -> Result<Arc<Self>> {
        let elements = crate::groups::subgroup_elements(ambient, h)?;
        Ok(Arc::new(Self::from_elements(ambient.clone(), elements)))
    }

    fn from_elements(ambient: AbelianPresentation, elements: Vec<GroupElement>) -> Self {
        let local: HashMap<usize, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (ambient.index_of(g), i))
            .collect();
        let n = elements.len();
        let mut mul = vec![0; n * n];
        let mut inv = vec![0; n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                mul[i * n + j] = local[&ambient.index_of(&ambient.compose(a, b))];
            }
            inv[i] = local[&ambient.index_of(&ambient.inverse(a))];
        }
        GroupView {
            ambient,
            elements,
            local,
            mul,
            inv,
        }
    }

    pub fn ambient(&self) -> &AbelianPresentation {
        &self.ambient
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        if self.ambient.check(g).is_err() {
            return None;
        }
        self.local.get(&self.ambient.index_of(g)).copied()
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.elements.len() + j]
    }

    #[inline]
    pub fn inv(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn is_full(&self) -> bool {
        self.elements.len() as u128 == self.ambient.order()
    }

    /// Local indices of `x^0, x^1, ...` for `x` in the view.
    pub fn powers(&self, i: usize) -> Vec<usize> {
        let mut out = vec![0];
        let mut cur = i;
        while cur != 0 {
            out.push(cur);
            cur = self.mul(cur, i);
        }
        out
    }
}

/// `A = ⊕ Z/d_j` (`d_j = 0` meaning `Z`) with one integer matrix per generator.
///
/// Entry `(i, j)` of an action matrix is stored reduced modulo `d_i`; this is
/// well defined because `d_i | M_ij d_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGModule {
    group: AbelianPresentation,
    factors: Vec<u64>,
    actions: Vec<Vec<i64>>,
}

impl FiniteGModule {
    pub fn new(
        group: &AbelianPresentation,
        factors: Vec<u64>,
        actions: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let m = Self::new_unbounded(group, factors, actions)?;
        if let Some(order) = m.order() {
            if order > DEFAULT_MAX_MODULE_ORDER {
                return Err(CohomologyError::TooLarge(format!(
                    "module order {order} exceeds {DEFAULT_MAX_MODULE_ORDER}"
                )));
            }
        }
        Ok(m)
    }

    /// Validates everything except the order bound.
    pub fn new_unbounded(
        group: &AbelianPresentation,
        factors: Vec<u64>,
        actions: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let r = factors.len();
        if actions.len() != group.rank() {
            return Err(CohomologyError::InvalidModule(format!(
                "{} action matrices for a group of rank {}",
                actions.len(),
                group.rank()
            )));
        }
        if factors.contains(&1) {
            return Err(CohomologyError::InvalidModule(
                "factor 1 is not allowed".into(),
            ));
        }
        let mut m = FiniteGModule {
            group: group.clone(),
            factors,
            actions,
        };
        for a in m.actions.iter_mut() {
            if a.len() != r * r {
                return Err(CohomologyError::InvalidModule(format!(
                    "action matrix is not {r}x{r}"
                )));
            }
        }
        for s in 0..m.actions.len() {
            for i in 0..r {
                for j in 0..r {
                    let di = m.factors[i] as i128;
                    let x = m.actions[s][i * r + j] as i128 * m.factors[j] as i128;
                    let ok = if di == 0 { x == 0 } else { x % di == 0 };
                    if !ok {
                        return Err(CohomologyError::InvalidModule(format!(
                            "entry ({i},{j}) of generator {s} is not a map Z/{} -> Z/{}",
                            m.factors[j], m.factors[i]
                        )));
                    }
                }
            }
            let reduced = m.reduce_matrix(&m.actions[s]);
            m.actions[s] = reduced;
        }
        let id = m.identity_matrix();
        for (s, &n) in group.orders().iter().enumerate() {
            if m.matrix_pow(&m.actions[s], n) != id {
                return Err(CohomologyError::InvalidModule(format!(
                    "generator {s} does not act with order dividing {n}"
                )));
            }
            for t in 0..s {
                let ab = m.matrix_mul(&m.actions[s], &m.actions[t]);
                let ba = m.matrix_mul(&m.actions[t], &m.actions[s]);
                if ab != ba {
                    return Err(CohomologyError::InvalidModule(format!(
                        "generators {t} and {s} do not commute"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn trivial(group: &AbelianPresentation, factors: Vec<u64>) -> Result<Self> {
        let r = factors.len();
        let mut id = vec![0i64; r * r];
        for i in 0..r {
            id[i * r + i] = 1;
        }
        Self::new(group, factors, vec![id; group.rank()])
    }

    pub fn group(&self) -> &AbelianPresentation {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn actions(&self) -> &[Vec<i64>] {
        &self.actions
    }

    /// `None` when some factor is `Z`.
    pub fn order(&self) -> Option<u128> {
        if self.factors.contains(&0) {
            None
        } else {
            Some(self.factors.iter().map(|&d| d as u128).product())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|&d| d > 0)
    }

    pub fn is_free(&self) -> bool {
        self.factors.iter().all(|&d| d == 0)
    }

    /// `lcm(d_j)` for finite modules, `0` for free ones; mixed modules are rejected.
    pub fn modulus(&self) -> Result<i128> {
        if self.is_free() {
            Ok(0)
        } else if self.is_finite() {
            Ok(self
                .factors
                .iter()
                .fold(1i128, |acc, &d| lcm(acc, d as i128)))
        } else {
            Err(CohomologyError::Unsupported(
                "modules mixing Z and finite cyclic factors".into(),
            ))
        }
    }

    pub fn reduce(&self, x: &mut [i64]) {
        for (v, &d) in x.iter_mut().zip(&self.factors) {
            if d > 0 {
                *v = v.rem_euclid(d as i64);
            }
        }
    }

    pub fn reduced(&self, x: &[i64]) -> Vec<i64> {
        let mut y = x.to_vec();
        self.reduce(&mut y);
        y
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    fn reduce_matrix(&self, a: &[i64]) -> Vec<i64> {
        let r = self.rank();
        let mut out = a.to_vec();
        for i in 0..r {
            let d = self.factors[i] as i64;
            if d > 0 {
                for j in 0..r {
                    out[i * r + j] = out[i * r + j].rem_euclid(d);
                }
            }
        }
        out
    }

    pub fn identity_matrix(&self) -> Vec<i64> {
        let r = self.rank();
        let mut id = vec![0i64; r * r];
        for i in 0..r {
            id[i * r + i] = 1;
        }
        self.reduce_matrix(&id)
    }

    pub fn matrix_mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let r = self.rank();
        let mut out = vec![0i64; r * r];
        for i in 0..r {
            for k in 0..r {
                let mut acc = 0i128;
                for j in 0..r {
                    acc += a[i * r + j] as i128 * b[j * r + k] as i128;
                }
                let d = self.factors[i] as i128;
                out[i * r + k] = if d > 0 {
                    acc.rem_euclid(d) as i64
                } else {
                    acc as i64
                };
            }
        }
        out
    }

    fn matrix_pow(&self, a: &[i64], mut n: u64) -> Vec<i64> {
        let mut result = self.identity_matrix();
        let mut base = a.to_vec();
        while n > 0 {
            if n & 1 == 1 {
                result = self.matrix_mul(&result, &base);
            }
            base = self.matrix_mul(&base, &base);
            n >>= 1;
        }
        result
    }

    /// Matrix of the action of an element of the ambient presentation.
    pub fn element_matrix(&self, g: &GroupElement) -> Vec<i64> {
        g.0.iter()
            .zip(&self.actions)
            .fold(self.identity_matrix(), |acc, (&a, m)| {
                self.matrix_mul(&acc, &self.matrix_pow(m, a))
            })
    }

    /// `M x`, reduced.
    pub fn apply(&self, m: &[i64], x: &[i64]) -> Vec<i64> {
        let r = self.rank();
        (0..r)
            .map(|i| {
                let acc: i128 = (0..r).map(|j| m[i * r + j] as i128 * x[j] as i128).sum();
                let d = self.factors[i] as i128;
                if d > 0 {
                    acc.rem_euclid(d) as i64
                } else {
                    acc as i64
                }
            })
            .collect()
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let v: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduced(&v)
    }

    pub fn sub(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let v: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.reduced(&v)
    }

    pub fn scale(&self, x: &[i64], k: i64) -> Vec<i64> {
        let v: Vec<i64> = x.iter().map(|a| a * k).collect();
        self.reduced(&v)
    }

    /// Same module data viewed over another presentation of equal rank.
    pub fn with_group(&self, group: &AbelianPresentation) -> Result<Self> {
        Self::new_unbounded(group, self.factors.clone(), self.actions.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_modules() {
        let c2: AbelianPresentation = "2".parse().unwrap();
        // multiplication by 2 is not well defined Z/4 -> Z/3
        assert!(FiniteGModule::new(&c2, vec![3, 4], vec![vec![1, 2, 0, 1]]).is_err());
        // 2 has order 4 mod 5, not dividing 2
        assert!(FiniteGModule::new(&c2, vec![5], vec![vec![2]]).is_err());
        assert!(FiniteGModule::new(&c2, vec![5], vec![vec![4]]).is_ok());
        let c22: AbelianPresentation = "2x2".parse().unwrap();
        let swap = vec![0, 1, 1, 0];
        let neg = vec![-1, 0, 0, 1];
        assert!(FiniteGModule::new(&c22, vec![3, 3], vec![swap, neg]).is_err());
    }

    #[test]
    fn view_tables() {
        let g: AbelianPresentation = "4x2".parse().unwrap();
        let v = GroupView::subgroup(
            &g,
            &SubgroupSpec {
                generators: vec![GroupElement(vec![2, 1])],
            },
        )
        .unwrap();
        assert_eq!(v.order(), 2);
        assert_eq!(v.mul(1, 1), 0);
        assert_eq!(v.powers(1), vec![0, 1]);
        assert!(!v.is_full());
        assert!(GroupView::full(&g, 100).unwrap().is_full());
    }
}
