use std::sync::Arc;

use crate::linalg::IntMatrix;

use super::module::{FiniteGModule, GroupView};
use super::{CohomologyError, Result};

/// A group view together with a module and the action matrix of every element.
#[derive(Debug)]
pub struct CochainSpace {
    view: Arc<GroupView>,
    module: Arc<FiniteGModule>,
    acts: Vec<Vec<i64>>,
}

impl CochainSpace {
    pub fn new(view: Arc<GroupView>, module: Arc<FiniteGModule>) -> Result<Arc<Self>> {
        if module.group() != view.ambient() {
            return Err(CohomologyError::Mismatch(
                "module and group use different presentations".into(),
            ));
        }
        let acts = view
            .elements()
            .iter()
            .map(|g| module.element_matrix(g))
            .collect();
        Ok(Arc::new(CochainSpace { view, module, acts }))
    }

    pub fn view(&self) -> &Arc<GroupView> {
        &self.view
    }

    pub fn module(&self) -> &Arc<FiniteGModule> {
        &self.module
    }

    pub fn order(&self) -> usize {
        self.view.order()
    }

    /// `g . x` for the element with local index `g`.
    pub fn act(&self, g: usize, x: &[i64]) -> Vec<i64> {
        self.module.apply(&self.acts[g], x)
    }

    pub fn act_matrix(&self, g: usize) -> &[i64] {
        &self.acts[g]
    }

    pub fn cells(&self, degree: usize) -> usize {
        self.order().pow(degree as u32)
    }

    /// Same group and module restricted to a smaller view of the same presentation.
    pub fn restrict_to(&self, view: Arc<GroupView>) -> Result<Arc<Self>> {
        CochainSpace::new(view, self.module.clone())
    }

    /// Matrix of `d: C^k -> C^{k+1}` on unscaled coordinates. With `scaled`, the
    /// output row for module coordinate `i` is multiplied by `E/d_i`, turning
    /// the system into one over a single ring `Z/E`.
    pub fn coboundary_matrix(&self, degree: usize, scaled: bool) -> Result<IntMatrix> {
        let n = self.order();
        let r = self.module.rank();
        let e = self.module.modulus()?;
        let rows = self.cells(degree + 1) * r;
        let cols = self.cells(degree) * r;
        let mut m = IntMatrix::zeros(rows, cols);
        let scale: Vec<i128> = self
            .module
            .factors()
            .iter()
            .map(|&d| if scaled && e > 0 { e / d as i128 } else { 1 })
            .collect();
        let mut tuple = vec![0usize; degree + 1];
        for out_cell in 0..self.cells(degree + 1) {
            decode(out_cell, n, &mut tuple);
            for (src, sign, acting) in coboundary_terms(&self.view, &tuple) {
                let mat = acting.map(|g| &self.acts[g]);
                for i in 0..r {
                    for j in 0..r {
                        let coef = match mat {
                            Some(a) => a[i * r + j] as i128,
                            None => (i == j) as i128,
                        };
                        if coef != 0 {
                            m.add_to(out_cell * r + i, src * r + j, sign * coef * scale[i]);
                        }
                    }
                }
            }
        }
        Ok(m)
    }
}

/// Flat cell index -> tuple of local indices (first entry most significant).
pub(crate) fn decode(mut cell: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = cell % n;
        cell /= n;
    }
}

pub(crate) fn encode(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * n + x)
}

/// Terms of `(df)(g_0, ..., g_k)` as `(source cell, sign, acting element)`.
fn coboundary_terms(view: &GroupView, tuple: &[usize]) -> Vec<(usize, i128, Option<usize>)> {
    let n = view.order();
    let k = tuple.len() - 1;
    let mut terms = Vec::with_capacity(k + 2);
    terms.push((encode(&tuple[1..], n), 1, Some(tuple[0])));
    for i in 1..=k {
        let mut t: Vec<usize> = Vec::with_capacity(k);
        t.extend_from_slice(&tuple[..i - 1]);
        t.push(view.mul(tuple[i - 1], tuple[i]));
        t.extend_from_slice(&tuple[i + 1..]);
        let sign = if i % 2 == 0 { 1 } else { -1 };
        terms.push((encode(&t, n), sign, None));
    }
    let sign = if (k + 1).is_multiple_of(2) { 1 } else { -1 };
    terms.push((encode(&tuple[..k], n), sign, None));
    terms
}

/// An inhomogeneous cochain `G^k -> A`, stored as one coordinate vector per cell.
#[derive(Debug, Clone)]
pub struct Cochain {
    space: Arc<CochainSpace>,
    degree: usize,
    values: Vec<Vec<i64>>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space)
            && self.degree == other.degree
            && self.values == other.values
    }
}

impl Cochain {
    pub fn zero(space: &Arc<CochainSpace>, degree: usize) -> Self {
        let values = vec![space.module.zero(); space.cells(degree)];
        Cochain {
            space: space.clone(),
            degree,
            values,
        }
    }

    pub fn from_fn(
        space: &Arc<CochainSpace>,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> Vec<i64>,
    ) -> Self {
        let n = space.order();
        let mut tuple = vec![0usize; degree];
        let values = (0..space.cells(degree))
            .map(|cell| {
                decode(cell, n, &mut tuple);
                space.module.reduced(&f(&tuple))
            })
            .collect();
        Cochain {
            space: space.clone(),
            degree,
            values,
        }
    }

    /// Builds a cochain from coordinates laid out as in [`Cochain::flat`].
    pub fn from_flat(space: &Arc<CochainSpace>, degree: usize, flat: &[i128]) -> Self {
        let r = space.module.rank();
        let values = flat
            .chunks(r.max(1))
            .take(space.cells(degree))
            .map(|ch| {
                let v: Vec<i64> = ch.iter().map(|&x| x as i64).collect();
                space.module.reduced(&v)
            })
            .collect::<Vec<_>>();
        let values = if r == 0 {
            vec![Vec::new(); space.cells(degree)]
        } else {
            values
        };
        Cochain {
            space: space.clone(),
            degree,
            values,
        }
    }

    pub fn space(&self) -> &Arc<CochainSpace> {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[Vec<i64>] {
        &self.values
    }

    pub fn get(&self, tuple: &[usize]) -> &[i64] {
        &self.values[encode(tuple, self.space.order())]
    }

    pub fn set(&mut self, tuple: &[usize], v: Vec<i64>) {
        let cell = encode(tuple, self.space.order());
        self.values[cell] = self.space.module.reduced(&v);
    }

    pub fn flat(&self) -> Vec<i128> {
        self.values
            .iter()
            .flat_map(|v| v.iter().map(|&x| x as i128))
            .collect()
    }

    fn check_same(&self, other: &Cochain) -> Result<()> {
        if !Arc::ptr_eq(&self.space, &other.space) || self.degree != other.degree {
            return Err(CohomologyError::Mismatch(
                "cochains live in different spaces".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_same(other)?;
        let m = &self.space.module;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| m.add(a, b))
            .collect();
        Ok(Cochain {
            space: self.space.clone(),
            degree: self.degree,
            values,
        })
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.check_same(other)?;
        let m = &self.space.module;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| m.sub(a, b))
            .collect();
        Ok(Cochain {
            space: self.space.clone(),
            degree: self.degree,
            values,
        })
    }

    pub fn scale(&self, k: i64) -> Cochain {
        let m = &self.space.module;
        let values = self.values.iter().map(|a| m.scale(a, k)).collect();
        Cochain {
            space: self.space.clone(),
            degree: self.degree,
            values,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|&x| x == 0))
    }

    pub fn coboundary(&self) -> Cochain {
        let n = self.space.order();
        let m = &self.space.module;
        let mut tuple = vec![0usize; self.degree + 1];
        let values = (0..self.space.cells(self.degree + 1))
            .map(|cell| {
                decode(cell, n, &mut tuple);
                let mut acc = m.zero();
                for (src, sign, acting) in coboundary_terms(&self.space.view, &tuple) {
                    let v = match acting {
                        Some(g) => self.space.act(g, &self.values[src]),
                        None => self.values[src].clone(),
                    };
                    acc = if sign > 0 {
                        m.add(&acc, &v)
                    } else {
                        m.sub(&acc, &v)
                    };
                }
                acc
            })
            .collect();
        Cochain {
            space: self.space.clone(),
            degree: self.degree + 1,
            values,
        }
    }

    /// First cell (in enumeration order) where `dc` is nonzero, if any.
    pub fn cocycle_witness(&self) -> Option<Vec<usize>> {
        let d = self.coboundary();
        let n = self.space.order();
        d.values
            .iter()
            .position(|v| v.iter().any(|&x| x != 0))
            .map(|cell| {
                let mut t = vec![0; self.degree + 1];
                decode(cell, n, &mut t);
                t
            })
    }

    pub fn is_cocycle(&self) -> bool {
        self.cocycle_witness().is_none()
    }

    pub fn require_cocycle(&self) -> Result<()> {
        match self.cocycle_witness() {
            None => Ok(()),
            Some(t) => Err(CohomologyError::NotCocycle {
                degree: self.degree,
                witness: t
                    .iter()
                    .map(|&i| self.space.view.element(i).to_string())
                    .collect::<Vec<_>>()
                    .join("|"),
            }),
        }
    }

    /// For a 2-cochain: `c - d(const c(e,e))`, which vanishes at `(e, e)`.
    pub fn normalized(&self) -> Result<Cochain> {
        if self.degree != 2 {
            return Err(CohomologyError::Mismatch(
                "normalisation is defined for 2-cochains".into(),
            ));
        }
        let k = self.get(&[0, 0]).to_vec();
        let sp = &self.space;
        Ok(Cochain::from_fn(sp, 2, |t| {
            sp.module.sub(self.get(t), &sp.act(t[0], &k))
        }))
    }

    /// Same values on the cells of a subgroup view of the same presentation.
    pub fn restrict(&self, sub: &Arc<CochainSpace>) -> Result<Cochain> {
        let big = &self.space.view;
        let small = sub.view();
        if big.ambient() != small.ambient() || !Arc::ptr_eq(&self.space.module, sub.module()) {
            return Err(CohomologyError::Mismatch(
                "restriction target is not a subgroup view".into(),
            ));
        }
        let map: Vec<usize> = small
            .elements()
            .iter()
            .map(|g| {
                big.index_of(g)
                    .ok_or_else(|| CohomologyError::Mismatch("not a subgroup".into()))
            })
            .collect::<Result<_>>()?;
        let mut big_tuple = vec![0usize; self.degree];
        Ok(Cochain::from_fn(sub, self.degree, |t| {
            for (b, &s) in big_tuple.iter_mut().zip(t) {
                *b = map[s];
            }
            self.get(&big_tuple).to_vec()
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::AbelianPresentation;

    fn space(g: &str, factors: Vec<u64>, actions: Vec<Vec<i64>>) -> Arc<CochainSpace> {
        let p: AbelianPresentation = g.parse().unwrap();
        let m = FiniteGModule::new(&p, factors, actions).unwrap();
        CochainSpace::new(GroupView::full(&p, 100).unwrap(), Arc::new(m)).unwrap()
    }

    #[test]
    fn dd_is_zero() {
        let sp = space("4", vec![5], vec![vec![2]]);
        let mut seed = 7i64;
        let c = Cochain::from_fn(&sp, 1, |_| {
            seed = (seed * 31 + 11) % 97;
            vec![seed]
        });
        assert!(c.coboundary().is_cocycle());
        assert!(c.coboundary().coboundary().is_zero());
    }

    #[test]
    fn matrix_matches_direct_coboundary() {
        let sp = space("2x2", vec![4], vec![vec![3], vec![1]]);
        for degree in 0..3 {
            let mut seed = 3i64;
            let c = Cochain::from_fn(&sp, degree, |_| {
                seed = (seed * 17 + 5) % 101;
                vec![seed]
            });
            let m = sp.coboundary_matrix(degree, false).unwrap();
            let img = m.mul_vec(&c.flat(), 0).unwrap();
            let direct = c.coboundary();
            let via = Cochain::from_flat(&sp, degree + 1, &img);
            assert_eq!(via.values(), direct.values());
        }
    }

    #[test]
    fn normalized_vanishes_at_identity() {
        let sp = space("3", vec![7], vec![vec![2]]);
        let b = Cochain::from_fn(&sp, 1, |t| vec![t[0] as i64 + 1]);
        let c = b.coboundary().normalized().unwrap();
        assert_eq!(c.get(&[0, 0]), &[0]);
        assert!(c.is_cocycle());
    }
}
