//! `Hom(Z[G], A)` and `Hom(I_G, A)` as explicit modules, and the connecting
//! isomorphism `Z^1(G, Hom(I_G, A)) <-> Z^2(G, A)` between them.

use std::sync::Arc;

use super::cochain::{Cochain, CochainSpace};
use super::module::{FiniteGModule, GroupView};
use super::{CohomologyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InducedFlavor {
    /// `Hom(Z[G], A)`, one block of coordinates per element of `G`.
    CoInduced,
    /// `Hom(I_G, A)`, one block per basis vector `x - 1` with `x != e`.
    Augmentation,
}

#[derive(Debug, Clone)]
pub struct InducedModule {
    flavor: InducedFlavor,
    view: Arc<GroupView>,
    base: Arc<CochainSpace>,
    module: Arc<FiniteGModule>,
    /// Local element index of each block.
    slots: Vec<usize>,
}

impl InducedModule {
    /// `base` must be a cochain space over the full group.
    pub fn new(base: &Arc<CochainSpace>, flavor: InducedFlavor) -> Result<Self> {
        let view = base.view().clone();
        if !view.is_full() {
            return Err(CohomologyError::Mismatch(
                "induced modules need the full group".into(),
            ));
        }
        let n = view.order();
        let r = base.module().rank();
        let slots: Vec<usize> = match flavor {
            InducedFlavor::CoInduced => (0..n).collect(),
            InducedFlavor::Augmentation => (1..n).collect(),
        };
        let mut block_of = vec![usize::MAX; n];
        for (b, &x) in slots.iter().enumerate() {
            block_of[x] = b;
        }
        let size = slots.len() * r;
        let pres = view.ambient();
        let mut actions = Vec::with_capacity(pres.rank());
        for s in 0..pres.rank() {
            let g = view
                .index_of(&pres.generator(s))
                .expect("generator in view");
            let gm = base.act_matrix(g);
            let gi = view.inv(g);
            let mut mat = vec![0i64; size * size];
            let mut put = |row_block: usize, col_block: usize, sign: i64| {
                for i in 0..r {
                    for j in 0..r {
                        mat[(row_block * r + i) * size + col_block * r + j] += sign * gm[i * r + j];
                    }
                }
            };
            for (b, &x) in slots.iter().enumerate() {
                let y = view.mul(gi, x);
                match flavor {
                    InducedFlavor::CoInduced => put(b, block_of[y], 1),
                    InducedFlavor::Augmentation => {
                        // (g phi)(x - 1) = g (phi(g^{-1}x - 1) - phi(g^{-1} - 1))
                        if y != 0 {
                            put(b, block_of[y], 1);
                        }
                        if gi != 0 {
                            put(b, block_of[gi], -1);
                        }
                    }
                }
            }
            actions.push(mat);
        }
        let factors: Vec<u64> = slots
            .iter()
            .flat_map(|_| base.module().factors().iter().copied())
            .collect();
        let module = FiniteGModule::new_unbounded(pres, factors, actions)?;
        Ok(InducedModule {
            flavor,
            view,
            base: base.clone(),
            module: Arc::new(module),
            slots,
        })
    }

    pub fn flavor(&self) -> InducedFlavor {
        self.flavor
    }

    pub fn module(&self) -> &Arc<FiniteGModule> {
        &self.module
    }

    pub fn base(&self) -> &Arc<CochainSpace> {
        &self.base
    }

    pub fn space(&self) -> Result<Arc<CochainSpace>> {
        CochainSpace::new(self.view.clone(), self.module.clone())
    }

    /// Block of `phi` at the slot for element `x` (`x - 1` in the augmentation case).
    pub fn block<'a>(&self, phi: &'a [i64], x: usize) -> Option<&'a [i64]> {
        let r = self.base.module().rank();
        self.slots
            .iter()
            .position(|&s| s == x)
            .map(|b| &phi[b * r..(b + 1) * r])
    }

    fn assemble(&self, mut f: impl FnMut(usize) -> Vec<i64>) -> Vec<i64> {
        let v: Vec<i64> = self.slots.iter().flat_map(|&x| f(x)).collect();
        self.module.reduced(&v)
    }

    /// `A -> Hom(Z[G], A)`, `a` to the constant map.
    pub fn inclusion(&self, a: &[i64]) -> Result<Vec<i64>> {
        if self.flavor != InducedFlavor::CoInduced {
            return Err(CohomologyError::Mismatch(
                "inclusion lands in Hom(Z[G], A)".into(),
            ));
        }
        Ok(self.assemble(|_| a.to_vec()))
    }

    /// `Hom(Z[G], A) -> Hom(I_G, A)`, restriction along `I_G ⊂ Z[G]`.
    pub fn restriction(&self, target: &InducedModule, phi: &[i64]) -> Result<Vec<i64>> {
        if self.flavor != InducedFlavor::CoInduced || target.flavor != InducedFlavor::Augmentation {
            return Err(CohomologyError::Mismatch(
                "restriction goes Hom(Z[G],A) -> Hom(I_G,A)".into(),
            ));
        }
        let m = self.base.module();
        let at_e = self.block(phi, 0).expect("identity slot").to_vec();
        Ok(target.assemble(|x| m.sub(self.block(phi, x).expect("slot"), &at_e)))
    }
}

/// `c1 -> [(g, g') -> g . c1(g')(g^{-1} - 1)]`.
pub fn dim_shift_forward(ind: &InducedModule, c1: &Cochain) -> Result<Cochain> {
    if ind.flavor != InducedFlavor::Augmentation
        || c1.degree() != 1
        || !Arc::ptr_eq(c1.space().module(), &ind.module)
    {
        return Err(CohomologyError::Mismatch(
            "expected a 1-cochain valued in Hom(I_G, A)".into(),
        ));
    }
    c1.require_cocycle()?;
    let base = &ind.base;
    let view = &ind.view;
    Ok(Cochain::from_fn(base, 2, |t| {
        let (g, gp) = (t[0], t[1]);
        let gi = view.inv(g);
        if gi == 0 {
            return base.module().zero();
        }
        base.act(g, ind.block(c1.get(&[gp]), gi).expect("slot"))
    }))
}

/// `c2 -> [g -> ((g' - 1) -> g' . c2(g'^{-1}, g))]`.
///
/// Only normalised cocycles (`c2(e, e) = 0`) map to cocycles; other input is rejected.
pub fn dim_shift_backward(ind: &InducedModule, c2: &Cochain) -> Result<Cochain> {
    if ind.flavor != InducedFlavor::Augmentation
        || c2.degree() != 2
        || !Arc::ptr_eq(c2.space(), &ind.base)
    {
        return Err(CohomologyError::Mismatch(
            "expected a 2-cochain over the base module".into(),
        ));
    }
    c2.require_cocycle()?;
    if c2.get(&[0, 0]).iter().any(|&x| x != 0) {
        return Err(CohomologyError::NotNormalized);
    }
    let space = ind.space()?;
    let base = &ind.base;
    let view = &ind.view;
    Ok(Cochain::from_fn(&space, 1, |t| {
        let g = t[0];
        ind.assemble(|x| base.act(x, c2.get(&[view.inv(x), g])))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::AbelianPresentation;
    use crate::zmod_cohomology::groupcoh::h2_bruteforce;

    fn base(g: &str, factors: Vec<u64>, actions: Vec<Vec<i64>>) -> Arc<CochainSpace> {
        let p: AbelianPresentation = g.parse().unwrap();
        let m = FiniteGModule::new(&p, factors, actions).unwrap();
        CochainSpace::new(GroupView::full(&p, 100).unwrap(), Arc::new(m)).unwrap()
    }

    #[test]
    fn short_exact_sequence_is_equivariant_and_exact() {
        let b = base("4", vec![8], vec![vec![3]]);
        let co = InducedModule::new(&b, InducedFlavor::CoInduced).unwrap();
        let aug = InducedModule::new(&b, InducedFlavor::Augmentation).unwrap();
        let cosp = co.space().unwrap();
        let augsp = aug.space().unwrap();
        for a in 0..8 {
            let inc = co.inclusion(&[a]).unwrap();
            assert!(aug.restriction(&aug, &inc).is_err());
            assert!(co.restriction(&aug, &inc).unwrap().iter().all(|&x| x == 0));
            for g in 0..4 {
                assert_eq!(cosp.act(g, &inc), co.inclusion(&b.act(g, &[a])).unwrap());
            }
        }
        let phi = vec![1, 5, 2, 7];
        for g in 0..4 {
            let lhs = co.restriction(&aug, &cosp.act(g, &phi)).unwrap();
            let rhs = augsp.act(g, &co.restriction(&aug, &phi).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn round_trip_on_h2_representatives() {
        let b = base("2x2", vec![9], vec![vec![-1], vec![1]]);
        let aug = InducedModule::new(&b, InducedFlavor::Augmentation).unwrap();
        let h2 = h2_bruteforce(&b).unwrap();
        for rep in &h2.representatives {
            let c2 = rep.normalized().unwrap();
            let c1 = dim_shift_backward(&aug, &c2).unwrap();
            assert!(c1.is_cocycle());
            let back = dim_shift_forward(&aug, &c1).unwrap();
            assert_eq!(back.values(), c2.values());
        }
    }

    #[test]
    fn backward_rejects_unnormalized() {
        let b = base("2", vec![4], vec![vec![1]]);
        let aug = InducedModule::new(&b, InducedFlavor::Augmentation).unwrap();
        let c = Cochain::from_fn(&b, 2, |_| vec![1]);
        assert!(c.is_cocycle());
        assert!(matches!(
            dim_shift_backward(&aug, &c),
            Err(CohomologyError::NotNormalized)
        ));
    }
}
