//! Inverting inflation `H^2(G/H, A^H) -> H^2(G, A)` on cocycles, assuming
//! `H^1(H, A) = 0` and that the class restricts to zero on `H`.

use std::sync::Arc;

use crate::groups::{
    coset_representatives, quotient, QuotientMap, SubgroupSpec, DEFAULT_ENUMERATION_BOUND,
};
use crate::linalg::{IntMatrix, Smith};

use super::cochain::{Cochain, CochainSpace};
use super::groupcoh::{h1_bruteforce, solve_coboundary};
use super::induced::{dim_shift_backward, InducedFlavor, InducedModule};
use super::module::{FiniteGModule, GroupView};
use super::{CohomologyError, Result};

/// `A^H` as a `G/H`-module, with its embedding into `A`.
#[derive(Debug, Clone)]
pub struct FixedModule {
    pub module: Arc<FiniteGModule>,
    /// Image in `A` of each generator of `A^H`.
    pub basis: Vec<Vec<i64>>,
    ambient: Arc<FiniteGModule>,
    /// `U` from the Smith form of the lattice generators (exact, `r x r`).
    u: IntMatrix,
    w: Vec<i128>,
    /// Rows of `U_2` for the kept cyclic factors.
    u2_rows: Vec<Vec<i128>>,
    orders: Vec<u64>,
}

impl FixedModule {
    /// Coordinates of an `H`-fixed element of `A`.
    pub fn coordinates(&self, x: &[i64]) -> Vec<i64> {
        let r = self.ambient.rank();
        let xi: Vec<i128> = x.iter().map(|&v| v as i128).collect();
        let ux = self.u.mul_vec(&xi, 0).expect("dimensions");
        let b: Vec<i128> = (0..r).map(|i| ux[i] / self.w[i]).collect();
        self.u2_rows
            .iter()
            .zip(&self.orders)
            .map(|(row, &o)| {
                (row.iter().zip(&b).map(|(a, c)| a * c).sum::<i128>()).rem_euclid(o as i128) as i64
            })
            .collect()
    }

    pub fn embed(&self, z: &[i64]) -> Vec<i64> {
        let m = &self.ambient;
        z.iter()
            .zip(&self.basis)
            .fold(m.zero(), |acc, (&k, b)| m.add(&acc, &m.scale(b, k)))
    }
}

/// Builds `A^H` for a finite module `A` over the full group.
pub fn fixed_module(
    space: &Arc<CochainSpace>,
    h: &SubgroupSpec,
    q: &QuotientMap,
) -> Result<FixedModule> {
    let a = space.module().clone();
    let e = a.modulus()?;
    if e == 0 {
        return Err(CohomologyError::Unsupported(
            "invariants of a Z-module".into(),
        ));
    }
    let r = a.rank();
    let view = space.view();
    // x -> (h_s x - x)_s in scaled coordinates
    let mut fm = IntMatrix::zeros(h.generators.len() * r, r);
    for (s, g) in h.generators.iter().enumerate() {
        let gi = view
            .index_of(g)
            .ok_or_else(|| CohomologyError::Mismatch("subgroup generator".into()))?;
        let m = space.act_matrix(gi);
        for i in 0..r {
            let scale = e / a.factors()[i] as i128;
            for j in 0..r {
                let v = m[i * r + j] as i128 - (i == j) as i128;
                fm.set(s * r + i, j, v * scale);
            }
        }
    }
    let mut gens: Vec<Vec<i128>> = Smith::compute(fm, e)?.kernel_generators();
    for (i, &d) in a.factors().iter().enumerate() {
        let mut v = vec![0i128; r];
        v[i] = d as i128;
        gens.push(v);
    }
    let mut wm = IntMatrix::zeros(r, gens.len());
    for (j, g) in gens.iter().enumerate() {
        for i in 0..r {
            wm.set(i, j, g[i]);
        }
    }
    let sw = Smith::compute(wm, 0)?;
    let w: Vec<i128> = sw.diag().to_vec();
    debug_assert_eq!(w.len(), r, "lattice contains ⊕ d_i Z so it has full rank");
    let mut u = IntMatrix::zeros(r, r);
    for j in 0..r {
        let mut col = vec![0i128; r];
        col[j] = 1;
        sw.apply_u(&mut col)?;
        for i in 0..r {
            u.set(i, j, col[i]);
        }
    }
    // C = diag(1/w) U D
    let mut c = IntMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            let v = u.get(i, j) * a.factors()[j] as i128;
            debug_assert_eq!(v % w[i], 0);
            c.set(i, j, v / w[i]);
        }
    }
    let sc = Smith::compute(c, 0)?;
    let mut orders = Vec::new();
    let mut u2_rows = Vec::new();
    let mut basis = Vec::new();
    for t in 0..r {
        let o = sc.diag()[t];
        if o == 1 {
            continue;
        }
        let row: Vec<i128> = (0..r)
            .map(|j| {
                let mut col = vec![0i128; r];
                col[j] = 1;
                sc.apply_u(&mut col).expect("exact");
                col[t]
            })
            .collect();
        let z = sc.u_inv_column(t)?;
        let scaled: Vec<i128> = z.iter().zip(&w).map(|(a, b)| a * b).collect();
        let mut x = scaled.clone();
        sw.apply_u_inv(&mut x)?;
        let xv: Vec<i64> = x.iter().map(|&v| v as i64).collect();
        orders.push(o as u64);
        u2_rows.push(row);
        basis.push(a.reduced(&xv));
    }
    let mut fixed = FixedModule {
        module: Arc::new(FiniteGModule::new_unbounded(
            &q.quotient,
            Vec::new(),
            vec![Vec::new(); q.quotient.rank()],
        )?),
        basis,
        ambient: a.clone(),
        u,
        w,
        u2_rows,
        orders: orders.clone(),
    };
    let k = orders.len();
    let mut actions = Vec::with_capacity(q.quotient.rank());
    for lift in &q.lifts {
        let gi = view.index_of(lift).expect("lift in group");
        let mut mat = vec![0i64; k * k];
        for t in 0..k {
            let image = space.act(gi, &fixed.basis[t]);
            let z = fixed.coordinates(&image);
            for i in 0..k {
                mat[i * k + t] = z[i];
            }
        }
        actions.push(mat);
    }
    fixed.module = Arc::new(FiniteGModule::new_unbounded(&q.quotient, orders, actions)?);
    Ok(fixed)
}

#[derive(Debug, Clone)]
pub struct InfResResult {
    pub quotient: QuotientMap,
    pub fixed: FixedModule,
    /// Cocycle over `G/H` valued in `A^H` whose inflation is cohomologous to the input.
    pub u: Cochain,
    /// The trivialising 1-cochain on `G` from step (a), with `b(e) = 0`.
    pub b: Cochain,
    /// `eta_g` for every element of `G`, constant on cosets of `H`.
    pub eta: Vec<Vec<i64>>,
}

fn subgroup_space(space: &Arc<CochainSpace>, h: &SubgroupSpec) -> Result<Arc<CochainSpace>> {
    let view_h = GroupView::subgroup(space.view().ambient(), h)?;
    space.restrict_to(view_h)
}

/// Solves `c(g, h) = b_g + g b_h - b_{gh}` for `g in G`, `h in H`, `b_e = 0`.
pub fn restriction_trivializer(
    space: &Arc<CochainSpace>,
    h: &SubgroupSpec,
    c: &Cochain,
) -> Result<Option<Cochain>> {
    let view = space.view();
    let n = view.order();
    let hs: Vec<usize> = crate::groups::subgroup_elements(view.ambient(), h)?
        .iter()
        .map(|x| view.index_of(x).expect("subgroup element"))
        .collect();
    let m = space.module();
    let e = m.modulus()?;
    let r = m.rank();
    let scale: Vec<i128> = m
        .factors()
        .iter()
        .map(|&d| if e > 0 { e / d as i128 } else { 1 })
        .collect();
    let col = |x: usize| (x - 1) * r;
    let mut mat = IntMatrix::zeros(n * hs.len() * r, (n - 1) * r);
    let mut rhs = vec![0i128; n * hs.len() * r];
    for g in 0..n {
        for (k, &hh) in hs.iter().enumerate() {
            let row0 = (g * hs.len() + k) * r;
            let gh = view.mul(g, hh);
            let act = space.act_matrix(g);
            for i in 0..r {
                if hh != 0 {
                    for j in 0..r {
                        mat.add_to(row0 + i, col(hh) + j, act[i * r + j] as i128 * scale[i]);
                    }
                }
                if gh != 0 {
                    mat.add_to(row0 + i, col(gh) + i, -scale[i]);
                }
                if g != 0 {
                    mat.add_to(row0 + i, col(g) + i, scale[i]);
                }
                rhs[row0 + i] = c.get(&[g, hh])[i] as i128 * scale[i];
            }
        }
    }
    let smith = Smith::compute(mat, e)?;
    Ok(smith.solve(&rhs)?.map(|x| {
        let mut full = vec![0i128; r];
        full.extend(x);
        Cochain::from_flat(space, 1, &full)
    }))
}

/// The same trivialiser obtained through `Hom(I_G, A)`: solve
/// `Res delta^{-1} c = d b_0` on `H` and set `b_g = -g b_0(g^{-1} - 1)`.
pub fn restriction_trivializer_via_dimshift(
    space: &Arc<CochainSpace>,
    h: &SubgroupSpec,
    c: &Cochain,
) -> Result<Option<Cochain>> {
    let c = c.normalized()?;
    let aug = InducedModule::new(space, InducedFlavor::Augmentation)?;
    let c1 = dim_shift_backward(&aug, &c)?;
    let aug_space = c1.space().clone();
    let aug_h = subgroup_space(&aug_space, h)?;
    let Some(b0) = solve_coboundary(&c1.restrict(&aug_h)?)? else {
        return Ok(None);
    };
    let b0 = b0.get(&[]).to_vec();
    let view = space.view();
    Ok(Some(Cochain::from_fn(space, 1, |t| {
        let g = t[0];
        let gi = view.inv(g);
        if gi == 0 {
            return space.module().zero();
        }
        let v = space.act(g, aug.block(&b0, gi).expect("slot"));
        space.module().scale(&v, -1)
    })))
}

pub fn infres_invert(
    space: &Arc<CochainSpace>,
    h: &SubgroupSpec,
    c2: &Cochain,
) -> Result<InfResResult> {
    if !Arc::ptr_eq(c2.space(), space) || c2.degree() != 2 || !space.view().is_full() {
        return Err(CohomologyError::Mismatch(
            "expected a 2-cochain over the full group".into(),
        ));
    }
    let view = space.view().clone();
    let ambient = view.ambient().clone();
    let space_h = subgroup_space(space, h)?;
    let h1 = h1_bruteforce(&space_h)?;
    if !h1.is_trivial() {
        return Err(CohomologyError::H1Nonzero { orders: h1.orders });
    }
    c2.require_cocycle()?;
    let c = c2.normalized()?;
    let m = space.module().clone();

    let b = restriction_trivializer(space, h, &c)?.ok_or(CohomologyError::RestrictionNontrivial)?;

    let cosets = coset_representatives(&ambient, h, DEFAULT_ENUMERATION_BOUND)?;
    let hview = space_h.view().clone();
    let h_in_g: Vec<usize> = hview
        .elements()
        .iter()
        .map(|x| view.index_of(x).expect("in G"))
        .collect();
    let mut eta_rep = Vec::with_capacity(cosets.representatives.len());
    for rep in &cosets.representatives {
        let g = view.index_of(rep).expect("rep in G");
        let cg = Cochain::from_fn(&space_h, 1, |t| {
            let hh = h_in_g[t[0]];
            let v = m.add(c.get(&[hh, g]), b.get(&[view.mul(hh, g)]));
            let v = m.sub(&v, &space.act(hh, b.get(&[g])));
            m.sub(&v, b.get(&[hh]))
        });
        let eta = solve_coboundary(&cg)?
            .ok_or_else(|| CohomologyError::Internal("coset cocycle is not a coboundary".into()))?;
        eta_rep.push(eta.get(&[]).to_vec());
    }
    let eta: Vec<Vec<i64>> = (0..view.order())
        .map(|g| eta_rep[cosets.coset_of[ambient.index_of(view.element(g))]].clone())
        .collect();

    let u_full = Cochain::from_fn(space, 2, |t| {
        let (g, gp) = (t[0], t[1]);
        let ggp = view.mul(g, gp);
        let mut v = m.add(c.get(&[g, gp]), b.get(&[ggp]));
        v = m.sub(&v, &space.act(g, b.get(&[gp])));
        v = m.sub(&v, b.get(&[g]));
        v = m.add(&v, &eta[ggp]);
        v = m.sub(&v, &space.act(g, &eta[gp]));
        m.sub(&v, &eta[g])
    });
    for g in 0..view.order() {
        for gp in 0..view.order() {
            let val = u_full.get(&[g, gp]);
            for &hh in &h_in_g {
                if u_full.get(&[view.mul(g, hh), gp]) != val
                    || u_full.get(&[g, view.mul(gp, hh)]) != val
                    || space.act(hh, val) != val
                {
                    return Err(CohomologyError::Internal(
                        "inverted cocycle does not descend".into(),
                    ));
                }
            }
        }
    }

    let q = quotient(&ambient, h)?;
    let fixed = fixed_module(space, h, &q)?;
    let qview = GroupView::full(&q.quotient, DEFAULT_ENUMERATION_BOUND)?;
    let qspace = CochainSpace::new(qview.clone(), fixed.module.clone())?;
    let lifts: Vec<usize> = qview
        .elements()
        .iter()
        .map(|x| view.index_of(&q.lift(&ambient, x)).expect("lift"))
        .collect();
    let u = Cochain::from_fn(&qspace, 2, |t| {
        fixed.coordinates(u_full.get(&[lifts[t[0]], lifts[t[1]]]))
    });
    Ok(InfResResult {
        quotient: q,
        fixed,
        u,
        b,
        eta,
    })
}

/// `Inf u` as a cochain over the full group valued in `A`.
pub fn inflate(space: &Arc<CochainSpace>, res: &InfResResult) -> Cochain {
    let view = space.view();
    let qv = res.u.space().view().clone();
    let proj: Vec<usize> = view
        .elements()
        .iter()
        .map(|g| qv.index_of(&res.quotient.project(g)).expect("projection"))
        .collect();
    Cochain::from_fn(space, 2, |t| {
        res.fixed.embed(res.u.get(&[proj[t[0]], proj[t[1]]]))
    })
}
