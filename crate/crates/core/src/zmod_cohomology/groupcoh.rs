use std::sync::Arc;

use crate::linalg::{IntMatrix, Smith};

use super::cochain::{Cochain, CochainSpace};
use super::{CohomologyError, Result, DEFAULT_MAX_GROUP_ORDER};

/// `H^k(G, A)` as invariant factors (ascending, `0` for a copy of `Z`) with one
/// representative cocycle per factor.
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub orders: Vec<u64>,
    pub representatives: Vec<Cochain>,
}

impl CohomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }
}

fn check_size(space: &CochainSpace) -> Result<()> {
    if space.order() > DEFAULT_MAX_GROUP_ORDER {
        return Err(CohomologyError::TooLarge(format!(
            "group of order {} exceeds the brute-force bound {DEFAULT_MAX_GROUP_ORDER}",
            space.order()
        )));
    }
    Ok(())
}

/// `H^k` for `k <= 2` from the Smith forms of the coboundary matrices.
///
/// Finite modules are handled over `Z/E` with `E = lcm(d_j)`: the kernel of the
/// scaled `d_k` lifts `Z^k`, and `B^k` lifts to `im d_{k-1} + ⊕ d_j Z`.
pub fn cohomology(space: &Arc<CochainSpace>, degree: usize) -> Result<CohomologyGroup> {
    check_size(space)?;
    if degree > 2 {
        return Err(CohomologyError::Unsupported(format!("degree {degree}")));
    }
    let e = space.module().modulus()?;
    let r = space.module().rank();
    let m = space.cells(degree) * r;
    let dk = space.coboundary_matrix(degree, true)?;
    let sk = Smith::compute(dk, e)?;
    let rank = sk.rank();

    let mut gens: Vec<Vec<i128>> = Vec::new();
    if degree > 0 {
        let prev = space.coboundary_matrix(degree - 1, false)?;
        for j in 0..prev.cols() {
            gens.push(prev.column(j));
        }
    }
    if e > 0 {
        for cell in 0..space.cells(degree) {
            for (i, &d) in space.module().factors().iter().enumerate() {
                if (d as i128) < e {
                    let mut v = vec![0i128; m];
                    v[cell * r + i] = d as i128;
                    gens.push(v);
                }
            }
        }
    }

    let mut orders = Vec::new();
    let mut reps = Vec::new();
    if e > 0 {
        let g: Vec<i128> = (0..m)
            .map(|t| if t < rank { sk.diag()[t] } else { e })
            .collect();
        let keep: Vec<usize> = (0..m).filter(|&t| g[t] > 1).collect();
        let mq = keep.len();
        let mut q = IntMatrix::zeros(mq, gens.len() + mq);
        for (col, b) in gens.iter().enumerate() {
            let y = sk.v_inv().mul_vec(b, e)?;
            for (row, &t) in keep.iter().enumerate() {
                let step = e / g[t];
                debug_assert_eq!(y[t] % step, 0, "coboundary outside the cocycle lattice");
                q.set(row, col, (y[t] / step).rem_euclid(g[t]));
            }
        }
        for (row, &t) in keep.iter().enumerate() {
            q.set(row, gens.len() + row, g[t]);
        }
        let sq = Smith::compute(q, e)?;
        for t in 0..mq {
            let o = if t < sq.rank() { sq.diag()[t] } else { e };
            if o == 1 {
                continue;
            }
            let z = sq.u_inv_column(t)?;
            let mut y = vec![0i128; m];
            for (row, &tt) in keep.iter().enumerate() {
                y[tt] = (z[row] * (e / g[tt])).rem_euclid(e);
            }
            let x = sk.v().mul_vec(&y, e)?;
            orders.push(o as u64);
            reps.push(Cochain::from_flat(space, degree, &x));
        }
    } else {
        let free: Vec<usize> = (rank..m).collect();
        let mut q = IntMatrix::zeros(free.len(), gens.len());
        for (col, b) in gens.iter().enumerate() {
            let y = sk.v_inv().mul_vec(b, 0)?;
            for (row, &t) in free.iter().enumerate() {
                q.set(row, col, y[t]);
            }
        }
        let sq = Smith::compute(q, 0)?;
        for t in 0..free.len() {
            let o = if t < sq.rank() { sq.diag()[t] } else { 0 };
            if o == 1 {
                continue;
            }
            let z = sq.u_inv_column(t)?;
            let mut y = vec![0i128; m];
            for (row, &tt) in free.iter().enumerate() {
                y[tt] = z[row];
            }
            let x = sk.v().mul_vec(&y, 0)?;
            orders.push(o as u64);
            reps.push(Cochain::from_flat(space, degree, &x));
        }
        // Free summands last so the torsion part stays in divisibility order.
        let mut pairs: Vec<(u64, Cochain)> = orders.drain(..).zip(reps.drain(..)).collect();
        pairs.sort_by_key(|(o, _)| if *o == 0 { u64::MAX } else { *o });
        for (o, c) in pairs {
            orders.push(o);
            reps.push(c);
        }
    }
    Ok(CohomologyGroup {
        degree,
        orders,
        representatives: reps,
    })
}

pub fn h1_bruteforce(space: &Arc<CochainSpace>) -> Result<CohomologyGroup> {
    cohomology(space, 1)
}

pub fn h2_bruteforce(space: &Arc<CochainSpace>) -> Result<CohomologyGroup> {
    cohomology(space, 2)
}

/// A canonical `b` with `db = c`, or `None` when `c` is not a coboundary.
pub fn solve_coboundary(c: &Cochain) -> Result<Option<Cochain>> {
    let space = c.space();
    check_size(space)?;
    if c.degree() == 0 {
        return Ok(c.is_zero().then(|| Cochain::zero(space, 0)));
    }
    let e = space.module().modulus()?;
    let d = space.coboundary_matrix(c.degree() - 1, true)?;
    let smith = Smith::compute(d, e)?;
    let factors = space.module().factors();
    let r = factors.len();
    let rhs: Vec<i128> = c
        .flat()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            if e > 0 {
                x * (e / factors[k % r] as i128)
            } else {
                x
            }
        })
        .collect();
    Ok(smith
        .solve(&rhs)?
        .map(|x| Cochain::from_flat(space, c.degree() - 1, &x)))
}

/// `sum_{g in <s>} c(g, s)` for a 2-cochain `c` and the element with local index `s`.
pub fn cup_h2_hminus2(c: &Cochain, s: usize) -> Result<Vec<i64>> {
    if c.degree() != 2 {
        return Err(CohomologyError::Mismatch(
            "cup product expects a 2-cochain".into(),
        ));
    }
    let space = c.space();
    let m = space.module();
    Ok(space
        .view()
        .powers(s)
        .into_iter()
        .fold(m.zero(), |acc, g| m.add(&acc, c.get(&[g, s]))))
}
