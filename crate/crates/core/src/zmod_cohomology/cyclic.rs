//! The standard cocycles of a cyclic group with trivial `Z` coefficients.

use std::sync::Arc;

use crate::groups::{gcd_u64, AbelianPresentation};
use crate::linalg::mod_inverse;

use super::cochain::{Cochain, CochainSpace};
use super::groupcoh::{cup_h2_hminus2, solve_coboundary};
use super::module::{FiniteGModule, GroupView};
use super::{CohomologyError, Result};

/// `C_n` acting trivially on `Z`.
pub fn cyclic_integral_space(n: u64) -> Result<Arc<CochainSpace>> {
    let g = AbelianPresentation::new(vec![n])?;
    let m = FiniteGModule::trivial(&g, vec![0])?;
    CochainSpace::new(GroupView::full(&g, n)?, Arc::new(m))
}

/// `chi_k(s^a, s^b) = floor((i + j)/n)` where `s^a = (s^k)^i`, `s^b = (s^k)^j`.
pub fn chi(space: &Arc<CochainSpace>, k: u64) -> Result<Cochain> {
    let n = space.order() as u64;
    if gcd_u64(k % n.max(1), n) != 1 && n > 1 {
        return Err(CohomologyError::NotCoprime { k, n });
    }
    let kinv = if n == 1 {
        0
    } else {
        mod_inverse(k as i128, n as i128).expect("coprime") as u64
    };
    let view = space.view().clone();
    Ok(Cochain::from_fn(space, 2, |t| {
        let a = view.element(t[0]).0[0];
        let b = view.element(t[1]).0[0];
        let i = a * kinv % n;
        let j = b * kinv % n;
        vec![((i + j) / n) as i64]
    }))
}

#[derive(Debug, Clone)]
pub struct GenChange {
    pub n: u64,
    pub k: u64,
    /// `b` with `db = chi_1 - k chi_k`.
    pub witness: Cochain,
    /// `chi_1 ∪ s^k`, which equals `k`.
    pub cup_chi: i64,
    /// `chi_k ∪ s^k`, which equals `1`.
    pub cup_chi_k: i64,
}

/// Shows `chi_1` and `k chi_k` are cohomologous on `C_n` by producing a witness.
pub fn genchange(n: u64, k: u64) -> Result<GenChange> {
    if n == 0 {
        return Err(CohomologyError::Mismatch("cyclic group of order 0".into()));
    }
    if gcd_u64(k % n, n) != 1 && n > 1 {
        return Err(CohomologyError::NotCoprime { k, n });
    }
    let space = cyclic_integral_space(n)?;
    let c1 = chi(&space, 1)?;
    let ck = chi(&space, k)?;
    let diff = c1.sub(&ck.scale(k as i64))?;
    let witness = solve_coboundary(&diff)?.ok_or_else(|| {
        CohomologyError::Internal(format!("chi - {k} chi_{k} is not a coboundary on C_{n}"))
    })?;
    let sk = (k % n) as usize;
    let cup_chi = cup_h2_hminus2(&c1, sk)?[0];
    let cup_chi_k = cup_h2_hminus2(&ck, sk)?[0];
    Ok(GenChange {
        n,
        k,
        witness,
        cup_chi,
        cup_chi_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_is_cocycle_and_cup_counts_wraps() {
        let sp = cyclic_integral_space(5).unwrap();
        let c = chi(&sp, 1).unwrap();
        assert!(c.is_cocycle());
        assert_eq!(cup_h2_hminus2(&c, 1).unwrap(), vec![1]);
        assert_eq!(cup_h2_hminus2(&c, 3).unwrap(), vec![3]);
    }

    #[test]
    fn genchange_small() {
        let g = genchange(4, 3).unwrap();
        assert_eq!(g.cup_chi, 3);
        assert_eq!(g.cup_chi_k, 1);
        assert!(matches!(
            genchange(6, 2),
            Err(CohomologyError::NotCoprime { .. })
        ));
    }
}
