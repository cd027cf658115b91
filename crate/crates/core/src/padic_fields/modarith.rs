//! Arithmetic modulo `m < 2^120` on `u128` with 256-bit intermediates.

use ethnum::U256;

/// Largest supported modulus (exclusive). Leaves room to accumulate up to
/// `2^16` products of reduced values before a single reduction.
pub const MODULUS_LIMIT: u128 = 1 << 120;

#[inline]
pub fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a as u64 as u128, a >> 64);
    let (b0, b1) = (b as u64 as u128, b >> 64);
    let ll = a0 * b0;
    let lh = a0 * b1;
    let hl = a1 * b0;
    let hh = a1 * b1;
    let (mid, mc) = lh.overflowing_add(hl);
    let (lo, c1) = ll.overflowing_add(mid << 64);
    let hi = hh + (mid >> 64) + ((mc as u128) << 64) + c1 as u128;
    (hi, lo)
}

/// Sum of products kept as an unreduced 256-bit value.
#[derive(Debug, Clone, Copy, Default)]
pub struct Acc {
    hi: u128,
    lo: u128,
}

impl Acc {
    #[inline]
    pub fn add_prod(&mut self, a: u128, b: u128) {
        let (h, l) = mul_wide(a, b);
        let (lo, c) = self.lo.overflowing_add(l);
        self.lo = lo;
        self.hi += h + c as u128;
    }

    #[inline]
    pub fn add(&mut self, a: u128) {
        let (lo, c) = self.lo.overflowing_add(a);
        self.lo = lo;
        self.hi += c as u128;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModRing {
    m: u128,
}

impl ModRing {
    pub fn new(m: u128) -> Self {
        assert!(m > 0 && m < MODULUS_LIMIT, "modulus out of range");
        ModRing { m }
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.m
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn reduce_acc(&self, acc: Acc) -> u128 {
        if acc.hi == 0 {
            acc.lo % self.m
        } else {
            (U256::from_words(acc.hi, acc.lo) % U256::from(self.m)).as_u128()
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        if (a | b) >> 64 == 0 {
            return (a * b) % self.m;
        }
        let mut acc = Acc::default();
        acc.add_prod(a, b);
        self.reduce_acc(acc)
    }

    pub fn pow(&self, a: u128, mut e: u128) -> u128 {
        let mut base = a % self.m;
        let mut r = 1 % self.m;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// Reduces a signed integer.
    pub fn from_i128(&self, x: i128) -> u128 {
        if x >= 0 {
            x as u128 % self.m
        } else {
            self.neg((x.unsigned_abs()) % self.m)
        }
    }

    /// Symmetric representative in `(-m/2, m/2]`.
    pub fn signed(&self, x: u128) -> i128 {
        if x > self.m / 2 {
            -((self.m - x) as i128)
        } else {
            x as i128
        }
    }
}

/// `p`-adic valuation of `x` viewed modulo `p^cap`, capped at `cap`.
pub fn vp(x: u128, p: u128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    let mut y = x;
    while v < cap && y.is_multiple_of(p) {
        y /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn wide_product_matches_u256(a in any::<u128>(), b in any::<u128>()) {
            let (hi, lo) = mul_wide(a, b);
            let want = U256::from(a) * U256::from(b);
            prop_assert_eq!(U256::from_words(hi, lo), want);
        }

        #[test]
        fn mul_matches_reference(a in 0u128..(1u128 << 119), b in 0u128..(1u128 << 119), m in 2u128..(1u128 << 119)) {
            let r = ModRing::new(m);
            let want = ((U256::from(a % m) * U256::from(b % m)) % U256::from(m)).as_u128();
            prop_assert_eq!(r.mul(a % m, b % m), want);
        }
    }

    #[test]
    fn valuation_and_pow() {
        let r = ModRing::new(5u128.pow(40));
        assert_eq!(r.pow(2, 4), 16);
        assert_eq!(vp(250, 5, 10), 3);
        assert_eq!(vp(0, 5, 10), 10);
        assert_eq!(r.signed(r.from_i128(-7)), -7);
    }
}
