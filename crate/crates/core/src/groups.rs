//! Finite abelian groups presented as products of cyclic groups.
//!
//! Elements are exponent vectors `0 <= a_i < n_i`. Enumeration order is
//! lexicographic with the first coordinate most significant, which is also the
//! order of [`AbelianPresentation::index_of`].

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::{IntMatrix, Smith};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("element {element} does not fit presentation {presentation}")]
    ShapeMismatch {
        element: String,
        presentation: String,
    },
    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    TooLarge { order: u128, bound: u64 },
    #[error("cannot parse {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GroupError>;

/// Exponent vector with respect to some presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn exponents(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for GroupElement {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(GroupElement(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| GroupError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(GroupElement)
    }
}

/// `Z/n_1 x ... x Z/n_r` with optional generator labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianPresentation {
    orders: Vec<u64>,
    labels: Vec<String>,
}

impl AbelianPresentation {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        let labels = (0..orders.len()).map(|i| format!("g{i}")).collect();
        Self::with_labels(orders, labels)
    }

    pub fn with_labels(orders: Vec<u64>, labels: Vec<String>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(GroupError::InvalidPresentation(format!(
                "zero order in {orders:?}"
            )));
        }
        if labels.len() != orders.len() {
            return Err(GroupError::InvalidPresentation(
                "label count differs from rank".into(),
            ));
        }
        let p = AbelianPresentation { orders, labels };
        p.order_checked()?;
        Ok(p)
    }

    /// The trivial group with no generators.
    pub fn trivial() -> Self {
        AbelianPresentation {
            orders: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn order_checked(&self) -> Result<u128> {
        self.orders
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .ok_or_else(|| GroupError::InvalidPresentation("order overflows".into()))
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&n| n as u128).product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut v = vec![0; self.rank()];
        if self.orders[i] > 1 {
            v[i] = 1;
        }
        GroupElement(v)
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.0.len() != self.rank() || g.0.iter().zip(&self.orders).any(|(a, n)| a >= n) {
            return Err(GroupError::ShapeMismatch {
                element: g.to_string(),
                presentation: self.to_string(),
            });
        }
        Ok(())
    }

    /// Reduces an arbitrary integer vector into canonical exponents.
    pub fn reduce(&self, v: &[i128]) -> GroupElement {
        GroupElement(
            v.iter()
                .zip(&self.orders)
                .map(|(&a, &n)| a.rem_euclid(n as i128) as u64)
                .collect(),
        )
    }

    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.orders)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.orders)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        )
    }

    pub fn power(&self, a: &GroupElement, k: i64) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.orders)
                .map(|(&x, &n)| ((x as i128 * k as i128).rem_euclid(n as i128)) as u64)
                .collect(),
        )
    }

    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.0.iter().zip(&self.orders).fold(1u64, |acc, (&x, &n)| {
            let o = n / gcd_u64(x, n);
            acc / gcd_u64(acc, o) * o
        })
    }

    /// Position in lexicographic enumeration.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.0.iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut v = vec![0u64; self.rank()];
        for i in (0..self.rank()).rev() {
            let n = self.orders[i] as usize;
            v[i] = (idx % n) as u64;
            idx /= n;
        }
        GroupElement(v)
    }

    pub fn enumerate(&self, bound: u64) -> Result<Vec<GroupElement>> {
        let order = self.order();
        if order > bound as u128 {
            return Err(GroupError::TooLarge { order, bound });
        }
        Ok((0..order as usize).map(|i| self.element_at(i)).collect())
    }
}

impl fmt::Display for AbelianPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.orders.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for AbelianPresentation {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self> {
        let orders = s
            .trim()
            .split(['x', 'X', '*'])
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| GroupError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        AbelianPresentation::new(orders)
    }
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Subgroup given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub generators: Vec<GroupElement>,
}

/// Elements of `<generators>`, sorted lexicographically.
pub fn subgroup_elements(g: &AbelianPresentation, h: &SubgroupSpec) -> Result<Vec<GroupElement>> {
    for x in &h.generators {
        g.check(x)?;
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([g.identity()]);
    seen.insert(g.identity());
    while let Some(x) = queue.pop_front() {
        for s in &h.generators {
            let y = g.compose(&x, s);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// `<g>` as the list `g^0, ..., g^{d-1}`.
pub fn cyclic_powers(g: &AbelianPresentation, x: &GroupElement) -> Vec<GroupElement> {
    let d = g.element_order(x);
    (0..d as i64).map(|k| g.power(x, k)).collect()
}

/// Cosets of `H` in `G`; each representative is the least member of its coset.
#[derive(Debug, Clone)]
pub struct Cosets {
    pub representatives: Vec<GroupElement>,
    /// Coset number of every element of `G`, indexed by `index_of`.
    pub coset_of: Vec<usize>,
}

pub fn coset_representatives(
    g: &AbelianPresentation,
    h: &SubgroupSpec,
    bound: u64,
) -> Result<Cosets> {
    let elems = g.enumerate(bound)?;
    let sub = subgroup_elements(g, h)?;
    let mut coset_of = vec![usize::MAX; elems.len()];
    let mut reps = Vec::new();
    for x in &elems {
        let ix = g.index_of(x);
        if coset_of[ix] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x.clone());
        for y in &sub {
            coset_of[g.index_of(&g.compose(x, y))] = c;
        }
    }
    Ok(Cosets {
        representatives: reps,
        coset_of,
    })
}

/// `G/H` with its own cyclic presentation.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub quotient: AbelianPresentation,
    /// Rows map exponent vectors of `G` to quotient coordinates.
    projection: Vec<Vec<i128>>,
    /// A preimage in `G` of each quotient generator.
    pub lifts: Vec<GroupElement>,
}

impl QuotientMap {
    pub fn project(&self, x: &GroupElement) -> GroupElement {
        let v: Vec<i128> = self
            .projection
            .iter()
            .map(|row| row.iter().zip(&x.0).map(|(&a, &b)| a * b as i128).sum())
            .collect();
        self.quotient.reduce(&v)
    }

    pub fn lift(&self, g: &AbelianPresentation, q: &GroupElement) -> GroupElement {
        q.0.iter()
            .zip(&self.lifts)
            .fold(g.identity(), |acc, (&k, l)| {
                g.compose(&acc, &g.power(l, k as i64))
            })
    }
}

/// Presentation of `G/H` via the Smith form of `[diag(n) | H]`.
pub fn quotient(g: &AbelianPresentation, h: &SubgroupSpec) -> Result<QuotientMap> {
    for x in &h.generators {
        g.check(x)?;
    }
    let r = g.rank();
    let cols = r + h.generators.len();
    let mut m = IntMatrix::zeros(r, cols);
    for (i, &n) in g.orders().iter().enumerate() {
        m.set(i, i, n as i128);
    }
    for (j, x) in h.generators.iter().enumerate() {
        for i in 0..r {
            m.set(i, r + j, x.0[i] as i128);
        }
    }
    let smith = Smith::compute(m, 0).map_err(|e| GroupError::InvalidPresentation(e.to_string()))?;
    let mut orders = Vec::new();
    let mut projection = Vec::new();
    let mut lifts = Vec::new();
    for t in 0..r {
        let s = smith.diag()[t];
        if s == 1 {
            continue;
        }
        // row t of U, assembled column by column from the recorded row operations
        let row: Vec<i128> = (0..r)
            .map(|j| {
                let mut col = vec![0i128; r];
                col[j] = 1;
                smith.apply_u(&mut col).expect("exact");
                col[t]
            })
            .collect();
        let lift = smith
            .u_inv_column(t)
            .map_err(|e| GroupError::InvalidPresentation(e.to_string()))?;
        orders.push(s as u64);
        projection.push(row);
        lifts.push(g.reduce(&lift));
    }
    let labels = (0..orders.len()).map(|i| format!("q{i}")).collect();
    Ok(QuotientMap {
        quotient: AbelianPresentation::with_labels(orders, labels)?,
        projection,
        lifts,
    })
}
