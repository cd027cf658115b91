//! Smith normal form over `Z` (checked `i128`) and over `Z/E`.
//!
//! `U A V = S` with `S` diagonal. `V` and `V^{-1}` are stored densely; `U` is
//! kept as a log of row operations so it can be applied to right-hand sides
//! without materialising a `rows x rows` matrix.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("integer overflow during exact elimination")]
    Overflow,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `self * x`, reduced modulo `modulus` when it is nonzero.
    pub fn mul_vec(&self, x: &[i128], modulus: i128) -> Result<Vec<i128>> {
        if x.len() != self.cols {
            return Err(LinalgError::Dimension {
                expected: self.cols,
                got: x.len(),
            });
        }
        let ring = Ring(modulus);
        let mut out = vec![0i128; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0i128;
            for (j, &xj) in x.iter().enumerate() {
                let a = self.get(i, j);
                if a != 0 && xj != 0 {
                    acc = ring.add(acc, ring.mul(a, xj)?)?;
                }
            }
            *o = acc;
        }
        Ok(out)
    }
}

/// Arithmetic in `Z` (modulus 0, checked) or `Z/m`.
#[derive(Debug, Clone, Copy)]
struct Ring(i128);

impl Ring {
    #[inline]
    fn norm(self, x: i128) -> i128 {
        if self.0 == 0 {
            x
        } else {
            x.rem_euclid(self.0)
        }
    }

    #[inline]
    fn mul(self, a: i128, b: i128) -> Result<i128> {
        if self.0 == 0 {
            a.checked_mul(b).ok_or(LinalgError::Overflow)
        } else {
            Ok((a * b).rem_euclid(self.0))
        }
    }

    #[inline]
    fn add(self, a: i128, b: i128) -> Result<i128> {
        if self.0 == 0 {
            a.checked_add(b).ok_or(LinalgError::Overflow)
        } else {
            Ok((a + b).rem_euclid(self.0))
        }
    }

    #[inline]
    fn lin(self, a: i128, x: i128, b: i128, y: i128) -> Result<i128> {
        let l = self.mul(a, x)?;
        let r = self.mul(b, y)?;
        self.add(l, r)
    }

    /// Size used for pivot choice: `|x|` over `Z`, `gcd(x, m)` over `Z/m`.
    fn size(self, x: i128) -> i128 {
        if self.0 == 0 {
            x.abs()
        } else {
            gcd(x, self.0)
        }
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        0
    } else {
        (a / gcd(a, b) * b).abs()
    }
}

/// Returns `(g, s, t)` with `s a + t b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (g, s, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| s.rem_euclid(m))
}

/// A unit `w` of `Z/m` with `x w = gcd(x, m)` modulo `m`.
fn normalizing_unit(x: i128, m: i128) -> i128 {
    let g = gcd(x, m);
    let mp = m / g;
    let base = if mp == 1 {
        1
    } else {
        mod_inverse((x / g).rem_euclid(mp), mp).expect("coprime")
    };
    let mut w = base;
    while gcd(w, m) != 1 {
        w += mp;
    }
    w.rem_euclid(m)
}

/// A recorded elementary row transformation on rows `(i, j)`:
/// `row_i <- a row_i + b row_j`, `row_j <- c row_i + d row_j`, `ad - bc = 1`.
#[derive(Debug, Clone, Copy)]
enum RowOp {
    Swap(usize, usize),
    Mix {
        i: usize,
        j: usize,
        a: i128,
        b: i128,
        c: i128,
        d: i128,
    },
}

#[derive(Debug, Clone)]
pub struct Smith {
    modulus: i128,
    rows: usize,
    cols: usize,
    /// Normalised pivots: positive over `Z`, proper divisors of `E` over `Z/E`.
    diag: Vec<i128>,
    v: IntMatrix,
    v_inv: IntMatrix,
    log: Vec<RowOp>,
}

impl Smith {
    /// Reduces `a` over `Z/modulus` (`modulus == 0` means exact over `Z`).
    pub fn compute(mut a: IntMatrix, modulus: i128) -> Result<Self> {
        let ring = Ring(modulus);
        for x in a.data.iter_mut() {
            *x = ring.norm(*x);
        }
        let (rows, cols) = (a.rows, a.cols);
        let mut s = Smith {
            modulus,
            rows,
            cols,
            diag: Vec::new(),
            v: IntMatrix::identity(cols),
            v_inv: IntMatrix::identity(cols),
            log: Vec::new(),
        };
        let mut t = 0;
        while t < rows.min(cols) {
            let mut best: Option<(i128, usize, usize)> = None;
            'scan: for i in t..rows {
                for j in t..cols {
                    let x = a.get(i, j);
                    if x != 0 {
                        let sz = ring.size(x);
                        if best.is_none_or(|(b, _, _)| sz < b) {
                            best = Some((sz, i, j));
                            if sz == 1 {
                                break 'scan;
                            }
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else { break };
            if pi != t {
                s.row_swap(&mut a, t, pi);
            }
            if pj != t {
                s.col_swap(&mut a, t, pj);
            }
            loop {
                let mut dirty = false;
                for i in t + 1..rows {
                    if a.get(i, t) != 0 {
                        s.clear_row_entry(&mut a, t, i)?;
                    }
                }
                for j in t + 1..cols {
                    if a.get(t, j) != 0 {
                        s.clear_col_entry(&mut a, t, j)?;
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                s.normalize_pivot(&mut a, t)?;
                let g = a.get(t, t);
                let mut offender = None;
                'div: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if a.get(i, j) % g != 0 {
                            offender = Some(i);
                            break 'div;
                        }
                    }
                }
                match offender {
                    Some(i) => s.apply_row_op(
                        &mut a,
                        RowOp::Mix {
                            i: t,
                            j: i,
                            a: 1,
                            b: 1,
                            c: 0,
                            d: 1,
                        },
                        t,
                    )?,
                    None => break,
                }
            }
            s.diag.push(a.get(t, t));
            t += 1;
        }
        Ok(s)
    }

    fn row_swap(&mut self, a: &mut IntMatrix, i: usize, j: usize) {
        for k in 0..a.cols {
            a.data.swap(i * a.cols + k, j * a.cols + k);
        }
        self.log.push(RowOp::Swap(i, j));
    }

    fn col_swap(&mut self, a: &mut IntMatrix, i: usize, j: usize) {
        for r in 0..a.rows {
            a.data.swap(r * a.cols + i, r * a.cols + j);
        }
        for r in 0..self.cols {
            self.v.data.swap(r * self.cols + i, r * self.cols + j);
        }
        for k in 0..self.cols {
            self.v_inv.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn apply_row_op(&mut self, a: &mut IntMatrix, op: RowOp, from_col: usize) -> Result<()> {
        let ring = Ring(self.modulus);
        match op {
            RowOp::Swap(i, j) => self.row_swap(a, i, j),
            RowOp::Mix {
                i,
                j,
                a: ca,
                b: cb,
                c: cc,
                d: cd,
            } => {
                for k in from_col..a.cols {
                    let (x, y) = (a.get(i, k), a.get(j, k));
                    if x == 0 && y == 0 {
                        continue;
                    }
                    a.set(i, k, ring.lin(ca, x, cb, y)?);
                    a.set(j, k, ring.lin(cc, x, cd, y)?);
                }
                self.log.push(op);
            }
        }
        Ok(())
    }

    /// Column op on `(i, j)`: `col_i <- a col_i + b col_j`, `col_j <- c col_i + d col_j`.
    fn apply_col_op(
        &mut self,
        m: &mut IntMatrix,
        i: usize,
        j: usize,
        c4: [i128; 4],
        from_row: usize,
    ) -> Result<()> {
        let ring = Ring(self.modulus);
        let [ca, cb, cc, cd] = c4;
        for r in from_row..m.rows {
            let (x, y) = (m.get(r, i), m.get(r, j));
            if x == 0 && y == 0 {
                continue;
            }
            m.set(r, i, ring.lin(ca, x, cb, y)?);
            m.set(r, j, ring.lin(cc, x, cd, y)?);
        }
        let n = self.cols;
        for r in 0..n {
            let (x, y) = (self.v.get(r, i), self.v.get(r, j));
            if x == 0 && y == 0 {
                continue;
            }
            self.v.set(r, i, ring.lin(ca, x, cb, y)?);
            self.v.set(r, j, ring.lin(cc, x, cd, y)?);
        }
        for k in 0..n {
            let (x, y) = (self.v_inv.get(i, k), self.v_inv.get(j, k));
            if x == 0 && y == 0 {
                continue;
            }
            self.v_inv.set(i, k, ring.lin(cd, x, -cc, y)?);
            self.v_inv.set(j, k, ring.lin(-cb, x, ca, y)?);
        }
        Ok(())
    }

    fn clear_row_entry(&mut self, a: &mut IntMatrix, t: usize, i: usize) -> Result<()> {
        let ring = Ring(self.modulus);
        let (x, y) = (a.get(t, t), a.get(i, t));
        let op = if y % x == 0 {
            RowOp::Mix {
                i: t,
                j: i,
                a: 1,
                b: 0,
                c: ring.norm(-(y / x)),
                d: 1,
            }
        } else {
            let (g, s, r) = ext_gcd(x, y);
            RowOp::Mix {
                i: t,
                j: i,
                a: s,
                b: r,
                c: -(y / g),
                d: x / g,
            }
        };
        self.apply_row_op(a, op, t)
    }

    fn clear_col_entry(&mut self, a: &mut IntMatrix, t: usize, j: usize) -> Result<()> {
        let ring = Ring(self.modulus);
        let (x, y) = (a.get(t, t), a.get(t, j));
        let c4 = if y % x == 0 {
            [1, 0, ring.norm(-(y / x)), 1]
        } else {
            let (g, s, r) = ext_gcd(x, y);
            [s, r, -(y / g), x / g]
        };
        self.apply_col_op(a, t, j, c4, t)
    }

    /// Scales column `t` by a unit so the pivot becomes `|x|` or `gcd(x, E)`.
    fn normalize_pivot(&mut self, a: &mut IntMatrix, t: usize) -> Result<()> {
        let x = a.get(t, t);
        let w = if self.modulus == 0 {
            if x < 0 {
                -1
            } else {
                return Ok(());
            }
        } else {
            let w = normalizing_unit(x, self.modulus);
            if w == 1 {
                return Ok(());
            }
            w
        };
        let ring = Ring(self.modulus);
        let w_inv = if self.modulus == 0 {
            -1
        } else {
            mod_inverse(w, self.modulus).expect("unit")
        };
        for r in t..a.rows {
            let v = a.get(r, t);
            a.set(r, t, ring.mul(v, w)?);
        }
        for r in 0..self.cols {
            let v = self.v.get(r, t);
            self.v.set(r, t, ring.mul(v, w)?);
        }
        for k in 0..self.cols {
            let v = self.v_inv.get(t, k);
            self.v_inv.set(t, k, ring.mul(v, w_inv)?);
        }
        Ok(())
    }

    pub fn modulus(&self) -> i128 {
        self.modulus
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn diag(&self) -> &[i128] {
        &self.diag
    }

    pub fn v(&self) -> &IntMatrix {
        &self.v
    }

    pub fn v_inv(&self) -> &IntMatrix {
        &self.v_inv
    }

    /// Replaces `b` by `U b`.
    pub fn apply_u(&self, b: &mut [i128]) -> Result<()> {
        let ring = Ring(self.modulus);
        for x in b.iter_mut() {
            *x = ring.norm(*x);
        }
        for op in &self.log {
            match *op {
                RowOp::Swap(i, j) => b.swap(i, j),
                RowOp::Mix {
                    i,
                    j,
                    a,
                    b: cb,
                    c,
                    d,
                } => {
                    let (x, y) = (b[i], b[j]);
                    b[i] = ring.lin(a, x, cb, y)?;
                    b[j] = ring.lin(c, x, d, y)?;
                }
            }
        }
        Ok(())
    }

    /// Replaces `b` by `U^{-1} b`.
    pub fn apply_u_inv(&self, b: &mut [i128]) -> Result<()> {
        let ring = Ring(self.modulus);
        for op in self.log.iter().rev() {
            match *op {
                RowOp::Swap(i, j) => b.swap(i, j),
                RowOp::Mix {
                    i,
                    j,
                    a,
                    b: cb,
                    c,
                    d,
                } => {
                    let (x, y) = (b[i], b[j]);
                    b[i] = ring.lin(d, x, -cb, y)?;
                    b[j] = ring.lin(-c, x, a, y)?;
                }
            }
        }
        Ok(())
    }

    /// Column `t` of `U^{-1}`.
    pub fn u_inv_column(&self, t: usize) -> Result<Vec<i128>> {
        let mut e = vec![0i128; self.rows];
        e[t] = 1;
        self.apply_u_inv(&mut e)?;
        Ok(e)
    }

    /// Generators of `ker A`. Over `Z/E` these are `(E/g_t) V e_t` for pivots and
    /// `V e_t` past the rank; over `Z` only the latter.
    pub fn kernel_generators(&self) -> Vec<Vec<i128>> {
        let mut out = Vec::new();
        for t in 0..self.cols {
            let col = self.v.column(t);
            if t < self.rank() {
                if self.modulus == 0 {
                    continue;
                }
                let scale = self.modulus / self.diag[t];
                out.push(
                    col.iter()
                        .map(|&x| (x * scale).rem_euclid(self.modulus))
                        .collect(),
                );
            } else {
                out.push(col);
            }
        }
        out
    }

    /// Canonical solution of `A x = b` (free parameters zero), or `None`.
    pub fn solve(&self, b: &[i128]) -> Result<Option<Vec<i128>>> {
        if b.len() != self.rows {
            return Err(LinalgError::Dimension {
                expected: self.rows,
                got: b.len(),
            });
        }
        let mut c = b.to_vec();
        self.apply_u(&mut c)?;
        let mut y = vec![0i128; self.cols];
        for (t, &ct) in c.iter().enumerate() {
            if t < self.rank() {
                let g = self.diag[t];
                if ct % g != 0 {
                    return Ok(None);
                }
                y[t] = ct / g;
            } else if ct != 0 {
                return Ok(None);
            }
        }
        self.v.mul_vec(&y, self.modulus).map(Some)
    }
}
