use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use super::finite_field::{is_prime, DlogTable, GaloisField};
use super::modarith::{Acc, ModRing, MODULUS_LIMIT};
use super::{PadicError, Result};

/// Largest residue field size `p^d` accepted by [`Field::new`].
pub const DEFAULT_MAX_RESIDUE_SIZE: u64 = 1_000_000;

/// Largest ramified degree accepted for the cyclotomic layer.
const MAX_CYCLOTOMIC_DEGREE: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamifiedLayer {
    None,
    /// `ρ^e = teich(unit)·p`; `ζ_e` is drawn from the canonical root of unity of
    /// the unramified subfield of degree `root_degree`.
    Tame {
        e: u64,
        unit: u64,
        root_degree: usize,
    },
    /// `Φ_{p^ν}(ζ) = 0`.
    Cyclotomic {
        nu: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub d: usize,
    pub layer: RamifiedLayer,
    /// Working precision `N`: coefficients live in `Z/p^N`.
    pub prec: u32,
}

impl FieldSpec {
    pub fn unramified(p: u64, d: usize, prec: u32) -> Self {
        FieldSpec {
            p,
            d,
            layer: RamifiedLayer::None,
            prec,
        }
    }

    pub fn tame(p: u64, d: usize, e: u64, prec: u32) -> Self {
        FieldSpec {
            p,
            d,
            layer: RamifiedLayer::Tame {
                e,
                unit: 1,
                root_degree: d,
            },
            prec,
        }
    }

    pub fn cyclotomic(p: u64, d: usize, nu: u32, prec: u32) -> Self {
        FieldSpec {
            p,
            d,
            layer: RamifiedLayer::Cyclotomic { nu },
            prec,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={};d={};", self.p, self.d)?;
        match self.layer {
            RamifiedLayer::None => write!(f, "none")?,
            RamifiedLayer::Tame {
                e,
                unit,
                root_degree,
            } => {
                write!(f, "tame e={e}")?;
                if unit != 1 {
                    write!(f, " u={unit}")?;
                }
                if root_degree != self.d {
                    write!(f, " z={root_degree}")?;
                }
            }
            RamifiedLayer::Cyclotomic { nu } => write!(f, "cyclotomic nu={nu}")?,
        }
        write!(f, ";N={}", self.prec)
    }
}

impl FromStr for FieldSpec {
    type Err = PadicError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || PadicError::InvalidInput(format!("malformed field id {s:?}"));
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let num = |part: &str, key: &str| -> Result<u64> {
            part.strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)
        };
        let p = num(parts[0], "p=")?;
        let d = num(parts[1], "d=")? as usize;
        let prec = num(parts[3], "N=")? as u32;
        let mut words = parts[2].split_whitespace();
        let layer = match words.next() {
            Some("none") => RamifiedLayer::None,
            Some("tame") => {
                let e = num(words.next().ok_or_else(bad)?, "e=")?;
                let (mut unit, mut root_degree) = (1, d);
                for w in words.by_ref() {
                    if let Some(v) = w.strip_prefix("u=") {
                        unit = v.parse().map_err(|_| bad())?;
                    } else if let Some(v) = w.strip_prefix("z=") {
                        root_degree = v.parse().map_err(|_| bad())?;
                    } else {
                        return Err(bad());
                    }
                }
                RamifiedLayer::Tame {
                    e,
                    unit,
                    root_degree,
                }
            }
            Some("cyclotomic") => RamifiedLayer::Cyclotomic {
                nu: num(words.next().ok_or_else(bad)?, "nu=")? as u32,
            },
            _ => return Err(bad()),
        };
        if words.next().is_some() {
            return Err(bad());
        }
        Ok(FieldSpec { p, d, layer, prec })
    }
}

/// An automorphism `ω ↦ ω^{p^frob}` composed with a ramified map: `ρ ↦ ζ_e^ram·ρ`
/// (tame) or `ζ ↦ ζ^ram` (cyclotomic). Without a ramified layer `ram` is `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub frob: u64,
    pub ram: u64,
}

/// Product in `(Z/m)[X]/(g)` with `g` monic of degree `d`.
fn poly_mulmod(ring: &ModRing, g: &[u128], a: &[u128], b: &[u128]) -> Vec<u128> {
    let d = g.len() - 1;
    let mut acc = vec![Acc::default(); 2 * d - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j].add_prod(x, y);
        }
    }
    let mut v: Vec<u128> = acc.into_iter().map(|a| ring.reduce_acc(a)).collect();
    for t in (d..2 * d - 1).rev() {
        let c = v[t];
        if c == 0 {
            continue;
        }
        for k in 0..d {
            v[t - d + k] = ring.sub(v[t - d + k], ring.mul(c, g[k]));
        }
    }
    v.truncate(d);
    v
}

fn poly_powmod(ring: &ModRing, g: &[u128], a: &[u128], mut e: u128) -> Vec<u128> {
    let d = g.len() - 1;
    let mut r = vec![0u128; d];
    r[0] = 1;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            r = poly_mulmod(ring, g, &r, &base);
        }
        base = poly_mulmod(ring, g, &base, &base);
        e >>= 1;
    }
    r
}

/// The generator `X` of `(Z/m)[X]/(g)` in coordinates.
fn generator_coords(ring: &ModRing, g: &[u128]) -> Vec<u128> {
    let d = g.len() - 1;
    if d == 1 {
        vec![ring.neg(g[0])]
    } else {
        let mut v = vec![0u128; d];
        v[1] = 1;
        v
    }
}

#[derive(Debug)]
pub struct Field {
    spec: FieldSpec,
    ring: ModRing,
    ppow: Vec<u128>,
    q: u64,
    /// Minimal polynomial of `ω` over `Z/p^N`, monic, length `d + 1`.
    poly: Vec<u128>,
    /// `ω^{d+t}` in the basis `ω^0..ω^{d-1}`, for `t < d - 1`.
    high: Vec<Vec<u128>>,
    /// `frob[a][k * d + i]` is the `ω^k` coordinate of `σ^a(ω^i)`.
    frob: Vec<Vec<u128>>,
    residue: GaloisField,
    dlog: OnceLock<DlogTable>,
    ram_degree: usize,
    /// Tame: `ζ_e = ω^zeta_exp`, its powers, and `π = ρ^e`.
    zeta_exp: u64,
    zeta_pows: Vec<Vec<u128>>,
    pi: u128,
    /// Cyclotomic: `ζ^k` in the basis `ζ^0..ζ^{φ-1}` for `k < p^ν`.
    cyclo_table: Vec<Vec<i8>>,
    pnu: u64,
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Arc<Field>> {
        let FieldSpec { p, d, layer, prec } = spec.clone();
        let invalid = |m: String| Err(PadicError::InvalidInput(m));
        if !is_prime(p) {
            return invalid(format!("p must be prime, got {p}"));
        }
        if d == 0 || prec == 0 {
            return invalid("degree and precision must be positive".into());
        }
        let q = (p as u128)
            .checked_pow(d as u32)
            .filter(|&q| q <= DEFAULT_MAX_RESIDUE_SIZE as u128)
            .ok_or_else(|| {
                PadicError::TooLarge(format!(
                    "residue field {p}^{d} exceeds {DEFAULT_MAX_RESIDUE_SIZE}"
                ))
            })? as u64;
        let modulus = (p as u128)
            .checked_pow(prec)
            .filter(|&m| m < MODULUS_LIMIT)
            .ok_or_else(|| {
                PadicError::TooLarge(format!("{p}^{prec} exceeds the 120-bit modulus limit"))
            })?;
        let ring = ModRing::new(modulus);
        let ppow: Vec<u128> = (0..=prec).map(|k| (p as u128).pow(k)).collect();

        // Residue field and the minimal polynomial of its canonical generator.
        let canon = GaloisField::canonical(p, d);
        let fbar = canon.min_poly(&canon.canonical_generator());

        // Teichmüller lift of X in (Z/p^N)[X]/(fbar), then its minimal polynomial.
        let boot: Vec<u128> = fbar.iter().map(|&c| c as u128).collect();
        let mut omega = generator_coords(&ring, &boot);
        let mut settled = false;
        for _ in 0..prec + 2 {
            let next = poly_powmod(&ring, &boot, &omega, q as u128);
            if next == omega {
                settled = true;
                break;
            }
            omega = next;
        }
        if !settled {
            return Err(PadicError::Internal(
                "Teichmüller iteration did not settle".into(),
            ));
        }
        let mut poly_b: Vec<Vec<u128>> = vec![{
            let mut one = vec![0u128; d];
            one[0] = 1;
            one
        }];
        let mut conj = omega.clone();
        for _ in 0..d {
            let mut next = vec![vec![0u128; d]; poly_b.len() + 1];
            for (k, c) in poly_b.iter().enumerate() {
                for t in 0..d {
                    next[k + 1][t] = ring.add(next[k + 1][t], c[t]);
                }
                let prod = poly_mulmod(&ring, &boot, c, &conj);
                for t in 0..d {
                    next[k][t] = ring.sub(next[k][t], prod[t]);
                }
            }
            poly_b = next;
            conj = poly_powmod(&ring, &boot, &conj, p as u128);
        }
        let mut poly = Vec::with_capacity(d + 1);
        for c in &poly_b {
            if c[1..].iter().any(|&x| x != 0) {
                return Err(PadicError::Internal(
                    "Teichmüller minimal polynomial is not over Z_p".into(),
                ));
            }
            poly.push(c[0]);
        }
        if poly
            .iter()
            .zip(&fbar)
            .any(|(&a, &b)| a % p as u128 != b as u128)
        {
            return Err(PadicError::Internal(
                "lifted polynomial does not reduce to the residue one".into(),
            ));
        }

        let gen = generator_coords(&ring, &poly);
        let mut high = Vec::new();
        if d > 1 {
            let mut cur = vec![0u128; d];
            cur[d - 1] = 1;
            for _ in 0..d - 1 {
                cur = poly_mulmod(&ring, &poly, &cur, &gen);
                high.push(cur.clone());
            }
        }
        let omega_pow = |k: u64| poly_powmod(&ring, &poly, &gen, k as u128);
        let mut frob = Vec::with_capacity(d);
        let mut pa = 1u128;
        for _ in 0..d {
            let mut mat = vec![0u128; d * d];
            for i in 0..d {
                let col = omega_pow(((i as u128 * pa) % (q as u128 - 1).max(1)) as u64);
                for k in 0..d {
                    mat[k * d + i] = col[k];
                }
            }
            frob.push(mat);
            pa = pa * p as u128 % (q as u128 - 1).max(1);
        }

        let residue = GaloisField::new(p, fbar);
        let mut field = Field {
            spec: spec.clone(),
            ring,
            ppow,
            q,
            poly,
            high,
            frob,
            residue,
            dlog: OnceLock::new(),
            ram_degree: 1,
            zeta_exp: 0,
            zeta_pows: Vec::new(),
            pi: 0,
            cyclo_table: Vec::new(),
            pnu: 1,
        };

        match layer {
            RamifiedLayer::None => {}
            RamifiedLayer::Tame {
                e,
                unit,
                root_degree,
            } => {
                if e < 2 || e % p == 0 {
                    return invalid(format!(
                        "tame degree e={e} must be at least 2 and prime to p"
                    ));
                }
                if root_degree == 0 || d % root_degree != 0 {
                    return invalid(format!("root degree {root_degree} must divide d={d}"));
                }
                let m = p.pow(root_degree as u32) - 1;
                if m % e != 0 {
                    return invalid(format!("e={e} must divide {p}^{root_degree} - 1"));
                }
                if unit % p == 0 || unit >= p {
                    return invalid(format!("radicand unit {unit} must lie in 1..{p}"));
                }
                let base = field.subfield_root_exponent(root_degree);
                field.zeta_exp = (base as u128 * (m / e) as u128 % (q as u128 - 1)) as u64;
                field.zeta_pows = (0..e)
                    .map(|j| field.omega_pow(field.zeta_exp * j % (q - 1)))
                    .collect();
                let mut t = unit as u128;
                for _ in 0..prec + 2 {
                    t = field.ring.pow(t, p as u128);
                }
                field.pi = field.ring.mul(t, p as u128);
                field.ram_degree = e as usize;
            }
            RamifiedLayer::Cyclotomic { nu } => {
                if p == 2 {
                    return invalid("cyclotomic layer requires odd p".into());
                }
                if nu == 0 {
                    return invalid("cyclotomic layer requires nu >= 1".into());
                }
                let pnu = p
                    .checked_pow(nu)
                    .filter(|&x| x - x / p <= MAX_CYCLOTOMIC_DEGREE)
                    .ok_or_else(|| {
                        PadicError::TooLarge(format!(
                            "phi({p}^{nu}) exceeds {MAX_CYCLOTOMIC_DEGREE}"
                        ))
                    })?;
                let step = pnu / p;
                let phi = pnu - step;
                field.cyclo_table = (0..pnu)
                    .map(|k| {
                        let mut v = vec![0i8; phi as usize];
                        if k < phi {
                            v[k as usize] = 1;
                        } else {
                            let t = k - phi;
                            for j in 0..p - 1 {
                                v[(j * step + t) as usize] = -1;
                            }
                        }
                        v
                    })
                    .collect();
                field.pnu = pnu;
                field.ram_degree = phi as usize;
            }
        }
        Ok(Arc::new(field))
    }

    /// Exponent `k·(q-1)/(p^r - 1)` of `ω` giving the canonical primitive
    /// `(p^r - 1)`-th root of unity of the degree-`r` subfield: the least `k`
    /// prime to `p^r - 1` whose residue is a root of the minimal polynomial of
    /// the canonical generator of `F_{p^r}`.
    pub fn subfield_root_exponent(&self, r: usize) -> u64 {
        let p = self.p();
        let m = p.pow(r as u32) - 1;
        let step = (self.q - 1) / m;
        let sub = GaloisField::canonical(p, r);
        let target = sub.min_poly(&sub.canonical_generator());
        let xbar = self.residue_generator();
        (1..=m)
            .filter(|&k| crate::groups::gcd_u64(k, m) == 1)
            .map(|k| k * step)
            .find(|&exp| {
                let z = self.residue.pow(&xbar, exp);
                self.residue
                    .is_zero(&self.residue.eval_fp_poly(&target, &z))
            })
            .expect("the subfield contains a root of its canonical minimal polynomial")
    }

    /// `ω̄` in residue coordinates.
    pub fn residue_generator(&self) -> Vec<u64> {
        let d = self.d();
        if d == 1 {
            vec![(self.p() - self.residue.modulus_poly()[0]) % self.p()]
        } else {
            let mut v = vec![0u64; d];
            v[1] = 1;
            v
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn id(&self) -> String {
        self.spec.to_string()
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    /// Residue field size `p^d`.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn prec(&self) -> u32 {
        self.spec.prec
    }

    pub fn modulus(&self) -> u128 {
        self.ring.modulus()
    }

    pub(crate) fn ring(&self) -> &ModRing {
        &self.ring
    }

    pub fn ppow(&self, k: u32) -> u128 {
        self.ppow[k as usize]
    }

    pub fn ram_degree(&self) -> usize {
        self.ram_degree
    }

    /// Ramification index over `Q_p`.
    pub fn abs_ramification(&self) -> u64 {
        self.ram_degree as u64
    }

    pub fn absolute_degree(&self) -> usize {
        self.d() * self.ram_degree
    }

    pub fn layer(&self) -> RamifiedLayer {
        self.spec.layer
    }

    pub fn is_cyclotomic(&self) -> bool {
        matches!(self.spec.layer, RamifiedLayer::Cyclotomic { .. })
    }

    pub fn is_tame(&self) -> bool {
        matches!(self.spec.layer, RamifiedLayer::Tame { .. })
    }

    /// `p^ν` for the cyclotomic layer, `1` otherwise.
    pub fn pnu(&self) -> u64 {
        self.pnu
    }

    /// Tame layer: `ζ_e = ω^zeta_exp`.
    pub fn zeta_exp(&self) -> u64 {
        self.zeta_exp
    }

    /// Tame layer: `ρ^e` as an element of `Z/p^N`.
    pub(crate) fn pi_value(&self) -> u128 {
        self.pi
    }

    pub fn residue_field(&self) -> &GaloisField {
        &self.residue
    }

    pub fn dlog_table(&self) -> &DlogTable {
        self.dlog
            .get_or_init(|| DlogTable::new(&self.residue, &self.residue_generator()))
    }

    pub fn minimal_polynomial(&self) -> &[u128] {
        &self.poly
    }

    /// `ω^k` in unramified coordinates.
    pub fn omega_pow(&self, k: u64) -> Vec<u128> {
        let gen = generator_coords(&self.ring, &self.poly);
        poly_powmod(&self.ring, &self.poly, &gen, k as u128)
    }

    pub(crate) fn umul(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let d = self.d();
        let mut acc = vec![Acc::default(); 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc[i + j].add_prod(x, y);
            }
        }
        let v: Vec<u128> = acc.into_iter().map(|a| self.ring.reduce_acc(a)).collect();
        self.reduce_unramified(&v)
    }

    /// Folds coordinates `ω^d..ω^{2d-2}` back into the basis.
    fn reduce_unramified(&self, v: &[u128]) -> Vec<u128> {
        let d = self.d();
        (0..d)
            .map(|k| {
                let mut acc = Acc::default();
                acc.add(v[k]);
                for t in 0..d - 1 {
                    if v[d + t] != 0 {
                        acc.add_prod(v[d + t], self.high[t][k]);
                    }
                }
                self.ring.reduce_acc(acc)
            })
            .collect()
    }

    /// Product of two coefficient grids modulo `p^N`.
    pub(crate) fn mul_grid(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let (r, d) = (self.ram_degree, self.d());
        let w = 2 * d - 1;
        let rows = 2 * r - 1;
        let mut acc = vec![Acc::default(); rows * w];
        for (ia, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let (ra, ka) = (ia / d, ia % d);
            for (ib, &y) in b.iter().enumerate() {
                if y != 0 {
                    acc[(ra + ib / d) * w + ka + ib % d].add_prod(x, y);
                }
            }
        }
        let raw: Vec<u128> = acc.into_iter().map(|a| self.ring.reduce_acc(a)).collect();
        let mut full = Vec::with_capacity(rows * d);
        for row in raw.chunks(w) {
            if row.iter().all(|&x| x == 0) {
                full.extend(std::iter::repeat_n(0, d));
            } else {
                full.extend(self.reduce_unramified(row));
            }
        }
        self.reduce_ramified(full)
    }

    /// Folds rows `r >= R` of a grid back into the ramified basis.
    fn reduce_ramified(&self, mut full: Vec<u128>) -> Vec<u128> {
        let (r, d) = (self.ram_degree, self.d());
        let rows = full.len() / d;
        if rows <= r && !self.is_cyclotomic() {
            full.resize(r * d, 0);
            return full;
        }
        match self.spec.layer {
            RamifiedLayer::None => {
                full.truncate(d);
                full
            }
            RamifiedLayer::Tame { .. } => {
                for row in (r..rows).rev() {
                    for k in 0..d {
                        let c = full[row * d + k];
                        if c != 0 {
                            let t = (row - r) * d + k;
                            full[t] = self.ring.add(full[t], self.ring.mul(c, self.pi));
                        }
                    }
                }
                full.truncate(r * d);
                full
            }
            RamifiedLayer::Cyclotomic { .. } => {
                let mut out = vec![0u128; r * d];
                for row in 0..rows {
                    let src = &full[row * d..(row + 1) * d];
                    if src.iter().all(|&x| x == 0) {
                        continue;
                    }
                    let k = row as u64 % self.pnu;
                    for (j, &s) in self.cyclo_table[k as usize].iter().enumerate() {
                        for t in 0..d {
                            let o = &mut out[j * d + t];
                            *o = match s {
                                1 => self.ring.add(*o, src[t]),
                                -1 => self.ring.sub(*o, src[t]),
                                _ => *o,
                            };
                        }
                    }
                }
                out
            }
        }
    }

    pub(crate) fn frob_apply(&self, a: u64, v: &[u128]) -> Vec<u128> {
        let d = self.d();
        let a = (a % d as u64) as usize;
        if a == 0 {
            return v.to_vec();
        }
        let mat = &self.frob[a];
        (0..d)
            .map(|k| {
                let mut acc = Acc::default();
                for (i, &x) in v.iter().enumerate() {
                    if x != 0 {
                        acc.add_prod(mat[k * d + i], x);
                    }
                }
                self.ring.reduce_acc(acc)
            })
            .collect()
    }

    pub(crate) fn apply_grid(&self, s: &Automorphism, grid: &[u128]) -> Vec<u128> {
        let d = self.d();
        let mut rows: Vec<Vec<u128>> = grid
            .chunks(d)
            .map(|row| self.frob_apply(s.frob, row))
            .collect();
        match self.spec.layer {
            RamifiedLayer::None => rows.concat(),
            RamifiedLayer::Tame { e, .. } => {
                for (k, row) in rows.iter_mut().enumerate() {
                    let j = (s.ram * k as u64) % e;
                    if j != 0 && row.iter().any(|&x| x != 0) {
                        *row = self.umul(row, &self.zeta_pows[j as usize]);
                    }
                }
                rows.concat()
            }
            RamifiedLayer::Cyclotomic { .. } => {
                let mut full = vec![0u128; self.pnu as usize * d];
                for (k, row) in rows.iter().enumerate() {
                    let t = (s.ram * k as u64 % self.pnu) as usize;
                    full[t * d..(t + 1) * d].copy_from_slice(row);
                }
                self.reduce_ramified(full)
            }
        }
    }

    pub fn identity_automorphism(&self) -> Automorphism {
        Automorphism {
            frob: 0,
            ram: if self.is_cyclotomic() { 1 } else { 0 },
        }
    }

    /// `σ_0`: arithmetic Frobenius on `W`, identity on the ramified generator.
    pub fn frobenius(&self) -> Automorphism {
        self.automorphism(1, self.identity_automorphism().ram)
            .expect("valid")
    }

    pub fn automorphism(&self, frob: u64, ram: u64) -> Result<Automorphism> {
        let frob = frob % self.d() as u64;
        let ram = match self.spec.layer {
            RamifiedLayer::None => 0,
            RamifiedLayer::Tame { e, .. } => ram % e,
            RamifiedLayer::Cyclotomic { .. } => {
                let u = ram % self.pnu;
                if u.is_multiple_of(self.p()) {
                    return Err(PadicError::InvalidInput(format!(
                        "{ram} is not a unit mod {}",
                        self.pnu
                    )));
                }
                u
            }
        };
        Ok(Automorphism { frob, ram })
    }

    /// `s ∘ t`.
    pub fn compose(&self, s: &Automorphism, t: &Automorphism) -> Automorphism {
        let frob = (s.frob + t.frob) % self.d() as u64;
        let ram = match self.spec.layer {
            RamifiedLayer::None => 0,
            RamifiedLayer::Tame { e, .. } => {
                let twist = (0..s.frob).fold(1u64, |acc, _| acc * self.p() % e);
                (s.ram + t.ram * twist) % e
            }
            RamifiedLayer::Cyclotomic { .. } => {
                (s.ram as u128 * t.ram as u128 % self.pnu as u128) as u64
            }
        };
        Automorphism { frob, ram }
    }

    pub fn auto_pow(&self, s: &Automorphism, k: u64) -> Automorphism {
        (0..k).fold(self.identity_automorphism(), |acc, _| self.compose(&acc, s))
    }

    pub fn auto_order(&self, s: &Automorphism) -> u64 {
        let id = self.identity_automorphism();
        let mut cur = *s;
        let mut k = 1;
        while cur != id {
            cur = self.compose(&cur, s);
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_round_trip() {
        for s in [
            "p=5;d=2;tame e=4;N=32",
            "p=3;d=1;cyclotomic nu=2;N=48",
            "p=7;d=2;tame e=3 u=6 z=1;N=20",
            "p=5;d=1;none;N=32",
        ] {
            let spec: FieldSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("p=5;d=2;tame;N=3".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn frobenius_has_order_d() {
        for (p, d) in [(5u64, 1usize), (5, 2), (3, 4), (7, 3)] {
            let f = Field::new(FieldSpec::unramified(p, d, 20)).unwrap();
            let gen = f.omega_pow(1);
            let mut cur = gen.clone();
            for k in 1..=d {
                cur = f.frob_apply(1, &cur);
                assert_eq!(cur == gen, k == d, "p={p} d={d} k={k}");
            }
            // ω^{q-1} = 1
            let mut one = vec![0u128; d];
            one[0] = 1;
            assert_eq!(f.omega_pow(f.q() - 1), one);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            Field::new(FieldSpec::unramified(4, 1, 10)),
            Err(PadicError::InvalidInput(_))
        ));
        assert!(matches!(
            Field::new(FieldSpec::tame(5, 1, 3, 10)),
            Err(PadicError::InvalidInput(_))
        ));
        assert!(matches!(
            Field::new(FieldSpec::cyclotomic(2, 1, 2, 10)),
            Err(PadicError::InvalidInput(_))
        ));
        assert!(matches!(
            Field::new(FieldSpec::unramified(5, 1, 60)),
            Err(PadicError::TooLarge(_))
        ));
    }

    #[test]
    fn automorphisms_commute_when_e_divides_p_minus_1() {
        let f = Field::new(FieldSpec::tame(7, 2, 3, 10)).unwrap();
        let s0 = f.frobenius();
        let s1 = f.automorphism(0, 1).unwrap();
        assert_eq!(f.compose(&s0, &s1), f.compose(&s1, &s0));
        assert_eq!(f.auto_order(&s0), 2);
        assert_eq!(f.auto_order(&s1), 3);
    }
}
