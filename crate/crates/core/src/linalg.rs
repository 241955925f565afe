//! Exact linear algebra over ℚ for small dense problems and for the large
//! sparse systems that describe derivation modules.
//!
//! Small problems (normal vectors of an arrangement, at most a few dozen
//! coordinates) use fraction-free integer row reduction. Large problems go
//! through elimination modulo word-sized primes followed by rational
//! reconstruction; every reconstructed kernel vector is then checked against
//! the original integer system, so nothing leaves this module unverified.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

/// Divides out the content and makes the first nonzero entry positive.
/// Returns `None` for the zero vector or if an entry does not fit in `i64`.
pub fn canonical_direction(v: &[i128]) -> Option<Vec<i64>> {
    let g = v.iter().fold(0i128, |g, &x| gcd_i128(g, x));
    if g == 0 {
        return None;
    }
    let lead = v.iter().copied().find(|&x| x != 0)?;
    let g = if lead < 0 { -g } else { g };
    v.iter().map(|&x| i64::try_from(x / g).ok()).collect()
}

fn canonical_direction_big(v: &[BigInt]) -> Option<Vec<i64>> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return None;
    }
    let lead = v.iter().find(|x| !x.is_zero())?;
    let g = if lead.is_negative() { -g } else { g };
    v.iter().map(|x| (x / &g).to_i64()).collect()
}

fn make_primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| gcd_i128(g, x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Row space of integer vectors kept in fraction-free reduced echelon form:
/// every row is primitive, its pivot entry is positive and every other row
/// vanishes in that pivot column. The representation is unique for a given
/// subspace, so row spaces compare by value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowSpace {
    dim: usize,
    rows: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(dim: usize) -> Self {
        RowSpace { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by<'a, I: IntoIterator<Item = &'a [i64]>>(dim: usize, vectors: I) -> Self {
        let mut s = RowSpace::new(dim);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.dim).filter(|c| !self.pivots.contains(c)).collect()
    }

    fn reduce_i128(&self, v: &[i64]) -> Option<Vec<i128>> {
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let t = w[c];
            if t == 0 {
                continue;
            }
            let p = row[c] as i128;
            let g = gcd_i128(p, t);
            let (a, b) = (p / g, t / g);
            for (wi, &ri) in w.iter_mut().zip(row) {
                *wi = wi.checked_mul(a)?.checked_sub(b.checked_mul(ri as i128)?)?;
            }
            make_primitive(&mut w);
        }
        Some(w)
    }

    fn reduce_big(&self, v: &[i64]) -> Vec<BigInt> {
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if w[c].is_zero() {
                continue;
            }
            let p = BigInt::from(row[c]);
            let g = p.gcd(&w[c]);
            let a = &p / &g;
            let b = &w[c] / &g;
            for (wi, &ri) in w.iter_mut().zip(row) {
                *wi = &*wi * &a - &b * ri;
            }
            let g = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if g > BigInt::one() {
                for wi in w.iter_mut() {
                    *wi = &*wi / &g;
                }
            }
        }
        w
    }

    /// Canonical direction of `v` modulo this space, or `None` if `v` lies in it.
    ///
    /// The residue vanishes in every pivot column; its entries in the free
    /// columns are the coordinates of the restricted linear form with respect
    /// to the standard parametrisation of the annihilated subspace.
    pub fn residue(&self, v: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(v.len(), self.dim, "vector length does not match row space");
        match self.reduce_i128(v) {
            Some(w) => {
                if w.iter().all(|&x| x == 0) {
                    None
                } else {
                    Some(canonical_direction(&w).expect("residue entry exceeds i64"))
                }
            }
            None => {
                let w = self.reduce_big(v);
                if w.iter().all(|x| x.is_zero()) {
                    None
                } else {
                    Some(canonical_direction_big(&w).expect("residue entry exceeds i64"))
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.residue(v).is_none()
    }

    /// Adds `v` to the space. Returns `true` if the rank grew.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        let Some(w) = self.residue(v) else {
            return false;
        };
        let c = w.iter().position(|&x| x != 0).expect("nonzero residue");
        // canonical_direction already made w[c] > 0
        for (row, &pc) in self.rows.iter_mut().zip(&self.pivots) {
            let t = row[c] as i128;
            if t == 0 {
                continue;
            }
            let p = w[c] as i128;
            let g = gcd_i128(p, t);
            let (a, b) = (p / g, t / g);
            let mut r: Vec<i128> = row
                .iter()
                .zip(&w)
                .map(|(&ri, &wi)| ri as i128 * a - b * wi as i128)
                .collect();
            make_primitive(&mut r);
            debug_assert!(r[pc] > 0);
            *row = r.iter().map(|&x| i64::try_from(x).expect("row entry exceeds i64")).collect();
        }
        let at = self.pivots.partition_point(|&p| p < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, w);
        true
    }

    /// Basis of the subspace annihilated by the rows, one vector per free
    /// column (that column set to one, the other free columns to zero).
    pub fn annihilator_basis(&self) -> Vec<Vec<BigRational>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut x = vec![BigRational::zero(); self.dim];
                x[f] = BigRational::one();
                for (row, &c) in self.rows.iter().zip(&self.pivots) {
                    x[c] = BigRational::new(BigInt::from(-row[f]), BigInt::from(row[c]));
                }
                x
            })
            .collect()
    }
}

pub fn rank_of(dim: usize, vectors: &[Vec<i64>]) -> usize {
    RowSpace::spanned_by(dim, vectors.iter().map(|v| v.as_slice())).rank()
}

/// Solves `M x = b` for a square rational matrix. `None` if `M` is singular.
pub fn solve_rational(m: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=n {
                    let t = &a[col][k] * &f;
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for k in col..n {
                let t = &a[col][k] * &f;
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Sparse integer matrix stored by rows.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub ncols: usize,
    pub rows: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn new(ncols: usize) -> Self {
        SparseMatrix { ncols, rows: Vec::new() }
    }

    pub fn push_row(&mut self, mut row: Vec<(u32, i64)>) {
        row.retain(|&(_, v)| v != 0);
        if !row.is_empty() {
            row.sort_unstable_by_key(|&(c, _)| c);
            self.rows.push(row);
        }
    }

    /// Exact test `M v = 0` for an integer vector.
    pub fn annihilates(&self, v: &[BigInt]) -> bool {
        let small: Option<Vec<i128>> = v.iter().map(|x| x.to_i128()).collect();
        self.rows.iter().all(|row| {
            if let Some(small) = &small {
                let mut acc: i128 = 0;
                let mut ok = true;
                for &(c, a) in row {
                    match small[c as usize].checked_mul(a as i128).and_then(|t| acc.checked_add(t)) {
                        Some(s) => acc = s,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return acc == 0;
                }
            }
            let mut acc = BigInt::zero();
            for &(c, a) in row {
                acc += &v[c as usize] * a;
            }
            acc.is_zero()
        })
    }
}

/// 24-bit primes, largest first. Products of two residues stay below 2^48,
/// so a row can absorb 2^16 updates before its entries must be reduced.
pub(crate) fn primes_24bit() -> impl Iterator<Item = u64> {
    (1u64 << 23..1u64 << 24).rev().filter(|&n| is_prime_small(n))
}

fn is_prime_small(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Result of eliminating an integer matrix modulo a prime.
struct ModularKernel {
    prime: u64,
    pivots: Vec<usize>,
    /// Indices of the input rows that produced a pivot.
    pivot_rows: Vec<usize>,
    /// One vector per free column; entries in `[0, p)`.
    kernel: Vec<Vec<u64>>,
}

const FLUSH_EVERY: u32 = 1 << 15;

fn eliminate_mod_p(m: &SparseMatrix, p: u64) -> ModularKernel {
    let n = m.ncols;
    // pivot_of[c] = index into `echelon` of the row with leading column c
    let mut pivot_of: Vec<u32> = vec![u32::MAX; n];
    let mut echelon: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut work = vec![0u64; n];
    let mut pivot_rows = Vec::new();
    for (ri, row) in m.rows.iter().enumerate() {
        if echelon.len() == n {
            break;
        }
        work.iter_mut().for_each(|x| *x = 0);
        for &(c, v) in row {
            work[c as usize] = v.rem_euclid(p as i64) as u64;
        }
        let mut updates = 0u32;
        let mut lead = None;
        for c in 0..n {
            let w = work[c] % p;
            if w == 0 {
                continue;
            }
            let pi = pivot_of[c];
            if pi == u32::MAX {
                work[c] = w;
                lead = Some(c);
                break;
            }
            let f = p - w;
            let prow = &echelon[pi as usize].1;
            // prow holds entries for columns c.. only
            for (x, &y) in work[c..].iter_mut().zip(prow.iter()) {
                *x += f * y as u64;
            }
            updates += 1;
            if updates == FLUSH_EVERY {
                work[c..].iter_mut().for_each(|x| *x %= p);
                updates = 0;
            }
        }
        let Some(c) = lead else { continue };
        let inv = inv_mod(work[c], p);
        let stored: Vec<u32> = work[c..].iter().map(|&x| ((x % p) * inv % p) as u32).collect();
        pivot_of[c] = echelon.len() as u32;
        echelon.push((c, stored));
        pivot_rows.push(ri);
    }

    let mut pivots: Vec<usize> = echelon.iter().map(|(c, _)| *c).collect();
    pivots.sort_unstable();
    let free: Vec<usize> = (0..n).filter(|c| pivot_of[*c] == u32::MAX).collect();
    let mut kernel = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![0u64; n];
        x[f] = 1;
        // back substitution: pivot rows in decreasing pivot order
        for &c in pivots.iter().rev() {
            if c > f {
                continue;
            }
            let prow = &echelon[pivot_of[c] as usize].1;
            let mut acc: u64 = 0;
            let mut cnt = 0u32;
            for (j, &y) in prow.iter().enumerate().skip(1) {
                let xv = x[c + j];
                if xv != 0 && y != 0 {
                    acc += xv * y as u64;
                    cnt += 1;
                    if cnt == FLUSH_EVERY {
                        acc %= p;
                        cnt = 0;
                    }
                }
            }
            x[c] = (p - acc % p) % p;
        }
        kernel.push(x);
    }
    ModularKernel { prime: p, pivots, pivot_rows, kernel }
}

/// Recovers `n/d` from `a mod m` with `|n|, d ≤ sqrt(m/2)`.
fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !(&r1 - a * &t1).mod_floor(m).is_zero() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Exactly verified kernel of a sparse integer matrix.
#[derive(Clone, Debug)]
pub struct ExactKernel {
    pub rank: usize,
    /// Integer kernel vectors, each primitive; independent because each has
    /// a distinct free column where the others vanish.
    pub basis: Vec<Vec<BigInt>>,
}

/// Kernel of `m` over ℚ. Modular elimination proposes a basis; the basis is
/// only returned once every vector has been checked to satisfy `m v = 0`
/// over ℤ, which together with the modular rank bound pins the dimension.
///
/// After the first prime only the rows that produced pivots are eliminated.
/// Their kernel contains the full kernel, so the count of independent
/// vectors it yields is still an upper bound for the true kernel dimension,
/// and the final check runs against every row. A full elimination is
/// repeated periodically in case the first prime was unlucky.
pub fn exact_kernel(m: &SparseMatrix) -> Result<ExactKernel> {
    const MAX_PRIMES: usize = 64;
    const SUBSET_RUNS: usize = 16;
    let mut best: Option<(Vec<usize>, Vec<Vec<BigInt>>, BigInt)> = None;
    let mut subset: Option<SparseMatrix> = None;
    let mut since_full = 0;
    for (used, p) in primes_24bit().enumerate() {
        if used >= MAX_PRIMES {
            break;
        }
        let use_subset = subset.is_some() && since_full < SUBSET_RUNS;
        let mk = match (&subset, use_subset) {
            (Some(sub), true) => eliminate_mod_p(sub, p),
            _ => eliminate_mod_p(m, p),
        };
        if !use_subset {
            let mut sub = SparseMatrix::new(m.ncols);
            sub.rows = mk.pivot_rows.iter().map(|&i| m.rows[i].clone()).collect();
            subset = Some(sub);
            since_full = 0;
        } else {
            since_full += 1;
        }
        let better = match &best {
            None => true,
            Some((piv, _, _)) => {
                mk.pivots.len() > piv.len() || (mk.pivots.len() == piv.len() && mk.pivots < *piv)
            }
        };
        let same = best.as_ref().is_some_and(|(piv, _, _)| *piv == mk.pivots);
        if !better && !same {
            continue;
        }
        let pb = BigInt::from(mk.prime);
        if better {
            let residues = mk.kernel.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
            best = Some((mk.pivots.clone(), residues, pb));
        } else {
            let (_, acc, modulus) = best.as_mut().unwrap();
            // CRT: combine acc (mod modulus) with new residues (mod p)
            let inv = BigInt::from(inv_mod((modulus.clone() % mk.prime).to_u64().unwrap(), mk.prime));
            for (av, nv) in acc.iter_mut().zip(&mk.kernel) {
                for (a, &r) in av.iter_mut().zip(nv) {
                    let diff = (BigInt::from(r) - &*a).mod_floor(&pb);
                    let k = (diff * &inv).mod_floor(&pb);
                    *a += &*modulus * k;
                }
            }
            *modulus *= &pb;
        }
        let (pivots, acc, modulus) = best.as_ref().unwrap();
        if let Some(basis) = reconstruct_and_check(m, acc, modulus) {
            return Ok(ExactKernel { rank: pivots.len(), basis });
        }
    }
    Err(Error::LinearAlgebra("modular kernel did not reconstruct to an exact kernel".into()))
}

fn reconstruct_and_check(m: &SparseMatrix, acc: &[Vec<BigInt>], modulus: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let mut out = Vec::with_capacity(acc.len());
    for v in acc {
        let mut rat = Vec::with_capacity(v.len());
        for a in v {
            if a.is_zero() {
                rat.push(BigRational::zero());
            } else {
                rat.push(rational_reconstruction(a, modulus)?);
            }
        }
        let den = rat.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
        let mut iv: Vec<BigInt> = rat.iter().map(|r| r.numer() * (&den / r.denom())).collect();
        let g = iv.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_zero() && !g.is_one() {
            iv.iter_mut().for_each(|x| *x = &*x / &g);
        }
        if !m.annihilates(&iv) {
            return None;
        }
        out.push(iv);
    }
    Some(out)
}
