//! The module of logarithmic derivations `D(A)` and exact freeness tests.
//!
//! Everything is computed on the essentialization, in coordinates where the
//! first `r` independent hyperplanes are the coordinate hyperplanes. There a
//! derivation `θ = Σ f_i ∂_i` lies in `D(A)` iff `x_i | f_i` for the basis
//! hyperplanes and `α | θ(α)` for the others, and
//! `D(A) = S·θ_E ⊕ D_0(A)` with `D_0(A) = {θ ∈ D(A) : θ(x_1) = 0}`.
//! Only `D_0` needs solving: its unknowns are the coefficients of `h_i` in
//! `f_i = x_i h_i` for `i ≥ 2`.
//!
//! Freeness is decided without enumerating tuples. Evaluate derivations at a
//! point `p` off every hyperplane. If `A` is free with exponents
//! `b_1 ≤ … ≤ b_r`, the values at `p` of `D(A)_b` span a space of dimension
//! exactly `#{i : b_i ≤ b}`. So a greedy choice, in increasing degree, of
//! derivations whose values at `p` are independent succeeds iff `A` is free,
//! and Saito's criterion certifies the chosen family.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::lattice::char_poly;
use crate::linalg::{determinant, exact_kernel, solve_rational, RowSpace, SparseMatrix};
use crate::mpoly::{Monomial, MPoly};
use crate::poly::{ExpMultiset, IntPoly, RootFactorization};

/// `θ = Σ f_i ∂_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub coeffs: Vec<MPoly>,
}

impl Derivation {
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Common degree of the coefficients; `None` for zero or mixed degrees.
    pub fn degree(&self) -> Option<usize> {
        let mut d = None;
        for f in self.coeffs.iter().filter(|f| !f.is_zero()) {
            let e = f.homogeneous_degree()?;
            if d.is_some_and(|d| d != e) {
                return None;
            }
            d = Some(e);
        }
        d
    }

    /// `θ(α) = Σ α_i f_i`.
    pub fn apply_linear(&self, alpha: &[i64]) -> MPoly {
        let mut out = MPoly::zero(self.dim());
        for (f, &a) in self.coeffs.iter().zip(alpha) {
            if a != 0 {
                out.add_assign(&f.scaled(&BigRational::from_integer(a.into())));
            }
        }
        out
    }

    pub fn eval(&self, p: &[BigInt]) -> Vec<BigRational> {
        self.coeffs.iter().map(|f| f.eval(p)).collect()
    }

    pub fn is_member(&self, a: &Arrangement) -> bool {
        a.normals().all(|n| self.apply_linear(n).divisible_by_linear(n))
    }

    /// The Euler derivation `Σ x_i ∂_i`.
    pub fn euler(dim: usize) -> Derivation {
        Derivation { coeffs: (0..dim).map(|i| MPoly::var(dim, i)).collect() }
    }
}

/// Why an arrangement is not free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "witness")]
pub enum NonFreeWitness {
    /// `χ(A)` has a factor without integer roots.
    NonSplittingChi { chi: String, residual: String },
    /// `dim D(A)_d` differs from the value forced by the roots of `χ`.
    /// Dimensions refer to the essentialization (ambient dimension `rank`).
    GradedDimMismatch { degree: usize, predicted: u64, actual: u64, rank: usize },
    /// No family of derivations of the required degrees is independent at a
    /// generic point.
    SaitoIdenticallyZero { degree: usize },
}

#[derive(Clone, Debug)]
pub enum Decision {
    Free(ExpMultiset),
    NotFree(NonFreeWitness),
}

impl Decision {
    pub fn is_free(&self) -> bool {
        matches!(self, Decision::Free(_))
    }

    pub fn exponents(&self) -> Option<&ExpMultiset> {
        match self {
            Decision::Free(e) => Some(e),
            Decision::NotFree(_) => None,
        }
    }
}

/// Saito basis: `det(f_j(θ_i)) = scalar · Q(A)` with `scalar ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeCertificate {
    pub exponents: ExpMultiset,
    pub basis: Vec<Derivation>,
    pub scalar: BigRational,
}

#[derive(Clone, Debug)]
pub enum FreenessVerdict {
    Free(FreeCertificate),
    NotFree(NonFreeWitness),
}

impl FreenessVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, FreenessVerdict::Free(_))
    }

    pub fn exponents(&self) -> Option<&ExpMultiset> {
        match self {
            FreenessVerdict::Free(c) => Some(&c.exponents),
            FreenessVerdict::NotFree(_) => None,
        }
    }
}

/// Rank of `S_d` in `n` variables, `C(d + n − 1, n − 1)`.
pub fn monomial_count(n: usize, d: usize) -> u64 {
    if n == 0 {
        return u64::from(d == 0);
    }
    binomial((d + n - 1) as u64, (n - 1) as u64)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

/// Graded dimension in degree `d` of a free module of rank `ℓ` with
/// generators in the degrees `exps`.
pub fn free_dim_prediction(exps: &ExpMultiset, l: usize, d: usize) -> u64 {
    exps.as_slice().iter().filter(|&&b| b as usize <= d).map(|&b| monomial_count(l, d - b as usize)).sum()
}

/// Exponent vectors of total degree `d` in `n` variables.
pub fn monomials(n: usize, d: usize) -> Vec<Monomial> {
    fn rec(n: usize, d: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if cur.len() + 1 == n {
            cur.push(d as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=d).rev() {
            cur.push(e as u16);
            rec(n, d - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Integer polynomial in sparse form, used while building linear systems.
type IntTerms = HashMap<Monomial, i128>;

fn int_mul(a: &IntTerms, b: &IntTerms) -> Option<IntTerms> {
    let mut out = IntTerms::new();
    for (m1, c1) in a {
        for (m2, c2) in b {
            let m: Monomial = m1.iter().zip(m2).map(|(x, y)| x + y).collect();
            let t = c1.checked_mul(*c2)?;
            let e = out.entry(m).or_insert(0);
            *e = e.checked_add(t)?;
        }
    }
    out.retain(|_, c| *c != 0);
    Some(out)
}

/// Essential arrangement in coordinates where hyperplane `basis[k]` is `x_k`.
struct Frame {
    ess: Arrangement,
    /// Indices (into `ess`) of the non-coordinate hyperplanes.
    others: Vec<usize>,
}

impl Frame {
    fn new(a: &Arrangement) -> (Frame, crate::arrangement::Essentialization) {
        let e = a.essentialize();
        let ess = e.arrangement.clone();
        let others = (0..ess.len()).filter(|i| !e.basis.contains(i)).collect();
        (Frame { ess, others }, e)
    }

    fn rank(&self) -> usize {
        self.ess.dim()
    }
}

/// Kernel of the linear system for `D_0(A)_d`.
struct D0Space {
    /// Monomials of degree `d − 1` in `r` variables (column layout).
    nus: Vec<Monomial>,
    /// Integer kernel vectors; entry `(i − 1)·|nus| + k` is the coefficient
    /// of `x^{nus[k]}` in `h_i`.
    basis: Vec<Vec<BigInt>>,
}

fn d0_space(frame: &Frame, d: usize) -> Result<D0Space> {
    let r = frame.rank();
    assert!(d >= 1 && r >= 1);
    let nus = monomials(r, d - 1);
    let m = nus.len();
    let ncols = (r - 1) * m;
    let mut sys = SparseMatrix::new(ncols);
    for &hi in &frame.others {
        let alpha = frame.ess.hyperplane(hi).normal();
        // solve for the variable with the smallest nonzero coefficient
        let j = (0..r).filter(|&k| alpha[k] != 0).min_by_key(|&k| (alpha[k].unsigned_abs(), k)).unwrap();
        let aj = alpha[j] as i128;
        // L = −Σ_{k≠j} α_k x_k, so α_j x_j ≡ L modulo α
        let mut lin = IntTerms::new();
        for k in 0..r {
            if k != j && alpha[k] != 0 {
                let mut mono = vec![0u16; r];
                mono[k] = 1;
                lin.insert(mono, -(alpha[k] as i128));
            }
        }
        let mut lpow: Vec<IntTerms> = vec![IntTerms::from([(vec![0u16; r], 1i128)])];
        for _ in 0..d {
            let next = int_mul(lpow.last().unwrap(), &lin)
                .ok_or_else(|| Error::LinearAlgebra("coefficient overflow in constraint expansion".into()))?;
            lpow.push(next);
        }
        let mut ajpow = vec![1i128; d + 1];
        for e in 1..=d {
            ajpow[e] = ajpow[e - 1]
                .checked_mul(aj)
                .ok_or_else(|| Error::LinearAlgebra("coefficient overflow in constraint expansion".into()))?;
        }
        let mut row_index: HashMap<Monomial, usize> = HashMap::new();
        let mut rows: Vec<Vec<(u32, i128)>> = Vec::new();
        for i in 1..r {
            if alpha[i] == 0 {
                continue;
            }
            for (k, nu) in nus.iter().enumerate() {
                let col = ((i - 1) * m + k) as u32;
                let mut mu = nu.clone();
                mu[i] += 1;
                let e = mu[j] as usize;
                mu[j] = 0;
                let factor = alpha[i] as i128 * ajpow[d - e];
                for (pm, pc) in &lpow[e] {
                    let target: Monomial = mu.iter().zip(pm).map(|(a, b)| a + b).collect();
                    let next = rows.len();
                    let ri = *row_index.entry(target).or_insert(next);
                    if ri == rows.len() {
                        rows.push(Vec::new());
                    }
                    let c = factor
                        .checked_mul(*pc)
                        .ok_or_else(|| Error::LinearAlgebra("coefficient overflow in constraint expansion".into()))?;
                    rows[ri].push((col, c));
                }
            }
        }
        for row in rows {
            let g = row.iter().fold(0i128, |g, &(_, c)| crate::linalg::gcd_i128(g, c));
            if g == 0 {
                continue;
            }
            let row: Vec<(u32, i64)> = row
                .into_iter()
                .map(|(c, v)| i64::try_from(v / g).map(|v| (c, v)))
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::LinearAlgebra("constraint coefficient exceeds i64".into()))?;
            sys.push_row(row);
        }
    }
    let basis = if ncols == 0 { Vec::new() } else { exact_kernel(&sys)?.basis };
    Ok(D0Space { nus, basis })
}

/// `dim D(A)_d` of an essential arrangement in frame coordinates.
fn total_dim(frame: &Frame, d: usize, d0: Option<&D0Space>) -> u64 {
    let r = frame.rank();
    if d == 0 || r == 0 {
        return 0;
    }
    monomial_count(r, d - 1) + d0.map_or(0, |s| s.basis.len() as u64)
}

/// Frame-coordinate derivation from a `D_0` kernel vector.
fn d0_derivation(r: usize, space: &D0Space, v: &[BigInt]) -> Vec<HashMap<Monomial, BigInt>> {
    let m = space.nus.len();
    let mut coeffs = vec![HashMap::new(); r];
    for i in 1..r {
        for (k, nu) in space.nus.iter().enumerate() {
            let c = &v[(i - 1) * m + k];
            if !c.is_zero() {
                let mut mu = nu.clone();
                mu[i] += 1;
                coeffs[i].insert(mu, c.clone());
            }
        }
    }
    coeffs
}

/// A point with every coordinate of the form `t^k`, off every hyperplane.
pub fn generic_point(a: &Arrangement) -> Vec<BigInt> {
    let m = a.normals().flat_map(|n| n.iter().map(|x| x.unsigned_abs())).max().unwrap_or(0);
    let t = BigInt::from(m) + 2;
    let mut p = Vec::with_capacity(a.dim());
    let mut x = BigInt::one();
    for _ in 0..a.dim() {
        p.push(x.clone());
        x *= &t;
    }
    p
}

fn dot(a: &[i64], p: &[BigInt]) -> BigInt {
    a.iter().zip(p).map(|(&x, y)| y * x).sum()
}

fn mono_eval(m: &Monomial, p: &[BigInt]) -> BigInt {
    let mut v = BigInt::one();
    for (x, &e) in p.iter().zip(m) {
        if e > 0 {
            v *= num_traits::pow(x.clone(), e as usize);
        }
    }
    v
}

/// Fraction-free echelon of integer vectors, used for independence tests.
struct BigEchelon {
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl BigEchelon {
    fn new() -> Self {
        BigEchelon { rows: Vec::new() }
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        for (c, row) in &self.rows {
            if w[*c].is_zero() {
                continue;
            }
            let g = row[*c].gcd(&w[*c]);
            let a = &row[*c] / &g;
            let b = &w[*c] / &g;
            for (x, y) in w.iter_mut().zip(row) {
                *x = &*x * &a - &b * y;
            }
        }
        let Some(c) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let g = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        w.iter_mut().for_each(|x| *x = &*x / &g);
        self.rows.push((c, w));
        true
    }
}

/// One member of a Saito basis in frame coordinates.
#[derive(Clone, Debug)]
enum Chosen {
    /// `x_1^{degree − 1} θ_E`.
    Euler { degree: usize },
    D0 { vector: Vec<BigInt>, nus: Vec<Monomial> },
}

/// Outcome of the decision pipeline on the essentialization.
struct EssentialDecision {
    /// Exponents of the essentialization (no zeros), or the witness.
    result: std::result::Result<(ExpMultiset, Vec<Chosen>), NonFreeWitness>,
}

/// Greedy Saito scan over precomputed `D_0` spaces: picks, in increasing
/// degree, derivations whose values at a generic point are independent.
fn saito_scan_frame(
    frame: &Frame,
    exps: &ExpMultiset,
    spaces: &HashMap<usize, D0Space>,
) -> std::result::Result<Vec<Chosen>, NonFreeWitness> {
    let r = frame.rank();
    let p = generic_point(&frame.ess);
    let mut ech = BigEchelon::new();
    let mut chosen = Vec::new();
    let mut degrees: Vec<usize> = exps.as_slice().iter().map(|&b| b as usize).collect();
    degrees.dedup();
    for &b in &degrees {
        let target = exps.as_slice().iter().filter(|&&x| x as usize <= b).count();
        if b >= 1 && ech.len() < target && ech.insert(&p) {
            chosen.push(Chosen::Euler { degree: b });
        }
        if let Some(space) = spaces.get(&b) {
            let pows: Vec<BigInt> = space.nus.iter().map(|nu| mono_eval(nu, &p)).collect();
            let m = space.nus.len();
            for v in &space.basis {
                if ech.len() >= target {
                    break;
                }
                let mut val = vec![BigInt::zero(); r];
                for i in 1..r {
                    let h: BigInt = (0..m).map(|k| &v[(i - 1) * m + k] * &pows[k]).sum();
                    val[i] = h * &p[i];
                }
                if ech.insert(&val) {
                    chosen.push(Chosen::D0 { vector: v.clone(), nus: space.nus.clone() });
                }
            }
        }
        if ech.len() < target {
            return Err(NonFreeWitness::SaitoIdenticallyZero { degree: b });
        }
    }
    Ok(chosen)
}

fn decide_frame(frame: &Frame) -> Result<EssentialDecision> {
    let r = frame.rank();
    let chi = char_poly(&frame.ess);
    let exps = match chi.integer_roots() {
        RootFactorization::Splits(e) => e,
        RootFactorization::NegativeRoots { roots } => {
            let residual = IntPoly::from_roots(roots.into_iter().filter(|&r| r < 0)).to_string();
            return Ok(EssentialDecision {
                result: Err(NonFreeWitness::NonSplittingChi { chi: chi.to_string(), residual }),
            });
        }
        RootFactorization::NonSplitting { residual, .. } => {
            return Ok(EssentialDecision {
                result: Err(NonFreeWitness::NonSplittingChi { chi: chi.to_string(), residual: residual.to_string() }),
            })
        }
    };
    if r == 0 {
        return Ok(EssentialDecision { result: Ok((exps, Vec::new())) });
    }
    let top = exps.largest().unwrap_or(0) as usize;
    let mut spaces = HashMap::new();
    for d in 1..=top {
        let space = d0_space(frame, d)?;
        let actual = total_dim(frame, d, Some(&space));
        let predicted = free_dim_prediction(&exps, r, d);
        if actual != predicted {
            return Ok(EssentialDecision {
                result: Err(NonFreeWitness::GradedDimMismatch { degree: d, predicted, actual, rank: r }),
            });
        }
        if exps.as_slice().contains(&(d as u32)) {
            spaces.insert(d, space);
        }
    }
    let result = saito_scan_frame(frame, &exps, &spaces).map(|c| (exps, c));
    Ok(EssentialDecision { result })
}

/// Fast freeness decision without building a certificate. Exponents include
/// `ℓ − rank(A)` zeros.
pub fn decide(a: &Arrangement) -> Result<Decision> {
    let (frame, e) = Frame::new(a);
    let d = decide_frame(&frame)?;
    Ok(match d.result {
        Ok((exps, _)) => Decision::Free(exps.with_zeros(e.kernel_dim)),
        Err(w) => Decision::NotFree(w),
    })
}

/// Full pipeline: essentialize, factor `χ`, compare graded dimensions of
/// `D(A)` with the roots of `χ`, then run the Saito scan. A free verdict
/// carries a basis in the input coordinates.
pub fn is_free(a: &Arrangement) -> Result<FreenessVerdict> {
    let (frame, e) = Frame::new(a);
    let d = decide_frame(&frame)?;
    match d.result {
        Err(w) => Ok(FreenessVerdict::NotFree(w)),
        Ok((exps, chosen)) => {
            let lift = Lift::new(a, &e);
            let mut basis: Vec<Derivation> = lift.kernel_fields();
            for c in &chosen {
                basis.push(lift.lift(&frame_derivation(frame.rank(), c)));
            }
            let exponents = exps.with_zeros(e.kernel_dim);
            let scalar = saito_scalar(a, &basis).ok_or_else(|| {
                Error::Certificate("chosen family has vanishing determinant at the generic point".into())
            })?;
            Ok(FreenessVerdict::Free(FreeCertificate { exponents, basis, scalar }))
        }
    }
}

fn frame_derivation(r: usize, c: &Chosen) -> Vec<HashMap<Monomial, BigInt>> {
    match c {
        Chosen::Euler { degree } => (0..r)
            .map(|i| {
                let mut m = vec![0u16; r];
                m[0] += (*degree - 1) as u16;
                m[i] += 1;
                HashMap::from([(m, BigInt::one())])
            })
            .collect(),
        Chosen::D0 { vector, nus, .. } => {
            let space = D0Space { nus: nus.clone(), basis: Vec::new() };
            d0_derivation(r, &space, vector)
        }
    }
}

/// Transports frame-coordinate derivations back to the input coordinates.
///
/// Frame coordinates are `y = N x` where the rows of `N` are the basis
/// normals. `θ' = Σ g_k(y) ∂_{y_k}` lifts to `Σ_k g_k(N x) v_k` with
/// `N v_k = e_k`; constant fields spanning `ker N` complete the basis.
struct Lift {
    dim: usize,
    n_rows: Vec<Vec<i64>>,
    /// `v_k` scaled by a common denominator; the scale is removed again
    /// when the lifted derivation is made primitive.
    v: Vec<Vec<BigInt>>,
    kernel: Vec<Vec<BigRational>>,
}

impl Lift {
    fn new(a: &Arrangement, e: &crate::arrangement::Essentialization) -> Lift {
        let dim = a.dim();
        let n_rows: Vec<Vec<i64>> = e.basis.iter().map(|&i| a.hyperplane(i).normal().to_vec()).collect();
        let r = n_rows.len();
        let mut cols = Vec::new();
        let mut colspace = RowSpace::new(r);
        for c in 0..dim {
            let col: Vec<i64> = n_rows.iter().map(|row| row[c]).collect();
            if colspace.insert(&col) {
                cols.push(c);
            }
        }
        let block: Vec<Vec<BigRational>> =
            (0..r).map(|i| cols.iter().map(|&c| BigRational::from_integer(n_rows[i][c].into())).collect()).collect();
        let mut vr: Vec<Vec<BigRational>> = Vec::with_capacity(r);
        for k in 0..r {
            let mut rhs = vec![BigRational::zero(); r];
            rhs[k] = BigRational::one();
            let sol = solve_rational(&block, &rhs).expect("basis block is invertible");
            let mut v = vec![BigRational::zero(); dim];
            for (&c, s) in cols.iter().zip(sol) {
                v[c] = s;
            }
            vr.push(v);
        }
        let v_den = vr.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let v = vr.iter().map(|row| row.iter().map(|x| x.numer() * (&v_den / x.denom())).collect()).collect();
        let kernel = RowSpace::spanned_by(dim, n_rows.iter().map(|r| r.as_slice())).annihilator_basis();
        Lift { dim, n_rows, v, kernel }
    }

    fn kernel_fields(&self) -> Vec<Derivation> {
        self.kernel
            .iter()
            .map(|w| {
                let den = w.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                Derivation {
                    coeffs: w
                        .iter()
                        .map(|x| {
                            MPoly::constant(self.dim, BigRational::from_integer(x.numer() * (&den / x.denom())))
                        })
                        .collect(),
                }
            })
            .collect()
    }

    /// Lifts a frame derivation and clears denominators.
    fn lift(&self, g: &[HashMap<Monomial, BigInt>]) -> Derivation {
        let mut cache: HashMap<Monomial, HashMap<Monomial, i128>> = HashMap::new();
        let mut f: Vec<HashMap<Monomial, BigInt>> = vec![HashMap::new(); self.dim];
        for (k, gk) in g.iter().enumerate() {
            if gk.is_empty() {
                continue;
            }
            // G_k(x) = g_k(N x)
            let mut gx: HashMap<Monomial, BigInt> = HashMap::new();
            for (m, c) in gk {
                for (mm, cc) in self.expand(m, &mut cache).iter() {
                    *gx.entry(mm.clone()).or_insert_with(BigInt::zero) += c * BigInt::from(*cc);
                }
            }
            for (i, fi) in f.iter_mut().enumerate() {
                let vki = &self.v[k][i];
                if vki.is_zero() {
                    continue;
                }
                for (m, c) in &gx {
                    *fi.entry(m.clone()).or_insert_with(BigInt::zero) += c * vki;
                }
            }
        }
        let g = f.iter().flat_map(|fi| fi.values()).fold(BigInt::zero(), |g, x| g.gcd(x));
        let g = if g.is_zero() { BigInt::one() } else { g };
        let coeffs = f
            .into_iter()
            .map(|fi| {
                let mut p = MPoly::zero(self.dim);
                for (m, c) in fi {
                    p.add_term(m, BigRational::from_integer(c / &g));
                }
                p
            })
            .collect();
        Derivation { coeffs }
    }

    /// `∏ (N_k · x)^{m_k}` with integer coefficients, memoised.
    fn expand<'a>(
        &self,
        m: &Monomial,
        cache: &'a mut HashMap<Monomial, HashMap<Monomial, i128>>,
    ) -> &'a HashMap<Monomial, i128> {
        if !cache.contains_key(m) {
            let val = match m.iter().position(|&e| e > 0) {
                None => HashMap::from([(vec![0u16; self.dim], 1i128)]),
                Some(k) => {
                    let mut lower = m.clone();
                    lower[k] -= 1;
                    let base = self.expand(&lower, cache).clone();
                    let mut out: HashMap<Monomial, i128> = HashMap::new();
                    for (bm, bc) in &base {
                        for (j, &a) in self.n_rows[k].iter().enumerate() {
                            if a != 0 {
                                let mut mm = bm.clone();
                                mm[j] += 1;
                                *out.entry(mm).or_insert(0) += bc * a as i128;
                            }
                        }
                    }
                    out.retain(|_, c| *c != 0);
                    out
                }
            };
            cache.insert(m.clone(), val);
        }
        &cache[m]
    }
}

/// `det(θ_i(x_j))(p) / Q(p)` at the generic point; `None` if the
/// determinant vanishes there.
fn saito_scalar(a: &Arrangement, basis: &[Derivation]) -> Option<BigRational> {
    let p = generic_point(a);
    let m: Vec<Vec<BigRational>> = basis.iter().map(|t| t.eval(&p)).collect();
    let det = determinant(&m);
    if det.is_zero() {
        return None;
    }
    let q: BigInt = a.normals().map(|n| dot(n, &p)).product();
    Some(det / BigRational::from_integer(q))
}

/// Basis of `D(A)_d` for an essential arrangement, in its own coordinates:
/// `x^m θ_E` for all monomials `m` of degree `d − 1`, then a basis of the
/// part annihilating the first basis hyperplane.
pub fn derivation_space(a: &Arrangement, d: usize) -> Result<Vec<Derivation>> {
    if !a.is_essential() {
        return Err(Error::PreconditionViolated("derivation_space expects an essential arrangement".into()));
    }
    let (frame, e) = Frame::new(a);
    let r = frame.rank();
    if d == 0 || r == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for m in monomials(r, d - 1) {
        let xm = {
            let mut p = MPoly::zero(r);
            p.add_term(m, BigRational::one());
            p
        };
        out.push(Derivation { coeffs: Derivation::euler(r).coeffs.iter().map(|f| f.mul(&xm)).collect() });
    }
    let space = d0_space(&frame, d)?;
    let lift = Lift::new(a, &e);
    for v in &space.basis {
        out.push(lift.lift(&d0_derivation(r, &space, v)));
    }
    Ok(out)
}

/// `dim D(A)_d` for any arrangement, from its essentialization
/// (`ℓ − rank` constant fields contribute in every degree).
pub fn derivation_dim(a: &Arrangement, d: usize) -> Result<u64> {
    let (frame, e) = Frame::new(a);
    let r = frame.rank();
    let k = e.kernel_dim;
    // D(A) = D(A_ess) ⊗ S ⊕ S^k with the polynomial ring in all ℓ variables
    let l = a.dim();
    let mut total = 0u64;
    // constant-direction fields: k copies of S_d
    total += k as u64 * monomial_count(l, d);
    if r > 0 {
        // essential part: Σ_j dim D(A_ess)_j · dim of degree d − j in the k
        // extra variables
        for j in 1..=d {
            let s = d0_space(&frame, j)?;
            let dj = total_dim(&frame, j, Some(&s));
            total += dj * monomial_count(k, d - j);
        }
    }
    Ok(total)
}

/// Exact re-check of a Saito certificate: membership of every basis element,
/// degrees against the exponents, `Σ exponents = |A|`, and
/// `det = scalar · Q(A)`.
///
/// Membership and the degree sum make `det` a constant multiple of `Q(A)`
/// (Saito's lemma), so the constant is pinned by evaluation at points off
/// the arrangement; for small dimensions the determinant is also expanded
/// symbolically.
pub fn verify_freeness_certificate(a: &Arrangement, cert: &FreeCertificate) -> Result<()> {
    let fail = |m: String| Err(Error::Certificate(m));
    let l = a.dim();
    if cert.basis.len() != l {
        return fail(format!("basis has {} elements, expected {l}", cert.basis.len()));
    }
    if cert.exponents.len() != l {
        return fail(format!("{} exponents for dimension {l}", cert.exponents.len()));
    }
    let mut degs = Vec::with_capacity(l);
    for (i, t) in cert.basis.iter().enumerate() {
        if t.dim() != l || t.coeffs.iter().any(|f| f.nvars() != l) {
            return fail(format!("basis element {i} has the wrong number of variables"));
        }
        if t.coeffs.iter().all(MPoly::is_zero) {
            return fail(format!("basis element {i} is zero"));
        }
        match t.degree() {
            Some(d) => degs.push(d as u32),
            None => return fail(format!("basis element {i} is not homogeneous")),
        }
    }
    if ExpMultiset::new(degs) != cert.exponents {
        return fail("degrees of the basis do not match the exponents".into());
    }
    if cert.exponents.sum() != a.len() as u64 {
        return fail(format!("exponents sum to {}, arrangement has {} hyperplanes", cert.exponents.sum(), a.len()));
    }
    for (i, t) in cert.basis.iter().enumerate() {
        for (k, n) in a.normals().enumerate() {
            if !t.apply_linear(n).divisible_by_linear(n) {
                return fail(format!("basis element {i} does not preserve hyperplane {k}"));
            }
        }
    }
    if cert.scalar.is_zero() {
        return fail("scalar is zero".into());
    }
    let p0 = generic_point(a);
    let shifted: Vec<BigInt> = {
        let m = a.normals().flat_map(|n| n.iter().map(|x| x.unsigned_abs())).max().unwrap_or(0);
        let t = BigInt::from(m) + 3;
        let mut x = BigInt::one();
        (0..l)
            .map(|_| {
                let v = x.clone();
                x *= &t;
                v
            })
            .collect()
    };
    for p in [&p0, &shifted] {
        let m: Vec<Vec<BigRational>> = cert.basis.iter().map(|t| t.eval(p)).collect();
        let q: BigInt = a.normals().map(|n| dot(n, p)).product();
        if determinant(&m) != &cert.scalar * BigRational::from_integer(q) {
            return fail("determinant differs from scalar · Q(A)".into());
        }
    }
    if l <= 4 {
        let det = symbolic_det(&cert.basis);
        let mut q = MPoly::constant(l, cert.scalar.clone());
        for n in a.normals() {
            q = q.mul(&MPoly::linear_form(n));
        }
        if det != q {
            return fail("symbolic determinant differs from scalar · Q(A)".into());
        }
    }
    Ok(())
}

/// Laplace expansion along the first row.
fn symbolic_det(basis: &[Derivation]) -> MPoly {
    let n = basis.len();
    fn rec(basis: &[Derivation], row: usize, cols: &mut Vec<usize>, nvars: usize) -> MPoly {
        let n = basis.len();
        if row == n {
            return MPoly::constant(nvars, BigRational::one());
        }
        let mut out = MPoly::zero(nvars);
        let mut sign = 1i64;
        for idx in 0..cols.len() {
            let c = cols.remove(idx);
            let f = &basis[row].coeffs[c];
            if !f.is_zero() {
                let minor = rec(basis, row + 1, cols, nvars);
                out.add_assign(&f.mul(&minor).scaled(&BigRational::from_integer(sign.into())));
            }
            cols.insert(idx, c);
            sign = -sign;
        }
        out
    }
    let nvars = basis.first().map_or(0, |b| b.dim());
    rec(basis, 0, &mut (0..n).collect(), nvars)
}

/// `[exponent vector, numerator, denominator]`.
pub type TermJson = (Vec<u16>, String, String);

/// JSON form of a certificate: polynomials as lists of
/// `[exponent vector, numerator, denominator]`, integers as decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub dim: usize,
    pub exponents: Vec<u32>,
    pub basis: Vec<Vec<Vec<TermJson>>>,
    pub scalar: String,
}

impl FreeCertificate {
    pub fn to_json(&self) -> CertificateJson {
        let dim = self.basis.first().map_or(self.exponents.len(), |b| b.dim());
        CertificateJson {
            dim,
            exponents: self.exponents.as_slice().to_vec(),
            basis: self
                .basis
                .iter()
                .map(|t| {
                    t.coeffs
                        .iter()
                        .map(|f| f.terms().map(|(m, c)| (m.clone(), c.numer().to_string(), c.denom().to_string())).collect())
                        .collect()
                })
                .collect(),
            scalar: self.scalar.to_string(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<FreeCertificate> {
        let bad = |m: &str| Error::Certificate(m.to_string());
        let parse_int = |s: &str| s.parse::<BigInt>().map_err(|_| bad("malformed integer"));
        let mut basis = Vec::with_capacity(j.basis.len());
        for t in &j.basis {
            if t.len() != j.dim {
                return Err(bad("derivation has the wrong number of coefficients"));
            }
            let mut coeffs = Vec::with_capacity(t.len());
            for f in t {
                let mut p = MPoly::zero(j.dim);
                for (m, n, d) in f {
                    if m.len() != j.dim {
                        return Err(bad("monomial has the wrong number of variables"));
                    }
                    let d = parse_int(d)?;
                    if d.is_zero() {
                        return Err(bad("zero denominator"));
                    }
                    p.add_term(m.clone(), BigRational::new(parse_int(n)?, d));
                }
                coeffs.push(p);
            }
            basis.push(Derivation { coeffs });
        }
        let scalar = j.scalar.parse::<BigRational>().map_err(|_| bad("malformed scalar"))?;
        Ok(FreeCertificate { exponents: ExpMultiset::new(j.exponents.clone()), basis, scalar })
    }
}

/// Per-degree table of `dim D(A)_d` against the value predicted by the roots
/// of `χ(A)`, on the essentialization.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GradedDimRow {
    pub degree: usize,
    pub actual: u64,
    pub predicted: u64,
}

pub fn graded_dim_report(a: &Arrangement, max_degree: usize) -> Result<Vec<GradedDimRow>> {
    let (frame, _) = Frame::new(a);
    let r = frame.rank();
    let chi = char_poly(&frame.ess);
    let exps = chi.integer_roots().exponents().cloned();
    let mut out = Vec::new();
    for d in 1..=max_degree {
        if r == 0 {
            break;
        }
        let s = d0_space(&frame, d)?;
        out.push(GradedDimRow {
            degree: d,
            actual: total_dim(&frame, d, Some(&s)),
            predicted: exps.as_ref().map_or(0, |e| free_dim_prediction(e, r, d)),
        });
    }
    Ok(out)
}

/// `Q(A)` evaluated at a point.
pub fn defining_polynomial_at(a: &Arrangement, p: &[BigInt]) -> BigInt {
    a.normals().map(|n| dot(n, p)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr(dim: usize, rows: &[&[i64]]) -> Arrangement {
        Arrangement::new(dim, rows.iter().copied()).unwrap()
    }

    fn em(v: &[u32]) -> ExpMultiset {
        ExpMultiset::new(v.to_vec())
    }

    #[test]
    fn prediction_examples() {
        assert_eq!(free_dim_prediction(&em(&[1, 1]), 2, 1), 2);
        assert_eq!(free_dim_prediction(&em(&[1, 3, 3, 4]), 4, 1), 1);
        assert_eq!(free_dim_prediction(&em(&[1, 3, 3, 4]), 4, 3), 12);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(1, 4), vec![vec![4]]);
        assert_eq!(monomials(0, 0), vec![Vec::<u16>::new()]);
        assert_eq!(monomial_count(7, 4), 210);
    }

    #[test]
    fn boolean_spaces() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(derivation_space(&a, 0).unwrap().is_empty());
        let d1 = derivation_space(&a, 1).unwrap();
        assert_eq!(d1.len(), 3);
        for t in &d1 {
            assert!(t.is_member(&a));
        }
    }

    #[test]
    fn euler_in_degree_one() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 2, 5]]);
        assert!(!derivation_space(&a, 1).unwrap().is_empty());
        assert!(Derivation::euler(3).is_member(&a));
    }

    #[test]
    fn boolean_is_free() {
        let a = arr(2, &[&[1, 0], &[0, 1]]);
        let FreenessVerdict::Free(c) = is_free(&a).unwrap() else { panic!("not free") };
        assert_eq!(c.exponents, em(&[1, 1]));
        verify_freeness_certificate(&a, &c).unwrap();
    }

    #[test]
    fn braid_arrangement_free_non_essential() {
        let a = arr(4, &[&[1, -1, 0, 0], &[1, 0, -1, 0], &[1, 0, 0, -1], &[0, 1, -1, 0], &[0, 1, 0, -1], &[0, 0, 1, -1]]);
        let FreenessVerdict::Free(c) = is_free(&a).unwrap() else { panic!("not free") };
        assert_eq!(c.exponents, em(&[0, 1, 2, 3]));
        verify_freeness_certificate(&a, &c).unwrap();
    }

    #[test]
    fn generic_arrangement_not_free() {
        // four generic planes in 3-space: χ = (t − 1)(t² − 3t + 3)
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]);
        assert!(matches!(is_free(&a).unwrap(), FreenessVerdict::NotFree(NonFreeWitness::NonSplittingChi { .. })));
    }

    #[test]
    fn empty_is_free() {
        let a = Arrangement::empty(3);
        let FreenessVerdict::Free(c) = is_free(&a).unwrap() else { panic!("not free") };
        assert_eq!(c.exponents, em(&[0, 0, 0]));
        verify_freeness_certificate(&a, &c).unwrap();
    }

    #[test]
    fn perturbed_certificate_rejected() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]);
        let FreenessVerdict::Free(mut c) = is_free(&a).unwrap() else { panic!("not free") };
        verify_freeness_certificate(&a, &c).unwrap();
        let t = c.basis.last_mut().unwrap();
        let f = t.coeffs.iter_mut().find(|f| !f.is_zero()).unwrap();
        let m = f.terms().next().map(|(m, _)| m.clone()).unwrap();
        f.add_term(m, BigRational::one());
        assert!(verify_freeness_certificate(&a, &c).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, -1, 0]]);
        let FreenessVerdict::Free(c) = is_free(&a).unwrap() else { panic!("not free") };
        let j = serde_json::to_string(&c.to_json()).unwrap();
        let back = FreeCertificate::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn dimensions_of_non_essential() {
        // {x} in the plane: D(A) = S x∂_x ⊕ S ∂_y
        let a = arr(2, &[&[1, 0]]);
        assert_eq!(derivation_dim(&a, 0).unwrap(), 1);
        assert_eq!(derivation_dim(&a, 1).unwrap(), 3);
    }
}
