//! Central arrangements of rational hyperplanes and the constructions built
//! from them: deletion, restriction, localization, product and
//! essentialization.
//!
//! A hyperplane is stored by its normal vector in primitive, sign-normalised
//! integer form, so two hyperplanes are equal exactly when their normals are.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_direction, solve_rational, RowSpace};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hyperplane(Vec<i64>);

impl Hyperplane {
    pub fn new(normal: &[i64]) -> Result<Self> {
        canonicalize(normal)
    }

    pub fn normal(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Index of the first nonzero coordinate.
    pub fn pivot(&self) -> usize {
        self.0.iter().position(|&x| x != 0).expect("normal is nonzero")
    }
}

impl fmt::Debug for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{:?}", self.0)
    }
}

impl fmt::Display for Hyperplane {
    /// Linear form in `x1 … xℓ`, e.g. `x1 + 2x3 - x5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "x{}", i + 1)?;
            first = false;
        }
        Ok(())
    }
}

/// Primitive, sign-normalised form of a nonzero integer vector.
pub fn canonicalize(v: &[i64]) -> Result<Hyperplane> {
    let w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    canonical_direction(&w)
        .map(Hyperplane)
        .ok_or_else(|| Error::InvalidHyperplane(format!("zero normal vector {v:?}")))
}

/// Clears denominators of a rational vector and canonicalises it.
pub fn canonicalize_rational(v: &[BigRational]) -> Result<Hyperplane> {
    let den = v.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let ints: Vec<BigInt> = v.iter().map(|r| r.numer() * (&den / r.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::InvalidHyperplane("zero normal vector".into()));
    }
    let lead_neg = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if lead_neg { -g } else { g };
    ints.iter()
        .map(|x| (x / &g).to_i64())
        .collect::<Option<Vec<_>>>()
        .map(Hyperplane)
        .ok_or_else(|| Error::InvalidHyperplane("normal entry exceeds i64".into()))
}

/// A finite set of linear hyperplanes in ℚ^ℓ, kept in insertion order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrangement {
    dim: usize,
    hyperplanes: Vec<Hyperplane>,
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Arrangement(dim {}, {} hyperplanes)", self.dim, self.hyperplanes.len())
    }
}

impl Arrangement {
    /// The empty arrangement Φ_ℓ.
    pub fn empty(dim: usize) -> Self {
        Arrangement { dim, hyperplanes: Vec::new() }
    }

    /// Builds an arrangement, canonicalising normals and silently dropping
    /// repeated hyperplanes.
    pub fn new<V: AsRef<[i64]>>(dim: usize, normals: impl IntoIterator<Item = V>) -> Result<Self> {
        let mut a = Arrangement::empty(dim);
        for v in normals {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            let h = canonicalize(v)?;
            if !a.hyperplanes.contains(&h) {
                a.hyperplanes.push(h);
            }
        }
        Ok(a)
    }

    /// Like [`Arrangement::new`] but a repeated hyperplane is an error.
    pub fn new_strict<V: AsRef<[i64]>>(dim: usize, normals: impl IntoIterator<Item = V>) -> Result<Self> {
        let mut a = Arrangement::empty(dim);
        for v in normals {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            let h = canonicalize(v)?;
            if a.hyperplanes.contains(&h) {
                return Err(Error::DuplicateHyperplane(h.0));
            }
            a.hyperplanes.push(h);
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn hyperplane(&self, i: usize) -> &Hyperplane {
        &self.hyperplanes[i]
    }

    pub fn normals(&self) -> impl Iterator<Item = &[i64]> {
        self.hyperplanes.iter().map(|h| h.normal())
    }

    pub fn index_of(&self, h: &Hyperplane) -> Option<usize> {
        self.hyperplanes.iter().position(|x| x == h)
    }

    pub fn contains(&self, h: &Hyperplane) -> bool {
        self.index_of(h).is_some()
    }

    fn require_member(&self, h: &Hyperplane) -> Result<usize> {
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: h.dim() });
        }
        self.index_of(h).ok_or_else(|| Error::NotMember(h.normal().to_vec()))
    }

    /// `A ∖ {H}`.
    pub fn deletion(&self, h: &Hyperplane) -> Result<Arrangement> {
        let i = self.require_member(h)?;
        Ok(self.delete_index(i))
    }

    pub fn delete_index(&self, i: usize) -> Arrangement {
        let mut hs = self.hyperplanes.clone();
        hs.remove(i);
        Arrangement { dim: self.dim, hyperplanes: hs }
    }

    /// Subarrangement on the given indices, in increasing index order.
    pub fn subarrangement(&self, indices: impl IntoIterator<Item = usize>) -> Arrangement {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        Arrangement { dim: self.dim, hyperplanes: idx.into_iter().map(|i| self.hyperplanes[i].clone()).collect() }
    }

    /// Adds a hyperplane at the end (no-op if already present).
    pub fn with_hyperplane(&self, h: Hyperplane) -> Result<Arrangement> {
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: h.dim() });
        }
        let mut a = self.clone();
        if !a.contains(&h) {
            a.hyperplanes.push(h);
        }
        Ok(a)
    }

    pub fn span(&self) -> RowSpace {
        RowSpace::spanned_by(self.dim, self.normals())
    }

    /// ℓ minus the dimension of the common intersection.
    pub fn rank(&self) -> usize {
        self.span().rank()
    }

    pub fn is_essential(&self) -> bool {
        self.rank() == self.dim
    }

    /// `A_X`: hyperplanes containing the flat.
    pub fn localization(&self, x: &Flat) -> Result<Arrangement> {
        self.check_flat(x)?;
        Ok(self.subarrangement(x.containing.iter().copied()))
    }

    /// `A^X` in the coordinates given by the free columns of the flat's
    /// reduced annihilator (equivalently `α_H ∘ B` for the basis `B` returned
    /// by [`Flat::basis`]).
    pub fn restriction(&self, x: &Flat) -> Result<Arrangement> {
        self.check_flat(x)?;
        Ok(self.restriction_with_map(x).0)
    }

    /// Restriction together with the index in `A^X` of the trace of every
    /// hyperplane of `A` (`None` for hyperplanes containing the flat).
    pub fn restriction_with_map(&self, x: &Flat) -> (Arrangement, Vec<Option<usize>>) {
        let free = x.span.free_columns();
        let mut out: Vec<Hyperplane> = Vec::new();
        let mut map = Vec::with_capacity(self.len());
        for h in &self.hyperplanes {
            match x.span.residue(h.normal()) {
                None => map.push(None),
                Some(r) => {
                    let v: Vec<i64> = free.iter().map(|&c| r[c]).collect();
                    let g = canonicalize(&v).expect("residue is nonzero on the free columns");
                    match out.iter().position(|o| *o == g) {
                        Some(i) => map.push(Some(i)),
                        None => {
                            map.push(Some(out.len()));
                            out.push(g);
                        }
                    }
                }
            }
        }
        (Arrangement { dim: free.len(), hyperplanes: out }, map)
    }

    /// `A^H` for the hyperplane with index `i`.
    pub fn restrict_to(&self, i: usize) -> Arrangement {
        let x = Flat::of_hyperplanes(self, &[i]);
        self.restriction_with_map(&x).0
    }

    /// `(A, A ∖ {H}, A^H)`.
    pub fn triple(&self, h: &Hyperplane) -> Result<Triple> {
        let i = self.require_member(h)?;
        Ok(Triple { arrangement: self.clone(), deletion: self.delete_index(i), restriction: self.restrict_to(i) })
    }

    /// `A1 × A2` in `V1 ⊕ V2`; hyperplanes of `A1` come first.
    pub fn product(&self, other: &Arrangement) -> Arrangement {
        let dim = self.dim + other.dim;
        let mut hs = Vec::with_capacity(self.len() + other.len());
        for h in &self.hyperplanes {
            let mut v = h.0.clone();
            v.resize(dim, 0);
            hs.push(Hyperplane(v));
        }
        for h in &other.hyperplanes {
            let mut v = vec![0; self.dim];
            v.extend_from_slice(&h.0);
            hs.push(Hyperplane(v));
        }
        Arrangement { dim, hyperplanes: hs }
    }

    /// Essential arrangement in dimension `rank(A)` with the same lattice.
    ///
    /// The first `rank(A)` linearly independent hyperplanes (in order) become
    /// the coordinate hyperplanes; every other normal is written in that
    /// basis. Hyperplane order and indices are preserved.
    pub fn essentialize(&self) -> Essentialization {
        let mut span = RowSpace::new(self.dim);
        let mut basis = Vec::new();
        for (i, h) in self.hyperplanes.iter().enumerate() {
            if span.insert(h.normal()) {
                basis.push(i);
            }
        }
        let r = basis.len();
        // columns where the basis normals form an invertible r×r block
        let mut cols = Vec::new();
        {
            let mut colspace = RowSpace::new(r);
            for c in 0..self.dim {
                let col: Vec<i64> = basis.iter().map(|&b| self.hyperplanes[b].0[c]).collect();
                if colspace.insert(&col) {
                    cols.push(c);
                }
            }
        }
        let block: Vec<Vec<BigRational>> = cols
            .iter()
            .map(|&c| basis.iter().map(|&b| BigRational::from_integer(self.hyperplanes[b].0[c].into())).collect())
            .collect();
        let mut hs = Vec::with_capacity(self.len());
        for h in &self.hyperplanes {
            // h restricted to cols = Σ_i coef_i · basis_i restricted to cols
            let rhs: Vec<BigRational> = cols.iter().map(|&c| BigRational::from_integer(h.0[c].into())).collect();
            let coef = solve_rational(&block, &rhs).expect("basis block is invertible");
            hs.push(canonicalize_rational(&coef).expect("normal lies in the span of the basis"));
        }
        Essentialization {
            arrangement: Arrangement { dim: r, hyperplanes: hs },
            kernel_dim: self.dim - r,
            basis,
        }
    }

    /// Normals sorted lexicographically; equal keys mean equal arrangements.
    pub fn canonical_key(&self) -> (usize, Vec<Vec<i64>>) {
        let mut v: Vec<Vec<i64>> = self.hyperplanes.iter().map(|h| h.0.clone()).collect();
        v.sort();
        (self.dim, v)
    }

    /// Same hyperplanes, possibly in another order.
    pub fn same_set(&self, other: &Arrangement) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && self.hyperplanes.iter().collect::<HashSet<_>>() == other.hyperplanes.iter().collect::<HashSet<_>>()
    }

    fn check_flat(&self, x: &Flat) -> Result<()> {
        if x.span.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.span.dim() });
        }
        let contained: Vec<usize> =
            (0..self.len()).filter(|&i| x.span.contains(self.hyperplanes[i].normal())).collect();
        if contained != x.containing || RowSpace::spanned_by(self.dim, contained.iter().map(|&i| self.hyperplanes[i].normal())) != x.span {
            return Err(Error::NotAFlat);
        }
        Ok(())
    }
}

/// Output of [`Arrangement::essentialize`].
#[derive(Clone, Debug)]
pub struct Essentialization {
    pub arrangement: Arrangement,
    /// `ℓ − rank(A)`.
    pub kernel_dim: usize,
    /// Indices of the hyperplanes used as coordinate hyperplanes.
    pub basis: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Triple {
    pub arrangement: Arrangement,
    pub deletion: Arrangement,
    pub restriction: Arrangement,
}

/// An element `X` of the intersection lattice, stored as the reduced
/// annihilator of `X` (the span of the normals of the hyperplanes containing
/// it) together with the indices of those hyperplanes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flat {
    span: RowSpace,
    containing: Vec<usize>,
}

impl Flat {
    /// `V`, the intersection of the empty family.
    pub fn whole_space(a: &Arrangement) -> Flat {
        Flat { span: RowSpace::new(a.dim()), containing: Vec::new() }
    }

    /// Intersection of the hyperplanes with the given indices.
    pub fn of_hyperplanes(a: &Arrangement, indices: &[usize]) -> Flat {
        let span = RowSpace::spanned_by(a.dim(), indices.iter().map(|&i| a.hyperplane(i).normal()));
        let containing = (0..a.len()).filter(|&i| span.contains(a.hyperplane(i).normal())).collect();
        Flat { span, containing }
    }

    /// The subspace cut out by the given linear forms, which must be a flat
    /// of `a` (i.e. spanned by normals of `a`).
    pub fn from_normals(a: &Arrangement, normals: &[Vec<i64>]) -> Result<Flat> {
        for v in normals {
            if v.len() != a.dim() {
                return Err(Error::DimensionMismatch { expected: a.dim(), found: v.len() });
            }
        }
        let span = RowSpace::spanned_by(a.dim(), normals.iter().map(|v| v.as_slice()));
        let containing: Vec<usize> = (0..a.len()).filter(|&i| span.contains(a.hyperplane(i).normal())).collect();
        let generated = RowSpace::spanned_by(a.dim(), containing.iter().map(|&i| a.hyperplane(i).normal()));
        if generated != span {
            return Err(Error::NotAFlat);
        }
        Ok(Flat { span, containing })
    }

    pub(crate) fn from_parts(span: RowSpace, containing: Vec<usize>) -> Flat {
        Flat { span, containing }
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    /// `dim X = ℓ − rank X`.
    pub fn dim(&self) -> usize {
        self.span.dim() - self.span.rank()
    }

    pub fn containing(&self) -> &[usize] {
        &self.containing
    }

    pub fn annihilator(&self) -> &RowSpace {
        &self.span
    }

    /// Rational basis of `X`; the restriction coordinates are taken with
    /// respect to this basis.
    pub fn basis(&self) -> Vec<Vec<BigRational>> {
        self.span.annihilator_basis()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr(dim: usize, rows: &[&[i64]]) -> Arrangement {
        Arrangement::new(dim, rows.iter().copied()).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&[2, -4, 6]).unwrap().normal(), &[1, -2, 3]);
        assert_eq!(canonicalize(&[0, 0, 5]).unwrap().normal(), &[0, 0, 1]);
        assert_eq!(canonicalize(&[-1, 1, 0]).unwrap().normal(), &[1, -1, 0]);
        assert!(matches!(canonicalize(&[0, 0]), Err(Error::InvalidHyperplane(_))));
    }

    #[test]
    fn display_as_linear_form() {
        assert_eq!(canonicalize(&[1, 0, 1, 0, -1]).unwrap().to_string(), "x1 + x3 - x5");
        assert_eq!(canonicalize(&[0, 2, 0, 1]).unwrap().to_string(), "2x2 + x4");
    }

    #[test]
    fn deletion_basics() {
        let a = arr(2, &[&[1, 0]]);
        let h = canonicalize(&[1, 0]).unwrap();
        assert_eq!(a.deletion(&h).unwrap(), Arrangement::empty(2));
        let g = canonicalize(&[0, 1]).unwrap();
        assert!(matches!(a.deletion(&g), Err(Error::NotMember(_))));
    }

    #[test]
    fn duplicates_dropped_or_rejected() {
        let a = arr(2, &[&[1, 0], &[2, 0], &[0, 1]]);
        assert_eq!(a.len(), 2);
        assert!(matches!(Arrangement::new_strict(2, [[1, 0], [-3, 0]]), Err(Error::DuplicateHyperplane(_))));
    }

    #[test]
    fn restriction_of_boolean() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let x = Flat::of_hyperplanes(&a, &[0]);
        let r = a.restriction(&x).unwrap();
        assert_eq!(r, arr(2, &[&[1, 0], &[0, 1]]));
        assert_eq!(a.localization(&x).unwrap().len(), 1);
    }

    #[test]
    fn whole_space_conventions() {
        let a = arr(3, &[&[1, 0, 0], &[1, 1, 0]]);
        let v = Flat::whole_space(&a);
        assert_eq!(a.localization(&v).unwrap(), Arrangement::empty(3));
        assert_eq!(a.restriction(&v).unwrap(), a);
        assert_eq!(v.dim(), 3);
    }

    #[test]
    fn restriction_merges_traces() {
        // x, y, x+y restricted to z... all traces distinct; restricted to x: y and x+y coincide
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let r = a.restrict_to(0);
        assert_eq!(r.dim(), 2);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn not_a_flat() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0]]);
        assert!(matches!(Flat::from_normals(&a, &[vec![1, 1, 1]]), Err(Error::NotAFlat)));
        let x = Flat::from_normals(&a, &[vec![1, 1, 0], vec![1, -1, 0]]).unwrap();
        assert_eq!(x.containing(), &[0, 1]);
        let b = arr(3, &[&[0, 0, 1]]);
        assert!(matches!(b.restriction(&x), Err(Error::NotAFlat)));
    }

    #[test]
    fn products() {
        let p = Arrangement::empty(2).product(&Arrangement::empty(3));
        assert_eq!(p, Arrangement::empty(5));
        let q = arr(1, &[&[1]]).product(&arr(1, &[&[1]]));
        assert_eq!(q, arr(2, &[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn ranks_and_essentialization() {
        assert_eq!(Arrangement::empty(4).rank(), 0);
        let b = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(b.rank(), 3);
        let a = arr(3, &[&[1, 1, 0], &[1, -1, 0], &[1, 0, 0], &[0, 1, 0]]);
        let e = a.essentialize();
        assert_eq!(e.kernel_dim, 1);
        assert_eq!(e.arrangement.dim(), 2);
        assert_eq!(e.arrangement.len(), 4);
        assert_eq!(e.basis, vec![0, 1]);
        assert_eq!(e.arrangement.hyperplane(0).normal(), &[1, 0]);
        assert_eq!(e.arrangement.hyperplane(1).normal(), &[0, 1]);
    }

    #[test]
    fn triple_of_boolean() {
        let a = arr(2, &[&[1, 0], &[0, 1]]);
        let t = a.triple(&canonicalize(&[1, 0]).unwrap()).unwrap();
        assert_eq!(t.deletion, arr(2, &[&[0, 1]]));
        // ker x ∩ ker y is the origin, a hyperplane of the line ker x
        assert_eq!(t.restriction, arr(1, &[&[1]]));
    }
}
