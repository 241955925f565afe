//! Intersection lattice, Möbius function and characteristic polynomial.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::arrangement::{Arrangement, Flat};
use crate::bitset::HypSet;
use crate::error::{Error, Result};
use crate::linalg::RowSpace;
use crate::poly::IntPoly;

/// Default size limit for [`char_poly_whitney`].
pub const WHITNEY_BOUND: usize = 20;

#[derive(Clone, Debug)]
pub struct LatticeFlat {
    /// Hyperplanes containing the flat.
    pub hyps: HypSet,
    /// Reduced span of their normals (the annihilator of the flat).
    pub span: RowSpace,
    pub mu: i64,
}

impl LatticeFlat {
    pub fn rank(&self) -> usize {
        self.span.rank()
    }
}

/// `L(A)` stratified by rank. Flats within a stratum are sorted by their
/// hyperplane sets, so the layout does not depend on scheduling.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    n: usize,
    strata: Vec<Vec<LatticeFlat>>,
}

impl Lattice {
    pub fn build(a: &Arrangement) -> Lattice {
        let n = a.len();
        let normals: Vec<&[i64]> = a.normals().collect();
        let mut strata = vec![vec![LatticeFlat { hyps: HypSet::empty(n), span: RowSpace::new(a.dim()), mu: 1 }]];
        loop {
            let last = strata.last().unwrap();
            // each flat X is covered by one flat per class of equal residues
            // of the normals modulo the span of X
            let covers: Vec<Vec<(HypSet, usize)>> = last
                .par_iter()
                .map(|x| {
                    let mut groups: HashMap<Vec<i64>, (HypSet, usize)> = HashMap::new();
                    let mut order = Vec::new();
                    for (i, v) in normals.iter().enumerate() {
                        if x.hyps.contains(i) {
                            continue;
                        }
                        let r = x.span.residue(v).expect("hyperplane outside the flat has nonzero residue");
                        groups
                            .entry(r)
                            .or_insert_with_key(|k| {
                                order.push(k.clone());
                                let mut s = x.hyps.clone();
                                s.insert(i);
                                (s, i)
                            })
                            .0
                            .insert(i);
                    }
                    order.into_iter().map(|k| groups.remove(&k).unwrap()).collect()
                })
                .collect();
            let mut next: HashMap<HypSet, (usize, usize)> = HashMap::new();
            for (xi, cs) in covers.into_iter().enumerate() {
                for (hyps, rep) in cs {
                    next.entry(hyps).or_insert((xi, rep));
                }
            }
            if next.is_empty() {
                break;
            }
            let mut flats: Vec<LatticeFlat> = next
                .into_iter()
                .map(|(hyps, (xi, rep))| {
                    let mut span = last[xi].span.clone();
                    span.insert(normals[rep]);
                    LatticeFlat { hyps, span, mu: 0 }
                })
                .collect();
            flats.sort_by(|a, b| a.hyps.cmp(&b.hyps));
            let mus: Vec<i64> = flats
                .par_iter()
                .map(|x| {
                    let r = strata.len();
                    match r {
                        1 => -1,
                        2 => x.hyps.len() as i64 - 1,
                        _ => -strata.iter().flatten().filter(|y| y.hyps.is_subset(&x.hyps)).map(|y| y.mu).sum::<i64>(),
                    }
                })
                .collect();
            for (f, m) in flats.iter_mut().zip(mus) {
                f.mu = m;
            }
            strata.push(flats);
        }
        Lattice { dim: a.dim(), n, strata }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank of the arrangement (the top rank).
    pub fn rank(&self) -> usize {
        self.strata.len() - 1
    }

    pub fn num_flats(&self) -> usize {
        self.strata.iter().map(Vec::len).sum()
    }

    pub fn flats_of_rank(&self, r: usize) -> &[LatticeFlat] {
        self.strata.get(r).map(|s| s.as_slice()).unwrap_or(&[])
    }

    pub fn flats(&self) -> impl Iterator<Item = &LatticeFlat> {
        self.strata.iter().flatten()
    }

    /// Converts a lattice element into a [`Flat`] of the arrangement the
    /// lattice was built from.
    pub fn to_flat(&self, f: &LatticeFlat) -> Flat {
        Flat::from_parts(f.span.clone(), f.hyps.iter().collect())
    }

    pub fn char_poly(&self) -> IntPoly {
        let mut c = vec![0i64; self.dim + 1];
        for f in self.flats() {
            c[self.dim - f.rank()] += f.mu;
        }
        IntPoly::new(c)
    }

    /// `χ(A^X)` for the flat `X` with hyperplane set `bottom`, computed from
    /// the interval of `L(A)` above `X`.
    pub fn interval_char_poly(&self, bottom: &HypSet) -> IntPoly {
        let start = self
            .flats()
            .find(|f| f.hyps == *bottom)
            .map(LatticeFlat::rank)
            .expect("bottom is a flat of this lattice");
        let mut c = vec![0i64; self.dim - start + 1];
        let mut mus: Vec<Vec<i64>> = Vec::new();
        let mut members: Vec<Vec<&LatticeFlat>> = Vec::new();
        for r in start..self.strata.len() {
            let here: Vec<&LatticeFlat> = self.strata[r].iter().filter(|f| bottom.is_subset(&f.hyps)).collect();
            let mut m = Vec::with_capacity(here.len());
            for f in &here {
                let mu = if r == start {
                    1
                } else {
                    -members
                        .iter()
                        .zip(&mus)
                        .flat_map(|(fs, ms)| fs.iter().zip(ms))
                        .filter(|(y, _)| y.hyps.is_subset(&f.hyps))
                        .map(|(_, &mu)| mu)
                        .sum::<i64>()
                };
                c[self.dim - r] += mu;
                m.push(mu);
            }
            members.push(here);
            mus.push(m);
        }
        IntPoly::new(c)
    }

    /// `χ(A^H)` for the hyperplane with index `i`.
    pub fn restriction_char_poly(&self, i: usize) -> IntPoly {
        self.interval_char_poly(&HypSet::from_indices(self.n, [i]))
    }

    /// Hyperplane sets of the rank-2 flats.
    pub fn rank2_sets(&self) -> Vec<Vec<usize>> {
        self.flats_of_rank(2).iter().map(|f| f.hyps.iter().collect()).collect()
    }
}

/// `χ(A, t) = Σ_{X ∈ L(A)} μ(X) t^{dim X}`.
pub fn char_poly(a: &Arrangement) -> IntPoly {
    Lattice::build(a).char_poly()
}

/// Subset expansion `Σ_{B ⊆ A} (−1)^{|B|} t^{ℓ − rank B}`, independent of
/// the lattice code. Refuses more than `bound` hyperplanes.
pub fn char_poly_whitney(a: &Arrangement, bound: usize) -> Result<IntPoly> {
    if a.len() > bound {
        return Err(Error::OracleTooLarge { size: a.len(), bound });
    }
    let normals: Vec<&[i64]> = a.normals().collect();
    let mut c = vec![0i64; a.dim() + 1];
    fn walk(normals: &[&[i64]], i: usize, span: &RowSpace, size: usize, c: &mut [i64]) {
        if i == normals.len() {
            let sign = if size.is_multiple_of(2) { 1 } else { -1 };
            c[span.dim() - span.rank()] += sign;
            return;
        }
        walk(normals, i + 1, span, size, c);
        let mut s = span.clone();
        s.insert(normals[i]);
        walk(normals, i + 1, &s, size + 1, c);
    }
    walk(&normals, 0, &RowSpace::new(a.dim()), 0, &mut c);
    Ok(IntPoly::new(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr(dim: usize, rows: &[&[i64]]) -> Arrangement {
        Arrangement::new(dim, rows.iter().copied()).unwrap()
    }

    #[test]
    fn boolean_plane_lattice() {
        let a = arr(2, &[&[1, 0], &[0, 1]]);
        let l = Lattice::build(&a);
        assert_eq!(l.num_flats(), 4);
        assert_eq!(l.char_poly(), IntPoly::from_roots([1, 1]));
    }

    #[test]
    fn empty_arrangement() {
        let l = Lattice::build(&Arrangement::empty(3));
        assert_eq!(l.num_flats(), 1);
        assert_eq!(l.char_poly(), IntPoly::monomial(3));
    }

    #[test]
    fn three_concurrent_lines() {
        let a = arr(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let want = IntPoly::from_roots([1, 2]);
        assert_eq!(char_poly(&a), want);
        assert_eq!(char_poly_whitney(&a, WHITNEY_BOUND).unwrap(), want);
    }

    #[test]
    fn braid_arrangement_a3() {
        let a = arr(4, &[&[1, -1, 0, 0], &[1, 0, -1, 0], &[1, 0, 0, -1], &[0, 1, -1, 0], &[0, 1, 0, -1], &[0, 0, 1, -1]]);
        assert_eq!(char_poly(&a), IntPoly::from_roots([0, 1, 2, 3]));
        let l = Lattice::build(&a);
        // rank-2 flats: 4 triple points and 3 pairs
        assert_eq!(l.flats_of_rank(2).len(), 7);
    }

    #[test]
    fn restriction_from_interval() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let l = Lattice::build(&a);
        for i in 0..a.len() {
            assert_eq!(l.restriction_char_poly(i), char_poly(&a.restrict_to(i)), "hyperplane {i}");
        }
    }

    #[test]
    fn mobius_row_sums_vanish() {
        let a = arr(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0], &[1, -1, 2]]);
        let l = Lattice::build(&a);
        for x in l.flats().filter(|f| f.rank() > 0) {
            let s: i64 = l.flats().filter(|y| y.hyps.is_subset(&x.hyps)).map(|y| y.mu).sum();
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn oracle_bound() {
        let a = arr(1, &[&[1]]);
        assert!(matches!(char_poly_whitney(&a, 0), Err(Error::OracleTooLarge { size: 1, bound: 0 })));
    }
}
