//! Linear and combinatorial isomorphism of arrangements.
//!
//! Both searches backtrack over hyperplane correspondences and prune with
//! rank-2 flat sizes: for each hyperplane, the sorted sizes of the rank-2
//! flats through it (its profile), and for each pair, the size of the
//! rank-2 flat they span.

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arrangement::{canonicalize_rational, Arrangement, Hyperplane};
use crate::bitset::HypSet;
use crate::lattice::Lattice;
use crate::linalg::{solve_rational, RowSpace};

/// Rank-2 flats of an arrangement, indexed by pairs of hyperplanes.
#[derive(Clone, Debug)]
pub struct Rank2 {
    id: Vec<Vec<u32>>,
    flats: Vec<Vec<usize>>,
}

impl Rank2 {
    pub fn new(a: &Arrangement) -> Rank2 {
        let n = a.len();
        let mut id = vec![vec![u32::MAX; n]; n];
        let mut flats = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if id[i][j] != u32::MAX {
                    continue;
                }
                let span = RowSpace::spanned_by(a.dim(), [a.hyperplane(i).normal(), a.hyperplane(j).normal()]);
                let members: Vec<usize> = (0..n).filter(|&k| span.contains(a.hyperplane(k).normal())).collect();
                let f = flats.len() as u32;
                for &p in &members {
                    for &q in &members {
                        if p != q {
                            id[p][q] = f;
                        }
                    }
                }
                flats.push(members);
            }
        }
        Rank2 { id, flats }
    }

    pub fn flats(&self) -> &[Vec<usize>] {
        &self.flats
    }

    /// Id of the rank-2 flat spanned by two distinct hyperplanes.
    pub fn flat_of(&self, i: usize, j: usize) -> u32 {
        self.id[i][j]
    }

    pub fn size(&self, i: usize, j: usize) -> usize {
        self.flats[self.id[i][j] as usize].len()
    }

    /// Sorted sizes of the rank-2 flats through each hyperplane.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        let n = self.id.len();
        let mut p = vec![Vec::new(); n];
        for f in &self.flats {
            for &i in f {
                p[i].push(f.len());
            }
        }
        for v in &mut p {
            v.sort_unstable();
        }
        p
    }
}

/// Cheap isomorphism invariant: equal for linearly (and combinatorially)
/// isomorphic arrangements of the same ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsoInvariant {
    pub dim: usize,
    pub len: usize,
    pub rank: usize,
    pub profiles: Vec<Vec<usize>>,
}

pub fn invariant(a: &Arrangement) -> IsoInvariant {
    let mut profiles = Rank2::new(a).profiles();
    profiles.sort();
    IsoInvariant { dim: a.dim(), len: a.len(), rank: a.rank(), profiles }
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Coordinates of vectors in the span of a basis, via an invertible square
/// block of the basis matrix.
struct Coords {
    cols: Vec<usize>,
    inv: Vec<Vec<BigRational>>,
}

impl Coords {
    fn new(basis: &[&[i64]]) -> Coords {
        let r = basis.len();
        let dim = basis.first().map_or(0, |b| b.len());
        let mut cols = Vec::new();
        let mut cs = RowSpace::new(r);
        for c in 0..dim {
            let col: Vec<i64> = basis.iter().map(|b| b[c]).collect();
            if cs.insert(&col) {
                cols.push(c);
            }
        }
        // block[c][k] = basis[k][cols[c]]; coords solve block · x = v|cols
        let block: Vec<Vec<BigRational>> = cols.iter().map(|&c| basis.iter().map(|b| q(b[c])).collect()).collect();
        let inv = invert(&block).expect("basis block is invertible");
        Coords { cols, inv }
    }

    fn of(&self, v: &[i64]) -> Vec<BigRational> {
        let rhs: Vec<BigRational> = self.cols.iter().map(|&c| q(v[c])).collect();
        self.inv.iter().map(|row| row.iter().zip(&rhs).map(|(a, b)| a * b).sum()).collect()
    }
}

fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let e: Vec<BigRational> = (0..n).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }).collect();
        cols.push(solve_rational(m, &e)?);
    }
    Some((0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect())
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let m = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..m).map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum()).collect()).collect()
}

/// Rows of `rows` completed by unit vectors to a basis of ℚ^dim.
fn complete(dim: usize, rows: &[&[i64]]) -> Vec<Vec<i64>> {
    let mut span = RowSpace::spanned_by(dim, rows.iter().copied());
    let mut out = Vec::new();
    for c in 0..dim {
        let mut e = vec![0; dim];
        e[c] = 1;
        if span.insert(&e) {
            out.push(e);
        }
    }
    out
}

/// Applies `M` to every normal: `{canonicalize(α M)}`.
pub fn transform(a: &Arrangement, m: &[Vec<BigRational>]) -> Option<Vec<Hyperplane>> {
    a.normals()
        .map(|alpha| {
            let v: Vec<BigRational> =
                (0..m.len()).map(|j| alpha.iter().zip(m).map(|(&x, row)| q(x) * &row[j]).sum()).collect();
            canonicalize_rational(&v).ok()
        })
        .collect()
}

/// Ratio constraints `λ_k / λ_m` between the scalings of the basis images,
/// kept in a weighted union-find.
#[derive(Clone)]
struct Ratios {
    parent: Vec<usize>,
    // λ_k / λ_parent(k)
    weight: Vec<BigRational>,
}

impl Ratios {
    fn new(r: usize) -> Ratios {
        Ratios { parent: (0..r).collect(), weight: vec![BigRational::one(); r] }
    }

    fn find(&self, mut k: usize) -> (usize, BigRational) {
        let mut w = BigRational::one();
        while self.parent[k] != k {
            w *= &self.weight[k];
            k = self.parent[k];
        }
        (k, w)
    }

    /// Records `λ_k / λ_m = ratio`; false on contradiction.
    fn relate(&mut self, k: usize, m: usize, ratio: BigRational) -> bool {
        let (rk, wk) = self.find(k);
        let (rm, wm) = self.find(m);
        if rk == rm {
            return wk / wm == ratio;
        }
        self.weight[rk] = ratio * wm / wk;
        self.parent[rk] = rm;
        true
    }
}

struct LinearSearch<'a> {
    a: &'a Arrangement,
    b: &'a Arrangement,
    ra: Rank2,
    rb: Rank2,
    pa: Vec<Vec<usize>>,
    pb: Vec<Vec<usize>>,
    basis_a: Vec<usize>,
    coords_a: Vec<Vec<BigRational>>,
    rest_a: Vec<usize>,
    target: HashSet<Hyperplane>,
}

fn support(c: &[BigRational]) -> Vec<bool> {
    c.iter().map(|x| !x.is_zero()).collect()
}

impl LinearSearch<'_> {
    fn tuples(&self, tuple: &mut Vec<usize>, span: &RowSpace) -> Option<Vec<Vec<BigRational>>> {
        let k = tuple.len();
        if k == self.basis_a.len() {
            return self.match_rest(tuple);
        }
        let ak = self.basis_a[k];
        for j in 0..self.b.len() {
            if tuple.contains(&j) || self.pb[j] != self.pa[ak] {
                continue;
            }
            if (0..k).any(|m| self.rb.size(tuple[m], j) != self.ra.size(self.basis_a[m], ak)) {
                continue;
            }
            let mut s = span.clone();
            if !s.insert(self.b.hyperplane(j).normal()) {
                continue;
            }
            tuple.push(j);
            if let Some(m) = self.tuples(tuple, &s) {
                return Some(m);
            }
            tuple.pop();
        }
        None
    }

    fn match_rest(&self, tuple: &[usize]) -> Option<Vec<Vec<BigRational>>> {
        let basis_b: Vec<&[i64]> = tuple.iter().map(|&j| self.b.hyperplane(j).normal()).collect();
        let cb = Coords::new(&basis_b);
        let coords_b: Vec<Vec<BigRational>> = self.b.normals().map(|v| cb.of(v)).collect();
        let mut by_support: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
        for j in 0..self.b.len() {
            if !tuple.contains(&j) {
                by_support.entry(support(&coords_b[j])).or_default().push(j);
            }
        }
        let mut used = vec![false; self.b.len()];
        let ratios = self.assign(0, Ratios::new(tuple.len()), &coords_b, &by_support, &mut used)?;
        self.build_matrix(tuple, &ratios)
    }

    fn assign(
        &self,
        pos: usize,
        ratios: Ratios,
        coords_b: &[Vec<BigRational>],
        by_support: &HashMap<Vec<bool>, Vec<usize>>,
        used: &mut [bool],
    ) -> Option<Ratios> {
        let Some(&i) = self.rest_a.get(pos) else {
            return Some(ratios);
        };
        let c = &self.coords_a[i];
        let supp = support(c);
        let idx: Vec<usize> = (0..supp.len()).filter(|&k| supp[k]).collect();
        for &j in by_support.get(&supp).map(Vec::as_slice).unwrap_or(&[]) {
            if used[j] || self.pb[j] != self.pa[i] {
                continue;
            }
            let d = &coords_b[j];
            let mut r = ratios.clone();
            let k0 = idx[0];
            let ok = idx[1..].iter().all(|&k| {
                let ratio = (&d[k] * &c[k0]) / (&c[k] * &d[k0]);
                r.relate(k, k0, ratio)
            });
            if !ok {
                continue;
            }
            used[j] = true;
            if let Some(done) = self.assign(pos + 1, r, coords_b, by_support, used) {
                return Some(done);
            }
            used[j] = false;
        }
        None
    }

    fn build_matrix(&self, tuple: &[usize], ratios: &Ratios) -> Option<Vec<Vec<BigRational>>> {
        let dim = self.a.dim();
        let na: Vec<&[i64]> = self.basis_a.iter().map(|&i| self.a.hyperplane(i).normal()).collect();
        let nb: Vec<&[i64]> = tuple.iter().map(|&j| self.b.hyperplane(j).normal()).collect();
        let mut src: Vec<Vec<BigRational>> = na.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        src.extend(complete(dim, &na).into_iter().map(|r| r.into_iter().map(q).collect()));
        let mut dst: Vec<Vec<BigRational>> = nb
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let lambda = ratios.find(k).1;
                r.iter().map(|&x| q(x) * &lambda).collect()
            })
            .collect();
        dst.extend(complete(dim, &nb).into_iter().map(|r| r.into_iter().map(q).collect()));
        let m = mat_mul(&invert(&src)?, &dst);
        let image: HashSet<Hyperplane> = transform(self.a, &m)?.into_iter().collect();
        (image == self.target).then_some(m)
    }
}

/// An invertible rational matrix `M` with `{canonicalize(α M) : α ∈ a} = b`,
/// if one exists. Arrangements of different ambient dimension are never
/// linearly isomorphic here; essentialize first to compare up to centers.
pub fn linear_isomorphic(a: &Arrangement, b: &Arrangement) -> Option<Vec<Vec<BigRational>>> {
    if a.dim() != b.dim() || a.len() != b.len() {
        return None;
    }
    let ra = Rank2::new(a);
    let rb = Rank2::new(b);
    let pa = ra.profiles();
    let pb = rb.profiles();
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb || a.rank() != b.rank() {
        return None;
    }
    let mut count: HashMap<&Vec<usize>, usize> = HashMap::new();
    for p in &pa {
        *count.entry(p).or_default() += 1;
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by_key(|&i| (count[&pa[i]], i));
    let mut span = RowSpace::new(a.dim());
    let basis_a: Vec<usize> = order.iter().copied().filter(|&i| span.insert(a.hyperplane(i).normal())).collect();
    let na: Vec<&[i64]> = basis_a.iter().map(|&i| a.hyperplane(i).normal()).collect();
    let coords_a: Vec<Vec<BigRational>> = if basis_a.is_empty() {
        Vec::new()
    } else {
        let ca = Coords::new(&na);
        a.normals().map(|v| ca.of(v)).collect()
    };
    let mut rest_a: Vec<usize> = (0..a.len()).filter(|i| !basis_a.contains(i)).collect();
    rest_a.sort_by_key(|&i| (std::cmp::Reverse(support(&coords_a[i]).iter().filter(|&&s| s).count()), i));
    let search = LinearSearch {
        a,
        b,
        ra,
        rb,
        pa,
        pb,
        basis_a,
        coords_a,
        rest_a,
        target: b.hyperplanes().iter().cloned().collect(),
    };
    search.tuples(&mut Vec::new(), &RowSpace::new(a.dim()))
}

/// A bijection `σ` (hyperplane `i` of `a` to `σ[i]` of `b`) inducing an
/// isomorphism of intersection lattices, if one exists.
pub fn matroid_isomorphic(a: &Arrangement, b: &Arrangement) -> Option<Vec<usize>> {
    if a.len() != b.len() || a.rank() != b.rank() {
        return None;
    }
    let ra = Rank2::new(a);
    let rb = Rank2::new(b);
    let pa = ra.profiles();
    let pb = rb.profiles();
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    let mut count: HashMap<&Vec<usize>, usize> = HashMap::new();
    for p in &pa {
        *count.entry(p).or_default() += 1;
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by_key(|&i| (count[&pa[i]], i));
    let la = Lattice::build(a);
    let lb = Lattice::build(b);
    if la.num_flats() != lb.num_flats() {
        return None;
    }
    let flats_b: HashSet<&HypSet> = lb.flats().map(|f| &f.hyps).collect();
    let n = a.len();
    let check = |sigma: &[usize]| {
        la.flats().all(|f| flats_b.contains(&HypSet::from_indices(n, f.hyps.iter().map(|i| sigma[i]))))
    };
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn go(
        pos: usize,
        order: &[usize],
        ra: &Rank2,
        rb: &Rank2,
        pa: &[Vec<usize>],
        pb: &[Vec<usize>],
        sigma: &mut [usize],
        used: &mut [bool],
        check: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        let Some(&k) = order.get(pos) else {
            return check(sigma);
        };
        'cand: for j in 0..used.len() {
            if used[j] || pb[j] != pa[k] {
                continue;
            }
            // rank-2 flats through k must correspond to those through j
            let mut fwd: HashMap<u32, u32> = HashMap::new();
            let mut back: HashMap<u32, u32> = HashMap::new();
            for &i in &order[..pos] {
                let (fa, fb) = (ra.flat_of(i, k), rb.flat_of(sigma[i], j));
                if ra.size(i, k) != rb.size(sigma[i], j)
                    || *fwd.entry(fa).or_insert(fb) != fb
                    || *back.entry(fb).or_insert(fa) != fa
                {
                    continue 'cand;
                }
            }
            sigma[k] = j;
            used[j] = true;
            if go(pos + 1, order, ra, rb, pa, pb, sigma, used, check) {
                return true;
            }
            used[j] = false;
            sigma[k] = usize::MAX;
        }
        false
    }
    go(0, &order, &ra, &rb, &pa, &pb, &mut sigma, &mut used, &check).then_some(sigma)
}
