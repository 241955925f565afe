//! Arrangements, flats and families used by the verification battery.
//!
//! Normals are stored as text under `data/catalog` and embedded at build
//! time; `SHA256SUMS` in that directory pins their contents.

use crate::arrangement::{canonicalize, Arrangement, Flat, Triple};
use crate::classes::InductionTable;
use crate::error::{Error, Result};
use crate::format::parse_arrangement;

pub const A_TXT: &str = include_str!("../data/catalog/A.txt");
pub const B_TXT: &str = include_str!("../data/catalog/B.txt");
pub const C_TXT: &str = include_str!("../data/catalog/C.txt");
pub const D_TXT: &str = include_str!("../data/catalog/D.txt");
pub const TABLE_A_TXT: &str = include_str!("../data/catalog/table_A.txt");
pub const TABLE_C_TXT: &str = include_str!("../data/catalog/table_C.txt");
pub const SHA256SUMS: &str = include_str!("../data/catalog/SHA256SUMS");

/// Embedded data files by name, as listed in `SHA256SUMS`.
pub fn data_files() -> [(&'static str, &'static str); 6] {
    [
        ("A.txt", A_TXT),
        ("B.txt", B_TXT),
        ("C.txt", C_TXT),
        ("D.txt", D_TXT),
        ("table_A.txt", TABLE_A_TXT),
        ("table_C.txt", TABLE_C_TXT),
    ]
}

fn load(text: &str) -> Arrangement {
    parse_arrangement(text, true).expect("embedded catalog file parses")
}

/// 32 hyperplanes of `A(E7)` in simple-root coordinates, in induction order.
pub fn arr_a() -> Arrangement {
    load(A_TXT)
}

/// `A ∖ {ker(x3 + x4)}`.
pub fn arr_b() -> Arrangement {
    load(B_TXT)
}

/// 22 hyperplanes in dimension 5, in induction order.
pub fn arr_c() -> Arrangement {
    load(C_TXT)
}

/// `C ∖ {ker(x1 + x2)}`.
pub fn arr_d() -> Arrangement {
    load(D_TXT)
}

/// `D^{ker x4}`.
pub fn arr_dpp() -> Arrangement {
    let d = arr_d();
    let i = d.index_of(&canonicalize(&[0, 0, 0, 1, 0]).unwrap()).expect("x4 is in D");
    d.restrict_to(i)
}

pub fn table_a() -> InductionTable {
    InductionTable::parse(TABLE_A_TXT).expect("embedded table parses")
}

pub fn table_c() -> InductionTable {
    InductionTable::parse(TABLE_C_TXT).expect("embedded table parses")
}

/// `x1 + x2 + 2x3 + 2x4 + 2x5 + x6`.
pub const H_PRIME: [i64; 7] = [1, 1, 2, 2, 2, 1, 0];
pub const H_1: [i64; 7] = [1, 0, 0, 0, 0, 0, 0];
pub const H_6: [i64; 7] = [0, 0, 0, 0, 0, 1, 0];

fn flat(a: &Arrangement, normals: &[&[i64]]) -> Flat {
    let v: Vec<Vec<i64>> = normals.iter().map(|n| n.to_vec()).collect();
    Flat::from_normals(a, &v).expect("catalog flat")
}

/// `ker x1 ∩ H′` in `A`.
pub fn flat_z() -> Flat {
    flat(&arr_a(), &[&H_1, &H_PRIME])
}

/// `ker x1 ∩ ker x6` in `B`.
pub fn flat_x() -> Flat {
    flat(&arr_b(), &[&H_1, &H_6])
}

/// `ker x1 ∩ H′ ∩ ker x6` in `B`.
pub fn flat_y() -> Flat {
    flat(&arr_b(), &[&H_1, &H_PRIME, &H_6])
}

/// Positive roots of E7 in the simple-root basis, generated from the Cartan
/// matrix (chain 1-3-4-5-6-7, node 2 attached to node 4).
pub fn e7_positive_roots() -> Arrangement {
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 3)];
    let mut cartan = [[0i64; 7]; 7];
    for (i, row) in cartan.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(i, j) in &edges {
        cartan[i][j] = -1;
        cartan[j][i] = -1;
    }
    let roots = positive_roots(&cartan);
    Arrangement::new(7, roots).expect("roots are nonzero and distinct")
}

/// Closure by root strings for a simply laced Cartan matrix: for a root `β`
/// and simple `α_i`, `β + α_i` is a root iff `p − ⟨β, α_i^∨⟩ > 0` where `p`
/// is the length of the string below `β`.
fn positive_roots<const N: usize>(cartan: &[[i64; N]; N]) -> Vec<Vec<i64>> {
    use std::collections::HashSet;
    let mut all: Vec<Vec<i64>> = (0..N)
        .map(|i| {
            let mut v = vec![0; N];
            v[i] = 1;
            v
        })
        .collect();
    let mut seen: HashSet<Vec<i64>> = all.iter().cloned().collect();
    let mut layer = all.clone();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for beta in &layer {
            for i in 0..N {
                let pairing: i64 = (0..N).map(|j| beta[j] * cartan[j][i]).sum();
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if down[i] >= 0 && seen.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - pairing > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if seen.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        next.sort();
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// The 11 hyperplanes `w, x, y, z, x+y, x+z, x−z, y−z, y+z, x+y−z, w+x−y`
/// in coordinates `(w, x, y, z)`, with the triple at `x + y − z`.
pub fn example_4_1() -> Triple {
    let a = Arrangement::new(
        4,
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [0, 1, 1, 0],
            [0, 1, 0, 1],
            [0, 1, 0, -1],
            [0, 0, 1, -1],
            [0, 0, 1, 1],
            [0, 1, 1, -1],
            [1, 1, -1, 0],
        ],
    )
    .expect("valid normals");
    a.triple(&canonicalize(&[0, 1, 1, -1]).unwrap()).expect("member")
}

/// Embeds `base` (which must contain a coordinate hyperplane `ker x`, the
/// first one is used) in one more dimension with new coordinate `z`, adds
/// `ker z` and `ker(kx − z)` for `k = 1..=m`, and returns the triple at
/// `ker(mx − z)`.
pub fn example_4_2(base: &Arrangement, m: u32) -> Result<Triple> {
    let l = base.dim();
    let x = (0..l)
        .find(|&i| {
            let mut e = vec![0; l];
            e[i] = 1;
            base.normals().any(|n| n == e.as_slice())
        })
        .ok_or_else(|| Error::PreconditionViolated("base has no coordinate hyperplane".into()))?;
    let form = |k: i64| {
        let mut v = vec![0i64; l + 1];
        v[x] = k;
        v[l] = -1;
        v
    };
    let mut normals: Vec<Vec<i64>> = base
        .normals()
        .map(|n| {
            let mut v = n.to_vec();
            v.push(0);
            v
        })
        .collect();
    for k in 0..=m as i64 {
        normals.push(form(k));
    }
    let a = Arrangement::new(l + 1, normals)?;
    a.triple(&canonicalize(&form(m as i64))?)
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub provenance: &'static str,
    pub arrangement: fn() -> Arrangement,
}

pub fn entries() -> Vec<CatalogEntry> {
    fn ex(t: fn(Triple) -> Arrangement) -> Arrangement {
        t(example_4_1())
    }
    vec![
        CatalogEntry { name: "A", provenance: "inductively free subarrangement of A(E7), induction order", arrangement: arr_a },
        CatalogEntry { name: "B", provenance: "A without ker(x3+x4)", arrangement: arr_b },
        CatalogEntry { name: "C", provenance: "rank-5 arrangement isomorphic to A^Z, induction order", arrangement: arr_c },
        CatalogEntry { name: "D", provenance: "C without ker(x1+x2)", arrangement: arr_d },
        CatalogEntry { name: "Dpp", provenance: "restriction of D to ker x4", arrangement: arr_dpp },
        CatalogEntry { name: "E7", provenance: "positive roots of E7", arrangement: e7_positive_roots },
        CatalogEntry { name: "ex4.1", provenance: "non-free triple with splitting polynomials", arrangement: || ex(|t| t.arrangement) },
        CatalogEntry { name: "ex4.1-deletion", provenance: "deletion of ker(x+y-z)", arrangement: || ex(|t| t.deletion) },
        CatalogEntry { name: "ex4.1-restriction", provenance: "restriction to ker(x+y-z)", arrangement: || ex(|t| t.restriction) },
    ]
}

pub fn get(name: &str) -> Result<Arrangement> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| (e.arrangement)())
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::emit_arrangement;
    use crate::lattice::char_poly;
    use crate::poly::IntPoly;

    #[test]
    fn counts() {
        assert_eq!(arr_a().len(), 32);
        assert_eq!(arr_b().len(), 31);
        assert_eq!(arr_c().len(), 22);
        assert_eq!(arr_d().len(), 21);
        assert_eq!(arr_dpp().len(), 16);
        assert_eq!(arr_a().rank(), 7);
    }

    #[test]
    fn deletions_match_files() {
        let a = arr_a();
        let b = a.deletion(&canonicalize(&[0, 0, 1, 1, 0, 0, 0]).unwrap()).unwrap();
        assert_eq!(emit_arrangement(&b), B_TXT);
        let c = arr_c();
        let d = c.deletion(&canonicalize(&[1, 1, 0, 0, 0]).unwrap()).unwrap();
        assert_eq!(emit_arrangement(&d), D_TXT);
    }

    #[test]
    fn e7_roots() {
        let e7 = e7_positive_roots();
        assert_eq!(e7.len(), 63);
        let highest: Vec<i64> = vec![2, 2, 3, 4, 3, 2, 1];
        assert!(e7.normals().any(|n| n == highest.as_slice()));
        assert_eq!(e7.normals().map(|n| n.iter().sum::<i64>()).max(), Some(17));
        assert!(arr_a().hyperplanes().iter().all(|h| e7.contains(h)));
    }

    #[test]
    fn localization_at_y() {
        let b = arr_b();
        let got: Vec<Vec<i64>> = b.localization(&flat_y()).unwrap().normals().map(<[i64]>::to_vec).collect();
        assert_eq!(got, vec![H_6.to_vec(), H_PRIME.to_vec(), H_1.to_vec()]);
    }

    #[test]
    fn example_4_1_polynomials() {
        let t = example_4_1();
        assert_eq!(t.arrangement.len(), 11);
        assert_eq!(char_poly(&t.arrangement), IntPoly::from_roots([1, 3, 3, 4]));
        assert_eq!(char_poly(&t.deletion), IntPoly::from_roots([1, 3, 3, 3]));
        assert_eq!(char_poly(&t.restriction), IntPoly::from_roots([1, 3, 3]));
    }

    #[test]
    fn example_4_2_family() {
        let base = example_4_1().restriction;
        let chi = char_poly(&base);
        for m in 0..3u32 {
            let t = example_4_2(&base, m).unwrap();
            assert_eq!(t.arrangement.len(), base.len() + m as usize + 1);
            let lin = |c: i64| IntPoly::from_roots([c]);
            assert_eq!(char_poly(&t.arrangement), chi.mul(&lin(m as i64 + 1)));
            assert_eq!(char_poly(&t.deletion), chi.mul(&lin(m as i64)));
            assert_eq!(char_poly(&t.restriction), chi);
        }
        let no_coordinate = Arrangement::new(2, [[1, 1], [1, -1]]).unwrap();
        assert!(matches!(example_4_2(&no_coordinate, 1), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn lookup() {
        assert_eq!(get("D").unwrap().len(), 21);
        assert!(matches!(get("nope"), Err(Error::UnknownCatalogEntry(_))));
    }
}
