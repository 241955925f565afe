//! Seeded generators and property checks shared by the property tests and
//! the acceptance run. Every check returns the number of cases examined or
//! a description of the first counterexample.

#![allow(dead_code)]

use freearr::classes::{addition_step, classify, Class, ClassVerdict, DEFAULT_BUDGET};
use freearr::derivations::{decide, is_free, verify_freeness_certificate, FreeCertificate, FreenessVerdict};
use freearr::iso::linear_isomorphic;
use freearr::{catalog, char_poly, char_poly_whitney, Arrangement, ExpMultiset, Lattice};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<usize, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_len` distinct hyperplanes in dimension `dim` with coefficients
/// in [−3, 3]. Half of the time the normals are drawn from the roots of type
/// B (`x_i`, `x_i ± x_j`), which makes free instances common.
pub fn random_arrangement(rng: &mut ChaCha8Rng, dim: usize, max_len: usize) -> Arrangement {
    let len = rng.gen_range(1..=max_len);
    let mut normals: Vec<Vec<i64>> = Vec::new();
    if rng.gen_bool(0.5) {
        let mut pool = Vec::new();
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 1;
            pool.push(e);
            for j in i + 1..dim {
                for s in [1, -1] {
                    let mut v = vec![0; dim];
                    v[i] = 1;
                    v[j] = s;
                    pool.push(v);
                }
            }
        }
        pool.shuffle(rng);
        normals.extend(pool.into_iter().take(len));
    } else {
        while normals.len() < len {
            let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
            if v.iter().any(|&x| x != 0) {
                normals.push(v);
            }
        }
    }
    Arrangement::new(dim, normals).unwrap()
}

pub fn instances(seed: u64, cases: usize, max_dim: usize, max_len: usize) -> Vec<Arrangement> {
    let mut r = rng(seed);
    (0..cases)
        .map(|_| {
            let dim = r.gen_range(2..=max_dim);
            random_arrangement(&mut r, dim, max_len)
        })
        .collect()
}

fn show(a: &Arrangement) -> String {
    freearr::format::emit_arrangement(a).replace('\n', "; ")
}

/// `χ(A) = χ(A′) − χ(A″)` for every hyperplane.
pub fn deletion_restriction(seed: u64, cases: usize) -> Check {
    let mut n = 0;
    for a in instances(seed, cases, 4, 8) {
        let chi = char_poly(&a);
        for i in 0..a.len() {
            let (cd, cr) = (char_poly(&a.delete_index(i)), char_poly(&a.restrict_to(i)));
            if chi != cd.sub(&cr) {
                return Err(format!("{}: hyperplane {i}: χ = {chi}, χ′ = {cd}, χ″ = {cr}", show(&a)));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// `χ(A1 × A2) = χ(A1) χ(A2)`, `|A1 × A2| = |A1| + |A2|`, and
/// `(A1 × A2)^{H ⊕ V2} = A1^H × A2`.
pub fn product_formulas(seed: u64, cases: usize) -> Check {
    let mut r = rng(seed);
    let mut n = 0;
    for _ in 0..cases {
        let d1 = r.gen_range(1..=3);
        let d2 = r.gen_range(1..=4 - d1.min(3));
        let a1 = random_arrangement(&mut r, d1, 5);
        let a2 = random_arrangement(&mut r, d2, 4);
        let p = a1.product(&a2);
        if p.len() != a1.len() + a2.len() {
            return Err(format!("size of {} × {}", show(&a1), show(&a2)));
        }
        if char_poly(&p) != char_poly(&a1).mul(&char_poly(&a2)) {
            return Err(format!("χ of {} × {}", show(&a1), show(&a2)));
        }
        for i in 0..a1.len() {
            let lhs = p.restrict_to(i);
            let rhs = a1.restrict_to(i).product(&a2);
            if !lhs.same_set(&rhs) && linear_isomorphic(&lhs, &rhs).is_none() {
                return Err(format!("restriction of {} × {} at {i}", show(&a1), show(&a2)));
            }
            if char_poly(&lhs) != char_poly(&rhs) {
                return Err(format!("χ of the restriction of {} × {} at {i}", show(&a1), show(&a2)));
            }
        }
        n += 1;
    }
    Ok(n)
}

/// The lattice computation of `χ` agrees with subset expansion.
pub fn whitney_oracle(seed: u64, cases: usize) -> Check {
    for a in instances(seed, cases, 4, 10) {
        let w = char_poly_whitney(&a, 16).map_err(|e| e.to_string())?;
        if w != char_poly(&a) {
            return Err(format!("{}: lattice {} vs subsets {w}", show(&a), char_poly(&a)));
        }
    }
    Ok(cases)
}

fn certificate_round_trip(a: &Arrangement) -> Result<bool, String> {
    match is_free(a).map_err(|e| e.to_string())? {
        FreenessVerdict::Free(c) => {
            verify_freeness_certificate(a, &c).map_err(|e| format!("{}: {e}", show(a)))?;
            let text = serde_json::to_string(&c.to_json()).unwrap();
            let back = FreeCertificate::from_json(&serde_json::from_str(&text).unwrap()).map_err(|e| e.to_string())?;
            if back != c {
                return Err(format!("{}: JSON round trip changed the certificate", show(a)));
            }
            verify_freeness_certificate(a, &back).map_err(|e| e.to_string())?;
            // Dropping a hyperplane the basis was built for must break it
            // unless the smaller arrangement happens to be free with the same
            // degrees, which the degree sum rules out.
            if !a.is_empty() && verify_freeness_certificate(&a.delete_index(0), &c).is_ok() {
                return Err(format!("{}: certificate accepted for a deletion", show(a)));
            }
            Ok(true)
        }
        FreenessVerdict::NotFree(_) => Ok(false),
    }
}

/// Free verdicts carry certificates that re-verify, survive JSON and are
/// specific to their arrangement; verdicts agree with the fast decider.
pub fn saito_round_trip(seed: u64, cases: usize) -> Check {
    let mut free = 0;
    for a in instances(seed, cases, 4, 8) {
        let f = certificate_round_trip(&a)?;
        if f != decide(&a).map_err(|e| e.to_string())?.is_free() {
            return Err(format!("{}: is_free and decide disagree", show(&a)));
        }
        free += f as usize;
    }
    if free == 0 {
        return Err("no free instance generated".into());
    }
    Ok(cases)
}

/// Certificates of the catalog arrangements that are free.
pub fn saito_round_trip_catalog() -> Check {
    let arrs = [catalog::arr_c(), catalog::arr_d(), catalog::arr_dpp()];
    for a in &arrs {
        if !certificate_round_trip(a)? {
            return Err(format!("catalog arrangement with {} hyperplanes not free", a.len()));
        }
    }
    Ok(arrs.len())
}

/// Addition–deletion: any two of `A free with exp {b, c}`, `A′ free with
/// exp {b, c − 1}`, `A″ free with exp {b}` imply the third, and if `A`
/// and `A′` are both free then `A″` is free with `exp A″ ⊂ exp A′`.
pub fn two_of_three(seed: u64, cases: usize) -> Check {
    let mut n = 0;
    for a in instances(seed, cases, 4, 8) {
        let ea = decide(&a).map_err(|e| e.to_string())?.exponents().cloned();
        for i in 0..a.len() {
            let ed = decide(&a.delete_index(i)).map_err(|e| e.to_string())?.exponents().cloned();
            let er = decide(&a.restrict_to(i)).map_err(|e| e.to_string())?.exponents().cloned();
            let bad = |what: &str| Err(format!("{}: hyperplane {i}: {what}; exp A {ea:?}, A′ {ed:?}, A″ {er:?}", show(&a)));
            if let (Some(d), Some(r)) = (&ed, &er) {
                if let Some(x) = addition_step(d, r).unwrap() {
                    if ea.as_ref() != Some(&x) {
                        return bad("addition");
                    }
                }
            }
            if let (Some(x), Some(r)) = (&ea, &er) {
                if let Some(left) = r.difference(x) {
                    let c = left.as_slice()[0];
                    if c >= 1 && ed.as_ref() != Some(&r.with(c - 1)) {
                        return bad("deletion");
                    }
                }
            }
            if let (Some(x), Some(d)) = (&ea, &ed) {
                let Some(r) = &er else { return bad("restriction not free") };
                if r.difference(d).is_none() || addition_step(d, r).unwrap().as_ref() != Some(x) {
                    return bad("restriction exponents");
                }
            }
            n += 1;
        }
    }
    Ok(n)
}

fn verdict(a: &Arrangement, class: Class) -> Result<bool, String> {
    match classify(a, class, DEFAULT_BUDGET).map_err(|e| e.to_string())? {
        ClassVerdict::Member { .. } => Ok(true),
        ClassVerdict::NonMember { .. } => Ok(false),
        ClassVerdict::Undecided { .. } => Err(format!("{}: {class} undecided", show(a))),
    }
}

/// `A1 × A2` is in AF (resp. SF) iff both factors are; total dimension at
/// most 4 and at most 8 hyperplanes.
pub fn product_closure(seed: u64, cases: usize) -> Check {
    let mut r = rng(seed);
    let mut split = [0usize; 2];
    for _ in 0..cases {
        let d1 = r.gen_range(2..=3);
        let d2 = 4 - d1;
        let a1 = random_arrangement(&mut r, d1, if d1 == 3 { 6 } else { 4 });
        let a2 = random_arrangement(&mut r, d2, 8 - a1.len().min(6));
        let p = a1.product(&a2);
        for class in [Class::Af, Class::Sf] {
            let (m1, m2, mp) = (verdict(&a1, class)?, verdict(&a2, class)?, verdict(&p, class)?);
            if mp != (m1 && m2) {
                return Err(format!("{class}: {} ({m1}) × {} ({m2}) gives {mp}", show(&a1), show(&a2)));
            }
            split[mp as usize] += 1;
        }
    }
    if split[0] == 0 || split[1] == 0 {
        return Err(format!("degenerate sample: {split:?} non-members/members"));
    }
    Ok(cases)
}

/// On decided instances: IF ⊆ AF, IF ⊆ DF, AF ∪ DF ⊆ SF, SF ⊆ free.
pub fn class_containments(seed: u64, cases: usize) -> Check {
    for a in instances(seed, cases, 4, 8) {
        let m = |c| verdict(&a, c);
        let (i, af, df, sf) = (m(Class::If)?, m(Class::Af)?, m(Class::Df)?, m(Class::Sf)?);
        let free = decide(&a).map_err(|e| e.to_string())?.is_free();
        if (i && !(af && df)) || ((af || df) && !sf) || (sf && !free) {
            return Err(format!("{}: IF {i} AF {af} DF {df} SF {sf} free {free}", show(&a)));
        }
    }
    Ok(cases)
}

/// Every localization of the additionally free arrangement `D` is
/// additionally free.
pub fn af_localization_closure_d() -> Check {
    let d = catalog::arr_d();
    let lat = Lattice::build(&d);
    let mut seen: std::collections::HashSet<_> = Default::default();
    let mut n = 0;
    for f in lat.flats() {
        let loc = d.localization(&lat.to_flat(f)).map_err(|e| e.to_string())?;
        if !seen.insert(loc.canonical_key()) {
            continue;
        }
        if !verdict(&loc, Class::Af)? {
            return Err(format!("localization {} is not AF", show(&loc)));
        }
        n += 1;
    }
    Ok(n)
}

pub fn exps(v: &[u32]) -> ExpMultiset {
    ExpMultiset::new(v.to_vec())
}
