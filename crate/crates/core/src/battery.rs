//! The verification battery: every checkable claim about the catalog
//! arrangements, each mapped to a pass, fail or undecided line.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{canonicalize, Arrangement, Flat};
use crate::catalog::{self, arr_a, arr_b, arr_c, arr_d, arr_dpp, flat_x, flat_y, flat_z};
use crate::classes::{
    audit_refutation, chain_to_stair_proof, verify_free_chain, verify_induction_table, verify_stair_proof,
    ClassVerdict, DivisionalSearch, FreeChain, InductionTable, InductiveSearch, Outcome, Refutation,
};
use crate::derivations::{decide, is_free, verify_freeness_certificate, FreenessVerdict};
use crate::error::Result;
use crate::iso::{linear_isomorphic, matroid_isomorphic};
use crate::lattice::{char_poly, Lattice};
use crate::poly::{ExpMultiset, IntPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimVerdict {
    Pass,
    Fail,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub id: String,
    /// What the claim asserts, as stated in the source.
    pub anchor: String,
    pub verdict: ClaimVerdict,
    pub detail: String,
    pub runtime_ms: u128,
    /// Certificate or trace written for this claim, if any.
    pub artifact: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct BatteryConfig {
    /// Run only claims whose id starts with this prefix.
    pub only: Option<String>,
    /// Node budget of every class search.
    pub budget: u64,
    /// Directory for certificates and traces.
    pub out_dir: Option<PathBuf>,
}

struct Finding {
    verdict: ClaimVerdict,
    detail: String,
    artifact: Option<serde_json::Value>,
}

fn pass(detail: impl Into<String>) -> Finding {
    Finding { verdict: ClaimVerdict::Pass, detail: detail.into(), artifact: None }
}

fn fail(detail: impl Into<String>) -> Finding {
    Finding { verdict: ClaimVerdict::Fail, detail: detail.into(), artifact: None }
}

fn check(ok: bool, detail: impl Into<String>) -> Finding {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn with_artifact<T: Serialize>(mut o: Finding, v: &T) -> Finding {
    o.artifact = serde_json::to_value(v).ok();
    o
}

type Run = Box<dyn Fn(&BatteryConfig) -> Result<Finding> + Send + Sync>;

struct Claim {
    id: String,
    anchor: &'static str,
    run: Run,
}

fn claim(id: impl Into<String>, anchor: &'static str, run: impl Fn(&BatteryConfig) -> Result<Finding> + Send + Sync + 'static) -> Claim {
    Claim { id: id.into(), anchor, run: Box::new(run) }
}

fn exps(v: &[u32]) -> ExpMultiset {
    ExpMultiset::new(v.to_vec())
}

fn hyperplane_index(a: &Arrangement, v: &[i64]) -> usize {
    a.index_of(&canonicalize(v).unwrap()).expect("catalog hyperplane")
}

/// Freeness with a re-verified certificate and the expected exponents.
fn free_claim(a: &Arrangement, want: &[u32]) -> Result<Finding> {
    match is_free(a)? {
        FreenessVerdict::Free(cert) => {
            verify_freeness_certificate(a, &cert)?;
            let o = check(cert.exponents == exps(want), format!("free with exponents {}, certificate re-verified", cert.exponents));
            Ok(with_artifact(o, &cert.to_json()))
        }
        FreenessVerdict::NotFree(w) => Ok(fail(format!("not free: {w:?}"))),
    }
}

fn not_free_claim(a: &Arrangement) -> Result<Finding> {
    match is_free(a)? {
        FreenessVerdict::Free(c) => Ok(fail(format!("free with exponents {}", c.exponents))),
        FreenessVerdict::NotFree(w) => Ok(with_artifact(pass(format!("not free: {}", serde_json::to_string(&w)?)), &w)),
    }
}

fn table_claim(a: &Arrangement, table: &InductionTable, want: &[u32], budget: u64) -> Result<Finding> {
    let mut search = InductiveSearch::new(budget);
    let r = verify_induction_table(a, table, &mut search)?;
    let o = match r.failed_step {
        None => check(r.exponents == exps(want), format!("{} steps accepted, exponents {}", r.steps.len(), r.exponents)),
        Some(k) => {
            let why = r.steps.last().map(|s| s.detail.clone()).unwrap_or_default();
            let undecided = why.contains("budget");
            Finding {
                verdict: if undecided { ClaimVerdict::Undecided } else { ClaimVerdict::Fail },
                detail: format!("step {k}: {why}"),
                artifact: None,
            }
        }
    };
    Ok(with_artifact(o, &r))
}

fn chain_claim(a: &Arrangement) -> Result<Finding> {
    let chain = FreeChain { dim: a.dim(), hyperplanes: a.normals().map(<[i64]>::to_vec).collect() };
    let r = verify_free_chain(a, &chain)?;
    let last = r.prefixes.last().and_then(|p| p.exponents.clone());
    let o = check(r.accepted, format!("all {} prefixes free, final exponents {}", r.prefixes.len(), last.map_or("-".into(), |e| e.to_string())));
    Ok(with_artifact(o, &chain))
}

fn undecided(nodes: u64, budget: u64) -> Finding {
    Finding { verdict: ClaimVerdict::Undecided, detail: format!("budget of {budget} nodes exhausted after {nodes}"), artifact: None }
}

/// Trace nodes linearly isomorphic to `target`.
fn nodes_isomorphic_to(r: &Refutation, target: &Arrangement) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for n in &r.nodes {
        if n.dim == target.dim() && n.normals.len() == target.len() && linear_isomorphic(&n.arrangement()?, target).is_some() {
            out.push(n.id);
        }
    }
    Ok(out)
}

/// Non-membership with an audited trace through a node isomorphic to `D″`.
fn refutation_through_dpp(v: ClassVerdict, what: &str) -> Result<Finding> {
    match v {
        ClassVerdict::Member { .. } => Ok(fail(format!("{what}: member"))),
        ClassVerdict::Undecided { nodes, budget } => Ok(undecided(nodes, budget)),
        ClassVerdict::NonMember { refutation } => {
            audit_refutation(&refutation)?;
            let hits = nodes_isomorphic_to(&refutation, &arr_dpp())?;
            let o = check(
                !hits.is_empty(),
                format!("{what}: non-member, trace of {} nodes audited, {} node(s) isomorphic to D''", refutation.nodes.len(), hits.len()),
            );
            Ok(with_artifact(o, &refutation))
        }
    }
}

fn claims() -> Vec<Claim> {
    let mut v = vec![
        claim("catalog-counts", "32, 31, 22, 21 and 16 hyperplanes", |_| {
            let got = [arr_a().len(), arr_b().len(), arr_c().len(), arr_d().len(), arr_dpp().len()];
            Ok(check(got == [32, 31, 22, 21, 16], format!("|A|, |B|, |C|, |D|, |D''| = {got:?}")))
        }),
        claim("A-in-E7", "realized as a subarrangement of the Weyl arrangement A(E7)", |_| {
            let e7 = catalog::e7_positive_roots();
            let inside = arr_a().hyperplanes().iter().filter(|h| e7.contains(h)).count();
            Ok(check(e7.len() == 63 && inside == 32, format!("{} positive roots, {inside} of 32 normals are roots", e7.len())))
        }),
        claim("A-rank", "inductively free arrangement A of rank 7", |_| {
            let r = arr_a().rank();
            Ok(check(r == 7, format!("rank {r}")))
        }),
        claim("A-table", "exp A = {1, 5, 5, 5, 5, 5, 6} with the given induction table", |c| {
            table_claim(&arr_a(), &catalog::table_a(), &[1, 5, 5, 5, 5, 5, 6], c.budget)
        }),
        claim("A-prime-IF", "A' = A minus ker x1 is inductively free with exp {1, 4, 5, 5, 5, 5, 6}", |c| {
            let t = catalog::table_a();
            let last = t.steps.last().unwrap().clone();
            let prefix = InductionTable { dim: t.dim, steps: t.steps[..t.steps.len() - 1].to_vec(), final_exponents: last.before };
            let a = arr_a();
            table_claim(&a.delete_index(hyperplane_index(&a, &[1, 0, 0, 0, 0, 0, 0])), &prefix, &[1, 4, 5, 5, 5, 5, 6], c.budget)
        }),
        claim("B-free", "exp B = {1, 5, 5, 5, 5, 5, 5}", |_| free_claim(&arr_b(), &[1, 5, 5, 5, 5, 5, 5])),
        claim("B-AF", "chain of hyperplanes for B in the additionally free class", |_| chain_claim(&arr_b())),
        claim("B-SF", "additionally free arrangements are stair-free", |_| {
            let b = arr_b();
            let chain = FreeChain { dim: 7, hyperplanes: b.normals().map(<[i64]>::to_vec).collect() };
            let proof = chain_to_stair_proof(&b, &chain)?;
            verify_stair_proof(&b, &proof)?;
            Ok(with_artifact(pass("stair proof from the free chain re-verified"), &proof))
        }),
        claim("B-restrictions", "H1, H' and H6 are the hyperplanes with exp B^H = {1, 5, 5, 5, 5, 5}", |_| {
            let b = arr_b();
            let lat = Lattice::build(&b);
            let want = exps(&[1, 5, 5, 5, 5, 5]);
            let hits: Vec<usize> = (0..b.len())
                .filter(|&i| lat.restriction_char_poly(i).integer_roots().exponents() == Some(&want))
                .collect();
            let expected: Vec<usize> =
                [catalog::H_1, catalog::H_PRIME, catalog::H_6].iter().map(|h| hyperplane_index(&b, h)).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            let names: Vec<String> = hits.iter().map(|&i| b.hyperplane(i).to_string()).collect();
            Ok(check(hits == expected, format!("matching hyperplanes: {}", names.join("; "))))
        }),
        claim("B-restriction-classes", "up to isomorphism there are only two restrictions B''", |_| {
            let b = arr_b();
            let lat = Lattice::build(&b);
            let want = exps(&[1, 5, 5, 5, 5, 5]);
            let res: Vec<Arrangement> = (0..b.len())
                .filter(|&i| lat.restriction_char_poly(i).integer_roots().exponents() == Some(&want))
                .map(|i| b.restrict_to(i))
                .collect();
            let classes = |iso: &dyn Fn(&Arrangement, &Arrangement) -> bool| {
                let mut reps: Vec<&Arrangement> = Vec::new();
                for r in &res {
                    if !reps.iter().any(|x| iso(x, r)) {
                        reps.push(r);
                    }
                }
                reps.len()
            };
            let linear = classes(&|x, y| linear_isomorphic(x, y).is_some());
            let matroid = classes(&|x, y| matroid_isomorphic(x, y).is_some());
            Ok(check(linear == 2, format!("{} restrictions, {linear} linear classes, {matroid} lattice classes", res.len())))
        }),
        claim("B-not-IF", "B is not inductively free", |c| {
            refutation_through_dpp(InductiveSearch::new(c.budget).classify(&arr_b())?, "IF")
        }),
        claim("B-not-DF", "a divisional chain necessarily has to pass through a restriction isomorphic to D''", |c| {
            refutation_through_dpp(DivisionalSearch::new(c.budget).classify(&arr_b())?, "DF")
        }),
        claim("C-table", "exp C = {1, 5, 5, 5, 6} with the given induction table", |c| {
            table_claim(&arr_c(), &catalog::table_c(), &[1, 5, 5, 5, 6], c.budget)
        }),
        claim("C-iso-AZ", "the restriction C := A^Z", |_| {
            let az = arr_a().restriction(&flat_z())?;
            let c = arr_c();
            let m = linear_isomorphic(&c, &az);
            let lattice = matroid_isomorphic(&c, &az).is_some();
            Ok(check(m.is_some(), format!("|A^Z| = {}, linear isomorphism {}, lattice isomorphism {lattice}", az.len(), m.is_some())))
        }),
        claim("C-prime", "C' = C minus ker x4 has exp {1, 4, 5, 5, 6}", |_| {
            let c = arr_c();
            let del = c.delete_index(hyperplane_index(&c, &[0, 0, 0, 1, 0]));
            match decide(&del)? {
                crate::derivations::Decision::Free(e) => Ok(check(e == exps(&[1, 4, 5, 5, 6]), format!("free with exponents {e}"))),
                crate::derivations::Decision::NotFree(w) => Ok(fail(format!("not free: {w:?}"))),
            }
        }),
        claim("C-DF", "C is divisionally free", |c| match DivisionalSearch::new(c.budget).classify(&arr_c())? {
            ClassVerdict::Member { certificate } => {
                crate::classes::verify_class_certificate(&arr_c(), &certificate)?;
                Ok(with_artifact(pass("divisional flag found and replayed"), &certificate))
            }
            ClassVerdict::NonMember { .. } => Ok(fail("non-member")),
            ClassVerdict::Undecided { nodes, budget } => Ok(undecided(nodes, budget)),
        }),
        claim("D-free", "exp D = {1, 5, 5, 5, 5}", |_| free_claim(&arr_d(), &[1, 5, 5, 5, 5])),
        claim("D-AF", "chain of hyperplanes for D in the additionally free class", |_| chain_claim(&arr_d())),
        claim("D-iso-BX", "the restriction D = B^X", |_| {
            let bx = arr_b().restriction(&flat_x())?;
            let d = arr_d();
            let m = linear_isomorphic(&d, &bx).is_some();
            let lattice = matroid_isomorphic(&d, &bx).is_some();
            Ok(check(m, format!("|B^X| = {}, linear isomorphism {m}, lattice isomorphism {lattice}", bx.len())))
        }),
        claim("D-not-IF", "no restriction D'' with matching exponents {1, 5, 5, 5} is inductively free", |c| {
            match InductiveSearch::new(c.budget).classify(&arr_d())? {
                ClassVerdict::Member { .. } => Ok(fail("member")),
                ClassVerdict::Undecided { nodes, budget } => Ok(undecided(nodes, budget)),
                ClassVerdict::NonMember { refutation } => {
                    audit_refutation(&refutation)?;
                    let d = arr_d();
                    let dpp = arr_dpp();
                    let root = refutation.node(refutation.root).unwrap();
                    let mut matched = Vec::new();
                    for cand in &root.candidates {
                        if cand.outcomes.iter().any(|o| !matches!(o, Outcome::Filtered { .. })) {
                            let r = d.restrict_to(hyperplane_index(&d, &cand.hyperplane));
                            matched.push(linear_isomorphic(&r, &dpp).is_some());
                        }
                    }
                    let o = check(
                        !matched.is_empty() && matched.iter().all(|&x| x),
                        format!("non-member; {} exponent-matching restriction(s), all isomorphic to D^(ker x4): {}", matched.len(), matched.iter().all(|&x| x)),
                    );
                    Ok(with_artifact(o, &refutation))
                }
            }
        }),
        claim("D-not-DF", "there is no restriction of D'' with exponents {1, 5, 5}", |c| {
            match DivisionalSearch::new(c.budget).classify(&arr_d())? {
                ClassVerdict::Member { .. } => Ok(fail("member")),
                ClassVerdict::Undecided { nodes, budget } => Ok(undecided(nodes, budget)),
                ClassVerdict::NonMember { refutation } => {
                    audit_refutation(&refutation)?;
                    let dpp = arr_dpp();
                    let mut ok = false;
                    for id in nodes_isomorphic_to(&refutation, &dpp)? {
                        let n = refutation.node(id).unwrap();
                        ok |= n.candidates.iter().all(|c| c.outcomes.iter().all(|o| matches!(o, Outcome::Filtered { .. })));
                    }
                    let o = check(ok, format!("non-member; D'' node has no restriction whose χ divides: {ok}"));
                    Ok(with_artifact(o, &refutation))
                }
            }
        }),
        claim("D-SF", "D is stair-free via its free chain", |_| {
            let d = arr_d();
            let chain = FreeChain { dim: 5, hyperplanes: d.normals().map(<[i64]>::to_vec).collect() };
            let proof = chain_to_stair_proof(&d, &chain)?;
            verify_stair_proof(&d, &proof)?;
            Ok(with_artifact(pass("stair proof from the free chain re-verified"), &proof))
        }),
        claim("Dpp-free", "exp D'' = {1, 5, 5, 5}", |_| free_claim(&arr_dpp(), &[1, 5, 5, 5])),
        claim("Dpp-not-AF", "for any choice of hyperplane in D'', the deletion does not have matching exponents {1, 4, 5, 5}", |_| {
            let dpp = arr_dpp();
            let want = exps(&[1, 4, 5, 5]);
            let mut free_matching = 0;
            let mut free_other = 0;
            for i in 0..dpp.len() {
                match decide(&dpp.delete_index(i))?.exponents() {
                    Some(e) if *e == want => free_matching += 1,
                    Some(_) => free_other += 1,
                    None => {}
                }
            }
            Ok(check(
                dpp.len() == 16 && free_matching == 0,
                format!("16 deletions: {free_matching} free with {want}, {free_other} free with other exponents"),
            ))
        }),
        claim("BY-iso-Dpp", "B^Y = D''", |_| {
            let by = arr_b().restriction(&flat_y())?;
            let m = linear_isomorphic(&by, &arr_dpp()).is_some();
            Ok(check(m, format!("|B^Y| = {}, linear isomorphism {m}", by.len())))
        }),
        claim("B-localization-Y", "B_Y = {H1, H', H6}", |_| {
            let b = arr_b();
            let loc = b.localization(&flat_y())?;
            let want = Arrangement::new(7, [catalog::H_1, catalog::H_PRIME, catalog::H_6])?;
            Ok(check(loc.same_set(&want), format!("B_Y has {} hyperplanes", loc.len())))
        }),
    ];
    let ex = catalog::example_4_1();
    let polys = [
        ("A", ex.arrangement.clone(), vec![1, 3, 3, 4]),
        ("deletion", ex.deletion.clone(), vec![1, 3, 3, 3]),
        ("restriction", ex.restriction.clone(), vec![1, 3, 3]),
    ];
    for (name, a, r) in polys.clone() {
        v.push(claim(format!("ex4.1-chi-{name}"), "characteristic polynomials of the non-free triple", move |_| {
            let chi = char_poly(&a);
            Ok(check(chi == IntPoly::from_roots(r.iter().copied()), format!("χ = {}", IntPoly::factored(&r))))
        }));
    }
    for (name, a, _) in polys {
        v.push(claim(format!("ex4.1-not-free-{name}"), "none of the arrangements in the triple is free", move |_| not_free_claim(&a)));
    }
    for m in 0..=3u32 {
        v.push(claim(format!("ex4.2-m{m}"), "chi(A) = chi(B)(t-m-1), chi(A') = chi(B)(t-m), chi(A'') = chi(B), none free", move |_| {
            let base = catalog::example_4_1().restriction;
            let t = catalog::example_4_2(&base, m)?;
            let chi = char_poly(&base);
            let lin = |c: i64| IntPoly::from_roots([c]);
            let chis = char_poly(&t.arrangement) == chi.mul(&lin(m as i64 + 1))
                && char_poly(&t.deletion) == chi.mul(&lin(m as i64))
                && char_poly(&t.restriction) == chi;
            let free = [&t.arrangement, &t.deletion, &t.restriction]
                .iter()
                .map(|a| decide(a).map(|d| d.is_free()))
                .collect::<Result<Vec<bool>>>()?;
            let idx: Vec<usize> = (0..base.len()).collect();
            let center = Flat::of_hyperplanes(&t.arrangement, &idx);
            let loc = t.arrangement.localization(&center)?;
            let iso = linear_isomorphic(&loc, &base.product(&Arrangement::empty(1))).is_some();
            Ok(check(
                chis && free.iter().all(|f| !f) && iso,
                format!("χ identities {chis}, free {free:?}, localization at the base center isomorphic to the base {iso}"),
            ))
        }));
    }
    v
}

/// Ids of all claims, in report order.
pub fn claim_ids() -> Vec<String> {
    claims().into_iter().map(|c| c.id).collect()
}

/// Runs the selected claims. Reports keep the fixed claim order whatever
/// the completion order; errors inside a claim become failures.
pub fn verify_paper(config: &BatteryConfig) -> Vec<ClaimReport> {
    let selected: Vec<Claim> = claims()
        .into_iter()
        .filter(|c| config.only.as_deref().is_none_or(|p| c.id.starts_with(p)))
        .collect();
    if let Some(dir) = &config.out_dir {
        let _ = std::fs::create_dir_all(dir);
    }
    selected
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let out = (c.run)(config).unwrap_or_else(|e| fail(format!("error: {e}")));
            let runtime_ms = t.elapsed().as_millis();
            let artifact = match (&config.out_dir, &out.artifact) {
                (Some(dir), Some(v)) => {
                    let path = dir.join(format!("{}.json", c.id));
                    let text = serde_json::to_string_pretty(v).unwrap_or_default();
                    std::fs::write(&path, text).ok().map(|_| path.display().to_string())
                }
                _ => None,
            };
            ClaimReport { id: c.id.clone(), anchor: c.anchor.to_string(), verdict: out.verdict, detail: out.detail, runtime_ms, artifact }
        })
        .collect()
}

/// 0 if everything passed, 2 on any failure, 3 if something is undecided
/// and nothing failed.
pub fn exit_code(reports: &[ClaimReport]) -> i32 {
    if reports.iter().any(|r| r.verdict == ClaimVerdict::Fail) {
        2
    } else if reports.iter().any(|r| r.verdict == ClaimVerdict::Undecided) {
        3
    } else {
        0
    }
}
