//! Inductively, additionally, divisionally and stair-free arrangements.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{canonicalize, Arrangement, Hyperplane};
use crate::bitset::HypSet;
use crate::derivations::{decide, Decision, NonFreeWitness};
use crate::error::{Error, Result};
use crate::iso::{invariant, linear_isomorphic, IsoInvariant};
use crate::lattice::{char_poly, Lattice};
use crate::poly::{ExpMultiset, IntPoly};

/// One row of an induction table: exponents of the arrangement before the
/// addition, the added hyperplane, and the exponents of the restriction to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductionStep {
    pub before: ExpMultiset,
    pub hyperplane: Vec<i64>,
    pub restriction: ExpMultiset,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductionTable {
    pub dim: usize,
    pub steps: Vec<InductionStep>,
    pub final_exponents: ExpMultiset,
}

impl InductionTable {
    /// Text form: `dim ℓ`, then rows `b1 .. bℓ | normal | c1 .. cℓ−1`, then
    /// `final e1 .. eℓ`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<InductionTable> {
        let err = |line: usize, m: String| Error::Parse { line, message: m };
        let ints = |line: usize, s: &str| -> Result<Vec<i64>> {
            s.split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| err(line, format!("bad integer `{t}`: {e}"))))
                .collect()
        };
        let exps = |line: usize, s: &str| -> Result<ExpMultiset> {
            let v = ints(line, s)?;
            if v.iter().any(|&x| x < 0) {
                return Err(err(line, "negative exponent".into()));
            }
            Ok(ExpMultiset::new(v.into_iter().map(|x| x as u32).collect()))
        };
        let mut dim = None;
        let mut steps = Vec::new();
        let mut fin = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some(l) = dim else {
                let n = body
                    .strip_prefix("dim")
                    .ok_or_else(|| err(line, "expected header `dim <n>`".into()))?
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| err(line, format!("bad dimension: {e}")))?;
                dim = Some(n);
                continue;
            };
            if fin.is_some() {
                return Err(err(line, "rows after the final line".into()));
            }
            if let Some(rest) = body.strip_prefix("final") {
                let e = exps(line, rest)?;
                if e.len() != l {
                    return Err(err(line, format!("expected {l} final exponents")));
                }
                fin = Some(e);
                continue;
            }
            let parts: Vec<&str> = body.split('|').collect();
            if parts.len() != 3 {
                return Err(err(line, "expected `before | normal | restriction`".into()));
            }
            let before = exps(line, parts[0])?;
            let normal = ints(line, parts[1])?;
            let restriction = exps(line, parts[2])?;
            if before.len() != l || normal.len() != l || restriction.len() + 1 != l {
                return Err(err(line, "row lengths do not match the dimension".into()));
            }
            steps.push(InductionStep { before, hyperplane: normal, restriction });
        }
        let dim = dim.ok_or_else(|| err(0, "missing `dim` header".into()))?;
        let final_exponents = fin.ok_or_else(|| err(0, "missing `final` line".into()))?;
        Ok(InductionTable { dim, steps, final_exponents })
    }

    pub fn emit(&self) -> String {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        let mut s = format!("dim {}\n", self.dim);
        for st in &self.steps {
            let n: Vec<String> = st.hyperplane.iter().map(i64::to_string).collect();
            let _ = writeln!(s, "{} | {} | {}", join(st.before.as_slice()), n.join(" "), join(st.restriction.as_slice()));
        }
        let _ = writeln!(s, "final {}", join(self.final_exponents.as_slice()));
        s
    }

    /// The added hyperplanes, canonicalised, in table order.
    pub fn hyperplanes(&self) -> Result<Vec<Hyperplane>> {
        self.steps.iter().map(|s| canonicalize(&s.hyperplane)).collect()
    }

    /// The arrangement built by the table, in table order.
    pub fn arrangement(&self) -> Result<Arrangement> {
        Arrangement::new_strict(self.dim, self.steps.iter().map(|s| s.hyperplane.clone()))
    }
}

/// Exponents of `A` from those of `A′` and `A″` when the addition theorem
/// applies: `exp A″ ⊆ exp A′` with leftover `b`, giving `exp A″ ∪ {b + 1}`.
pub fn addition_step(exp_deletion: &ExpMultiset, exp_restriction: &ExpMultiset) -> Result<Option<ExpMultiset>> {
    if exp_restriction.len() + 1 != exp_deletion.len() {
        return Err(Error::InvalidShapes(format!(
            "restriction has {} exponents, deletion {}",
            exp_restriction.len(),
            exp_deletion.len()
        )));
    }
    Ok(exp_restriction.difference(exp_deletion).map(|left| exp_restriction.with(left.as_slice()[0] + 1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    If,
    Af,
    Df,
    Sf,
}

impl std::str::FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "if" => Ok(Class::If),
            "af" => Ok(Class::Af),
            "df" => Ok(Class::Df),
            "sf" => Ok(Class::Sf),
            _ => Err(format!("unknown class `{s}` (expected if, af, df or sf)")),
        }
    }
}

impl std::fmt::Display for Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Class::If => "IF",
            Class::Af => "AF",
            Class::Df => "DF",
            Class::Sf => "SF",
        })
    }
}

/// Default node budget of each search.
pub const DEFAULT_BUDGET: u64 = 200_000;

/// `FREEARR_BUDGET` if set and valid, else [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u64 {
    std::env::var("FREEARR_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// Hyperplanes in the order they are added, starting from the empty
/// arrangement; every prefix is free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeChain {
    pub dim: usize,
    pub hyperplanes: Vec<Vec<i64>>,
}

/// Successive hyperplanes `H_1, H_2, …`, each given in the coordinates of
/// the previous restriction, such that each restriction's `χ` divides the
/// previous one, down to rank 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisionalFlag {
    pub dim: usize,
    pub hyperplanes: Vec<Vec<i64>>,
}

/// Derivation of an arrangement from the empty one by addition steps and
/// division extensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum StairProof {
    Empty { dim: usize },
    Addition { hyperplane: Vec<i64>, restriction_exponents: ExpMultiset, deletion: Box<StairProof> },
    Division { hyperplane: Vec<i64>, restriction: Box<StairProof> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassCertificate {
    InductionTable(InductionTable),
    FreeChain(FreeChain),
    DivisionalFlag(DivisionalFlag),
    StairProof { proof: StairProof },
}

impl ClassCertificate {
    pub fn class(&self) -> Class {
        match self {
            ClassCertificate::InductionTable(_) => Class::If,
            ClassCertificate::FreeChain(_) => Class::Af,
            ClassCertificate::DivisionalFlag(_) => Class::Df,
            ClassCertificate::StairProof { .. } => Class::Sf,
        }
    }
}

/// Which construction a candidate hyperplane was examined for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// The restriction must be in the class (inductive freeness).
    Restriction,
    /// The deletion must be in the class.
    Deletion,
    /// Addition step: deletion in the class, restriction free.
    Addition,
    /// Division extension: restriction in the class, `χ` divisibility.
    Division,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    /// The necessary condition on characteristic polynomials fails.
    Filtered { branch: Branch, reason: String },
    /// The relevant restriction or deletion is the refuted trace node.
    Refuted { branch: Branch, node: usize },
    /// The restriction is linearly isomorphic to the refuted trace node.
    Isomorphic { branch: Branch, node: usize },
    /// The relevant deletion (AF) or restriction (SF addition) is not free
    /// with the required exponents.
    NotFree { branch: Branch, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCandidate {
    pub hyperplane: Vec<i64>,
    /// Coefficients of `χ(A^H)`, constant term first.
    pub restriction_chi: Vec<i64>,
    pub outcomes: Vec<Outcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NodeReason {
    ChiDoesNotSplit,
    NotFree { witness: String },
    /// Every hyperplane was examined and none leads to membership.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub id: usize,
    pub dim: usize,
    pub normals: Vec<Vec<i64>>,
    /// Coefficients of `χ(A)`, constant term first.
    pub chi: Vec<i64>,
    pub reason: NodeReason,
    pub candidates: Vec<TraceCandidate>,
}

impl TraceNode {
    pub fn arrangement(&self) -> Result<Arrangement> {
        Arrangement::new_strict(self.dim, self.normals.iter())
    }
}

/// Non-membership proof: the root node and every node it depends on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub class: Class,
    pub root: usize,
    pub nodes: Vec<TraceNode>,
}

impl Refutation {
    pub fn node(&self, id: usize) -> Option<&TraceNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClassVerdict {
    Member { certificate: ClassCertificate },
    NonMember { refutation: Refutation },
    /// The node budget ran out before a decision.
    Undecided { nodes: u64, budget: u64 },
}

impl ClassVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, ClassVerdict::Member { .. })
    }

    pub fn is_non_member(&self) -> bool {
        matches!(self, ClassVerdict::NonMember { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClassVerdict::Member { .. } => "member",
            ClassVerdict::NonMember { .. } => "non-member",
            ClassVerdict::Undecided { .. } => "undecided",
        }
    }
}

fn exps_of(chi: &IntPoly) -> Option<ExpMultiset> {
    chi.integer_roots().exponents().cloned()
}

/// `χ(A^H)` splits with `exp A^H = exp A ∖ {c}`, `c ≥ 1`, and
/// `χ(A ∖ H) = χ(A) + χ(A^H)` has roots `exp A^H ∪ {c − 1}`.
fn inductive_filter(exps: &ExpMultiset, chi: &IntPoly, chi_res: &IntPoly) -> std::result::Result<(), String> {
    let e2 = exps_of(chi_res).ok_or("χ(A^H) does not split")?;
    let left = e2.difference(exps).ok_or_else(|| format!("exp A^H = {e2} is not contained in exp A = {exps}"))?;
    let c = left.as_slice()[0];
    if c == 0 {
        return Err(format!("exp A^H = {e2} leaves exponent 0"));
    }
    let chi_del = chi.add(chi_res);
    if chi_del != e2.with(c - 1).char_poly() {
        return Err(format!("χ(A∖H) = {chi_del} does not have roots {}", e2.with(c - 1)));
    }
    Ok(())
}

fn division_filter(chi: &IntPoly, chi_res: &IntPoly) -> std::result::Result<(), String> {
    if chi_res.divides(chi) {
        Ok(())
    } else {
        Err(format!("χ(A^H) = {chi_res} does not divide χ(A)"))
    }
}

/// Exponents the deletion must have if it is free alongside `A`: one
/// exponent of `A` lowered by one.
fn deletion_filter(exps: &ExpMultiset, chi_del: &IntPoly) -> std::result::Result<ExpMultiset, String> {
    let e1 = exps_of(chi_del).ok_or("χ(A∖H) does not split")?;
    let ok = exps.as_slice().iter().any(|&b| b > 0 && exps.without(b).map(|r| r.with(b - 1)).as_ref() == Some(&e1));
    if ok {
        Ok(e1)
    } else {
        Err(format!("exp A∖H = {e1} is not exp A = {exps} with one exponent lowered"))
    }
}

/// `exp(A∖H)` and `exp A^H` from `χ`, and the addition step reproducing
/// `exp A`.
fn addition_filter(
    exps: &ExpMultiset,
    chi: &IntPoly,
    chi_res: &IntPoly,
) -> std::result::Result<ExpMultiset, String> {
    let e2 = exps_of(chi_res).ok_or("χ(A^H) does not split")?;
    let chi_del = chi.add(chi_res);
    let e1 = exps_of(&chi_del).ok_or("χ(A∖H) does not split")?;
    match addition_step(&e1, &e2) {
        Ok(Some(e)) if e == *exps => Ok(e2),
        _ => Err(format!("no addition step from exp A∖H = {e1} and exp A^H = {e2} to {exps}")),
    }
}

fn free_exponents(a: &Arrangement) -> Result<std::result::Result<ExpMultiset, NonFreeWitness>> {
    Ok(match decide(a)? {
        Decision::Free(e) => Ok(e),
        Decision::NotFree(w) => Err(w),
    })
}

fn witness_text(w: &NonFreeWitness) -> String {
    serde_json::to_string(w).unwrap_or_else(|_| format!("{w:?}"))
}

#[derive(Clone)]
enum Res<C> {
    Member(C),
    Non(usize),
    Undecided,
}

/// Node counter and trace arena shared by the searches.
struct Ctx {
    budget: u64,
    nodes: u64,
    trace: Vec<TraceNode>,
}

impl Ctx {
    fn new(budget: u64) -> Ctx {
        Ctx { budget, nodes: 0, trace: Vec::new() }
    }

    fn tick(&mut self) -> bool {
        if self.nodes >= self.budget {
            return false;
        }
        self.nodes += 1;
        true
    }

    fn push(&mut self, a: &Arrangement, chi: &IntPoly, reason: NodeReason, candidates: Vec<TraceCandidate>) -> usize {
        let id = self.trace.len();
        self.trace.push(TraceNode {
            id,
            dim: a.dim(),
            normals: a.normals().map(<[i64]>::to_vec).collect(),
            chi: chi.coeffs().to_vec(),
            reason,
            candidates,
        });
        id
    }

    fn refutation(&self, class: Class, root: usize) -> Refutation {
        let mut keep = vec![false; self.trace.len()];
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut keep[id], true) {
                continue;
            }
            for c in &self.trace[id].candidates {
                for o in &c.outcomes {
                    if let Outcome::Refuted { node, .. } | Outcome::Isomorphic { node, .. } = o {
                        stack.push(*node);
                    }
                }
            }
        }
        let nodes = self.trace.iter().filter(|n| keep[n.id]).cloned().collect();
        Refutation { class, root, nodes }
    }

    fn verdict<C>(&self, class: Class, r: Res<C>, cert: impl FnOnce(C) -> ClassCertificate) -> ClassVerdict {
        match r {
            Res::Member(c) => ClassVerdict::Member { certificate: cert(c) },
            Res::Non(id) => ClassVerdict::NonMember { refutation: self.refutation(class, id) },
            Res::Undecided => ClassVerdict::Undecided { nodes: self.nodes, budget: self.budget },
        }
    }
}

type Key = (usize, Vec<Vec<i64>>);

/// Representatives of restrictions already decided at one node, for reuse
/// across linearly isomorphic candidates.
struct IsoGroups<C> {
    reps: Vec<(IsoInvariant, Arrangement, Res<C>)>,
}

impl<C: Clone> IsoGroups<C> {
    fn new() -> Self {
        IsoGroups { reps: Vec::new() }
    }

    fn find(&self, inv: &IsoInvariant, r: &Arrangement) -> Option<Res<C>> {
        self.reps.iter().find(|(i, b, _)| i == inv && linear_isomorphic(r, b).is_some()).map(|(_, _, res)| res.clone())
    }
}

fn candidate(a: &Arrangement, i: usize, chi_res: &IntPoly) -> TraceCandidate {
    TraceCandidate { hyperplane: a.hyperplane(i).normal().to_vec(), restriction_chi: chi_res.coeffs().to_vec(), outcomes: Vec::new() }
}

/// Induction table of a rank ≤ 2 arrangement, adding hyperplanes in order.
fn small_rank_table(a: &Arrangement) -> InductionTable {
    let mut steps = Vec::with_capacity(a.len());
    let mut before = ExpMultiset::zeros(a.dim());
    for k in 0..a.len() {
        let prefix = a.subarrangement(0..=k);
        let restriction = exps_of(&char_poly(&prefix.restrict_to(k))).expect("rank ≤ 1 restrictions split");
        let next = exps_of(&char_poly(&prefix)).expect("rank ≤ 2 arrangements split");
        steps.push(InductionStep { before, hyperplane: a.hyperplane(k).normal().to_vec(), restriction });
        before = next;
    }
    InductionTable { dim: a.dim(), steps, final_exponents: before }
}

/// Memoised search for inductive freeness.
///
/// A node is a member if it has rank ≤ 2, or some hyperplane passes the
/// exponent filter and both its restriction and deletion are members.
/// Restrictions are decided first, grouped by linear isomorphism; only
/// hyperplanes with an inductively free restriction lead to a deletion.
pub struct InductiveSearch {
    ctx: Ctx,
    memo: HashMap<Key, Res<Arc<InductionTable>>>,
}

impl InductiveSearch {
    pub fn new(budget: u64) -> Self {
        InductiveSearch { ctx: Ctx::new(budget), memo: HashMap::new() }
    }

    pub fn nodes(&self) -> u64 {
        self.ctx.nodes
    }

    pub fn classify(&mut self, a: &Arrangement) -> Result<ClassVerdict> {
        let r = self.node(a)?;
        Ok(self.ctx.verdict(Class::If, r, |t| ClassCertificate::InductionTable((*t).clone())))
    }

    fn node(&mut self, a: &Arrangement) -> Result<Res<Arc<InductionTable>>> {
        let key = a.canonical_key();
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        if !self.ctx.tick() {
            return Ok(Res::Undecided);
        }
        let r = self.expand(a)?;
        if !matches!(r, Res::Undecided) {
            self.memo.insert(key, r.clone());
        }
        Ok(r)
    }

    fn expand(&mut self, a: &Arrangement) -> Result<Res<Arc<InductionTable>>> {
        if a.rank() <= 2 {
            return Ok(Res::Member(Arc::new(small_rank_table(a))));
        }
        let lat = Lattice::build(a);
        let chi = lat.char_poly();
        let Some(exps) = exps_of(&chi) else {
            return Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::ChiDoesNotSplit, Vec::new())));
        };
        if let Err(w) = free_exponents(a)? {
            return Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::NotFree { witness: witness_text(&w) }, Vec::new())));
        }
        let mut cands = Vec::with_capacity(a.len());
        let mut survivors = Vec::new();
        let mut undecided = false;
        let mut groups = IsoGroups::new();
        for i in 0..a.len() {
            let chi_res = lat.restriction_char_poly(i);
            let mut c = candidate(a, i, &chi_res);
            match inductive_filter(&exps, &chi, &chi_res) {
                Err(reason) => c.outcomes.push(Outcome::Filtered { branch: Branch::Restriction, reason }),
                Ok(()) => {
                    let r = a.restrict_to(i);
                    let res = match self.memo.get(&r.canonical_key()) {
                        Some(known) => known.clone(),
                        None => {
                            let inv = invariant(&r);
                            match groups.find(&inv, &r) {
                                Some(Res::Non(id)) => {
                                    c.outcomes.push(Outcome::Isomorphic { branch: Branch::Restriction, node: id });
                                    cands.push(c);
                                    continue;
                                }
                                Some(known) => known,
                                None => {
                                    let res = self.node(&r)?;
                                    groups.reps.push((inv, r, res.clone()));
                                    res
                                }
                            }
                        }
                    };
                    match res {
                        Res::Non(id) => c.outcomes.push(Outcome::Refuted { branch: Branch::Restriction, node: id }),
                        Res::Undecided => undecided = true,
                        Res::Member(_) => survivors.push(cands.len()),
                    }
                }
            }
            cands.push(c);
        }
        for &k in &survivors {
            let i = (0..a.len()).find(|&i| a.hyperplane(i).normal() == cands[k].hyperplane.as_slice()).unwrap();
            let del = a.delete_index(i);
            match self.node(&del)? {
                Res::Member(t) => {
                    let restriction = exps_of(&IntPoly::new(cands[k].restriction_chi.clone())).unwrap();
                    let before = t.final_exponents.clone();
                    let mut table = (*t).clone();
                    table.steps.push(InductionStep { before, hyperplane: cands[k].hyperplane.clone(), restriction });
                    table.final_exponents = exps;
                    return Ok(Res::Member(Arc::new(table)));
                }
                Res::Non(id) => cands[k].outcomes.push(Outcome::Refuted { branch: Branch::Deletion, node: id }),
                Res::Undecided => undecided = true,
            }
        }
        if undecided {
            return Ok(Res::Undecided);
        }
        Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::Exhausted, cands)))
    }
}

/// Depth-first search for a divisional flag.
pub struct DivisionalSearch {
    ctx: Ctx,
    memo: HashMap<Key, Res<Arc<Vec<Vec<i64>>>>>,
}

impl DivisionalSearch {
    pub fn new(budget: u64) -> Self {
        DivisionalSearch { ctx: Ctx::new(budget), memo: HashMap::new() }
    }

    pub fn nodes(&self) -> u64 {
        self.ctx.nodes
    }

    pub fn classify(&mut self, a: &Arrangement) -> Result<ClassVerdict> {
        let r = self.node(a)?;
        let dim = a.dim();
        Ok(self.ctx.verdict(Class::Df, r, |f| {
            ClassCertificate::DivisionalFlag(DivisionalFlag { dim, hyperplanes: (*f).clone() })
        }))
    }

    fn node(&mut self, a: &Arrangement) -> Result<Res<Arc<Vec<Vec<i64>>>>> {
        let key = a.canonical_key();
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        if !self.ctx.tick() {
            return Ok(Res::Undecided);
        }
        let r = self.expand(a)?;
        if !matches!(r, Res::Undecided) {
            self.memo.insert(key, r.clone());
        }
        Ok(r)
    }

    fn expand(&mut self, a: &Arrangement) -> Result<Res<Arc<Vec<Vec<i64>>>>> {
        if a.rank() <= 2 {
            return Ok(Res::Member(Arc::new(Vec::new())));
        }
        let lat = Lattice::build(a);
        let chi = lat.char_poly();
        if exps_of(&chi).is_none() {
            return Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::ChiDoesNotSplit, Vec::new())));
        }
        let mut cands = Vec::with_capacity(a.len());
        let mut groups = IsoGroups::new();
        let mut undecided = false;
        for i in 0..a.len() {
            let chi_res = lat.restriction_char_poly(i);
            let mut c = candidate(a, i, &chi_res);
            if let Err(reason) = division_filter(&chi, &chi_res) {
                c.outcomes.push(Outcome::Filtered { branch: Branch::Division, reason });
                cands.push(c);
                continue;
            }
            let r = a.restrict_to(i);
            // an isomorphic representative settles refutation only; a flag
            // must be found in the coordinates of this restriction
            if !self.memo.contains_key(&r.canonical_key()) {
                let inv = invariant(&r);
                if let Some(Res::Non(id)) = groups.find(&inv, &r) {
                    c.outcomes.push(Outcome::Isomorphic { branch: Branch::Division, node: id });
                    cands.push(c);
                    continue;
                }
                let res = self.node(&r)?;
                groups.reps.push((inv, r.clone(), res));
            }
            match self.node(&r)? {
                Res::Member(flag) => {
                    let mut v = vec![a.hyperplane(i).normal().to_vec()];
                    v.extend(flag.iter().cloned());
                    return Ok(Res::Member(Arc::new(v)));
                }
                Res::Non(id) => c.outcomes.push(Outcome::Refuted { branch: Branch::Division, node: id }),
                Res::Undecided => undecided = true,
            }
            cands.push(c);
        }
        if undecided {
            return Ok(Res::Undecided);
        }
        Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::Exhausted, cands)))
    }
}

/// Backward search for a free filtration of a fixed arrangement, over its
/// subsets. Candidates are tried from the last hyperplane backwards, so an
/// arrangement listed in chain order is certified without backtracking.
pub struct AdditiveSearch<'a> {
    root: &'a Arrangement,
    ctx: Ctx,
    memo: HashMap<HypSet, Res<Arc<Vec<usize>>>>,
}

impl<'a> AdditiveSearch<'a> {
    pub fn new(root: &'a Arrangement, budget: u64) -> Self {
        AdditiveSearch { root, ctx: Ctx::new(budget), memo: HashMap::new() }
    }

    pub fn nodes(&self) -> u64 {
        self.ctx.nodes
    }

    pub fn classify(&mut self) -> Result<ClassVerdict> {
        let a = self.root;
        let r = match free_exponents(a)? {
            Err(w) => {
                let chi = char_poly(a);
                let reason = if exps_of(&chi).is_none() {
                    NodeReason::ChiDoesNotSplit
                } else {
                    NodeReason::NotFree { witness: witness_text(&w) }
                };
                Res::Non(self.ctx.push(a, &chi, reason, Vec::new()))
            }
            Ok(exps) => self.node(HypSet::full(a.len()), &exps)?,
        };
        let dim = a.dim();
        Ok(self.ctx.verdict(Class::Af, r, |chain| {
            ClassCertificate::FreeChain(FreeChain {
                dim,
                hyperplanes: chain.iter().map(|&i| a.hyperplane(i).normal().to_vec()).collect(),
            })
        }))
    }

    fn node(&mut self, mask: HypSet, exps: &ExpMultiset) -> Result<Res<Arc<Vec<usize>>>> {
        if mask.is_empty() {
            return Ok(Res::Member(Arc::new(Vec::new())));
        }
        if let Some(r) = self.memo.get(&mask) {
            return Ok(r.clone());
        }
        if !self.ctx.tick() {
            return Ok(Res::Undecided);
        }
        let idx: Vec<usize> = mask.iter().collect();
        let sub = self.root.subarrangement(idx.iter().copied());
        let lat = Lattice::build(&sub);
        let chi = lat.char_poly();
        let mut cands = Vec::with_capacity(idx.len());
        let mut undecided = false;
        for pos in (0..idx.len()).rev() {
            let chi_res = lat.restriction_char_poly(pos);
            let mut c = candidate(&sub, pos, &chi_res);
            let e1 = match deletion_filter(exps, &chi.add(&chi_res)) {
                Err(reason) => {
                    c.outcomes.push(Outcome::Filtered { branch: Branch::Deletion, reason });
                    cands.push(c);
                    continue;
                }
                Ok(e1) => e1,
            };
            let mut child = mask.clone();
            child.remove(idx[pos]);
            let del = self.root.subarrangement(child.iter());
            match free_exponents(&del)? {
                Err(w) => {
                    c.outcomes.push(Outcome::NotFree { branch: Branch::Deletion, reason: witness_text(&w) });
                    cands.push(c);
                    continue;
                }
                Ok(e) if e != e1 => {
                    c.outcomes.push(Outcome::NotFree {
                        branch: Branch::Deletion,
                        reason: format!("free with exponents {e}, not {e1}"),
                    });
                    cands.push(c);
                    continue;
                }
                Ok(_) => {}
            }
            match self.node(child, &e1)? {
                Res::Member(chain) => {
                    let mut v = (*chain).clone();
                    v.push(idx[pos]);
                    let r = Res::Member(Arc::new(v));
                    self.memo.insert(mask, r.clone());
                    return Ok(r);
                }
                Res::Non(id) => c.outcomes.push(Outcome::Refuted { branch: Branch::Deletion, node: id }),
                Res::Undecided => undecided = true,
            }
            cands.push(c);
        }
        if undecided {
            return Ok(Res::Undecided);
        }
        cands.reverse();
        let r = Res::Non(self.ctx.push(&sub, &chi, NodeReason::Exhausted, cands));
        self.memo.insert(mask, r.clone());
        Ok(r)
    }
}

/// Proof that adds the hyperplanes of a rank ≤ 2 arrangement in order, or
/// follows a free chain; every step is an addition step.
fn chain_proof(a: &Arrangement, order: &[usize]) -> StairProof {
    let mut proof = StairProof::Empty { dim: a.dim() };
    let mut prefix = Vec::with_capacity(order.len());
    for &i in order {
        prefix.push(i);
        let sub = Arrangement::new(a.dim(), prefix.iter().map(|&k| a.hyperplane(k).normal())).expect("subset");
        let restriction_exponents =
            exps_of(&char_poly(&sub.restrict_to(sub.len() - 1))).expect("restriction of a free chain splits");
        proof = StairProof::Addition {
            hyperplane: a.hyperplane(i).normal().to_vec(),
            restriction_exponents,
            deletion: Box::new(proof),
        };
    }
    proof
}

/// Memoised search for stair-freeness: addition steps (deletion
/// stair-free, restriction free, exponent pattern) are tried before
/// division extensions (restriction stair-free, `χ` divisibility), each
/// from the last hyperplane backwards.
pub struct StairSearch {
    ctx: Ctx,
    memo: HashMap<Key, Res<Arc<StairProof>>>,
}

impl StairSearch {
    pub fn new(budget: u64) -> Self {
        StairSearch { ctx: Ctx::new(budget), memo: HashMap::new() }
    }

    pub fn nodes(&self) -> u64 {
        self.ctx.nodes
    }

    pub fn classify(&mut self, a: &Arrangement) -> Result<ClassVerdict> {
        let r = self.node(a)?;
        Ok(self.ctx.verdict(Class::Sf, r, |p| ClassCertificate::StairProof { proof: (*p).clone() }))
    }

    fn node(&mut self, a: &Arrangement) -> Result<Res<Arc<StairProof>>> {
        let key = a.canonical_key();
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        if !self.ctx.tick() {
            return Ok(Res::Undecided);
        }
        let r = self.expand(a)?;
        if !matches!(r, Res::Undecided) {
            self.memo.insert(key, r.clone());
        }
        Ok(r)
    }

    fn expand(&mut self, a: &Arrangement) -> Result<Res<Arc<StairProof>>> {
        if a.rank() <= 2 {
            let order: Vec<usize> = (0..a.len()).collect();
            return Ok(Res::Member(Arc::new(chain_proof(a, &order))));
        }
        let lat = Lattice::build(a);
        let chi = lat.char_poly();
        let Some(exps) = exps_of(&chi) else {
            return Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::ChiDoesNotSplit, Vec::new())));
        };
        if let Err(w) = free_exponents(a)? {
            return Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::NotFree { witness: witness_text(&w) }, Vec::new())));
        }
        let n = a.len();
        let chis: Vec<IntPoly> = (0..n).map(|i| lat.restriction_char_poly(i)).collect();
        let mut cands: Vec<TraceCandidate> = (0..n).map(|i| candidate(a, i, &chis[i])).collect();
        let mut undecided = false;
        for i in (0..n).rev() {
            let e2 = match addition_filter(&exps, &chi, &chis[i]) {
                Err(reason) => {
                    cands[i].outcomes.push(Outcome::Filtered { branch: Branch::Addition, reason });
                    continue;
                }
                Ok(e2) => e2,
            };
            match free_exponents(&a.restrict_to(i))? {
                Err(w) => {
                    cands[i].outcomes.push(Outcome::NotFree { branch: Branch::Addition, reason: witness_text(&w) });
                    continue;
                }
                Ok(e) if e != e2 => {
                    cands[i]
                        .outcomes
                        .push(Outcome::NotFree { branch: Branch::Addition, reason: format!("free with exponents {e}") });
                    continue;
                }
                Ok(_) => {}
            }
            match self.node(&a.delete_index(i))? {
                Res::Member(p) => {
                    return Ok(Res::Member(Arc::new(StairProof::Addition {
                        hyperplane: a.hyperplane(i).normal().to_vec(),
                        restriction_exponents: e2,
                        deletion: Box::new((*p).clone()),
                    })));
                }
                Res::Non(id) => cands[i].outcomes.push(Outcome::Refuted { branch: Branch::Addition, node: id }),
                Res::Undecided => undecided = true,
            }
        }
        for i in (0..n).rev() {
            if let Err(reason) = division_filter(&chi, &chis[i]) {
                cands[i].outcomes.push(Outcome::Filtered { branch: Branch::Division, reason });
                continue;
            }
            match self.node(&a.restrict_to(i))? {
                Res::Member(p) => {
                    return Ok(Res::Member(Arc::new(StairProof::Division {
                        hyperplane: a.hyperplane(i).normal().to_vec(),
                        restriction: Box::new((*p).clone()),
                    })));
                }
                Res::Non(id) => cands[i].outcomes.push(Outcome::Refuted { branch: Branch::Division, node: id }),
                Res::Undecided => undecided = true,
            }
        }
        if undecided {
            return Ok(Res::Undecided);
        }
        Ok(Res::Non(self.ctx.push(a, &chi, NodeReason::Exhausted, cands)))
    }
}

pub fn classify(a: &Arrangement, class: Class, budget: u64) -> Result<ClassVerdict> {
    match class {
        Class::If => InductiveSearch::new(budget).classify(a),
        Class::Af => AdditiveSearch::new(a, budget).classify(),
        Class::Df => DivisionalSearch::new(budget).classify(a),
        Class::Sf => StairSearch::new(budget).classify(a),
    }
}

pub fn is_inductively_free(a: &Arrangement) -> Result<ClassVerdict> {
    classify(a, Class::If, budget_from_env())
}

pub fn is_additionally_free(a: &Arrangement) -> Result<ClassVerdict> {
    classify(a, Class::Af, budget_from_env())
}

pub fn is_divisionally_free(a: &Arrangement) -> Result<ClassVerdict> {
    classify(a, Class::Df, budget_from_env())
}

pub fn is_stair_free(a: &Arrangement) -> Result<ClassVerdict> {
    classify(a, Class::Sf, budget_from_env())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    /// 1-based row number.
    pub step: usize,
    pub hyperplane: Vec<i64>,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub accepted: bool,
    pub steps: Vec<StepReport>,
    /// Exponents reached by the accepted steps.
    pub exponents: ExpMultiset,
    pub failed_step: Option<usize>,
}

/// Replays an induction table: each row's restriction must have the stated
/// exponents (from `χ`) and be inductively free (decided by `search`), and
/// the addition step must turn the row's exponents into the next row's.
/// Stops at the first failing row.
pub fn verify_induction_table(
    a: &Arrangement,
    table: &InductionTable,
    search: &mut InductiveSearch,
) -> Result<TableReport> {
    let built = table.arrangement()?;
    if table.dim != a.dim() || !built.same_set(a) {
        return Err(Error::PreconditionViolated("table hyperplanes do not exhaust the arrangement".into()));
    }
    let mut cur = ExpMultiset::zeros(a.dim());
    let mut steps = Vec::with_capacity(table.steps.len());
    for (i, row) in table.steps.iter().enumerate() {
        let mut report = StepReport { step: i + 1, hyperplane: row.hyperplane.clone(), ok: false, detail: String::new() };
        let check = (|| -> Result<std::result::Result<ExpMultiset, String>> {
            if row.before != cur {
                return Ok(Err(format!("row lists {} before the addition, the previous rows give {cur}", row.before)));
            }
            let prefix = built.subarrangement(0..=i);
            let res = prefix.restrict_to(i);
            let chi = char_poly(&res);
            match exps_of(&chi) {
                Some(e) if e == row.restriction => {}
                _ => return Ok(Err(format!("restriction has χ = {chi}, not exponents {}", row.restriction))),
            }
            match search.node(&res)? {
                Res::Member(_) => {}
                Res::Non(_) => return Ok(Err("restriction is not inductively free".into())),
                Res::Undecided => return Ok(Err("restriction undecided within the budget".into())),
            }
            match addition_step(&cur, &row.restriction)? {
                Some(next) => Ok(Ok(next)),
                None => Ok(Err(format!("{} is not contained in {cur}", row.restriction))),
            }
        })()?;
        match check {
            Ok(next) => {
                report.ok = true;
                report.detail = format!("{cur} -> {next}");
                cur = next;
                steps.push(report);
            }
            Err(why) => {
                report.detail = why;
                steps.push(report);
                return Ok(TableReport { accepted: false, steps, exponents: cur, failed_step: Some(i + 1) });
            }
        }
    }
    if cur != table.final_exponents {
        let n = table.steps.len();
        return Ok(TableReport { accepted: false, steps, exponents: cur, failed_step: Some(n + 1) });
    }
    Ok(TableReport { accepted: true, steps, exponents: cur, failed_step: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixReport {
    pub size: usize,
    /// Exponents if the prefix is free.
    pub exponents: Option<ExpMultiset>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub accepted: bool,
    pub prefixes: Vec<PrefixReport>,
}

/// Checks that every prefix of the chain is free. The chain must list the
/// hyperplanes of `a`.
pub fn verify_free_chain(a: &Arrangement, chain: &FreeChain) -> Result<ChainReport> {
    let built = Arrangement::new_strict(chain.dim, chain.hyperplanes.iter())?;
    if chain.dim != a.dim() || !built.same_set(a) {
        return Err(Error::PreconditionViolated("chain hyperplanes do not exhaust the arrangement".into()));
    }
    let prefixes: Vec<PrefixReport> = (1..=built.len())
        .into_par_iter()
        .map(|k| {
            let e = free_exponents(&built.subarrangement(0..k))?.ok();
            Ok(PrefixReport { size: k, exponents: e })
        })
        .collect::<Result<_>>()?;
    let accepted = prefixes.iter().all(|p| p.exponents.is_some());
    Ok(ChainReport { accepted, prefixes })
}

fn cert_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Certificate(msg.into()))
}

fn member_index(a: &Arrangement, normal: &[i64]) -> Result<usize> {
    let h = canonicalize(normal)?;
    a.index_of(&h).ok_or_else(|| Error::Certificate(format!("hyperplane {h} is not in the arrangement")))
}

/// Replays a divisional flag by successive restrictions.
pub fn verify_divisional_flag(a: &Arrangement, flag: &DivisionalFlag) -> Result<()> {
    if flag.dim != a.dim() {
        return cert_err("flag dimension does not match");
    }
    let mut cur = a.clone();
    for (k, h) in flag.hyperplanes.iter().enumerate() {
        let i = member_index(&cur, h)?;
        let res = cur.restrict_to(i);
        if !char_poly(&res).divides(&char_poly(&cur)) {
            return cert_err(format!("step {}: χ of the restriction does not divide", k + 1));
        }
        cur = res;
    }
    if cur.rank() > 2 {
        return cert_err(format!("flag ends at rank {}", cur.rank()));
    }
    Ok(())
}

/// Replays a stair proof. Addition steps re-decide the freeness of the
/// restriction; the deletion's exponents come from `χ`, which is justified
/// because the deletion is itself proven stair-free, hence free.
pub fn verify_stair_proof(a: &Arrangement, proof: &StairProof) -> Result<()> {
    match proof {
        StairProof::Empty { dim } => {
            if *dim != a.dim() || !a.is_empty() {
                return cert_err("empty step on a nonempty arrangement");
            }
        }
        StairProof::Addition { hyperplane, restriction_exponents, deletion } => {
            let i = member_index(a, hyperplane)?;
            let del = a.delete_index(i);
            verify_stair_proof(&del, deletion)?;
            let res = a.restrict_to(i);
            match free_exponents(&res)? {
                Ok(e) if e == *restriction_exponents => {}
                _ => return cert_err(format!("restriction to {hyperplane:?} is not free with {restriction_exponents}")),
            }
            let e1 = exps_of(&char_poly(&del)).ok_or_else(|| Error::Certificate("deletion χ does not split".into()))?;
            if addition_step(&e1, restriction_exponents)?.is_none() {
                return cert_err(format!("no addition step at {hyperplane:?}"));
            }
        }
        StairProof::Division { hyperplane, restriction } => {
            let i = member_index(a, hyperplane)?;
            let res = a.restrict_to(i);
            if !char_poly(&res).divides(&char_poly(a)) {
                return cert_err(format!("χ of the restriction to {hyperplane:?} does not divide χ(A)"));
            }
            verify_stair_proof(&res, restriction)?;
        }
    }
    Ok(())
}

/// A free chain as a stair proof made of addition steps.
pub fn chain_to_stair_proof(a: &Arrangement, chain: &FreeChain) -> Result<StairProof> {
    let order: Vec<usize> = chain.hyperplanes.iter().map(|h| member_index(a, h)).collect::<Result<_>>()?;
    Ok(chain_proof(a, &order))
}

/// Re-checks any membership certificate.
pub fn verify_class_certificate(a: &Arrangement, cert: &ClassCertificate) -> Result<()> {
    match cert {
        ClassCertificate::InductionTable(t) => {
            let r = verify_induction_table(a, t, &mut InductiveSearch::new(budget_from_env()))?;
            match r.failed_step {
                None => Ok(()),
                Some(k) => {
                    let why = r.steps.last().map(|s| s.detail.clone()).unwrap_or_default();
                    cert_err(format!("induction table fails at step {k}: {why}"))
                }
            }
        }
        ClassCertificate::FreeChain(c) => {
            let r = verify_free_chain(a, c)?;
            match r.prefixes.iter().find(|p| p.exponents.is_none()) {
                None => Ok(()),
                Some(p) => cert_err(format!("prefix of size {} is not free", p.size)),
            }
        }
        ClassCertificate::DivisionalFlag(f) => verify_divisional_flag(a, f),
        ClassCertificate::StairProof { proof } => verify_stair_proof(a, proof),
    }
}

/// Replays a refutation: recomputes every `χ` and filter, checks that each
/// hyperplane of each node is accounted for, that referenced nodes are the
/// claimed restrictions or deletions (or linearly isomorphic to them), and
/// re-decides freeness where the trace cites it.
pub fn audit_refutation(r: &Refutation) -> Result<()> {
    let by_id: HashMap<usize, &TraceNode> = r.nodes.iter().map(|n| (n.id, n)).collect();
    if !by_id.contains_key(&r.root) {
        return cert_err("root node missing");
    }
    for node in &r.nodes {
        let fail = |msg: String| Error::Certificate(format!("node {}: {msg}", node.id));
        let a = node.arrangement()?;
        let lat = Lattice::build(&a);
        let chi = lat.char_poly();
        if chi.coeffs() != node.chi.as_slice() {
            return Err(fail("χ differs".into()));
        }
        if a.rank() <= 2 {
            return Err(fail("rank ≤ 2 arrangements are members of every class".into()));
        }
        let referenced = |id: usize, expect: &Arrangement, iso: bool| -> Result<()> {
            let n = by_id.get(&id).ok_or_else(|| fail(format!("references missing node {id}")))?;
            let b = n.arrangement()?;
            if b.len() >= a.len() && b.dim() >= a.dim() {
                return Err(fail(format!("references node {id}, which is not smaller")));
            }
            let ok = if iso { linear_isomorphic(expect, &b).is_some() } else { expect.same_set(&b) };
            if !ok {
                return Err(fail(format!("node {id} is not the claimed arrangement")));
            }
            Ok(())
        };
        match &node.reason {
            NodeReason::ChiDoesNotSplit => {
                if exps_of(&chi).is_some() {
                    return Err(fail("χ splits".into()));
                }
                continue;
            }
            NodeReason::NotFree { .. } => {
                if r.class == Class::Df || free_exponents(&a)?.is_ok() {
                    return Err(fail("freeness is not a valid reason here".into()));
                }
                continue;
            }
            NodeReason::Exhausted => {}
        }
        let exps = exps_of(&chi).ok_or_else(|| fail("χ does not split".into()))?;
        if node.candidates.len() != a.len() {
            return Err(fail("not every hyperplane was examined".into()));
        }
        for c in &node.candidates {
            let i = member_index(&a, &c.hyperplane)?;
            let chi_res = lat.restriction_char_poly(i);
            if chi_res.coeffs() != c.restriction_chi.as_slice() {
                return Err(fail(format!("χ of the restriction to {:?} differs", c.hyperplane)));
            }
            let has = |want: Branch| c.outcomes.iter().filter(move |o| branch_of(o) == want);
            let check_branch = |branch: Branch, filter: std::result::Result<Option<ExpMultiset>, String>| -> Result<()> {
                let outs: Vec<&Outcome> = has(branch).collect();
                match filter {
                    Err(_) => {
                        if outs.iter().any(|o| matches!(o, Outcome::Filtered { .. })) {
                            Ok(())
                        } else {
                            Err(fail(format!("{:?}: filter fails but is not recorded", c.hyperplane)))
                        }
                    }
                    Ok(need) => {
                        for o in outs {
                            match o {
                                Outcome::Filtered { .. } => {}
                                Outcome::Refuted { node, .. } | Outcome::Isomorphic { node, .. } => {
                                    let expect = match branch {
                                        Branch::Restriction | Branch::Division => a.restrict_to(i),
                                        Branch::Deletion | Branch::Addition => a.delete_index(i),
                                    };
                                    referenced(*node, &expect, matches!(o, Outcome::Isomorphic { .. }))?;
                                    return Ok(());
                                }
                                Outcome::NotFree { .. } => {
                                    let part = match branch {
                                        Branch::Addition => a.restrict_to(i),
                                        _ => a.delete_index(i),
                                    };
                                    let got = free_exponents(&part)?.ok();
                                    if got.is_none() || got != need {
                                        return Ok(());
                                    }
                                    return Err(fail(format!("{:?}: claimed not free", c.hyperplane)));
                                }
                            }
                        }
                        Err(fail(format!("{:?}: filter passes but no refutation is recorded", c.hyperplane)))
                    }
                }
            };
            match r.class {
                Class::If => {
                    let f = inductive_filter(&exps, &chi, &chi_res).map(|_| None);
                    if f.is_ok() && has(Branch::Deletion).next().is_some() {
                        check_branch(Branch::Deletion, Ok(None))?;
                    } else {
                        check_branch(Branch::Restriction, f)?;
                    }
                }
                Class::Df => check_branch(Branch::Division, division_filter(&chi, &chi_res).map(|_| None))?,
                Class::Af => check_branch(Branch::Deletion, deletion_filter(&exps, &chi.add(&chi_res)).map(Some))?,
                Class::Sf => {
                    check_branch(Branch::Addition, addition_filter(&exps, &chi, &chi_res).map(Some))?;
                    check_branch(Branch::Division, division_filter(&chi, &chi_res).map(|_| None))?;
                }
            }
        }
    }
    Ok(())
}

fn branch_of(o: &Outcome) -> Branch {
    match o {
        Outcome::Filtered { branch, .. }
        | Outcome::Refuted { branch, .. }
        | Outcome::Isomorphic { branch, .. }
        | Outcome::NotFree { branch, .. } => *branch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn exps(v: &[u32]) -> ExpMultiset {
        ExpMultiset::new(v.to_vec())
    }

    #[test]
    fn addition_step_examples() {
        let got = addition_step(&exps(&[1, 4, 5, 5, 5, 5, 6]), &exps(&[1, 5, 5, 5, 5, 6])).unwrap();
        assert_eq!(got, Some(exps(&[1, 5, 5, 5, 5, 5, 6])));
        let got = addition_step(&ExpMultiset::zeros(7), &ExpMultiset::zeros(6)).unwrap();
        assert_eq!(got, Some(exps(&[0, 0, 0, 0, 0, 0, 1])));
        assert_eq!(addition_step(&exps(&[1, 2]), &exps(&[3])).unwrap(), None);
        assert!(matches!(addition_step(&exps(&[1, 2]), &exps(&[1, 2])), Err(Error::InvalidShapes(_))));
    }

    #[test]
    fn class_names() {
        for (s, c) in [("if", Class::If), ("AF", Class::Af), ("df", Class::Df), ("Sf", Class::Sf)] {
            assert_eq!(s.parse::<Class>().unwrap(), c);
            assert_eq!(c.to_string().parse::<Class>().unwrap(), c);
        }
        assert!("xf".parse::<Class>().is_err());
    }

    #[test]
    fn table_text_round_trip() {
        let t = catalog::table_c();
        assert_eq!(InductionTable::parse(&t.emit()).unwrap(), t);
        assert_eq!(t.steps.len(), 22);
        assert!(InductionTable::parse("dim 2\n0 0 | 1 0 | 0\n").is_err());
        assert!(InductionTable::parse("dim 2\n0 0 | 1 0 0 | 0\nfinal 0 1\n").is_err());
    }

    #[test]
    fn table_c_replays() {
        let r = verify_induction_table(&catalog::arr_c(), &catalog::table_c(), &mut InductiveSearch::new(DEFAULT_BUDGET)).unwrap();
        assert!(r.accepted);
        assert_eq!(r.exponents, exps(&[1, 5, 5, 5, 6]));
    }

    #[test]
    fn tampered_table_is_rejected() {
        let c = catalog::arr_c();
        let mut t = catalog::table_c();
        let k = (0..t.steps.len() - 1).find(|&k| t.steps[k].restriction != t.steps[k + 1].restriction).unwrap();
        t.steps.swap(k, k + 1);
        let r = verify_induction_table(&c, &t, &mut InductiveSearch::new(DEFAULT_BUDGET)).unwrap();
        assert!(!r.accepted);
        let at = r.failed_step.unwrap();
        assert!(at == k + 1 || at == k + 2, "failed at {at}, swapped rows {} and {}", k + 1, k + 2);
        assert!(!r.steps.last().unwrap().ok);

        let mut short = catalog::table_c();
        short.steps.pop();
        assert!(matches!(
            verify_induction_table(&c, &short, &mut InductiveSearch::new(10)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn rank_two_is_in_every_class() {
        for k in 2..=6i64 {
            let a = Arrangement::new(2, (0..k).map(|i| [1, i])).unwrap();
            // Same lines, embedded in a 3-space as a non-essential arrangement.
            let b = Arrangement::new(3, (0..k).map(|i| [1, i, 0])).unwrap();
            for class in [Class::If, Class::Af, Class::Df, Class::Sf] {
                for x in [&a, &b] {
                    let v = classify(x, class, DEFAULT_BUDGET).unwrap();
                    let ClassVerdict::Member { certificate } = v else { panic!("{class} k={k}: {}", v.label()) };
                    verify_class_certificate(x, &certificate).unwrap();
                }
            }
            let mut want = vec![1, k as u32 - 1];
            assert_eq!(crate::derivations::decide(&a).unwrap().exponents(), Some(&exps(&want)));
            want.insert(0, 0);
            assert_eq!(crate::derivations::decide(&b).unwrap().exponents(), Some(&exps(&want)));
        }
    }

    #[test]
    fn empty_arrangement_is_stair_free() {
        let v = classify(&Arrangement::empty(4), Class::Sf, 10).unwrap();
        let ClassVerdict::Member { certificate } = v else { panic!() };
        assert_eq!(certificate, ClassCertificate::StairProof { proof: StairProof::Empty { dim: 4 } });
    }

    #[test]
    fn braid_arrangement_is_in_every_class() {
        let a = Arrangement::new(4, [[1, -1, 0, 0], [1, 0, -1, 0], [1, 0, 0, -1], [0, 1, -1, 0], [0, 1, 0, -1], [0, 0, 1, -1]]).unwrap();
        for class in [Class::If, Class::Af, Class::Df, Class::Sf] {
            let v = classify(&a, class, DEFAULT_BUDGET).unwrap();
            let ClassVerdict::Member { certificate } = v else { panic!("{class}") };
            assert_eq!(certificate.class(), class);
            verify_class_certificate(&a, &certificate).unwrap();
            let json = serde_json::to_string(&certificate).unwrap();
            assert_eq!(serde_json::from_str::<ClassCertificate>(&json).unwrap(), certificate);
        }
    }

    #[test]
    fn d_is_not_inductively_free() {
        let v = classify(&catalog::arr_d(), Class::If, DEFAULT_BUDGET).unwrap();
        let ClassVerdict::NonMember { refutation } = v else { panic!("{}", v.label()) };
        audit_refutation(&refutation).unwrap();

        let mut forged = refutation.clone();
        forged.nodes[0].chi[0] += 1;
        assert!(audit_refutation(&forged).is_err());
    }

    #[test]
    fn dpp_is_not_additionally_free_but_d_is() {
        assert!(classify(&catalog::arr_dpp(), Class::Af, DEFAULT_BUDGET).unwrap().is_non_member());
        assert!(classify(&catalog::arr_d(), Class::Af, DEFAULT_BUDGET).unwrap().is_member());
    }

    #[test]
    fn zero_budget_is_undecided() {
        let v = classify(&catalog::arr_d(), Class::If, 0).unwrap();
        assert!(matches!(v, ClassVerdict::Undecided { budget: 0, .. }));
    }

    #[test]
    fn non_free_arrangement_is_in_no_class() {
        let a = catalog::example_4_1().arrangement;
        for class in [Class::If, Class::Af, Class::Df, Class::Sf] {
            let v = classify(&a, class, DEFAULT_BUDGET).unwrap();
            assert!(v.is_non_member(), "{class}: {}", v.label());
        }
    }

    #[test]
    fn stair_proof_rejects_wrong_exponents() {
        let d = catalog::arr_d();
        let chain = FreeChain { dim: 5, hyperplanes: d.normals().map(<[i64]>::to_vec).collect() };
        let proof = chain_to_stair_proof(&d, &chain).unwrap();
        verify_stair_proof(&d, &proof).unwrap();
        let StairProof::Addition { hyperplane, restriction_exponents, deletion } = proof else { panic!() };
        let mut bumped = restriction_exponents.as_slice().to_vec();
        bumped[0] += 1;
        let bad = StairProof::Addition { hyperplane, restriction_exponents: ExpMultiset::new(bumped), deletion };
        assert!(verify_stair_proof(&d, &bad).is_err());
    }
}
