//! Count-preserving normalization: arbitrary sentences with counting
//! quantifiers are rewritten, for domains of size n ≥ 1, into a single
//! universally quantified matrix ∀x∀y.φ(x,y) over an extended vocabulary,
//! a set of cardinality constraints, and per-predicate multiplicity
//! normalizers. Every introduced predicate carries weights from {1, -1}.
//!
//! The pipeline is `to_nnf` → `reduce_c2` (counting quantifiers compiled to
//! marker/witness-slot predicates plus cardinality constraints) →
//! `skolemize` (existentials traded for relaxation predicates with weight
//! pair (1, -1)) → optional `conjoin_loopfree`. All stages are modular:
//! they stay correct under conjunction with any further axiom on the
//! original vocabulary, because each gadget constrains only its own fresh
//! predicates.
//!
//! The empty domain is *not* covered here (guard folding and Skolemization
//! both assume n ≥ 1); callers must evaluate n = 0 directly.

use crate::arith::ExactNumber;
use crate::logic::{
    Args, Bound, CardinalityConstraint, CmpOp, Formula, PredId, QFFormula, Sentence,
    SymmetricWeights, Var, Vocabulary,
};
use crate::{Error, Result};

/// Multiplicity correction: every true ground atom of `pred` divides the
/// weighted count by `witnesses`! (the number of orderings of the witness
/// slots serving that atom). Kept separate from the declared weights so the
/// latter stay in {1, -1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalizer {
    pub pred: PredId,
    pub witnesses: u32,
}

/// Result of `reduce_c2`: a counting-free sentence over an extended
/// vocabulary plus the bookkeeping that keeps the count unchanged.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub sentence: Sentence,
    pub vocab: Vocabulary,
    pub weights: SymmetricWeights,
    pub constraints: Vec<CardinalityConstraint>,
    pub normalizers: Vec<Normalizer>,
}

/// Result of `skolemize`: the matrix of ∀x∀y.matrix.
#[derive(Clone, Debug)]
pub struct Skolemized {
    pub matrix: QFFormula,
    pub vocab: Vocabulary,
    pub weights: SymmetricWeights,
}

/// Fully normalized problem, ready for the cell pipeline.
#[derive(Clone, Debug)]
pub struct NormalizedProblem {
    pub matrix: QFFormula,
    pub vocab: Vocabulary,
    pub weights: SymmetricWeights,
    pub constraints: Vec<CardinalityConstraint>,
    pub normalizers: Vec<Normalizer>,
}

impl NormalizedProblem {
    /// The matrix as a closed sentence ∀x∀y.matrix (for oracle replay).
    pub fn as_universal_sentence(&self) -> Sentence {
        Formula::Forall(
            Var::X,
            Box::new(Formula::Forall(Var::Y, Box::new(self.matrix.clone()))),
        )
    }

    /// Weights with the normalizers folded in (w(D) := w(D)/witnesses!),
    /// for direct summation over interpretations. The engine instead keeps
    /// weights and normalizers separate and applies the correction per
    /// cardinality vector.
    pub fn effective_weights(&self) -> SymmetricWeights {
        let mut w = self.weights.clone();
        for nz in &self.normalizers {
            let corrected = w.pos(nz.pred).clone()
                * ExactNumber::from_bigint(crate::arith::factorial(nz.witnesses as usize)).recip();
            w.set(nz.pred, corrected, w.neg(nz.pred).clone());
        }
        w
    }
}

/// Negation normal form. Negations are pushed to atoms; `->` and `<->`
/// are expanded; a negated counting quantifier becomes the complementary
/// counting constraint on the same body (¬∃^=m → ∃^≤m-1 ∨ ∃^≥m+1,
/// ¬∃^≤m → ∃^≥m+1, ¬∃^≥m → ∃^≤m-1, with the m = 0 degenerate forms).
pub fn to_nnf(f: &Formula) -> Formula {
    nnf_pos(f)
}

fn nnf_pos(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => nnf_neg(g),
        Formula::And(gs) => Formula::and(gs.iter().map(nnf_pos).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(nnf_pos).collect()),
        Formula::Implies(a, b) => Formula::or(vec![nnf_neg(a), nnf_pos(b)]),
        Formula::Iff(a, b) => Formula::or(vec![
            Formula::and(vec![nnf_pos(a), nnf_pos(b)]),
            Formula::and(vec![nnf_neg(a), nnf_neg(b)]),
        ]),
        Formula::Forall(v, g) => Formula::Forall(*v, Box::new(nnf_pos(g))),
        Formula::Exists(v, g) => Formula::Exists(*v, Box::new(nnf_pos(g))),
        Formula::CountExists(op, m, v, g) => {
            Formula::CountExists(*op, *m, *v, Box::new(nnf_pos(g)))
        }
    }
}

fn nnf_neg(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(..) | Formula::Eq(..) => Formula::not(f.clone()),
        Formula::Not(g) => nnf_pos(g),
        Formula::And(gs) => Formula::or(gs.iter().map(nnf_neg).collect()),
        Formula::Or(gs) => Formula::and(gs.iter().map(nnf_neg).collect()),
        Formula::Implies(a, b) => Formula::and(vec![nnf_pos(a), nnf_neg(b)]),
        Formula::Iff(a, b) => Formula::or(vec![
            Formula::and(vec![nnf_pos(a), nnf_neg(b)]),
            Formula::and(vec![nnf_neg(a), nnf_pos(b)]),
        ]),
        Formula::Forall(v, g) => Formula::Exists(*v, Box::new(nnf_neg(g))),
        Formula::Exists(v, g) => Formula::Forall(*v, Box::new(nnf_neg(g))),
        Formula::CountExists(op, m, v, g) => {
            let body = nnf_pos(g);
            match op {
                CmpOp::Eq => {
                    let ge = Formula::CountExists(CmpOp::Ge, m + 1, *v, Box::new(body.clone()));
                    if *m == 0 {
                        ge
                    } else {
                        Formula::or(vec![
                            Formula::CountExists(CmpOp::Le, m - 1, *v, Box::new(body)),
                            ge,
                        ])
                    }
                }
                CmpOp::Le => Formula::CountExists(CmpOp::Ge, m + 1, *v, Box::new(body)),
                CmpOp::Ge => {
                    if *m == 0 {
                        Formula::False
                    } else {
                        Formula::CountExists(CmpOp::Le, m - 1, *v, Box::new(body))
                    }
                }
            }
        }
    }
}

/// Replaces every subformula structurally equal to `target`.
fn replace_all(f: &Formula, target: &Formula, with: &Formula) -> Formula {
    if f == target {
        return with.clone();
    }
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::Not(Box::new(replace_all(g, target, with))),
        Formula::And(gs) => {
            Formula::And(gs.iter().map(|g| replace_all(g, target, with)).collect())
        }
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| replace_all(g, target, with)).collect()),
        Formula::Implies(a, b) => Formula::Implies(
            Box::new(replace_all(a, target, with)),
            Box::new(replace_all(b, target, with)),
        ),
        Formula::Iff(a, b) => Formula::Iff(
            Box::new(replace_all(a, target, with)),
            Box::new(replace_all(b, target, with)),
        ),
        Formula::Forall(v, g) => Formula::Forall(*v, Box::new(replace_all(g, target, with))),
        Formula::Exists(v, g) => Formula::Exists(*v, Box::new(replace_all(g, target, with))),
        Formula::CountExists(op, m, v, g) => {
            Formula::CountExists(*op, *m, *v, Box::new(replace_all(g, target, with)))
        }
    }
}

/// Flattens a formula into disjuncts (a non-Or formula is one disjunct).
fn disjuncts(f: Formula) -> Vec<Formula> {
    match f {
        Formula::Or(parts) => parts,
        other => vec![other],
    }
}

/// Innermost counting quantifier (its body free of further counting), if any.
fn find_innermost_counting(f: &Formula) -> Option<Formula> {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => None,
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => {
            find_innermost_counting(g)
        }
        Formula::And(gs) | Formula::Or(gs) => gs.iter().find_map(find_innermost_counting),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            find_innermost_counting(a).or_else(|| find_innermost_counting(b))
        }
        Formula::CountExists(_, _, _, g) => {
            find_innermost_counting(g).or_else(|| Some(f.clone()))
        }
    }
}

/// Innermost quantifier of any kind (its body quantifier-free), if any.
fn find_innermost_quantifier(f: &Formula) -> Option<Formula> {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => None,
        Formula::Not(g) => find_innermost_quantifier(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().find_map(find_innermost_quantifier),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            find_innermost_quantifier(a).or_else(|| find_innermost_quantifier(b))
        }
        Formula::Forall(_, g) | Formula::Exists(_, g) | Formula::CountExists(_, _, _, g) => {
            find_innermost_quantifier(g).or_else(|| Some(f.clone()))
        }
    }
}

/// Rewrites a formula with one free variable so that the free variable is x.
fn orient_to_x(v: Var, body: Formula) -> Formula {
    match v {
        Var::X => body,
        Var::Y => body.swap_vars(),
    }
}

fn unary(p: PredId, v: Var) -> Formula {
    Formula::Atom(p, Args::Unary(v))
}

fn binary(p: PredId, a: Var, b: Var) -> Formula {
    Formula::Atom(p, Args::Binary(a, b))
}

/// Shared fresh-predicate bookkeeping for the rewriting passes.
struct Extender {
    vocab: Vocabulary,
    weights: SymmetricWeights,
}

impl Extender {
    fn fresh(&mut self, prefix: &str, arity: u8, pos: ExactNumber, neg: ExactNumber) -> PredId {
        let name = format!("{prefix}{}", self.vocab.len());
        let id = self
            .vocab
            .add(&name, arity)
            .expect("fresh names cannot collide");
        self.weights.push(pos, neg);
        id
    }

    fn fresh_plain(&mut self, arity: u8) -> PredId {
        self.fresh("@cq", arity, ExactNumber::one(), ExactNumber::one())
    }

    fn fresh_skolem(&mut self, arity: u8) -> PredId {
        self.fresh(
            "@sk",
            arity,
            ExactNumber::one(),
            ExactNumber::from_int(-1),
        )
    }
}

/// One signed primitive of a compiled counting block: either "any number of
/// witnesses" or "exactly j witnesses".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Prim {
    All,
    Ex(u64),
}

/// Eliminates counting quantifiers. The result is an FO² sentence (over an
/// extended vocabulary whose new predicates have weights in {1, -1}) whose
/// weighted count under the returned constraints and normalizers equals the
/// input's for every domain size n ≥ 1, and remains equal under conjunction
/// with any axiom over the original vocabulary.
///
/// Supported placements: counting quantifiers may appear anywhere a free
/// variable links them to the rest of the sentence, and closed counting
/// subformulas may appear as top-level conjuncts. A closed counting
/// subformula anywhere else (e.g. under a disjunction) would require
/// conditional cardinality constraints and is rejected as unsupported.
pub fn reduce_c2(
    sentence: &Sentence,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
) -> Result<Reduction> {
    if !sentence.has_counting() {
        return Ok(Reduction {
            sentence: sentence.clone(),
            vocab: vocab.clone(),
            weights: weights.clone(),
            constraints: Vec::new(),
            normalizers: Vec::new(),
        });
    }
    let mut ext = Extender {
        vocab: vocab.clone(),
        weights: weights.clone(),
    };
    let mut constraints = Vec::new();
    let mut normalizers = Vec::new();
    let mut out: Vec<Formula> = Vec::new();
    let mut queue: Vec<Formula> = vec![to_nnf(sentence)];

    while let Some(item) = queue.pop() {
        match item {
            Formula::True => {}
            Formula::And(parts) => queue.extend(parts),
            f if !f.has_counting() => out.push(f),
            Formula::CountExists(op, m, v, body) => {
                // sentence-level counting: a fresh unary predicate tracks
                // the body pointwise and a cardinality constraint does the
                // counting
                let body = orient_to_x(v, *body);
                let p = ext.fresh_plain(1);
                queue.push(Formula::Forall(
                    Var::X,
                    Box::new(Formula::or(vec![
                        Formula::not(unary(p, Var::X)),
                        body.clone(),
                    ])),
                ));
                queue.push(Formula::Forall(
                    Var::X,
                    Box::new(Formula::or(vec![unary(p, Var::X), nnf_neg(&body)])),
                ));
                constraints.push(CardinalityConstraint {
                    pred: p,
                    cmp: op,
                    bound: Bound::Const(m),
                });
            }
            Formula::Forall(v, body) => {
                let body = orient_to_x(v, *body);
                if let Formula::And(parts) = body {
                    queue.extend(
                        parts
                            .into_iter()
                            .map(|p| Formula::Forall(Var::X, Box::new(p))),
                    );
                    continue;
                }
                match try_direct_block(body.clone()) {
                    Some((gamma, prims, psi)) => compile_counting(
                        &mut ext,
                        &mut out,
                        &mut constraints,
                        &mut normalizers,
                        gamma,
                        &prims,
                        psi,
                    )?,
                    None => {
                        let body = extract_counting(&mut ext, &mut queue, body)?;
                        queue.push(Formula::Forall(Var::X, Box::new(body)));
                    }
                }
            }
            Formula::Exists(v, body) => {
                let body = extract_counting(&mut ext, &mut queue, *body)?;
                queue.push(Formula::Exists(v, Box::new(body)));
            }
            Formula::Or(parts) => {
                // distribute conjunctive disjuncts that hide counting, then
                // fold the remaining disjuncts into the first quantified one
                if let Some(pos) = parts
                    .iter()
                    .position(|p| p.has_counting() && matches!(p, Formula::And(_)))
                {
                    let mut rest = parts.clone();
                    let and_part = rest.remove(pos);
                    if let Formula::And(subs) = and_part {
                        for sub in subs {
                            let mut alt = rest.clone();
                            alt.push(sub);
                            queue.push(Formula::or(alt));
                        }
                    }
                    continue;
                }
                if parts
                    .iter()
                    .any(|p| matches!(p, Formula::CountExists(..)) && p.is_sentence())
                {
                    return Err(Error::Unsupported(
                        "a counting quantifier over a closed body under a disjunction would \
                         need a conditional cardinality constraint"
                            .into(),
                    ));
                }
                let pos = parts
                    .iter()
                    .position(|p| matches!(p, Formula::Forall(..) | Formula::Exists(..)))
                    .ok_or_else(|| {
                        Error::Unsupported(
                            "counting quantifier in an unreducible disjunction".into(),
                        )
                    })?;
                let mut rest = parts;
                let q = rest.remove(pos);
                match q {
                    Formula::Forall(v, b) => {
                        rest.push(*b);
                        queue.push(Formula::Forall(v, Box::new(Formula::or(rest))));
                    }
                    Formula::Exists(v, b) => {
                        rest.push(*b);
                        queue.push(Formula::Exists(v, Box::new(Formula::or(rest))));
                    }
                    _ => unreachable!(),
                }
            }
            other => {
                // NNF leaves no negations above quantifiers, so a counting
                // quantifier can only hide below the cases above
                return Err(Error::Internal(format!(
                    "unexpected sentence shape during counting reduction: {other:?}"
                )));
            }
        }
    }

    out.reverse();
    Ok(Reduction {
        sentence: Formula::and(out),
        vocab: ext.vocab,
        weights: ext.weights,
        constraints,
        normalizers,
    })
}

/// If the block body (free variable x) is a disjunction of counting-free
/// parts plus counting quantifiers over y sharing one counting-free body,
/// returns (guard, primitives, shared body) for direct compilation.
fn try_direct_block(body: Formula) -> Option<(Vec<Formula>, Vec<(CmpOp, u64)>, Formula)> {
    let parts = disjuncts(body);
    let mut gamma = Vec::new();
    let mut prims = Vec::new();
    let mut psi: Option<Formula> = None;
    for part in parts {
        if !part.has_counting() {
            gamma.push(part);
            continue;
        }
        match part {
            Formula::CountExists(op, m, Var::Y, b) if !b.has_counting() => {
                match &psi {
                    None => psi = Some(*b),
                    Some(p) if *p == *b => {}
                    Some(_) => return None,
                }
                prims.push((op, m));
            }
            _ => return None,
        }
    }
    psi.map(|psi| (gamma, prims, psi))
}

/// Replaces the innermost counting subformula of `body` by a fresh unary
/// predicate and queues the defining blocks. Closed counting subformulas
/// cannot be conditioned on and are rejected.
fn extract_counting(
    ext: &mut Extender,
    queue: &mut Vec<Formula>,
    body: Formula,
) -> Result<Formula> {
    let target = find_innermost_counting(&body)
        .ok_or_else(|| Error::Internal("extraction called without counting".into()))?;
    let free = target.free_vars();
    let v = match free.len() {
        0 => {
            return Err(Error::Unsupported(
                "a counting quantifier over a closed body may only appear as a top-level \
                 conjunct"
                    .into(),
            ))
        }
        1 => free.into_iter().next().unwrap(),
        _ => return Err(Error::Internal("counting subformula with two free variables".into())),
    };
    let z = ext.fresh_plain(1);
    let replaced = replace_all(&body, &target, &unary(z, v));
    let oriented = orient_to_x(v, target);
    queue.push(Formula::Forall(
        Var::X,
        Box::new(Formula::or(vec![
            Formula::not(unary(z, Var::X)),
            oriented.clone(),
        ])),
    ));
    queue.push(Formula::Forall(
        Var::X,
        Box::new(Formula::or(vec![unary(z, Var::X), nnf_neg(&oriented)])),
    ));
    Ok(replaced)
}

/// Compiles ∀x.(γ(x) ∨ ⋁_i ∃^{op_i m_i}y.ψ(x,y)) into FO² conjuncts,
/// cardinality constraints and normalizers.
///
/// The union of the satisfied witness counts is decomposed into signed
/// primitives: either a finite set of "exactly j" cases, or "anything"
/// minus the missing finite cases. One marker predicate per primitive
/// partitions the guarded elements; "exactly j" markers bind j shared
/// witness-slot relations, each totalized (one true cell per row, via a
/// per-row existential plus a |slot| = n constraint, with forced diagonal
/// padding on rows that do not use the slot). Slots for the same row are
/// pairwise distinct, so a row with an "exactly j" marker admits j!
/// slot arrangements; the recorded normalizer divides that back out.
fn compile_counting(
    ext: &mut Extender,
    out: &mut Vec<Formula>,
    constraints: &mut Vec<CardinalityConstraint>,
    normalizers: &mut Vec<Normalizer>,
    gamma: Vec<Formula>,
    prims: &[(CmpOp, u64)],
    psi: Formula,
) -> Result<()> {
    let forall_x = |f: Formula| Formula::Forall(Var::X, Box::new(f));
    let forall_xy =
        |f: Formula| Formula::Forall(Var::X, Box::new(Formula::Forall(Var::Y, Box::new(f))));

    // the set of witness counts accepted by the disjunction, as a finite
    // part below k plus an "everything from k on" tail
    let k = prims.iter().map(|&(_, m)| m).max().unwrap_or(0) + 1;
    let tail = prims.iter().any(|&(op, _)| op == CmpOp::Ge);
    let accepted = |c: u64| prims.iter().any(|&(op, m)| op.test(c, m));
    let family: Vec<(Prim, i8)> = if tail {
        let mut f = vec![(Prim::All, 1)];
        f.extend((0..k).filter(|&j| !accepted(j)).map(|j| (Prim::Ex(j), -1)));
        f
    } else {
        (0..k).filter(|&j| accepted(j)).map(|j| (Prim::Ex(j), 1)).collect()
    };

    let gamma_or = |mut extra: Vec<Formula>| -> Formula {
        let mut parts = gamma.clone();
        parts.append(&mut extra);
        Formula::or(parts)
    };

    // degenerate families first
    if tail && family.len() == 1 {
        return Ok(()); // every count accepted: the block is a tautology
    }
    if family.is_empty() {
        out.push(forall_x(gamma_or(vec![Formula::False])));
        return Ok(());
    }
    if family == [(Prim::Ex(0), 1)] {
        // no witnesses allowed: ∀x∀y.(γ(x) ∨ ¬ψ(x,y))
        out.push(forall_xy(gamma_or(vec![nnf_neg(&psi)])));
        return Ok(());
    }
    if tail && family == [(Prim::All, 1), (Prim::Ex(0), -1)] {
        // at least one witness: plain existential, Skolemized later
        out.push(forall_x(gamma_or(vec![Formula::Exists(
            Var::Y,
            Box::new(psi),
        )])));
        return Ok(());
    }
    if gamma.is_empty() && family == [(Prim::Ex(1), 1)] {
        // exactly one witness for every element: a slot relation that
        // coincides with ψ and has exactly one true cell per row
        let f = ext.fresh_plain(2);
        out.push(forall_xy(Formula::Iff(
            Box::new(binary(f, Var::X, Var::Y)),
            Box::new(psi),
        )));
        out.push(forall_x(Formula::Exists(
            Var::Y,
            Box::new(binary(f, Var::X, Var::Y)),
        )));
        constraints.push(CardinalityConstraint {
            pred: f,
            cmp: CmpOp::Eq,
            bound: Bound::DomainSize,
        });
        return Ok(());
    }
    if gamma.is_empty() && family == [(Prim::Ex(0), 1), (Prim::Ex(1), 1)] {
        // at most one witness: one slot per row; its cell is either the
        // unique witness or the diagonal pad
        let f = ext.fresh_plain(2);
        out.push(forall_xy(Formula::implies(
            psi.clone(),
            binary(f, Var::X, Var::Y),
        )));
        out.push(forall_xy(Formula::implies(
            Formula::and(vec![
                binary(f, Var::X, Var::Y),
                Formula::not(Formula::Eq(Var::X, Var::Y)),
            ]),
            psi,
        )));
        out.push(forall_x(Formula::Exists(
            Var::Y,
            Box::new(binary(f, Var::X, Var::Y)),
        )));
        constraints.push(CardinalityConstraint {
            pred: f,
            cmp: CmpOp::Eq,
            bound: Bound::DomainSize,
        });
        return Ok(());
    }

    // general path: one marker predicate per primitive, shared witness slots
    let slots_needed = family
        .iter()
        .filter_map(|&(p, _)| match p {
            Prim::Ex(j) => Some(j),
            Prim::All => None,
        })
        .max()
        .unwrap_or(0);
    if slots_needed > 16 {
        return Err(Error::TooLarge(format!(
            "counting threshold {slots_needed} needs as many witness-slot relations; \
             thresholds above 16 are refused"
        )));
    }
    let markers: Vec<(Prim, PredId)> = family
        .iter()
        .map(|&(p, sign)| {
            let d = ext.fresh(
                "@cq",
                1,
                ExactNumber::from_int(sign as i64),
                ExactNumber::one(),
            );
            (p, d)
        })
        .collect();
    for (p, d) in &markers {
        if let Prim::Ex(j) = p {
            if *j >= 2 {
                normalizers.push(Normalizer {
                    pred: *d,
                    witnesses: *j as u32,
                });
            }
        }
    }
    let slots: Vec<PredId> = (0..slots_needed).map(|_| ext.fresh_plain(2)).collect();

    // markers live only on guarded-out... rather, only on in-class elements
    let in_class_empty = gamma.is_empty();
    for &(_, d) in &markers {
        if !in_class_empty {
            out.push(forall_x(Formula::implies(
                unary(d, Var::X),
                Formula::not(Formula::or(gamma.clone())),
            )));
        }
    }
    // every in-class element picks exactly one marker
    out.push(forall_x(gamma_or(
        markers.iter().map(|&(_, d)| unary(d, Var::X)).collect(),
    )));
    for (a, &(_, da)) in markers.iter().enumerate() {
        for &(_, db) in markers.iter().skip(a + 1) {
            out.push(forall_x(Formula::or(vec![
                Formula::not(unary(da, Var::X)),
                Formula::not(unary(db, Var::X)),
            ])));
        }
    }

    // slot a (1-based) is live on rows whose marker requires at least a
    // witnesses
    let active = |a: usize| -> Formula {
        Formula::or(
            markers
                .iter()
                .filter(|&&(p, _)| matches!(p, Prim::Ex(j) if j as usize >= a))
                .map(|&(_, d)| unary(d, Var::X))
                .collect(),
        )
    };
    for (idx, &f) in slots.iter().enumerate() {
        let a = idx + 1;
        let act = active(a);
        // live slot cells are witnesses
        out.push(forall_xy(Formula::implies(
            Formula::and(vec![act.clone(), binary(f, Var::X, Var::Y)]),
            psi.clone(),
        )));
        // dead rows pad the diagonal, keeping the row total at one
        out.push(forall_xy(Formula::implies(
            Formula::not(act),
            Formula::Iff(
                Box::new(binary(f, Var::X, Var::Y)),
                Box::new(Formula::Eq(Var::X, Var::Y)),
            ),
        )));
        // one cell per row: at least one by the existential, at most one
        // because the total is pinned to n
        out.push(forall_x(Formula::Exists(
            Var::Y,
            Box::new(binary(f, Var::X, Var::Y)),
        )));
        constraints.push(CardinalityConstraint {
            pred: f,
            cmp: CmpOp::Eq,
            bound: Bound::DomainSize,
        });
        // slots of one row never collide while both live
        for &g in slots.iter().take(idx) {
            out.push(forall_xy(Formula::implies(
                Formula::and(vec![active(a), binary(g, Var::X, Var::Y)]),
                Formula::not(binary(f, Var::X, Var::Y)),
            )));
        }
    }
    // a row marked "exactly j" routes every witness through its j slots
    for &(p, d) in &markers {
        if let Prim::Ex(j) = p {
            out.push(forall_xy(Formula::implies(
                Formula::and(vec![unary(d, Var::X), psi.clone()]),
                Formula::or(
                    slots
                        .iter()
                        .take(j as usize)
                        .map(|&f| binary(f, Var::X, Var::Y))
                        .collect(),
                ),
            )));
        }
    }
    Ok(())
}

/// Trades every quantifier other than the leading universals for fresh
/// predicates, producing the matrix of an equivalent (for WFOMC on every
/// n ≥ 1, modularly) sentence ∀x∀y.matrix. Existentials become relaxation
/// predicates with weight pair (1, -1): rows with a witness force the
/// relaxation atom to true (weight 1); rows without one leave it free, and
/// the two choices cancel.
pub fn skolemize(
    sentence: &Sentence,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
) -> Result<Skolemized> {
    let mut ext = Extender {
        vocab: vocab.clone(),
        weights: weights.clone(),
    };
    let mut matrix_parts: Vec<Formula> = Vec::new();
    let mut sentences: Vec<Formula> = vec![to_nnf(sentence)];
    let mut blocks: Vec<Formula> = Vec::new(); // bodies of ∀x blocks, free ⊆ {x}

    while !sentences.is_empty() || !blocks.is_empty() {
        if let Some(item) = sentences.pop() {
            process_sentence_item(&mut ext, &mut sentences, &mut blocks, &mut matrix_parts, item)?;
            continue;
        }
        let body = blocks.pop().unwrap();
        process_block(&mut ext, &mut sentences, &mut blocks, &mut matrix_parts, body)?;
    }

    matrix_parts.reverse();
    Ok(Skolemized {
        matrix: Formula::and(matrix_parts),
        vocab: ext.vocab,
        weights: ext.weights,
    })
}

fn process_sentence_item(
    ext: &mut Extender,
    sentences: &mut Vec<Formula>,
    blocks: &mut Vec<Formula>,
    matrix_parts: &mut Vec<Formula>,
    item: Formula,
) -> Result<()> {
    match item {
        Formula::True => {}
        Formula::And(parts) => sentences.extend(parts),
        Formula::CountExists(..) => {
            return Err(Error::Unsupported(
                "counting quantifiers must be reduced before Skolemization".into(),
            ))
        }
        Formula::Forall(v, body) => blocks.push(orient_to_x(v, *body)),
        Formula::Exists(v, body) => {
            // drop the conjunct, add ∀v.(body → S) for a fresh nullary S
            // with weights (1, -1)
            let s = ext.fresh_skolem(0);
            let body = orient_to_x(v, *body);
            blocks.push(Formula::or(vec![nnf_neg(&body), Formula::Atom(s, Args::None)]));
        }
        f if f.is_quantifier_free() => matrix_parts.push(f),
        Formula::Or(parts) => {
            let quant_count = parts.iter().filter(|p| !p.is_quantifier_free()).count();
            if quant_count == 1 {
                let pos = parts.iter().position(|p| !p.is_quantifier_free()).unwrap();
                let mut rest = parts;
                let q = rest.remove(pos);
                match q {
                    Formula::Forall(v, b) => {
                        rest.push(*b);
                        sentences.push(Formula::Forall(v, Box::new(Formula::or(rest))));
                    }
                    Formula::Exists(v, b) => {
                        rest.push(*b);
                        sentences.push(Formula::Exists(v, Box::new(Formula::or(rest))));
                    }
                    Formula::And(subs) => {
                        for sub in subs {
                            let mut alt = rest.clone();
                            alt.push(sub);
                            sentences.push(Formula::or(alt));
                        }
                    }
                    Formula::CountExists(..) => {
                        return Err(Error::Unsupported(
                            "counting quantifiers must be reduced before Skolemization".into(),
                        ))
                    }
                    _ => {
                        return Err(Error::Internal(
                            "non-quantified part classified as quantified".into(),
                        ))
                    }
                }
            } else {
                // several quantified disjuncts: name each by a fresh
                // nullary predicate, defined biconditionally
                let mut named = Vec::new();
                for part in parts {
                    if part.is_quantifier_free() {
                        named.push(part);
                        continue;
                    }
                    let z = ext.fresh_plain(0);
                    let z_atom = Formula::Atom(z, Args::None);
                    sentences.push(Formula::or(vec![
                        Formula::not(z_atom.clone()),
                        part.clone(),
                    ]));
                    sentences.push(Formula::or(vec![z_atom.clone(), nnf_neg(&part)]));
                    named.push(z_atom);
                }
                sentences.push(Formula::or(named));
            }
        }
        other => {
            return Err(Error::Internal(format!(
                "unexpected sentence shape during Skolemization: {other:?}"
            )))
        }
    }
    Ok(())
}

fn process_block(
    ext: &mut Extender,
    sentences: &mut Vec<Formula>,
    blocks: &mut Vec<Formula>,
    matrix_parts: &mut Vec<Formula>,
    body: Formula,
) -> Result<()> {
    if let Formula::And(parts) = body {
        blocks.extend(parts);
        return Ok(());
    }
    if body.is_quantifier_free() {
        matrix_parts.push(body);
        return Ok(());
    }
    let parts = disjuncts(body);
    let simple = parts
        .iter()
        .filter(|p| !p.is_quantifier_free())
        .collect::<Vec<_>>();
    if simple.len() == 1 {
        match simple[0] {
            Formula::Forall(Var::Y, b) if b.is_quantifier_free() => {
                let psi = (**b).clone();
                let gamma: Vec<Formula> = parts
                    .iter()
                    .filter(|p| p.is_quantifier_free())
                    .cloned()
                    .collect();
                let mut all = gamma;
                all.push(psi);
                matrix_parts.push(Formula::or(all));
                return Ok(());
            }
            Formula::Exists(Var::Y, b) if b.is_quantifier_free() => {
                let psi = (**b).clone();
                let mut all: Vec<Formula> = parts
                    .iter()
                    .filter(|p| p.is_quantifier_free())
                    .cloned()
                    .collect();
                all.push(psi);
                let s = ext.fresh_skolem(1);
                matrix_parts.push(Formula::implies(Formula::or(all), unary(s, Var::X)));
                return Ok(());
            }
            _ => {}
        }
    }
    // general case: name the innermost quantified subformula
    let target = find_innermost_quantifier(&Formula::Or(parts.clone()))
        .ok_or_else(|| Error::Internal("block without quantifier reached extraction".into()))?;
    if matches!(target, Formula::CountExists(..)) {
        return Err(Error::Unsupported(
            "counting quantifiers must be reduced before Skolemization".into(),
        ));
    }
    let free = target.free_vars();
    let body = Formula::or(parts);
    match free.len() {
        0 => {
            let z = ext.fresh_plain(0);
            let z_atom = Formula::Atom(z, Args::None);
            blocks.push(replace_all(&body, &target, &z_atom));
            sentences.push(Formula::or(vec![Formula::not(z_atom.clone()), target.clone()]));
            sentences.push(Formula::or(vec![z_atom, nnf_neg(&target)]));
        }
        1 => {
            let v = free.into_iter().next().unwrap();
            let z = ext.fresh_plain(1);
            blocks.push(replace_all(&body, &target, &unary(z, v)));
            let oriented = orient_to_x(v, target);
            blocks.push(Formula::or(vec![
                Formula::not(unary(z, Var::X)),
                oriented.clone(),
            ]));
            blocks.push(Formula::or(vec![unary(z, Var::X), nnf_neg(&oriented)]));
        }
        _ => {
            return Err(Error::Internal(
                "quantified subformula with two free variables".into(),
            ))
        }
    }
    Ok(())
}

/// Conjoins the loop-freedom constraint ¬R(x,x) for the distinguished
/// relation of the essential-DAG axiom.
pub fn conjoin_loopfree(matrix: QFFormula, r: PredId) -> QFFormula {
    Formula::and(vec![
        matrix,
        Formula::not(binary(r, Var::X, Var::X)),
    ])
}

/// Full normalization pipeline for n ≥ 1 domains.
pub fn normalize(
    sentence: &Sentence,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    user_constraints: &[CardinalityConstraint],
    loopfree: Option<PredId>,
) -> Result<NormalizedProblem> {
    let nnf = to_nnf(sentence);
    let red = reduce_c2(&nnf, vocab, weights)?;
    let sk = skolemize(&red.sentence, &red.vocab, &red.weights)?;
    let mut matrix = sk.matrix;
    if let Some(r) = loopfree {
        matrix = conjoin_loopfree(matrix, r);
    }
    let mut constraints = user_constraints.to_vec();
    constraints.extend(red.constraints);
    Ok(NormalizedProblem {
        matrix,
        vocab: sk.vocab,
        weights: sk.weights,
        constraints,
        normalizers: red.normalizers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Interpretation;
    use crate::oracle::brute_wfomc;
    use crate::parse::parse_sentence;

    fn ur() -> (Vocabulary, SymmetricWeights) {
        let mut v = Vocabulary::new();
        v.add("U", 1).unwrap();
        v.add("R", 2).unwrap();
        let w = SymmetricWeights::unit(&v);
        (v, w)
    }

    #[test]
    fn nnf_examples() {
        let (v, _) = ur();
        let s = parse_sentence("~(forall x. U(x))", &v).unwrap();
        let n = to_nnf(&s);
        assert_eq!(n, parse_sentence("exists x. ~U(x)", &v).unwrap());

        let s = parse_sentence("forall x. ~(exists[>=2] y. R(x,y))", &v).unwrap();
        let n = to_nnf(&s);
        assert_eq!(n, parse_sentence("forall x exists[<=1] y. R(x,y)", &v).unwrap());

        let f = crate::parse::parse_formula("~(U(x) & R(x,y))", &v).unwrap();
        let n = to_nnf(&f);
        assert_eq!(n, crate::parse::parse_formula("~U(x) | ~R(x,y)", &v).unwrap());
    }

    #[test]
    fn nnf_equality_and_equals_complement() {
        let (v, _) = ur();
        let f = crate::parse::parse_formula("~(x = y)", &v).unwrap();
        assert_eq!(to_nnf(&f), Formula::not(Formula::Eq(Var::X, Var::Y)));
        // ¬∃^=2 expands into the two-sided complement
        let s = parse_sentence("forall x. ~(exists[=2] y. R(x,y))", &v).unwrap();
        let n = to_nnf(&s);
        let want = parse_sentence(
            "forall x. (exists[<=1] y. R(x,y)) | (exists[>=3] y. R(x,y))",
            &v,
        )
        .unwrap();
        assert_eq!(n, want);
    }

    #[test]
    fn reduce_is_identity_without_counting() {
        let (v, w) = ur();
        for text in [
            "forall x forall y. R(x,y) -> U(y)",
            "forall x exists y. R(x,y)",
            "exists x. U(x)",
        ] {
            let s = parse_sentence(text, &v).unwrap();
            let red = reduce_c2(&s, &v, &w).unwrap();
            assert_eq!(red.sentence, s);
            assert_eq!(red.vocab.len(), v.len());
            assert!(red.constraints.is_empty());
            assert!(red.normalizers.is_empty());
        }
    }

    #[test]
    fn reduce_output_is_counting_free() {
        let (v, w) = ur();
        for text in [
            "forall x exists[=1] y. R(x,y)",
            "forall x exists[<=1] y. R(x,y)",
            "forall x exists[>=2] y. R(x,y)",
            "forall x. U(x) -> (exists[=2] y. R(x,y))",
            "exists[=2] x. U(x)",
            "forall x. ~(exists[=1] y. R(x,y))",
        ] {
            let s = parse_sentence(text, &v).unwrap();
            let red = reduce_c2(&to_nnf(&s), &v, &w).unwrap();
            assert!(!red.sentence.has_counting(), "counting left in {text}");
            // every introduced weight is 1 or -1
            for p in v.len()..red.vocab.len() {
                let one = ExactNumber::one();
                let minus = ExactNumber::from_int(-1);
                assert!(
                    (red.weights.pos(p) == &one || red.weights.pos(p) == &minus)
                        && (red.weights.neg(p) == &one || red.weights.neg(p) == &minus),
                    "bad weights for introduced predicate in {text}"
                );
            }
        }
    }

    #[test]
    fn closed_counting_below_top_level_is_unsupported() {
        let (v, w) = ur();
        let s = parse_sentence("(exists[=2] x. U(x)) | (forall x. U(x))", &v).unwrap();
        match reduce_c2(&to_nnf(&s), &v, &w) {
            Err(Error::Unsupported(_)) => {}
            other => panic!("expected unsupported, got {other:?}"),
        }
    }

    #[test]
    fn skolemize_passes_universal_matrices_through() {
        let (v, w) = ur();
        let s = parse_sentence("forall x forall y. R(x,y) -> U(y)", &v).unwrap();
        let sk = skolemize(&s, &v, &w).unwrap();
        assert_eq!(sk.vocab.len(), v.len());
        assert_eq!(
            sk.matrix,
            to_nnf(&crate::parse::parse_formula("R(x,y) -> U(y)", &v).unwrap())
        );
    }

    #[test]
    fn skolemize_universal_existential() {
        let (v, w) = ur();
        let s = parse_sentence("forall x exists y. R(x,y)", &v).unwrap();
        let sk = skolemize(&s, &v, &w).unwrap();
        assert_eq!(sk.vocab.len(), v.len() + 1);
        let s_id = v.len();
        assert_eq!(sk.weights.pos(s_id), &ExactNumber::one());
        assert_eq!(sk.weights.neg(s_id), &ExactNumber::from_int(-1));
        assert!(sk.matrix.is_quantifier_free());
    }

    /// The gold standard for the whole module: normalizing must preserve
    /// the weighted count as measured by the brute-force oracle.
    fn assert_preserved(text: &str, v: &Vocabulary, w: &SymmetricWeights, ns: &[u32]) {
        let s = parse_sentence(text, v).unwrap();
        for &n in ns {
            let expected = brute_wfomc(&s, v, w, &[], n, None).unwrap();
            let problem = normalize(&s, v, w, &[], None).unwrap();
            let folded = problem.effective_weights();
            let resolved: Vec<CardinalityConstraint> = problem
                .constraints
                .iter()
                .map(|cc| CardinalityConstraint {
                    pred: cc.pred,
                    cmp: cc.cmp,
                    bound: Bound::Const(cc.bound.resolve(n as u64)),
                })
                .collect();
            let got = brute_wfomc(
                &problem.as_universal_sentence(),
                &problem.vocab,
                &folded,
                &resolved,
                n,
                None,
            )
            .unwrap();
            assert_eq!(got, expected, "normalization changed the count of `{text}` at n={n}");
        }
    }

    #[test]
    fn skolemization_preserves_counts() {
        let (v, w) = ur();
        assert_preserved("forall x exists y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("exists x. U(x)", &v, &w, &[1, 2]);
        assert_preserved("exists x forall y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("exists x exists y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("forall x. U(x) | (exists y. R(x,y))", &v, &w, &[1, 2]);
        assert_preserved("(forall x. U(x)) | (forall x. R(x,x))", &v, &w, &[1, 2]);
        assert_preserved("(exists x. U(x)) | (forall x. R(x,x))", &v, &w, &[1, 2]);
    }

    #[test]
    fn skolemization_preserves_weighted_counts() {
        let mut v = Vocabulary::new();
        let u = v.add("U", 1).unwrap();
        v.add("R", 2).unwrap();
        let mut w = SymmetricWeights::unit(&v);
        w.set(u, ExactNumber::from_int(2), ExactNumber::from_int(3));
        assert_preserved("forall x exists y. R(x,y) & U(x)", &v, &w, &[1, 2]);
        assert_preserved("exists x. U(x)", &v, &w, &[1, 2]);
    }

    #[test]
    fn counting_reduction_preserves_counts_small() {
        let (v, w) = ur();
        assert_preserved("forall x exists[=1] y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("forall x exists[<=1] y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("exists[=1] x. U(x)", &v, &w, &[1, 2]);
        assert_preserved("exists[<=1] x. U(x)", &v, &w, &[1, 2]);
        assert_preserved("exists[>=1] x. U(x)", &v, &w, &[1, 2]);
        assert_preserved("forall x. U(x) -> (exists[=1] y. R(x,y))", &v, &w, &[1, 2]);
        assert_preserved("forall x. ~(exists[=1] y. R(x,y))", &v, &w, &[1, 2]);
        assert_preserved("forall x exists[=0] y. R(x,y)", &v, &w, &[1, 2]);
    }

    #[test]
    fn counting_reduction_with_markers_preserves_counts() {
        // thresholds of two exercise the marker/slot machinery with its
        // factorial normalizer
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        let w = SymmetricWeights::unit(&v);
        assert_preserved("forall x exists[=2] y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("forall x exists[<=2] y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("forall x exists[>=2] y. R(x,y)", &v, &w, &[1, 2]);
        assert_preserved("forall x. ~(exists[=2] y. R(x,y))", &v, &w, &[1, 2]);
    }

    #[test]
    fn normalized_matrix_has_loopfree_conjunct() {
        let (v, w) = ur();
        let r = v.lookup("R").unwrap();
        let s = parse_sentence("forall x forall y. true", &v).unwrap();
        let problem = normalize(&s, &v, &w, &[], Some(r)).unwrap();
        // the matrix must reject any interpretation with a self-loop
        let mut omega = Interpretation::all_false(&problem.vocab, 1);
        omega.set(crate::logic::GroundAtom::binary(r, 1, 1), true);
        assert!(!crate::logic::models(
            &omega,
            &problem.as_universal_sentence()
        ));
    }
}
