//! Closed-form weighted counting for sentences of the form ∀x∀y.φ(x,y):
//! the per-cardinality-vector product formula, the sum over vectors, and
//! the resolution of cardinality constraints.
//!
//! A model of ∀x∀y.φ is determined by the 1-type of every element and the
//! 2-table of every unordered element pair, subject to consistency of each
//! induced 2-type with φ. Grouping elements by 1-type reduces the count to
//! a sum over cardinality vectors k of
//!
//!   C(|k|; k) · Π_i w_i^{k_i} · Π_{i≤j} r_ij^{k(i,j)}
//!
//! with k(i,i) = C(k_i, 2), k(i,j) = k_i·k_j, and r_ij the weighted number
//! of 2-tables consistent between types i and j.
//!
//! Cardinality constraints on unary predicates are enforced by filtering
//! cardinality vectors. Constraints on binary predicates replace the
//! predicate's weight by integer abscissas 1, 2, …, n²+1, evaluate the
//! whole (possibly axiom-aware) count at each grid point, interpolate the
//! polynomial in the number of true atoms, and keep the admitted
//! coefficients reweighted by the predicate's true weights.

use std::collections::HashMap;

use crate::arith::{factorial, for_each_composition, multinomial, ExactNumber};
use crate::cells::CellCtx;
use crate::essential::{AxiomCtx, EssentialDagSpec};
use crate::logic::{
    CardinalityConstraint, CmpOp, Formula, PredId, QFFormula, Sentence, SymmetricWeights,
    Vocabulary,
};
use crate::normal::{normalize, NormalizedProblem, Normalizer};
use crate::{Error, Result};

/// Weight-independent per-matrix data: the self-consistent 1-types and, for
/// every ordered pair of them, the list of consistent 2-tables.
pub(crate) struct BranchCtx {
    pub cells: CellCtx,
    /// indices of self-consistent 1-types, ascending
    pub live: Vec<usize>,
    /// cons[a][b] = 2-tables l with the 2-type (live[a], live[b], l)
    /// consistent with φ, the x side being live[a]
    pub cons: Vec<Vec<Vec<usize>>>,
}

impl BranchCtx {
    pub fn new(phi: &QFFormula, vocab: &Vocabulary) -> Self {
        let cells = CellCtx::new(vocab);
        let live: Vec<usize> = (0..cells.u())
            .filter(|&i| cells.self_consistent(phi, i))
            .collect();
        let b = cells.b();
        let cons: Vec<Vec<Vec<usize>>> = live
            .iter()
            .map(|&i| {
                live.iter()
                    .map(|&j| {
                        (0..b)
                            .filter(|&l| {
                                cells.eval_pair(phi, i, j, l, false)
                                    && cells.eval_pair(phi, i, j, l, true)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        BranchCtx { cells, live, cons }
    }

    /// Weighted count of consistent 2-tables between live positions a, b.
    pub fn r_value(&self, weights: &SymmetricWeights, a: usize, b: usize) -> ExactNumber {
        let mut sum = ExactNumber::zero();
        for &l in &self.cons[a][b] {
            sum += self.cells.table_weight(weights, l);
        }
        sum
    }
}

/// Per-cardinality-vector predicates: unary cardinality constraints filter
/// vectors, normalizers scale them. Masks are indexed by live 1-type
/// position.
pub(crate) struct KFilters {
    pub unary: Vec<(Vec<bool>, CmpOp, u64)>,
    /// (mask, witnesses): multiply by (1/witnesses!)^count
    pub norms: Vec<(Vec<bool>, u32)>,
}

impl KFilters {
    pub fn build(
        bctx: &BranchCtx,
        unary_ccs: &[(PredId, CmpOp, u64)],
        normalizers: &[Normalizer],
    ) -> KFilters {
        let mask_for = |pred: PredId| -> Vec<bool> {
            bctx.live
                .iter()
                .map(|&i| bctx.cells.x_value(i, pred))
                .collect()
        };
        KFilters {
            unary: unary_ccs
                .iter()
                .map(|&(p, cmp, bound)| (mask_for(p), cmp, bound))
                .collect(),
            norms: normalizers
                .iter()
                .map(|nz| (mask_for(nz.pred), nz.witnesses))
                .collect(),
        }
    }

}

/// The product formula for one cardinality vector over the full 1-type
/// index set. A vector populating a 1-type inconsistent with φ(x,x) gives
/// zero; for |k| ≥ 2 that is already forced by a zero r factor, but a
/// single element sees no pair factor and needs the explicit check.
pub fn wfomc_fixed_k(
    phi: &QFFormula,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    k: &[u64],
) -> ExactNumber {
    let cells = CellCtx::new(vocab);
    assert_eq!(k.len(), cells.u(), "cardinality vector length must match the 1-type count");
    for (i, &ki) in k.iter().enumerate() {
        if ki > 0 && !cells.self_consistent(phi, i) {
            return ExactNumber::zero();
        }
    }
    let k32: Vec<u32> = k.iter().map(|&v| v as u32).collect();
    let mut term = multinomial(&k32);
    for (i, &ki) in k.iter().enumerate() {
        if ki > 0 {
            term *= &cells.type_weight(weights, i).pow(ki as u32);
        }
    }
    for i in 0..k.len() {
        for j in i..k.len() {
            let e = if i == j {
                k[i] * k[i].saturating_sub(1) / 2
            } else {
                k[i] * k[j]
            };
            if e == 0 {
                continue;
            }
            let mut r = ExactNumber::zero();
            for l in 0..cells.b() {
                if cells.two_type_consistent(phi, i, j, l) {
                    r += cells.table_weight(weights, l);
                }
            }
            if r.is_zero() {
                return ExactNumber::zero();
            }
            term *= &r.pow(e as u32);
        }
    }
    term
}

/// Σ over all cardinality vectors with |k| = n. The matrix must be free of
/// nullary atoms (substitute them first).
pub fn wfomc(phi: &QFFormula, vocab: &Vocabulary, weights: &SymmetricWeights, n: u32) -> ExactNumber {
    let bctx = BranchCtx::new(phi, vocab);
    let filters = KFilters {
        unary: Vec::new(),
        norms: Vec::new(),
    };
    sum_over_k(&bctx, weights, n, &filters)
}

/// Groups interchangeable live 1-types: positions with identical
/// consistency rows (including among themselves) and identical filter
/// masks contribute through the sum of their type weights. The grouping is
/// weight-independent, so it stays valid across interpolation grid points.
pub(crate) fn merge_groups(bctx: &BranchCtx, filters: &KFilters) -> Vec<Vec<usize>> {
    let live_n = bctx.live.len();
    let mergeable = |a: usize, b: usize| -> bool {
        for (mask, _, _) in &filters.unary {
            if mask[a] != mask[b] {
                return false;
            }
        }
        for (mask, _) in &filters.norms {
            if mask[a] != mask[b] {
                return false;
            }
        }
        let diag = &bctx.cons[a][a];
        if &bctx.cons[b][b] != diag || &bctx.cons[a][b] != diag || &bctx.cons[b][a] != diag {
            return false;
        }
        (0..live_n).all(|c| c == a || c == b || bctx.cons[a][c] == bctx.cons[b][c])
    };
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for a in 0..live_n {
        match groups.iter_mut().find(|g| mergeable(g[0], a)) {
            Some(g) => g.push(a),
            None => groups.push(vec![a]),
        }
    }
    groups
}

/// The k-sum at domain size n with filters applied per vector.
pub(crate) fn sum_over_k(
    bctx: &BranchCtx,
    weights: &SymmetricWeights,
    n: u32,
    filters: &KFilters,
) -> ExactNumber {
    let groups = merge_groups(bctx, filters);
    if groups.is_empty() {
        return if n == 0 { ExactNumber::one() } else { ExactNumber::zero() };
    }
    let gw: Vec<ExactNumber> = groups
        .iter()
        .map(|g| {
            let mut sum = ExactNumber::zero();
            for &a in g {
                sum += bctx.cells.type_weight(weights, bctx.live[a]);
            }
            sum
        })
        .collect();
    let gn = groups.len();
    let r: Vec<Vec<ExactNumber>> = (0..gn)
        .map(|a| {
            (0..gn)
                .map(|b| bctx.r_value(weights, groups[a][0], groups[b][0]))
                .collect()
        })
        .collect();
    let norm_factors: Vec<ExactNumber> = filters
        .norms
        .iter()
        .map(|&(_, wit)| ExactNumber::from_bigint(factorial(wit as usize)).recip())
        .collect();

    let mut total = ExactNumber::zero();
    for_each_composition(n, gn, &mut |k: &[u32]| {
        for (mask, cmp, bound) in &filters.unary {
            let cnt: u64 = k
                .iter()
                .zip(groups.iter())
                .filter(|(_, g)| mask[g[0]])
                .map(|(&ki, _)| ki as u64)
                .sum();
            if !cmp.test(cnt, *bound) {
                return;
            }
        }
        let mut term = multinomial(k);
        for (a, &ka) in k.iter().enumerate() {
            if ka == 0 {
                continue;
            }
            if gw[a].is_zero() {
                return;
            }
            term *= &gw[a].pow(ka);
        }
        for a in 0..gn {
            if k[a] == 0 {
                continue;
            }
            for b in a..gn {
                if k[b] == 0 {
                    continue;
                }
                let e = if a == b { k[a] * (k[a] - 1) / 2 } else { k[a] * k[b] };
                if e == 0 {
                    continue;
                }
                if r[a][b].is_zero() {
                    return;
                }
                term *= &r[a][b].pow(e);
            }
        }
        for ((mask, _), factor) in filters.norms.iter().zip(&norm_factors) {
            let cnt: u32 = k
                .iter()
                .zip(groups.iter())
                .filter(|(_, g)| mask[g[0]])
                .map(|(&ki, _)| ki)
                .sum();
            if cnt > 0 {
                term *= &factor.pow(cnt);
            }
        }
        total += term;
    });
    total
}

/// Evaluates `eval` over the abscissa grid for the binary-constrained
/// predicates, interpolates the polynomial in their true-atom counts, and
/// sums the admitted coefficients reweighted by the true weights.
pub(crate) fn resolve_constraints<F>(
    weights: &SymmetricWeights,
    binary: &[(PredId, Vec<(CmpOp, u64)>)],
    n: u32,
    mut eval: F,
) -> Result<ExactNumber>
where
    F: FnMut(&SymmetricWeights) -> Result<ExactNumber>,
{
    if binary.is_empty() {
        return eval(weights);
    }
    let atoms = (n as u64) * (n as u64);
    let pts = atoms as usize + 1;
    let axes = binary.len();
    let grid_size = pts
        .checked_pow(axes as u32)
        .filter(|&s| s <= 4_000_000)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "interpolation grid of {pts}^{axes} points is too large"
            ))
        })?;

    let mut values: Vec<ExactNumber> = Vec::with_capacity(grid_size);
    let mut idx = vec![0usize; axes];
    loop {
        let mut w = weights.clone();
        for (ax, &(pred, _)) in idx.iter().zip(binary.iter()) {
            w.set(
                pred,
                ExactNumber::from_int(*ax as i64 + 1),
                ExactNumber::one(),
            );
        }
        values.push(eval(&w)?);
        // odometer, last axis fastest
        let mut ax = axes;
        loop {
            if ax == 0 {
                break;
            }
            ax -= 1;
            idx[ax] += 1;
            if idx[ax] < pts {
                break;
            }
            idx[ax] = 0;
        }
        if idx.iter().all(|&v| v == 0) {
            break;
        }
    }
    debug_assert_eq!(values.len(), grid_size);

    let coeffs = tensor_interpolate(axes, pts, values)?;

    let mut total = ExactNumber::zero();
    let mut e = vec![0usize; axes];
    for (pos, coeff) in coeffs.iter().enumerate() {
        // decode the flattened degree index, axis 0 slowest
        let mut rem = pos;
        for ax in (0..axes).rev() {
            e[ax] = rem % pts;
            rem /= pts;
        }
        if coeff.is_zero() {
            continue;
        }
        let admitted = e
            .iter()
            .zip(binary.iter())
            .all(|(&deg, (_, tests))| tests.iter().all(|&(cmp, b)| cmp.test(deg as u64, b)));
        if !admitted {
            continue;
        }
        let mut term = coeff.clone();
        for (&deg, &(pred, _)) in e.iter().zip(binary.iter()) {
            let pos_w = weights.pos(pred);
            let neg_w = weights.neg(pred);
            if deg > 0 {
                term *= &pos_w.pow(deg as u32);
            }
            let rest = atoms - deg as u64;
            if rest > 0 {
                term *= &neg_w.pow(rest as u32);
            }
        }
        total += term;
    }
    Ok(total)
}

/// Interpolates a value tensor sampled at abscissas 1..=pts on every axis
/// into the coefficient tensor of the underlying polynomial (same layout,
/// degree replacing abscissa index).
fn tensor_interpolate(axes: usize, pts: usize, values: Vec<ExactNumber>) -> Result<Vec<ExactNumber>> {
    if axes == 0 {
        return Ok(values);
    }
    let chunk = values.len() / pts;
    let mut sub: Vec<Vec<ExactNumber>> = Vec::with_capacity(pts);
    for part in values.chunks(chunk) {
        sub.push(tensor_interpolate(axes - 1, pts, part.to_vec())?);
    }
    let mut out = vec![ExactNumber::zero(); pts * chunk];
    for pos in 0..chunk {
        let points: Vec<(ExactNumber, ExactNumber)> = sub
            .iter()
            .enumerate()
            .map(|(i, row)| (ExactNumber::from_int(i as i64 + 1), row[pos].clone()))
            .collect();
        let poly = crate::arith::interpolate(&points)?;
        for (deg, slot) in out.iter_mut().skip(pos).step_by(chunk).enumerate() {
            *slot = poly.coeff(deg);
        }
    }
    Ok(out)
}

/// Evaluates the normalized problem at domain size n, resolving all
/// cardinality constraints, and dispatching to the essential-DAG dynamic
/// program when an axiom is present.
pub fn wfomc_with_cc(
    problem: &NormalizedProblem,
    n: u32,
    axiom: Option<EssentialDagSpec>,
) -> Result<ExactNumber> {
    let vocab = &problem.vocab;
    let nullary: Vec<PredId> = (0..vocab.len())
        .filter(|&p| vocab.pred(p).arity == 0)
        .collect();
    for cc in &problem.constraints {
        if cc.pred >= vocab.len() {
            return Err(Error::UnknownPredicate(format!("predicate #{}", cc.pred)));
        }
    }

    let mut unary_ccs: Vec<(PredId, CmpOp, u64)> = Vec::new();
    let mut binary_map: HashMap<PredId, Vec<(CmpOp, u64)>> = HashMap::new();
    let mut binary_order: Vec<PredId> = Vec::new();
    let mut nullary_ccs: Vec<(PredId, CmpOp, u64)> = Vec::new();
    for cc in &problem.constraints {
        let bound = cc.bound.resolve(n as u64);
        match vocab.pred(cc.pred).arity {
            0 => nullary_ccs.push((cc.pred, cc.cmp, bound)),
            1 => unary_ccs.push((cc.pred, cc.cmp, bound)),
            2 => {
                if !binary_map.contains_key(&cc.pred) {
                    binary_order.push(cc.pred);
                }
                binary_map.entry(cc.pred).or_default().push((cc.cmp, bound));
            }
            a => {
                return Err(Error::Invalid(format!(
                    "cardinality constraint on arity-{a} predicate"
                )))
            }
        }
    }
    let binary: Vec<(PredId, Vec<(CmpOp, u64)>)> = binary_order
        .into_iter()
        .map(|p| (p, binary_map.remove(&p).unwrap()))
        .collect();

    let mut total = ExactNumber::zero();
    for mask in 0u64..(1u64 << nullary.len()) {
        let assignment: HashMap<PredId, bool> = nullary
            .iter()
            .enumerate()
            .map(|(bit, &p)| (p, mask >> bit & 1 == 1))
            .collect();
        let ok = nullary_ccs.iter().all(|&(p, cmp, bound)| {
            cmp.test(u64::from(assignment[&p]), bound)
        });
        if !ok {
            continue;
        }
        let mut branch_w = ExactNumber::one();
        for &p in &nullary {
            branch_w *= if assignment[&p] {
                problem.weights.pos(p)
            } else {
                problem.weights.neg(p)
            };
        }
        if branch_w.is_zero() {
            continue;
        }
        let phi = problem.matrix.substitute_nullary(&assignment);
        let bctx = BranchCtx::new(&phi, vocab);
        let filters = KFilters::build(&bctx, &unary_ccs, &problem.normalizers);
        let value = match axiom {
            None => resolve_constraints(&problem.weights, &binary, n, |w| {
                Ok(sum_over_k(&bctx, w, n, &filters))
            })?,
            Some(spec) => {
                let groups = merge_groups(&bctx, &filters);
                let actx = AxiomCtx::new(&bctx, vocab, spec, groups)?;
                resolve_constraints(&problem.weights, &binary, n, |w| {
                    actx.sum(w, n, &filters)
                })?
            }
        };
        branch_w *= &value;
        total += branch_w;
    }
    Ok(total)
}

/// Evaluates a closed sentence over the empty domain: universals hold,
/// existentials fail, and a counting quantifier holds exactly when zero
/// witnesses satisfy it. Only nullary atoms can influence the outcome.
fn empty_domain(
    sentence: &Sentence,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    ccs: &[CardinalityConstraint],
) -> Result<ExactNumber> {
    fn eval(f: &Formula, assignment: &HashMap<PredId, bool>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p, crate::logic::Args::None) => assignment[p],
            // non-nullary atoms and equalities sit under quantifiers in a
            // closed sentence, and quantifier bodies are never evaluated
            Formula::Atom(..) | Formula::Eq(..) => unreachable!("free variable over empty domain"),
            Formula::Not(g) => !eval(g, assignment),
            Formula::And(gs) => gs.iter().all(|g| eval(g, assignment)),
            Formula::Or(gs) => gs.iter().any(|g| eval(g, assignment)),
            Formula::Implies(a, b) => !eval(a, assignment) || eval(b, assignment),
            Formula::Iff(a, b) => eval(a, assignment) == eval(b, assignment),
            Formula::Forall(..) => true,
            Formula::Exists(..) => false,
            Formula::CountExists(op, m, _, _) => op.test(0, *m),
        }
    }
    let nullary: Vec<PredId> = (0..vocab.len())
        .filter(|&p| vocab.pred(p).arity == 0)
        .collect();
    let ccs_ok = ccs
        .iter()
        .all(|cc| cc.cmp.test(0, cc.bound.resolve(0)));
    if !ccs_ok {
        return Ok(ExactNumber::zero());
    }
    let mut total = ExactNumber::zero();
    for mask in 0u64..(1u64 << nullary.len()) {
        let assignment: HashMap<PredId, bool> = nullary
            .iter()
            .enumerate()
            .map(|(bit, &p)| (p, mask >> bit & 1 == 1))
            .collect();
        if !eval(sentence, &assignment) {
            continue;
        }
        let mut w = ExactNumber::one();
        for &p in &nullary {
            w *= if assignment[&p] {
                weights.pos(p)
            } else {
                weights.neg(p)
            };
        }
        total += w;
    }
    Ok(total)
}

/// Top-level entry: weighted model count of a closed sentence (with
/// counting quantifiers) under cardinality constraints and an optional
/// essential-DAG axiom, at domain size n.
pub fn count(
    sentence: &Sentence,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    ccs: &[CardinalityConstraint],
    axiom: Option<EssentialDagSpec>,
    n: u32,
) -> Result<ExactNumber> {
    if !sentence.is_sentence() {
        return Err(Error::Invalid(
            "the input formula must be a closed sentence".into(),
        ));
    }
    if let Some(spec) = axiom {
        let pred = vocab.pred(spec.relation);
        if pred.arity != 2 {
            return Err(Error::Invalid(format!(
                "the essential-DAG relation {} must be binary",
                pred.name
            )));
        }
    }
    if n == 0 {
        return empty_domain(sentence, vocab, weights, ccs);
    }
    let problem = normalize(sentence, vocab, weights, ccs, axiom.map(|s| s.relation))?;
    wfomc_with_cc(&problem, n, axiom)
}
