//! Weighted counting of models whose designated binary relation forms an
//! essential DAG with bounded indegree.
//!
//! An edge a → b of a DAG is protected when parents(a) ≠ parents(b)∖{a};
//! a DAG is essential when every edge is protected. Essential DAGs are
//! closed under removing the sink set, which yields a recursion: every
//! nonempty essential DAG decomposes into a set of sinks attached to a
//! smaller essential DAG, and inclusion-exclusion over "at least these
//! elements are sinks" removes the overcount.
//!
//! To run that recursion inside a 1-type cardinality dynamic program, each
//! element's 1-type is extended with its parent profile t: the number of
//! parents it has of each base 1-type, with |t| bounded by the indegree
//! cap d. The table A maps an extended census vector to the weighted count
//! of models realizing it; A[p] is assembled from strictly smaller
//! censuses by choosing the sink census k′, counting the ways the sinks
//! attach (`extension_count_n`), weighting the sinks' edge-free inner
//! structure (the Ψ′ product), and consulting A on the remainder.

use std::collections::HashMap;

use num::BigInt;

use crate::arith::{
    binomial, binomial_int, factorial, for_each_composition, multinomial, ExactNumber,
};
use crate::cells::{enumerate_t, Orient};
use crate::engine::{BranchCtx, KFilters};
use crate::logic::{PredId, QFFormula, Sentence, SymmetricWeights, Vocabulary};
use crate::normal::conjoin_loopfree;
use crate::{Error, Result};

/// The axiom: `relation` (binary) forms an essential DAG in which every
/// node has at most `max_indegree` parents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EssentialDagSpec {
    pub relation: PredId,
    pub max_indegree: u32,
}

/// Index layout of extended 1-types: pairs (base type, parent profile)
/// flattened as base · |T| + profile, with T the profiles over the live
/// base types of total at most d.
pub struct ExtLayout {
    /// number of live base 1-types
    pub base: usize,
    /// admissible parent profiles in enumeration order (total, then lex)
    pub t_list: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl ExtLayout {
    fn new(base: usize, d: u32) -> ExtLayout {
        let t_list = enumerate_t(base, d);
        let index = t_list
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        ExtLayout { base, t_list, index }
    }

    pub fn len(&self) -> usize {
        self.base * self.t_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slot(&self, base_pos: usize, t_pos: usize) -> usize {
        base_pos * self.t_list.len() + t_pos
    }

    pub fn t_position(&self, t: &[u32]) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Collapses an extended census to base-type totals.
    pub fn base_census(&self, k: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.base];
        for (slot, &v) in k.iter().enumerate() {
            out[slot / self.t_list.len()] += v;
        }
        out
    }
}

/// Number of admissible parent-set choices for one new sink with parent
/// profile t, given the census k″ of the elements that can serve as
/// parents: all profile-t subsets, minus the sets of the form
/// parents(a) ∪ {a} for an existing element a (attaching to such a set
/// would leave the edge a → sink unprotected). Distinct elements a yield
/// distinct excluded sets, so on any census realized by an actual model
/// the value is non-negative. On unrealizable censuses it can go
/// negative; callers only consult it after establishing that the
/// remainder census carries nonzero weight.
pub fn g_count(layout: &ExtLayout, k2: &[u32], t: &[u32]) -> ExactNumber {
    let avail = layout.base_census(k2);
    let mut choices = ExactNumber::one();
    for (i, &ti) in t.iter().enumerate() {
        choices *= &binomial(avail[i] as usize, ti as usize);
    }
    let mut excluded = 0i64;
    for (i, &ti) in t.iter().enumerate() {
        if ti == 0 {
            continue;
        }
        let mut tm = t.to_vec();
        tm[i] -= 1;
        if let Some(tp) = layout.t_position(&tm) {
            excluded += i64::from(k2[layout.slot(i, tp)]);
        }
    }
    choices += ExactNumber::from_int(-excluded);
    choices
}

/// Per-weight-assignment tables for the dynamic program.
struct AxiomTables {
    /// unary weight per live base type
    w: Vec<ExactNumber>,
    /// c[parent][sink]: weighted 2-tables with exactly the parent → sink
    /// edge of the DAG relation
    c: Vec<Vec<ExactNumber>>,
    /// d[a][b]: weighted 2-tables with no edge of the relation either way
    d: Vec<Vec<ExactNumber>>,
}

/// Weight-independent context for the essential-DAG dynamic program over
/// one quantifier-free matrix. The matrix must entail ¬R(x,x); the public
/// entry points conjoin that, and the engine's normalization does the
/// same.
pub struct AxiomCtx<'a> {
    bctx: &'a BranchCtx,
    /// groups of live-type positions with identical pair behavior and
    /// filter masks, each collapsed to one census slot; singleton groups
    /// when built through the standalone entry points
    groups: Vec<Vec<usize>>,
    pub layout: ExtLayout,
    /// per ordered group pair (parent, sink): consistent 2-tables carrying
    /// exactly the parent → sink edge, taken from representatives
    c_lists: Vec<Vec<Vec<usize>>>,
    /// per ordered group pair: consistent 2-tables with no edge either way
    d_lists: Vec<Vec<Vec<usize>>>,
}

impl<'a> AxiomCtx<'a> {
    pub(crate) fn new(
        bctx: &'a BranchCtx,
        vocab: &Vocabulary,
        spec: EssentialDagSpec,
        groups: Vec<Vec<usize>>,
    ) -> Result<AxiomCtx<'a>> {
        if spec.relation >= vocab.len() || vocab.pred(spec.relation).arity != 2 {
            return Err(Error::Invalid(
                "the essential-DAG relation must be a binary predicate".into(),
            ));
        }
        let gn = groups.len();
        let layout = ExtLayout::new(gn, spec.max_indegree);
        let mut c_lists = vec![vec![Vec::new(); gn]; gn];
        let mut d_lists = vec![vec![Vec::new(); gn]; gn];
        for ga in 0..gn {
            for gb in 0..gn {
                // pair behavior is group-invariant, so representatives
                // stand in for every member pair
                let (a, b) = (groups[ga][0], groups[gb][0]);
                for &l in &bctx.cons[a][b] {
                    let fwd = bctx.cells.pair_value(l, spec.relation, Orient::XY);
                    let back = bctx.cells.pair_value(l, spec.relation, Orient::YX);
                    if back {
                        // an edge out of the sink side never occurs in a
                        // sink-attachment step
                        continue;
                    }
                    if fwd {
                        c_lists[ga][gb].push(l);
                    } else {
                        d_lists[ga][gb].push(l);
                    }
                }
            }
        }
        Ok(AxiomCtx {
            bctx,
            groups,
            layout,
            c_lists,
            d_lists,
        })
    }

    fn tables(&self, weights: &SymmetricWeights) -> AxiomTables {
        let gn = self.groups.len();
        let sum_lists = |lists: &Vec<Vec<Vec<usize>>>| -> Vec<Vec<ExactNumber>> {
            (0..gn)
                .map(|a| {
                    (0..gn)
                        .map(|b| {
                            let mut s = ExactNumber::zero();
                            for &l in &lists[a][b] {
                                s += self.bctx.cells.table_weight(weights, l);
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        };
        AxiomTables {
            w: self
                .groups
                .iter()
                .map(|g| {
                    let mut s = ExactNumber::zero();
                    for &a in g {
                        s += self.bctx.cells.type_weight(weights, self.bctx.live[a]);
                    }
                    s
                })
                .collect(),
            c: sum_lists(&self.c_lists),
            d: sum_lists(&self.d_lists),
        }
    }

    /// Weighted number of ways k′ new sinks attach to a structure with
    /// census k″: each sink of extended type (j,t) picks an admissible
    /// parent set, relates to each parent through a single-edge table and
    /// to every other old element through an edgeless one.
    fn extension_n(
        &self,
        tb: &AxiomTables,
        k1: &[u32],
        k2: &[u32],
    ) -> Result<ExactNumber> {
        let avail = self.layout.base_census(k2);
        let t_len = self.layout.t_list.len();
        let mut out = ExactNumber::one();
        for (slot, &cnt) in k1.iter().enumerate() {
            if cnt == 0 {
                continue;
            }
            let j = slot / t_len;
            let t = &self.layout.t_list[slot % t_len];
            let g = g_count(&self.layout, k2, t);
            if g.is_zero() {
                return Ok(ExactNumber::zero());
            }
            if g.is_negative() {
                return Err(Error::Internal(
                    "negative sink-attachment count on a census with surviving weight".into(),
                ));
            }
            let mut f = g;
            for (i, &ti) in t.iter().enumerate() {
                if ti > 0 {
                    if tb.c[i][j].is_zero() {
                        return Ok(ExactNumber::zero());
                    }
                    f *= &tb.c[i][j].pow(ti);
                }
                // g > 0 implies ti ≤ avail[i] through the binomial
                let rest = avail[i] - ti;
                if rest > 0 {
                    if tb.d[i][j].is_zero() {
                        return Ok(ExactNumber::zero());
                    }
                    f *= &tb.d[i][j].pow(rest);
                }
            }
            out *= &f.pow(cnt);
        }
        Ok(out)
    }

    /// Weight of the sink set's own structure: unary weights and edgeless
    /// tables between sinks, with the multinomial distributing labels over
    /// extended types. Parent profiles carry no weight of their own.
    fn wpsi(&self, tb: &AxiomTables, k1: &[u32]) -> ExactNumber {
        let beta = self.layout.base_census(k1);
        let mut v = multinomial(k1);
        for j in 0..self.layout.base {
            let bj = beta[j];
            if bj == 0 {
                continue;
            }
            if tb.w[j].is_zero() {
                return ExactNumber::zero();
            }
            v *= &tb.w[j].pow(bj);
            let diag = bj * (bj - 1) / 2;
            if diag > 0 {
                if tb.d[j][j].is_zero() {
                    return ExactNumber::zero();
                }
                v *= &tb.d[j][j].pow(diag);
            }
            for j2 in (j + 1)..self.layout.base {
                let e = bj * beta[j2];
                if e == 0 {
                    continue;
                }
                if tb.d[j][j2].is_zero() {
                    return ExactNumber::zero();
                }
                v *= &tb.d[j][j2].pow(e);
            }
        }
        v
    }

    /// One split's contribution N · WΨ′ · A[k″], zero when any factor
    /// dies. The attachment count is only evaluated once the other two
    /// factors are known nonzero, which is what keeps its non-negativity
    /// assertion sound.
    fn split_term(
        &self,
        tb: &AxiomTables,
        k1: &[u32],
        k2: &[u32],
        memo: &MemoTable,
    ) -> Result<ExactNumber> {
        let prev = match memo.get(k2) {
            Some(v) => v,
            None => return Ok(ExactNumber::zero()),
        };
        let wp = self.wpsi(tb, k1);
        if wp.is_zero() {
            return Ok(ExactNumber::zero());
        }
        let mut term = self.extension_n(tb, k1, k2)?;
        if term.is_zero() {
            return Ok(term);
        }
        term *= &wp;
        term *= prev;
        Ok(term)
    }

    /// A[p] by inclusion-exclusion over nonempty sink censuses k′ ≤ p:
    /// Σ (−1)^{|k′|+1} C(|p|,|k′|) N(k′,p−k′) WΨ′(k′) A[p−k′].
    fn a_value(&self, tb: &AxiomTables, p: &[u32], memo: &MemoTable) -> Result<ExactNumber> {
        let total: u32 = p.iter().sum();
        let e_len = p.len();
        let mut acc = ExactNumber::zero();
        let mut k1 = vec![0u32; e_len];
        'splits: loop {
            // odometer bounded componentwise by p, last slot fastest
            let mut pos = e_len;
            loop {
                if pos == 0 {
                    break 'splits;
                }
                pos -= 1;
                if k1[pos] < p[pos] {
                    k1[pos] += 1;
                    break;
                }
                k1[pos] = 0;
            }
            let m: u32 = k1.iter().sum();
            let k2: Vec<u32> = p.iter().zip(&k1).map(|(&a, &b)| a - b).collect();
            let mut term = self.split_term(tb, &k1, &k2, memo)?;
            if term.is_zero() {
                continue;
            }
            term *= &binomial(total as usize, m as usize);
            if m % 2 == 1 {
                acc += term;
            } else {
                acc += -term;
            }
        }
        Ok(acc)
    }

    /// Σ over extended censuses p with |p| = n of A[p], applying unary
    /// cardinality filters and normalizers to each census.
    pub(crate) fn sum(
        &self,
        weights: &SymmetricWeights,
        n: u32,
        filters: &KFilters,
    ) -> Result<ExactNumber> {
        let e_len = self.layout.len();
        if e_len == 0 {
            return Ok(if n == 0 {
                ExactNumber::one()
            } else {
                ExactNumber::zero()
            });
        }
        let table_bound = binomial_int(n as usize + e_len, e_len);
        if table_bound > BigInt::from(2_000_000u32) {
            return Err(Error::TooLarge(format!(
                "the dynamic program would need {table_bound} table entries"
            )));
        }
        let tb = self.tables(weights);
        let mut memo = MemoTable::new(e_len);
        for level in 1..=n {
            let mut computed: Vec<(Vec<u32>, ExactNumber)> = Vec::new();
            let mut failure: Option<Error> = None;
            for_each_composition(level, e_len, &mut |p| {
                if failure.is_some() {
                    return;
                }
                match self.a_value(&tb, p, &memo) {
                    Ok(v) => {
                        if !v.is_zero() {
                            computed.push((p.to_vec(), v));
                        }
                    }
                    Err(e) => failure = Some(e),
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            for (k, v) in computed {
                memo.insert(k, v);
            }
        }
        let norm_factors: Vec<ExactNumber> = filters
            .norms
            .iter()
            .map(|&(_, wit)| ExactNumber::from_bigint(factorial(wit as usize)).recip())
            .collect();
        let mut total = ExactNumber::zero();
        for_each_composition(n, e_len, &mut |p| {
            let Some(a) = memo.get(p) else { return };
            let beta = self.layout.base_census(p);
            // masks are per live position and agree across each group, so
            // the representative's bit speaks for the whole slot
            for (mask, cmp, bound) in &filters.unary {
                let cnt: u64 = beta
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask[self.groups[*j][0]])
                    .map(|(_, &b)| b as u64)
                    .sum();
                if !cmp.test(cnt, *bound) {
                    return;
                }
            }
            let mut term = a.clone();
            for ((mask, _), factor) in filters.norms.iter().zip(&norm_factors) {
                let cnt: u32 = beta
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask[self.groups[*j][0]])
                    .map(|(_, &b)| b)
                    .sum();
                if cnt > 0 {
                    term *= &factor.pow(cnt);
                }
            }
            total += term;
        });
        Ok(total)
    }

    /// Σ over splits k = k′ + k″ with |k′| = m of N · WΨ′ · memo[k″]: the
    /// weighted models with census k in which m designated elements are
    /// sinks. The memo must already hold the values for the remainders.
    fn sink_restricted(
        &self,
        tb: &AxiomTables,
        m: u32,
        k: &[u32],
        memo: &MemoTable,
    ) -> Result<ExactNumber> {
        let e_len = k.len();
        let mut acc = ExactNumber::zero();
        let mut k1 = vec![0u32; e_len];
        'splits: loop {
            let mut pos = e_len;
            loop {
                if pos == 0 {
                    break 'splits;
                }
                pos -= 1;
                if k1[pos] < k[pos] {
                    k1[pos] += 1;
                    break;
                }
                k1[pos] = 0;
            }
            if k1.iter().sum::<u32>() != m {
                continue;
            }
            let k2: Vec<u32> = k.iter().zip(&k1).map(|(&a, &b)| a - b).collect();
            acc += self.split_term(tb, &k1, &k2, memo)?;
        }
        Ok(acc)
    }
}

/// The dynamic-programming table A: extended census vector → weighted
/// count of the models realizing it. Seeded with A[0⃗] = 1 (the empty
/// structure); zero values are represented by absence.
pub struct MemoTable {
    width: usize,
    entries: HashMap<Vec<u32>, ExactNumber>,
}

impl MemoTable {
    pub fn new(width: usize) -> MemoTable {
        let mut entries = HashMap::new();
        entries.insert(vec![0u32; width], ExactNumber::one());
        MemoTable { width, entries }
    }

    pub fn get(&self, k: &[u32]) -> Option<&ExactNumber> {
        debug_assert_eq!(k.len(), self.width);
        self.entries.get(k)
    }

    pub fn insert(&mut self, k: Vec<u32>, v: ExactNumber) {
        debug_assert_eq!(k.len(), self.width);
        if !v.is_zero() {
            self.entries.insert(k, v);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One group per live type: the ungrouped layout used by the standalone
/// entry points, whose census vectors are documented to index live types
/// directly.
fn singletons(bctx: &BranchCtx) -> Vec<Vec<usize>> {
    (0..bctx.live.len()).map(|a| vec![a]).collect()
}

fn check_width(layout: &ExtLayout, k: &[u32]) -> Result<()> {
    if k.len() != layout.len() {
        return Err(Error::Invalid(format!(
            "census vector has {} slots, the extended type space has {}",
            k.len(),
            layout.len()
        )));
    }
    Ok(())
}

/// The extended-type layout a matrix induces under the given axiom, after
/// conjoining loop-freeness. Census vectors passed to the functions below
/// index it.
pub fn ext_layout(
    phi: &QFFormula,
    vocab: &Vocabulary,
    spec: EssentialDagSpec,
) -> Result<ExtLayout> {
    let matrix = conjoin_loopfree(phi.clone(), spec.relation);
    let bctx = BranchCtx::new(&matrix, vocab);
    let ctx = AxiomCtx::new(&bctx, vocab, spec, singletons(&bctx))?;
    Ok(ctx.layout)
}

/// Standalone attachment count for k′ sinks joining a census-k″
/// structure; see `AxiomCtx::extension_n`.
pub fn extension_count_n(
    phi: &QFFormula,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    spec: EssentialDagSpec,
    k1: &[u32],
    k2: &[u32],
) -> Result<ExactNumber> {
    let matrix = conjoin_loopfree(phi.clone(), spec.relation);
    let bctx = BranchCtx::new(&matrix, vocab);
    let ctx = AxiomCtx::new(&bctx, vocab, spec, singletons(&bctx))?;
    check_width(&ctx.layout, k1)?;
    check_width(&ctx.layout, k2)?;
    let tb = ctx.tables(weights);
    ctx.extension_n(&tb, k1, k2)
}

/// Weighted models with census k in which m designated elements are
/// sinks, given a memo holding the A-values of the remainder censuses.
pub fn fomc_sink_restricted(
    phi: &QFFormula,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    spec: EssentialDagSpec,
    m: u32,
    k: &[u32],
    memo: &MemoTable,
) -> Result<ExactNumber> {
    let matrix = conjoin_loopfree(phi.clone(), spec.relation);
    let bctx = BranchCtx::new(&matrix, vocab);
    let ctx = AxiomCtx::new(&bctx, vocab, spec, singletons(&bctx))?;
    check_width(&ctx.layout, k)?;
    let tb = ctx.tables(weights);
    ctx.sink_restricted(&tb, m, k, memo)
}

/// A[k]: the weighted count of models of ∀x∀y.φ (loop-freeness conjoined
/// here) whose relation is an essential DAG within the indegree bound and
/// whose extended census is exactly k.
pub fn fomc_essential(
    phi: &QFFormula,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    spec: EssentialDagSpec,
    k: &[u32],
) -> Result<ExactNumber> {
    let matrix = conjoin_loopfree(phi.clone(), spec.relation);
    let bctx = BranchCtx::new(&matrix, vocab);
    let ctx = AxiomCtx::new(&bctx, vocab, spec, singletons(&bctx))?;
    check_width(&ctx.layout, k)?;
    let entries: u64 = k.iter().map(|&v| v as u64 + 1).product();
    if entries > 2_000_000 {
        return Err(Error::TooLarge(format!(
            "the dynamic program would need {entries} table entries"
        )));
    }
    let tb = ctx.tables(weights);
    // every q ≤ k componentwise, in level order so a_value only consults
    // finished entries
    let mut subs: Vec<Vec<u32>> = Vec::with_capacity(entries as usize);
    let mut q = vec![0u32; k.len()];
    loop {
        subs.push(q.clone());
        let mut pos = k.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if q[pos] < k[pos] {
                q[pos] += 1;
                break;
            }
            q[pos] = 0;
        }
        if pos == 0 && q.iter().all(|&v| v == 0) {
            break;
        }
    }
    subs.sort_by_key(|v| v.iter().sum::<u32>());
    let mut memo = MemoTable::new(k.len());
    for q in subs {
        if q.iter().sum::<u32>() == 0 {
            continue;
        }
        let v = ctx.a_value(&tb, &q, &memo)?;
        memo.insert(q, v);
    }
    Ok(memo.get(k).cloned().unwrap_or_else(ExactNumber::zero))
}

/// Full pipeline: weighted model count of a sentence (counting
/// quantifiers allowed) conjoined with the essential-DAG axiom, at domain
/// size n.
pub fn wfomc_essential(
    sentence: &Sentence,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    spec: EssentialDagSpec,
    n: u32,
) -> Result<ExactNumber> {
    crate::engine::count(sentence, vocab, weights, &[], Some(spec), n)
}
