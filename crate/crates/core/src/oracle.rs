//! Brute-force ground truth at small scale: interpretation enumeration,
//! model checking, DAG and essentiality checks by definition, and direct
//! weighted model counting. Deliberately simple; the only optimization is
//! early exit on per-interpretation checks.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::ExactNumber;
use crate::essential::EssentialDagSpec;
use crate::logic::{
    herbrand_base, models, CardinalityConstraint, DirectedGraph, Interpretation, Sentence,
    SymmetricWeights, Vocabulary,
};
use crate::{Error, Result};

/// True iff the graph has no directed cycle and no self-loop.
pub fn is_dag(g: &DirectedGraph) -> bool {
    let mut indegree: BTreeMap<u32, usize> = g.nodes.iter().map(|&v| (v, 0)).collect();
    let mut succs: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(a, b) in &g.edges {
        if a == b {
            return false;
        }
        succs.entry(a).or_default().push(b);
        *indegree.entry(b).or_insert(0) += 1;
    }
    // Kahn's algorithm: repeatedly remove sources.
    let mut queue: Vec<u32> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut removed = 0usize;
    while let Some(v) = queue.pop() {
        removed += 1;
        for &w in succs.get(&v).into_iter().flatten() {
            let d = indegree.get_mut(&w).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push(w);
            }
        }
    }
    removed == indegree.len()
}

fn parent_sets(g: &DirectedGraph) -> BTreeMap<u32, BTreeSet<u32>> {
    let mut parents: BTreeMap<u32, BTreeSet<u32>> =
        g.nodes.iter().map(|&v| (v, BTreeSet::new())).collect();
    for &(a, b) in &g.edges {
        parents.entry(b).or_default().insert(a);
    }
    parents
}

/// True iff the parent set of `a` differs from the parent set of `b` with
/// `a` excluded, for a present edge a→b.
pub fn is_protected(g: &DirectedGraph, edge: (u32, u32)) -> Result<bool> {
    if !g.edges.contains(&edge) {
        return Err(Error::Invalid(format!(
            "edge {}->{} is absent",
            edge.0, edge.1
        )));
    }
    let parents = parent_sets(g);
    Ok(edge_protected(&parents, edge.0, edge.1))
}

fn edge_protected(parents: &BTreeMap<u32, BTreeSet<u32>>, a: u32, b: u32) -> bool {
    static EMPTY: BTreeSet<u32> = BTreeSet::new();
    let pa = parents.get(&a).unwrap_or(&EMPTY);
    let pb = parents.get(&b).unwrap_or(&EMPTY);
    // unprotected means parents(a) = parents(b) \ {a}
    let target_len = pb.len() - usize::from(pb.contains(&a));
    let unprotected = pa.len() == target_len && pa.iter().all(|p| *p != a && pb.contains(p));
    !unprotected
}

/// True iff the graph is a DAG, every edge is protected, and every node has
/// indegree at most `d`. The empty graph qualifies for every `d`.
pub fn is_essential(g: &DirectedGraph, d: u32) -> bool {
    if !is_dag(g) {
        return false;
    }
    let parents = parent_sets(g);
    if parents.values().any(|p| p.len() as u64 > d as u64) {
        return false;
    }
    g.edges.iter().all(|&(a, b)| edge_protected(&parents, a, b))
}

/// Exhaustive weighted model count over all interpretations of the
/// vocabulary on domain `[n]`, keeping those that satisfy the sentence, the
/// cardinality constraints, and (if given) the essential-DAG axiom on the
/// projected relation. Essentiality is checked by definition on the
/// projected graph.
pub fn brute_wfomc(
    sentence: &Sentence,
    vocab: &Vocabulary,
    weights: &SymmetricWeights,
    ccs: &[CardinalityConstraint],
    n: u32,
    axiom: Option<EssentialDagSpec>,
) -> Result<ExactNumber> {
    let domain: BTreeSet<u32> = (1..=n).collect();
    let atoms = herbrand_base(vocab, &domain);
    if atoms.len() > 24 {
        return Err(Error::TooLarge(format!(
            "brute-force enumeration refused: {} ground atoms means 2^{} interpretations (bound is 2^24)",
            atoms.len(),
            atoms.len()
        )));
    }
    // Ground atoms are sorted (predicate, tuple), so each predicate owns a
    // contiguous index range; true counts come from masked popcounts.
    let mut range_mask = vec![0u64; vocab.len()];
    for (i, atom) in atoms.iter().enumerate() {
        range_mask[atom.pred] |= 1u64 << i;
    }
    let atom_count: Vec<u64> = range_mask.iter().map(|m| m.count_ones() as u64).collect();
    let unit = weights.is_unit();

    let mut total = ExactNumber::zero();
    let mut omega = Interpretation::all_false(vocab, n);
    for mask in 0u64..(1u64 << atoms.len()) {
        let admitted = ccs.iter().all(|cc| {
            let count = (mask & range_mask[cc.pred]).count_ones() as u64;
            cc.cmp.test(count, cc.bound.resolve(n as u64))
        });
        if !admitted {
            continue;
        }
        for (i, atom) in atoms.iter().enumerate() {
            omega.set(atom.clone(), mask >> i & 1 == 1);
        }
        if !models(&omega, sentence) {
            continue;
        }
        if let Some(spec) = axiom {
            let graph = omega.project_relation(vocab, spec.relation)?;
            if !is_essential(&graph, spec.max_indegree) {
                continue;
            }
        }
        if unit {
            total += ExactNumber::one();
        } else {
            let mut w = ExactNumber::one();
            for (p, _) in vocab.iter() {
                let t = (mask & range_mask[p]).count_ones();
                let f = (atom_count[p] - t as u64) as u32;
                w = w * weights.pos(p).pow(t) * weights.neg(p).pow(f);
            }
            total += w;
        }
    }
    Ok(total)
}

/// All essential DAGs on nodes `{1..n}` with maximum indegree at most `d`,
/// by direct enumeration of the off-diagonal adjacency masks.
pub fn enumerate_essential_dags(n: u32, d: u32) -> Result<Vec<DirectedGraph>> {
    let pairs: Vec<(u32, u32)> = (1..=n)
        .flat_map(|a| (1..=n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    if pairs.len() > 24 {
        return Err(Error::TooLarge(format!(
            "essential-DAG enumeration refused: 2^{} candidate graphs (bound is 2^24)",
            pairs.len()
        )));
    }
    let nodes: Vec<u32> = (1..=n).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let edges: Vec<(u32, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = DirectedGraph {
            nodes: nodes.clone(),
            edges,
        };
        if is_essential(&g, d) {
            out.push(g);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Args, CmpOp, Formula, GroundAtom, PredId, Var};
    use crate::parse::parse_sentence;

    fn graph(n: u32, edges: &[(u32, u32)]) -> DirectedGraph {
        DirectedGraph {
            nodes: (1..=n).collect(),
            edges: edges.to_vec(),
        }
    }

    #[test]
    fn dag_check() {
        assert!(is_dag(&graph(3, &[(1, 2), (2, 3)])));
        assert!(!is_dag(&graph(2, &[(1, 2), (2, 1)])));
        assert!(!is_dag(&graph(2, &[(1, 1)])));
        assert!(is_dag(&graph(3, &[])));
        assert!(is_dag(&graph(4, &[(1, 2), (1, 3), (2, 4), (3, 4)])));
        assert!(!is_dag(&graph(3, &[(1, 2), (2, 3), (3, 1)])));
    }

    #[test]
    fn protected_edges() {
        // single edge: both parent sets empty after removing the source
        assert!(!is_protected(&graph(2, &[(1, 2)]), (1, 2)).unwrap());
        // immorality closed under common children: every edge protected
        // (nodes 1=a, 2=b, 3=c, 4=d; edges a->b, a->d, c->b, c->d)
        let mec1 = graph(4, &[(1, 2), (1, 4), (3, 2), (3, 4)]);
        for &e in &mec1.edges {
            assert!(is_protected(&mec1, e).unwrap(), "edge {e:?}");
        }
        // oriented square (d->a, d->c, a->b, c->b): the edges leaving d are
        // not protected
        let square = graph(4, &[(4, 1), (4, 3), (1, 2), (3, 2)]);
        assert!(!is_protected(&square, (4, 3)).unwrap());
        assert!(!is_protected(&square, (4, 1)).unwrap());
        assert!(is_protected(&square, (1, 2)).unwrap());
        // path: first edge unprotected, second protected
        let path = graph(3, &[(1, 2), (2, 3)]);
        assert!(!is_protected(&path, (1, 2)).unwrap());
        assert!(is_protected(&path, (2, 3)).unwrap());
        // absent edge is an error
        assert!(is_protected(&path, (1, 3)).is_err());
    }

    #[test]
    fn essential_check() {
        assert!(is_essential(&graph(3, &[]), 0));
        let mec1 = graph(4, &[(1, 2), (1, 4), (3, 2), (3, 4)]);
        assert!(is_essential(&mec1, 2));
        assert!(!is_essential(&mec1, 1)); // nodes 2 and 4 have indegree 2
        assert!(!is_essential(&graph(3, &[(1, 2), (2, 3)]), 2));
        assert!(!is_essential(&graph(2, &[(1, 2), (2, 1)]), 2));
    }

    /// Interpretation over [4] with R/2, B/2, G/1: blue edges 2->1, 2->3,
    /// 3->2, 3->4, a red self-loop at 3, node 2 green.
    fn colored_interpretation() -> (Vocabulary, Interpretation, PredId, PredId, PredId) {
        let mut v = Vocabulary::new();
        let r = v.add("R", 2).unwrap();
        let b = v.add("B", 2).unwrap();
        let g = v.add("G", 1).unwrap();
        let mut omega = Interpretation::all_false(&v, 4);
        for (c, d) in [(2, 1), (2, 3), (3, 2), (3, 4)] {
            omega.set(GroundAtom::binary(b, c, d), true);
        }
        omega.set(GroundAtom::binary(r, 3, 3), true);
        omega.set(GroundAtom::unary(g, 2), true);
        (v, omega, r, b, g)
    }

    #[test]
    fn colored_restriction_and_projection() {
        let (v, omega, r, b, g) = colored_interpretation();
        // restriction to {1,2}: the blue edge 2->1 survives, node 2 stays green
        let low = omega.restrict(&[1, 2].into());
        let true_atoms: Vec<_> = low.atoms().filter(|(_, t)| *t).map(|(a, _)| a.clone()).collect();
        assert_eq!(
            true_atoms,
            vec![GroundAtom::binary(b, 2, 1), GroundAtom::unary(g, 2)]
        );
        // restriction to {3,4}: red self-loop at 3 and blue edge 3->4
        let high = omega.restrict(&[3, 4].into());
        let true_atoms: Vec<_> = high.atoms().filter(|(_, t)| *t).map(|(a, _)| a.clone()).collect();
        assert_eq!(
            true_atoms,
            vec![GroundAtom::binary(r, 3, 3), GroundAtom::binary(b, 3, 4)]
        );
        // projecting on the red relation: a single self-loop at 3
        let red = omega.project_relation(&v, r).unwrap();
        assert_eq!(red.nodes, vec![1, 2, 3, 4]);
        assert_eq!(red.edges, vec![(3, 3)]);
        assert!(!is_dag(&red));
    }

    #[test]
    fn colored_model_checks() {
        let (v, omega, _, _, _) = colored_interpretation();
        // not every node has an outgoing blue edge (1 and 4 have none)
        let s = parse_sentence("forall x exists y. B(x,y)", &v).unwrap();
        assert!(!models(&omega, &s));
        let s = parse_sentence("exists[=1] x. G(x)", &v).unwrap();
        assert!(models(&omega, &s));
        let s = parse_sentence("exists[=4] x exists[>=1] y. B(x,y) | B(y,x)", &v).unwrap();
        assert!(models(&omega, &s));
    }

    fn unit(vocab: &Vocabulary) -> SymmetricWeights {
        SymmetricWeights::unit(vocab)
    }

    #[test]
    fn brute_count_with_axiom() {
        let mut v = Vocabulary::new();
        let r = v.add("R", 2).unwrap();
        let total = brute_wfomc(
            &Formula::True,
            &v,
            &unit(&v),
            &[],
            3,
            Some(EssentialDagSpec {
                relation: r,
                max_indegree: 2,
            }),
        )
        .unwrap();
        assert_eq!(total, ExactNumber::from_int(4));
    }

    #[test]
    fn brute_weighted_independent_nodes() {
        let mut v = Vocabulary::new();
        let u = v.add("U", 1).unwrap();
        let mut w = unit(&v);
        w.set(u, ExactNumber::from_int(2), ExactNumber::one());
        let total = brute_wfomc(&Formula::True, &v, &w, &[], 2, None).unwrap();
        assert_eq!(total, ExactNumber::from_int(9));
    }

    #[test]
    fn brute_symmetry_sentence() {
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        let s = parse_sentence("forall x forall y. R(x,y) -> R(y,x)", &v).unwrap();
        let total = brute_wfomc(&s, &v, &unit(&v), &[], 2, None).unwrap();
        assert_eq!(total, ExactNumber::from_int(8));
    }

    #[test]
    fn brute_empty_domain() {
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        let s = parse_sentence("forall x exists y. R(x,y)", &v).unwrap();
        assert_eq!(
            brute_wfomc(&s, &v, &unit(&v), &[], 0, None).unwrap(),
            ExactNumber::one()
        );
        let s = parse_sentence("exists x. R(x,x)", &v).unwrap();
        assert_eq!(
            brute_wfomc(&s, &v, &unit(&v), &[], 0, None).unwrap(),
            ExactNumber::zero()
        );
    }

    #[test]
    fn brute_refuses_large_instances() {
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        assert!(matches!(
            brute_wfomc(&Formula::True, &v, &unit(&v), &[], 5, None),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn brute_cardinality_constraints() {
        let mut v = Vocabulary::new();
        let u = v.add("U", 1).unwrap();
        let cc = CardinalityConstraint {
            pred: u,
            cmp: CmpOp::Eq,
            bound: crate::logic::Bound::Const(2),
        };
        let total = brute_wfomc(&Formula::True, &v, &unit(&v), &[cc], 3, None).unwrap();
        assert_eq!(total, ExactNumber::from_int(3));

        let mut v = Vocabulary::new();
        let r = v.add("R", 2).unwrap();
        let loopfree = parse_sentence("forall x. ~R(x,x)", &v).unwrap();
        let cc = CardinalityConstraint::parse("R=0", &v).unwrap();
        let total = brute_wfomc(&loopfree, &v, &unit(&v), &[cc], 2, None).unwrap();
        assert_eq!(total, ExactNumber::one());

        let cc = CardinalityConstraint::parse("|R|>=1", &v).unwrap();
        let total = brute_wfomc(
            &Formula::True,
            &v,
            &unit(&v),
            &[cc],
            3,
            Some(EssentialDagSpec {
                relation: r,
                max_indegree: 2,
            }),
        )
        .unwrap();
        assert_eq!(total, ExactNumber::from_int(3));
    }

    #[test]
    fn essential_enumeration_matches_known_counts() {
        assert_eq!(enumerate_essential_dags(0, 0).unwrap().len(), 1);
        assert_eq!(enumerate_essential_dags(1, 0).unwrap().len(), 1);
        assert_eq!(enumerate_essential_dags(2, 1).unwrap().len(), 1);
        assert_eq!(enumerate_essential_dags(3, 2).unwrap().len(), 4);
        assert_eq!(enumerate_essential_dags(4, 2).unwrap().len(), 55);
        assert_eq!(enumerate_essential_dags(4, 3).unwrap().len(), 59);
    }

    #[test]
    fn essentiality_is_relabeling_invariant() {
        let gs = enumerate_essential_dags(4, 3).unwrap();
        // swap labels 1 and 4 in a few graphs, essentiality must persist
        let swap = |v: u32| match v {
            1 => 4,
            4 => 1,
            v => v,
        };
        for g in gs.iter().step_by(7) {
            let relabeled = DirectedGraph {
                nodes: g.nodes.clone(),
                edges: g.edges.iter().map(|&(a, b)| (swap(a), swap(b))).collect(),
            };
            assert!(is_essential(&relabeled, 3));
        }
        let path = graph(3, &[(1, 2), (2, 3)]);
        let relabeled = graph(3, &[(2, 1), (1, 3)]);
        assert_eq!(is_essential(&path, 2), is_essential(&relabeled, 2));
    }

    #[test]
    fn sink_removal_preserves_essentiality() {
        for n in 1..=5u32 {
            for g in enumerate_essential_dags(n, n.saturating_sub(1)).unwrap() {
                let with_out: BTreeSet<u32> = g.edges.iter().map(|&(a, _)| a).collect();
                for &sink in g.nodes.iter().filter(|v| !with_out.contains(v)) {
                    let remaining: Vec<u32> =
                        g.nodes.iter().copied().filter(|&v| v != sink).collect();
                    let reduced = DirectedGraph {
                        nodes: remaining,
                        edges: g
                            .edges
                            .iter()
                            .copied()
                            .filter(|&(a, b)| a != sink && b != sink)
                            .collect(),
                    };
                    assert!(is_essential(&reduced, n));
                }
            }
        }
    }

    #[test]
    fn brute_matches_enumeration_for_pure_axiom() {
        let mut v = Vocabulary::new();
        let r = v.add("R", 2).unwrap();
        for (n, d) in [(2u32, 1u32), (3, 1), (3, 2)] {
            let brute = brute_wfomc(
                &Formula::True,
                &v,
                &unit(&v),
                &[],
                n,
                Some(EssentialDagSpec {
                    relation: r,
                    max_indegree: d,
                }),
            )
            .unwrap();
            let direct = enumerate_essential_dags(n, d).unwrap().len();
            assert_eq!(brute, ExactNumber::from_int(direct as i64));
        }
    }

    #[test]
    fn models_respects_universal_restriction() {
        // models of universal sentences survive restriction to subdomains
        let mut v = Vocabulary::new();
        let u = v.add("U", 1).unwrap();
        let r = v.add("R", 2).unwrap();
        let s = parse_sentence("forall x forall y. R(x,y) -> U(y)", &v).unwrap();
        let mut omega = Interpretation::all_false(&v, 3);
        omega.set(GroundAtom::binary(r, 1, 2), true);
        omega.set(GroundAtom::unary(u, 2), true);
        assert!(models(&omega, &s));
        for sub in [vec![1, 2], vec![2, 3], vec![1], vec![]] {
            let sub: BTreeSet<u32> = sub.into_iter().collect();
            assert!(models(&omega.restrict(&sub), &s));
        }
    }

    #[test]
    fn count_exists_var_binding() {
        let mut v = Vocabulary::new();
        let r = v.add("R", 2).unwrap();
        let mut omega = Interpretation::all_false(&v, 3);
        omega.set(GroundAtom::binary(r, 1, 2), true);
        omega.set(GroundAtom::binary(r, 1, 3), true);
        omega.set(GroundAtom::binary(r, 2, 3), true);
        // node 1 has exactly two successors; the others fewer
        let s = Formula::CountExists(
            CmpOp::Eq,
            1,
            Var::X,
            Box::new(Formula::CountExists(
                CmpOp::Eq,
                2,
                Var::Y,
                Box::new(Formula::Atom(r, Args::Binary(Var::X, Var::Y))),
            )),
        );
        assert!(models(&omega, &s));
    }
}
