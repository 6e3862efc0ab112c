//! Cells of a two-variable vocabulary: 1-types (complete assignments to the
//! atoms over a single element), 2-tables (complete assignments to the
//! cross atoms of an ordered pair), extended 1-types (a 1-type plus a
//! parent-count vector), consistency of 2-types against a matrix, and the
//! derived weight matrices.
//!
//! Index convention, used everywhere and relied on by golden tests: atoms
//! are ordered by predicate declaration order (for 1-types, the unary atom
//! or the reflexive atom of each predicate; for 2-tables, Q(x,y) before
//! Q(y,x) per binary predicate). A type/table index read in binary, most
//! significant bit = first atom, gives the assignment with 0 = negated and
//! 1 = asserted. Index 0 is therefore the all-negated cell and the order is
//! lexicographic with negation first.

use crate::arith::ExactNumber;
use crate::logic::{Args, Formula, PredId, QFFormula, SymmetricWeights, Var, Vocabulary};

/// How a predicate contributes an atom over the single variable x.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XKind {
    /// P(x) for unary P.
    Unary,
    /// Q(x,x) for binary Q.
    Reflexive,
}

/// Orientation of a cross atom in a 2-table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orient {
    XY,
    YX,
}

/// A 1-type: index plus the explicit atom assignment it denotes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneType {
    pub index: usize,
    /// (predicate, atom kind, asserted?) in enumeration order.
    pub atoms: Vec<(PredId, XKind, bool)>,
}

/// A 2-table: index plus the explicit cross-atom assignment (x≠y implicit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTable {
    pub index: usize,
    pub atoms: Vec<(PredId, Orient, bool)>,
}

/// Precomputed atom layout of a vocabulary, shared by all cell operations.
/// Nullary predicates must be substituted away before cell evaluation.
#[derive(Clone, Debug)]
pub struct CellCtx {
    x_atoms: Vec<(PredId, XKind)>,
    pair_atoms: Vec<(PredId, Orient)>,
}

impl CellCtx {
    pub fn new(vocab: &Vocabulary) -> CellCtx {
        let mut x_atoms = Vec::new();
        let mut pair_atoms = Vec::new();
        for (id, p) in vocab.iter() {
            match p.arity {
                0 => {}
                1 => x_atoms.push((id, XKind::Unary)),
                _ => {
                    x_atoms.push((id, XKind::Reflexive));
                    pair_atoms.push((id, Orient::XY));
                    pair_atoms.push((id, Orient::YX));
                }
            }
        }
        CellCtx { x_atoms, pair_atoms }
    }

    /// Number of 1-types.
    pub fn u(&self) -> usize {
        1usize << self.x_atoms.len()
    }

    /// Number of 2-tables.
    pub fn b(&self) -> usize {
        1usize << self.pair_atoms.len()
    }

    pub fn x_atom_count(&self) -> usize {
        self.x_atoms.len()
    }

    fn x_bit(&self, i: usize, atom: usize) -> bool {
        i >> (self.x_atoms.len() - 1 - atom) & 1 == 1
    }

    fn pair_bit(&self, l: usize, atom: usize) -> bool {
        l >> (self.pair_atoms.len() - 1 - atom) & 1 == 1
    }

    fn x_atom_index(&self, pred: PredId) -> usize {
        self.x_atoms
            .iter()
            .position(|&(p, _)| p == pred)
            .expect("predicate has no x-atom")
    }

    fn pair_atom_index(&self, pred: PredId, orient: Orient) -> usize {
        self.pair_atoms
            .iter()
            .position(|&(p, o)| p == pred && o == orient)
            .expect("predicate has no cross atoms")
    }

    /// Truth of the unary or reflexive atom of `pred` in 1-type `i`.
    pub fn x_value(&self, i: usize, pred: PredId) -> bool {
        self.x_bit(i, self.x_atom_index(pred))
    }

    /// Truth of the cross atom of `pred` with the given orientation in
    /// 2-table `l`.
    pub fn pair_value(&self, l: usize, pred: PredId, orient: Orient) -> bool {
        self.pair_bit(l, self.pair_atom_index(pred, orient))
    }

    pub fn one_types(&self) -> Vec<OneType> {
        (0..self.u())
            .map(|i| OneType {
                index: i,
                atoms: self
                    .x_atoms
                    .iter()
                    .enumerate()
                    .map(|(a, &(p, k))| (p, k, self.x_bit(i, a)))
                    .collect(),
            })
            .collect()
    }

    pub fn two_tables(&self) -> Vec<TwoTable> {
        (0..self.b())
            .map(|l| TwoTable {
                index: l,
                atoms: self
                    .pair_atoms
                    .iter()
                    .enumerate()
                    .map(|(a, &(p, o))| (p, o, self.pair_bit(l, a)))
                    .collect(),
            })
            .collect()
    }

    /// Evaluates `phi` with both variables denoting one element of 1-type
    /// `i` (the substitution φ(x,x)). Equalities are true; every atom reads
    /// the 1-type.
    pub fn self_consistent(&self, phi: &QFFormula, i: usize) -> bool {
        self.eval_self(phi, i)
    }

    fn eval_self(&self, phi: &Formula, i: usize) -> bool {
        match phi {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(..) => true,
            Formula::Atom(p, args) => match args {
                Args::None => panic!("nullary atoms must be substituted before cell evaluation"),
                _ => self.x_value(i, *p),
            },
            Formula::Not(g) => !self.eval_self(g, i),
            Formula::And(gs) => gs.iter().all(|g| self.eval_self(g, i)),
            Formula::Or(gs) => gs.iter().any(|g| self.eval_self(g, i)),
            Formula::Implies(a, b) => !self.eval_self(a, i) || self.eval_self(b, i),
            Formula::Iff(a, b) => self.eval_self(a, i) == self.eval_self(b, i),
            _ => panic!("matrix must be quantifier-free"),
        }
    }

    /// Evaluates `phi` on the ordered pair (a,b) of distinct elements,
    /// where a has 1-type `i`, b has 1-type `j` and the cross atoms follow
    /// 2-table `l` (oriented so that Q(x,y) speaks about (a,b)). With
    /// `swapped`, the formula's x denotes b and y denotes a, i.e. the
    /// substitution φ(y,x).
    pub fn eval_pair(&self, phi: &QFFormula, i: usize, j: usize, l: usize, swapped: bool) -> bool {
        let type_of = |v: Var| -> usize {
            match (v, swapped) {
                (Var::X, false) | (Var::Y, true) => i,
                (Var::Y, false) | (Var::X, true) => j,
            }
        };
        // does this occurrence of v denote element a (the i-side)?
        let is_a = |v: Var| -> bool {
            matches!((v, swapped), (Var::X, false) | (Var::Y, true))
        };
        self.eval_pair_rec(phi, &type_of, &is_a, l)
    }

    fn eval_pair_rec(
        &self,
        phi: &Formula,
        type_of: &dyn Fn(Var) -> usize,
        is_a: &dyn Fn(Var) -> bool,
        l: usize,
    ) -> bool {
        match phi {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(v, w) => v == w,
            Formula::Atom(p, args) => match *args {
                Args::None => panic!("nullary atoms must be substituted before cell evaluation"),
                Args::Unary(v) => self.x_value(type_of(v), *p),
                Args::Binary(v, w) => {
                    if v == w {
                        self.x_value(type_of(v), *p)
                    } else if is_a(v) {
                        self.pair_value(l, *p, Orient::XY)
                    } else {
                        self.pair_value(l, *p, Orient::YX)
                    }
                }
            },
            Formula::Not(g) => !self.eval_pair_rec(g, type_of, is_a, l),
            Formula::And(gs) => gs.iter().all(|g| self.eval_pair_rec(g, type_of, is_a, l)),
            Formula::Or(gs) => gs.iter().any(|g| self.eval_pair_rec(g, type_of, is_a, l)),
            Formula::Implies(a, b) => {
                !self.eval_pair_rec(a, type_of, is_a, l) || self.eval_pair_rec(b, type_of, is_a, l)
            }
            Formula::Iff(a, b) => {
                self.eval_pair_rec(a, type_of, is_a, l) == self.eval_pair_rec(b, type_of, is_a, l)
            }
            _ => panic!("matrix must be quantifier-free"),
        }
    }

    /// Consistency of the 2-type ijl with ∀xy.phi: the complete assignment
    /// it describes must satisfy phi under all four variable substitutions
    /// (x,x), (x,y), (y,x), (y,y). Decided by direct propositional
    /// evaluation; a 2-type is a total assignment, so no search is needed.
    pub fn two_type_consistent(&self, phi: &QFFormula, i: usize, j: usize, l: usize) -> bool {
        self.self_consistent(phi, i)
            && self.self_consistent(phi, j)
            && self.eval_pair(phi, i, j, l, false)
            && self.eval_pair(phi, i, j, l, true)
    }

    /// Product of w/w̄ over the atoms asserted/negated by 1-type `i`.
    pub fn type_weight(&self, weights: &SymmetricWeights, i: usize) -> ExactNumber {
        let mut w = ExactNumber::one();
        for (a, &(p, _)) in self.x_atoms.iter().enumerate() {
            w = w * if self.x_bit(i, a) {
                weights.pos(p)
            } else {
                weights.neg(p)
            };
        }
        w
    }

    /// Product of w/w̄ over the cross atoms asserted/negated by 2-table `l`.
    pub fn table_weight(&self, weights: &SymmetricWeights, l: usize) -> ExactNumber {
        let mut w = ExactNumber::one();
        for (a, &(p, _)) in self.pair_atoms.iter().enumerate() {
            w = w * if self.pair_bit(l, a) {
                weights.pos(p)
            } else {
                weights.neg(p)
            };
        }
        w
    }

    /// r[i][j] = Σ_l v_l over 2-tables l with ijl consistent with phi.
    pub fn r_matrix(&self, phi: &QFFormula, weights: &SymmetricWeights) -> Vec<Vec<ExactNumber>> {
        let (u, b) = (self.u(), self.b());
        let v: Vec<ExactNumber> = (0..b).map(|l| self.table_weight(weights, l)).collect();
        let mut r = vec![vec![ExactNumber::zero(); u]; u];
        for i in 0..u {
            for j in 0..u {
                let mut sum = ExactNumber::zero();
                for (l, vl) in v.iter().enumerate() {
                    if self.two_type_consistent(phi, i, j, l) {
                        sum += vl.clone();
                    }
                }
                r[i][j] = sum;
            }
        }
        r
    }

    /// Splits the consistent 2-tables of each ordered pair (i,j) by the
    /// R-atoms they assert: c[i][j] sums v_l over tables with exactly the
    /// edge from the i-side to the j-side (R(x,y) ∧ ¬R(y,x)), d[i][j] over
    /// tables with no R-edge at all. Requires phi ⊨ ¬R(x,x) (conjoined
    /// upstream), so c and d cover every way a protected-edge candidate can
    /// point at a sink.
    pub fn cd_matrices(
        &self,
        phi: &QFFormula,
        weights: &SymmetricWeights,
        r_pred: PredId,
    ) -> (Vec<Vec<ExactNumber>>, Vec<Vec<ExactNumber>>) {
        let (u, b) = (self.u(), self.b());
        let v: Vec<ExactNumber> = (0..b).map(|l| self.table_weight(weights, l)).collect();
        let mut c = vec![vec![ExactNumber::zero(); u]; u];
        let mut d = vec![vec![ExactNumber::zero(); u]; u];
        for i in 0..u {
            for j in 0..u {
                let (mut ci, mut di) = (ExactNumber::zero(), ExactNumber::zero());
                for (l, vl) in v.iter().enumerate() {
                    if !self.two_type_consistent(phi, i, j, l) {
                        continue;
                    }
                    let xy = self.pair_value(l, r_pred, Orient::XY);
                    let yx = self.pair_value(l, r_pred, Orient::YX);
                    if xy && !yx {
                        ci += vl.clone();
                    } else if !xy && !yx {
                        di += vl.clone();
                    }
                }
                c[i][j] = ci;
                d[i][j] = di;
            }
        }
        (c, d)
    }
}

/// All parent-count vectors t ∈ ℕ^u with |t| ≤ d, ordered by total then
/// lexicographically; |result| = C(d+u, u).
pub fn enumerate_t(u: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if u == 0 {
        out.push(Vec::new());
        return out;
    }
    for total in 0..=d {
        crate::arith::for_each_composition(total, u, &mut |t| {
            out.push(t.to_vec());
        });
    }
    out
}

/// Collapses an extended cardinality vector (indexed by (i,t) pairs laid
/// out as i·|T| + t_index) to base-1-type totals: alpha_i = Σ_t k_(i,t).
pub fn alpha(k_ext: &[u64], u: usize, t_len: usize) -> Vec<u64> {
    debug_assert_eq!(k_ext.len(), u * t_len);
    (0..u)
        .map(|i| k_ext[i * t_len..(i + 1) * t_len].iter().sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::binomial;
    use crate::logic::Vocabulary;
    use crate::parse::parse_formula;

    fn ur() -> (Vocabulary, CellCtx) {
        let mut v = Vocabulary::new();
        v.add("U", 1).unwrap();
        v.add("R", 2).unwrap();
        let ctx = CellCtx::new(&v);
        (v, ctx)
    }

    #[test]
    fn one_type_counts() {
        let (_, ctx) = ur();
        assert_eq!(ctx.one_types().len(), 4);
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        assert_eq!(CellCtx::new(&v).one_types().len(), 2);
        assert_eq!(CellCtx::new(&Vocabulary::new()).one_types().len(), 1);
    }

    #[test]
    fn two_table_counts() {
        let (_, ctx) = ur();
        assert_eq!(ctx.two_tables().len(), 4);
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        v.add("S", 2).unwrap();
        assert_eq!(CellCtx::new(&v).two_tables().len(), 16);
        let mut v = Vocabulary::new();
        v.add("U", 1).unwrap();
        assert_eq!(CellCtx::new(&v).two_tables().len(), 1);
    }

    #[test]
    fn index_order_is_negation_first() {
        let (_, ctx) = ur();
        let types = ctx.one_types();
        // index 0: ~U(x) & ~R(x,x); index 3: U(x) & R(x,x)
        assert!(types[0].atoms.iter().all(|&(_, _, on)| !on));
        assert!(types[3].atoms.iter().all(|&(_, _, on)| on));
        // first atom (U) is the most significant bit
        assert_eq!(types[2].atoms[0].2, true);
        assert_eq!(types[2].atoms[1].2, false);
        let tables = ctx.two_tables();
        assert!(tables[0].atoms.iter().all(|&(_, _, on)| !on));
        assert_eq!(tables[2].atoms[0], (1, Orient::XY, true));
        assert_eq!(tables[2].atoms[1], (1, Orient::YX, false));
    }

    #[test]
    fn consistency_under_top_and_contradiction() {
        let (v, ctx) = ur();
        for i in 0..4 {
            for j in 0..4 {
                for l in 0..4 {
                    assert!(ctx.two_type_consistent(&Formula::True, i, j, l));
              }
            }
        }
        // φ = ~R(x,y): any table asserting R(x,y) is inconsistent
        let phi = parse_formula("~R(x,y)", &v).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                // φ(x,x) = ~R(x,x) also constrains the endpoints
                let self_ok = !ctx.x_value(i, 1) && !ctx.x_value(j, 1);
                for l in 0..4 {
                    let expect = self_ok
                        && !ctx.pair_value(l, 1, Orient::XY)
                        && !ctx.pair_value(l, 1, Orient::YX);
                    assert_eq!(ctx.two_type_consistent(&phi, i, j, l), expect);
                }
            }
        }
    }

    #[test]
    fn consistency_of_symmetry_matrix() {
        let (v, ctx) = ur();
        let phi = parse_formula("R(x,y) -> R(y,x)", &v).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for l in 0..4 {
                    let xy = ctx.pair_value(l, 1, Orient::XY);
                    let yx = ctx.pair_value(l, 1, Orient::YX);
                    // φ(x,x) and φ(y,y) are tautologies here
                    assert_eq!(ctx.two_type_consistent(&phi, i, j, l), xy == yx);
                }
            }
        }
    }

    #[test]
    fn weights_of_types_and_tables() {
        let (v, ctx) = ur();
        let unit = SymmetricWeights::unit(&v);
        for i in 0..4 {
            assert!(ctx.type_weight(&unit, i).is_one());
        }
        for l in 0..4 {
            assert!(ctx.table_weight(&unit, l).is_one());
        }
        let mut w = unit.clone();
        w.set(0, ExactNumber::from_int(2), ExactNumber::one());
        // types 2 and 3 assert U(x)
        assert_eq!(ctx.type_weight(&w, 2), ExactNumber::from_int(2));
        assert_eq!(ctx.type_weight(&w, 0), ExactNumber::one());
        let mut w = unit;
        w.set(1, ExactNumber::from_int(3), ExactNumber::one());
        // table 2 asserts R(x,y) only
        assert_eq!(ctx.table_weight(&w, 2), ExactNumber::from_int(3));
        // reflexive atom weight sits on the 1-type
        assert_eq!(ctx.type_weight(&w, 1), ExactNumber::from_int(3));
    }

    #[test]
    fn r_matrix_examples() {
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        let ctx = CellCtx::new(&v);
        let unit = SymmetricWeights::unit(&v);
        // loop-freedom alone: the loop-free 1-type (index 0) sees all 4 tables
        let phi = parse_formula("~R(x,x)", &v).unwrap();
        let r = ctx.r_matrix(&phi, &unit);
        assert_eq!(r[0][0], ExactNumber::from_int(4));
        assert!(r[0][1].is_zero() && r[1][0].is_zero() && r[1][1].is_zero());
        // fully disconnected pairs: a single surviving table
        let phi = parse_formula("~R(x,y) & ~R(y,x)", &v).unwrap();
        let r = ctx.r_matrix(&phi, &unit);
        assert_eq!(r[0][0], ExactNumber::one());
        // unsatisfiable matrix: all zero
        let phi = parse_formula("R(x,y) & ~R(x,y)", &v).unwrap();
        let r = ctx.r_matrix(&phi, &unit);
        assert!(r.iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn r_matrix_is_symmetric() {
        let (v, ctx) = ur();
        let unit = SymmetricWeights::unit(&v);
        for text in ["R(x,y) -> R(y,x)", "R(x,y) -> U(y)", "U(x) | R(y,x)"] {
            let phi = parse_formula(text, &v).unwrap();
            let r = ctx.r_matrix(&phi, &unit);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(r[i][j], r[j][i], "asymmetry at ({i},{j}) for {text}");
                }
            }
        }
    }

    #[test]
    fn cd_matrix_examples() {
        let mut v = Vocabulary::new();
        v.add("R", 2).unwrap();
        let ctx = CellCtx::new(&v);
        let unit = SymmetricWeights::unit(&v);
        let phi = parse_formula("~R(x,x)", &v).unwrap();
        let (c, d) = ctx.cd_matrices(&phi, &unit, 0);
        assert_eq!(c[0][0], ExactNumber::one());
        assert_eq!(d[0][0], ExactNumber::one());

        // an unconstrained extra binary predicate quadruples both counts
        let mut v = Vocabulary::new();
        let r = v.add("R", 2).unwrap();
        v.add("S", 2).unwrap();
        let ctx = CellCtx::new(&v);
        let unit = SymmetricWeights::unit(&v);
        let phi = parse_formula("~R(x,x)", &v).unwrap();
        let (c, d) = ctx.cd_matrices(&phi, &unit, r);
        for i in [0, 1] {
            for j in [0, 1] {
                assert_eq!(c[i][j], ExactNumber::from_int(4));
                assert_eq!(d[i][j], ExactNumber::from_int(4));
            }
        }

        // forbidding the edge direction empties c
        let mut v = Vocabulary::new();
        let r = v.add("R", 2).unwrap();
        let ctx = CellCtx::new(&v);
        let unit = SymmetricWeights::unit(&v);
        let phi = parse_formula("~R(x,x) & ~R(x,y)", &v).unwrap();
        let (c, d) = ctx.cd_matrices(&phi, &unit, r);
        assert!(c[0][0].is_zero());
        assert_eq!(d[0][0], ExactNumber::one());
    }

    #[test]
    fn c_plus_d_bounded_by_r() {
        let (v, ctx) = ur();
        let unit = SymmetricWeights::unit(&v);
        for text in ["~R(x,x)", "~R(x,x) & (R(x,y) -> U(y))", "~R(x,x) & ~R(y,x)"] {
            let phi = parse_formula(text, &v).unwrap();
            let r = ctx.r_matrix(&phi, &unit);
            let (c, d) = ctx.cd_matrices(&phi, &unit, 1);
            for i in 0..4 {
                for j in 0..4 {
                    let sum = c[i][j].clone() + d[i][j].clone();
                    assert!(sum <= r[i][j], "c+d > r at ({i},{j}) for {text}");
                    // equality iff no consistent table has the reverse edge
                    let any_reverse = (0..4).any(|l| {
                        ctx.two_type_consistent(&phi, i, j, l)
                            && ctx.pair_value(l, 1, Orient::YX)
                    });
                    assert_eq!(sum == r[i][j], !any_reverse);
                }
            }
        }
    }

    #[test]
    fn t_vector_enumeration() {
        assert_eq!(enumerate_t(1, 2), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(enumerate_t(2, 1), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        for (u, d) in [(1usize, 2u32), (2, 1), (2, 3), (3, 2), (4, 3)] {
            let t = enumerate_t(u, d);
            let expect = binomial(d as usize + u, u);
            assert_eq!(ExactNumber::from_int(t.len() as i64), expect, "u={u} d={d}");
            // no duplicates, all within bound
            for w in &t {
                assert!(w.iter().sum::<u32>() <= d);
            }
            let mut sorted = t.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), t.len());
        }
    }

    #[test]
    fn alpha_collapses_extended_vectors() {
        // u=1, T = {(0),(1),(2)}: k_(1,(0))=2, k_(1,(1))=3, k_(1,(2))=0
        assert_eq!(alpha(&[2, 3, 0], 1, 3), vec![5]);
        // u=2, |T|=2
        assert_eq!(alpha(&[1, 2, 3, 4], 2, 2), vec![3, 7]);
    }

    #[test]
    fn pair_evaluation_orientation() {
        let (v, ctx) = ur();
        // R(x,y) under the swapped substitution reads the reverse atom
        let phi = parse_formula("R(x,y)", &v).unwrap();
        // table 2 = R(x,y) & ~R(y,x)
        assert!(ctx.eval_pair(&phi, 0, 0, 2, false));
        assert!(!ctx.eval_pair(&phi, 0, 0, 2, true));
        // unary atoms follow the element, not the slot
        let phi = parse_formula("U(x)", &v).unwrap();
        assert!(ctx.eval_pair(&phi, 2, 0, 0, false));
        assert!(!ctx.eval_pair(&phi, 2, 0, 0, true));
        // reflexive atoms read the element's own 1-type (built directly:
        // parsing would rename the first-seen variable to x)
        let phi = Formula::Atom(1, Args::Binary(Var::Y, Var::Y));
        assert!(ctx.eval_pair(&phi, 0, 1, 0, false));
        assert!(!ctx.eval_pair(&phi, 0, 1, 0, true));
        // equality across the two distinct elements is false
        let phi = parse_formula("x = y", &v).unwrap();
        assert!(!ctx.eval_pair(&phi, 0, 0, 0, false));
        let phi = parse_formula("x = x", &v).unwrap();
        assert!(ctx.eval_pair(&phi, 0, 0, 0, false));
    }

    #[test]
    fn exhaustiveness_of_cells() {
        // every complete x-atom assignment matches exactly one 1-type and
        // every cross assignment exactly one 2-table, by index arithmetic
        let (_, ctx) = ur();
        assert_eq!(ctx.u(), 4);
        assert_eq!(ctx.b(), 4);
        let mut seen = vec![0usize; 4];
        for t in ctx.one_types() {
            seen[t.index] += 1;
        }
        assert!(seen.iter().all(|&s| s == 1));
    }
}
