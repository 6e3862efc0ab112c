//! Abstract syntax for two-variable sentences with counting quantifiers,
//! vocabularies of predicates with arity <= 2, Herbrand interpretations over
//! domains `{1..n}`, grounding, restriction, and graph projection.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::arith::ExactNumber;
use crate::{Error, Result};

/// Index of a predicate within its [`Vocabulary`].
pub type PredId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: u8,
}

/// Ordered sequence of predicates, each of arity 0, 1 or 2, with an optional
/// distinguished binary relation (the DAG relation of the essential-DAG
/// axiom).
#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    preds: Vec<Predicate>,
    by_name: HashMap<String, PredId>,
    pub distinguished: Option<PredId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    pub fn add(&mut self, name: &str, arity: u8) -> Result<PredId> {
        if arity > 2 {
            return Err(Error::Invalid(format!(
                "predicate `{name}` has arity {arity}; only 0, 1, 2 are supported"
            )));
        }
        if self.by_name.contains_key(name) {
            return Err(Error::Invalid(format!("duplicate predicate `{name}`")));
        }
        let id = self.preds.len();
        self.preds.push(Predicate {
            name: name.to_string(),
            arity,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Parses a `Name/arity` declaration such as `R/2`.
    pub fn add_decl(&mut self, decl: &str) -> Result<PredId> {
        let (name, arity) = decl
            .split_once('/')
            .ok_or_else(|| Error::Invalid(format!("bad predicate declaration `{decl}` (want Name/arity)")))?;
        let arity: u8 = arity
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad arity in `{decl}`")))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(Error::Invalid(format!("bad predicate name in `{decl}`")));
        }
        self.add(name, arity)
    }

    pub fn lookup(&self, name: &str) -> Option<PredId> {
        self.by_name.get(name).copied()
    }

    pub fn pred(&self, id: PredId) -> &Predicate {
        &self.preds[id]
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PredId, &Predicate)> {
        self.preds.iter().enumerate()
    }

    pub fn ids_with_arity(&self, arity: u8) -> Vec<PredId> {
        self.iter()
            .filter(|(_, p)| p.arity == arity)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn set_distinguished(&mut self, name: &str) -> Result<PredId> {
        let id = self
            .lookup(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))?;
        if self.preds[id].arity != 2 {
            return Err(Error::Invalid(format!(
                "distinguished relation `{name}` must be binary"
            )));
        }
        self.distinguished = Some(id);
        Ok(id)
    }

    /// Number of ground atoms over a domain of size n.
    pub fn ground_atom_count(&self, n: u64) -> u64 {
        self.preds
            .iter()
            .map(|p| match p.arity {
                0 => 1,
                1 => n,
                _ => n * n,
            })
            .sum()
    }
}

/// The two variable slots every formula is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Y => write!(f, "y"),
        }
    }
}

/// Argument list of an atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Args {
    None,
    Unary(Var),
    Binary(Var, Var),
}

impl Args {
    pub fn arity(self) -> u8 {
        match self {
            Args::None => 0,
            Args::Unary(_) => 1,
            Args::Binary(..) => 2,
        }
    }

    pub fn vars(self) -> Vec<Var> {
        match self {
            Args::None => vec![],
            Args::Unary(v) => vec![v],
            Args::Binary(a, b) => vec![a, b],
        }
    }

    pub fn swap_vars(self) -> Args {
        match self {
            Args::None => Args::None,
            Args::Unary(v) => Args::Unary(v.other()),
            Args::Binary(a, b) => Args::Binary(a.other(), b.other()),
        }
    }
}

/// Comparator of counting quantifiers and cardinality constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Le,
    Ge,
}

impl CmpOp {
    pub fn test(self, value: u64, bound: u64) -> bool {
        match self {
            CmpOp::Eq => value == bound,
            CmpOp::Le => value <= bound,
            CmpOp::Ge => value >= bound,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmpOp::Eq => write!(f, "="),
            CmpOp::Le => write!(f, "<="),
            CmpOp::Ge => write!(f, ">="),
        }
    }
}

/// Formula tree. A `Sentence` is a closed formula; a quantifier-free formula
/// with variables among x, y serves as the matrix of `forall x forall y`
/// problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(PredId, Args),
    /// Built-in equality between variables (x = y). Negate for inequality.
    Eq(Var, Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    /// Counting quantifier: exists[cmp m] v. body.
    CountExists(CmpOp, u64, Var, Box<Formula>),
}

/// A closed [`Formula`] (no free variables).
pub type Sentence = Formula;

/// A quantifier-free [`Formula`] with free variables among x, y.
pub type QFFormula = Formula;

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction that flattens nested `And`s and drops `True`.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction that flattens nested `Or`s and drops `False`.
    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![Formula::not(a), b])
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn walk(f: &Formula, out: &mut BTreeSet<Var>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(_, args) => out.extend(args.vars()),
                Formula::Eq(a, b) => {
                    out.insert(*a);
                    out.insert(*b);
                }
                Formula::Not(g) => walk(g, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| walk(g, out)),
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Forall(v, g) | Formula::Exists(v, g) => {
                    let mut inner = BTreeSet::new();
                    walk(g, &mut inner);
                    inner.remove(v);
                    out.extend(inner);
                }
                Formula::CountExists(_, _, v, g) => {
                    let mut inner = BTreeSet::new();
                    walk(g, &mut inner);
                    inner.remove(v);
                    out.extend(inner);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => true,
            Formula::Not(g) => g.is_quantifier_free(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(|g| g.is_quantifier_free()),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) | Formula::CountExists(..) => false,
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_counting(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => false,
            Formula::Not(g) => g.has_counting(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().any(|g| g.has_counting()),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.has_counting() || b.has_counting(),
            Formula::Forall(_, g) | Formula::Exists(_, g) => g.has_counting(),
            Formula::CountExists(..) => true,
        }
    }

    /// Swaps the roles of x and y in every atom and quantifier.
    pub fn swap_vars(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(p, args) => Formula::Atom(*p, args.swap_vars()),
            Formula::Eq(a, b) => Formula::Eq(a.other(), b.other()),
            Formula::Not(g) => Formula::not(g.swap_vars()),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.swap_vars()).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.swap_vars()).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.swap_vars()), Box::new(b.swap_vars()))
            }
            Formula::Iff(a, b) => Formula::Iff(Box::new(a.swap_vars()), Box::new(b.swap_vars())),
            Formula::Forall(v, g) => Formula::Forall(v.other(), Box::new(g.swap_vars())),
            Formula::Exists(v, g) => Formula::Exists(v.other(), Box::new(g.swap_vars())),
            Formula::CountExists(c, m, v, g) => {
                Formula::CountExists(*c, *m, v.other(), Box::new(g.swap_vars()))
            }
        }
    }

    /// Replaces every occurrence of nullary atoms by the given truth values.
    pub fn substitute_nullary(&self, values: &HashMap<PredId, bool>) -> Formula {
        match self {
            Formula::Atom(p, Args::None) => match values.get(p) {
                Some(true) => Formula::True,
                Some(false) => Formula::False,
                None => self.clone(),
            },
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => self.clone(),
            Formula::Not(g) => Formula::not(g.substitute_nullary(values)),
            Formula::And(gs) => {
                Formula::and(gs.iter().map(|g| g.substitute_nullary(values)).collect())
            }
            Formula::Or(gs) => {
                Formula::or(gs.iter().map(|g| g.substitute_nullary(values)).collect())
            }
            Formula::Implies(a, b) => Formula::Implies(
                Box::new(a.substitute_nullary(values)),
                Box::new(b.substitute_nullary(values)),
            ),
            Formula::Iff(a, b) => Formula::Iff(
                Box::new(a.substitute_nullary(values)),
                Box::new(b.substitute_nullary(values)),
            ),
            Formula::Forall(v, g) => Formula::Forall(*v, Box::new(g.substitute_nullary(values))),
            Formula::Exists(v, g) => Formula::Exists(*v, Box::new(g.substitute_nullary(values))),
            Formula::CountExists(c, m, v, g) => {
                Formula::CountExists(*c, *m, *v, Box::new(g.substitute_nullary(values)))
            }
        }
    }

    /// Pretty-prints with the given vocabulary; `parse` round-trips the
    /// output up to whitespace.
    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, vocab }
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    vocab: &'a Vocabulary,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.f, self.vocab, 0, out)
    }
}

/// Precedence levels: 0 = iff, 1 = implies, 2 = or, 3 = and, 4 = unary.
fn write_formula(
    f: &Formula,
    vocab: &Vocabulary,
    prec: u8,
    out: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let paren = |need: bool, out: &mut fmt::Formatter<'_>, inner: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
        if need {
            write!(out, "(")?;
            inner(out)?;
            write!(out, ")")
        } else {
            inner(out)
        }
    };
    match f {
        Formula::True => write!(out, "true"),
        Formula::False => write!(out, "false"),
        Formula::Eq(a, b) => write!(out, "{a}={b}"),
        Formula::Not(g) => {
            if let Formula::Eq(a, b) = g.as_ref() {
                return write!(out, "{a}!={b}");
            }
            write!(out, "~")?;
            write_formula(g, vocab, 4, out)
        }
        Formula::Atom(p, args) => {
            let name = &vocab.pred(*p).name;
            match args {
                Args::None => write!(out, "{name}()"),
                Args::Unary(v) => write!(out, "{name}({v})"),
                Args::Binary(a, b) => write!(out, "{name}({a},{b})"),
            }
        }
        Formula::And(gs) => paren(prec > 3, out, &|out| {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    write!(out, " & ")?;
                }
                write_formula(g, vocab, 4, out)?;
            }
            Ok(())
        }),
        Formula::Or(gs) => paren(prec > 2, out, &|out| {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    write!(out, " | ")?;
                }
                write_formula(g, vocab, 3, out)?;
            }
            Ok(())
        }),
        Formula::Implies(a, b) => paren(prec > 1, out, &|out| {
            write_formula(a, vocab, 2, out)?;
            write!(out, " -> ")?;
            // right-associative
            write_formula(b, vocab, 1, out)
        }),
        Formula::Iff(a, b) => paren(prec > 0, out, &|out| {
            write_formula(a, vocab, 1, out)?;
            write!(out, " <-> ")?;
            write_formula(b, vocab, 0, out)
        }),
        Formula::Forall(v, g) => paren(prec > 0, out, &|out| {
            write!(out, "forall {v}. ")?;
            write_formula(g, vocab, 0, out)
        }),
        Formula::Exists(v, g) => paren(prec > 0, out, &|out| {
            write!(out, "exists {v}. ")?;
            write_formula(g, vocab, 0, out)
        }),
        Formula::CountExists(c, m, v, g) => paren(prec > 0, out, &|out| {
            write!(out, "exists[{c}{m}] {v}. ")?;
            write_formula(g, vocab, 0, out)
        }),
    }
}

/// A ground atom: predicate applied to domain constants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Vec<u32>,
}

impl GroundAtom {
    pub fn nullary(pred: PredId) -> Self {
        GroundAtom { pred, args: vec![] }
    }

    pub fn unary(pred: PredId, a: u32) -> Self {
        GroundAtom { pred, args: vec![a] }
    }

    pub fn binary(pred: PredId, a: u32, b: u32) -> Self {
        GroundAtom {
            pred,
            args: vec![a, b],
        }
    }
}

/// Propositional formula over ground atoms (output of [`ground`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundFormula {
    Const(bool),
    Atom(GroundAtom),
    Not(Box<GroundFormula>),
    And(Vec<GroundFormula>),
    Or(Vec<GroundFormula>),
}

/// Instantiates a quantifier-free formula at the given variable binding.
/// Equality atoms are resolved to constants.
pub fn ground(phi: &QFFormula, x: Option<u32>, y: Option<u32>) -> Result<GroundFormula> {
    let bind = |v: Var| -> Result<u32> {
        match v {
            Var::X => x.ok_or_else(|| Error::Invalid("unbound variable x".into())),
            Var::Y => y.ok_or_else(|| Error::Invalid("unbound variable y".into())),
        }
    };
    Ok(match phi {
        Formula::True => GroundFormula::Const(true),
        Formula::False => GroundFormula::Const(false),
        Formula::Atom(p, args) => GroundFormula::Atom(match args {
            Args::None => GroundAtom::nullary(*p),
            Args::Unary(v) => GroundAtom::unary(*p, bind(*v)?),
            Args::Binary(a, b) => GroundAtom::binary(*p, bind(*a)?, bind(*b)?),
        }),
        Formula::Eq(a, b) => GroundFormula::Const(bind(*a)? == bind(*b)?),
        Formula::Not(g) => GroundFormula::Not(Box::new(ground(g, x, y)?)),
        Formula::And(gs) => GroundFormula::And(
            gs.iter()
                .map(|g| ground(g, x, y))
                .collect::<Result<Vec<_>>>()?,
        ),
        Formula::Or(gs) => GroundFormula::Or(
            gs.iter()
                .map(|g| ground(g, x, y))
                .collect::<Result<Vec<_>>>()?,
        ),
        Formula::Implies(a, b) => GroundFormula::Or(vec![
            GroundFormula::Not(Box::new(ground(a, x, y)?)),
            ground(b, x, y)?,
        ]),
        Formula::Iff(a, b) => {
            let (ga, gb) = (ground(a, x, y)?, ground(b, x, y)?);
            GroundFormula::And(vec![
                GroundFormula::Or(vec![GroundFormula::Not(Box::new(ga.clone())), gb.clone()]),
                GroundFormula::Or(vec![GroundFormula::Not(Box::new(gb)), ga]),
            ])
        }
        Formula::Forall(..) | Formula::Exists(..) | Formula::CountExists(..) => {
            return Err(Error::Invalid("cannot ground a quantified formula".into()))
        }
    })
}

/// Total truth assignment for all ground atoms of a vocabulary over a finite
/// domain (not necessarily contiguous, so restrictions stay first-class).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub domain: BTreeSet<u32>,
    truth: BTreeMap<GroundAtom, bool>,
}

impl Interpretation {
    /// All-false interpretation over `{1..n}`.
    pub fn all_false(vocab: &Vocabulary, n: u32) -> Self {
        let domain: BTreeSet<u32> = (1..=n).collect();
        let mut truth = BTreeMap::new();
        for atom in herbrand_base(vocab, &domain) {
            truth.insert(atom, false);
        }
        Interpretation { domain, truth }
    }

    pub fn set(&mut self, atom: GroundAtom, value: bool) {
        debug_assert!(self.truth.contains_key(&atom), "atom outside Herbrand base");
        self.truth.insert(atom, value);
    }

    pub fn get(&self, atom: &GroundAtom) -> bool {
        *self.truth.get(atom).unwrap_or(&false)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&GroundAtom, bool)> {
        self.truth.iter().map(|(a, v)| (a, *v))
    }

    /// The induced interpretation over a subset of the domain: exactly the
    /// ground atoms mentioning only subset elements, truth values copied.
    pub fn restrict(&self, subset: &BTreeSet<u32>) -> Interpretation {
        let domain: BTreeSet<u32> = self.domain.intersection(subset).copied().collect();
        let truth = self
            .truth
            .iter()
            .filter(|(a, _)| a.args.iter().all(|c| domain.contains(c)))
            .map(|(a, v)| (a.clone(), *v))
            .collect();
        Interpretation { domain, truth }
    }

    /// Views a binary relation as a directed graph over the domain.
    pub fn project_relation(&self, vocab: &Vocabulary, pred: PredId) -> Result<DirectedGraph> {
        if vocab.pred(pred).arity != 2 {
            return Err(Error::Invalid(format!(
                "`{}` is not binary",
                vocab.pred(pred).name
            )));
        }
        let nodes: Vec<u32> = self.domain.iter().copied().collect();
        let mut edges = Vec::new();
        for (atom, v) in self.truth.iter() {
            if atom.pred == pred && *v {
                edges.push((atom.args[0], atom.args[1]));
            }
        }
        Ok(DirectedGraph { nodes, edges })
    }
}

/// Every ground atom of the vocabulary over the given domain.
pub fn herbrand_base(vocab: &Vocabulary, domain: &BTreeSet<u32>) -> Vec<GroundAtom> {
    let mut out = Vec::new();
    for (id, p) in vocab.iter() {
        match p.arity {
            0 => out.push(GroundAtom::nullary(id)),
            1 => {
                for &a in domain {
                    out.push(GroundAtom::unary(id, a));
                }
            }
            _ => {
                for &a in domain {
                    for &b in domain {
                        out.push(GroundAtom::binary(id, a, b));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Evaluates a propositional ground formula under an interpretation.
pub fn eval_ground(g: &GroundFormula, omega: &Interpretation) -> bool {
    match g {
        GroundFormula::Const(b) => *b,
        GroundFormula::Atom(a) => omega.get(a),
        GroundFormula::Not(inner) => !eval_ground(inner, omega),
        GroundFormula::And(gs) => gs.iter().all(|h| eval_ground(h, omega)),
        GroundFormula::Or(gs) => gs.iter().any(|h| eval_ground(h, omega)),
    }
}

/// Herbrand-semantics model check: quantifiers range over the domain,
/// counting quantifiers tally witnesses.
pub fn models(omega: &Interpretation, sentence: &Sentence) -> bool {
    fn eval(f: &Formula, omega: &Interpretation, x: Option<u32>, y: Option<u32>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p, args) => {
                let bind = |v: Var| match v {
                    Var::X => x.expect("unbound x"),
                    Var::Y => y.expect("unbound y"),
                };
                let atom = match args {
                    Args::None => GroundAtom::nullary(*p),
                    Args::Unary(v) => GroundAtom::unary(*p, bind(*v)),
                    Args::Binary(a, b) => GroundAtom::binary(*p, bind(*a), bind(*b)),
                };
                omega.get(&atom)
            }
            Formula::Eq(a, b) => {
                let bind = |v: Var| match v {
                    Var::X => x.expect("unbound x"),
                    Var::Y => y.expect("unbound y"),
                };
                bind(*a) == bind(*b)
            }
            Formula::Not(g) => !eval(g, omega, x, y),
            Formula::And(gs) => gs.iter().all(|g| eval(g, omega, x, y)),
            Formula::Or(gs) => gs.iter().any(|g| eval(g, omega, x, y)),
            Formula::Implies(a, b) => !eval(a, omega, x, y) || eval(b, omega, x, y),
            Formula::Iff(a, b) => eval(a, omega, x, y) == eval(b, omega, x, y),
            Formula::Forall(v, g) => omega.domain.iter().all(|&c| match v {
                Var::X => eval(g, omega, Some(c), y),
                Var::Y => eval(g, omega, x, Some(c)),
            }),
            Formula::Exists(v, g) => omega.domain.iter().any(|&c| match v {
                Var::X => eval(g, omega, Some(c), y),
                Var::Y => eval(g, omega, x, Some(c)),
            }),
            Formula::CountExists(cmp, m, v, g) => {
                let count = omega
                    .domain
                    .iter()
                    .filter(|&&c| match v {
                        Var::X => eval(g, omega, Some(c), y),
                        Var::Y => eval(g, omega, x, Some(c)),
                    })
                    .count() as u64;
                cmp.test(count, *m)
            }
        }
    }
    eval(sentence, omega, None, None)
}

/// Directed graph over explicit node labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    pub nodes: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

/// Per-predicate weight pair (w, w̄) applied to true and false ground atoms
/// respectively; indexed by [`PredId`], defaulting to (1, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricWeights {
    pairs: Vec<(ExactNumber, ExactNumber)>,
}

impl SymmetricWeights {
    pub fn unit(vocab: &Vocabulary) -> Self {
        SymmetricWeights {
            pairs: vec![(ExactNumber::one(), ExactNumber::one()); vocab.len()],
        }
    }

    pub fn set(&mut self, pred: PredId, pos: ExactNumber, neg: ExactNumber) {
        self.pairs[pred] = (pos, neg);
    }

    /// Registers a weight pair for a predicate just added to the vocabulary.
    pub fn push(&mut self, pos: ExactNumber, neg: ExactNumber) {
        self.pairs.push((pos, neg));
    }

    pub fn pos(&self, pred: PredId) -> &ExactNumber {
        &self.pairs[pred].0
    }

    pub fn neg(&self, pred: PredId) -> &ExactNumber {
        &self.pairs[pred].1
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.pairs
            .iter()
            .all(|(p, n)| p.is_one() && n.is_one())
    }
}

/// Bound of a cardinality constraint. `DomainSize` stands for the current n,
/// used by machinery-introduced total-function constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Const(u64),
    DomainSize,
}

impl Bound {
    pub fn resolve(self, n: u64) -> u64 {
        match self {
            Bound::Const(b) => b,
            Bound::DomainSize => n,
        }
    }
}

/// A constraint `|P| cmp bound` on the number of true ground atoms of P.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityConstraint {
    pub pred: PredId,
    pub cmp: CmpOp,
    pub bound: Bound,
}

impl CardinalityConstraint {
    /// Parses `"P<=3"`, `"R>=1"`, `"U=0"` (optional surrounding `|…|` pipes
    /// around the name are accepted).
    pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Self> {
        let s = text.trim();
        let (idx, op_len, cmp) = ["<=", ">=", "="]
            .iter()
            .filter_map(|op| s.find(op).map(|i| (i, op.len(), *op)))
            .min_by_key(|(i, _, _)| *i)
            .ok_or_else(|| Error::Invalid(format!("bad cardinality constraint `{s}` (want P<=k, P>=k or P=k)")))?;
        let cmp = match cmp {
            "<=" => CmpOp::Le,
            ">=" => CmpOp::Ge,
            _ => CmpOp::Eq,
        };
        let name = s[..idx].trim().trim_matches('|').trim();
        let bound: u64 = s[idx + op_len..]
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad bound in cardinality constraint `{s}`")))?;
        let pred = vocab
            .lookup(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))?;
        Ok(CardinalityConstraint {
            pred,
            cmp,
            bound: Bound::Const(bound),
        })
    }
}
