//! Python bindings for the c2count library.
//!
//! Counts routinely exceed machine precision, so every result crosses the
//! boundary as a string: a decimal integer, or `p/q` for non-integer
//! rationals. Parse with `int()` or `fractions.Fraction`.

use std::collections::HashMap;
use std::str::FromStr;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use c2count::arith::ExactNumber;
use c2count::census::{self, CensusMemo};
use c2count::engine;
use c2count::essential::EssentialDagSpec;
use c2count::logic::{CardinalityConstraint, Sentence, SymmetricWeights, Vocabulary};
use c2count::oracle::brute_wfomc;
use c2count::parse::parse_sentence;

fn to_py(e: c2count::Error) -> PyErr {
    match e {
        c2count::Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

struct Problem {
    sentence: Sentence,
    vocab: Vocabulary,
    weights: SymmetricWeights,
    ccs: Vec<CardinalityConstraint>,
    axiom: Option<EssentialDagSpec>,
}

#[allow(clippy::too_many_arguments)]
fn build_problem(
    formula: &str,
    preds: Vec<String>,
    weights: Option<HashMap<String, (String, String)>>,
    essential: Option<String>,
    max_indegree: Option<u32>,
    ccs: Vec<String>,
) -> PyResult<Problem> {
    let mut vocab = Vocabulary::new();
    for decl in &preds {
        vocab.add_decl(decl).map_err(to_py)?;
    }
    let mut w = SymmetricWeights::unit(&vocab);
    if let Some(map) = weights {
        for (name, (pos, neg)) in map {
            let pred = vocab
                .lookup(&name)
                .ok_or_else(|| PyValueError::new_err(format!("unknown predicate `{name}`")))?;
            w.set(
                pred,
                ExactNumber::from_str(&pos).map_err(to_py)?,
                ExactNumber::from_str(&neg).map_err(to_py)?,
            );
        }
    }
    let ccs = ccs
        .iter()
        .map(|text| CardinalityConstraint::parse(text, &vocab))
        .collect::<c2count::Result<Vec<_>>>()
        .map_err(to_py)?;
    let axiom = match (essential, max_indegree) {
        (Some(name), Some(d)) => {
            let relation = vocab
                .lookup(&name)
                .ok_or_else(|| PyValueError::new_err(format!("unknown predicate `{name}`")))?;
            Some(EssentialDagSpec {
                relation,
                max_indegree: d,
            })
        }
        (None, None) => None,
        _ => {
            return Err(PyValueError::new_err(
                "essential and max_indegree must be given together",
            ))
        }
    };
    let sentence = parse_sentence(formula, &vocab).map_err(to_py)?;
    Ok(Problem {
        sentence,
        vocab,
        weights: w,
        ccs,
        axiom,
    })
}

/// Exact weighted model count of `formula` at domain size `n`, through the
/// lifted engine.
#[pyfunction]
#[pyo3(signature = (formula, preds, n, weights=None, essential=None, max_indegree=None, ccs=Vec::new()))]
fn count(
    formula: &str,
    preds: Vec<String>,
    n: u32,
    weights: Option<HashMap<String, (String, String)>>,
    essential: Option<String>,
    max_indegree: Option<u32>,
    ccs: Vec<String>,
) -> PyResult<String> {
    let p = build_problem(formula, preds, weights, essential, max_indegree, ccs)?;
    engine::count(&p.sentence, &p.vocab, &p.weights, &p.ccs, p.axiom, n)
        .map(|v| v.to_string())
        .map_err(to_py)
}

/// The same count by exhaustive enumeration; refuses instances past the
/// size guard. Meant for cross-checking `count`.
#[pyfunction]
#[pyo3(signature = (formula, preds, n, weights=None, essential=None, max_indegree=None, ccs=Vec::new()))]
fn oracle(
    formula: &str,
    preds: Vec<String>,
    n: u32,
    weights: Option<HashMap<String, (String, String)>>,
    essential: Option<String>,
    max_indegree: Option<u32>,
    ccs: Vec<String>,
) -> PyResult<String> {
    let p = build_problem(formula, preds, weights, essential, max_indegree, ccs)?;
    brute_wfomc(&p.sentence, &p.vocab, &p.weights, &p.ccs, n, p.axiom)
        .map(|v| v.to_string())
        .map_err(to_py)
}

/// Number of essential DAGs on n labeled nodes.
#[pyfunction]
fn essential_total(n: u32) -> String {
    census::essential_total(n).to_string()
}

/// Number of essential DAGs on n labeled nodes with every indegree at most
/// d.
#[pyfunction]
fn essential_bounded(n: u32, d: u32) -> String {
    census::essential_bounded(n, d, &mut CensusMemo::new()).to_string()
}

/// Number of essential DAGs with exactly profile[t] nodes of indegree t.
#[pyfunction]
fn essential_by_indegree(profile: Vec<u32>) -> PyResult<String> {
    if profile.is_empty() {
        return Err(PyValueError::new_err("empty indegree profile"));
    }
    Ok(census::essential_by_indegree(&profile, &mut CensusMemo::new()).to_string())
}

/// The census grid: rows n = 1..=n_max, columns d = 0..=d_max.
#[pyfunction]
fn table(n_max: u32, d_max: u32) -> Vec<Vec<String>> {
    census::table(n_max, d_max)
        .iter()
        .map(|row| row.iter().map(ExactNumber::to_string).collect())
        .collect()
}

/// Exact weighted model counting for two-variable logic with counting
/// quantifiers, an essential-DAG axiom, and an essential-DAG indegree
/// census. Results are returned as decimal strings (or `p/q` for
/// non-integer rationals) since they routinely exceed machine precision.
#[pymodule]
fn c2count_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(essential_total, m)?)?;
    m.add_function(wrap_pyfunction!(essential_bounded, m)?)?;
    m.add_function(wrap_pyfunction!(essential_by_indegree, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    Ok(())
}
