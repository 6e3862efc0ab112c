//! Command-line front end: exact weighted model counting with an optional
//! essential-DAG axiom, the indegree census of essential DAGs, and a
//! brute-force oracle for cross-checking.
//!
//! Exit codes: 0 on success, 1 on a user error (bad flags, unparseable
//! formula, instances past the size guards), 2 when an internal invariant
//! fails.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use c2count::arith::ExactNumber;
use c2count::census::{self, CensusMemo};
use c2count::engine;
use c2count::essential::EssentialDagSpec;
use c2count::logic::{CardinalityConstraint, SymmetricWeights, Vocabulary};
use c2count::oracle::brute_wfomc;
use c2count::parse::parse_sentence;
use c2count::{Error, Result};

#[derive(Parser)]
#[command(
    name = "c2count",
    version,
    about = "Exact model counting for two-variable logic with counting \
             quantifiers, cardinality constraints, and an essential-DAG axiom"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count weighted models with the lifted engine
    Count(Query),
    /// Count weighted models by exhaustive enumeration (small instances)
    Oracle(Query),
    /// Tabulate essential-DAG counts over node count and indegree bound
    Table(TableArgs),
    /// Count essential DAGs, optionally by indegree profile, source count,
    /// or edge count
    Census(CensusArgs),
}

#[derive(Args)]
struct Query {
    /// Sentence whose models are counted
    #[arg(long)]
    formula: String,

    /// Predicate declaration NAME/ARITY; repeat per predicate
    #[arg(long = "pred", value_name = "NAME/ARITY")]
    preds: Vec<String>,

    /// JSON file mapping predicate names to [w, w_bar] rational strings
    #[arg(long, value_name = "FILE")]
    weights: Option<PathBuf>,

    /// Binary predicate constrained to form an essential DAG
    #[arg(long, value_name = "NAME", requires = "max_indegree")]
    essential: Option<String>,

    /// Indegree bound for the essential-DAG relation
    #[arg(long, value_name = "D", requires = "essential")]
    max_indegree: Option<u32>,

    /// Cardinality constraint such as "R<=3"; repeat per constraint
    #[arg(long = "cc", value_name = "CONSTRAINT")]
    ccs: Vec<String>,

    /// Domain size
    #[arg(short = 'n', long = "n", value_name = "N")]
    n: u32,

    /// Emit a JSON object instead of a bare number
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Largest node count (rows run from 1)
    #[arg(long, value_name = "N")]
    n_max: u32,

    /// Largest indegree bound (columns run from 0)
    #[arg(long, value_name = "D")]
    d_max: u32,

    /// Emit a JSON object instead of an aligned grid
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CensusArgs {
    /// Node count
    #[arg(short = 'n', long = "n", value_name = "N")]
    n: Option<u32>,

    /// Indegree bound (absent means unbounded)
    #[arg(short = 'd', long = "d", value_name = "D")]
    d: Option<u32>,

    /// Comma-separated indegree profile k0,k1,...,kd; counts the essential
    /// DAGs with exactly k_t nodes of indegree t
    #[arg(
        long,
        value_name = "PROFILE",
        conflicts_with_all = ["n", "d", "sources", "edges"]
    )]
    by_indegree: Option<String>,

    /// Restrict to essential DAGs with exactly this many sources
    #[arg(long, value_name = "S")]
    sources: Option<u32>,

    /// Restrict to essential DAGs with exactly this many edges
    #[arg(long, value_name = "E")]
    edges: Option<u64>,

    /// Emit a JSON object instead of a bare number
    #[arg(long)]
    json: bool,
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return std::process::ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => std::process::ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Internal(_) => 2,
                _ => 1,
            };
            std::process::ExitCode::from(code)
        }
        Err(_) => {
            // the default panic hook has already printed the message
            eprintln!("internal assertion failed");
            std::process::ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Count(q) => run_query(q, false),
        Cmd::Oracle(q) => run_query(q, true),
        Cmd::Table(args) => run_table(args),
        Cmd::Census(args) => run_census(args),
    }
}

fn run_query(q: Query, brute: bool) -> Result<()> {
    let vocab = build_vocab(&q.preds)?;
    let weights = match &q.weights {
        Some(path) => load_weights(path, &vocab)?,
        None => SymmetricWeights::unit(&vocab),
    };
    let ccs = q
        .ccs
        .iter()
        .map(|text| CardinalityConstraint::parse(text, &vocab))
        .collect::<Result<Vec<_>>>()?;
    let axiom = match &q.essential {
        Some(name) => {
            let relation = vocab
                .lookup(name)
                .ok_or_else(|| Error::UnknownPredicate(name.clone()))?;
            Some(EssentialDagSpec {
                relation,
                // clap enforces the pairing with --essential
                max_indegree: q.max_indegree.unwrap(),
            })
        }
        None => None,
    };
    let sentence = parse_sentence(&q.formula, &vocab)?;
    let start = Instant::now();
    let value = if brute {
        brute_wfomc(&sentence, &vocab, &weights, &ccs, q.n, axiom)?
    } else {
        engine::count(&sentence, &vocab, &weights, &ccs, axiom, q.n)?
    };
    emit(q.json, &q.formula, u64::from(q.n), &value, start);
    Ok(())
}

fn run_table(args: TableArgs) -> Result<()> {
    let start = Instant::now();
    let rows = census::table(args.n_max, args.d_max);
    if args.json {
        let grid: Vec<Vec<String>> = rows
            .iter()
            .map(|row| row.iter().map(ExactNumber::to_string).collect())
            .collect();
        let obj = json!({
            "query": "table",
            "n": args.n_max,
            "result": grid,
            "elapsed_ms": start.elapsed().as_millis() as u64,
        });
        println!("{obj}");
        return Ok(());
    }
    let header: Vec<String> = (0..=args.d_max).map(|d| d.to_string()).collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|row| row.iter().map(ExactNumber::to_string).collect())
        .collect();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let label_width = "n\\d".len().max(args.n_max.to_string().len());
    let mut out = String::new();
    write!(out, "{:<label_width$}", "n\\d").unwrap();
    for (w, h) in widths.iter().zip(&header) {
        write!(out, "  {h:>w$}").unwrap();
    }
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        write!(out, "{:<label_width$}", i + 1).unwrap();
        for (w, cell) in widths.iter().zip(row) {
            write!(out, "  {cell:>w$}").unwrap();
        }
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn run_census(args: CensusArgs) -> Result<()> {
    let start = Instant::now();
    let mut memo = CensusMemo::new();
    let (value, n) = if let Some(profile) = &args.by_indegree {
        let k = parse_profile(profile)?;
        let n: u32 = k.iter().sum();
        (census::essential_by_indegree(&k, &mut memo), n)
    } else {
        let n = args.n.ok_or_else(|| {
            Error::Invalid("census needs a node count -n (or --by-indegree)".into())
        })?;
        // past n - 1 the bound no longer excludes anything
        let d = args.d.unwrap_or_else(|| n.saturating_sub(1)).min(n.saturating_sub(1));
        let value = match (args.sources, args.edges) {
            (None, None) => match args.d {
                Some(_) => census::essential_bounded(n, d, &mut memo),
                None => census::essential_total(n),
            },
            (sources, edges) => census::essential_filtered(
                n,
                d,
                |k| {
                    let s_ok = sources.map_or(true, |s| k[0] == s);
                    let e: u64 = k
                        .iter()
                        .enumerate()
                        .map(|(t, &c)| t as u64 * u64::from(c))
                        .sum();
                    s_ok && edges.map_or(true, |want| e == want)
                },
                &mut memo,
            ),
        };
        (value, n)
    };
    emit(args.json, "census", u64::from(n), &value, start);
    Ok(())
}

fn emit(as_json: bool, query: &str, n: u64, value: &ExactNumber, start: Instant) {
    if as_json {
        let obj = json!({
            "query": query,
            "n": n,
            "result": value.to_string(),
            "elapsed_ms": start.elapsed().as_millis() as u64,
        });
        println!("{obj}");
    } else {
        println!("{value}");
    }
}

fn build_vocab(preds: &[String]) -> Result<Vocabulary> {
    let mut vocab = Vocabulary::new();
    for decl in preds {
        vocab.add_decl(decl)?;
    }
    Ok(vocab)
}

fn load_weights(path: &PathBuf, vocab: &Vocabulary) -> Result<SymmetricWeights> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read weights file {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("weights file is not valid JSON: {e}")))?;
    let map = value
        .as_object()
        .ok_or_else(|| Error::Invalid("weights file must be a JSON object".into()))?;
    let mut weights = SymmetricWeights::unit(vocab);
    for (name, pair) in map {
        let pred = vocab
            .lookup(name)
            .ok_or_else(|| Error::UnknownPredicate(name.clone()))?;
        let arr = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Invalid(format!("weight entry for {name} must be a [w, w_bar] pair")))?;
        let mut parsed = arr.iter().map(|v| match v {
            serde_json::Value::String(s) => ExactNumber::from_str(s),
            serde_json::Value::Number(num) => num
                .as_i64()
                .map(ExactNumber::from_int)
                .ok_or_else(|| Error::Invalid(format!("weight for {name} must be an integer or a rational string"))),
            _ => Err(Error::Invalid(format!("weight for {name} must be an integer or a rational string"))),
        });
        let pos = parsed.next().unwrap()?;
        let neg = parsed.next().unwrap()?;
        weights.set(pred, pos, neg);
    }
    Ok(weights)
}

fn parse_profile(text: &str) -> Result<Vec<u32>> {
    let k = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| Error::Invalid(format!("bad indegree profile `{text}` (want k0,k1,...)")))
        })
        .collect::<Result<Vec<u32>>>()?;
    if k.is_empty() {
        return Err(Error::Invalid("empty indegree profile".into()));
    }
    Ok(k)
}
