//! Deterministic sentence corpora for the acceptance suite. Everything is
//! generated from a fixed seed so failures replay exactly.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use c2count::logic::Vocabulary;

pub const SEED: u64 = 0xC2C0_DA61;

pub fn vocab_ur() -> Vocabulary {
    let mut v = Vocabulary::new();
    v.add("U", 1).unwrap();
    v.add("R", 2).unwrap();
    v
}

pub fn vocab_r() -> Vocabulary {
    let mut v = Vocabulary::new();
    v.add("R", 2).unwrap();
    v
}

const PAIR_ATOMS_UR: &[&str] = &["U(x)", "U(y)", "R(x,y)", "R(y,x)", "R(x,x)", "x = y"];
const PAIR_ATOMS_R: &[&str] = &["R(x,y)", "R(y,x)", "R(x,x)", "x = y"];
const BODY_ATOMS_UR: &[&str] = &["U(x)", "U(y)", "R(x,y)", "R(y,x)", "x = y"];
const UNARY_ATOMS_UR: &[&str] = &["U(x)", "R(x,x)"];

/// Random quantifier-free matrix of bounded depth, as surface syntax.
fn matrix(rng: &mut StdRng, atoms: &[&str], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return atoms[rng.gen_range(0..atoms.len())].to_string();
    }
    match rng.gen_range(0..5u32) {
        0 => format!("~({})", matrix(rng, atoms, depth - 1)),
        1 => format!(
            "({} & {})",
            matrix(rng, atoms, depth - 1),
            matrix(rng, atoms, depth - 1)
        ),
        2 => format!(
            "({} | {})",
            matrix(rng, atoms, depth - 1),
            matrix(rng, atoms, depth - 1)
        ),
        3 => format!(
            "({} -> {})",
            matrix(rng, atoms, depth - 1),
            matrix(rng, atoms, depth - 1)
        ),
        _ => format!(
            "({} <-> {})",
            matrix(rng, atoms, depth - 1),
            matrix(rng, atoms, depth - 1)
        ),
    }
}

/// Axiom-free corpus over {U/1, R/2}: universal matrices, counting
/// quantifiers with thresholds up to 2, plain existentials, and two-block
/// combinations.
pub fn plain_corpus() -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for _ in 0..22 {
        out.push(format!(
            "forall x forall y. {}",
            matrix(&mut rng, PAIR_ATOMS_UR, 3)
        ));
    }
    let counts = [
        ("<=", 0),
        ("<=", 1),
        ("<=", 2),
        (">=", 1),
        (">=", 2),
        ("=", 0),
        ("=", 1),
        ("=", 2),
    ];
    for (i, (op, m)) in counts.iter().cycle().take(12).enumerate() {
        let _ = i;
        out.push(format!(
            "forall x exists[{op}{m}] y. {}",
            matrix(&mut rng, BODY_ATOMS_UR, 2)
        ));
    }
    for _ in 0..8 {
        out.push(format!(
            "forall x exists y. {}",
            matrix(&mut rng, BODY_ATOMS_UR, 2)
        ));
    }
    for (op, m) in [("=", 1), ("<=", 1), (">=", 2), ("=", 2)] {
        out.push(format!(
            "exists[{op}{m}] x. {}",
            matrix(&mut rng, UNARY_ATOMS_UR, 1)
        ));
    }
    for _ in 0..6 {
        out.push(format!(
            "(forall x forall y. {}) & (forall x exists[<=1] y. {})",
            matrix(&mut rng, PAIR_ATOMS_UR, 2),
            matrix(&mut rng, BODY_ATOMS_UR, 1)
        ));
    }
    out
}

/// Sentences paired with the essential-DAG axiom on R: mostly universal
/// matrices (the existential blocks are kept simple so the extended type
/// space stays small), split between the R-only and {U, R} vocabularies.
/// Returns (sentence, uses_unary_predicate).
pub fn axiom_corpus() -> Vec<(String, bool)> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 0x5EED);
    let mut out = Vec::new();
    out.push(("forall x forall y. true".to_string(), false));
    out.push(("forall x exists[<=1] y. R(y,x)".to_string(), false));
    for _ in 0..12 {
        out.push((
            format!("forall x forall y. {}", matrix(&mut rng, PAIR_ATOMS_R, 3)),
            false,
        ));
    }
    out.push(("forall x forall y. R(x,y) -> U(y)".to_string(), true));
    out.push(("forall x exists y. (R(x,y) | x = y)".to_string(), true));
    for _ in 0..4 {
        out.push((
            format!("forall x forall y. {}", matrix(&mut rng, PAIR_ATOMS_UR, 3)),
            true,
        ));
    }
    out
}

/// Existential-quantifier corpus for the normalization checks: every
/// sentence introduces Skolem or counting machinery.
pub fn exists_corpus() -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 0xE715);
    let mut out = Vec::new();
    for _ in 0..8 {
        out.push(format!(
            "forall x exists y. {}",
            matrix(&mut rng, BODY_ATOMS_UR, 2)
        ));
    }
    for (op, m) in [("=", 1), ("=", 2), ("<=", 1), (">=", 1), (">=", 2), ("<=", 2)] {
        out.push(format!(
            "forall x exists[{op}{m}] y. {}",
            matrix(&mut rng, BODY_ATOMS_UR, 2)
        ));
    }
    for (op, m) in [("=", 1), (">=", 1)] {
        out.push(format!(
            "exists[{op}{m}] x. {}",
            matrix(&mut rng, UNARY_ATOMS_UR, 1)
        ));
    }
    for _ in 0..4 {
        out.push(format!(
            "(forall x exists y. {}) & (exists x. {})",
            matrix(&mut rng, BODY_ATOMS_UR, 1),
            matrix(&mut rng, UNARY_ATOMS_UR, 1)
        ));
    }
    out
}
