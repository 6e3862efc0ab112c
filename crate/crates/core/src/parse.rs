//! Hand-rolled tokenizer and recursive-descent parser for the sentence
//! grammar:
//!
//! ```text
//! sentence := quant* qf
//! quant    := "forall" v "."? | "exists" ("[" ("="|"<="|">=") m "]")? v "."?
//! qf       := atoms combined with "~", "&", "|", "->", "<->", parentheses;
//!             atoms P, P(), P(x), P(x,y); "x=y", "x!=y"; "true", "false"
//! ```
//!
//! Binding strength: `~` over `&` over `|` over `->` (right-associative)
//! over `<->`. Quantifiers reach as far right as possible and may appear in
//! any subformula position, not only as a prenex prefix.
//!
//! The first two distinct variable names are renamed to the internal slots x
//! and y; a third distinct name is an error. Names starting with `@` are
//! reserved for machinery-introduced predicates and rejected.

use crate::logic::{Args, CmpOp, Formula, Sentence, Var, Vocabulary};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    EqSym,
    NeSym,
    LeSym,
    GeSym,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
            Tok::EqSym => "`=`".into(),
            Tok::NeSym => "`!=`".into(),
            Tok::LeSym => "`<=`".into(),
            Tok::GeSym => "`>=`".into(),
        }
    }
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '[' => {
                i += 1;
                Tok::LBracket
            }
            ']' => {
                i += 1;
                Tok::RBracket
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '.' => {
                i += 1;
                Tok::Dot
            }
            '~' => {
                i += 1;
                Tok::Tilde
            }
            '&' => {
                i += 1;
                Tok::Amp
            }
            '|' => {
                i += 1;
                Tok::Pipe
            }
            '=' => {
                i += 1;
                Tok::EqSym
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    return Err(err(start, "expected `->`"));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    i += 3;
                    Tok::DArrow
                } else if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::LeSym
                } else {
                    return Err(err(start, "expected `<->` or `<=`"));
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::GeSym
                } else {
                    return Err(err(start, "expected `>=`"));
                }
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Tok::NeSym
                } else {
                    return Err(err(start, "expected `!=`"));
                }
            }
            '@' => return Err(err(start, "names starting with `@` are reserved")),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    j += 1;
                }
                let n: u64 = text[i..j]
                    .parse()
                    .map_err(|_| err(start, "number too large"))?;
                i = j;
                Tok::Num(n)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len() {
                    let d = bytes[j] as char;
                    if d.is_alphanumeric() || d == '_' {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let s = text[i..j].to_string();
                i = j;
                Tok::Ident(s)
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        };
        toks.push((tok, start));
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
    vocab: &'a Vocabulary,
    varnames: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.idx += 1;
                Ok(())
            }
            Some(t) => Err(err(
                self.pos(),
                format!("expected {what}, found {}", t.describe()),
            )),
            None => Err(err(self.pos(), format!("expected {what}, found end of input"))),
        }
    }

    fn var_for(&mut self, name: &str, pos: usize) -> Result<Var> {
        if let Some(i) = self.varnames.iter().position(|v| v == name) {
            return Ok(if i == 0 { Var::X } else { Var::Y });
        }
        if self.varnames.len() >= 2 {
            return Err(Error::ThirdVariable(name.to_string()));
        }
        let _ = pos;
        self.varnames.push(name.to_string());
        Ok(if self.varnames.len() == 1 {
            Var::X
        } else {
            Var::Y
        })
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize)> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(s)) => Ok((s, pos)),
            Some(t) => Err(err(pos, format!("expected {what}, found {}", t.describe()))),
            None => Err(err(pos, format!("expected {what}, found end of input"))),
        }
    }

    fn parse_formula(&mut self) -> Result<Formula> {
        let a = self.parse_implies()?;
        if self.peek() == Some(&Tok::DArrow) {
            self.idx += 1;
            let b = self.parse_formula()?;
            return Ok(Formula::Iff(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn parse_implies(&mut self) -> Result<Formula> {
        let a = self.parse_or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.idx += 1;
            let b = self.parse_implies()?;
            return Ok(Formula::Implies(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut parts = vec![self.parse_and()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.idx += 1;
            parts.push(self.parse_and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::or(parts)
        })
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut parts = vec![self.parse_unary()?];
        while self.peek() == Some(&Tok::Amp) {
            self.idx += 1;
            parts.push(self.parse_unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::and(parts)
        })
    }

    fn parse_unary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Tilde) => {
                self.idx += 1;
                Ok(Formula::not(self.parse_unary()?))
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let f = self.parse_formula()?;
                self.eat(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "true" => {
                    self.idx += 1;
                    Ok(Formula::True)
                }
                "false" => {
                    self.idx += 1;
                    Ok(Formula::False)
                }
                "forall" => {
                    self.idx += 1;
                    let (name, npos) = self.ident("a variable name")?;
                    let v = self.var_for(&name, npos)?;
                    if self.peek() == Some(&Tok::Dot) {
                        self.idx += 1;
                    }
                    Ok(Formula::Forall(v, Box::new(self.parse_formula()?)))
                }
                "exists" => {
                    self.idx += 1;
                    let count = if self.peek() == Some(&Tok::LBracket) {
                        self.idx += 1;
                        let cmp = match self.bump() {
                            Some(Tok::EqSym) => CmpOp::Eq,
                            Some(Tok::LeSym) => CmpOp::Le,
                            Some(Tok::GeSym) => CmpOp::Ge,
                            other => {
                                return Err(err(
                                    pos,
                                    format!(
                                        "expected `=`, `<=` or `>=` in counting quantifier{}",
                                        other.map(|t| format!(", found {}", t.describe()))
                                            .unwrap_or_default()
                                    ),
                                ))
                            }
                        };
                        let m = match self.bump() {
                            Some(Tok::Num(m)) => m,
                            _ => return Err(err(self.pos(), "expected a count")),
                        };
                        self.eat(&Tok::RBracket, "`]`")?;
                        Some((cmp, m))
                    } else {
                        None
                    };
                    let (name, npos) = self.ident("a variable name")?;
                    let v = self.var_for(&name, npos)?;
                    if self.peek() == Some(&Tok::Dot) {
                        self.idx += 1;
                    }
                    let body = Box::new(self.parse_formula()?);
                    Ok(match count {
                        None => Formula::Exists(v, body),
                        Some((cmp, m)) => Formula::CountExists(cmp, m, v, body),
                    })
                }
                _ => {
                    let name = s.clone();
                    self.idx += 1;
                    self.parse_atom_or_equality(name, pos)
                }
            },
            Some(t) => Err(err(pos, format!("expected a formula, found {}", t.describe()))),
            None => Err(err(pos, "expected a formula, found end of input")),
        }
    }

    fn parse_atom_or_equality(&mut self, name: String, pos: usize) -> Result<Formula> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.idx += 1;
                let mut vars = Vec::new();
                if self.peek() != Some(&Tok::RParen) {
                    loop {
                        let (vn, vpos) = self.ident("a variable name")?;
                        vars.push(self.var_for(&vn, vpos)?);
                        if self.peek() == Some(&Tok::Comma) {
                            self.idx += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.eat(&Tok::RParen, "`)`")?;
                let id = self
                    .vocab
                    .lookup(&name)
                    .ok_or_else(|| Error::UnknownPredicate(name.clone()))?;
                let declared = self.vocab.pred(id).arity;
                if declared as usize != vars.len() {
                    return Err(Error::ArityMismatch {
                        name,
                        declared,
                        used: vars.len() as u8,
                    });
                }
                Ok(Formula::Atom(
                    id,
                    match vars.len() {
                        0 => Args::None,
                        1 => Args::Unary(vars[0]),
                        _ => Args::Binary(vars[0], vars[1]),
                    },
                ))
            }
            Some(Tok::EqSym) | Some(Tok::NeSym) => {
                let negate = self.bump() == Some(Tok::NeSym);
                let a = self.var_for(&name, pos)?;
                let (rn, rpos) = self.ident("a variable name")?;
                let b = self.var_for(&rn, rpos)?;
                let eq = Formula::Eq(a, b);
                Ok(if negate { Formula::not(eq) } else { eq })
            }
            _ => {
                // bare identifier: a nullary predicate
                let id = self
                    .vocab
                    .lookup(&name)
                    .ok_or_else(|| Error::UnknownPredicate(name.clone()))?;
                let declared = self.vocab.pred(id).arity;
                if declared != 0 {
                    return Err(Error::ArityMismatch {
                        name,
                        declared,
                        used: 0,
                    });
                }
                Ok(Formula::Atom(id, Args::None))
            }
        }
    }
}

/// Parses a formula whose free variables (if any) are renamed to x, y.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        vocab,
        varnames: Vec::new(),
    };
    let f = p.parse_formula()?;
    if let Some(t) = p.peek() {
        return Err(err(p.pos(), format!("unexpected {}", t.describe())));
    }
    Ok(f)
}

/// Parses a closed sentence.
pub fn parse_sentence(text: &str, vocab: &Vocabulary) -> Result<Sentence> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        vocab,
        varnames: Vec::new(),
    };
    let f = p.parse_formula()?;
    if let Some(t) = p.peek() {
        return Err(err(p.pos(), format!("unexpected {}", t.describe())));
    }
    if let Some(v) = f.free_vars().into_iter().next() {
        let name = match v {
            Var::X => p.varnames.first(),
            Var::Y => p.varnames.get(1),
        };
        return Err(Error::Invalid(format!(
            "free variable `{}`; a closed sentence is required",
            name.cloned().unwrap_or_else(|| v.to_string())
        )));
    }
    Ok(f)
}

/// Parses input that may start with a `pred U/1 R/2 ...` header line
/// declaring extra predicates, followed by one sentence. The given
/// vocabulary is extended by the header declarations.
pub fn parse_problem(text: &str, base: &Vocabulary) -> Result<(Vocabulary, Sentence)> {
    let mut vocab = base.clone();
    let trimmed = text.trim_start();
    let rest = if let Some(after) = trimmed.strip_prefix("pred") {
        if after.starts_with([' ', '\t']) {
            let (header, rest) = after.split_once('\n').unwrap_or((after, ""));
            for decl in header.split_whitespace() {
                vocab.add_decl(decl)?;
            }
            rest
        } else {
            trimmed
        }
    } else {
        trimmed
    };
    let sentence = parse_sentence(rest, &vocab)?;
    Ok((vocab, sentence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::PredId;

    fn vocab() -> (Vocabulary, PredId, PredId, PredId) {
        let mut v = Vocabulary::new();
        let u = v.add("U", 1).unwrap();
        let r = v.add("R", 2).unwrap();
        let z = v.add("Z", 0).unwrap();
        (v, u, r, z)
    }

    #[test]
    fn prenex_universal_sentence() {
        let (v, u, r, _) = vocab();
        let s = parse_sentence("forall x forall y. R(x,y) -> U(y)", &v).unwrap();
        let want = Formula::Forall(
            Var::X,
            Box::new(Formula::Forall(
                Var::Y,
                Box::new(Formula::Implies(
                    Box::new(Formula::Atom(r, Args::Binary(Var::X, Var::Y))),
                    Box::new(Formula::Atom(u, Args::Unary(Var::Y))),
                )),
            )),
        );
        assert_eq!(s, want);
        // dots after each binder are accepted too
        assert_eq!(parse_sentence("forall x. forall y. R(x,y) -> U(y)", &v).unwrap(), want);
    }

    #[test]
    fn counting_quantifier() {
        let (v, _, _r, _) = vocab();
        let s = parse_sentence("forall x exists[=2] y. R(x,y)", &v).unwrap();
        match s {
            Formula::Forall(Var::X, body) => match *body {
                Formula::CountExists(CmpOp::Eq, 2, Var::Y, _) => {}
                other => panic!("unexpected body {other:?}"),
            },
            other => panic!("unexpected sentence {other:?}"),
        }
        assert!(parse_sentence("exists[<=1] x. U(x)", &v).is_ok());
        assert!(parse_sentence("exists[>=3] x. U(x)", &v).is_ok());
    }

    #[test]
    fn third_variable_rejected() {
        let (v, _, _, _) = vocab();
        match parse_sentence("forall x forall y forall z. R(x,z)", &v) {
            Err(Error::ThirdVariable(name)) => assert_eq!(name, "z"),
            other => panic!("expected third-variable error, got {other:?}"),
        }
    }

    #[test]
    fn alpha_renaming_by_first_appearance() {
        let (v, _, _r, _) = vocab();
        let a = parse_sentence("forall u exists w. R(u,w)", &v).unwrap();
        let b = parse_sentence("forall x exists y. R(x,y)", &v).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn precedence_and_associativity() {
        let (v, _, _, z) = vocab();
        let atom = || Formula::Atom(z, Args::None);
        // & binds tighter than |
        assert_eq!(
            parse_formula("Z & Z | Z", &v).unwrap(),
            Formula::Or(vec![Formula::And(vec![atom(), atom()]), atom()])
        );
        // ~ binds tightest
        assert_eq!(
            parse_formula("~Z & Z", &v).unwrap(),
            Formula::And(vec![Formula::not(atom()), atom()])
        );
        // -> is right-associative and weaker than |
        assert_eq!(
            parse_formula("Z -> Z | Z -> Z", &v).unwrap(),
            Formula::Implies(
                Box::new(atom()),
                Box::new(Formula::Implies(
                    Box::new(Formula::Or(vec![atom(), atom()])),
                    Box::new(atom())
                ))
            )
        );
        // <-> is weakest
        assert!(matches!(
            parse_formula("Z -> Z <-> Z", &v).unwrap(),
            Formula::Iff(..)
        ));
    }

    #[test]
    fn equality_atoms() {
        let (v, _, _r, _) = vocab();
        let s = parse_sentence("forall x forall y. R(x,y) -> x!=y", &v).unwrap();
        match s {
            Formula::Forall(_, body) => match *body {
                Formula::Forall(_, body) => match *body {
                    Formula::Implies(_, rhs) => {
                        assert_eq!(*rhs, Formula::not(Formula::Eq(Var::X, Var::Y)))
                    }
                    other => panic!("unexpected {other:?}"),
                },
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("x = y", &v).is_ok());
    }

    #[test]
    fn nullary_forms() {
        let (v, _, _, z) = vocab();
        assert_eq!(parse_sentence("Z", &v).unwrap(), Formula::Atom(z, Args::None));
        assert_eq!(parse_sentence("Z()", &v).unwrap(), Formula::Atom(z, Args::None));
    }

    #[test]
    fn error_cases() {
        let (v, _, _, _) = vocab();
        assert!(matches!(
            parse_sentence("Q(x)", &v),
            Err(Error::UnknownPredicate(name)) if name == "Q"
        ));
        assert!(matches!(
            parse_sentence("forall x. U(x,x)", &v),
            Err(Error::ArityMismatch { declared: 1, used: 2, .. })
        ));
        assert!(matches!(
            parse_sentence("U(x)", &v),
            Err(Error::Invalid(_))
        ));
        match parse_sentence("forall x. U(x) &", &v) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 16),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            parse_sentence("@sk0", &v),
            Err(Error::Parse { .. })
        ));
        assert!(parse_sentence("forall x. U(x) ) ", &v).is_err());
    }

    #[test]
    fn printer_round_trip() {
        let (v, _, _, _) = vocab();
        let inputs = [
            "forall x forall y. R(x,y) -> U(y)",
            "forall x exists[=2] y. R(x,y) & ~R(y,x)",
            "exists[>=1] x. U(x) | Z",
            "forall x. (exists[<=1] y. R(x,y)) -> U(x)",
            "forall x forall y. x=y | R(x,y) <-> R(y,x)",
            "~(Z & Z) | false",
            "forall x. true",
        ];
        for text in inputs {
            let s = parse_sentence(text, &v).unwrap();
            let printed = s.display(&v).to_string();
            let back = parse_sentence(&printed, &v)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            assert_eq!(back, s, "round trip failed for `{text}` printed as `{printed}`");
        }
    }

    #[test]
    fn problem_header() {
        let base = Vocabulary::new();
        let (v, s) = parse_problem("pred U/1 R/2\nforall x forall y. R(x,y) -> U(y)", &base)
            .unwrap();
        assert_eq!(v.len(), 2);
        assert!(matches!(s, Formula::Forall(..)));
        // no header: base vocabulary is used directly
        let (v2, _) = parse_problem("forall x. U(x) | ~U(x)", &v).unwrap();
        assert_eq!(v2.len(), 2);
        // `pred` must be followed by whitespace to count as a header
        let mut withp = Vocabulary::new();
        withp.add("pred", 0).unwrap();
        assert!(parse_problem("pred", &withp).is_ok());
    }
}
