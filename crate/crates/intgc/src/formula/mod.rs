//! Formula syntax: abstract syntax tree, concrete syntax, subformula and
//! closure sets, and the prefix normalization that folds the infinite prefix
//! family Σ of a root formula back onto its finite closure set Γ.

mod parser;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A formula of the language: intuitionistic connectives plus the adjoint
/// modal pair `<>` (lower, existential over R-successors) and `[]` (upper,
/// universal over R-predecessors).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Var(String),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// `<>` — the lower adjoint.
    Up(Box<Formula>),
    /// `[]` — the upper adjoint.
    Down(Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at offset {offset}: {expected}")]
    Parse { offset: usize, expected: String },
    #[error("`{0}` is not in the prefix family of the closure basis")]
    NotInSigma(String),
    #[error("normal form `{0}` fell outside the closure set; the basis is corrupt")]
    NormalFormOutsideGamma(String),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn up(f: Formula) -> Self {
        Formula::Up(Box::new(f))
    }

    pub fn down(f: Formula) -> Self {
        Formula::Down(Box::new(f))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => 1,
            Formula::Not(c) | Formula::Up(c) | Formula::Down(c) => 1 + c.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Variable names occurring in the formula, sorted and deduplicated.
    pub fn variables(&self) -> Vec<String> {
        fn walk(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Var(v) => out.push(v.clone()),
                Formula::Top | Formula::Bot => {}
                Formula::Not(c) | Formula::Up(c) | Formula::Down(c) => walk(c, out),
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut vars = Vec::new();
        walk(self, &mut vars);
        vars.sort();
        vars.dedup();
        vars
    }
}

/// Parse the ASCII concrete syntax. `<->` is sugar for the conjunction of the
/// two implications and never appears in the returned tree.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    parser::parse(text)
}

/// Minimally parenthesized text; `parse(render(f)) == f` for every tree.
pub fn render(f: &Formula) -> String {
    f.to_string()
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(out: &mut fmt::Formatter<'_>, c: &Formula, parens: bool) -> fmt::Result {
            if parens {
                write!(out, "({c})")
            } else {
                write!(out, "{c}")
            }
        }
        match self {
            Formula::Var(v) => write!(out, "{v}"),
            Formula::Top => write!(out, "true"),
            Formula::Bot => write!(out, "false"),
            Formula::Not(c) => {
                write!(out, "!")?;
                child(out, c, prec(c) < 4)
            }
            Formula::Up(c) => {
                write!(out, "<>")?;
                child(out, c, prec(c) < 4)
            }
            Formula::Down(c) => {
                write!(out, "[]")?;
                child(out, c, prec(c) < 4)
            }
            Formula::And(l, r) => {
                child(out, l, prec(l) < 3)?;
                write!(out, " & ")?;
                child(out, r, prec(r) <= 3)
            }
            Formula::Or(l, r) => {
                child(out, l, prec(l) < 2)?;
                write!(out, " | ")?;
                child(out, r, prec(r) <= 2)
            }
            Formula::Imp(l, r) => {
                child(out, l, prec(l) <= 1)?;
                write!(out, " -> ")?;
                child(out, r, false)
            }
        }
    }
}

/// All subformulas including `f` itself, in deduplicated post-order
/// (children strictly before parents).
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    fn walk(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
        match f {
            Formula::Var(_) | Formula::Top | Formula::Bot => {}
            Formula::Not(c) | Formula::Up(c) | Formula::Down(c) => walk(c, seen, out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                walk(l, seen, out);
                walk(r, seen, out);
            }
        }
        if seen.insert(f.clone()) {
            out.push(f.clone());
        }
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    walk(f, &mut seen, &mut out);
    out
}

/// A root formula together with its subformula set and the closure set Γ:
/// Γ = Sub(A) ∪ { []<>B | <>B ∈ Sub(A) } ∪ { <>[]B | []B ∈ Sub(A) }.
///
/// Γ is listed with Sub(A) first (post-order) and the added modal wrappers
/// appended, so positions are reproducible across runs.
#[derive(Debug, Clone)]
pub struct ClosureBasis {
    root: Formula,
    sub: Vec<Formula>,
    gamma: Vec<Formula>,
    gamma_index: HashMap<Formula, usize>,
    sub_set: HashSet<Formula>,
}

impl ClosureBasis {
    pub fn new(root: Formula) -> Self {
        let sub = subformulas(&root);
        let mut gamma = sub.clone();
        let mut seen: HashSet<Formula> = gamma.iter().cloned().collect();
        for b in &sub {
            let wrapped = match b {
                Formula::Up(_) => Formula::down(b.clone()),
                Formula::Down(_) => Formula::up(b.clone()),
                _ => continue,
            };
            if seen.insert(wrapped.clone()) {
                gamma.push(wrapped);
            }
        }
        let gamma_index = gamma
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        let sub_set = sub.iter().cloned().collect();
        ClosureBasis {
            root,
            sub,
            gamma,
            gamma_index,
            sub_set,
        }
    }

    pub fn root(&self) -> &Formula {
        &self.root
    }

    pub fn sub(&self) -> &[Formula] {
        &self.sub
    }

    pub fn gamma(&self) -> &[Formula] {
        &self.gamma
    }

    pub fn gamma_len(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma_index(&self, f: &Formula) -> Option<usize> {
        self.gamma_index.get(f).copied()
    }

    pub fn gamma_contains(&self, f: &Formula) -> bool {
        self.gamma_index.contains_key(f)
    }

    pub fn sub_contains(&self, f: &Formula) -> bool {
        self.sub_set.contains(f)
    }
}

/// Convenience constructor mirroring [`ClosureBasis::new`].
pub fn closure_basis(root: Formula) -> ClosureBasis {
    ClosureBasis::new(root)
}

/// Membership in Σ, the prefix extension of Γ:
/// Σ = Sub(A) ∪ { ([]<>)ⁿ[]B, <>([]<>)ⁿ[]B | []B ∈ Γ }
///            ∪ { (<>[])ⁿ<>B, [](<>[])ⁿ<>B | <>B ∈ Γ }.
///
/// Decided by stripping alternating two-symbol prefixes, which strictly
/// shortens the formula.
pub fn in_sigma(basis: &ClosureBasis, f: &Formula) -> bool {
    if basis.sub_contains(f) {
        return true;
    }
    match f {
        Formula::Down(inner) => in_down_family(basis, f) || in_up_family(basis, inner),
        Formula::Up(inner) => in_up_family(basis, f) || in_down_family(basis, inner),
        _ => false,
    }
}

/// `([]<>)ⁿ[]B` for some `n ≥ 0` with `[]B ∈ Γ`.
fn in_down_family(basis: &ClosureBasis, f: &Formula) -> bool {
    let Formula::Down(inner) = f else {
        return false;
    };
    if basis.gamma_contains(f) {
        return true;
    }
    match inner.as_ref() {
        Formula::Up(rest) => in_down_family(basis, rest),
        _ => false,
    }
}

/// `(<>[])ⁿ<>B` for some `n ≥ 0` with `<>B ∈ Γ`.
fn in_up_family(basis: &ClosureBasis, f: &Formula) -> bool {
    let Formula::Up(inner) = f else {
        return false;
    };
    if basis.gamma_contains(f) {
        return true;
    }
    match inner.as_ref() {
        Formula::Down(rest) => in_up_family(basis, rest),
        _ => false,
    }
}

/// Collapse the leading modal prefix to a fixpoint: `<>[]<>X ⇒ <>X` and
/// `[]<>[]X ⇒ []X`. Each step removes two symbols, so this terminates; the
/// two rules have distinct heads, so the result is unique. The logic proves
/// the input equivalent to the output.
pub fn normalize(f: &Formula) -> Formula {
    let mut cur = f.clone();
    loop {
        cur = match cur {
            Formula::Up(a) => match *a {
                Formula::Down(b) => match *b {
                    Formula::Up(c) => Formula::Up(c),
                    other => return Formula::up(Formula::Down(Box::new(other))),
                },
                other => return Formula::Up(Box::new(other)),
            },
            Formula::Down(a) => match *a {
                Formula::Up(b) => match *b {
                    Formula::Down(c) => Formula::Down(c),
                    other => return Formula::down(Formula::Up(Box::new(other))),
                },
                other => return Formula::Down(Box::new(other)),
            },
            other => return other,
        };
    }
}

/// The unique Γ representative of a Σ member: [`normalize`] plus membership
/// checks against the basis.
pub fn star(basis: &ClosureBasis, f: &Formula) -> Result<Formula, FormulaError> {
    if !in_sigma(basis, f) {
        return Err(FormulaError::NotInSigma(render(f)));
    }
    let n = normalize(f);
    if !basis.gamma_contains(&n) {
        return Err(FormulaError::NormalFormOutsideGamma(render(&n)));
    }
    Ok(n)
}
