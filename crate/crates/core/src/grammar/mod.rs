//! Building construction grammars: rule files in BNF notation.
//!
//! ```text
//! <building> ::= <base> <main> <roofs>
//! <base> ::= wall floor | wall | floor
//! ```
//!
//! Angle-bracketed names are non-terminals, bare names are elements, `|`
//! separates alternatives and `#` starts a comment. A production's
//! alternatives may continue over several lines; it ends where the next
//! `<name> ::=` begins. Empty alternatives are not supported.

mod lexer;
mod parser;
mod recognize;
mod validate;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::element::Element;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{format_grammar, parse_grammar};
pub use recognize::recognize;
pub use validate::{validate_grammar, Diagnostic, DiagnosticKind, Severity};

/// The conventional start symbol.
pub const DEFAULT_START: &str = "building";

/// A terminal sequence: what a grammar derives and what gets laid out.
pub type ElementSequence = Vec<Element>;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    NonTerminal(String),
    Terminal(Element),
}

impl Symbol {
    pub fn nt(name: &str) -> Symbol {
        Symbol::NonTerminal(name.to_string())
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::NonTerminal(n) => write!(f, "<{n}>"),
            Symbol::Terminal(e) => write!(f, "{e}"),
        }
    }
}

/// One rule: a non-terminal and its alternatives, in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: String,
    pub alternatives: Vec<Vec<Symbol>>,
}

impl Production {
    pub fn is_recursive_alt(&self, alt: usize) -> bool {
        self.alternatives[alt]
            .iter()
            .any(|s| matches!(s, Symbol::NonTerminal(n) if *n == self.lhs))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("{pos}: illegal character {ch:?}")]
    IllegalCharacter { ch: char, pos: Pos },
    #[error("{pos}: unterminated non-terminal name")]
    UnterminatedAngleName { pos: Pos },
    #[error("{pos}: expected {}, found {found}", expected.join(" or "))]
    SyntaxError {
        pos: Pos,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("{pos}: duplicate production for <{name}>")]
    DuplicateLhs { name: String, pos: Pos },
    #[error("{pos}: unknown element `{name}`")]
    UnknownTerminal { name: String, pos: Pos },
    #[error("grammar has no productions")]
    Empty,
}

impl GrammarError {
    pub fn pos(&self) -> Option<Pos> {
        match self {
            GrammarError::IllegalCharacter { pos, .. }
            | GrammarError::UnterminatedAngleName { pos }
            | GrammarError::SyntaxError { pos, .. }
            | GrammarError::DuplicateLhs { pos, .. }
            | GrammarError::UnknownTerminal { pos, .. } => Some(*pos),
            GrammarError::Empty => None,
        }
    }
}

/// A parsed rule set. Equality is structural and ignores source positions.
#[derive(Clone, Debug)]
pub struct Grammar {
    productions: Vec<Production>,
    start: String,
    index: HashMap<String, usize>,
    origins: HashMap<String, Pos>,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.productions == other.productions && self.start == other.start
    }
}

impl Eq for Grammar {}

impl Grammar {
    /// Builds a grammar from productions. The start symbol is `<building>`
    /// when present, else the first production's lhs.
    pub fn new(productions: Vec<Production>) -> Result<Grammar, GrammarError> {
        Self::with_origins(productions, HashMap::new())
    }

    pub(crate) fn with_origins(
        productions: Vec<Production>,
        origins: HashMap<String, Pos>,
    ) -> Result<Grammar, GrammarError> {
        if productions.is_empty() {
            return Err(GrammarError::Empty);
        }
        let mut index = HashMap::new();
        for (i, p) in productions.iter().enumerate() {
            if index.insert(p.lhs.clone(), i).is_some() {
                let pos = origins.get(&p.lhs).copied().unwrap_or(Pos { line: 0, col: 0 });
                return Err(GrammarError::DuplicateLhs {
                    name: p.lhs.clone(),
                    pos,
                });
            }
        }
        let start = if index.contains_key(DEFAULT_START) {
            DEFAULT_START.to_string()
        } else {
            productions[0].lhs.clone()
        };
        Ok(Grammar {
            productions,
            start,
            index,
            origins,
        })
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn production(&self, lhs: &str) -> Option<&Production> {
        self.index.get(lhs).map(|&i| &self.productions[i])
    }

    /// Where the production for `lhs` was defined, if parsed from text.
    pub fn origin(&self, lhs: &str) -> Option<Pos> {
        self.origins.get(lhs).copied()
    }

    /// True when every production has exactly one alternative.
    pub fn is_deterministic(&self) -> bool {
        self.productions.iter().all(|p| p.alternatives.len() == 1)
    }

    pub(crate) fn compile(&self) -> Result<Compiled, String> {
        let mut alts = Vec::with_capacity(self.productions.len());
        for p in &self.productions {
            let mut compiled_alts = Vec::with_capacity(p.alternatives.len());
            for alt in &p.alternatives {
                let mut syms = Vec::with_capacity(alt.len());
                for s in alt {
                    syms.push(match s {
                        Symbol::Terminal(e) => Sym::T(*e),
                        Symbol::NonTerminal(n) => Sym::N(*self.index.get(n).ok_or_else(|| n.clone())?),
                    });
                }
                compiled_alts.push(syms);
            }
            alts.push(compiled_alts);
        }
        let cheapest = cheapest_table(&alts);
        Ok(Compiled {
            names: self.productions.iter().map(|p| p.lhs.clone()).collect(),
            start: self.index[&self.start],
            alts,
            cheapest,
        })
    }
}

/// Parse tree; terminals are leaves, non-terminal nodes record which
/// alternative they expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTree {
    pub symbol: Symbol,
    pub alternative: Option<usize>,
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaf(e: Element) -> ParseTree {
        ParseTree {
            symbol: Symbol::Terminal(e),
            alternative: None,
            children: Vec::new(),
        }
    }

    pub fn node(name: &str, alternative: usize, children: Vec<ParseTree>) -> ParseTree {
        ParseTree {
            symbol: Symbol::nt(name),
            alternative: Some(alternative),
            children,
        }
    }

    /// Left-to-right terminal leaves.
    pub fn frontier(&self) -> ElementSequence {
        let mut out = Vec::new();
        self.collect_frontier(&mut out);
        out
    }

    fn collect_frontier(&self, out: &mut ElementSequence) {
        match &self.symbol {
            Symbol::Terminal(e) => out.push(*e),
            Symbol::NonTerminal(_) => {
                for c in &self.children {
                    c.collect_frontier(out);
                }
            }
        }
    }

    /// Checks that each node's children spell out the recorded alternative.
    pub fn conforms_to(&self, g: &Grammar) -> bool {
        match (&self.symbol, self.alternative) {
            (Symbol::Terminal(_), None) => self.children.is_empty(),
            (Symbol::NonTerminal(name), Some(alt)) => {
                let Some(p) = g.production(name) else {
                    return false;
                };
                let Some(expected) = p.alternatives.get(alt) else {
                    return false;
                };
                expected.len() == self.children.len()
                    && expected
                        .iter()
                        .zip(&self.children)
                        .all(|(s, c)| *s == c.symbol && c.conforms_to(g))
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Sym {
    T(Element),
    N(usize),
}

/// Index-based grammar used by the derivation and recognition algorithms.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub names: Vec<String>,
    pub start: usize,
    pub alts: Vec<Vec<Vec<Sym>>>,
    /// Per non-terminal: the alternative with the smallest terminal yield,
    /// ties broken by derivation height, then source order. `None` means
    /// the symbol never terminates.
    pub cheapest: Vec<Option<Cheapest>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Cheapest {
    pub min_yield: usize,
    pub height: usize,
    pub alt: usize,
}

impl Compiled {
    pub fn min_yield(&self, s: Sym) -> Option<usize> {
        match s {
            Sym::T(_) => Some(1),
            Sym::N(n) => self.cheapest[n].map(|c| c.min_yield),
        }
    }

    pub fn min_yield_of(&self, syms: &[Sym]) -> Option<usize> {
        syms.iter().map(|&s| self.min_yield(s)).sum()
    }

    pub fn is_recursive(&self, nt: usize, alt: usize) -> bool {
        self.alts[nt][alt].contains(&Sym::N(nt))
    }
}

/// Fixed point over (yield, height), compared lexicographically. Choosing
/// the recorded alternative strictly lowers the height of every
/// non-terminal it introduces, so cheapest-first expansion terminates.
fn cheapest_table(alts: &[Vec<Vec<Sym>>]) -> Vec<Option<Cheapest>> {
    let mut table: Vec<Option<Cheapest>> = vec![None; alts.len()];
    loop {
        let mut changed = false;
        for (nt, nt_alts) in alts.iter().enumerate() {
            for (ai, alt) in nt_alts.iter().enumerate() {
                let mut total = 0usize;
                let mut height = 0usize;
                let mut ok = true;
                for s in alt {
                    match *s {
                        Sym::T(_) => total += 1,
                        Sym::N(m) => match table[m] {
                            Some(c) => {
                                total += c.min_yield;
                                height = height.max(c.height + 1);
                            }
                            None => {
                                ok = false;
                                break;
                            }
                        },
                    }
                }
                if !ok {
                    continue;
                }
                let better = match table[nt] {
                    None => true,
                    Some(c) => (total, height) < (c.min_yield, c.height),
                };
                if better {
                    table[nt] = Some(Cheapest {
                        min_yield: total,
                        height,
                        alt: ai,
                    });
                    changed = true;
                }
            }
        }
        if !changed {
            return table;
        }
    }
}
