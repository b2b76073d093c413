use std::collections::{HashSet, VecDeque};
use std::fmt;

use super::{Grammar, Pos, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// `name` is used on a right-hand side but never defined.
    Dangling { name: String, used_by: String },
    /// `name` cannot derive any finite element sequence.
    NonProductive(String),
    /// `name` is defined but not reachable from the start symbol.
    Unreachable(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub pos: Option<Pos>,
}

impl Diagnostic {
    pub fn severity(&self) -> Severity {
        match self.kind {
            DiagnosticKind::Unreachable(_) => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity() {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match &self.kind {
            DiagnosticKind::Dangling { name, used_by } => {
                write!(f, "{level}: <{name}> is used by <{used_by}> but has no production")
            }
            DiagnosticKind::NonProductive(n) => {
                write!(f, "{level}: <{n}> never derives a finite element sequence")
            }
            DiagnosticKind::Unreachable(n) => {
                write!(f, "{level}: <{n}> is unreachable from the start symbol")
            }
        }
    }
}

/// Reports dangling references, non-productive symbols and unreachable
/// productions, in that order. An empty result means the grammar is sound.
pub fn validate_grammar(g: &Grammar) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen_dangling = HashSet::new();
    for p in g.productions() {
        for alt in &p.alternatives {
            for s in alt {
                if let Symbol::NonTerminal(n) = s {
                    if g.production(n).is_none() && seen_dangling.insert(n.clone()) {
                        out.push(Diagnostic {
                            kind: DiagnosticKind::Dangling {
                                name: n.clone(),
                                used_by: p.lhs.clone(),
                            },
                            pos: g.origin(&p.lhs),
                        });
                    }
                }
            }
        }
    }

    // productive: some alternative made of terminals and productive symbols
    let mut productive: HashSet<&str> = HashSet::new();
    loop {
        let before = productive.len();
        for p in g.productions() {
            if productive.contains(p.lhs.as_str()) {
                continue;
            }
            let ok = p.alternatives.iter().any(|alt| {
                alt.iter().all(|s| match s {
                    Symbol::Terminal(_) => true,
                    Symbol::NonTerminal(n) => productive.contains(n.as_str()),
                })
            });
            if ok {
                productive.insert(p.lhs.as_str());
            }
        }
        if productive.len() == before {
            break;
        }
    }
    for p in g.productions() {
        if !productive.contains(p.lhs.as_str()) {
            out.push(Diagnostic {
                kind: DiagnosticKind::NonProductive(p.lhs.clone()),
                pos: g.origin(&p.lhs),
            });
        }
    }

    let mut reachable: HashSet<&str> = HashSet::from([g.start()]);
    let mut queue = VecDeque::from([g.start()]);
    while let Some(n) = queue.pop_front() {
        let Some(p) = g.production(n) else { continue };
        for s in p.alternatives.iter().flatten() {
            if let Symbol::NonTerminal(m) = s {
                if reachable.insert(m.as_str()) {
                    queue.push_back(m.as_str());
                }
            }
        }
    }
    for p in g.productions() {
        if !reachable.contains(p.lhs.as_str()) {
            out.push(Diagnostic {
                kind: DiagnosticKind::Unreachable(p.lhs.clone()),
                pos: g.origin(&p.lhs),
            });
        }
    }

    out
}
