//! Producing element sequences from a grammar.
//!
//! Three strategies share the same leftmost expansion order:
//!
//! * [`derive_deterministic`] for rule files where every production has one
//!   alternative (a fixed building);
//! * [`derive_random`] for grammars with choices, driven by [`Rng`];
//! * [`derive_all`], a bounded breadth-first enumeration used as a test
//!   oracle and for small-language inspection.
//!
//! # Random derivation policy
//!
//! Non-terminals are expanded leftmost-first. A random draw is made only when
//! a production has more than one alternative. Each terminating alternative
//! has weight 1, multiplied by `recursion_dampening^d` when the alternative
//! mentions its own left-hand side, where `d` is the number of enclosing
//! expansions of that same non-terminal. Once `max_expansions` expansions
//! have been made, or the drawn alternative would push the shortest possible
//! completion past `max_sequence_length`, the derivation switches for good
//! to cheapest completion: every remaining non-terminal takes the
//! alternative with the smallest minimal yield (ties by derivation height,
//! then source order).

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::element::{Element, Part};
use crate::grammar::{Compiled, ElementSequence, Grammar, ParseTree, Sym, Symbol};
use crate::rng::Rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("<{0}> has more than one alternative")]
    NotDeterministic(String),
    #[error("<{0}> never derives a finite element sequence")]
    NonProductive(String),
    #[error("<{0}> is referenced but has no production")]
    Dangling(String),
    #[error("more than {0} sentential forms explored")]
    LimitExceeded(usize),
    #[error("exhaustive derivation is limited to length {max}, got {requested}")]
    LengthTooLarge { requested: usize, max: usize },
    #[error("invalid derivation limits: {0}")]
    InvalidLimits(&'static str),
    #[error("malformed building tree: {0}")]
    MalformedTree(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivationLimits {
    pub max_expansions: usize,
    pub max_sequence_length: usize,
    pub recursion_dampening: f64,
}

impl Default for DerivationLimits {
    fn default() -> Self {
        DerivationLimits {
            max_expansions: 256,
            max_sequence_length: 64,
            recursion_dampening: 0.5,
        }
    }
}

impl DerivationLimits {
    pub fn validate(&self) -> Result<(), DerivationError> {
        if self.max_expansions < 1 {
            return Err(DerivationError::InvalidLimits("max_expansions must be at least 1"));
        }
        if self.max_sequence_length < 1 {
            return Err(DerivationError::InvalidLimits("max_sequence_length must be at least 1"));
        }
        if !(self.recursion_dampening > 0.0 && self.recursion_dampening <= 1.0) {
            return Err(DerivationError::InvalidLimits("recursion_dampening must be in (0, 1]"));
        }
        Ok(())
    }
}

fn compile(g: &Grammar) -> Result<Compiled, DerivationError> {
    g.compile().map_err(DerivationError::Dangling)
}

fn require_productive(c: &Compiled) -> Result<(), DerivationError> {
    match c.cheapest[c.start] {
        Some(_) => Ok(()),
        None => Err(DerivationError::NonProductive(c.names[c.start].clone())),
    }
}

/// Derivation tree of a single-alternative grammar.
pub fn derive_deterministic_tree(g: &Grammar) -> Result<ParseTree, DerivationError> {
    if let Some(p) = g.productions().iter().find(|p| p.alternatives.len() != 1) {
        return Err(DerivationError::NotDeterministic(p.lhs.clone()));
    }
    let c = compile(g)?;
    require_productive(&c)?;
    // productive + single alternative: the cheapest alternative is the only one
    Ok(cheapest_tree(&c, c.start))
}

/// The unique sequence of a single-alternative grammar.
pub fn derive_deterministic(g: &Grammar) -> Result<ElementSequence, DerivationError> {
    derive_deterministic_tree(g).map(|t| t.frontier())
}

fn cheapest_tree(c: &Compiled, nt: usize) -> ParseTree {
    let alt = c.cheapest[nt].expect("productive").alt;
    let children = c.alts[nt][alt]
        .iter()
        .map(|&s| match s {
            Sym::T(e) => ParseTree::leaf(e),
            Sym::N(m) => cheapest_tree(c, m),
        })
        .collect();
    ParseTree::node(&c.names[nt], alt, children)
}

struct RandomDerivation<'a> {
    c: &'a Compiled,
    limits: DerivationLimits,
    rng: Rng,
    emitted: usize,
    expansions: usize,
    cheapest_mode: bool,
    open: Vec<usize>,
}

impl RandomDerivation<'_> {
    fn choose(&mut self, nt: usize, pending_right: usize) -> usize {
        let alts = &self.c.alts[nt];
        if !self.cheapest_mode && self.expansions >= self.limits.max_expansions {
            self.cheapest_mode = true;
        }
        if !self.cheapest_mode && alts.len() > 1 {
            let depth = self.open[nt];
            let weights: Vec<f64> = (0..alts.len())
                .map(|a| match self.c.min_yield_of(&alts[a]) {
                    None => 0.0,
                    Some(_) if self.c.is_recursive(nt, a) => {
                        self.limits.recursion_dampening.powi(depth as i32)
                    }
                    Some(_) => 1.0,
                })
                .collect();
            let a = self.rng.weighted(&weights);
            let projected = self.emitted + pending_right + self.c.min_yield_of(&alts[a]).unwrap();
            if projected <= self.limits.max_sequence_length {
                return a;
            }
            self.cheapest_mode = true;
        }
        self.c.cheapest[nt].expect("productive").alt
    }

    fn expand(&mut self, nt: usize, pending_right: usize) -> ParseTree {
        let alt = self.choose(nt, pending_right);
        self.expansions += 1;
        self.open[nt] += 1;
        let syms = &self.c.alts[nt][alt];
        let mut children = Vec::with_capacity(syms.len());
        for (t, &s) in syms.iter().enumerate() {
            match s {
                Sym::T(e) => {
                    self.emitted += 1;
                    children.push(ParseTree::leaf(e));
                }
                Sym::N(m) => {
                    let right = pending_right + self.c.min_yield_of(&syms[t + 1..]).unwrap();
                    children.push(self.expand(m, right));
                }
            }
        }
        self.open[nt] -= 1;
        ParseTree::node(&self.c.names[nt], alt, children)
    }
}

/// Seeded random derivation tree. A pure function of its arguments.
pub fn derive_random_tree(g: &Grammar, seed: u64, limits: &DerivationLimits) -> Result<ParseTree, DerivationError> {
    limits.validate()?;
    let c = compile(g)?;
    require_productive(&c)?;
    let mut d = RandomDerivation {
        c: &c,
        limits: *limits,
        rng: Rng::new(seed),
        emitted: 0,
        expansions: 0,
        cheapest_mode: false,
        open: vec![0; c.alts.len()],
    };
    Ok(d.expand(c.start, 0))
}

pub fn derive_random(g: &Grammar, seed: u64, limits: &DerivationLimits) -> Result<ElementSequence, DerivationError> {
    derive_random_tree(g, seed, limits).map(|t| t.frontier())
}

/// Longest sequence [`derive_all`] accepts.
pub const DERIVE_ALL_MAX_LEN: usize = 20;
/// Default cap on distinct sentential forms explored by [`derive_all`].
pub const DERIVE_ALL_CAP: usize = 1_000_000;

/// Every derivable sequence of length at most `max_len`.
pub fn derive_all(g: &Grammar, max_len: usize) -> Result<BTreeSet<ElementSequence>, DerivationError> {
    derive_all_with_cap(g, max_len, DERIVE_ALL_CAP)
}

/// Breadth-first over leftmost sentential forms, pruning any form whose
/// minimal yield already exceeds `max_len`.
pub fn derive_all_with_cap(
    g: &Grammar,
    max_len: usize,
    cap: usize,
) -> Result<BTreeSet<ElementSequence>, DerivationError> {
    if max_len > DERIVE_ALL_MAX_LEN {
        return Err(DerivationError::LengthTooLarge {
            requested: max_len,
            max: DERIVE_ALL_MAX_LEN,
        });
    }
    let mut out = BTreeSet::new();
    if max_len == 0 {
        return Ok(out);
    }
    let c = compile(g)?;
    let start = vec![Sym::N(c.start)];
    if c.min_yield_of(&start).is_none_or(|y| y > max_len) {
        return Ok(out);
    }
    let mut seen: HashSet<Vec<Sym>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(form) = queue.pop_front() {
        let Some(at) = form.iter().position(|s| matches!(s, Sym::N(_))) else {
            out.insert(
                form.iter()
                    .map(|s| match s {
                        Sym::T(e) => *e,
                        Sym::N(_) => unreachable!(),
                    })
                    .collect(),
            );
            continue;
        };
        let Sym::N(nt) = form[at] else { unreachable!() };
        for alt in &c.alts[nt] {
            let mut next = Vec::with_capacity(form.len() + alt.len() - 1);
            next.extend_from_slice(&form[..at]);
            next.extend_from_slice(alt);
            next.extend_from_slice(&form[at + 1..]);
            match c.min_yield_of(&next) {
                Some(y) if y <= max_len => {}
                _ => continue,
            }
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= cap {
                return Err(DerivationError::LimitExceeded(cap));
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    Ok(out)
}

/// A derived building split into its three vertical bands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingPlan {
    pub base: ElementSequence,
    pub main: ElementSequence,
    pub roofs: ElementSequence,
    pub source_tree: ParseTree,
}

impl BuildingPlan {
    /// All elements, bottom band first.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.base.iter().chain(&self.main).chain(&self.roofs).copied()
    }

    pub fn len(&self) -> usize {
        self.base.len() + self.main.len() + self.roofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The distinct element kinds used, in canonical element order.
    pub fn kinds(&self) -> BTreeSet<Element> {
        self.elements().collect()
    }

    pub fn part(&self, part: Part) -> &[Element] {
        match part {
            Part::Base => &self.base,
            Part::Main => &self.main,
            Part::Roofs => &self.roofs,
        }
    }

    /// Band vocabulary, beam-framed main row, toproof last-only.
    pub fn check(&self) -> Result<(), String> {
        for part in [Part::Base, Part::Main, Part::Roofs] {
            let seq = self.part(part);
            if seq.is_empty() {
                return Err(format!("{part} is empty"));
            }
            if let Some(e) = seq.iter().find(|e| e.part() != part) {
                return Err(format!("{e} cannot appear in {part}"));
            }
        }
        if self.main.first() != Some(&Element::Beam) || self.main.last() != Some(&Element::Beam) {
            return Err("main must start and end with beam".into());
        }
        let toproofs = self.roofs.iter().filter(|e| **e == Element::Toproof).count();
        if toproofs > 1 || (toproofs == 1 && self.roofs.last() != Some(&Element::Toproof)) {
            return Err("toproof may only appear once, as the last roof element".into());
        }
        let frontier = self.source_tree.frontier();
        if !frontier.iter().copied().eq(self.elements()) {
            return Err("bands do not concatenate to the tree frontier".into());
        }
        Ok(())
    }
}

const PART_SYMBOLS: [&str; 3] = ["base", "main", "roofs"];

/// Splits a `<building> ::= <base> <main> <roofs>` tree into its bands.
pub fn to_building_plan(tree: &ParseTree) -> Result<BuildingPlan, DerivationError> {
    let malformed = |msg: String| Err(DerivationError::MalformedTree(msg));
    match &tree.symbol {
        Symbol::NonTerminal(n) if n == crate::grammar::DEFAULT_START => {}
        other => return malformed(format!("root is {other}, expected <building>")),
    }
    let shape: Vec<_> = tree.children.iter().map(|c| &c.symbol).collect();
    let expected: Vec<Symbol> = PART_SYMBOLS.iter().map(|n| Symbol::nt(n)).collect();
    if shape.len() != 3 || shape.iter().zip(&expected).any(|(a, b)| *a != b) {
        let got: Vec<String> = shape.iter().map(|s| s.to_string()).collect();
        return malformed(format!("<building> expands to [{}], expected <base> <main> <roofs>", got.join(" ")));
    }
    let plan = BuildingPlan {
        base: tree.children[0].frontier(),
        main: tree.children[1].frontier(),
        roofs: tree.children[2].frontier(),
        source_tree: tree.clone(),
    };
    plan.check().map_err(DerivationError::MalformedTree)?;
    Ok(plan)
}

/// Derives a plan: the fixed structure for single-alternative grammars,
/// otherwise a seeded random one.
pub fn derive_plan(g: &Grammar, seed: u64, limits: &DerivationLimits) -> Result<BuildingPlan, DerivationError> {
    let tree = if g.is_deterministic() {
        derive_deterministic_tree(g)?
    } else {
        derive_random_tree(g, seed, limits)?
    };
    to_building_plan(&tree)
}
