//! Level-space counting for bundles of fixed rules.
//!
//! A level is identified by `(rule id, StyleAssignment)`. The closed form
//! multiplies per-element choice counts taken from the catalog's
//! `(element, style)` tallies; [`enumerate_levels`] walks the cartesian
//! product directly and serves as its oracle.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::derive::{derive_deterministic, DerivationError};
use crate::element::Element;
use crate::grammar::{parse_grammar, validate_grammar, Grammar, GrammarError};
use crate::style::{ModelCatalog, ModelRef, StyleAssignment, StyleError, StyleMode, StyleTag};

pub const MANIFEST: &str = "ruleset.json";

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub id: String,
    pub grammar: Grammar,
    /// Path as written in the manifest, if loaded from disk.
    pub file: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet {
    pub name: String,
    pub mode: StyleMode,
    pub rules: Vec<Rule>,
    /// A published total to compare against, if the manifest carries one.
    pub reference_total: Option<u64>,
}

#[derive(Debug, Error)]
pub enum RuleSetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}: no {MANIFEST} in rule-set directory")]
    MissingManifest(PathBuf),
    #[error("{path}: manifest: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("rule `{rule}`: {source}")]
    Grammar { rule: String, source: GrammarError },
    #[error("rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: String },
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),
    #[error("rule set `{0}` has no rules")]
    Empty(String),
}

impl RuleSetError {
    pub fn is_io(&self) -> bool {
        matches!(self, RuleSetError::Io { .. })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error(transparent)]
    Style(#[from] StyleError),
    #[error("rule `{rule}`: {source}")]
    Derivation { rule: String, source: DerivationError },
    #[error("level space exceeds the cap of {0}")]
    CapExceeded(usize),
    #[error("level count overflows 64 bits")]
    Overflow,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    name: String,
    mode: StyleMode,
    rules: Vec<ManifestRule>,
    #[serde(default)]
    reference_total: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestRule {
    id: String,
    file: String,
}

impl RuleSet {
    /// Checks that every rule is sound and fixed (one alternative per
    /// production) and that rule ids are unique.
    pub fn new(
        name: impl Into<String>,
        mode: StyleMode,
        rules: Vec<Rule>,
        reference_total: Option<u64>,
    ) -> Result<RuleSet, RuleSetError> {
        let mut ids = HashSet::new();
        for r in &rules {
            if !ids.insert(r.id.as_str()) {
                return Err(RuleSetError::DuplicateRuleId(r.id.clone()));
            }
            if let Some(d) = validate_grammar(&r.grammar).into_iter().find(|d| d.is_error()) {
                return Err(RuleSetError::InvalidRule {
                    rule: r.id.clone(),
                    reason: d.to_string(),
                });
            }
            derive_deterministic(&r.grammar).map_err(|e| RuleSetError::InvalidRule {
                rule: r.id.clone(),
                reason: e.to_string(),
            })?;
        }
        Ok(RuleSet {
            name: name.into(),
            mode,
            rules,
            reference_total,
        })
    }

    /// Reads `ruleset.json` and the rule files it lists from `dir`.
    pub fn load_dir(dir: &Path) -> Result<RuleSet, RuleSetError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| RuleSetError::Io { path, source }
        };
        fs::read_dir(dir).map_err(io_err(dir))?;
        let manifest_path = dir.join(MANIFEST);
        if !manifest_path.is_file() {
            return Err(RuleSetError::MissingManifest(dir.to_path_buf()));
        }
        let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let doc: ManifestDoc = serde_json::from_str(&text).map_err(|e| RuleSetError::Manifest {
            path: manifest_path.clone(),
            message: e.to_string(),
        })?;
        if doc.rules.is_empty() {
            return Err(RuleSetError::Empty(doc.name));
        }
        let mut rules = Vec::with_capacity(doc.rules.len());
        for r in doc.rules {
            let path = dir.join(&r.file);
            let src = fs::read_to_string(&path).map_err(io_err(&path))?;
            let grammar = parse_grammar(&src).map_err(|source| RuleSetError::Grammar {
                rule: r.id.clone(),
                source,
            })?;
            rules.push(Rule {
                id: r.id,
                grammar,
                file: Some(r.file),
            });
        }
        RuleSet::new(doc.name, doc.mode, rules, doc.reference_total)
    }
}

/// Directory of a rule-set bundle shipped with this crate.
pub fn bundled_ruleset_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("rulesets").join(name)
}

/// Element kinds that appear in the fixed building of `g`.
pub fn elements_used(g: &Grammar) -> Result<BTreeSet<Element>, DerivationError> {
    Ok(derive_deterministic(g)?.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpaceCount {
    pub per_rule: Vec<(String, u64)>,
    pub total: u64,
}

/// Number of admissible model choices for one element under a mode,
/// from the catalog's per-style tallies.
pub fn choice_count(c: &ModelCatalog, element: Element, mode: StyleMode) -> usize {
    match mode {
        StyleMode::PureChinese => c.count(element, StyleTag::Chinese) + c.count(element, StyleTag::Common),
        StyleMode::PureJapanese => c.count(element, StyleTag::Japanese) + c.count(element, StyleTag::Common),
        StyleMode::Composite if element.is_styled() => {
            c.count(element, StyleTag::Chinese) + c.count(element, StyleTag::Japanese)
        }
        StyleMode::Composite => c.count(element, StyleTag::Common),
    }
}

/// Per rule: product of choice counts over the elements it uses.
pub fn count_closed_form(rs: &RuleSet, c: &ModelCatalog) -> Result<LevelSpaceCount, EnumerationError> {
    let mut per_rule = Vec::with_capacity(rs.rules.len());
    let mut total: u64 = 0;
    for rule in &rs.rules {
        let used = elements_used(&rule.grammar).map_err(|source| EnumerationError::Derivation {
            rule: rule.id.clone(),
            source,
        })?;
        let mut n: u64 = 1;
        for e in used {
            let k = choice_count(c, e, rs.mode);
            if k == 0 {
                return Err(StyleError::NoAdmissibleModel { element: e, mode: rs.mode }.into());
            }
            n = n.checked_mul(k as u64).ok_or(EnumerationError::Overflow)?;
        }
        total = total.checked_add(n).ok_or(EnumerationError::Overflow)?;
        per_rule.push((rule.id.clone(), n));
    }
    Ok(LevelSpaceCount { per_rule, total })
}

/// Streams every `(rule id, assignment)` pair: rules in order, then an
/// odometer over element kinds in canonical order (the first kind is the
/// most significant digit), each digit running over models in catalog
/// order. After `cap` items, yields `CapExceeded` if anything remains.
pub fn enumerate_levels<'a>(rs: &'a RuleSet, c: &'a ModelCatalog, cap: usize) -> LevelStream<'a> {
    LevelStream {
        rs,
        catalog: c,
        cap,
        yielded: 0,
        rule: 0,
        digits: None,
        done: false,
    }
}

pub struct LevelStream<'a> {
    rs: &'a RuleSet,
    catalog: &'a ModelCatalog,
    cap: usize,
    yielded: usize,
    rule: usize,
    digits: Option<Odometer<'a>>,
    done: bool,
}

struct Odometer<'a> {
    columns: Vec<(Element, Vec<&'a ModelRef>)>,
    index: Vec<usize>,
    exhausted: bool,
}

impl<'a> Odometer<'a> {
    fn current(&self) -> StyleAssignment {
        StyleAssignment::new(
            self.columns
                .iter()
                .zip(&self.index)
                .map(|((e, models), &i)| (*e, models[i].clone()))
                .collect(),
        )
    }

    fn advance(&mut self) {
        for pos in (0..self.columns.len()).rev() {
            self.index[pos] += 1;
            if self.index[pos] < self.columns[pos].1.len() {
                return;
            }
            self.index[pos] = 0;
        }
        self.exhausted = true;
    }
}

impl<'a> LevelStream<'a> {
    fn open_rule(&self, rule: usize) -> Result<Odometer<'a>, EnumerationError> {
        let r = &self.rs.rules[rule];
        let used = elements_used(&r.grammar).map_err(|source| EnumerationError::Derivation {
            rule: r.id.clone(),
            source,
        })?;
        let mode = self.rs.mode;
        let mut columns = Vec::with_capacity(used.len());
        for e in used {
            let models: Vec<&ModelRef> = self
                .catalog
                .models()
                .iter()
                .filter(|m| m.element == e && mode.admits(m))
                .collect();
            if models.is_empty() {
                return Err(StyleError::NoAdmissibleModel { element: e, mode }.into());
            }
            columns.push((e, models));
        }
        let index = vec![0; columns.len()];
        Ok(Odometer {
            columns,
            index,
            exhausted: false,
        })
    }
}

impl Iterator for LevelStream<'_> {
    type Item = Result<(String, StyleAssignment), EnumerationError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            if self.digits.as_ref().is_none_or(|d| d.exhausted) {
                if self.digits.is_some() {
                    self.rule += 1;
                }
                if self.rule >= self.rs.rules.len() {
                    self.done = true;
                    return None;
                }
                match self.open_rule(self.rule) {
                    Ok(d) => self.digits = Some(d),
                    Err(e) => {
                        self.done = true;
                        return Some(Err(e));
                    }
                }
            }
            let digits = self.digits.as_mut().unwrap();
            if digits.exhausted {
                continue;
            }
            if self.yielded == self.cap {
                self.done = true;
                return Some(Err(EnumerationError::CapExceeded(self.cap)));
            }
            let item = (self.rs.rules[self.rule].id.clone(), digits.current());
            digits.advance();
            self.yielded += 1;
            return Some(Ok(item));
        }
    }
}
