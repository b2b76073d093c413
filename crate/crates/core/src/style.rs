//! Styled model inventory and per-level model assignment.
//!
//! A *style* is Chinese, Japanese or Common; a *model* is one concrete asset
//! of an element in a style. Within a level every occurrence of an element
//! uses the same model.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derive::BuildingPlan;
use crate::element::Element;
use crate::fixed::Centi;
use crate::rng::Rng;

pub const BUNDLED_CATALOG: &str = include_str!("../data/catalog.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StyleTag {
    Chinese,
    Japanese,
    Common,
}

impl StyleTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StyleTag::Chinese => "chinese",
            StyleTag::Japanese => "japanese",
            StyleTag::Common => "common",
        }
    }
}

impl fmt::Display for StyleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StyleMode {
    #[serde(rename = "chinese")]
    PureChinese,
    #[serde(rename = "japanese")]
    PureJapanese,
    #[serde(rename = "composite")]
    Composite,
}

impl StyleMode {
    pub const ALL: [StyleMode; 3] = [StyleMode::PureChinese, StyleMode::PureJapanese, StyleMode::Composite];

    pub fn as_str(self) -> &'static str {
        match self {
            StyleMode::PureChinese => "chinese",
            StyleMode::PureJapanese => "japanese",
            StyleMode::Composite => "composite",
        }
    }

    /// Whether `model` may stand for its element in this mode.
    pub fn admits(self, model: &ModelRef) -> bool {
        match self {
            StyleMode::PureChinese => matches!(model.style, StyleTag::Chinese | StyleTag::Common),
            StyleMode::PureJapanese => matches!(model.style, StyleTag::Japanese | StyleTag::Common),
            StyleMode::Composite if model.element.is_styled() => model.style != StyleTag::Common,
            StyleMode::Composite => model.style == StyleTag::Common,
        }
    }
}

impl fmt::Display for StyleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StyleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StyleMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown style mode `{s}` (expected chinese, japanese or composite)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelRef {
    pub id: String,
    pub element: Element,
    pub style: StyleTag,
    pub width: Centi,
    pub height: Centi,
    pub fill: String,
    pub glyph: Option<String>,
    pub xml_type: String,
    pub xml_material: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("catalog schema: {0}")]
    Schema(String),
    #[error("duplicate model id `{0}`")]
    DuplicateId(String),
    #[error("model `{id}`: {element} models cannot be common, they differ per style")]
    IllegalCommonStyle { id: String, element: Element },
    #[error("model `{0}`: width and height must be positive")]
    NonPositiveSize(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StyleError {
    #[error("no admissible {element} model for {mode} style")]
    NoAdmissibleModel { element: Element, mode: StyleMode },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    name: String,
    models: Vec<ModelDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    id: String,
    element: Element,
    style: StyleTag,
    width: Centi,
    height: Centi,
    fill: String,
    #[serde(default)]
    glyph: Option<String>,
    xml_type: String,
    xml_material: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCatalog {
    pub name: String,
    models: Vec<ModelRef>,
}

impl ModelCatalog {
    /// Builds a catalog, checking id uniqueness, style restrictions and sizes.
    pub fn new(name: impl Into<String>, models: Vec<ModelRef>) -> Result<ModelCatalog, CatalogError> {
        let mut ids = HashSet::new();
        for m in &models {
            if !ids.insert(m.id.as_str()) {
                return Err(CatalogError::DuplicateId(m.id.clone()));
            }
            if m.style == StyleTag::Common && m.element.is_styled() {
                return Err(CatalogError::IllegalCommonStyle {
                    id: m.id.clone(),
                    element: m.element,
                });
            }
            if m.width <= Centi::ZERO || m.height <= Centi::ZERO {
                return Err(CatalogError::NonPositiveSize(m.id.clone()));
            }
        }
        Ok(ModelCatalog {
            name: name.into(),
            models,
        })
    }

    pub fn bundled() -> ModelCatalog {
        load_catalog(BUNDLED_CATALOG).expect("bundled catalog is valid")
    }

    pub fn models(&self) -> &[ModelRef] {
        &self.models
    }

    pub fn get(&self, id: &str) -> Option<&ModelRef> {
        self.models.iter().find(|m| m.id == id)
    }

    /// Models admissible for `element` under `mode`, in catalog order.
    pub fn admissible(&self, element: Element, mode: StyleMode) -> impl Iterator<Item = &ModelRef> {
        self.models
            .iter()
            .filter(move |m| m.element == element && mode.admits(m))
    }

    pub fn count(&self, element: Element, style: StyleTag) -> usize {
        self.models
            .iter()
            .filter(|m| m.element == element && m.style == style)
            .count()
    }

    /// Copy without the models matching `drop`.
    pub fn without(&self, drop: impl Fn(&ModelRef) -> bool) -> ModelCatalog {
        ModelCatalog {
            name: self.name.clone(),
            models: self.models.iter().filter(|m| !drop(m)).cloned().collect(),
        }
    }
}

/// Parses a JSON catalog document.
pub fn load_catalog(document: &str) -> Result<ModelCatalog, CatalogError> {
    let doc: CatalogDoc = serde_json::from_str(document).map_err(|e| CatalogError::Schema(e.to_string()))?;
    let models = doc
        .models
        .into_iter()
        .map(|m| ModelRef {
            id: m.id,
            element: m.element,
            style: m.style,
            width: m.width,
            height: m.height,
            fill: m.fill,
            glyph: m.glyph,
            xml_type: m.xml_type,
            xml_material: m.xml_material,
        })
        .collect();
    ModelCatalog::new(doc.name, models)
}

/// One model per element kind present in a plan.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StyleAssignment {
    models: BTreeMap<Element, ModelRef>,
}

impl std::hash::Hash for ModelRef {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl StyleAssignment {
    pub fn new(models: BTreeMap<Element, ModelRef>) -> Self {
        StyleAssignment { models }
    }

    pub fn get(&self, e: Element) -> Option<&ModelRef> {
        self.models.get(&e)
    }

    pub fn kinds(&self) -> BTreeSet<Element> {
        self.models.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Element, &ModelRef)> {
        self.models.iter().map(|(e, m)| (*e, m))
    }

    pub fn insert(&mut self, e: Element, m: ModelRef) {
        self.models.insert(e, m);
    }

    pub fn remove(&mut self, e: Element) -> Option<ModelRef> {
        self.models.remove(&e)
    }

    /// Compact `element=model` listing in element order.
    pub fn summary(&self) -> String {
        self.models
            .iter()
            .map(|(e, m)| format!("{e}={}", m.id))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Picks one model per element kind of `plan`.
///
/// Draws go through [`Rng`] seeded with `seed`, visiting element kinds in
/// canonical order (wall, floor, beam, window, door, roof, toproof). Each
/// visit draws `below(n)` over the admissible models in catalog order; in
/// composite mode a styled element first draws `below(k)` over the styles
/// (Chinese, then Japanese) that have at least one model of that element.
pub fn assign_styles(
    plan: &BuildingPlan,
    catalog: &ModelCatalog,
    mode: StyleMode,
    seed: u64,
) -> Result<StyleAssignment, StyleError> {
    assign_kinds(&plan.kinds(), catalog, mode, seed)
}

pub fn assign_kinds(
    kinds: &BTreeSet<Element>,
    catalog: &ModelCatalog,
    mode: StyleMode,
    seed: u64,
) -> Result<StyleAssignment, StyleError> {
    let mut rng = Rng::new(seed);
    let mut models = BTreeMap::new();
    for &element in kinds {
        let none = || StyleError::NoAdmissibleModel { element, mode };
        let candidates: Vec<&ModelRef> = if mode == StyleMode::Composite && element.is_styled() {
            let styles: Vec<StyleTag> = [StyleTag::Chinese, StyleTag::Japanese]
                .into_iter()
                .filter(|s| catalog.count(element, *s) > 0)
                .collect();
            if styles.is_empty() {
                return Err(none());
            }
            let style = styles[rng.below(styles.len())];
            catalog
                .admissible(element, mode)
                .filter(|m| m.style == style)
                .collect()
        } else {
            catalog.admissible(element, mode).collect()
        };
        if candidates.is_empty() {
            return Err(none());
        }
        let pick = candidates[rng.below(candidates.len())];
        models.insert(element, pick.clone());
    }
    Ok(StyleAssignment { models })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssignmentDiagnostic {
    MissingElement(Element),
    ExtraElement(Element),
    /// The model filed under an element is a model of another element.
    WrongElement { element: Element, model: String },
    PurityViolation(Element),
}

impl fmt::Display for AssignmentDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentDiagnostic::MissingElement(e) => write!(f, "no model assigned for {e}"),
            AssignmentDiagnostic::ExtraElement(e) => write!(f, "{e} is assigned but not in the plan"),
            AssignmentDiagnostic::WrongElement { element, model } => {
                write!(f, "model `{model}` assigned to {element} is not a {element} model")
            }
            AssignmentDiagnostic::PurityViolation(e) => write!(f, "{e} model violates the style mode"),
        }
    }
}

/// Empty iff `a` covers exactly the plan's element kinds with models that
/// the mode admits.
pub fn validate_assignment(plan: &BuildingPlan, a: &StyleAssignment, mode: StyleMode) -> Vec<AssignmentDiagnostic> {
    validate_kinds(&plan.kinds(), a, mode)
}

pub fn validate_kinds(kinds: &BTreeSet<Element>, a: &StyleAssignment, mode: StyleMode) -> Vec<AssignmentDiagnostic> {
    let mut out = Vec::new();
    for e in Element::ALL {
        match (kinds.contains(&e), a.get(e)) {
            (true, None) => out.push(AssignmentDiagnostic::MissingElement(e)),
            (false, Some(_)) => out.push(AssignmentDiagnostic::ExtraElement(e)),
            (true, Some(m)) => {
                if m.element != e {
                    out.push(AssignmentDiagnostic::WrongElement {
                        element: e,
                        model: m.id.clone(),
                    });
                } else if !mode.admits(m) {
                    out.push(AssignmentDiagnostic::PurityViolation(e));
                }
            }
            (false, None) => {}
        }
    }
    out
}
