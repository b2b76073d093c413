//! Geometric realization of a styled plan, and a static support check.
//!
//! Coordinates are bottom-left corners in layout units with y pointing up,
//! quantized to 0.01 ([`Centi`]). The base band is a stack of full-width
//! slabs, the main band one row of models left to right, and the roofs band
//! a stack of centered slabs that shrink by `roof_taper` per tier.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derive::BuildingPlan;
use crate::element::{Element, Part};
use crate::fixed::{to_basis, Centi, BASIS};
use crate::style::{validate_assignment, StyleAssignment, StyleMode};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryConfig {
    pub ground_y: Centi,
    /// World units per layout unit, applied when exporting XML.
    pub unit_scale: f64,
    /// Width shrink per roof tier, in `[0, 0.5)`.
    pub roof_taper: f64,
    /// Fraction of a block's width that must rest on blocks below, `(0, 1]`.
    pub overlap_ratio: f64,
    pub origin_x: Centi,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            ground_y: Centi::ZERO,
            unit_scale: 1.0,
            roof_taper: 0.15,
            overlap_ratio: 0.5,
            origin_x: Centi::ZERO,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<(), LayoutError> {
        if !(self.unit_scale.is_finite() && self.unit_scale > 0.0) {
            return Err(LayoutError::InvalidConfig("unit_scale must be positive"));
        }
        if !(0.0..0.5).contains(&self.roof_taper) {
            return Err(LayoutError::InvalidConfig("roof_taper must be in [0, 0.5)"));
        }
        if !(self.overlap_ratio > 0.0 && self.overlap_ratio <= 1.0) {
            return Err(LayoutError::InvalidConfig("overlap_ratio must be in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tier {
    pub part: Part,
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacedBlock {
    pub element: Element,
    pub model: String,
    pub x: Centi,
    pub y: Centi,
    pub w: Centi,
    pub h: Centi,
    pub tier: Tier,
}

impl PlacedBlock {
    pub fn right(&self) -> Centi {
        self.x + self.w
    }

    pub fn top(&self) -> Centi {
        self.y + self.h
    }

    fn interiors_overlap(&self, o: &PlacedBlock) -> bool {
        self.x < o.right() && o.x < self.right() && self.y < o.top() && o.y < self.top()
    }
}

/// Where a level came from; echoed into every emitted file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelMeta {
    pub generator: String,
    pub source: String,
    pub seed: u64,
    pub mode: StyleMode,
    pub catalog: String,
    pub ground_y: Centi,
    pub unit_scale: f64,
}

/// The caller-supplied part of [`LevelMeta`].
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub source: String,
    pub seed: u64,
    pub mode: StyleMode,
    pub catalog: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub meta: LevelMeta,
    /// Bottom to top, left to right.
    pub blocks: Vec<PlacedBlock>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("assignment does not fit the plan: {0}")]
    AssignmentMismatch(String),
    #[error("degenerate plan: {0}")]
    DegeneratePlan(String),
    #[error("invalid geometry: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("level invariant violated: {0}")]
pub struct InvariantViolation(pub String);

impl Level {
    /// Non-empty, positive sizes, nothing below ground, no interior overlap,
    /// and the three parts stacked as horizontal bands.
    pub fn validate(&self) -> Result<(), InvariantViolation> {
        let fail = |m: String| Err(InvariantViolation(m));
        if self.blocks.is_empty() {
            return fail("level has no blocks".into());
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.w <= Centi::ZERO || b.h <= Centi::ZERO {
                return fail(format!("block {i} ({}) has non-positive size", b.model));
            }
            if b.y < self.meta.ground_y {
                return fail(format!("block {i} ({}) is below ground", b.model));
            }
            if b.element.part() != b.tier.part {
                return fail(format!("block {i}: {} filed under {}", b.element, b.tier.part));
            }
        }
        for (i, a) in self.blocks.iter().enumerate() {
            for (j, b) in self.blocks.iter().enumerate().skip(i + 1) {
                if a.interiors_overlap(b) {
                    return fail(format!("blocks {i} ({}) and {j} ({}) overlap", a.model, b.model));
                }
            }
        }
        let band = |p: Part| self.blocks.iter().filter(move |b| b.tier.part == p);
        let pairs = [(Part::Base, Part::Main), (Part::Main, Part::Roofs), (Part::Base, Part::Roofs)];
        for (lower, upper) in pairs {
            let top = band(lower).map(|b| b.top()).max();
            let bottom = band(upper).map(|b| b.y).min();
            if let (Some(top), Some(bottom)) = (top, bottom) {
                if top > bottom {
                    return fail(format!("{lower} band reaches {top}, above {upper} band bottom {bottom}"));
                }
            }
        }
        Ok(())
    }

    /// Left, bottom, right, top.
    pub fn bounds(&self) -> (Centi, Centi, Centi, Centi) {
        let l = self.blocks.iter().map(|b| b.x).min().unwrap_or_default();
        let bo = self.blocks.iter().map(|b| b.y).min().unwrap_or_default();
        let r = self.blocks.iter().map(|b| b.right()).max().unwrap_or_default();
        let t = self.blocks.iter().map(|b| b.top()).max().unwrap_or_default();
        (l, bo, r, t)
    }
}

/// Places one block per plan element.
pub fn layout(
    plan: &BuildingPlan,
    a: &StyleAssignment,
    g: &GeometryConfig,
    provenance: Provenance,
) -> Result<Level, LayoutError> {
    g.validate()?;
    let diags = validate_assignment(plan, a, provenance.mode);
    if !diags.is_empty() {
        let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(LayoutError::AssignmentMismatch(msg.join("; ")));
    }
    if plan.main.is_empty() {
        return Err(LayoutError::DegeneratePlan("main row is empty".into()));
    }
    let model = |e: Element| a.get(e).expect("assignment validated");

    let row_width = plan.main.iter().fold(Centi::ZERO, |acc, &e| acc + model(e).width);
    let mut blocks = Vec::with_capacity(plan.len());
    let mut y = g.ground_y;

    for (row, &e) in plan.base.iter().enumerate() {
        let m = model(e);
        blocks.push(PlacedBlock {
            element: e,
            model: m.id.clone(),
            x: g.origin_x,
            y,
            w: row_width,
            h: m.height,
            tier: Tier { part: Part::Base, row },
        });
        y = y + m.height;
    }

    let mut x = g.origin_x;
    let mut row_top = y;
    for &e in &plan.main {
        let m = model(e);
        blocks.push(PlacedBlock {
            element: e,
            model: m.id.clone(),
            x,
            y,
            w: m.width,
            h: m.height,
            tier: Tier { part: Part::Main, row: 0 },
        });
        x = x + m.width;
        row_top = row_top.max(y + m.height);
    }
    y = row_top;

    let shrink = BASIS - to_basis(g.roof_taper);
    let mut width = row_width;
    for (row, &e) in plan.roofs.iter().enumerate() {
        if row > 0 {
            let next = width.scale_basis(shrink);
            // keep successive tiers strictly narrower when tapering
            width = if shrink < BASIS { next.min(width - Centi(1)) } else { next };
            if width <= Centi::ZERO {
                return Err(LayoutError::DegeneratePlan(format!(
                    "roof tier {row} tapers to zero width"
                )));
            }
        }
        let m = model(e);
        blocks.push(PlacedBlock {
            element: e,
            model: m.id.clone(),
            x: g.origin_x + (row_width - width).half(),
            y,
            w: width,
            h: m.height,
            tier: Tier { part: Part::Roofs, row },
        });
        y = y + m.height;
    }

    Ok(Level {
        meta: LevelMeta {
            generator: crate::GENERATOR.to_string(),
            source: provenance.source,
            seed: provenance.seed,
            mode: provenance.mode,
            catalog: provenance.catalog,
            ground_y: g.ground_y,
            unit_scale: g.unit_scale,
        },
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSupport {
    pub supported: bool,
    /// Total width resting on the ground or on blocks directly beneath.
    pub contact: Centi,
    /// Leftmost and rightmost contact points, if any.
    pub span: Option<(Centi, Centi)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportReport {
    pub blocks: Vec<BlockSupport>,
    pub stable: bool,
}

impl SupportReport {
    pub fn unsupported(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.supported)
            .map(|(i, _)| i)
    }
}

impl fmt::Display for SupportReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad: Vec<String> = self.unsupported().map(|i| i.to_string()).collect();
        if bad.is_empty() {
            write!(f, "stable")
        } else {
            write!(f, "unstable: blocks {} unsupported", bad.join(", "))
        }
    }
}

/// A block is supported when it sits on the ground, or when blocks whose
/// tops touch its bottom cover at least `overlap_ratio` of its width.
pub fn check_support(level: &Level, g: &GeometryConfig) -> SupportReport {
    let need = to_basis(g.overlap_ratio);
    let blocks: Vec<BlockSupport> = level
        .blocks
        .iter()
        .map(|b| {
            if b.y == g.ground_y {
                return BlockSupport {
                    supported: true,
                    contact: b.w,
                    span: Some((b.x, b.right())),
                };
            }
            let mut contact = Centi::ZERO;
            let mut span: Option<(Centi, Centi)> = None;
            for below in level.blocks.iter().filter(|o| o.top() == b.y) {
                let lo = b.x.max(below.x);
                let hi = b.right().min(below.right());
                if hi > lo {
                    contact = contact + (hi - lo);
                    span = Some(match span {
                        None => (lo, hi),
                        Some((l, h)) => (l.min(lo), h.max(hi)),
                    });
                }
            }
            BlockSupport {
                supported: contact.0 * BASIS >= need * b.w.0,
                contact,
                span,
            }
        })
        .collect();
    let stable = blocks.iter().all(|b| b.supported);
    SupportReport { blocks, stable }
}
