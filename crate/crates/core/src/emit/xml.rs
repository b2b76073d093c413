//! XML in the shape used by physics-based bird-launching game clones:
//!
//! ```xml
//! <?xml version="1.0" encoding="utf-8"?>
//! <Level width="2">
//!   <Camera x="0" y="2" minWidth="20" maxWidth="30"/>
//!   <Birds>
//!     <Bird type="BirdRed"/>
//!   </Birds>
//!   <Slingshot x="-8" y="-2.5"/>
//!   <GameObjects>
//!     <Block type="RectFat" material="stone" x="5.50" y="0.25" rotation="0"/>
//!   </GameObjects>
//! </Level>
//! ```
//!
//! Block `type`/`material` strings come from the mapping (by default the
//! catalog's `xml_type`/`xml_material`). Block positions are centers:
//! `offset + center * unit_scale`, rounded to 0.01.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Deserialize;

use super::{escape, EmitError};
use crate::fixed::Centi;
use crate::layout::{Level, PlacedBlock};
use crate::style::ModelCatalog;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XmlPreamble {
    pub level_width: f64,
    pub camera_x: f64,
    pub camera_y: f64,
    pub camera_min_width: f64,
    pub camera_max_width: f64,
    pub birds: Vec<String>,
    pub slingshot_x: f64,
    pub slingshot_y: f64,
    /// Added to every block center after scaling.
    pub offset_x: f64,
    pub offset_y: f64,
}

impl Default for XmlPreamble {
    fn default() -> Self {
        XmlPreamble {
            level_width: 2.0,
            camera_x: 0.0,
            camera_y: 2.0,
            camera_min_width: 20.0,
            camera_max_width: 30.0,
            birds: vec!["BirdRed".into(), "BirdRed".into(), "BirdBlue".into()],
            slingshot_x: -8.0,
            slingshot_y: -2.5,
            offset_x: 0.0,
            offset_y: -3.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockMapping {
    #[serde(rename = "type")]
    pub block_type: String,
    pub material: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct XmlMapping {
    pub preamble: XmlPreamble,
    pub models: BTreeMap<String, BlockMapping>,
}

impl XmlMapping {
    /// Mapping taken from each model's `xml_type` and `xml_material`.
    pub fn from_catalog(c: &ModelCatalog) -> XmlMapping {
        XmlMapping {
            preamble: XmlPreamble::default(),
            models: c
                .models()
                .iter()
                .map(|m| {
                    (
                        m.id.clone(),
                        BlockMapping {
                            block_type: m.xml_type.clone(),
                            material: m.xml_material.clone(),
                        },
                    )
                })
                .collect(),
        }
    }
}

fn world(center_twice: Centi, scale: f64, offset: f64) -> Centi {
    // center_twice holds 2 * center in 0.01 units
    let v = center_twice.0 as f64 / 200.0 * scale + offset;
    Centi::from_f64(v).expect("coordinate in range")
}

fn center_x(b: &PlacedBlock) -> Centi {
    Centi(2 * b.x.0 + b.w.0)
}

fn center_y(b: &PlacedBlock) -> Centi {
    Centi(2 * b.y.0 + b.h.0)
}

pub fn emit_xml(level: &Level, m: &XmlMapping) -> Result<Vec<u8>, EmitError> {
    let p = &m.preamble;
    let scale = level.meta.unit_scale;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    writeln!(out, "<Level width=\"{}\">", p.level_width).unwrap();
    writeln!(
        out,
        "  <Camera x=\"{}\" y=\"{}\" minWidth=\"{}\" maxWidth=\"{}\"/>",
        p.camera_x, p.camera_y, p.camera_min_width, p.camera_max_width
    )
    .unwrap();
    out.push_str("  <Birds>\n");
    for bird in &p.birds {
        writeln!(out, "    <Bird type=\"{}\"/>", escape(bird)).unwrap();
    }
    out.push_str("  </Birds>\n");
    writeln!(out, "  <Slingshot x=\"{}\" y=\"{}\"/>", p.slingshot_x, p.slingshot_y).unwrap();
    out.push_str("  <GameObjects>\n");
    for b in &level.blocks {
        let map = m
            .models
            .get(&b.model)
            .ok_or_else(|| EmitError::MissingMapping(b.model.clone()))?;
        writeln!(
            out,
            "    <Block type=\"{}\" material=\"{}\" x=\"{}\" y=\"{}\" rotation=\"0\"/>",
            escape(&map.block_type),
            escape(&map.material),
            world(center_x(b), scale, p.offset_x),
            world(center_y(b), scale, p.offset_y),
        )
        .unwrap();
    }
    out.push_str("  </GameObjects>\n");
    out.push_str("</Level>\n");
    Ok(out.into_bytes())
}
