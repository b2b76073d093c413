//! Canonical JSON:
//!
//! ```json
//! {
//!   "meta": {"generator", "source", "seed", "mode", "catalog", "ground_y", "unit_scale"},
//!   "blocks": [{"element", "model", "x", "y", "w", "h", "tier": {"part", "row"}}]
//! }
//! ```
//!
//! Keys appear in exactly this order, two-space indented, with a trailing
//! newline. Coordinates are multiples of 0.01 written as shortest decimals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::{InvariantViolation, Level, LevelMeta, PlacedBlock};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelDoc {
    meta: LevelMeta,
    blocks: Vec<PlacedBlock>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("level schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
}

pub fn emit_json(level: &Level) -> Vec<u8> {
    let doc = LevelDoc {
        meta: level.meta.clone(),
        blocks: level.blocks.clone(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("level serializes");
    out.push(b'\n');
    out
}

/// Parses and validates a level document.
pub fn load_json(bytes: &[u8]) -> Result<Level, LoadError> {
    let doc: LevelDoc = serde_json::from_slice(bytes).map_err(|e| LoadError::Schema(e.to_string()))?;
    let level = Level {
        meta: doc.meta,
        blocks: doc.blocks,
    };
    level.validate()?;
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::grammar::fixtures::MINIMAL;
    use crate::style::StyleMode;

    #[test]
    fn round_trip_demo() {
        let level = demo();
        let bytes = emit_json(&level);
        let back = load_json(&bytes).unwrap();
        assert_eq!(back, level);
        assert_eq!(emit_json(&back), bytes);
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["blocks"].as_array().unwrap().len(), 16);
    }

    #[test]
    fn round_trip_minimal() {
        let level = level_from(MINIMAL, StyleMode::PureJapanese, 3);
        assert_eq!(load_json(&emit_json(&level)).unwrap(), level);
        assert_eq!(level.blocks.len(), 5);
    }

    #[test]
    fn key_order_and_decimals() {
        let text = String::from_utf8(emit_json(&demo())).unwrap();
        let meta_keys = ["\"generator\"", "\"source\"", "\"seed\"", "\"mode\"", "\"catalog\"", "\"ground_y\"", "\"unit_scale\""];
        let offsets: Vec<_> = meta_keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(offsets.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("\"w\": 9.35"));
        assert!(text.contains("\"w\": 7.95"));
        assert!(text.contains("\"x\": 1.53"));
        assert!(text.contains("\"mode\": \"chinese\""));
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn empty_blocks_rejected() {
        let mut v: serde_json::Value = serde_json::from_slice(&emit_json(&demo())).unwrap();
        v["blocks"] = serde_json::json!([]);
        let err = load_json(&serde_json::to_vec(&v).unwrap()).unwrap_err();
        assert!(matches!(err, LoadError::Invariant(_)));
        assert!(matches!(load_json(br#"{"blocks":[]}"#), Err(LoadError::Schema(_))));
    }

    #[test]
    fn tampered_overlap_rejected() {
        let mut v: serde_json::Value = serde_json::from_slice(&emit_json(&demo())).unwrap();
        v["blocks"][3]["x"] = serde_json::json!(2.5);
        let err = load_json(&serde_json::to_vec(&v).unwrap()).unwrap_err();
        assert!(matches!(err, LoadError::Invariant(InvariantViolation(ref m)) if m.contains("overlap")));
    }

    #[test]
    fn off_grid_coordinate_rejected() {
        let mut v: serde_json::Value = serde_json::from_slice(&emit_json(&demo())).unwrap();
        v["blocks"][0]["w"] = serde_json::json!(11.001);
        assert!(matches!(load_json(&serde_json::to_vec(&v).unwrap()), Err(LoadError::Schema(_))));
    }
}
