//! Level serialization: canonical JSON, clone-targetable XML and an SVG
//! preview. All three are byte-deterministic functions of their inputs.

mod json;
mod svg;
mod xml;

use thiserror::Error;

pub use json::{emit_json, load_json, LoadError};
pub use svg::{render_svg, SVG_PIXELS_PER_UNIT};
pub use xml::{emit_xml, BlockMapping, XmlMapping, XmlPreamble};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmitError {
    #[error("no XML mapping for model `{0}`")]
    MissingMapping(String),
    #[error("model `{0}` is not in the catalog")]
    UnknownModel(String),
}

/// Escapes text for use in XML attribute values and character data.
pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
