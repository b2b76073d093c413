//! The seven building elements that make up the terminal vocabulary.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A terminal of the building grammar.
///
/// The declaration order is the canonical element order used for style
/// draws, enumeration and catalog listings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Wall,
    Floor,
    Beam,
    Window,
    Door,
    Roof,
    Toproof,
}

/// Which vertical band of the building an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Base,
    Main,
    Roofs,
}

impl Element {
    pub const ALL: [Element; 7] = [
        Element::Wall,
        Element::Floor,
        Element::Beam,
        Element::Window,
        Element::Door,
        Element::Roof,
        Element::Toproof,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Element::Wall => "wall",
            Element::Floor => "floor",
            Element::Beam => "beam",
            Element::Window => "window",
            Element::Door => "door",
            Element::Roof => "roof",
            Element::Toproof => "toproof",
        }
    }

    /// Styled elements differ between Chinese and Japanese models; the rest
    /// are shared.
    pub fn is_styled(self) -> bool {
        matches!(
            self,
            Element::Window | Element::Door | Element::Roof | Element::Toproof
        )
    }

    pub fn part(self) -> Part {
        match self {
            Element::Wall | Element::Floor => Part::Base,
            Element::Beam | Element::Window | Element::Door => Part::Main,
            Element::Roof | Element::Toproof => Part::Roofs,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownElement(pub String);

impl FromStr for Element {
    type Err = UnknownElement;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Element::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| UnknownElement(s.to_string()))
    }
}

impl Part {
    pub fn as_str(self) -> &'static str {
        match self {
            Part::Base => "base",
            Part::Main => "main",
            Part::Roofs => "roofs",
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
