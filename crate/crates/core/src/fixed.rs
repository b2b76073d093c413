//! Fixed-point layout coordinates, quantized to hundredths of a layout unit.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A length or coordinate stored as an integer count of 0.01 layout units.
///
/// Everything the layout engine computes stays in this representation so that
/// emitted coordinates are identical on every platform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Centi(pub i64);

/// Fractions such as the roof taper are applied in parts per ten thousand.
pub const BASIS: i64 = 10_000;

impl Centi {
    pub const ZERO: Centi = Centi(0);

    /// Nearest 0.01 step, ties away from zero. Returns `None` for non-finite
    /// input or values outside the representable range.
    pub fn from_f64(v: f64) -> Option<Centi> {
        if !v.is_finite() {
            return None;
        }
        let scaled = (v * 100.0).round();
        if scaled.abs() > (i64::MAX / BASIS) as f64 {
            return None;
        }
        Some(Centi(scaled as i64))
    }

    /// Like [`Centi::from_f64`] but only accepts values that already sit on
    /// the 0.01 grid (up to float noise).
    pub fn from_f64_exact(v: f64) -> Option<Centi> {
        let c = Centi::from_f64(v)?;
        if (v * 100.0 - c.0 as f64).abs() > 1e-6 {
            return None;
        }
        Some(c)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    /// `self * parts / BASIS`, rounded half up.
    pub fn scale_basis(self, parts: i64) -> Centi {
        Centi(div_round_half_up(self.0 * parts, BASIS))
    }

    /// Half of this length, rounded half up.
    pub fn half(self) -> Centi {
        Centi(div_round_half_up(self.0, 2))
    }
}

/// Converts a fraction in `[0, 1]`-ish range to parts per [`BASIS`].
pub fn to_basis(fraction: f64) -> i64 {
    (fraction * BASIS as f64).round() as i64
}

fn div_round_half_up(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    (2 * num + den).div_euclid(2 * den)
}

impl Add for Centi {
    type Output = Centi;
    fn add(self, rhs: Centi) -> Centi {
        Centi(self.0 + rhs.0)
    }
}

impl Sub for Centi {
    type Output = Centi;
    fn sub(self, rhs: Centi) -> Centi {
        Centi(self.0 - rhs.0)
    }
}

impl fmt::Display for Centi {
    /// Always two decimals: `9.35`, `11.00`, `-0.50`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{}{}.{:02}", sign, abs / 100, abs % 100)
    }
}

impl Serialize for Centi {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // i64 / 100.0 is the double nearest the decimal, so the shortest
        // round-trip printer writes the decimal back out.
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Centi {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Centi::from_f64_exact(v).ok_or_else(|| {
            serde::de::Error::custom(format!("{v} is not a multiple of 0.01"))
        })
    }
}
