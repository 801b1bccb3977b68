use serde::{Serialize, Serializer};

/// A non-negative quantity that may be unbounded.
///
/// Serialized as a JSON number when finite and as the string `"inf"` otherwise,
/// since JSON has no representation for infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// Lossy view as `f64` (infinite maps to `f64::INFINITY`).
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            Extended::Finite(v) => serializer.serialize_f64(v),
            Extended::Infinite => serializer.serialize_str("inf"),
        }
    }
}
