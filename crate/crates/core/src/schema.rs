//! Shared pieces of the JSON input formats.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

pub fn version_one() -> u32 {
    SCHEMA_VERSION
}

pub fn check_version(version: u32) -> Result<(), String> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(format!("unsupported schema version {version}"))
    }
}

/// A JSON number or a string such as `"3/2"`; both parse exactly in exact mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Text(String),
    Json(serde_json::Number),
}

impl Number {
    pub fn parse<T: Scalar>(&self) -> Result<T, String> {
        let text = match self {
            Number::Text(t) => t.clone(),
            Number::Json(n) => n.to_string(),
        };
        T::parse(&text).ok_or_else(|| format!("bad number `{text}`"))
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Self {
        serde_json::Number::from_f64(x).map(Number::Json).unwrap_or_else(|| Number::Text(x.to_string()))
    }
}

/// `{"version": 1, "spectrum": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumJson {
    #[serde(default = "version_one")]
    pub version: u32,
    pub spectrum: Vec<Number>,
}

impl SpectrumJson {
    pub fn values<T: Scalar>(&self) -> Result<Vec<T>, String> {
        check_version(self.version)?;
        self.spectrum.iter().map(Number::parse).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn numbers_parse_exactly() {
        let s: SpectrumJson = serde_json::from_str(r#"{"spectrum":[0.1,"3/2",-2]}"#).unwrap();
        let v: Vec<BigRational> = s.values().unwrap();
        assert_eq!(v[0], BigRational::new(1.into(), 10.into()));
        assert_eq!(v[1], BigRational::new(3.into(), 2.into()));
        let bad: SpectrumJson = serde_json::from_str(r#"{"version":2,"spectrum":[]}"#).unwrap();
        assert!(bad.values::<f64>().is_err());
        assert!(serde_json::from_str::<SpectrumJson>(r#"{"spectrum":[],"x":1}"#).is_err());
    }
}
