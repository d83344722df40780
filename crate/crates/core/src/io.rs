//! Arrangement JSON: rationals as `"p/q"` strings, floats as JSON numbers.
//!
//! ```json
//! {"dim": 2, "field": "rational",
//!  "hyperplanes": [{"normal": ["1", "-1"], "offset": "2/3", "label": 4}]}
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{Arrangement, Hyperplane};
use crate::scalar::{FieldMode, Rational, Scalar};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HyperplaneRecord {
    normal: Vec<Value>,
    offset: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ArrangementRecord {
    dim: usize,
    field: FieldMode,
    hyperplanes: Vec<HyperplaneRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
}

/// An arrangement over whichever field its file declares.
#[derive(Debug, Clone, PartialEq)]
pub enum DynArrangement {
    Rational(Arrangement<Rational>),
    Float(Arrangement<f64>),
}

impl DynArrangement {
    pub fn field(&self) -> FieldMode {
        match self {
            DynArrangement::Rational(_) => FieldMode::Rational,
            DynArrangement::Float(_) => FieldMode::Float,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DynArrangement::Rational(a) => a.dim(),
            DynArrangement::Float(a) => a.dim(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DynArrangement::Rational(a) => a.len(),
            DynArrangement::Float(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Converts to the requested field. Rational to float is always possible;
    /// float to rational is refused.
    pub fn into_field(self, mode: FieldMode) -> Result<Self> {
        match (self, mode) {
            (DynArrangement::Rational(a), FieldMode::Float) => Ok(DynArrangement::Float(a.to_float()?)),
            (DynArrangement::Float(_), FieldMode::Rational) => Err(Error::BadParams(
                "a float arrangement cannot be converted to rational".into(),
            )),
            (a, _) => Ok(a),
        }
    }
}

fn to_record<S: Scalar>(a: &Arrangement<S>, provenance: Option<Value>) -> ArrangementRecord {
    ArrangementRecord {
        dim: a.dim(),
        field: S::MODE,
        hyperplanes: a
            .hyperplanes()
            .iter()
            .map(|h| HyperplaneRecord {
                normal: h.normal().iter().map(Scalar::to_json).collect(),
                offset: h.offset().to_json(),
                label: h.label,
            })
            .collect(),
        provenance,
    }
}

fn from_record<S: Scalar>(r: &ArrangementRecord) -> Result<Arrangement<S>> {
    let hs = r
        .hyperplanes
        .iter()
        .map(|h| {
            let normal = h.normal.iter().map(S::from_json).collect::<Result<Vec<_>>>()?;
            let offset = S::from_json(&h.offset)?;
            let mut plane = Hyperplane::new(normal, offset)?;
            plane.label = h.label;
            Ok(plane)
        })
        .collect::<Result<Vec<_>>>()?;
    Arrangement::new(r.dim, hs)
}

pub fn arrangement_to_value<S: Scalar>(a: &Arrangement<S>, provenance: Option<Value>) -> Value {
    serde_json::to_value(to_record(a, provenance)).expect("records serialize")
}

pub fn arrangement_to_json<S: Scalar>(a: &Arrangement<S>, provenance: Option<Value>) -> String {
    serde_json::to_string_pretty(&to_record(a, provenance)).expect("records serialize")
}

pub fn dyn_to_json(a: &DynArrangement, provenance: Option<Value>) -> String {
    match a {
        DynArrangement::Rational(a) => arrangement_to_json(a, provenance),
        DynArrangement::Float(a) => arrangement_to_json(a, provenance),
    }
}

/// Parses an arrangement file, returning it together with its provenance block.
pub fn arrangement_from_json(text: &str) -> Result<(DynArrangement, Option<Value>)> {
    let record: ArrangementRecord =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let a = match record.field {
        FieldMode::Rational => DynArrangement::Rational(from_record(&record)?),
        FieldMode::Float => DynArrangement::Float(from_record(&record)?),
    };
    Ok((a, record.provenance))
}

/// Parses a file that must be over field `S`.
pub fn typed_arrangement_from_json<S: Scalar>(text: &str) -> Result<Arrangement<S>> {
    let record: ArrangementRecord =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if record.field != S::MODE {
        return Err(Error::Parse(format!(
            "expected a {} arrangement, file declares {}",
            S::MODE.as_str(),
            record.field.as_str()
        )));
    }
    from_record(&record)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_file_round_trip() {
        let text = r#"{"dim": 3, "field": "rational", "hyperplanes": [
            {"normal": ["1", "-1", "0"], "offset": "2/3", "label": 4},
            {"normal": ["0", "0", "2"], "offset": "1"}]}"#;
        let (a, prov) = arrangement_from_json(text).unwrap();
        assert!(prov.is_none());
        let DynArrangement::Rational(a) = a else { panic!("wrong field") };
        assert_eq!(a.labels(), vec![4, 0]);
        // canonical: 3x - 3y = 2
        assert_eq!(a.hyperplanes()[0].offset(), &Rational::from_i64(2));
        let again: Arrangement<Rational> =
            typed_arrangement_from_json(&arrangement_to_json(&a, None)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn float_file_round_trip_is_bit_exact() {
        let h = Hyperplane::new(vec![0.1, 0.7, -0.3], 1.0 / 3.0).unwrap();
        let a = Arrangement::new(3, vec![h]).unwrap();
        let text = arrangement_to_json(&a, Some(serde_json::json!({"generator": "test"})));
        let (b, prov) = arrangement_from_json(&text).unwrap();
        assert_eq!(b, DynArrangement::Float(a));
        assert_eq!(prov.unwrap()["generator"], "test");
    }

    #[test]
    fn bad_files() {
        assert!(arrangement_from_json("{").is_err());
        let wrong = r#"{"dim": 2, "field": "float", "hyperplanes": []}"#;
        assert!(typed_arrangement_from_json::<Rational>(wrong).is_err());
        let zero = r#"{"dim": 2, "field": "rational", "hyperplanes": [{"normal": ["0","0"], "offset": "1"}]}"#;
        assert_eq!(arrangement_from_json(zero).unwrap_err(), Error::ZeroNormal);
    }
}
