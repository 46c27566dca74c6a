//! CSV for distance matrices and JSON for diameter functions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DiameterFunction, Form, Monotonicity, UltrametricError, UltrametricMatrix};
use crate::extended::Extended;
use crate::scalar::Scalar;
use crate::subset::Subset;

fn parse_value<T: Scalar>(text: &str) -> Result<Extended<T>, UltrametricError> {
    match text.trim() {
        "inf" | "+inf" => Ok(Extended::PosInf),
        "-inf" => Ok(Extended::NegInf),
        t => T::parse(t).map(Extended::Finite).ok_or_else(|| UltrametricError::Parse(format!("bad number `{t}`"))),
    }
}

/// Header row of labels, then one row of distances per point; `inf` for infinity.
pub fn read_csv<T: Scalar>(text: &str, form: Form) -> Result<UltrametricMatrix<T>, UltrametricError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| UltrametricError::Parse("empty matrix file".into()))?;
    let points: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let rows = lines
        .map(|line| line.split(',').map(parse_value).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    UltrametricMatrix::new(points, rows, form)
}

pub fn write_csv<T: Scalar>(m: &UltrametricMatrix<T>) -> String {
    let mut out = m.points().join(",");
    out.push('\n');
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(Extended::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiameterEntry {
    /// 1-based labels.
    pub member: Vec<usize>,
    /// Exact rational string (`"3/2"`) or `"inf"`.
    pub value: String,
}

pub fn diameter_from_entries<T: Scalar>(
    entries: &[DiameterEntry],
    monotonicity: Monotonicity,
) -> Result<DiameterFunction<T>, UltrametricError> {
    let mut values = BTreeMap::new();
    for e in entries {
        let member = Subset::from_labels(&e.member)
            .ok_or_else(|| UltrametricError::Parse(format!("label 0 in {:?}", e.member)))?;
        values.insert(member, parse_value(&e.value)?);
    }
    Ok(DiameterFunction::from_values(values, monotonicity))
}

pub fn diameter_to_entries<T: Scalar>(diam: &DiameterFunction<T>) -> Vec<DiameterEntry> {
    diam.values()
        .iter()
        .map(|(m, v)| DiameterEntry { member: m.to_labels(), value: v.render() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn csv_roundtrip_exact() {
        let text = "a,b,c\n0,1/2,inf\n1/2,0,inf\ninf,inf,0\n";
        let m: UltrametricMatrix<BigRational> = read_csv(text, Form::MaxForm).unwrap();
        assert_eq!(*m.get(0, 2), Extended::PosInf);
        assert_eq!(write_csv(&m), "a,b,c\n0/1,1/2,inf\n1/2,0/1,inf\ninf,inf,0/1\n");
        let again: UltrametricMatrix<BigRational> = read_csv(&write_csv(&m), Form::MaxForm).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(read_csv::<f64>("a,b\n0,x\n1,0\n", Form::MaxForm), Err(UltrametricError::Parse(_))));
        assert!(matches!(read_csv::<f64>("a,b\n0,1\n", Form::MaxForm), Err(UltrametricError::ShapeError(_))));
    }

    #[test]
    fn diameter_json() {
        let json = r#"[{"member":[1,2],"value":"3/2"},{"member":[],"value":"inf"}]"#;
        let entries: Vec<DiameterEntry> = serde_json::from_str(json).unwrap();
        let d: DiameterFunction<BigRational> = diameter_from_entries(&entries, Monotonicity::Decreasing).unwrap();
        assert_eq!(d.get(&Subset::empty()), Some(&Extended::PosInf));
        let back = diameter_to_entries(&d);
        assert_eq!(back[0].member, Vec::<usize>::new());
        assert_eq!(back[1].value, "3/2");
    }
}
