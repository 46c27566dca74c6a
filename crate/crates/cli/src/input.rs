//! Command-line inputs: inline JSON or a path to a file holding it.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use tropica_core::schema::{Number, SpectrumJson};
use tropica_core::{Scalar, Subset};

use crate::report::Inputs;

/// Inline text when it looks like JSON, otherwise the contents of the named file.
pub fn inline_or_file(arg: &str, key: &str, inputs: &mut Inputs) -> Result<String> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        read_file(Path::new(arg))?
    };
    inputs.add(key, &text);
    Ok(text)
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A bare array `[3, 1, "1/2"]` or `{"version": 1, "spectrum": [...]}`.
pub fn spectrum<T: Scalar>(arg: &str, inputs: &mut Inputs) -> Result<Vec<T>> {
    let text = inline_or_file(arg, "spectrum", inputs)?;
    let json = if text.trim_start().starts_with('[') {
        let values: Vec<Number> = serde_json::from_str(&text).context("parsing spectrum array")?;
        SpectrumJson { version: tropica_core::schema::SCHEMA_VERSION, spectrum: values }
    } else {
        serde_json::from_str(&text).context("parsing spectrum object")?
    };
    let values = json.values::<T>().map_err(|e| anyhow!(e))?;
    if values.is_empty() {
        bail!("spectrum is empty");
    }
    Ok(values)
}

/// `[[1, 2], [3]]`: subsets given by 1-based labels.
pub fn subsets(text: &str) -> Result<Vec<Subset>> {
    let lists: Vec<Vec<usize>> = serde_json::from_str(text).context("expected a JSON list of label lists")?;
    lists
        .iter()
        .map(|l| Subset::from_labels(l).ok_or_else(|| anyhow!("labels are 1-based, got {l:?}")))
        .collect()
}

/// 1-based index into a list of length `n`, returned 0-based.
pub fn label(index: usize, n: usize, what: &str) -> Result<usize> {
    if index == 0 || index > n {
        bail!("{what} must lie in 1..={n}, got {index}");
    }
    Ok(index - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tropica_core::BigRational;

    #[test]
    fn spectra_parse_inline() {
        let mut inputs = Inputs::default();
        let v: Vec<f64> = spectrum("[3,1,3,0]", &mut inputs).unwrap();
        assert_eq!(v, vec![3.0, 1.0, 3.0, 0.0]);
        let q: Vec<BigRational> = spectrum(r#"{"version":1,"spectrum":["1/3",2]}"#, &mut inputs).unwrap();
        assert_eq!(q[0], BigRational::new(1.into(), 3.into()));
        assert!(spectrum::<f64>("[]", &mut inputs).is_err());
        assert!(spectrum::<f64>(r#"{"version":2,"spectrum":[1]}"#, &mut inputs).is_err());
        assert!(spectrum::<f64>(r#"{"spectrum":[1],"extra":0}"#, &mut inputs).is_err());
    }

    #[test]
    fn subsets_are_one_based() {
        assert_eq!(subsets("[[1,3],[]]").unwrap(), vec![Subset::from_mask(0b101), Subset::empty()]);
        assert!(subsets("[[0]]").is_err());
        assert_eq!(label(2, 3, "alpha").unwrap(), 1);
        assert!(label(0, 3, "alpha").is_err());
    }
}
