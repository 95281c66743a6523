//! JSON form of a perturbation: `{"n": 3, "a": [[i, j, value], ...], "b": [...]}`.

use std::collections::BTreeSet;
use std::path::Path;

use cyclescope_core::{BivariatePoly, PerturbationSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub type Term = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub n: usize,
    #[serde(default)]
    pub a: Vec<Term>,
    #[serde(default)]
    pub b: Vec<Term>,
}

impl SpecFile {
    pub fn from_spec(spec: &PerturbationSpec) -> Self {
        let collect = |p: &BivariatePoly| p.terms().collect::<Vec<Term>>();
        SpecFile {
            n: spec.degree(),
            a: collect(spec.f()),
            b: collect(spec.g()),
        }
    }

    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_spec(&self) -> CliResult<PerturbationSpec> {
        let f = poly(&self.a, "a")?;
        let g = poly(&self.b, "b")?;
        Ok(PerturbationSpec::new(self.n, f, g)?)
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn poly(terms: &[Term], name: &str) -> CliResult<BivariatePoly> {
    let mut seen = BTreeSet::new();
    for &(i, j, _) in terms {
        if !seen.insert((i, j)) {
            return Err(CliError::Usage(format!(
                "coefficient ({i}, {j}) of {name} listed twice"
            )));
        }
    }
    Ok(BivariatePoly::from_terms(terms.iter().copied()))
}

pub fn load_spec(path: &Path) -> CliResult<PerturbationSpec> {
    SpecFile::load(path)?.to_spec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let spec = PerturbationSpec::lambda_family(0.5);
        let file = SpecFile::from_spec(&spec);
        let text = file.to_json().unwrap();
        let back = SpecFile::parse(&text, "mem").unwrap().to_spec().unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn radial_linear_literal() {
        let file =
            SpecFile::parse(r#"{"n": 1, "a": [[1, 0, 1.0]], "b": [[0, 1, 1.0]]}"#, "mem").unwrap();
        assert_eq!(file.to_spec().unwrap(), PerturbationSpec::radial_linear());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SpecFile::parse(r#"{"n": 1, "a": [[1, 0]]}"#, "mem").is_err());
        assert!(SpecFile::parse(r#"{"n": 1, "c": []}"#, "mem").is_err());
        let dup = SpecFile::parse(r#"{"n": 1, "a": [[1, 0, 1.0], [1, 0, 2.0]]}"#, "mem").unwrap();
        assert!(matches!(dup.to_spec(), Err(CliError::Usage(_))));
        let high = SpecFile::parse(r#"{"n": 1, "a": [[2, 0, 1.0]]}"#, "mem").unwrap();
        assert!(matches!(high.to_spec(), Err(CliError::Core(_))));
    }

    #[test]
    fn empty_spec_is_zero() {
        let spec = SpecFile::parse(r#"{"n": 0}"#, "mem")
            .unwrap()
            .to_spec()
            .unwrap();
        assert!(spec.is_zero());
    }
}
