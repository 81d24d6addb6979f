//! JSON state files:
//! `{"D": 4, "N": 2, "terms": [{"orbitals": [1, 2], "re": 0.7071, "im": 0.0}, ...]}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FermionState, OrbitalSubset, SlaterDeterminant};

/// Norm tolerance of files read without `--renormalize`.
pub const FILE_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub orbitals: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

impl StateFile {
    pub fn from_state(state: &FermionState) -> Self {
        Self {
            d: state.num_orbitals(),
            n: state.num_particles(),
            terms: state
                .terms()
                .iter()
                .map(|(sd, a)| TermRecord {
                    orbitals: sd.occupied().orbitals(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }

    /// Checks every invariant; with `renormalize` the norm is fixed up instead.
    pub fn to_state(&self, renormalize: bool) -> Result<FermionState> {
        let (d, n) = (self.d, self.n);
        if d == 0 || d > crate::fock::MAX_ORBITALS || n > d {
            return Err(Error::Validation(format!(
                "need 1 <= D <= 64 and N <= D, got D = {d}, N = {n}"
            )));
        }
        if self.terms.is_empty() {
            return Err(Error::Validation("terms: empty".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        let mut seen = std::collections::HashSet::new();
        for (i, t) in self.terms.iter().enumerate() {
            let field = |msg: String| Error::Validation(format!("terms[{i}].{msg}"));
            if t.orbitals.len() != n {
                return Err(field(format!(
                    "orbitals: {} entries, expected N = {n}",
                    t.orbitals.len()
                )));
            }
            if t.orbitals.windows(2).any(|w| w[0] >= w[1]) {
                return Err(field("orbitals: not strictly ascending".into()));
            }
            if t.orbitals.iter().any(|&o| o == 0 || o > d) {
                return Err(field(format!("orbitals: entry outside 1..={d}")));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(field("re/im: not finite".into()));
            }
            let occ = OrbitalSubset::from_orbitals(&t.orbitals, d)
                .map_err(|e| field(format!("orbitals: {e}")))?;
            if !seen.insert(occ.bits()) {
                return Err(field("orbitals: determinant repeated".into()));
            }
            if t.re == 0.0 && t.im == 0.0 {
                if renormalize {
                    continue;
                }
                return Err(field("re/im: zero amplitude".into()));
            }
            terms.push((SlaterDeterminant::new(occ), Complex64::new(t.re, t.im)));
        }
        let result = if renormalize {
            FermionState::normalized(d, n, terms)
        } else {
            FermionState::with_norm_tolerance(d, n, terms, FILE_NORM_TOL)
        };
        result.map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::Validation(msg),
            other => other,
        })
    }
}

/// Parses and validates; JSON syntax or shape errors carry their line.
pub fn parse_state_file(text: &str, renormalize: bool) -> Result<FermionState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    file.to_state(renormalize)
}

pub fn read_state_file(path: &Path, renormalize: bool) -> Result<FermionState> {
    parse_state_file(&std::fs::read_to_string(path)?, renormalize)
}

pub fn write_state_file(state: &FermionState) -> String {
    let mut s =
        serde_json::to_string_pretty(&StateFile::from_state(state)).expect("plain data serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dm::{build_ghz, build_paired_state};

    #[test]
    fn round_trip() {
        for s in [build_ghz(8, 2).unwrap(), build_paired_state(8, 2).unwrap()] {
            let text = write_state_file(&s);
            let back = parse_state_file(&text, false).unwrap();
            assert_eq!(back, s);
            assert_eq!(StateFile::from_state(&back), StateFile::from_state(&s));
        }
    }

    #[test]
    fn rejects_bad_files() {
        let ok = r#"{"D": 4, "N": 2, "terms": [{"orbitals": [1, 2], "re": 1.0, "im": 0.0}]}"#;
        assert!(parse_state_file(ok, false).is_ok());
        let cases = [
            (
                r#"{"D": 4, "N": 2, "terms": [{"orbitals": [2, 1], "re": 1.0, "im": 0.0}]}"#,
                "ascending",
            ),
            (
                r#"{"D": 4, "N": 2, "terms": [{"orbitals": [1, 5], "re": 1.0, "im": 0.0}]}"#,
                "outside",
            ),
            (
                r#"{"D": 4, "N": 2, "terms": [{"orbitals": [1], "re": 1.0, "im": 0.0}]}"#,
                "entries",
            ),
            (
                r#"{"D": 4, "N": 2, "terms": [{"orbitals": [1, 2], "re": 0.9, "im": 0.0}]}"#,
                "norm",
            ),
            (
                r#"{"D": 4, "N": 2, "terms": [{"orbitals": [1, 2], "re": 0.6, "im": 0.0}, {"orbitals": [1, 2], "re": 0.8, "im": 0.0}]}"#,
                "repeated",
            ),
        ];
        for (text, what) in cases {
            match parse_state_file(text, false) {
                Err(Error::Validation(msg)) => assert!(msg.contains(what), "{msg}"),
                other => panic!("{what}: {other:?}"),
            }
        }
        match parse_state_file("{\n\"D\": 4,\n\"N\": x}", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let renorm = r#"{"D": 4, "N": 2, "terms": [{"orbitals": [1, 2], "re": 3.0, "im": 4.0}]}"#;
        let s = parse_state_file(renorm, true).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }
}
