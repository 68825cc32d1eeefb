//! JSON state files.
//!
//! Pure state: `{"layout": [["A1",2],…], "amplitudes": [[re,im],…]}`.
//! Density matrix: `{"layout": […], "matrix": [[[re,im],…],…]}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DensityMatrix, PureState, SubsystemLayout};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Either kind of state a file can hold.
#[derive(Debug, Clone)]
pub enum StateFile {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateFile {
    pub fn layout(&self) -> &SubsystemLayout {
        match self {
            Self::Pure(p) => p.layout(),
            Self::Mixed(m) => m.layout(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            Self::Pure(p) => super::density_of(p),
            Self::Mixed(m) => m.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let raw = match self {
            Self::Pure(p) => RawState {
                layout: p.layout().clone().into(),
                amplitudes: Some(p.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
                matrix: None,
            },
            Self::Mixed(m) => {
                let mat = m.matrix();
                RawState {
                    layout: m.layout().clone().into(),
                    amplitudes: None,
                    matrix: Some(
                        (0..mat.rows())
                            .map(|i| mat.row(i).iter().map(|z| [z.re, z.im]).collect())
                            .collect(),
                    ),
                }
            }
        };
        serde_json::to_string_pretty(&raw).expect("state serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    layout: Vec<(String, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// Parses and validates a state from JSON text. Syntax errors carry the
/// line and column reported by the parser.
pub fn parse_state(text: &str) -> Result<StateFile> {
    let raw: RawState =
        serde_json::from_str(text).map_err(|e| Error::Argument(format!("state file: {e}")))?;
    let layout = SubsystemLayout::new(raw.layout)?;
    let cplx = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
    match (raw.amplitudes, raw.matrix) {
        (Some(a), None) => Ok(StateFile::Pure(PureState::new(layout, a.iter().map(cplx).collect())?)),
        (None, Some(rows)) => {
            let n = rows.len();
            if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(Error::Shape(format!(
                    "field \"matrix\": row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            let data = rows.iter().flatten().map(cplx).collect();
            let m = ComplexMatrix::new(n, n, data)?;
            Ok(StateFile::Mixed(DensityMatrix::new(layout, m)?))
        }
        _ => Err(Error::Argument(
            "state file needs exactly one of \"amplitudes\" or \"matrix\"".into(),
        )),
    }
}

/// Reads a state file from disk.
pub fn load_state(path: &Path) -> std::io::Result<Result<StateFile>> {
    Ok(parse_state(&std::fs::read_to_string(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pure_and_mixed_states() {
        let pure = r#"{"layout": [["A",2],["B",2]], "amplitudes": [[0.7071067811865476,0],[0,0],[0,0],[0.7071067811865476,0]]}"#;
        let StateFile::Pure(p) = parse_state(pure).unwrap() else { panic!() };
        assert_eq!(p.layout().labels(), vec!["A", "B"]);

        let mixed = r#"{"layout": [["A",2]], "matrix": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
        assert!(matches!(parse_state(mixed).unwrap(), StateFile::Mixed(_)));
    }

    #[test]
    fn reports_syntax_position_and_violated_invariant() {
        let err = parse_state("{\"layout\": [[\"A\",2]],\n \"amplitudes\": [[1,0],]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_state(r#"{"layout": [["A",2]], "amplitudes": [[1,0],[1,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("norm"), "{err}");
        let err = parse_state(r#"{"layout": [["A",2]], "matrix": [[[1,0],[0,0]],[[0,0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        assert!(parse_state(r#"{"layout": [["A",2]]}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"layout": [["A",2]], "matrix": [[[0.25,0],[0,0.1]],[[0,-0.1],[0.75,0]]]}"#;
        let s = parse_state(text).unwrap();
        let again = parse_state(&s.to_json()).unwrap();
        assert_eq!(again.density(), s.density());
    }
}
