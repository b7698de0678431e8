//! JSON state files: `{"n": N, "kind": "pure"|"mixed", "re": [...], "im": [...]}`
//! with amplitudes, or matrix entries in row-major order.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qstate::{CMatrix, DensityMatrix, PureState, State};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub kind: StateKind,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn from_state(state: &State) -> Self {
        match state {
            State::Pure(p) => {
                let amps = p.amplitudes();
                StateFile {
                    n: p.num_qubits(),
                    kind: StateKind::Pure,
                    re: amps.iter().map(|z| z.re).collect(),
                    im: amps.iter().map(|z| z.im).collect(),
                }
            }
            State::Mixed(r) => {
                let d = r.dim();
                let m = r.matrix();
                let entries: Vec<Complex64> = (0..d).flat_map(|i| (0..d).map(move |j| m[(i, j)])).collect();
                StateFile {
                    n: r.num_qubits(),
                    kind: StateKind::Mixed,
                    re: entries.iter().map(|z| z.re).collect(),
                    im: entries.iter().map(|z| z.im).collect(),
                }
            }
        }
    }

    /// Validating conversion. Pure amplitudes are renormalized if needed.
    pub fn to_state(&self) -> Result<State> {
        if self.re.len() != self.im.len() {
            return Err(Error::LengthMismatch { expected: self.re.len(), got: self.im.len() });
        }
        crate::qstate::check_qubits(self.n)?;
        let values: Vec<Complex64> = self.re.iter().zip(&self.im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let d = 1usize << self.n;
        match self.kind {
            StateKind::Pure => {
                // Keep stored amplitudes bit-exact when they are already normalized.
                let norm: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>();
                if values.len() == d && (norm - 1.0).abs() <= crate::qstate::tol::NORM {
                    let v = crate::qstate::CVector::from_vec(values);
                    return Ok(PureState::from_normalized_unchecked(self.n, v).into());
                }
                Ok(PureState::new(self.n, values)?.into())
            }
            StateKind::Mixed => {
                if values.len() != d * d {
                    return Err(Error::LengthMismatch { expected: d * d, got: values.len() });
                }
                let m = CMatrix::from_row_slice(d, d, &values);
                Ok(DensityMatrix::new(self.n, m)?.into())
            }
        }
    }
}

pub fn state_to_json(state: &State) -> Result<String> {
    Ok(serde_json::to_string(&StateFile::from_state(state))?)
}

pub fn state_from_json(text: &str) -> Result<State> {
    serde_json::from_str::<StateFile>(text)?.to_state()
}

pub fn load_state(path: impl AsRef<Path>) -> Result<State> {
    state_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_state(state: &State, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, state_to_json(state)?)?;
    Ok(())
}
