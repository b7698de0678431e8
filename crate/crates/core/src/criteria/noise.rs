//! Thresholds for `ρ(p) = p|ψ⟩⟨ψ| + (1 − p) 𝟙/2^N`, whose `Γ_C` is
//! `γ_{p,N} Γ_C[ψ]` with `γ_{p,N} = p² 2^{N−1} / (p(2^{N−1} − 1) + 1)`.

use serde::Serialize;

use super::ProducibilityBound;
use crate::fisher::gamma_c_pure;
use crate::qstate::PureState;
use crate::{Error, Result};

/// `γ_{p,N}`.
pub fn gamma_factor(p: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let h = 2f64.powi(n as i32 - 1);
    Ok(p * p * h / (p * (h - 1.0) + 1.0))
}

/// Smallest `p` with `γ_{p,N} ≥ x`, i.e. the root of
/// `2^{N−1} p² − x(2^{N−1} − 1) p − x = 0`; `None` when it exceeds 1.
pub fn critical_p(x: f64, n: usize) -> Result<Option<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("threshold x = {x} must be positive")));
    }
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let h = 2f64.powi(n as i32 - 1);
    let b = x * (h - 1.0);
    let disc = b * b + 4.0 * h * x;
    let p = (b + disc.sqrt()) / (2.0 * h);
    if p > 1.0 + 1e-12 {
        return Ok(None);
    }
    Ok(Some(p.min(1.0)))
}

/// Noise thresholds of the two criteria for mixtures of `ψ` with white noise:
/// the `F_Q` criterion detects `ρ(p)` iff `γ_{p,N} > alpha`, the `F̄_Q`
/// criterion iff `γ_{p,N} > alpha_bar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaCoefficients {
    pub alpha: f64,
    pub alpha_bar: f64,
}

pub fn alpha_coeffs(psi: &PureState, k: usize) -> Result<AlphaCoefficients> {
    let n = psi.num_qubits();
    let bound = ProducibilityBound::new(n, k)?;
    let g = gamma_c_pure(psi);
    let (fq_max, _) = g.fq_max();
    let fq_avg = g.fq_avg();
    if !(fq_max > 1e-12 && fq_avg > 1e-12) {
        return Err(Error::invalid("state has zero Fisher information"));
    }
    Ok(AlphaCoefficients { alpha: bound.fq_bound / fq_max, alpha_bar: bound.fq_avg_bound / fq_avg })
}
