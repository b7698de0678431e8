//! Entanglement-classification bounds and verdicts.
//!
//! A state is `k`-producible if it is a mixture of products of factors with
//! at most `k` qubits each. Exceeding the `k`-producible bound on `F_Q` or
//! `F̄_Q` proves `(k+1)`-particle entanglement.

mod noise;
mod report;
mod witness;

pub use noise::{alpha_coeffs, critical_p, gamma_factor, AlphaCoefficients};
pub use report::{CriterionReport, DmeReport, ReportOptions};
pub use witness::{ghz_witness, ghz_witness_pure, WitnessMode, DEFAULT_WITNESS_RESTARTS};

use serde::{Deserialize, Serialize};

use crate::qstate::DensityMatrix;
use crate::{Error, Result};

/// Margin applied to every bound comparison so that boundary states are not
/// classified as entangled because of rounding.
pub const BOUND_MARGIN: f64 = 1e-9;

/// Slack above the `k = N` bound tolerated before a value is rejected.
pub const PHYSICAL_SLACK: f64 = 1e-6;

/// Bounds for `k`-producible states of `n` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProducibilityBound {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub r: usize,
    pub fq_bound: f64,
    pub fq_avg_bound: f64,
}

impl ProducibilityBound {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::invalid(format!("producibility class k = {k} outside 1..={n}")));
        }
        let s = n / k;
        let r = n - s * k;
        let (sf, kf, rf) = (s as f64, k as f64, r as f64);
        let fq_bound = sf * kf * kf + rf * rf;
        let delta = |x: usize| if x == 1 { 1.0 } else { 0.0 };
        let fq_avg_bound = (sf * (kf * kf + 2.0 * kf - delta(k)) + rf * rf + 2.0 * rf - delta(r)) / 3.0;
        Ok(Self { n, k, s, r, fq_bound, fq_avg_bound })
    }

    /// Bounds for every `k = 1..=n`.
    pub fn table(n: usize) -> Result<Vec<Self>> {
        (1..=n).map(|k| Self::new(n, k)).collect()
    }

    pub fn bound(&self, which: Functional) -> f64 {
        match which {
            Functional::Fq => self.fq_bound,
            Functional::FqAvg => self.fq_avg_bound,
        }
    }
}

/// `s k² + r²`, the largest `F_Q` of a `k`-producible state.
pub fn fq_bound(n: usize, k: usize) -> Result<f64> {
    Ok(ProducibilityBound::new(n, k)?.fq_bound)
}

/// `[s(k² + 2k − δ_{k,1}) + r² + 2r − δ_{r,1}] / 3`, the largest `F̄_Q` of a
/// `k`-producible state.
pub fn fq_avg_bound(n: usize, k: usize) -> Result<f64> {
    Ok(ProducibilityBound::new(n, k)?.fq_avg_bound)
}

/// Which Fisher-information functional a value refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Fq,
    FqAvg,
}

/// Smallest `d` with `value ≤ bound(n, d)`: the value proves `d`-particle
/// entanglement. Returns 1 for values compatible with separability.
pub fn entanglement_depth(value: f64, n: usize, which: Functional) -> Result<usize> {
    if !(value >= -PHYSICAL_SLACK) || !value.is_finite() {
        return Err(Error::invalid(format!("Fisher information {value} is not a non-negative number")));
    }
    let top = ProducibilityBound::new(n, n)?.bound(which);
    if value > top + PHYSICAL_SLACK {
        return Err(Error::Invariant(format!(
            "value {value} exceeds the maximum {top} for {n} qubits"
        )));
    }
    for d in 1..=n {
        if value <= ProducibilityBound::new(n, d)?.bound(which) + BOUND_MARGIN {
            return Ok(d);
        }
    }
    Ok(n)
}

/// One density-matrix-element condition for three qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmeResult {
    pub pair: usize,
    pub violated: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Condition for anti-diagonal pair `k ∈ 1..=4` (1-based matrix indices):
/// `|ρ_{k,9−k}| ≤ Σ_{j≠k} √(ρ_{jj} ρ_{9−j,9−j})`, satisfied by all
/// biseparable three-qubit states. `k = 1` is the standard condition.
pub fn dme(rho: &DensityMatrix, pair: usize) -> Result<DmeResult> {
    if rho.num_qubits() != 3 {
        return Err(Error::invalid("the DME condition is defined for three qubits"));
    }
    if !(1..=4).contains(&pair) {
        return Err(Error::invalid(format!("DME pair {pair} outside 1..=4")));
    }
    let diag = |i: usize| rho.entry(i, i).re.max(0.0);
    let lhs = rho.entry(pair - 1, 8 - pair).norm();
    let rhs: f64 = (1..=4).filter(|&j| j != pair).map(|j| (diag(j - 1) * diag(8 - j)).sqrt()).sum();
    Ok(DmeResult { pair, violated: lhs > rhs + 1e-12, lhs, rhs })
}

/// All four anti-diagonal conditions.
pub fn dme_family(rho: &DensityMatrix) -> Result<[DmeResult; 4]> {
    Ok([dme(rho, 1)?, dme(rho, 2)?, dme(rho, 3)?, dme(rho, 4)?])
}
