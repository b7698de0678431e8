//! All criteria evaluated on one state.

use serde::{Deserialize, Serialize};

use super::{dme_family, entanglement_depth, ghz_witness, DmeResult, Functional, ProducibilityBound, WitnessMode};
use crate::fisher::{gamma_c, optimize_local_directions, GammaC, LocalOptimum, SeeSawOptions};
use crate::qstate::{SpinDirection, State};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub witness: WitnessMode,
    /// Also maximize `F_Q` over local directions (pure states only).
    pub local_directions: bool,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { witness: WitnessMode::Fixed, local_directions: true, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DmeReport {
    pub pairs: [DmeResult; 4],
    /// The standard condition (pair 1) is violated.
    pub dme: bool,
    /// At least one of the four conditions is violated.
    pub dme_family: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub n: usize,
    pub purity: f64,
    pub gamma_c: GammaC,
    pub fq_max: f64,
    pub fq_max_direction: SpinDirection,
    pub fq_avg: f64,
    pub depth_fq: usize,
    pub depth_fq_avg: usize,
    pub local: Option<LocalOptimum>,
    pub depth_fq_local: Option<usize>,
    pub bounds: Vec<ProducibilityBound>,
    pub dme_verdicts: Option<DmeReport>,
    pub witness_mode: WitnessMode,
    pub witness_value: f64,
    pub detected_entangled: bool,
    pub detected_genuine_multipartite: bool,
}

impl CriterionReport {
    pub fn evaluate(state: &State, opts: &ReportOptions) -> Result<Self> {
        let rho = state.to_density();
        let n = rho.num_qubits();
        let gamma = gamma_c(&rho);
        let (fq_max, fq_max_direction) = gamma.fq_max();
        let fq_avg = gamma.fq_avg();
        let depth_fq = entanglement_depth(fq_max, n, Functional::Fq)?;
        let depth_fq_avg = entanglement_depth(fq_avg, n, Functional::FqAvg)?;

        let local = match (opts.local_directions, state.as_pure()) {
            (true, Some(psi)) => Some(optimize_local_directions(psi, &SeeSawOptions::default(), opts.seed)),
            _ => None,
        };
        let depth_fq_local = local.as_ref().map(|l| entanglement_depth(l.value, n, Functional::Fq)).transpose()?;

        let dme_verdicts = if n == 3 {
            let pairs = dme_family(&rho)?;
            Some(DmeReport { pairs, dme: pairs[0].violated, dme_family: pairs.iter().any(|p| p.violated) })
        } else {
            None
        };
        let witness_value = if n >= 2 { ghz_witness(&rho, opts.witness, opts.seed)? } else { 0.5 };

        let max_depth = depth_fq.max(depth_fq_avg).max(depth_fq_local.unwrap_or(1));
        let witness_detects = witness_value < -super::BOUND_MARGIN;
        let dme_detects = dme_verdicts.as_ref().is_some_and(|d| d.dme_family);
        Ok(Self {
            n,
            purity: rho.purity(),
            gamma_c: gamma,
            fq_max,
            fq_max_direction,
            fq_avg,
            depth_fq,
            depth_fq_avg,
            local,
            depth_fq_local,
            bounds: ProducibilityBound::table(n)?,
            dme_verdicts,
            witness_mode: opts.witness,
            witness_value,
            detected_entangled: max_depth > 1 || witness_detects || dme_detects,
            detected_genuine_multipartite: (n > 1 && max_depth == n) || witness_detects || dme_detects,
        })
    }
}
