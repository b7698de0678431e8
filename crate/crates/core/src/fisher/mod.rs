//! Quantum and classical Fisher information.
//!
//! The central object is [`GammaC`], the 3×3 matrix whose quadratic form
//! gives the quantum Fisher information for every collective spin direction:
//! `F_Q[ρ; J_n] = nᵀ Γ_C n`.

mod gamma;
mod local;
pub(crate) mod povm;

pub use gamma::{fq_avg, fq_avg_montecarlo, fq_max, gamma_c, gamma_c_pure, GammaC};
pub use local::{optimize_local_directions, optimize_local_directions_mixed, LocalOptimum, SeeSawOptions};
pub use povm::Povm;

use crate::estimation::PhaseModel;
use crate::qstate::{DensityMatrix, HermitianOperator, PureState, Spectrum};
use crate::{Error, Result};

/// Outcomes whose probability falls below this are left out of the classical sum.
pub const MIN_PROBABILITY: f64 = 1e-12;

/// Default central-difference step for [`classical_fisher`].
pub const DEFAULT_DTHETA: f64 = 1e-5;

/// Pair weights `(λ_l − λ_l')² / (λ_l + λ_l')`, zero where the sum is below the cut.
pub(crate) fn qfi_weights(spec: &Spectrum) -> Vec<f64> {
    let lam: Vec<f64> = spec.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let d = lam.len();
    let mut w = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            let s = lam[a] + lam[b];
            if s > spec.zero_cut {
                let diff = lam[a] - lam[b];
                w[a * d + b] = diff * diff / s;
            }
        }
    }
    w
}

/// Quantum Fisher information of `rho` for the generator `h`.
pub fn qfi(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), h.dim()));
    }
    let spec = rho.spectrum();
    let w = qfi_weights(&spec);
    let hk = spec.transform(h.matrix());
    let d = rho.dim();
    let mut f = 0.0;
    for a in 0..d {
        for b in 0..d {
            let wab = w[a * d + b];
            if wab != 0.0 {
                f += wab * hk[(a, b)].norm_sqr();
            }
        }
    }
    Ok(2.0 * f)
}

/// `4 (ΔH)²`, the pure-state reduction of [`qfi`].
pub fn qfi_pure(psi: &PureState, h: &HermitianOperator) -> Result<f64> {
    Ok(4.0 * psi.variance(h)?)
}

/// Classical Fisher information of the outcome distribution of `povm` on
/// `e^{−iθH} ρ e^{iθH}`, with `∂_θ P` from a central difference of step `dtheta`.
pub fn classical_fisher(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    povm: &Povm,
    theta: f64,
    dtheta: f64,
) -> Result<f64> {
    if !(dtheta > 0.0) {
        return Err(Error::invalid("derivative step must be positive"));
    }
    let model = PhaseModel::new(rho, h, povm)?;
    let p0 = model.probabilities(theta)?;
    let plus = model.probabilities(theta + dtheta)?;
    let minus = model.probabilities(theta - dtheta)?;
    let mut f = 0.0;
    for ((p, pp), pm) in p0.iter().zip(&plus).zip(&minus) {
        if *p < MIN_PROBABILITY {
            continue;
        }
        let dp = (pp - pm) / (2.0 * dtheta);
        f += dp * dp / p;
    }
    Ok(f)
}

/// Purity check used where a pure state is required but a matrix was supplied.
pub(crate) fn as_pure(rho: &DensityMatrix) -> Result<PureState> {
    let spec = rho.spectrum();
    if (spec.max() - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(format!(
            "state is not pure (largest eigenvalue {:.3e})",
            spec.max()
        )));
    }
    let v = spec.eigenvectors.column(0).into_owned();
    Ok(PureState::from_normalized_unchecked(rho.num_qubits(), v))
}

#[cfg(test)]
mod tests;
