//! Phase-estimation simulator: evolve a probe, sample a measurement, estimate
//! the phase by maximum likelihood and compare with the Cramér–Rao, shot-noise
//! and Heisenberg limits.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fisher::{povm::check_probability, Povm};
use crate::qstate::{CMatrix, DensityMatrix, HermitianOperator};
use crate::{Error, Result};

/// `e^{−iθH} ρ e^{iθH}`.
pub fn evolve(rho: &DensityMatrix, h: &HermitianOperator, theta: f64) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), h.dim()));
    }
    Ok(rho.conjugate_by(&phase_unitary(h, theta)))
}

/// `e^{−iθH}` via the eigendecomposition of `H`.
pub fn phase_unitary(h: &HermitianOperator, theta: f64) -> CMatrix {
    let spec = h.spectrum();
    let mut left = spec.eigenvectors.clone();
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -theta * l);
        left.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    left * spec.eigenvectors.adjoint()
}

/// Outcome probabilities `P(μ|θ)` as finite Fourier series in `θ`.
///
/// With `H = Σ_a h_a |a⟩⟨a|`, `P(μ|θ) = Σ_{a,b} ρ_ab E_μ,ba e^{−iθ(h_a − h_b)}`;
/// terms sharing a frequency are merged once at construction.
#[derive(Clone, Debug)]
pub struct PhaseModel {
    series: Vec<Vec<(f64, Complex64)>>,
}

impl PhaseModel {
    pub fn new(rho: &DensityMatrix, h: &HermitianOperator, povm: &Povm) -> Result<Self> {
        if rho.dim() != h.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), h.dim()));
        }
        if povm.dim() != h.dim() {
            return Err(Error::DimensionMismatch(povm.dim(), h.dim()));
        }
        let spec = h.spectrum();
        let rho_h = spec.transform(rho.matrix());
        let d = rho.dim();
        let series = povm
            .elements()
            .iter()
            .map(|e| {
                let e_h = spec.transform(e);
                let mut terms: BTreeMap<i64, (f64, Complex64)> = BTreeMap::new();
                for a in 0..d {
                    for b in 0..d {
                        let c = rho_h[(a, b)] * e_h[(b, a)];
                        if c.norm() < 1e-15 {
                            continue;
                        }
                        let omega = spec.eigenvalues[a] - spec.eigenvalues[b];
                        let key = (omega * 1e8).round() as i64;
                        let slot = terms.entry(key).or_insert((omega, Complex64::new(0.0, 0.0)));
                        slot.1 += c;
                    }
                }
                terms.into_values().filter(|(_, c)| c.norm() > 1e-15).collect()
            })
            .collect();
        Ok(Self { series })
    }

    pub fn num_outcomes(&self) -> usize {
        self.series.len()
    }

    pub fn probabilities(&self, theta: f64) -> Result<Vec<f64>> {
        self.series
            .iter()
            .map(|terms| {
                let p: f64 = terms.iter().map(|(w, c)| (c * Complex64::from_polar(1.0, -theta * w)).re).sum();
                check_probability(p)
            })
            .collect()
    }

    /// Whether no outcome probability depends on `θ`.
    pub fn is_phase_independent(&self) -> bool {
        self.series.iter().all(|terms| terms.iter().all(|(w, _)| w.abs() < 1e-9))
    }
}

/// Uniform grid of candidate phases, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl ThetaGrid {
    pub const DEFAULT_POINTS: usize = 512;

    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(hi > lo) || points < 3 {
            return Err(Error::invalid("grid needs lo < hi and at least 3 points"));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.lo + self.step() * i as f64
    }
}

/// `log P(μ|θ_i)` tabulated on a grid, shared by all trials of a simulation.
#[derive(Clone, Debug)]
pub struct LikelihoodTable {
    grid: ThetaGrid,
    log_probs: Vec<Vec<f64>>,
}

impl LikelihoodTable {
    pub fn new(model: &PhaseModel, grid: ThetaGrid) -> Result<Self> {
        if model.is_phase_independent() {
            return Err(Error::FlatLikelihood);
        }
        let log_probs = (0..grid.points)
            .map(|i| {
                let p = model.probabilities(grid.theta(i))?;
                Ok(p.into_iter().map(|x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY }).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { grid, log_probs })
    }

    fn log_likelihood(&self, i: usize, counts: &[u64]) -> f64 {
        let mut acc = 0.0;
        for (&k, &lp) in counts.iter().zip(&self.log_probs[i]) {
            if k > 0 {
                acc += k as f64 * lp;
            }
        }
        acc
    }

    /// Grid maximum of the log-likelihood with one parabolic refinement step.
    pub fn estimate(&self, counts: &[u64]) -> Result<f64> {
        if counts.len() != self.log_probs[0].len() {
            return Err(Error::DimensionMismatch(counts.len(), self.log_probs[0].len()));
        }
        let ll: Vec<f64> = (0..self.grid.points).map(|i| self.log_likelihood(i, counts)).collect();
        let mut best = 0;
        for i in 1..ll.len() {
            if ll[i] > ll[best] {
                best = i;
            }
        }
        let finite: Vec<f64> = ll.iter().copied().filter(|v| v.is_finite()).collect();
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        if finite.is_empty() || ll[best] - lo <= 1e-12 * (1.0 + ll[best].abs()) {
            return Err(Error::FlatLikelihood);
        }
        let mut theta = self.grid.theta(best);
        if best > 0 && best + 1 < ll.len() {
            let (a, b, c) = (ll[best - 1], ll[best], ll[best + 1]);
            let curvature = a - 2.0 * b + c;
            if a.is_finite() && c.is_finite() && curvature < 0.0 {
                let offset = (0.5 * (a - c) / curvature).clamp(-0.5, 0.5);
                theta += offset * self.grid.step();
            }
        }
        Ok(theta)
    }

    /// Interior grid point of steepest change in the outcome distribution.
    pub fn mid_fringe(&self) -> f64 {
        let probs: Vec<Vec<f64>> =
            self.log_probs.iter().map(|row| row.iter().map(|l| l.exp()).collect()).collect();
        let slope = |i: usize| -> f64 {
            probs[i + 1].iter().zip(&probs[i - 1]).map(|(a, b)| (a - b).abs()).sum()
        };
        let mut best = 1;
        for i in 2..self.grid.points - 1 {
            if slope(i) > slope(best) + 1e-15 {
                best = i;
            }
        }
        let mut theta = self.grid.theta(best);
        if best > 1 && best + 2 < self.grid.points {
            let (a, b, c) = (slope(best - 1), slope(best), slope(best + 1));
            let curvature = a - 2.0 * b + c;
            if curvature < 0.0 {
                theta += (0.5 * (a - c) / curvature).clamp(-0.5, 0.5) * self.grid.step();
            }
        }
        theta
    }
}

/// Maximum-likelihood phase estimate for observed `counts`.
pub fn ml_estimate(counts: &[u64], model: &PhaseModel, grid: ThetaGrid) -> Result<f64> {
    LikelihoodTable::new(model, grid)?.estimate(counts)
}

/// Multinomial draw of `m` outcomes with the given probabilities.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], m: u64, rng: &mut R) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = m;
    let mut mass = 1.0f64;
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, q).map_err(|e| Error::invalid(e.to_string()))?.sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= p;
    }
    Ok(counts)
}

/// Outcome counts of `m` repetitions of `povm` on `rho_theta`.
pub fn sample_outcomes<R: Rng + ?Sized>(
    rho_theta: &DensityMatrix,
    povm: &Povm,
    m: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::invalid("need at least one repetition"));
    }
    let probs = povm.probabilities(rho_theta)?;
    sample_counts(&probs, m, rng)
}

/// `(Δθ_SN, Δθ_HL) = (1/√(mN), 1/(√m N))`.
pub fn limits(n: usize, m: usize) -> Result<(f64, f64)> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("N and m must be at least 1"));
    }
    let (n, m) = (n as f64, m as f64);
    Ok((1.0 / (m * n).sqrt(), 1.0 / (m.sqrt() * n)))
}

/// `1/√(mF)`.
pub fn cramer_rao(m: usize, fisher: f64) -> f64 {
    1.0 / (m as f64 * fisher).sqrt()
}

/// Independent repetitions of a maximum-likelihood phase estimate.
#[derive(Clone, Debug, Serialize)]
pub struct EstimationRun {
    pub true_theta: f64,
    pub m: u64,
    pub trials: usize,
    pub estimator_values: Vec<f64>,
    pub mean: f64,
    pub empirical_std: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EstimationSummary {
    pub std: f64,
    pub crb: f64,
    pub ratio: f64,
}

impl EstimationRun {
    /// `trial,estimate` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,estimate\n");
        for (i, v) in self.estimator_values.iter().enumerate() {
            out.push_str(&format!("{i},{v:.17e}\n"));
        }
        out
    }

    /// Standard error of `empirical_std` under a normal approximation.
    pub fn std_standard_error(&self) -> f64 {
        self.empirical_std / (2.0 * (self.trials.saturating_sub(1)) as f64).sqrt()
    }

    pub fn summary(&self, fisher: f64) -> EstimationSummary {
        let crb = cramer_rao(self.m as usize, fisher);
        EstimationSummary { std: self.empirical_std, crb, ratio: self.empirical_std / crb }
    }
}

/// Runs `trials` independent estimates at `true_theta` with `m` repetitions each.
///
/// Trial `t` draws from its own ChaCha stream `(seed, t)`, so results do not
/// depend on how trials are scheduled across threads.
pub fn simulate(
    model: &PhaseModel,
    true_theta: f64,
    m: u64,
    trials: usize,
    grid: ThetaGrid,
    seed: u64,
) -> Result<EstimationRun> {
    if trials < 2 || m == 0 {
        return Err(Error::invalid("need m ≥ 1 and at least two trials"));
    }
    let table = LikelihoodTable::new(model, grid)?;
    let probs = model.probabilities(true_theta)?;
    let estimates = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let counts = sample_counts(&probs, m, &mut rng)?;
            table.estimate(&counts)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = estimates.iter().sum::<f64>() / trials as f64;
    let var = estimates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    Ok(EstimationRun { true_theta, m, trials, estimator_values: estimates, mean, empirical_std: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{collective_spin, Axis, PureState};

    fn ghz(n: usize) -> PureState {
        let d = 1 << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[0] = Complex64::new(1.0, 0.0);
        amps[d - 1] = Complex64::new(1.0, 0.0);
        PureState::new(n, amps).unwrap()
    }

    #[test]
    fn evolve_identity_at_zero_and_corner_phase() {
        let rho = ghz(3).to_density();
        let jz = collective_spin(3, Axis::Z);
        let same = evolve(&rho, &jz, 0.0).unwrap();
        assert!((same.matrix() - rho.matrix()).norm() < 1e-14);

        let theta = 0.37;
        let out = evolve(&rho, &jz, theta).unwrap();
        // ρ_{0,7} picks up e^{−iθ(3/2)} e^{−iθ(3/2)} = e^{−iNθ}
        let expected = Complex64::from_polar(0.5, -3.0 * theta);
        assert!((out.entry(0, 7) - expected).norm() < 1e-12);
    }

    #[test]
    fn limits_examples() {
        assert_eq!(limits(4, 1).unwrap(), (0.5, 0.25));
        let (sn, hl) = limits(1, 7).unwrap();
        assert!((sn - hl).abs() < 1e-15);
        let (sn, hl) = limits(100, 1).unwrap();
        assert!((sn - 0.1).abs() < 1e-15 && (hl - 0.01).abs() < 1e-15);
        assert!(limits(0, 1).is_err());
    }

    #[test]
    fn deterministic_outcome_takes_all_counts() {
        let rho = PureState::basis(2, 0).unwrap().to_density();
        let povm = Povm::computational(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_outcomes(&rho, &povm, 500, &mut rng).unwrap(), vec![500, 0, 0, 0]);
    }

    #[test]
    fn frequencies_match_probabilities() {
        let probs = [0.1, 0.25, 0.4, 0.25];
        let m = 100_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let counts = sample_counts(&probs, m, &mut rng).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), m);
        for (k, p) in counts.iter().zip(probs) {
            let sigma = (m as f64 * p * (1.0 - p)).sqrt();
            assert!((*k as f64 - m as f64 * p).abs() < 4.0 * sigma);
        }
        let mut again = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(sample_counts(&probs, m, &mut again).unwrap(), counts);
    }

    #[test]
    fn noiseless_counts_recover_true_phase() {
        let n = 4;
        let rho = ghz(n).to_density();
        let model = PhaseModel::new(&rho, &collective_spin(n, Axis::Z), &Povm::parity(n, Axis::X)).unwrap();
        let grid = ThetaGrid::new(0.0, std::f64::consts::PI / n as f64, 512).unwrap();
        let theta0 = 0.3;
        let p = model.probabilities(theta0).unwrap();
        let m = 1_000_000.0;
        let counts: Vec<u64> = p.iter().map(|x| (x * m).round() as u64).collect();
        let est = ml_estimate(&counts, &model, grid).unwrap();
        assert!((est - theta0).abs() < grid.step(), "{est}");
    }

    #[test]
    fn flat_likelihood_is_an_error() {
        let n = 2;
        let rho = ghz(n).to_density();
        let model = PhaseModel::new(&rho, &collective_spin(n, Axis::Z), &Povm::computational(n)).unwrap();
        let grid = ThetaGrid::new(0.0, 1.0, 64).unwrap();
        assert!(matches!(ml_estimate(&[5, 0, 0, 5], &model, grid), Err(Error::FlatLikelihood)));
    }

    #[test]
    fn mid_fringe_of_ghz_parity() {
        let n = 4;
        let model =
            PhaseModel::new(&ghz(n).to_density(), &collective_spin(n, Axis::Z), &Povm::parity(n, Axis::X)).unwrap();
        let grid = ThetaGrid::new(0.0, std::f64::consts::PI / n as f64, 512).unwrap();
        let mid = LikelihoodTable::new(&model, grid).unwrap().mid_fringe();
        assert!((mid - std::f64::consts::PI / 8.0).abs() < grid.step());
    }
}
