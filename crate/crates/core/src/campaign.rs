//! Seeded Monte-Carlo campaigns and per-state studies.
//!
//! Sample `i` of a campaign with seed `s` draws from ChaCha stream `(s, i)`,
//! so results are identical for any number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    alpha_coeffs, critical_p, dme_family, ghz_witness, ghz_witness_pure, CriterionReport, ProducibilityBound,
    ReportOptions, WitnessMode, BOUND_MARGIN, DEFAULT_WITNESS_RESTARTS,
};
use crate::estimation::{limits, simulate, EstimationRun, EstimationSummary, LikelihoodTable, PhaseModel, ThetaGrid};
use crate::fisher::{classical_fisher, gamma_c, gamma_c_pure, optimize_local_directions, qfi, Povm, SeeSawOptions};
use crate::qstate::{collective_spin, Axis, DensityMatrix, PureState, State};
use crate::statezoo::{from_spec, random_ghz_diagonal, random_pure_3qubit_with, AngleSampler, GhzDiagonalMode};
use crate::{Error, Result};

/// RNG for sample `index` of a campaign seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` on a pool of `workers` threads; 0 uses the global pool.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Detection count for one criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub criterion: String,
    pub detected: u64,
    pub samples: u64,
    pub percent: f64,
    /// Binomial standard error of `percent`.
    pub std_error: f64,
}

impl DetectionRow {
    fn new(criterion: &str, detected: u64, samples: u64) -> Self {
        let p = if samples == 0 { 0.0 } else { detected as f64 / samples as f64 };
        let se = if samples == 0 { 0.0 } else { (p * (1.0 - p) / samples as f64).sqrt() };
        Self { criterion: criterion.to_string(), detected, samples, percent: 100.0 * p, std_error: 100.0 * se }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionTable {
    pub campaign: String,
    pub seed: u64,
    /// Samples requested.
    pub samples: u64,
    /// Samples that could not be drawn (rejection budget exhausted).
    pub failures: u64,
    pub rows: Vec<DetectionRow>,
}

impl DetectionTable {
    fn from_counts(campaign: &str, seed: u64, samples: u64, failures: u64, names: &[&str], counts: &[u64]) -> Self {
        let ok = samples - failures;
        let rows = names.iter().zip(counts).map(|(name, &c)| DetectionRow::new(name, c, ok)).collect();
        Self { campaign: campaign.to_string(), seed, samples, failures, rows }
    }

    pub fn row(&self, criterion: &str) -> Option<&DetectionRow> {
        self.rows.iter().find(|r| r.criterion == criterion)
    }

    pub fn percent(&self, criterion: &str) -> Option<f64> {
        self.row(criterion).map(|r| r.percent)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("criterion,detected,samples,percent,std_error\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{:.4},{:.4}\n", r.criterion, r.detected, r.samples, r.percent, r.std_error));
        }
        out
    }
}

/// Adds per-sample indicator vectors in sample order.
fn count_parallel<const K: usize>(
    samples: u64,
    eval: impl Fn(u64) -> Option<[bool; K]> + Sync,
) -> (u64, [u64; K]) {
    (0..samples)
        .into_par_iter()
        .map(|i| match eval(i) {
            Some(flags) => (0, flags.map(u64::from)),
            None => (1, [0; K]),
        })
        .reduce(
            || (0, [0; K]),
            |(fa, a), (fb, b)| (fa + fb, std::array::from_fn(|j| a[j] + b[j])),
        )
}

fn exceeds(value: f64, bound: f64) -> bool {
    value > bound + BOUND_MARGIN
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Options {
    pub sampler: AngleSampler,
    /// Also maximize `F_Q` over local directions.
    pub local_directions: bool,
    /// Also evaluate the witness optimized over local unitaries.
    pub witness_optimized: bool,
    pub witness_restarts: usize,
}

impl Default for Table2Options {
    fn default() -> Self {
        Self {
            sampler: AngleSampler::Reversed,
            local_directions: false,
            witness_optimized: false,
            witness_restarts: DEFAULT_WITNESS_RESTARTS,
        }
    }
}

pub const TABLE2_CRITERIA: [&str; 10] = [
    "fq_2",
    "fq_avg_2",
    "fq_3",
    "fq_avg_3",
    "dme",
    "dme_family",
    "witness",
    "fq_local_2",
    "fq_local_3",
    "witness_optimized",
];

/// Detection rates on random three-qubit pure states.
///
/// The default [`AngleSampler::Reversed`] reproduces the published pure-state
/// detection rates; [`AngleSampler::Haar`] gives the Haar-measure rates.
/// `fq_k`/`fq_avg_k` flag values above the `(k−1)`-producible bounds, so
/// `_2` detects entanglement and `_3` genuine three-particle entanglement.
/// Rows for optional criteria that were not requested are omitted.
pub fn table2(samples: u64, seed: u64, opts: &Table2Options) -> Result<DetectionTable> {
    let b1 = ProducibilityBound::new(3, 1)?;
    let b2 = ProducibilityBound::new(3, 2)?;
    let see_saw = SeeSawOptions::default();
    let eval = |i: u64| -> Option<[bool; 10]> {
        let mut rng = sample_rng(seed, i);
        let psi = random_pure_3qubit_with(opts.sampler, &mut rng);
        let g = gamma_c_pure(&psi);
        let (fq, _) = g.fq_max();
        let avg = g.fq_avg();
        let dme = dme_family(&psi.to_density()).expect("three qubits");
        let witness = ghz_witness_pure(&psi, WitnessMode::Fixed, 0).expect("three qubits");
        let local = opts.local_directions.then(|| optimize_local_directions(&psi, &see_saw, i).value);
        let witness_opt = opts.witness_optimized.then(|| {
            ghz_witness_pure(&psi, WitnessMode::Optimized { restarts: opts.witness_restarts }, i).expect("three qubits")
        });
        Some([
            exceeds(fq, b1.fq_bound),
            exceeds(avg, b1.fq_avg_bound),
            exceeds(fq, b2.fq_bound),
            exceeds(avg, b2.fq_avg_bound),
            dme[0].violated,
            dme.iter().any(|r| r.violated),
            witness < -BOUND_MARGIN,
            local.is_some_and(|v| exceeds(v, b1.fq_bound)),
            local.is_some_and(|v| exceeds(v, b2.fq_bound)),
            witness_opt.is_some_and(|w| w < -BOUND_MARGIN),
        ])
    };
    let (failures, counts) = count_parallel(samples, eval);
    let mut table = DetectionTable::from_counts("table2", seed, samples, failures, &TABLE2_CRITERIA, &counts);
    table.rows.retain(|r| match r.criterion.as_str() {
        "fq_local_2" | "fq_local_3" => opts.local_directions,
        "witness_optimized" => opts.witness_optimized,
        _ => true,
    });
    Ok(table)
}

pub const TABLE3_CRITERIA: [&str; 7] = ["witness", "fq_3", "fq_avg_3", "fq_2", "fq_avg_2", "dme", "witness_optimized"];

/// Detection rates on random GHZ-diagonal states drawn in `mode`.
pub fn table3(samples: u64, seed: u64, mode: GhzDiagonalMode, witness_optimized: bool) -> Result<DetectionTable> {
    let b1 = ProducibilityBound::new(3, 1)?;
    let b2 = ProducibilityBound::new(3, 2)?;
    let eval = |i: u64| -> Option<[bool; 7]> {
        let mut rng = sample_rng(seed, i);
        let rho = random_ghz_diagonal(&mut rng, mode).ok()?;
        let g = gamma_c(&rho);
        let (fq, _) = g.fq_max();
        let avg = g.fq_avg();
        let witness = ghz_witness(&rho, WitnessMode::Fixed, 0).expect("three qubits");
        let dme = dme_family(&rho).expect("three qubits");
        let witness_opt = witness_optimized.then(|| ghz_witness(&rho, WitnessMode::optimized(), i).expect("three qubits"));
        Some([
            witness < -BOUND_MARGIN,
            exceeds(fq, b2.fq_bound),
            exceeds(avg, b2.fq_avg_bound),
            exceeds(fq, b1.fq_bound),
            exceeds(avg, b1.fq_avg_bound),
            dme[0].violated,
            witness_opt.is_some_and(|w| w < -BOUND_MARGIN),
        ])
    };
    let (failures, counts) = count_parallel(samples, eval);
    let name = match mode {
        GhzDiagonalMode::DmeViolating => "table3:dme",
        GhzDiagonalMode::FullFamily => "table3:dme_family",
        GhzDiagonalMode::DmeSatisfying => "table3:dme_satisfying",
        GhzDiagonalMode::BoundEntangled => "table3:bound_entangled",
    };
    let mut table = DetectionTable::from_counts(name, seed, samples, failures, &TABLE3_CRITERIA, &counts);
    if !witness_optimized {
        table.rows.retain(|r| r.criterion != "witness_optimized");
    }
    Ok(table)
}

pub const BOUND_ENTANGLED_CRITERIA: [&str; 6] = ["ppt_all_cuts", "fq_2", "fq_avg_2", "fq_3", "fq_avg_3", "dme_family"];

/// PPT check and detection rates on the PPT-entangled GHZ-diagonal family.
pub fn bound_entangled_scan(samples: u64, seed: u64) -> Result<DetectionTable> {
    let b1 = ProducibilityBound::new(3, 1)?;
    let b2 = ProducibilityBound::new(3, 2)?;
    let eval = |i: u64| -> Option<[bool; 6]> {
        let mut rng = sample_rng(seed, i);
        let rho = random_ghz_diagonal(&mut rng, GhzDiagonalMode::BoundEntangled).ok()?;
        let ppt = (0..3).all(|q| rho.is_ppt(&[q], 1e-9).expect("valid cut"));
        let g = gamma_c(&rho);
        let (fq, _) = g.fq_max();
        let avg = g.fq_avg();
        let dme = dme_family(&rho).expect("three qubits");
        Some([
            ppt,
            exceeds(fq, b1.fq_bound),
            exceeds(avg, b1.fq_avg_bound),
            exceeds(fq, b2.fq_bound),
            exceeds(avg, b2.fq_avg_bound),
            dme.iter().any(|r| r.violated),
        ])
    };
    let (failures, counts) = count_parallel(samples, eval);
    Ok(DetectionTable::from_counts("bound-entangled-scan", seed, samples, failures, &BOUND_ENTANGLED_CRITERIA, &counts))
}

/// One row of the bound curves: the two bounds next to the lines `Nk` and `N(k+2)/3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub k: usize,
    pub fq_bound: f64,
    pub fq_avg_bound: f64,
    pub nk: f64,
    pub n_k_plus_2_over_3: f64,
}

pub fn bounds_curve(n: usize) -> Result<Vec<BoundsRow>> {
    if n < 2 {
        return Err(Error::invalid("bound curves need N ≥ 2"));
    }
    let nf = n as f64;
    ProducibilityBound::table(n).map(|table| {
        table
            .into_iter()
            .map(|b| BoundsRow {
                k: b.k,
                fq_bound: b.fq_bound,
                fq_avg_bound: b.fq_avg_bound,
                nk: nf * b.k as f64,
                n_k_plus_2_over_3: nf * (b.k as f64 + 2.0) / 3.0,
            })
            .collect()
    })
}

pub fn bounds_curve_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from("k,fq_bound,fq_avg_bound,nk,n_k_plus_2_over_3\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.12},{},{:.12}\n", r.k, r.fq_bound, r.fq_avg_bound, r.nk, r.n_k_plus_2_over_3));
    }
    out
}

/// Smallest mixing weight at which one criterion detects `p|ψ⟩⟨ψ| + (1−p)𝟙/2^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub k: usize,
    pub criterion: String,
    /// `α` or `ᾱ`; detection iff `γ_{p,N}` exceeds it.
    pub coefficient: f64,
    /// Threshold by bisection on the eigendecomposition route.
    pub p_bisection: Option<f64>,
    /// Threshold from the closed-form `γ_{p,N}`.
    pub p_closed_form: Option<f64>,
}

/// Noise thresholds of the `F_Q` and `F̄_Q` criteria for every `k < N`.
pub fn sweep_p(psi: &PureState, resolution: f64) -> Result<Vec<ThresholdRow>> {
    if !(resolution > 0.0 && resolution < 0.5) {
        return Err(Error::invalid("resolution must lie in (0, 0.5)"));
    }
    let n = psi.num_qubits();
    let values = |p: f64| -> Result<(f64, f64)> {
        let g = gamma_c(&DensityMatrix::mix_with_identity(psi, p)?);
        Ok((g.fq_max().0, g.fq_avg()))
    };
    let mut rows = Vec::new();
    for k in 1..n {
        let bound = ProducibilityBound::new(n, k)?;
        let alpha = alpha_coeffs(psi, k)?;
        for (criterion, coefficient, limit, pick) in [
            ("fq", alpha.alpha, bound.fq_bound, 0usize),
            ("fq_avg", alpha.alpha_bar, bound.fq_avg_bound, 1usize),
        ] {
            let detects = |p: f64| -> Result<bool> {
                let (fq, avg) = values(p)?;
                Ok(exceeds([fq, avg][pick], limit))
            };
            let p_bisection = if detects(1.0)? {
                let (mut lo, mut hi) = (0.0, 1.0);
                while hi - lo > resolution {
                    let mid = 0.5 * (lo + hi);
                    if detects(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Some(hi)
            } else {
                None
            };
            let p_closed_form = critical_p(coefficient, n)?.filter(|&p| p < 1.0 - 1e-12);
            rows.push(ThresholdRow { k, criterion: criterion.to_string(), coefficient, p_bisection, p_closed_form });
        }
    }
    Ok(rows)
}

pub fn sweep_p_csv(rows: &[ThresholdRow]) -> String {
    let opt = |p: Option<f64>| p.map_or_else(|| "none".to_string(), |v| format!("{v:.8}"));
    let mut out = String::from("k,criterion,coefficient,p_bisection,p_closed_form\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.10},{},{}\n",
            r.k,
            r.criterion,
            r.coefficient,
            opt(r.p_bisection),
            opt(r.p_closed_form)
        ));
    }
    out
}

/// Every criterion on a named or stored state.
pub fn analyze(spec: &str, opts: &ReportOptions) -> Result<CriterionReport> {
    CriterionReport::evaluate(&from_spec(spec)?, opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseSimReport {
    pub state: String,
    pub n: usize,
    pub measurement: String,
    pub true_theta: f64,
    pub m: u64,
    pub trials: usize,
    pub classical_fisher: f64,
    pub quantum_fisher: f64,
    pub shot_noise: f64,
    pub heisenberg: f64,
    /// `std`, `crb = 1/√(m F_Q)` and their ratio.
    pub summary: EstimationSummary,
    pub std_standard_error: f64,
}

/// Phase estimation with a `J_z` generator: GHZ probes are read out by
/// `σ_x^⊗N` parity on `[0, π/N]`, product `|+⟩^⊗N` probes qubit-wise in the
/// `x` basis on `[0, π]`. The true phase is the model's mid-fringe point.
pub fn phase_sim(spec: &str, m: u64, trials: usize, seed: u64) -> Result<(EstimationRun, PhaseSimReport)> {
    let (kind, n) = match spec.split_once(':') {
        Some((kind @ ("ghz" | "plus"), n)) => {
            (kind, n.parse::<usize>().map_err(|_| Error::invalid(format!("bad qubit count in '{spec}'"))))
        }
        _ => return Err(Error::invalid("phase-sim supports ghz:N and plus:N probes")),
    };
    let n = n?;
    let state = from_spec(spec)?;
    let rho = state.to_density();
    let h = collective_spin(n, Axis::Z);
    let (povm, hi, measurement) = match kind {
        "ghz" => (Povm::parity(n, Axis::X), std::f64::consts::PI / n as f64, "parity_x"),
        _ => (Povm::product_basis(n, Axis::X), std::f64::consts::PI, "product_x"),
    };
    let model = PhaseModel::new(&rho, &h, &povm)?;
    let grid = ThetaGrid::new(0.0, hi, ThetaGrid::DEFAULT_POINTS)?;
    let true_theta = LikelihoodTable::new(&model, grid)?.mid_fringe();
    let run = simulate(&model, true_theta, m, trials, grid, seed)?;
    let quantum_fisher = qfi(&rho, &h)?;
    let (shot_noise, heisenberg) = limits(n, m as usize)?;
    let report = PhaseSimReport {
        state: spec.to_string(),
        n,
        measurement: measurement.to_string(),
        true_theta,
        m,
        trials,
        classical_fisher: classical_fisher(&rho, &h, &povm, true_theta, crate::fisher::DEFAULT_DTHETA)?,
        quantum_fisher,
        shot_noise,
        heisenberg,
        summary: run.summary(quantum_fisher),
        std_standard_error: run.std_standard_error(),
    };
    Ok((run, report))
}

/// Named pure state; mixed states are rejected.
pub fn pure_state(spec: &str) -> Result<PureState> {
    match from_spec(spec)? {
        State::Pure(psi) => Ok(psi),
        State::Mixed(_) => Err(Error::invalid(format!("'{spec}' is not a pure state"))),
    }
}
