//! Constructors and samplers for the state families used by the criteria.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qstate::{check_qubits, pauli, product_operator, Axis, CMatrix, DensityMatrix, PureState, State, Tensor};
use crate::{Error, Result};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(|0…0⟩ + e^{iφ}|1…1⟩)/√2`.
pub fn ghz(n: usize, phi: f64) -> Result<PureState> {
    check_qubits(n)?;
    let d = 1usize << n;
    let mut amps = vec![c(0.0); d];
    amps[0] = c(1.0);
    amps[d - 1] += Complex64::from_polar(1.0, phi);
    PureState::new(n, amps)
}

/// `(|i_1…i_N⟩ + e^{iφ}|ī_1…ī_N⟩)/√2` for bits `i_j ∈ {0, 1}`.
pub fn ghz_basis_state(bits: &[u8], phi: f64) -> Result<PureState> {
    let n = bits.len();
    check_qubits(n)?;
    let mut index = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::invalid(format!("bit value {b} is not 0 or 1")));
        }
        index = (index << 1) | b as usize;
    }
    let d = 1usize << n;
    let partner = (d - 1) ^ index;
    let mut amps = vec![c(0.0); d];
    amps[index] = c(1.0);
    amps[partner] += Complex64::from_polar(1.0, phi);
    PureState::new(n, amps)
}

/// Symmetric Dicke state with `k` excitations: equal weight on every basis
/// state of Hamming weight `k`. A `J_z` eigenstate with eigenvalue `(N − 2k)/2`.
pub fn dicke(n: usize, k: usize) -> Result<PureState> {
    check_qubits(n)?;
    if k > n {
        return Err(Error::invalid(format!("{k} excitations exceed {n} qubits")));
    }
    let amps = (0..1usize << n).map(|i| if i.count_ones() as usize == k { c(1.0) } else { c(0.0) }).collect();
    PureState::new(n, amps)
}

/// `|+⟩^⊗N`.
pub fn plus(n: usize) -> Result<PureState> {
    check_qubits(n)?;
    let d = 1usize << n;
    PureState::new(n, vec![c(1.0); d])
}

/// `|1⟩^⊗N`.
pub fn ones(n: usize) -> Result<PureState> {
    check_qubits(n)?;
    PureState::basis(n, (1usize << n) - 1)
}

/// `GHZ_k^⊗s ⊗ GHZ_r` with `s = ⌊N/k⌋`, `r = N − sk`; `GHZ_1 = |+⟩`.
pub fn ghz_product(n: usize, k: usize) -> Result<PureState> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("block size {k} outside 1..={n}")));
    }
    let s = n / k;
    let r = n - s * k;
    let block = ghz(k, 0.0)?;
    let mut state = block.clone();
    for _ in 1..s {
        state = state.tensor(&block)?;
    }
    if r > 0 {
        state = state.tensor(&ghz(r, 0.0)?)?;
    }
    Ok(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// `√(1/3)|2,±2⟩ + √(2/3)|2,∓1⟩` on four qubits, with `|j, m⟩ = dicke(4, 2 − m)`.
pub fn psi_s4(sign: Sign) -> PureState {
    let (a, b) = match sign {
        Sign::Plus => (dicke(4, 0), dicke(4, 3)),
        Sign::Minus => (dicke(4, 4), dicke(4, 1)),
    };
    let (a, b) = (a.expect("4 qubits"), b.expect("4 qubits"));
    let amps = a.amplitudes() * c((1.0f64 / 3.0).sqrt()) + b.amplitudes() * c((2.0f64 / 3.0).sqrt());
    PureState::new(4, amps.iter().copied().collect()).expect("nonzero")
}

/// Coefficients of a three-qubit GHZ-diagonal matrix: diagonal `λ_1…λ_8` and
/// anti-diagonal `μ_1…μ_4`, `μ_j` coupling `λ_j` and `λ_{9−j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzDiagonalParams {
    pub lambdas: [f64; 8],
    pub mus: [f64; 4],
}

impl GhzDiagonalParams {
    pub fn normalization(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    /// Every block `[[λ_j, μ_j], [μ_j, λ_{9−j}]]` is positive semidefinite.
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.iter().chain(self.mus.iter()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite GHZ-diagonal coefficient"));
        }
        if let Some(l) = self.lambdas.iter().find(|&&l| l < 0.0) {
            return Err(Error::NotPositive(*l));
        }
        for j in 0..4 {
            let prod = self.lambdas[j] * self.lambdas[7 - j];
            let mu2 = self.mus[j] * self.mus[j];
            if mu2 > prod + 1e-12 * (1.0 + prod) {
                return Err(Error::NotPositive(prod - mu2));
            }
        }
        if !(self.normalization() > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(())
    }
}

/// Three-qubit GHZ-diagonal state, normalized by `Σ λ_i`.
pub fn ghz_diagonal(params: &GhzDiagonalParams) -> Result<DensityMatrix> {
    params.validate()?;
    Ok(ghz_diagonal_unchecked(params))
}

fn ghz_diagonal_unchecked(params: &GhzDiagonalParams) -> DensityMatrix {
    let norm = params.normalization();
    let mut m = CMatrix::zeros(8, 8);
    for i in 0..8 {
        m[(i, i)] = c(params.lambdas[i] / norm);
    }
    for j in 0..4 {
        m[(j, 7 - j)] = c(params.mus[j] / norm);
        m[(7 - j, j)] = c(params.mus[j] / norm);
    }
    DensityMatrix::from_matrix_unchecked(3, m)
}

/// Parameters of the PPT-entangled subfamily: `λ_1 = λ_8 = μ_1 = 1`,
/// `λ_7 = 1/λ_2`, `λ_6 = 1/λ_3`, `λ_5 = 1/λ_4`, other `μ` zero.
pub fn bound_entangled_params(l2: f64, l3: f64, l4: f64) -> Result<GhzDiagonalParams> {
    if !(l2 > 0.0 && l3 > 0.0 && l4 > 0.0) {
        return Err(Error::invalid("bound-entangled parameters must be positive"));
    }
    Ok(GhzDiagonalParams {
        lambdas: [1.0, l2, l3, l4, 1.0 / l4, 1.0 / l3, 1.0 / l2, 1.0],
        mus: [1.0, 0.0, 0.0, 0.0],
    })
}

/// GHZ-diagonal state that is PPT across every cut; entangled iff `λ_2 λ_3 ≠ λ_4`.
pub fn bound_entangled_ghz_diagonal(l2: f64, l3: f64, l4: f64) -> Result<DensityMatrix> {
    ghz_diagonal(&bound_entangled_params(l2, l3, l4)?)
}

/// `(|GHZ_φ⟩⟨GHZ_φ| + ½ Σ_l (P_l + P̄_l)) / (N + 1)` with `P_l` projecting on
/// the state with a single `1` at qubit `l` and `P̄_l` its bit complement.
pub fn duer(n: usize, phi: f64) -> Result<DensityMatrix> {
    if n < 3 {
        return Err(Error::invalid("the Dür state needs N ≥ 3"));
    }
    let g = ghz(n, phi)?;
    let d = 1usize << n;
    let mut m = g.to_density().matrix().clone();
    for l in 0..n {
        let one_l = 1usize << (n - 1 - l);
        m[(one_l, one_l)] += c(0.5);
        let zero_l = (d - 1) ^ one_l;
        m[(zero_l, zero_l)] += c(0.5);
    }
    m /= c((n + 1) as f64);
    Ok(DensityMatrix::from_matrix_unchecked(n, m))
}

/// Generalized Smolin state on `N = 2n` qubits:
/// `(𝟙 + (−1)^n Σ_{i=x,y,z} σ_i^⊗N) / 2^N`.
pub fn smolin(n: usize) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::invalid("the Smolin state needs n ≥ 2"));
    }
    let big_n = 2 * n;
    check_qubits(big_n)?;
    let d = 1usize << big_n;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut m = CMatrix::identity(d, d);
    for axis in Axis::ALL {
        m += product_operator(&vec![pauli(axis); big_n]) * c(sign);
    }
    m /= c(d as f64);
    Ok(DensityMatrix::from_matrix_unchecked(big_n, m))
}

/// The same Smolin state assembled as an equal mixture of `2^{N−2}` states
/// `|GHZ_φ^{i_1…i_N}⟩`, one per complementary pair, with `Σ i_j ≡ n (mod 2)`.
///
/// On `|GHZ_φ^{i}⟩` the operator `Σ_i σ_i^⊗N` has eigenvalue
/// `(−1)^{N_1} ± (1 + (−1)^{n+N_1})`, so the support is `φ = 0` for even `n`
/// but `φ = π` for odd `n`.
pub fn smolin_from_ghz_mixture(n: usize) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::invalid("the Smolin state needs n ≥ 2"));
    }
    let big_n = 2 * n;
    check_qubits(big_n)?;
    let d = 1usize << big_n;
    let mut m = CMatrix::zeros(d, d);
    let weight = 1.0 / (1usize << (big_n - 2)) as f64;
    let phi = if n % 2 == 0 { 0.0 } else { PI };
    // representatives with the first bit 0
    for idx in 0..d / 2 {
        if (idx.count_ones() as usize) % 2 != n % 2 {
            continue;
        }
        let bits: Vec<u8> = (0..big_n).map(|q| ((idx >> (big_n - 1 - q)) & 1) as u8).collect();
        let g = ghz_basis_state(&bits, phi)?;
        m += g.to_density().matrix() * c(weight);
    }
    Ok(DensityMatrix::from_matrix_unchecked(big_n, m))
}

/// Inverse CDF for the angle density `i sin(2α)(sin α)^{2i−2}` on `[0, π/2]`,
/// whose CDF is `(sin α)^{2i}`.
pub fn spherical_angle(u: f64, i: usize) -> f64 {
    u.clamp(0.0, 1.0).powf(1.0 / (2 * i) as f64).asin()
}

/// How the hyperspherical angles of a random pure state are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSampler {
    /// `α_i` with CDF `(sin α_i)^{2i}`: Haar measure.
    #[default]
    Haar,
    /// `α_i` drawn with the density of index `D − i`. Not Haar: the first
    /// and last amplitudes carry most of the weight.
    Reversed,
}

impl std::str::FromStr for AngleSampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(Self::Haar),
            "reversed" => Ok(Self::Reversed),
            other => Err(Error::invalid(format!("unknown sampler '{other}'"))),
        }
    }
}

/// Haar-random pure state of `n` qubits in hyperspherical coordinates.
///
/// With `D = 2^n`, component 0 is `cos α_{D−1}`, component `j` is
/// `cos α_{D−1−j} sin α_{D−j} ⋯ sin α_{D−1} e^{iφ_{D−j}}`, and the last is
/// `sin α_1 ⋯ sin α_{D−1} e^{iφ_1}`.
pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    random_pure_state_with(n, AngleSampler::Haar, rng)
}

/// As [`random_pure_state`] with the angle distribution chosen by `sampler`.
pub fn random_pure_state_with<R: Rng + ?Sized>(n: usize, sampler: AngleSampler, rng: &mut R) -> Result<PureState> {
    check_qubits(n)?;
    let d = 1usize << n;
    // alpha[i], phi[i] for i in 1..d (index 0 unused)
    let mut alpha = vec![0.0; d];
    let mut phi = vec![0.0; d];
    for i in 1..d {
        let index = match sampler {
            AngleSampler::Haar => i,
            AngleSampler::Reversed => d - i,
        };
        alpha[i] = spherical_angle(rng.random::<f64>(), index);
        phi[i] = 2.0 * PI * rng.random::<f64>();
    }
    let mut amps = vec![c(0.0); d];
    amps[0] = c(alpha[d - 1].cos());
    let mut sin_prod = 1.0;
    for j in 1..d {
        sin_prod *= alpha[d - j].sin();
        let radial = if j + 1 < d { alpha[d - 1 - j].cos() * sin_prod } else { sin_prod };
        amps[j] = Complex64::from_polar(radial, phi[d - j]);
    }
    PureState::new(n, amps)
}

/// Haar-random three-qubit pure state.
pub fn random_pure_3qubit<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    random_pure_state(3, rng).expect("three qubits are within the cap")
}

/// Random three-qubit pure state drawn with `sampler`.
pub fn random_pure_3qubit_with<R: Rng + ?Sized>(sampler: AngleSampler, rng: &mut R) -> PureState {
    random_pure_state_with(3, sampler, rng).expect("three qubits are within the cap")
}

/// Sampling scheme for random GHZ-diagonal states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzDiagonalMode {
    /// GHZ-basis-diagonal states violating the DME condition for pair 1.
    DmeViolating,
    /// GHZ-basis-diagonal states violating at least one of the four conditions.
    FullFamily,
    /// GHZ-basis-diagonal states satisfying all four conditions.
    DmeSatisfying,
    /// The PPT-entangled subfamily with `λ_2, λ_3, λ_4 ~ U(0.1, 10)`.
    BoundEntangled,
}

impl std::str::FromStr for GhzDiagonalMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dme" | "dme_violating" => Ok(Self::DmeViolating),
            "dme_family" | "full_family" => Ok(Self::FullFamily),
            "dme_satisfying" => Ok(Self::DmeSatisfying),
            "bound_entangled" => Ok(Self::BoundEntangled),
            other => Err(Error::invalid(format!("unknown GHZ-diagonal mode '{other}'"))),
        }
    }
}

/// Maximum draws before a rejection sampler gives up.
pub const REJECTION_BUDGET: usize = 10_000;

/// Margin of `|μ_k| − Σ_{j≠k} λ_j` for GHZ-basis-diagonal coefficients.
fn dme_margins(p: &GhzDiagonalParams) -> [f64; 4] {
    let total: f64 = (0..4).map(|j| (p.lambdas[j] * p.lambdas[7 - j]).sqrt()).sum();
    std::array::from_fn(|k| p.mus[k].abs() - (total - (p.lambdas[k] * p.lambdas[7 - k]).sqrt()))
}

/// Draws GHZ-diagonal coefficients according to `mode`.
///
/// For the DME modes, `λ_1…λ_4 ~ U(0,1)` mirrored onto `λ_8…λ_5` and
/// `μ_j ~ U(−λ_j, λ_j)`; draws are rejected until the mode's condition holds.
pub fn random_ghz_diagonal_params<R: Rng + ?Sized>(rng: &mut R, mode: GhzDiagonalMode) -> Result<GhzDiagonalParams> {
    for _ in 0..REJECTION_BUDGET {
        let p = match mode {
            GhzDiagonalMode::BoundEntangled => {
                let l2: f64 = rng.random_range(0.1..10.0);
                let l3: f64 = rng.random_range(0.1..10.0);
                let l4: f64 = rng.random_range(0.1..10.0);
                if (l2 * l3 - l4).abs() < 1e-3 {
                    continue;
                }
                return bound_entangled_params(l2, l3, l4);
            }
            _ => {
                let half: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
                let mus: [f64; 4] = std::array::from_fn(|j| half[j] * (2.0 * rng.random::<f64>() - 1.0));
                GhzDiagonalParams {
                    lambdas: [half[0], half[1], half[2], half[3], half[3], half[2], half[1], half[0]],
                    mus,
                }
            }
        };
        if !(p.normalization() > 0.0) {
            continue;
        }
        let margins = dme_margins(&p);
        let accept = match mode {
            GhzDiagonalMode::DmeViolating => margins[0] > 0.0,
            GhzDiagonalMode::FullFamily => margins.iter().any(|&m| m > 0.0),
            GhzDiagonalMode::DmeSatisfying => margins.iter().all(|&m| m <= 0.0),
            GhzDiagonalMode::BoundEntangled => unreachable!(),
        };
        if accept {
            return Ok(p);
        }
    }
    Err(Error::RejectionExhausted(REJECTION_BUDGET))
}

/// Random GHZ-diagonal density matrix; see [`random_ghz_diagonal_params`].
pub fn random_ghz_diagonal<R: Rng + ?Sized>(rng: &mut R, mode: GhzDiagonalMode) -> Result<DensityMatrix> {
    Ok(ghz_diagonal_unchecked(&random_ghz_diagonal_params(rng, mode)?))
}

/// A state addressed by name: `ghz:N`, `dicke:N:k`, `duer:N`, `smolin:n`,
/// `psi_s4:+` / `psi_s4:-`, `ghzdiag:file.json`, `plus:N`, `ones:N`, or a path
/// to a state JSON file.
pub fn from_spec(spec: &str) -> Result<State> {
    let parts: Vec<&str> = spec.split(':').collect();
    let int = |s: &str| -> Result<usize> {
        s.trim().parse::<usize>().map_err(|_| Error::invalid(format!("'{s}' is not a non-negative integer")))
    };
    let arity = |k: usize| -> Result<()> {
        if parts.len() == k {
            Ok(())
        } else {
            Err(Error::invalid(format!("state spec '{spec}' expects {} field(s)", k - 1)))
        }
    };
    match parts[0] {
        "ghz" => {
            arity(2)?;
            Ok(ghz(int(parts[1])?, 0.0)?.into())
        }
        "dicke" => {
            arity(3)?;
            Ok(dicke(int(parts[1])?, int(parts[2])?)?.into())
        }
        "duer" => {
            arity(2)?;
            Ok(duer(int(parts[1])?, 0.0)?.into())
        }
        "smolin" => {
            arity(2)?;
            Ok(smolin(int(parts[1])?)?.into())
        }
        "psi_s4" => {
            arity(2)?;
            let sign = match parts[1] {
                "+" | "plus" => Sign::Plus,
                "-" | "−" | "minus" => Sign::Minus,
                other => return Err(Error::invalid(format!("unknown sign '{other}'"))),
            };
            Ok(psi_s4(sign).into())
        }
        "plus" => {
            arity(2)?;
            Ok(plus(int(parts[1])?)?.into())
        }
        "ones" => {
            arity(2)?;
            Ok(ones(int(parts[1])?)?.into())
        }
        "ghzdiag" => {
            let path = spec.strip_prefix("ghzdiag:").unwrap_or_default();
            let text = std::fs::read_to_string(path)?;
            let params: GhzDiagonalParams = serde_json::from_str(&text)?;
            Ok(ghz_diagonal(&params)?.into())
        }
        _ if spec.ends_with(".json") && Path::new(spec).exists() => crate::io::load_state(spec),
        _ => Err(Error::invalid(format!("unknown state '{spec}'"))),
    }
}
