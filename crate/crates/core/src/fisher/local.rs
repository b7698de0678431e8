//! See-saw maximization of `4 Var(H_lin)` over the local directions of
//! `H_lin = ½ Σ_l n_l·σ^(l)`.
//!
//! Writing `F(n) = Σ_{l,l'} n_lᵀ C_{ll'} n_{l'}` with `C` the symmetrized
//! covariance of all single-qubit Pauli operators, the objective restricted
//! to one qubit is `nᵀ A n + 2 bᵀ n` with `A = C_{ll}` and
//! `b = Σ_{l'≠l} C_{ll'} n_{l'}`. Each sweep maximizes that exactly on the
//! unit sphere, so the objective never decreases.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::Serialize;

use super::{as_pure, gamma_c_pure};
use crate::qstate::{qubit_mask, Axis, CVector, DensityMatrix, PureState, SpinDirection};
use crate::Result;

#[derive(Clone, Copy, Debug)]
pub struct SeeSawOptions {
    /// Maximum number of full sweeps per start.
    pub max_iters: usize,
    /// Random starts in addition to the collective optimum.
    pub restarts: usize,
    /// Stop once a sweep improves the objective by less than this.
    pub tolerance: f64,
}

impl Default for SeeSawOptions {
    fn default() -> Self {
        Self { max_iters: 100, restarts: 10, tolerance: 1e-10 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalOptimum {
    pub value: f64,
    pub directions: Vec<SpinDirection>,
}

/// Covariance matrix `C[(l,a),(l',b)] = Re⟨σ_a^l σ_b^l'⟩ − ⟨σ_a^l⟩⟨σ_b^l'⟩`.
fn pauli_covariance(psi: &PureState) -> DMatrix<f64> {
    let n = psi.num_qubits();
    let amps = psi.amplitudes();
    let mut vecs: Vec<CVector> = Vec::with_capacity(3 * n);
    for l in 0..n {
        for axis in Axis::ALL {
            vecs.push(apply_pauli(n, amps, l, axis));
        }
    }
    let means: Vec<f64> = vecs.iter().map(|v| amps.dotc(v).re).collect();
    let m = 3 * n;
    let mut c = DMatrix::zeros(m, m);
    for p in 0..m {
        for q in p..m {
            let v = vecs[p].dotc(&vecs[q]).re - means[p] * means[q];
            c[(p, q)] = v;
            c[(q, p)] = v;
        }
    }
    c
}

fn apply_pauli(n: usize, amps: &CVector, qubit: usize, axis: Axis) -> CVector {
    use num_complex::Complex64;
    let mask = qubit_mask(n, qubit);
    let mut out = CVector::zeros(amps.len());
    let i_unit = Complex64::new(0.0, 1.0);
    for idx in 0..amps.len() {
        let a = amps[idx];
        let one = idx & mask != 0;
        match axis {
            Axis::X => out[idx ^ mask] = a,
            Axis::Y => out[idx ^ mask] = if one { -i_unit * a } else { i_unit * a },
            Axis::Z => out[idx] = if one { -a } else { a },
        }
    }
    out
}

fn objective(c: &DMatrix<f64>, dirs: &[Vector3<f64>]) -> f64 {
    let n = dirs.len();
    let mut acc = 0.0;
    for l in 0..n {
        for lp in 0..n {
            for a in 0..3 {
                for b in 0..3 {
                    acc += dirs[l][a] * c[(3 * l + a, 3 * lp + b)] * dirs[lp][b];
                }
            }
        }
    }
    acc
}

/// Maximizes `nᵀ A n + 2 bᵀ n` over unit vectors `n` (trust-region subproblem).
pub(crate) fn maximize_on_sphere(a: &Matrix3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    let eig = SymmetricEigen::new(*a);
    let q = eig.eigenvectors;
    let vals = eig.eigenvalues;
    let top = (0..3).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    let a_max = vals[top];
    let coef = q.transpose() * b;
    let bnorm = b.norm();
    let scale = a.abs().max().max(bnorm).max(1.0);

    if bnorm <= 1e-14 * scale {
        return q.column(top).into_owned();
    }

    // Stationary points satisfy (μ − A) n = b with μ ≥ λ_max(A).
    let norm_at = |mu: f64| -> f64 {
        (0..3).map(|i| (coef[i] / (mu - vals[i])).powi(2)).sum::<f64>()
    };

    let degenerate: Vec<bool> = (0..3).map(|i| a_max - vals[i] <= 1e-12 * scale).collect();
    let top_weight: f64 = (0..3).filter(|&i| degenerate[i]).map(|i| coef[i] * coef[i]).sum();
    if top_weight.sqrt() <= 1e-12 * scale {
        // Hard case: the linear term has no weight on the top eigenspace.
        let rest: f64 = (0..3)
            .filter(|&i| !degenerate[i])
            .map(|i| (coef[i] / (a_max - vals[i])).powi(2))
            .sum();
        if rest <= 1.0 {
            let mut y = Vector3::zeros();
            for i in 0..3 {
                if !degenerate[i] {
                    y[i] = coef[i] / (a_max - vals[i]);
                }
            }
            y[top] = (1.0 - rest).max(0.0).sqrt();
            return q * y;
        }
    }

    let mut lo = a_max;
    let mut hi = a_max + bnorm;
    while norm_at(hi) > 1.0 {
        hi += bnorm;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_at(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = hi;
    let y = Vector3::from_fn(|i, _| coef[i] / (mu - vals[i]));
    let v = q * y;
    v / v.norm()
}

fn block(c: &DMatrix<f64>, l: usize, lp: usize) -> Matrix3<f64> {
    Matrix3::from_fn(|a, b| c[(3 * l + a, 3 * lp + b)])
}

fn see_saw(c: &DMatrix<f64>, mut dirs: Vec<Vector3<f64>>, opts: &SeeSawOptions) -> (f64, Vec<Vector3<f64>>) {
    let n = dirs.len();
    let mut value = objective(c, &dirs);
    for _ in 0..opts.max_iters {
        for l in 0..n {
            let a = block(c, l, l);
            let mut b = Vector3::zeros();
            for lp in 0..n {
                if lp != l {
                    b += block(c, l, lp) * dirs[lp];
                }
            }
            let candidate = maximize_on_sphere(&a, &b);
            let old = dirs[l];
            let f_old = old.dot(&(a * old)) + 2.0 * b.dot(&old);
            let f_new = candidate.dot(&(a * candidate)) + 2.0 * b.dot(&candidate);
            if f_new >= f_old {
                dirs[l] = candidate;
            }
        }
        let next = objective(c, &dirs);
        let gain = next - value;
        value = value.max(next);
        if gain < opts.tolerance {
            break;
        }
    }
    (value, dirs)
}

/// Maximizes `F_Q[ψ; H_lin] = 4 Var(H_lin)` over local directions.
///
/// The first start uses the optimal collective direction on every qubit, so
/// the result is never below `λ_max(Γ_C)`; `restarts` further starts are
/// drawn uniformly from the sphere. Ties keep the first-found optimum.
pub fn optimize_local_directions(psi: &PureState, opts: &SeeSawOptions, seed: u64) -> LocalOptimum {
    let n = psi.num_qubits();
    let c = pauli_covariance(psi);
    let (_, collective) = gamma_c_pure(psi).fq_max();
    let cv = collective.components();
    let start = vec![Vector3::new(cv[0], cv[1], cv[2]); n];
    let (mut best_val, mut best_dirs) = see_saw(&c, start, opts);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..opts.restarts {
        let start: Vec<Vector3<f64>> = (0..n)
            .map(|_| {
                let v: [f64; 3] = UnitSphere.sample(&mut rng);
                Vector3::new(v[0], v[1], v[2])
            })
            .collect();
        let (val, dirs) = see_saw(&c, start, opts);
        if val > best_val + opts.tolerance {
            best_val = val;
            best_dirs = dirs;
        }
    }
    LocalOptimum {
        value: best_val,
        directions: best_dirs
            .into_iter()
            .map(|v| SpinDirection::normalized([v[0], v[1], v[2]]).expect("unit vectors"))
            .collect(),
    }
}

/// As [`optimize_local_directions`] for a density matrix that must be pure.
pub fn optimize_local_directions_mixed(rho: &DensityMatrix, opts: &SeeSawOptions, seed: u64) -> Result<LocalOptimum> {
    let psi = as_pure(rho)?;
    Ok(optimize_local_directions(&psi, opts, seed))
}
