use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use super::qfi_weights;
use crate::qstate::{apply_collective, collective_spin, Axis, DensityMatrix, PureState, SpinDirection};
use crate::{Error, Result};

/// Real symmetric 3×3 matrix with `[Γ_C]_{ij}` indexed by `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GammaC([[f64; 3]; 3]);

impl GammaC {
    /// Symmetrizes `m` by averaging it with its transpose.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Self {
        let mut s = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] = 0.5 * (m[i][j] + m[j][i]);
            }
        }
        Self(s)
    }

    pub fn diag(x: f64, y: f64, z: f64) -> Self {
        Self([[x, 0.0, 0.0], [0.0, y, 0.0], [0.0, 0.0, z]])
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.map(|row| row.map(|v| v * factor)))
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_deviation(&self, other: &GammaC) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }

    /// `nᵀ Γ_C n`, the QFI for the generator `J_n`.
    pub fn quadratic_form(&self, n: &SpinDirection) -> f64 {
        let v = n.components();
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i] * self.0[i][j] * v[j];
            }
        }
        acc
    }

    fn to_nalgebra(self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.0[i][j])
    }

    /// Eigenvalues in descending order with unit eigenvectors.
    pub fn eigen(&self) -> [(f64, SpinDirection); 3] {
        let eig = SymmetricEigen::new(self.to_nalgebra());
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        idx.map(|k| {
            let v: Vector3<f64> = eig.eigenvectors.column(k).into_owned();
            (eig.eigenvalues[k], canonical_direction(v))
        })
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        self.eigen().map(|(l, _)| l)
    }

    /// `λ_max(Γ_C)` and its eigenvector, the optimal collective direction.
    pub fn fq_max(&self) -> (f64, SpinDirection) {
        self.eigen()[0]
    }

    /// `Tr(Γ_C) / 3`, the QFI averaged uniformly over the Bloch sphere.
    pub fn fq_avg(&self) -> f64 {
        self.trace() / 3.0
    }
}

/// Unit vector with sign fixed so the first non-negligible component is positive.
fn canonical_direction(v: Vector3<f64>) -> SpinDirection {
    let n = v.norm();
    let mut c = [v[0] / n, v[1] / n, v[2] / n];
    if let Some(first) = c.iter().copied().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            c = c.map(|x| -x);
        }
    }
    SpinDirection::normalized(c).expect("eigenvectors are nonzero")
}

/// `Γ_C` of a density matrix from its eigendecomposition.
pub fn gamma_c(rho: &DensityMatrix) -> GammaC {
    let n = rho.num_qubits();
    let spec = rho.spectrum();
    let w = qfi_weights(&spec);
    let d = rho.dim();
    let ops = Axis::ALL.map(|a| spec.transform(collective_spin(n, a).matrix()));
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    let wab = w[a * d + b];
                    if wab != 0.0 {
                        // A_j is Hermitian: ⟨b|J_j|a⟩ = conj(⟨a|J_j|b⟩)
                        acc += wab * (ops[i][(a, b)] * ops[j][(a, b)].conj()).re;
                    }
                }
            }
            g[i][j] = 2.0 * acc;
            g[j][i] = 2.0 * acc;
        }
    }
    GammaC(g)
}

/// `Γ_C` of a pure state: four times the symmetrized covariance of `J_x, J_y, J_z`.
pub fn gamma_c_pure(psi: &PureState) -> GammaC {
    let n = psi.num_qubits();
    let amps = psi.amplitudes();
    let v = Axis::ALL.map(|a| apply_collective(n, amps, a));
    let mean = v.clone().map(|vi| amps.dotc(&vi).re);
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let c = 4.0 * (v[i].dotc(&v[j]).re - mean[i] * mean[j]);
            g[i][j] = c;
            g[j][i] = c;
        }
    }
    GammaC(g)
}

/// `F_Q^max = λ_max(Γ_C)` and the optimal collective direction.
pub fn fq_max(rho: &DensityMatrix) -> (f64, SpinDirection) {
    gamma_c(rho).fq_max()
}

/// `F̄_Q = Tr(Γ_C) / 3`.
pub fn fq_avg(rho: &DensityMatrix) -> f64 {
    gamma_c(rho).fq_avg()
}

/// Mean of `nᵀ Γ_C n` over `num_directions` uniformly random unit vectors.
pub fn fq_avg_montecarlo(rho: &DensityMatrix, num_directions: usize, seed: u64) -> Result<f64> {
    if num_directions == 0 {
        return Err(Error::invalid("need at least one direction"));
    }
    let g = gamma_c(rho);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..num_directions {
        let v: [f64; 3] = UnitSphere.sample(&mut rng);
        acc += g.quadratic_form(&SpinDirection::normalized(v)?);
    }
    Ok(acc / num_directions as f64)
}
