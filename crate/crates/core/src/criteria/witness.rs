//! Fidelity witness `W = ½𝟙 − |GHZ⟩⟨GHZ|`, optionally optimized over local
//! unitaries by exact single-qubit updates.

use nalgebra::{Matrix2, Matrix3, Rotation3, UnitQuaternion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::qstate::{pauli, qubit_mask, Axis, CMatrix, CVector, DensityMatrix, PureState};
use crate::{Error, Result};

pub const DEFAULT_WITNESS_RESTARTS: usize = 20;

const MAX_SWEEPS: usize = 200;
const SWEEP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMode {
    /// `½ − ⟨GHZ|ρ|GHZ⟩`.
    Fixed,
    /// `½ − max_U ⟨GHZ|UρU†|GHZ⟩` over `U = U_1 ⊗ … ⊗ U_N`, from the identity
    /// and `restarts` random starting points.
    Optimized { restarts: usize },
}

impl WitnessMode {
    pub fn optimized() -> Self {
        WitnessMode::Optimized { restarts: DEFAULT_WITNESS_RESTARTS }
    }
}

/// Expectation value of the GHZ fidelity witness. Negative values prove
/// genuine `N`-partite entanglement.
pub fn ghz_witness(rho: &DensityMatrix, mode: WitnessMode, seed: u64) -> Result<f64> {
    let n = rho.num_qubits();
    if n < 2 {
        return Err(Error::invalid("the GHZ witness needs at least two qubits"));
    }
    let fidelity = match mode {
        WitnessMode::Fixed => ghz_fidelity(rho.matrix()),
        WitnessMode::Optimized { restarts } => match crate::fisher::as_pure(rho) {
            Ok(psi) => PureObjective::new(n, psi.amplitudes().clone()).optimize(restarts, seed),
            Err(_) => MixedObjective::new(n, rho.matrix().clone()).optimize(restarts, seed),
        },
    };
    Ok(0.5 - fidelity)
}

/// [`ghz_witness`] for a state vector, skipping the purity check.
pub fn ghz_witness_pure(psi: &PureState, mode: WitnessMode, seed: u64) -> Result<f64> {
    let n = psi.num_qubits();
    if n < 2 {
        return Err(Error::invalid("the GHZ witness needs at least two qubits"));
    }
    let v = psi.amplitudes();
    let fidelity = match mode {
        WitnessMode::Fixed => 0.5 * (v[0] + v[v.len() - 1]).norm_sqr(),
        WitnessMode::Optimized { restarts } => PureObjective::new(n, v.clone()).optimize(restarts, seed),
    };
    Ok(0.5 - fidelity)
}

fn ghz_fidelity(m: &CMatrix) -> f64 {
    let last = m.nrows() - 1;
    0.5 * (m[(0, 0)] + m[(last, last)] + m[(0, last)] + m[(last, 0)]).re
}

/// Index of the basis state with qubit `l` set to `c` and every other qubit
/// set to `a`.
fn ghz_index(n: usize, l: usize, a: usize, c: usize) -> usize {
    let all = (1usize << n) - 1;
    let mask = qubit_mask(n, l);
    let base = if a == 0 { 0 } else { all & !mask };
    if c == 0 {
        base
    } else {
        base | mask
    }
}

/// Applies a single-qubit matrix to qubit `l` of a state vector.
fn apply_local(n: usize, l: usize, u: &Matrix2<Complex64>, v: &mut CVector) {
    let mask = qubit_mask(n, l);
    for i in 0..v.len() {
        if i & mask == 0 {
            let (a, b) = (v[i], v[i | mask]);
            v[i] = u[(0, 0)] * a + u[(0, 1)] * b;
            v[i | mask] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
    }
}

/// `ρ ↦ (u on qubit l) ρ (u on qubit l)†`.
fn conjugate_local(n: usize, l: usize, u: &Matrix2<Complex64>, m: &mut CMatrix) {
    let d = m.nrows();
    for col in 0..d {
        let mut column = m.column(col).into_owned();
        apply_local(n, l, u, &mut column);
        m.set_column(col, &column);
    }
    let ud = u.map(|z| z.conj());
    for row in 0..d {
        let mut r: CVector = m.row(row).transpose();
        apply_local(n, l, &ud, &mut r);
        m.set_row(row, &r.transpose());
    }
}

/// Haar-random element of SU(2) from a uniformly random unit quaternion.
fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    su2_from_quaternion(q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm)
}

/// `w𝟙 − i(xσ_x + yσ_y + zσ_z)`.
fn su2_from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::new(w, -z),
        Complex64::new(-y, -x),
        Complex64::new(y, -x),
        Complex64::new(w, z),
    )
}

/// Element `U` of SU(2) with `U σ_j U† = Σ_i rot_ij σ_i`.
pub(crate) fn su2_from_rotation(rot: &Matrix3<f64>) -> Matrix2<Complex64> {
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*rot));
    su2_from_quaternion(q.w, q.i, q.j, q.k)
}

/// Rotation in SO(3) maximizing `Tr(Oᵀ K)`.
fn procrustes(k: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = k.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut fix = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        fix[(2, 2)] = -1.0;
    }
    u * fix * v_t
}

struct PureObjective {
    n: usize,
    psi: CVector,
}

impl PureObjective {
    fn new(n: usize, psi: CVector) -> Self {
        Self { n, psi }
    }

    fn apply_all(&self, us: &[Matrix2<Complex64>], skip: Option<usize>) -> CVector {
        let mut v = self.psi.clone();
        for (l, u) in us.iter().enumerate() {
            if Some(l) != skip {
                apply_local(self.n, l, u, &mut v);
            }
        }
        v
    }

    fn value(&self, us: &[Matrix2<Complex64>]) -> f64 {
        let v = self.apply_all(us, None);
        0.5 * (v[0] + v[v.len() - 1]).norm_sqr()
    }

    /// `⟨GHZ|(U_l ⊗ rest)|ψ⟩ ∝ Tr(U_l M)`, maximized in modulus by the polar
    /// factor of `M†`.
    fn update(&self, us: &mut [Matrix2<Complex64>], l: usize) {
        let v = self.apply_all(us, Some(l));
        let mut m = Matrix2::zeros();
        for a in 0..2 {
            for c in 0..2 {
                m[(c, a)] = v[ghz_index(self.n, l, a, c)];
            }
        }
        let svd = m.svd(true, true);
        let (w, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        us[l] = v_t.adjoint() * w.adjoint();
    }

    fn optimize(&self, restarts: usize, seed: u64) -> f64 {
        optimize_with(self.n, restarts, seed, |us| self.value(us), |us, l| self.update(us, l))
    }
}

struct MixedObjective {
    n: usize,
    rho: CMatrix,
}

impl MixedObjective {
    fn new(n: usize, rho: CMatrix) -> Self {
        Self { n, rho }
    }

    fn conjugate_all(&self, us: &[Matrix2<Complex64>], skip: Option<usize>) -> CMatrix {
        let mut m = self.rho.clone();
        for (l, u) in us.iter().enumerate() {
            if Some(l) != skip {
                conjugate_local(self.n, l, u, &mut m);
            }
        }
        m
    }

    fn value(&self, us: &[Matrix2<Complex64>]) -> f64 {
        ghz_fidelity(&self.conjugate_all(us, None))
    }

    /// With the other qubits fixed the fidelity is `const + Tr(Oᵀ K)` in the
    /// rotation `O` induced by `U_l`; the best `O` is a Procrustes solution.
    fn update(&self, us: &mut [Matrix2<Complex64>], l: usize) {
        let m = self.conjugate_all(us, Some(l));
        let paulis = Axis::ALL.map(|a| {
            let p = pauli(a);
            Matrix2::new(p[0][0], p[0][1], p[1][0], p[1][1])
        });
        let mut k = Matrix3::zeros();
        for a in 0..2 {
            for b in 0..2 {
                let r = Matrix2::from_fn(|c, d| 0.5 * m[(ghz_index(self.n, l, a, c), ghz_index(self.n, l, b, d))]);
                for (j, pj) in paulis.iter().enumerate() {
                    let rj = 0.5 * (pj * r).trace();
                    for (i, pi) in paulis.iter().enumerate() {
                        k[(i, j)] += (rj * pi[(a, b)]).re;
                    }
                }
            }
        }
        us[l] = su2_from_rotation(&procrustes(&k));
    }

    fn optimize(&self, restarts: usize, seed: u64) -> f64 {
        optimize_with(self.n, restarts, seed, |us| self.value(us), |us, l| self.update(us, l))
    }
}

fn optimize_with(
    n: usize,
    restarts: usize,
    seed: u64,
    value: impl Fn(&[Matrix2<Complex64>]) -> f64,
    update: impl Fn(&mut [Matrix2<Complex64>], usize),
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for start in 0..=restarts {
        let mut us: Vec<Matrix2<Complex64>> = if start == 0 {
            vec![Matrix2::identity(); n]
        } else {
            (0..n).map(|_| random_su2(&mut rng)).collect()
        };
        let mut current = value(&us);
        for _ in 0..MAX_SWEEPS {
            for l in 0..n {
                update(&mut us, l);
            }
            let next = value(&us);
            let done = next - current < SWEEP_TOLERANCE;
            current = current.max(next);
            if done {
                break;
            }
        }
        best = best.max(current);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{pauli, Axis};

    #[test]
    fn su2_matches_rotation_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = random_su2(&mut rng);
            let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(
                procrustes(&Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal))),
            ));
            let rot = q.to_rotation_matrix().into_inner();
            let v = su2_from_rotation(&rot);
            let sig = Axis::ALL.map(|a| {
                let p = pauli(a);
                Matrix2::new(p[0][0], p[0][1], p[1][0], p[1][1])
            });
            for j in 0..3 {
                let lhs = v * sig[j] * v.adjoint();
                let rhs = sig[0] * Complex64::from(rot[(0, j)])
                    + sig[1] * Complex64::from(rot[(1, j)])
                    + sig[2] * Complex64::from(rot[(2, j)]);
                assert!((lhs - rhs).norm() < 1e-12);
            }
            assert!((u * u.adjoint() - Matrix2::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_and_mixed_searches_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [2, 3, 4] {
            for _ in 0..5 {
                let psi = crate::statezoo::random_pure_state(n, &mut rng).unwrap();
                let a = PureObjective::new(n, psi.amplitudes().clone()).optimize(20, 1);
                let b = MixedObjective::new(n, psi.to_density().matrix().clone()).optimize(20, 1);
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn procrustes_is_rotation() {
        let k = Matrix3::new(1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.0, 0.0, -2.0);
        let o = procrustes(&k);
        assert!((o.transpose() * o - Matrix3::identity()).norm() < 1e-12);
        assert!((o.determinant() - 1.0).abs() < 1e-12);
    }
}
