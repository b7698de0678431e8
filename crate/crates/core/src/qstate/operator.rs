use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_qubits, max_abs_hermitian_deviation, qubit_mask, tol, Axis, CMatrix, CVector, Tensor};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hermitian matrix used as a phase-shift generator or observable.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        let dev = max_abs_hermitian_deviation(&mat);
        if dev > tol::HERMITIAN {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn spectrum(&self) -> super::Spectrum {
        super::eig_hermitian(&self.mat, tol::ZERO_CUT).expect("validated Hermitian")
    }

    /// Real linear combination `Σ c_k A_k`.
    pub fn linear_combination(terms: &[(f64, &HermitianOperator)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::invalid("empty linear combination"))?;
        let d = first.1.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (c, op) in terms {
            if op.dim() != d {
                return Err(Error::DimensionMismatch(d, op.dim()));
            }
            acc += op.matrix() * Complex64::new(*c, 0.0);
        }
        Ok(Self { mat: acc })
    }
}

impl Tensor for HermitianOperator {
    fn tensor(&self, rhs: &Self) -> Result<Self> {
        Ok(Self { mat: self.mat.kronecker(&rhs.mat) })
    }
}

/// Unit vector on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpinDirection([f64; 3]);

impl SpinDirection {
    /// Accepts vectors whose norm is within `1e-9` of one and renormalizes them.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::UNIT {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self([x / norm, y / norm, z / norm]))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn axis(axis: Axis) -> Self {
        let mut v = [0.0; 3];
        v[axis.index()] = 1.0;
        Self(v)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &SpinDirection) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// `n·σ` as a 2×2 matrix.
    pub fn pauli_matrix(&self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.0;
        [
            [Complex64::new(z, 0.0), Complex64::new(x, -y)],
            [Complex64::new(x, y), Complex64::new(-z, 0.0)],
        ]
    }
}

impl TryFrom<[f64; 3]> for SpinDirection {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<SpinDirection> for [f64; 3] {
    fn from(d: SpinDirection) -> Self {
        d.0
    }
}

/// Single-qubit Pauli matrix.
pub fn pauli(axis: Axis) -> [[Complex64; 2]; 2] {
    match axis {
        Axis::X => [[ZERO, ONE], [ONE, ZERO]],
        Axis::Y => [[ZERO, -I], [I, ZERO]],
        Axis::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// `Σ_l A_l^(l)` where `A_l = local(l)` acts on qubit position `l`.
fn sum_of_local_terms(n: usize, local: impl Fn(usize) -> [[Complex64; 2]; 2]) -> CMatrix {
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    for l in 0..n {
        let a = local(l);
        let mask = qubit_mask(n, l);
        for col in 0..d {
            let b = usize::from(col & mask != 0);
            for b_out in 0..2 {
                let v = a[b_out][b];
                if v != ZERO {
                    let row = if b_out == 1 { col | mask } else { col & !mask };
                    m[(row, col)] += v;
                }
            }
        }
    }
    m
}

/// Collective spin component `J_axis = ½ Σ_l σ_axis^(l)`.
pub fn collective_spin(n: usize, axis: Axis) -> HermitianOperator {
    let half = pauli(axis).map(|row| row.map(|z| z * 0.5));
    HermitianOperator { mat: sum_of_local_terms(n, |_| half) }
}

/// `J_n = n_x J_x + n_y J_y + n_z J_z`.
pub fn j_n(n: usize, direction: &SpinDirection) -> HermitianOperator {
    let half = direction.pauli_matrix().map(|row| row.map(|z| z * 0.5));
    HermitianOperator { mat: sum_of_local_terms(n, |_| half) }
}

/// Linear generator `½ Σ_l n_l·σ^(l)` with one direction per qubit.
pub fn local_generator(directions: &[SpinDirection]) -> Result<HermitianOperator> {
    check_qubits(directions.len())?;
    let n = directions.len();
    Ok(HermitianOperator {
        mat: sum_of_local_terms(n, |l| directions[l].pauli_matrix().map(|row| row.map(|z| z * 0.5))),
    })
}

/// Tensor product `A_1 ⊗ A_2 ⊗ …` of single-qubit matrices.
pub fn product_operator(factors: &[[[Complex64; 2]; 2]]) -> CMatrix {
    let mut acc = CMatrix::from_element(1, 1, ONE);
    for f in factors {
        let m = CMatrix::from_fn(2, 2, |r, c| f[r][c]);
        acc = acc.kronecker(&m);
    }
    acc
}

/// Applies `J_axis` to a state vector in `O(N 2^N)`.
pub fn apply_collective(n: usize, amps: &CVector, axis: Axis) -> CVector {
    let d = amps.len();
    debug_assert_eq!(d, 1usize << n);
    let mut out = CVector::zeros(d);
    for l in 0..n {
        let mask = qubit_mask(n, l);
        for i in 0..d {
            let a = amps[i];
            let one = i & mask != 0;
            match axis {
                Axis::Z => out[i] += if one { -a } else { a } * 0.5,
                Axis::X => out[i ^ mask] += a * 0.5,
                // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
                Axis::Y => out[i ^ mask] += if one { -I * a } else { I * a } * 0.5,
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_diag(op: &HermitianOperator) -> Vec<f64> {
        (0..op.dim()).map(|i| op.matrix()[(i, i)].re).collect()
    }

    #[test]
    fn jz_two_qubits() {
        let jz = collective_spin(2, Axis::Z);
        assert_eq!(real_diag(&jz), vec![1.0, 0.0, 0.0, -1.0]);
        assert!(jz.matrix().iter().filter(|z| z.norm() > 0.0).count() == 2);
    }

    #[test]
    fn jx_three_qubit_spectrum() {
        // brute-force eigensolve; multiplicities from spin-3/2 ⊕ 2×spin-1/2
        let ev = collective_spin(3, Axis::X).spectrum().eigenvalues;
        let expected = [1.5, 0.5, 0.5, 0.5, -0.5, -0.5, -0.5, -1.5];
        for (a, b) in ev.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn j_n_along_axis_matches_component() {
        for axis in Axis::ALL {
            assert_eq!(j_n(3, &SpinDirection::axis(axis)), collective_spin(3, axis));
        }
    }

    #[test]
    fn local_generator_reduces_to_collective_and_pauli() {
        let z = SpinDirection::axis(Axis::Z);
        assert_eq!(local_generator(&[z; 4]).unwrap(), collective_spin(4, Axis::Z));
        let h = local_generator(&[SpinDirection::axis(Axis::X)]).unwrap();
        let expected = CMatrix::from_fn(2, 2, |r, c| pauli(Axis::X)[r][c] * 0.5);
        assert_eq!(h.matrix(), &expected);
    }

    #[test]
    fn local_generator_spectrum_bounded_by_half_n() {
        let dirs = [
            SpinDirection::normalized([0.3, -0.2, 0.9]).unwrap(),
            SpinDirection::normalized([-1.0, 0.5, 0.1]).unwrap(),
            SpinDirection::normalized([0.0, 1.0, -1.0]).unwrap(),
        ];
        let s = local_generator(&dirs).unwrap().spectrum();
        assert!((s.max() - 1.5).abs() < 1e-12 && (s.min() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn direction_validation() {
        assert!(matches!(SpinDirection::new(1.0, 1.0, 0.0), Err(Error::NotUnit(_))));
        assert!(SpinDirection::new(0.0, 0.0, 1.0 + 5e-10).is_ok());
        assert!(SpinDirection::normalized([0.0; 3]).is_err());
    }

    #[test]
    fn apply_collective_matches_dense() {
        let v = CVector::from_fn(8, |i, _| Complex64::new(i as f64 * 0.1 - 0.3, 0.05 * i as f64));
        for axis in Axis::ALL {
            let dense = collective_spin(3, axis).matrix() * &v;
            let fast = apply_collective(3, &v, axis);
            assert!((dense - fast).norm() < 1e-14);
        }
    }

    #[test]
    fn sigma_z_tensor_identity() {
        let sz = HermitianOperator::new(CMatrix::from_fn(2, 2, |r, c| pauli(Axis::Z)[r][c])).unwrap();
        let id = HermitianOperator::new(CMatrix::identity(2, 2)).unwrap();
        let ev = sz.tensor(&id).unwrap().spectrum().eigenvalues;
        assert_eq!(ev, vec![1.0, 1.0, -1.0, -1.0]);
    }
}
