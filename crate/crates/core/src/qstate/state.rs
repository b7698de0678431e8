use num_complex::Complex64;

use super::{
    check_qubits, eig_hermitian, max_abs_hermitian_deviation, qubit_mask, tol, CMatrix, CVector,
    HermitianOperator, Spectrum, Tensor,
};
use crate::{Error, Result};

/// Normalized pure state of `N` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: CVector,
}

impl PureState {
    /// Builds a state from (possibly unnormalized) amplitudes of length `2^N`.
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(num_qubits)?;
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch { expected, got: amplitudes.len() });
        }
        let mut amps = CVector::from_vec(amplitudes);
        let norm = amps.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::ZeroVector);
        }
        amps.unscale_mut(norm);
        Ok(Self { num_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let d = 1usize << num_qubits;
        if index >= d {
            return Err(Error::invalid(format!("basis index {index} out of range for {num_qubits} qubits")));
        }
        let mut amps = CVector::zeros(d);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub(crate) fn from_normalized_unchecked(num_qubits: usize, amps: CVector) -> Self {
        debug_assert!((amps.norm() - 1.0).abs() < 1e-10);
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { num_qubits: self.num_qubits, mat: &self.amps * self.amps.adjoint() }
    }

    pub fn expectation(&self, op: &HermitianOperator) -> Result<f64> {
        self.check_dim(op)?;
        Ok(self.amps.dotc(&(op.matrix() * &self.amps)).re)
    }

    pub fn variance(&self, op: &HermitianOperator) -> Result<f64> {
        self.check_dim(op)?;
        let v = op.matrix() * &self.amps;
        let mean = self.amps.dotc(&v).re;
        Ok(v.norm_squared() - mean * mean)
    }

    fn check_dim(&self, op: &HermitianOperator) -> Result<()> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), op.dim()));
        }
        Ok(())
    }
}

impl Tensor for PureState {
    fn tensor(&self, rhs: &Self) -> Result<Self> {
        check_qubits(self.num_qubits + rhs.num_qubits)?;
        Ok(Self { num_qubits: self.num_qubits + rhs.num_qubits, amps: self.amps.kronecker(&rhs.amps) })
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix on `N` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and positivity (−1e-9).
    pub fn new(num_qubits: usize, mat: CMatrix) -> Result<Self> {
        check_qubits(num_qubits)?;
        let d = 1usize << num_qubits;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(d, mat.nrows().max(mat.ncols())));
        }
        let dev = max_abs_hermitian_deviation(&mat);
        if dev > tol::HERMITIAN {
            return Err(Error::NotHermitian(dev));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(Error::BadTrace(tr.re));
        }
        let min = eig_hermitian(&mat, tol::ZERO_CUT)?.min();
        if min < -tol::PSD {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { num_qubits, mat })
    }

    pub(crate) fn from_matrix_unchecked(num_qubits: usize, mat: CMatrix) -> Self {
        Self { num_qubits, mat }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.to_density()
    }

    /// `𝟙 / 2^N`.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let d = 1usize << num_qubits;
        Ok(Self { num_qubits, mat: CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0) })
    }

    /// `p|ψ⟩⟨ψ| + (1 − p) 𝟙/2^N`.
    pub fn mix_with_identity(psi: &PureState, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("mixing weight {p} outside [0, 1]")));
        }
        let d = psi.dim();
        let mut mat = psi.to_density().mat * Complex64::new(p, 0.0);
        let diag = (1.0 - p) / d as f64;
        for i in 0..d {
            mat[(i, i)] += diag;
        }
        Ok(Self { num_qubits: psi.num_qubits(), mat })
    }

    /// Convex combination `p·self + (1 − p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("mixing weight {p} outside [0, 1]")));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let mat = &self.mat * Complex64::new(p, 0.0) + &other.mat * Complex64::new(1.0 - p, 0.0);
        Ok(Self { num_qubits: self.num_qubits, mat })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Zero-based entry `ρ_{ij}`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigendecomposition with the zero cut scaled by the trace.
    pub fn spectrum(&self) -> Spectrum {
        let cut = tol::ZERO_CUT * self.trace().abs().max(f64::MIN_POSITIVE);
        eig_hermitian(&self.mat, cut).expect("density matrices are Hermitian")
    }

    pub fn expectation(&self, op: &HermitianOperator) -> Result<f64> {
        self.check_dim(op)?;
        Ok(trace_of_product(&self.mat, op.matrix()).re)
    }

    pub fn variance(&self, op: &HermitianOperator) -> Result<f64> {
        self.check_dim(op)?;
        let a = op.matrix();
        let mean = trace_of_product(&self.mat, a).re;
        let sq = trace_of_product(&self.mat, &(a * a)).re;
        Ok(sq - mean * mean)
    }

    fn check_dim(&self, op: &HermitianOperator) -> Result<()> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), op.dim()));
        }
        Ok(())
    }

    /// `U ρ U†`; the caller guarantees unitarity.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self { num_qubits: self.num_qubits, mat: u * &self.mat * u.adjoint() }
    }

    /// Partial transpose over the given zero-based qubit positions.
    pub fn partial_transpose(&self, subset: &[usize]) -> Result<CMatrix> {
        let mask = self.subset_mask(subset)?;
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let ii = (i & !mask) | (j & mask);
                let jj = (j & !mask) | (i & mask);
                out[(ii, jj)] = self.mat[(i, j)];
            }
        }
        Ok(out)
    }

    /// Smallest eigenvalue of the partial transpose over `subset`.
    pub fn min_pt_eigenvalue(&self, subset: &[usize]) -> Result<f64> {
        let pt = self.partial_transpose(subset)?;
        Ok(eig_hermitian(&pt, tol::ZERO_CUT)?.min())
    }

    /// Whether the partial transpose over `subset` has no eigenvalue below `-tol`.
    pub fn is_ppt(&self, subset: &[usize], tol: f64) -> Result<bool> {
        Ok(self.min_pt_eigenvalue(subset)? >= -tol)
    }

    fn subset_mask(&self, subset: &[usize]) -> Result<usize> {
        let n = self.num_qubits;
        let mut mask = 0usize;
        for &q in subset {
            if q >= n {
                return Err(Error::invalid(format!("qubit {q} out of range for {n} qubits")));
            }
            mask |= qubit_mask(n, q);
        }
        if mask == 0 || mask == (1usize << n) - 1 {
            return Err(Error::invalid("partial transpose needs a nonempty proper subset"));
        }
        Ok(mask)
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, rhs: &Self) -> Result<Self> {
        check_qubits(self.num_qubits + rhs.num_qubits)?;
        Ok(Self { num_qubits: self.num_qubits + rhs.num_qubits, mat: self.mat.kronecker(&rhs.mat) })
    }
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// A pure or mixed state, as loaded from files or the state zoo.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn num_qubits(&self) -> usize {
        match self {
            State::Pure(p) => p.num_qubits(),
            State::Mixed(r) => r.num_qubits(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.to_density(),
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(p) => Some(p),
            State::Mixed(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityMatrix> for State {
    fn from(r: DensityMatrix) -> Self {
        State::Mixed(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{collective_spin, Axis};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x)).collect()
    }

    fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn make_pure_examples() {
        let zero = PureState::new(1, real(&[1.0, 0.0])).unwrap();
        assert_eq!(zero.amplitude(0), c(1.0));

        let s = 0.5f64.sqrt();
        let bell = PureState::new(2, real(&[s, 0.0, 0.0, s])).unwrap();
        assert!((bell.amplitudes().norm() - 1.0).abs() < 1e-12);

        let ghz = PureState::new(3, real(&[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0])).unwrap();
        assert!((ghz.amplitude(0).re - s).abs() < 1e-15 && (ghz.amplitude(7).re - s).abs() < 1e-15);
    }

    #[test]
    fn make_pure_errors() {
        assert!(matches!(PureState::new(2, real(&[0.0; 4])), Err(Error::ZeroVector)));
        assert!(matches!(PureState::new(2, real(&[1.0; 3])), Err(Error::LengthMismatch { expected: 4, got: 3 })));
        assert!(matches!(PureState::basis(13, 0), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn density_from_pure_examples() {
        let rho = PureState::basis(1, 0).unwrap().to_density();
        assert_eq!(rho.matrix(), &CMatrix::from_diagonal(&CVector::from_vec(real(&[1.0, 0.0]))));

        let ghz = PureState::new(2, real(&[1.0, 0.0, 0.0, 1.0])).unwrap().to_density();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((ghz.entry(i, j).re - 0.5).abs() < 1e-15);
        }
        assert!((ghz.purity() - 1.0).abs() < 1e-12);
        assert!((ghz.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_ordering() {
        let k0 = PureState::basis(1, 0).unwrap();
        let k1 = PureState::basis(1, 1).unwrap();
        let k01 = k0.tensor(&k1).unwrap();
        assert_eq!(k01.amplitude(1), c(1.0));

        let ghz2 = PureState::new(2, real(&[1.0, 0.0, 0.0, 1.0])).unwrap();
        let four = ghz2.tensor(&ghz2).unwrap();
        let support: Vec<usize> = (0..16).filter(|&i| four.amplitude(i).norm() > 0.0).collect();
        assert_eq!(support, vec![0b0000, 0b0011, 0b1100, 0b1111]);
    }

    #[test]
    fn partial_transpose_examples() {
        let rho = PureState::basis(2, 0b01).unwrap().to_density();
        assert!(rho.is_ppt(&[0], 1e-9).unwrap());

        let bell = PureState::new(2, real(&[1.0, 0.0, 0.0, 1.0])).unwrap().to_density();
        let min = bell.min_pt_eigenvalue(&[0]).unwrap();
        assert!((min + 0.5).abs() < 1e-12);
        assert!(!bell.is_ppt(&[0], 1e-9).unwrap());

        assert!(bell.partial_transpose(&[]).is_err());
        assert!(bell.partial_transpose(&[0, 1]).is_err());
        assert!(bell.partial_transpose(&[2]).is_err());
    }

    #[test]
    fn partial_transpose_involution_preserves_trace() {
        let v: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64 - 2.5, (i * i) as f64 * 0.1)).collect();
        let rho = PureState::new(3, v).unwrap().to_density();
        let pt = rho.partial_transpose(&[0, 2]).unwrap();
        assert_eq!(pt.trace(), rho.matrix().trace());
        let back = DensityMatrix::from_matrix_unchecked(3, pt).partial_transpose(&[0, 2]).unwrap();
        assert_eq!(&back, rho.matrix());
    }

    #[test]
    fn mix_with_identity_examples() {
        let s = 0.5f64.sqrt();
        let ghz = PureState::new(2, real(&[s, 0.0, 0.0, s])).unwrap();
        assert!(max_dev(DensityMatrix::mix_with_identity(&ghz, 1.0).unwrap().matrix(), ghz.to_density().matrix()) < 1e-15);
        let mixed = DensityMatrix::mix_with_identity(&ghz, 0.0).unwrap();
        assert!(mixed.spectrum().eigenvalues.iter().all(|l| (l - 0.25).abs() < 1e-15));
        assert!(DensityMatrix::mix_with_identity(&ghz, 1.5).is_err());

        let mut amps = vec![c(0.0); 16];
        amps[0] = c(1.0);
        amps[15] = c(1.0);
        let ghz4 = PureState::new(4, amps).unwrap();
        let ev = DensityMatrix::mix_with_identity(&ghz4, 0.5).unwrap().spectrum().eigenvalues;
        assert!((ev[0] - (0.5 + 1.0 / 32.0)).abs() < 1e-12);
        assert!(ev[1..].iter().all(|l| (l - 1.0 / 32.0).abs() < 1e-12));
    }

    #[test]
    fn expectation_and_variance_examples() {
        let ones = PureState::basis(4, 15).unwrap();
        let jz = collective_spin(4, Axis::Z);
        assert!((ones.expectation(&jz).unwrap() + 2.0).abs() < 1e-12);
        assert!((ones.to_density().expectation(&jz).unwrap() + 2.0).abs() < 1e-12);

        for n in 2..=6 {
            let d = 1 << n;
            let mut amps = vec![c(0.0); d];
            amps[0] = c(1.0);
            amps[d - 1] = c(1.0);
            let ghz = PureState::new(n, amps).unwrap();
            let jz = collective_spin(n, Axis::Z);
            let expected = (n * n) as f64 / 4.0;
            assert!((ghz.variance(&jz).unwrap() - expected).abs() < 1e-10);
            assert!((ghz.to_density().variance(&jz).unwrap() - expected).abs() < 1e-10);
        }
        assert!(matches!(ones.expectation(&collective_spin(3, Axis::Z)), Err(Error::DimensionMismatch(16, 8))));
    }

    #[test]
    fn density_validation() {
        let mut m = CMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(1, m.clone()), Err(Error::BadTrace(_))));
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(matches!(DensityMatrix::new(1, m.clone()), Err(Error::NotPositive(_))));
        m[(0, 1)] = c(0.1);
        assert!(matches!(DensityMatrix::new(1, m), Err(Error::NotHermitian(_))));
        let ok = CMatrix::identity(2, 2) * c(0.5);
        assert!(DensityMatrix::new(1, ok).is_ok());
    }
}
