use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{max_abs_hermitian_deviation, tol, CMatrix};
use crate::{Error, Result};

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
///
/// Column `k` of `eigenvectors` belongs to `eigenvalues[k]`. `zero_cut` is the
/// threshold below which an eigenvalue (or a sum of two) is treated as zero.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    pub zero_cut: f64,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `zero_cut`.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > self.zero_cut).count()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(l);
        }
        &scaled * self.eigenvectors.adjoint()
    }

    /// Matrix elements `⟨k|A|k'⟩` of `a` in the eigenbasis.
    pub fn transform(&self, a: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails if `m` is not square or deviates from Hermiticity by more than
/// [`tol::HERMITIAN`] in any entry.
pub fn eig_hermitian(m: &CMatrix, zero_cut: f64) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let dev = max_abs_hermitian_deviation(m);
    if dev > tol::HERMITIAN {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let d = m.nrows();
    let mut vectors = CMatrix::zeros(d, d);
    let mut values = Vec::with_capacity(d);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        // Fix the gauge: largest component real positive.
        let (mut pivot, mut best) = (Complex64::new(1.0, 0.0), -1.0);
        for z in col.iter() {
            if z.norm() > best + 1e-12 {
                best = z.norm();
                pivot = *z;
            }
        }
        let phase = if best > 0.0 { pivot.conj() / pivot.norm() } else { Complex64::new(1.0, 0.0) };
        vectors.set_column(dst, &col.map(|z| z * phase));
    }
    Ok(Spectrum { eigenvalues: values, eigenvectors: vectors, zero_cut })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{collective_spin, Axis, PureState};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_input_sorted_descending() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0), c(1.0)]));
        let s = eig_hermitian(&m, 1e-12).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 0.0]);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn ghz3_projector_is_rank_one() {
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(1.0);
        amps[7] = c(1.0);
        let rho = PureState::new(3, amps).unwrap().to_density();
        let s = rho.spectrum();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(s.eigenvalues[1..].iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let jx = collective_spin(4, Axis::X);
        let jy = collective_spin(4, Axis::Y);
        let m = jx.matrix() + jy.matrix() * c(0.3);
        let s = eig_hermitian(&m, 1e-12).unwrap();
        let err = (s.reconstruct() - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err <= 1e-9, "reconstruction error {err}");
        let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
        let id = CMatrix::identity(16, 16);
        let orth = (gram - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(orth <= 1e-10, "orthonormality error {orth}");
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(eig_hermitian(&m, 1e-12), Err(Error::NotHermitian(_))));
    }
}
