use num_complex::Complex64;

use crate::qstate::{eig_hermitian, max_abs_hermitian_deviation, pauli, product_operator, Axis, CMatrix, CVector, DensityMatrix};
use crate::{Error, Result};

const POVM_TOL: f64 = 1e-9;

/// Positive operator valued measurement `{E_μ}` with `Σ_μ E_μ = 𝟙`.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    /// Validates positivity of every element and completeness within 1e-9.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let d = first.nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidPovm(format!("element {k} has shape {}x{}", e.nrows(), e.ncols())));
            }
            if max_abs_hermitian_deviation(e) > POVM_TOL {
                return Err(Error::InvalidPovm(format!("element {k} is not Hermitian")));
            }
            let min = eig_hermitian(e, 0.0)?.min();
            if min < -POVM_TOL {
                return Err(Error::InvalidPovm(format!("element {k} has eigenvalue {min:e}")));
            }
            sum += e;
        }
        let dev = (sum - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > POVM_TOL {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {dev:e}")));
        }
        Ok(Self { elements })
    }

    /// Projective measurement onto the given (orthonormal) vectors.
    pub fn projective(vectors: &[CVector]) -> Result<Self> {
        Self::new(vectors.iter().map(|v| v * v.adjoint()).collect())
    }

    /// Measurement in the computational basis.
    pub fn computational(n: usize) -> Self {
        let d = 1usize << n;
        let elements = (0..d)
            .map(|k| {
                let mut e = CMatrix::zeros(d, d);
                e[(k, k)] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        Self { elements }
    }

    /// Two-outcome parity measurement `(𝟙 ± σ_axis^⊗N) / 2`, outcome `+` first.
    pub fn parity(n: usize, axis: Axis) -> Self {
        let d = 1usize << n;
        let parity = product_operator(&vec![pauli(axis); n]);
        let id = CMatrix::identity(d, d);
        let half = Complex64::new(0.5, 0.0);
        Self { elements: vec![(&id + &parity) * half, (&id - &parity) * half] }
    }

    /// Product measurement of every qubit in the eigenbasis of `σ_axis`.
    ///
    /// Outcome index bits follow the basis convention; bit 0 is the `+1` eigenvalue.
    pub fn product_basis(n: usize, axis: Axis) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let local: [[Complex64; 2]; 2] = match axis {
            Axis::X => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
            Axis::Y => [[c(s, 0.0), c(0.0, s)], [c(s, 0.0), c(0.0, -s)]],
            Axis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        };
        let d = 1usize << n;
        let elements = (0..d)
            .map(|outcome| {
                let mut v = CVector::from_element(1, c(1.0, 0.0));
                for q in 0..n {
                    let bit = (outcome >> (n - 1 - q)) & 1;
                    let single = CVector::from_vec(local[bit].to_vec());
                    v = v.kronecker(&single);
                }
                &v * v.adjoint()
            })
            .collect();
        Self { elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Outcome probabilities `Tr(ρ E_μ)`, clamped into `[0, 1]`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim()));
        }
        self.elements
            .iter()
            .map(|e| {
                let p = crate::qstate::trace_of_product(rho.matrix(), e).re;
                check_probability(p)
            })
            .collect()
    }
}

pub(crate) fn check_probability(p: f64) -> Result<f64> {
    if !(-POVM_TOL..=1.0 + POVM_TOL).contains(&p) || !p.is_finite() {
        return Err(Error::Invariant(format!("outcome probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_povms_are_valid() {
        for n in 1..=3 {
            for axis in Axis::ALL {
                Povm::new(Povm::parity(n, axis).elements).unwrap();
                Povm::new(Povm::product_basis(n, axis).elements).unwrap();
            }
            Povm::new(Povm::computational(n).elements).unwrap();
        }
    }

    #[test]
    fn rejects_incomplete_or_negative() {
        let mut e = CMatrix::zeros(2, 2);
        e[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(matches!(Povm::new(vec![e.clone()]), Err(Error::InvalidPovm(_))));
        let mut neg = CMatrix::identity(2, 2);
        neg[(0, 0)] = Complex64::new(-0.5, 0.0);
        neg[(1, 1)] = Complex64::new(0.0, 0.0);
        let mut rest = CMatrix::identity(2, 2);
        rest[(0, 0)] = Complex64::new(1.5, 0.0);
        assert!(matches!(Povm::new(vec![neg, rest]), Err(Error::InvalidPovm(_))));
        assert!(Povm::new(vec![]).is_err());
    }
}
