//! Dense multi-qubit state and operator algebra.
//!
//! Basis convention: index `b_1 b_2 … b_N` read as a binary number with qubit 1
//! as the most significant bit, `|0⟩` before `|1⟩`, and `σ_z|0⟩ = +|0⟩`.
//! Qubits are addressed by zero-based position, so qubit 1 is position 0.

mod operator;
mod spectrum;
mod state;

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use operator::{
    apply_collective, collective_spin, j_n, local_generator, pauli, product_operator,
    HermitianOperator, SpinDirection,
};
pub use spectrum::{eig_hermitian, Spectrum};
pub use state::{DensityMatrix, PureState, State};
pub(crate) use state::trace_of_product;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Numerical tolerances shared by the validating constructors.
pub mod tol {
    /// Allowed deviation of a stored pure state's norm from one.
    pub const NORM: f64 = 1e-12;
    /// Entrywise Hermiticity tolerance.
    pub const HERMITIAN: f64 = 1e-10;
    /// Trace tolerance for density matrices.
    pub const TRACE: f64 = 1e-10;
    /// Most negative eigenvalue accepted for a density matrix.
    pub const PSD: f64 = 1e-9;
    /// Accepted norm deviation for user-supplied directions.
    pub const UNIT: f64 = 1e-9;
    /// Relative cut under which eigenvalue sums count as zero.
    pub const ZERO_CUT: f64 = 1e-12;
}

/// Default cap on the number of qubits for dense storage.
pub const DEFAULT_MAX_QUBITS: usize = 12;

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

/// Current cap on the number of qubits accepted by constructors.
pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Changes the qubit cap. Dense storage grows as `4^N`; raise with care.
pub fn set_max_qubits(cap: usize) {
    MAX_QUBITS.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_qubits(n: usize) -> crate::Result<()> {
    if n == 0 {
        return Err(crate::Error::invalid("number of qubits must be at least 1"));
    }
    let cap = max_qubits();
    if n > cap {
        return Err(crate::Error::TooManyQubits { got: n, cap });
    }
    Ok(())
}

/// Cartesian spin axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Tensor product with qubit ordering `self` then `rhs`.
pub trait Tensor: Sized {
    fn tensor(&self, rhs: &Self) -> crate::Result<Self>;
}

/// Bit mask of a zero-based qubit position in an `n`-qubit basis index.
#[inline]
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1usize << (n - 1 - qubit)
}

pub(crate) fn max_abs_hermitian_deviation(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
