//! Quantum-Fisher-information criteria for multiparticle entanglement.

pub mod campaign;
pub mod criteria;
pub mod error;
pub mod estimation;
pub mod fisher;
pub mod io;
pub mod qstate;
pub mod statezoo;

pub use criteria::{CriterionReport, ProducibilityBound};
pub use error::{Error, Result};
pub use fisher::{GammaC, Povm};
pub use qstate::{Axis, DensityMatrix, HermitianOperator, PureState, SpinDirection, State};
