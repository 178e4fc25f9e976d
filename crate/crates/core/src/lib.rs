//! Projective-measurement state-update semantics on finite-dimensional
//! Hilbert spaces.
//!
//! The crate models observables as Hermitian matrices with clustered
//! spectral decompositions, builds functions of observables through the
//! finite functional calculus, and implements four state-update rules:
//!
//! * standard collapse `E_α ρ E_α / tr(ρ E_α)`,
//! * subjective-event collapse `Σ_{α∈Δ} E_α ρ E_α / tr(ρ E_Δ)`,
//! * block (Lüders) collapse `E_Δ ρ E_Δ / tr(ρ E_Δ)`,
//! * context-dependent collapse through a rank-one measurement basis.
//!
//! On top of these, [`equivalence`] decides whether measuring `g(A)` and
//! post-processing a measurement of `A` through `g` update the state in the
//! same way, [`valuation`] searches for value assignments obeying the
//! functional composition principle, and [`classical`] provides the
//! conditioning analogue on finite sample spaces. [`scenario`] drives all
//! of it from JSON scenario files.

pub mod calculus;
pub mod classical;
pub mod collapse;
pub mod equivalence;
mod error;
pub mod json;
pub mod operator;
pub mod partition;
pub mod scenario;
mod tolerance;
pub mod valuation;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use tolerance::Tolerances;

pub use calculus::{PreimagePartition, SpectrumFunction};
pub use collapse::{MeasurementEvent, UpdateKind, UpdateMap};
pub use equivalence::{EquivalenceVerdict, Semantics};
pub use operator::{
    ComplexMatrix, DensityState, HermitianOperator, MeasurementBasis, Projector,
    SpectralDecomposition,
};
