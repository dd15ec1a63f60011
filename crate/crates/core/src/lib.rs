//! Floquet generators of time-periodic Lindblad master equations.
//!
//! The crate decides whether the one-cycle map of a periodically driven
//! open quantum system has a time-independent generator of Lindblad form,
//! measures the distance to such a generator, and evaluates Magnus and
//! van Vleck high-frequency approximations in the lab and rotating frames.
//!
//! All routines are generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases fix the common double-precision case.

pub mod bessel;
pub mod error;
pub mod expansions;
pub mod linalg;
pub mod markovianity;
pub mod propagator;
pub mod rotating;
pub mod scalar;
pub mod superop;

pub use error::{FloquetError, Result};
pub use expansions::{
    magnus_convergence_bound, magnus_integral_oracle, magnus_order, magnus_term, micromotion_exponent, vanvleck_floquet_generator,
    vanvleck_keff, vanvleck_micromotion, ExpansionResult, Frame,
};
pub use markovianity::{
    floquet_verdict, mu_min, spectral_decompose, spectral_decompose_with_reference, MarkovianityVerdict,
    SpectralDecomposition,
};
pub use propagator::{driven_qubit, one_cycle_map, propagate, FourierSeries, ModelParams, PeriodicGenerator};
pub use rotating::{
    gauge_transform, rotfr_components_analytic, rotfr_components_bessel_matrix, rotfr_magnus1, rotfr_magnus2,
    ConstructionRoute, RotatingFrameSeries,
};
pub use nalgebra::Complex;
pub use scalar::{CMatrix, Real};
pub use superop::{
    frobenius_distance, lindblad_commutator, lindblad_commutator_any, lindblad_to_superop, pauli,
    superop_to_quasi_lindblad, traceless_basis, LindbladForm, Operator, Superoperator,
};

pub type Operator64 = Operator<f64>;
pub type Superoperator64 = Superoperator<f64>;
pub type LindbladForm64 = LindbladForm<f64>;
pub type ModelParams64 = ModelParams<f64>;
pub type FourierSeries64 = FourierSeries<f64>;
pub type PeriodicGenerator64 = PeriodicGenerator<f64>;
pub type MarkovianityVerdict64 = MarkovianityVerdict<f64>;
pub type ExpansionResult64 = ExpansionResult<f64>;
pub type RotatingFrameSeries64 = RotatingFrameSeries<f64>;
