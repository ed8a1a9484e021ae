//! Reduced density-matrix evolution of a single driven qubit coupled to a
//! thermal bosonic bath.
//!
//! Two approximation engines are provided: a short-time factorization built
//! on the square root of the ideal propagator, and a second-order Magnus
//! (coupling-perturbative) scheme assembled from an 8x8 table of decoherence
//! functions over Pauli-projector chains. Exact few-mode and pure-dephasing
//! oracles back the test suite, and a deviation-measure module quantifies
//! decoherence against the noiseless evolution.

pub mod bath;
pub mod magnus;
pub mod measures;
pub mod models;
pub mod oracles;
pub mod pauli;
pub mod quad;
pub mod shorttime;

/// Failure of an evolution engine: a bad model/state input or a
/// non-converging frequency integral.
#[derive(Debug, thiserror::Error)]
pub enum EvolveError {
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Bath(#[from] bath::BathError),
}

pub use bath::{
    discrete_mode_sum, spectral_integral, thermal_factor, BathError, BathSpectrum, QuadratureSpec,
};
pub use magnus::{
    evolve_magnus, evolve_magnus_with_diagnostics, magnus_decoherence_table, spin_kernels,
    MagnusDecoherenceTable, MagnusEvolution, MagnusKernels, SpinKernel,
};
pub use measures::{
    deviation, maximize_over_initial_states, scheme_deviation, DeviationReport,
    MaximizedDeviation, Scheme,
};
pub use models::{
    coupling_harmonics, ideal_density, ideal_propagator, interaction_coupling_vector,
    CouplingOperator, GateModel, Harmonic, InitialState, ModelError,
};
pub use oracles::{adiabatic_exact, few_mode_exact, DiscreteBath, FewModeEvolution, OracleError};
pub use pauli::{
    herm_eigen, herm_exp, pauli_decompose, unitary_sqrt, HermEigen, Ket, PauliForm, QubitOperator,
    SqrtBranch,
};
pub use quad::{QuadError, QuadResult};
pub use shorttime::{
    evolve_short_time, short_time_decoherence, short_time_table, ShortTimeDecoherence,
};
