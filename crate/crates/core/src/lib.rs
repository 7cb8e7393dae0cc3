//! Entanglement-polytope witnesses for three- and four-qubit states.
//!
//! The pipeline: prepare a circuit state ([`prep`]), simulate lossy
//! coincidence counts ([`measure`]), reconstruct local or global density
//! matrices ([`tomo`]), and test the local spectrum against the class
//! polytopes with a purity-dependent margin ([`witness`]). [`resources`]
//! covers measurement budgets and Monte Carlo error bars.

pub mod error;
pub mod linalg;
pub mod measure;
pub mod prep;
pub mod resources;
pub mod seeding;
pub mod tomo;
pub mod witness;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use linalg::{
    apply_sloc, fidelity, haar_random_pure, local_max_eigenvalues, max_eigenvalue, mix_white_noise, partial_trace,
    purity, DensityMatrix, LocalUnitary, PureState, SlocOperator,
};
pub use measure::{
    full_tomography_plan, local_tomography_plan, outcome_probabilities, simulate_counts, simulate_plan, Analyzer,
    CountRecord, DetectorModel, MeasurementSetting,
};
pub use prep::{
    canonical_four_qubit, canonical_three_qubit, prepare_four_qubit, prepare_three_qubit, random_class_member,
    FamilySpec, FourQubitFamily, ThreeQubitClass, WaveplateConfig3, WaveplateConfig4,
};
pub use resources::{
    count_rate, crossing_efficiency, measurement_count, monte_carlo_spectrum, overhead, ErrorEstimate, MethodSpec,
    OverheadReport, WitnessKind,
};
pub use tomo::{linear_inversion, local_spectrum_from_counts, mle_reconstruct, ReconstructionResult};
pub use witness::{
    check_polygon, classify, classify3, classify4, epsilon_bound, hull_membership, project_for_plot, LocalSpectrum,
    NoiseBound, PolytopeRegion, Statement, Verdict,
};
