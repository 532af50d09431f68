//! Isoperimetry of supercritical bond percolation on the discrete torus.
//!
//! The crate samples Bernoulli bond configurations on `Z^d / nZ^d`, extracts the
//! giant open cluster, and computes its Cheeger constant exactly (brute force,
//! a frontier dynamic program, or connected-set branch and bound) or
//! heuristically. On top of that sit the edge-flip algebra, the typicality
//! event system used to bound single-edge sensitivity, and a reproducible
//! Monte Carlo harness for variance-concentration experiments.
//!
//! Everything here is side-effect free; file and process I/O live in the CLI.

pub mod cuts;
pub mod error;
pub mod events;
pub mod experiments;
pub mod flips;
pub mod formats;
pub mod percolation;
pub mod rng;
pub mod stats;
pub mod torus;

pub use cuts::{
    boundary_size, cheeger, cheeger_brute, cheeger_exact, cheeger_exact_with, cheeger_heuristic,
    cheeger_value, epsilon_n, iso_profile, psi, CheegerResult, CheegerValue, CutSet, ExactOptions,
    ExactRatio, ExactStrategy, HeuristicParams, IsoProfileResult, Method, ProfileMode, SolverMode,
};
pub use error::{Error, Result};
pub use events::{check_events, verify_gradient_claim, EventConstants, EventReport, FlipAnalysis};
pub use experiments::{ExperimentOutput, ExperimentPlan, SampleRecord, SummaryStats};
pub use flips::{classify_case, extremal_pair, flip, grad, FlipCase};
pub use percolation::{
    cluster_decomposition, giant_component, sample_configuration, symmetric_difference_size,
    ClusterDecomposition, Configuration, GiantComponent,
};
pub use torus::{EdgeId, TorusSpec, VertexId};
