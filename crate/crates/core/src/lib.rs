//! Desk-scale laboratory for the stability of the cosine-sine functional
//! equation f(xy) = f(x)g(y) + g(x)f(y) + h(x)h(y) on concrete groups.
//!
//! The crate provides:
//! - concrete group arithmetic (integer lattices Z^d, finite Cayley-table
//!   groups) and scan windows ([`group`]);
//! - evaluable structured functions and boundedness verdicts ([`funcspace`]);
//! - dependence-modulo-bounded fits ([`dependence`]);
//! - deviation kernels and bivariate sup-scans ([`deviation`]);
//! - constructors for every solution and near-solution family of the
//!   classification ([`families`]);
//! - constructive Hyers projections on lattices ([`hyers`]);
//! - a structural classifier with verified residuals ([`classifier`]);
//! - brute-force oracles and the construct/perturb/classify round-trip
//!   harness ([`oracle`]).

pub mod classifier;
pub mod dependence;
pub mod deviation;
pub mod error;
pub mod families;
pub mod funcspace;
pub mod group;
pub mod hyers;
pub mod json;
pub mod noise;
pub mod oracle;

pub use dependence::{dependence_mod_bounded, triple_dependence, PairDependence, TripleDependence};
pub use deviation::{
    cauchy_defect, central_defect, cosine_deviation, psi_point, sine_deviation, sup_deviation,
    DeviationReport, KernelKind,
};
pub use error::{CoreError, Result};
pub use funcspace::{
    boundedness, default_schedule, sup_norm, BoundVerdict, FnDescriptor, GFunction, Verdict,
    DEFAULT_TAU,
};
pub use group::{Element, GroupSpec};
