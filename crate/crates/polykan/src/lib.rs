//! Certified compression of spline networks by knot elimination.
//!
//! A Kolmogorov-Arnold network carries a univariate spline on every edge and
//! sums them at every node. Each spline is stored here as an exact piecewise
//! polynomial, which makes sup-norm error computable to root-finding accuracy
//! instead of estimated by sampling. On top of that representation the crate
//! provides:
//!
//! - [`poly`]: polynomial arithmetic and certified extremum/root search on
//!   closed intervals, the bedrock for every error certificate;
//! - [`spline`]: the piecewise-polynomial spline type and exact conversion
//!   from clamped B-spline form;
//! - [`approx`]: polynomial fitting over merged knot spans and the certified
//!   mergability test;
//! - [`compressor`]: optimal single-spline compression by dynamic programming
//!   and layered whole-network compression under a global error budget;
//! - [`network`]: the network model, forward evaluation, polyhedral region
//!   statistics, JSON persistence, and synthetic model generation;
//! - [`oracle`]: independent brute-force and dense-sampling checks used to
//!   verify the main algorithms.
//!
//! The `polykan` binary wraps the library as a batch tool (`gen`, `info`,
//! `compress`, `eval`, `verify`).

pub mod approx;
pub mod compressor;
pub mod error;
pub mod network;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod spline;

pub use error::{Error, Result};
pub use poly::{Interval, Polynomial};
pub use spline::{BsplineDescriptor, PiecewiseSpline};

/// Additive margin applied to every computed sup-norm error before it is
/// compared against an error budget, keeping floating-point certificates
/// conservative.
pub const CERTIFICATION_SLACK: f64 = 1e-9;

/// Default localization tolerance for polynomial root isolation.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Iteration cap for bisection refinement in root isolation.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Absolute tolerance under which two knot values are treated as the same
/// knot when merging per-dimension partitions.
pub const KNOT_MERGE_TOL: f64 = 1e-12;

/// Model file format identifier.
pub const MODEL_FORMAT: &str = "polykan/1";

/// Report file format identifier.
pub const REPORT_FORMAT: &str = "polykan-report/1";
