//! Exact box measures, step-function integration, and error-bounded numerics.
//!
//! The exact core ([`geometry`], [`measures`], [`stepfn`]) works over
//! arbitrary-precision rationals. Everything that needs limits, roots or
//! transcendental functions ([`integrate`], [`lp`], [`hilbert`],
//! [`operators`]) reports floating-point values together with an explicit
//! error bound or slack.

pub mod error;
pub mod format;
pub mod geometry;
pub mod hilbert;
pub mod integrate;
pub mod lp;
pub mod measures;
pub mod operators;
pub mod poly;
pub mod random;
pub mod rational;
pub mod stepfn;
pub mod text;

pub use error::{Error, ParseError, Result};
pub use geometry::{common_refinement, Endpoint, Interval, Parkettable, Quader, Refinement};
pub use measures::{Affine, BoxMeasure, MassPoints, StieltjesWeight};
pub use rational::Rational;
pub use stepfn::{StepFunction, StepValue};

/// Default slack tolerance for floating-point inequality checks.
pub const DEFAULT_TOL: f64 = 1e-9;
