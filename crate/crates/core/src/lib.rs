//! Finite-scale laboratory for measure-theoretic equicontinuity of
//! symbolic dynamical systems.
//!
//! The crate simulates cellular automata, the full shift, odometers and
//! circle rotations; computes orbit-ball density ratios exactly (by
//! cylinder enumeration) or by Monte Carlo; certifies local periodicity;
//! builds Koopman eigenfunctions of locally periodic systems; and
//! estimates pairwise sensitivity.

pub mod config;
pub mod error;
pub mod measures;
pub mod orbit;
mod par;
pub mod periodicity;
pub mod rng;
pub mod sensitivity;
pub mod space;
pub mod spectral;
pub mod systems;

pub use error::{Error, Result};
pub use measures::{BallFamily, BernoulliMeasure, MarkovMeasure, Measure, ProductMeasure};
pub use orbit::{EquicontinuityParams, EquicontinuityReport, OrbitBallEvent, RatioEstimate, DEFAULT_ENUMERATION_CAP};
pub use periodicity::{LepStatistics, PeriodCertificate};
pub use rng::SeedStream;
pub use space::{Alphabet, CantorDistance, CirclePoint, Configuration, Cylinder, CylinderSet, Indexing, Word};
pub use spectral::EigenfunctionSpec;
pub use systems::{CaRule, Odometer, Point, Rotation, System};
