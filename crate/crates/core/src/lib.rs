//! Thresholds of monotone families, expectation-threshold certificates and
//! the random-graph experiments built on them.

pub mod certificate;
pub mod cover;
pub mod deviation;
pub mod error;
pub mod family;
pub mod graph;
pub mod independence;
pub mod lp;
pub mod mask;
pub mod random;
pub mod rng;
pub mod stats;

pub use certificate::{Certificate, FractionalCertificate};
pub use error::{Error, Result};
pub use family::{Bracket, Direction, FamilySpec, MonotoneFamily};
pub use graph::Graph;
pub use mask::{GroundSet, SubsetMask};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
