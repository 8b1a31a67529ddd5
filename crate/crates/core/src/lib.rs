//! Wasserstein distances, optimal matchings, geodesics, and compactness
//! diagnostics for persistence diagrams over metric pairs.
//!
//! A metric pair is a space with an extended pseudometric and a distinguished
//! closed subset `A`; diagrams are formal sums of points off `A`, and the
//! p-Wasserstein distance is the cheapest way to match two diagrams while
//! letting dots be created or destroyed at `A`. The classical persistence
//! half-plane with its diagonal is one built-in example among several.
//!
//! Everything here is a pure function over immutable values; no operation
//! needs synchronization under concurrent use.

pub mod analysis;
pub mod diagram;
pub mod ext;
pub mod geodesic;
pub mod matching;
pub mod space;
mod solver;

pub use analysis::{
    circles_partial, circles_truncation, diagnose_set, embed_symmetric,
    local_noncompactness_witnesses, symmetric_dist, DiagnosticsReport, ScaleDiagnostics,
    SymmetricTuple,
};
pub use diagram::{check_essentially_p_finite, Diagram, PFiniteScale, TruncatedDiagram};
pub use ext::{ExtReal, PNorm};
pub use geodesic::{
    alexandrov_residual, distinct_geodesics, geodesic, path_length, retract_diagram,
    sequential_geodesic, straight_line_retraction, DiagramPath, GeodesicPath, SequentialPath,
};
pub use matching::{
    card_mismatch_lower_bound, infimum_gap_demo, optimal_matchings, wasserstein,
    wasserstein_bruteforce, wasserstein_bruteforce_with_cap, wasserstein_truncated, MatchEnd,
    Matching, WassersteinResult,
};
pub use space::{make_space, pointed_euclidean_with_base, Capabilities, Point, Space, SpaceKernel};

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("unknown space `{0}`")]
    UnknownSpace(String),

    #[error("malformed space spec `{spec}`: {reason}")]
    MalformedSpaceSpec { spec: String, reason: String },

    #[error("invalid point for space `{space}`: {reason}")]
    InvalidPoint { space: String, reason: String },

    #[error("space mismatch: `{left}` vs `{right}`")]
    SpaceMismatch { left: String, right: String },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("space `{space}` lacks capability: {capability}")]
    CapabilityMissing { space: String, capability: &'static str },

    #[error("infinite distance: {0}")]
    InfiniteDistance(String),

    #[error("cardinality {got} exceeds cap {cap}")]
    CardinalityCap { got: u64, cap: u64 },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
