//! Exact polynomial symbols on the phase space `(t, x, tau, xi)`.

pub mod calculus;
pub mod frame;
pub mod jet;
pub mod phase;
pub mod poly;
pub mod univariate;

pub use calculus::{hamilton_field, homogeneity_check, poisson_bracket, Homogeneity};
pub use frame::{check_frame, CandidateFrame, FrameFailure, FrameReport};
pub use jet::{quadratic_jet, singularity_check, Partition, QuadraticJet, SingularityCheck};
pub use phase::{int, parse_rational, rat, rat_to_f64, PhasePoint, Rational, Var};
pub use poly::{CompiledPoly, PolySymbol, Ring};
pub use univariate::UniPoly;
