//! Source-pinned multi-agent network models with delayed self
//! reinforcement (DSR).
//!
//! The crate builds weighted digraphs with one pinned source node, derives
//! the pinned Laplacian and its spectrum, assembles the consensus and DSR
//! dynamics (first order through arbitrary relative degree with filtered
//! delay chains), integrates them with a fixed-step method-of-steps
//! scheme, checks stability through Lambert-W root surveys and the
//! closed-form sufficient conditions, and quantifies transition cohesion.
//!
//! Modules follow the pipeline:
//!
//! * [`graph`] — digraph construction, Laplacian partition, structure checks
//! * [`numerics`] — eigenvalues and the multi-branch Lambert W function
//! * [`dynamics`] — right-hand sides for every system variant
//! * [`simulator`] — fixed-step DDE integration and trajectory export
//! * [`stability`] — root surveys and stability conditions
//! * [`metrics`] — settling time, deviation, normalized deviation, peak input
//! * [`reference`] — the bundled benchmark network

pub mod dynamics;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod metrics;
pub mod numerics;
pub mod reference;
pub mod simulator;
pub mod stability;
