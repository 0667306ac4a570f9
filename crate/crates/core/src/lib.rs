//! Simulation and analysis of finite-round LOCC protocols on multipartite
//! quantum states, centered on the local random authentication task: spatially
//! separated parties are asked "is the shared state |ψ_k⟩?" and must answer
//! with certainty using local measurements and classical communication only.
//!
//! The crate is organized as:
//!
//! - [`qcore`]: party layouts, pure states, density operators, Schmidt
//!   analysis, and named state constructors.
//! - [`measure`]: effects, POVMs, and Kraus instruments on a single party's
//!   factor, with Born-rule evaluation.
//! - [`locc`]: adaptive protocol trees and their exact simulation.
//! - [`lra`]: authentication verification, constructive strategies, the
//!   first-round orthogonality constraint space, and the complete-basis
//!   classification.
//! - [`ent`]: entropy and relative-entropy quantities, including the
//!   two-copy randomized-ensemble bound report.
//! - [`scenario`]: the `.lra` scenario text format, parser, serializer, and
//!   JSON analysis reports.
//! - [`random`]: seeded generators for states, unitaries, instruments, and
//!   protocol trees, used heavily by the test suites.

pub mod ent;
pub mod locc;
pub mod lra;
pub mod measure;
pub mod qcore;
pub mod random;
pub mod scenario;
