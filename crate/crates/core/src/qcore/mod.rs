//! Multipartite state and operator representation.
//!
//! Everything downstream builds on the conventions fixed here: party indices
//! are 0-based, tensor factors are ordered big-endian (party 0 is the most
//! significant index of a row-major global index), and all values are
//! immutable after construction.

mod density;
mod layout;
mod linalg;
mod named;
mod schmidt;
mod state;

pub use density::DensityOperator;
pub use layout::{Bipartition, PartyLayout};
pub use linalg::{
    dagger, frobenius_inner, frobenius_norm, hermitian_eigen, hermiticity_residual, identity,
    is_hermitian, is_psd, is_unitary, kron, matrix_log2_on_support, max_abs, min_eigenvalue,
    psd_sqrt, trace, CMatrix, CVector,
};
pub use named::{named_state, phi_plus, NamedState};
pub use schmidt::{is_fully_product, schmidt_decomposition, schmidt_rank, SchmidtDecomposition};
pub use state::{tensor, PureState};

use thiserror::Error;

/// Default tolerance for norm, orthogonality, Hermiticity, and completeness
/// checks.
pub const TOL: f64 = 1e-9;

/// Schmidt coefficients at or below this absolute value do not count toward
/// the Schmidt rank.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QcoreError {
    #[error("layout must have at least one party")]
    EmptyLayout,
    #[error("party dimensions must each be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("party index {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },
    #[error("amplitude vector has length {got}, layout requires {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("state norm is {norm:.6e}, expected 1 within {tol:.0e}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("matrix is {got_rows}x{got_cols}, expected {rows}x{cols}")]
    ShapeMismatch {
        got_rows: usize,
        got_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("operator is not Hermitian (max residual {0:.3e})")]
    NotHermitian(f64),
    #[error("operator has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("trace is {0:.6}, expected 1")]
    BadTrace(f64),
    #[error("bipartition sides must be nonempty proper subsets of the parties")]
    BadBipartition,
    #[error("layouts differ: {0} vs {1}")]
    LayoutMismatch(String, String),
    #[error("paired parties {pair} have dimensions {left} and {right}")]
    PairDimensionMismatch {
        pair: usize,
        left: usize,
        right: usize,
    },
    #[error("layout with {parties} parties cannot be split into equal-dimension pairs")]
    UnpairedLayout { parties: usize },
    #[error("state {name} is not defined over layout {layout}")]
    IncompatibleLayout { name: String, layout: String },
    #[error("unknown state name: {0}")]
    UnknownState(String),
    #[error("keep set must be a nonempty subset of the parties")]
    BadKeepSet,
    #[error("permutation {0:?} is not a rearrangement of the parties")]
    BadPermutation(Vec<usize>),
}
