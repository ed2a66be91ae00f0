//! Graded graphs, connections and integral chain-graph (co)homology.
//!
//! The library is organized around a small hierarchy of structures:
//!
//! * [`graph`] — finite graphs, gradations, distance decompositions and the
//!   gradation-equivalence procedures (lower/lift moves).
//! * [`connection`] — symmetric integer edge weights, their sign-map
//!   equivalence, deformability, vertex ranks, volume and the characteristic
//!   number.
//! * [`matrix`] — exact integer matrices, representation matrices, direct
//!   sums, orthogonal products and the matrix equivalence relation generated
//!   by row permutations, row negations and (block) transposition.
//! * [`snf`] — Smith normal form over arbitrary-precision integers, with
//!   optional unimodular transforms and integer linear solving.
//! * [`homology`] — chain graphs, their associated (co)chain complexes and
//!   integral homology, products, lifting reports and field-vanishing checks.
//! * [`diamond`] — diamond graphs, signature search and GAD assembly.
//! * [`lie`] — integral Lie algebras by structure constants, the diamond
//!   root-system axioms, exterior chain graphs and diamond classification.
//! * [`weight`] — 0/1 strictly upper-triangular matrices, weights, the
//!   admissible set `omega_n`, weight subgraphs, rank formulas and the four
//!   weight-subgraph isomorphisms.
//!
//! The `gad` binary exposes the same functionality as a command-line tool;
//! see [`cli`].

pub mod cli;
pub mod connection;
pub mod diamond;
pub mod fixtures;
pub mod graph;
pub mod homology;
pub mod io;
pub mod lie;
pub mod matrix;
pub mod snf;
pub mod weight;

/// Errors shared by every module.
///
/// `Invariant` is reserved for conditions that the theory guarantees: hitting
/// one means the input violated a precondition in a way we could not detect
/// earlier, or there is a bug. The CLI maps `Invariant` to exit code 1 and
/// the input-shaped errors to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invariant violated [{law}]: {detail}")]
    Invariant { law: &'static str, detail: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn invariant(law: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            law,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
