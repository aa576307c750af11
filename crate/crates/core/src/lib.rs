//! Line sum arrays of q-ary multidimensional matrices.
//!
//! A q-ary d-dimensional matrix assigns a value in `{0, …, q-1}` to every
//! cell of an index box `[n_1] × … × [n_d]`. Fixing all coordinates but one
//! yields a *line* (the d-dimensional analogue of a row or column), and the
//! *line sum array* records the sum along every line of every axis.
//!
//! This crate checks prescribed line sum arrays against the planar
//! compatibility criterion (exact in two dimensions, necessary in higher
//! ones), constructs realizing matrices — falling back to a complete search
//! that can also prove nonexistence — handles the symmetric variant, and
//! ships an exhaustive backtracking oracle used as independent ground truth
//! at small sizes.

pub mod construct;
pub mod files;
pub mod linesum;
pub mod oracle;
pub mod symmetric;
pub mod tensor;

pub use linesum::{LineSumArray, Verdict, Witness};
pub use tensor::{BinaryRep, LineId, Shape, Tensor};

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("out of bounds: {0}")]
    Bounds(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("not realizable: {0}")]
    NotRealizable(Box<Verdict>),
    #[error("no realization exists: {0}")]
    Unrealizable(String),
    #[error("no symmetric realization: {0}")]
    SymmetricUnrealizable(String),
    #[error("switch repair exhausted after {0} iterations")]
    RepairExhausted(usize),
    #[error("search budget exceeded after {0} nodes")]
    BudgetExceeded(u64),
    #[error("internal error ({code}): {msg}")]
    Internal { code: &'static str, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
