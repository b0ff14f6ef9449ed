//! The kernel: syntax of terms, types and contexts; theories as segments of
//! judgments; sort inference and structural checking; substitution;
//! α-equivalence; normalization.

mod alpha;
mod infer;
mod normalize;
mod subst;
mod syntax;
mod theory;

use thiserror::Error;

use crate::scopes::ScopeError;

pub use alpha::{alpha_equal, alpha_equal_ctx, alpha_equal_gat, alpha_equal_type, gat_difference};
pub use infer::{
    check_context, check_term, check_type, infer_sort, infer_type, infer_type_lenient,
    solve_implicits, undetermined_implicit,
};
pub use normalize::{equal_upto_norm, NormalizationPolicy};
pub use subst::{compose_env, substitute};
pub use syntax::{AlgSort, AlgTerm, AlgType, TermInCtx, TypeCtx, TypeInCtx};
pub use theory::{Axiom, Gat, GatBuilder, Judgment, TermConstructor, TypeConstructor};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GatError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unknown constructor {0}")]
    UnknownConstructor(String),
    #[error("Ill-typed arguments for {name}: expected {expected}, found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: String, found: String },
    #[error("variable {var} is used in the type of {binding} before it is introduced")]
    ForwardReference { var: String, binding: String },
    #[error("implicit argument {var} of {constructor} is not determined by the explicit arguments")]
    ImplicitArgUnderdetermined { constructor: String, var: String },
    #[error("no assignment for variable {0}")]
    MissingAssignment(String),
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("alias {symbol} refers to unknown constructor {target}")]
    UnknownAliasTarget { symbol: String, target: String },
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error("in {judgment}: {source}")]
    InJudgment {
        judgment: String,
        source: Box<GatError>,
    },
}

impl GatError {
    /// The innermost error, skipping judgment wrappers.
    pub fn root(&self) -> &GatError {
        match self {
            GatError::InJudgment { source, .. } => source.root(),
            other => other,
        }
    }
}
