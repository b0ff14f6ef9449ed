//! Models of theories in the indexed (coercion) style.
//!
//! A model gives each type constructor a *coercion*, which validates a
//! value against the values of the type's arguments and may canonicalize
//! it, and each term constructor an operation on its explicit arguments.
//! Values live in one dynamic universe, [`Value`]. The fibered style, where
//! values carry their indices, is an ordinary model on top of this (see
//! [`finset_fib`]).

mod builtin;
mod check;
mod free;
mod model;
mod value;

pub use builtin::{
    builtin_model, finset_c, finset_fib, free_category, int_plus_monoid, modular_plus_monoid,
    nat_arith_native, slice_c, string_monoid, times_int_monoid, FinFunction, BUILTIN_MODELS,
};
pub use check::{
    candidates, check_axioms, enumerate_ctx, fixed_values, int_range, search_counterexample,
    AxiomReport, AxiomResult, AxiomStatus, Enumerators, Search, DEFAULT_BOUND,
};
pub use free::free_model;
pub use model::{
    CheckError, Coercion, Enumerator, FreeData, LiteralReader, Model, ModelBuilder, ModelError,
    Operation,
};
pub use value::{parse_literal, CarrierKind, OpaqueValue, Value};
