use std::collections::HashMap;

use super::infer::infer_sort;
use super::syntax::{AlgTerm, TermInCtx, TypeCtx};
use super::theory::Gat;
use super::GatError;
use crate::scopes::Ident;

/// Simultaneous substitution of `env` into `t.term`, producing a term over
/// `target_ctx`.
///
/// Every free variable of the term needs an image, and each image must have
/// the variable's sort in `target_ctx`. Variables are replaced by ident, never
/// by name, so an image mentioning a variable called `x` keeps pointing at its
/// own `x` whatever the source context binds.
pub fn substitute(
    gat: &Gat,
    t: &TermInCtx,
    env: &HashMap<Ident, AlgTerm>,
    target_ctx: &TypeCtx,
) -> Result<AlgTerm, GatError> {
    for v in t.term.vars() {
        let image = env
            .get(&v)
            .ok_or_else(|| GatError::MissingAssignment(v.name.to_string()))?;
        let expected = t
            .ctx
            .type_of(&v)
            .ok_or_else(|| GatError::UnboundVariable(v.name.to_string()))?
            .sort();
        let found = infer_sort(gat, target_ctx, image)?;
        if found != expected {
            return Err(GatError::SortMismatch {
                expected: format!("{}::{}", v.name, expected),
                found: format!("{image}::{found}"),
            });
        }
    }
    Ok(t.term.substitute(&|v| env.get(v).cloned()))
}

/// `(second ∘ first)(x) = first(x)[second]`. Variables bound by `second` but
/// not hit by `first` are not included.
pub fn compose_env(
    first: &HashMap<Ident, AlgTerm>,
    second: &HashMap<Ident, AlgTerm>,
) -> HashMap<Ident, AlgTerm> {
    first
        .iter()
        .map(|(k, v)| (k.clone(), v.substitute(&|x| second.get(x).cloned())))
        .collect()
}
