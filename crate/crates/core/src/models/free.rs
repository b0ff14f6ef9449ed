//! Free (symbolic) models: values are terms over a context of generators,
//! kept in normal form under a normalization policy.

use std::collections::HashSet;
use std::sync::Arc;

use super::model::{CheckError, FreeData, Model, ModelBuilder, ModelError};
use super::value::{CarrierKind, Value};
use crate::gat::{check_context, infer_sort, infer_type, infer_type_lenient, AlgTerm, Gat, NormalizationPolicy, TypeCtx};

/// The free model of `gat` on `generators`, a context whose entries are the
/// generating symbols and their types.
///
/// With `strict`, applying an operation to arguments whose dependent types
/// disagree (say composing `f::Hom(A,B)` with `h::Hom(C,D)`) fails; without
/// it only sorts are checked.
pub fn free_model(
    name: impl Into<String>,
    gat: &Gat,
    generators: TypeCtx,
    policy: NormalizationPolicy,
    strict: bool,
) -> Result<Model, ModelError> {
    let name = name.into();
    check_context(gat, &generators).map_err(|e| ModelError::Other(format!("generators of {name}: {e}")))?;
    let shared = Arc::new((gat.clone(), generators.clone(), policy.clone()));
    let mut b = ModelBuilder::new(name, gat).free(FreeData {
        generators: generators.clone(),
        policy: policy.clone(),
        strict,
    });

    for ty in gat.typecons() {
        let s = shared.clone();
        let head = ty.clone();
        b = b.carrier_id(ty.clone(), CarrierKind::Symbolic).coerce_id(
            ty.clone(),
            Arc::new(move |v, args| {
                let (gat, gens, policy) = &*s;
                let t = v
                    .as_term()
                    .ok_or_else(|| CheckError::msg(format!("expected a symbolic term, found {}", v.variant())))?;
                let found = if strict {
                    infer_type(gat, gens, t)
                } else {
                    infer_type_lenient(gat, gens, t)
                }
                .map_err(|e| CheckError::msg(e.to_string()))?;
                if found.head != head {
                    return Err(CheckError::msg(format!(
                        "expected a term of sort {}, found one of sort {}",
                        gat.canonical(&head).name,
                        gat.canonical(&found.head).name
                    )));
                }
                if strict {
                    for (i, (a, want)) in found.args.iter().zip(args).enumerate() {
                        let want = want
                            .as_term()
                            .ok_or_else(|| CheckError::msg("type argument is not a symbolic term"))?;
                        if policy.normalize(a) != policy.normalize(want) {
                            return Err(CheckError::msg(format!(
                                "type argument {} does not match: expected {want}, found {a}",
                                i + 1
                            )));
                        }
                    }
                }
                Ok(Value::Symbolic(policy.normalize(t)))
            }),
        );
    }

    for op in gat.termcons() {
        let s = shared.clone();
        let head = gat.canonical(&op);
        b = b.op_id(
            op.clone(),
            Arc::new(move |args| {
                let (gat, gens, policy) = &*s;
                let args = args
                    .iter()
                    .map(|a| {
                        a.as_term()
                            .cloned()
                            .ok_or_else(|| CheckError::msg(format!("expected a symbolic term, found {}", a.variant())))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let t = AlgTerm::App(head.clone(), args);
                if strict {
                    infer_type(gat, gens, &t).map_err(|e| CheckError::msg(e.to_string()))?;
                } else {
                    infer_sort(gat, gens, &t).map_err(|e| CheckError::msg(e.to_string()))?;
                }
                Ok(Value::Symbolic(policy.normalize(&t)))
            }),
        );
    }

    // Enumerate the generators and one layer of operations over them; the
    // coercion sorts candidates into types.
    let mut terms: Vec<AlgTerm> = generators.vars().map(AlgTerm::Var).collect();
    let mut seen: HashSet<AlgTerm> = terms.iter().cloned().collect();
    let base = terms.clone();
    for op in gat.termcons() {
        let arity = gat.termcon(&op).expect("termcon").explicit_args.len();
        for combo in tuples(&base, arity) {
            let t = AlgTerm::App(gat.canonical(&op), combo);
            if infer_type(gat, &generators, &t).is_ok() {
                let n = policy.normalize(&t);
                if seen.insert(n.clone()) {
                    terms.push(n);
                }
            }
        }
    }
    let values: Vec<Value> = terms.into_iter().map(Value::Symbolic).collect();
    for ty in gat.typecons() {
        let vs = values.clone();
        b = b.enumerate_id(ty, Arc::new(move |_| vs.clone()));
    }

    let s = shared.clone();
    b = b.literal(Arc::new(move |_, text| {
        let (gat, gens, policy) = &*s;
        crate::surface::parse_term_in(gat, gens, text)
            .map(|t| Value::Symbolic(policy.normalize(&t)))
            .map_err(|e| e.to_string())
    }));
    b.build()
}

fn tuples(items: &[AlgTerm], n: usize) -> Vec<Vec<AlgTerm>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}
