//! Deterministic, bounded search for counterexamples to equations.
//!
//! A context is enumerated position by position: the type of each entry is
//! evaluated under the values chosen so far, candidate values come from an
//! enumerator for its head, and only candidates that survive the model's
//! coercion are kept. Dependent types therefore only ever see well-typed
//! assignments.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::ControlFlow;

use rayon::prelude::*;

use super::model::{Enumerator, Model, ModelError};
use super::value::Value;
use crate::gat::{AlgTerm, TypeCtx};
use crate::scopes::Ident;

/// Assignments per axiom when no bound is given explicitly.
pub const DEFAULT_BOUND: usize = 100;

/// Enumerators supplied by the caller; they take precedence over the model's.
pub type Enumerators = HashMap<Ident, Enumerator>;

#[derive(Clone, Debug, PartialEq)]
pub enum AxiomStatus {
    /// No counterexample among `checked` assignments; `exhaustive` when the
    /// enumeration ran to completion rather than hitting the bound.
    Holds { checked: usize, exhaustive: bool },
    /// Both sides normalize to the same term under the model's policy.
    Proved { checked: usize },
    Counterexample {
        env: Vec<(String, Value)>,
        lhs: Value,
        rhs: Value,
    },
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomResult {
    pub axiom: Ident,
    pub name: String,
    pub equation: String,
    pub status: AxiomStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub model: String,
    pub theory: String,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn counterexamples(&self) -> impl Iterator<Item = &AxiomResult> {
        self.results
            .iter()
            .filter(|r| matches!(r.status, AxiomStatus::Counterexample { .. }))
    }

    /// No axiom was refuted (skipped ones are not failures).
    pub fn ok(&self) -> bool {
        self.counterexamples().next().is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let results: Vec<_> = self
            .results
            .iter()
            .map(|r| {
                let mut o = json!({ "axiom": r.name, "equation": r.equation });
                let status = match &r.status {
                    AxiomStatus::Holds { checked, exhaustive } => {
                        json!({ "status": "holds", "checked": checked, "exhaustive": exhaustive })
                    }
                    AxiomStatus::Proved { checked } => json!({ "status": "proved", "checked": checked }),
                    AxiomStatus::Counterexample { env, lhs, rhs } => json!({
                        "status": "counterexample",
                        "env": env.iter().map(|(k, v)| (k.clone(), v.to_json())).collect::<serde_json::Map<_, _>>(),
                        "lhs": lhs.to_json(),
                        "rhs": rhs.to_json(),
                    }),
                    AxiomStatus::Skipped { reason } => json!({ "status": "skipped", "reason": reason }),
                };
                for (k, v) in status.as_object().expect("object") {
                    o[k] = v.clone();
                }
                o
            })
            .collect();
        json!({ "model": self.model, "theory": self.theory, "ok": self.ok(), "axioms": results })
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "axioms of {} in model {}:", self.theory, self.model)?;
        for r in &self.results {
            write!(f, "  {}: ", r.name)?;
            match &r.status {
                AxiomStatus::Holds { checked, exhaustive } => {
                    let how = if *exhaustive { "exhaustively" } else { "up to the bound" };
                    writeln!(f, "holds ({checked} assignments, {how})")?
                }
                AxiomStatus::Proved { checked } => {
                    writeln!(f, "proved by normalization ({checked} assignments sampled)")?
                }
                AxiomStatus::Counterexample { env, lhs, rhs } => {
                    let env: Vec<String> = env.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    writeln!(f, "COUNTEREXAMPLE at {}: {} evaluates to {lhs} but {rhs}", env.join(", "), r.equation)?
                }
                AxiomStatus::Skipped { reason } => writeln!(f, "skipped ({reason})")?,
            }
        }
        Ok(())
    }
}

/// Outcome of searching one equation.
#[derive(Clone, Debug, PartialEq)]
pub enum Search {
    NoCounterexample { checked: usize, exhaustive: bool },
    Counterexample {
        env: Vec<(String, Value)>,
        lhs: Value,
        rhs: Value,
    },
    Failed(String),
}

/// The values of type `head(args)` the model admits, in enumeration order,
/// after coercion and deduplication.
pub fn candidates(
    m: &Model,
    enums: &Enumerators,
    head: &Ident,
    args: &[Value],
) -> Result<Vec<Value>, String> {
    let raw = match enums.get(head).or_else(|| m.enumerator(head)) {
        Some(e) => e(args),
        None => {
            return Err(format!(
                "no enumerator for {}",
                m.theory().canonical(head).name
            ))
        }
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in raw {
        if let Ok(c) = m.coerce(head, &v, args) {
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Walks well-typed assignments of `ctx` in `m`, at most `bound` of them
/// (`None` for all). The visitor sees values indexed by position − 1.
/// Returns how many were visited and whether the walk was complete.
pub fn enumerate_ctx(
    m: &Model,
    enums: &Enumerators,
    ctx: &TypeCtx,
    bound: Option<usize>,
    visit: &mut dyn FnMut(&[Value]) -> ControlFlow<()>,
) -> Result<(usize, bool), String> {
    struct Walk<'a> {
        m: &'a Model,
        enums: &'a Enumerators,
        ctx: &'a TypeCtx,
        bound: Option<usize>,
        cache: HashMap<(Ident, Vec<Value>), Vec<Value>>,
        env: Vec<Value>,
        count: usize,
        stopped: bool,
    }

    impl Walk<'_> {
        fn go(&mut self, visit: &mut dyn FnMut(&[Value]) -> ControlFlow<()>) -> Result<(), String> {
            let i = self.env.len() + 1;
            if i > self.ctx.len() {
                self.count += 1;
                if visit(&self.env).is_break() || self.bound.is_some_and(|b| self.count >= b) {
                    self.stopped = true;
                }
                return Ok(());
            }
            let ty = self.ctx.ty(i);
            let tag = self.ctx.tag();
            let args = {
                let env = &self.env;
                let lookup = |v: &Ident| (v.tag == tag).then(|| env.get(v.index - 1).cloned()).flatten();
                ty.args
                    .iter()
                    .map(|a| self.m.eval_with(&lookup, a))
                    .collect::<Result<Vec<_>, ModelError>>()
                    .map_err(|e| e.to_string())?
            };
            let key = (ty.head.clone(), args);
            if !self.cache.contains_key(&key) {
                let c = candidates(self.m, self.enums, &key.0, &key.1)?;
                self.cache.insert(key.clone(), c);
            }
            let cands = self.cache[&key].clone();
            for v in cands {
                self.env.push(v);
                let r = self.go(visit);
                self.env.pop();
                r?;
                if self.stopped {
                    break;
                }
            }
            Ok(())
        }
    }

    let mut w = Walk {
        m,
        enums,
        ctx,
        bound,
        cache: HashMap::new(),
        env: Vec::new(),
        count: 0,
        stopped: false,
    };
    w.go(visit)?;
    Ok((w.count, !w.stopped))
}

/// Looks for an assignment of `ctx` on which `lhs` and `rhs` evaluate
/// differently in `m`.
pub fn search_counterexample(
    m: &Model,
    enums: &Enumerators,
    ctx: &TypeCtx,
    lhs: &AlgTerm,
    rhs: &AlgTerm,
    bound: Option<usize>,
) -> Search {
    let tag = ctx.tag();
    let mut found = None;
    let mut failure = None;
    let walked = enumerate_ctx(m, enums, ctx, bound, &mut |env| {
        let lookup = |v: &Ident| (v.tag == tag).then(|| env.get(v.index - 1).cloned()).flatten();
        let l = m.eval_with(&lookup, lhs);
        let r = m.eval_with(&lookup, rhs);
        match (l, r) {
            (Ok(l), Ok(r)) if l == r => ControlFlow::Continue(()),
            (Ok(l), Ok(r)) => {
                let named = (1..=ctx.len())
                    .map(|i| (ctx.name(i).to_string(), env[i - 1].clone()))
                    .collect();
                found = Some((named, l, r));
                ControlFlow::Break(())
            }
            (Err(e), _) | (_, Err(e)) => {
                failure = Some(e.to_string());
                ControlFlow::Break(())
            }
        }
    });
    match (walked, found, failure) {
        (Err(e), _, _) => Search::Failed(e),
        (_, Some((env, lhs, rhs)), _) => Search::Counterexample { env, lhs, rhs },
        (_, _, Some(e)) => Search::Failed(format!("evaluation failed: {e}")),
        (Ok((checked, exhaustive)), None, None) => Search::NoCounterexample { checked, exhaustive },
    }
}

/// Checks every axiom of the model's theory by enumeration. `bound` limits
/// assignments per axiom; `None` is exhaustive. Axioms run in parallel and
/// the report is in declaration order.
///
/// For free models, an axiom whose sides normalize to the same term is
/// reported as proved; other axioms are skipped, since a free model only
/// satisfies its theory up to the rewriting it performs.
pub fn check_axioms(m: &Model, enums: &Enumerators, bound: Option<usize>) -> AxiomReport {
    let gat = m.theory();
    let axioms = gat.axioms();
    let results = axioms
        .par_iter()
        .map(|id| {
            let ax = gat.axiom(id).expect("listed axiom");
            let name = if id.name.is_empty() {
                format!("axiom #{}", id.index)
            } else {
                id.name.to_string()
            };
            let equation = format!(
                "{} == {}",
                crate::surface::pretty_term(gat, &ax.localcontext, &ax.lhs),
                crate::surface::pretty_term(gat, &ax.localcontext, &ax.rhs)
            );
            let covered = m
                .free_data()
                .map(|fd| fd.policy.normalize(&ax.lhs) == fd.policy.normalize(&ax.rhs));
            let status = if covered == Some(false) {
                AxiomStatus::Skipped {
                    reason: "not covered by the normalization policy".into(),
                }
            } else {
                match search_counterexample(m, enums, &ax.localcontext, &ax.lhs, &ax.rhs, bound) {
                    Search::NoCounterexample { checked, .. } if covered == Some(true) => {
                        AxiomStatus::Proved { checked }
                    }
                    Search::NoCounterexample { checked, exhaustive } => {
                        AxiomStatus::Holds { checked, exhaustive }
                    }
                    Search::Counterexample { env, lhs, rhs } => AxiomStatus::Counterexample { env, lhs, rhs },
                    Search::Failed(reason) => AxiomStatus::Skipped { reason },
                }
            };
            AxiomResult {
                axiom: id.clone(),
                name,
                equation,
                status,
            }
        })
        .collect();
    AxiomReport {
        model: m.name().to_string(),
        theory: gat.name().to_string(),
        results,
    }
}

/// An enumerator over an inclusive integer range, e.g. from `Ob=0..3`.
pub fn int_range(lo: i64, hi: i64) -> Enumerator {
    std::sync::Arc::new(move |_| (lo..=hi).map(Value::Int).collect())
}

/// An enumerator over fixed values.
pub fn fixed_values(values: Vec<Value>) -> Enumerator {
    std::sync::Arc::new(move |_| values.clone())
}
