//! Rewriting to normal form under declared associativity and unit laws.
//!
//! A policy is declared per binary term constructor: whether it is
//! associative, and which constructor (if any) is its unit. Normalizing
//! flattens nested applications of an associative operator, deletes unit
//! operands, and rebuilds the result left-nested. Two terms with equal normal
//! forms are provably equal from the declared laws; unequal normal forms prove
//! nothing.

use indexmap::IndexMap;

use super::syntax::{AlgTerm, TypeCtx};
use super::theory::Gat;
use crate::scopes::{Ident, Retag, ScopeTag, TagMap};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormalizationPolicy {
    rules: IndexMap<Ident, (bool, Option<Ident>)>,
}

impl NormalizationPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn add(&mut self, op: Ident, assoc: bool, unit: Option<Ident>) {
        self.rules.insert(op, (assoc, unit));
    }

    pub fn rule(&self, op: &Ident) -> Option<(bool, Option<&Ident>)> {
        self.rules.get(op).map(|(a, u)| (*a, u.as_ref()))
    }

    pub fn rules(&self) -> impl Iterator<Item = (&Ident, bool, Option<&Ident>)> + '_ {
        self.rules.iter().map(|(op, (a, u))| (op, *a, u.as_ref()))
    }

    pub fn covers(&self, op: &Ident) -> bool {
        self.rules.contains_key(op)
    }

    pub fn map_idents(&self, f: &mut dyn FnMut(&Ident) -> Ident) -> NormalizationPolicy {
        NormalizationPolicy {
            rules: self
                .rules
                .iter()
                .map(|(op, (a, u))| (f(op), (*a, u.as_ref().map(|u| f(u)))))
                .collect(),
        }
    }

    /// Rules of `other` not already present are appended.
    pub fn merge(&mut self, other: &NormalizationPolicy) {
        for (op, rule) in &other.rules {
            self.rules.entry(op.clone()).or_insert_with(|| rule.clone());
        }
    }

    pub fn normalize(&self, t: &AlgTerm) -> AlgTerm {
        if self.rules.is_empty() {
            return t.clone();
        }
        match t {
            AlgTerm::Var(_) => t.clone(),
            AlgTerm::App(head, args) => {
                let args: Vec<AlgTerm> = args.iter().map(|a| self.normalize(a)).collect();
                match self.rules.get(head) {
                    Some((assoc, unit)) if args.len() == 2 => {
                        self.normalize_op(head, *assoc, unit.as_ref(), args)
                    }
                    _ => AlgTerm::App(head.clone(), args),
                }
            }
        }
    }

    fn normalize_op(
        &self,
        head: &Ident,
        assoc: bool,
        unit: Option<&Ident>,
        args: Vec<AlgTerm>,
    ) -> AlgTerm {
        let is_unit = |t: &AlgTerm| matches!((t, unit), (AlgTerm::App(h, _), Some(u)) if h == u);
        let mut operands = Vec::new();
        if assoc {
            for a in args {
                flatten_into(head, a, &mut operands);
            }
        } else {
            operands = args;
        }
        let first_unit = operands.iter().find(|t| is_unit(t)).cloned();
        operands.retain(|t| !is_unit(t));
        match operands.len() {
            0 => first_unit.expect("all operands were units"),
            1 => operands.pop().unwrap(),
            _ if assoc => {
                let mut it = operands.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, x| AlgTerm::App(head.clone(), vec![acc, x]))
            }
            _ => AlgTerm::App(head.clone(), operands),
        }
    }
}

fn flatten_into(head: &Ident, t: AlgTerm, out: &mut Vec<AlgTerm>) {
    match t {
        AlgTerm::App(h, args) if &h == head && args.len() == 2 => {
            for a in args {
                flatten_into(head, a, out);
            }
        }
        other => out.push(other),
    }
}

impl Retag for NormalizationPolicy {
    fn retag(&self, map: &TagMap) -> Self {
        self.map_idents(&mut |i| i.retag(map))
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        for (op, (_, u)) in &self.rules {
            out.push(op.tag);
            if let Some(u) = u {
                out.push(u.tag);
            }
        }
    }
}

/// Compares two terms after normalizing both under `policy`. `true` means
/// provably equal under the policy's laws; `false` is inconclusive.
pub fn equal_upto_norm(
    _gat: &Gat,
    _ctx: &TypeCtx,
    t1: &AlgTerm,
    t2: &AlgTerm,
    policy: &NormalizationPolicy,
) -> bool {
    t1 == t2 || policy.normalize(t1) == policy.normalize(t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scopes::fresh_tag;

    fn ops() -> (Ident, Ident, Vec<AlgTerm>) {
        let th = fresh_tag();
        let compose = Ident::new(th, 1, "compose");
        let id = Ident::new(th, 2, "id");
        let ctx = fresh_tag();
        let vars = ["f", "g", "h", "a"]
            .iter()
            .enumerate()
            .map(|(i, n)| AlgTerm::Var(Ident::new(ctx, i + 1, *n)))
            .collect();
        (compose, id, vars)
    }

    fn c(op: &Ident, a: AlgTerm, b: AlgTerm) -> AlgTerm {
        AlgTerm::App(op.clone(), vec![a, b])
    }

    #[test]
    fn associativity_flattens() {
        let (compose, id, v) = ops();
        let mut p = NormalizationPolicy::new();
        p.add(compose.clone(), true, Some(id));
        let left = c(&compose, c(&compose, v[0].clone(), v[1].clone()), v[2].clone());
        let right = c(&compose, v[0].clone(), c(&compose, v[1].clone(), v[2].clone()));
        assert_eq!(p.normalize(&left), p.normalize(&right));
        assert_eq!(p.normalize(&right), left);
    }

    #[test]
    fn units_are_deleted() {
        let (compose, id, v) = ops();
        let mut p = NormalizationPolicy::new();
        p.add(compose.clone(), true, Some(id.clone()));
        let ida = AlgTerm::App(id.clone(), vec![v[3].clone()]);
        assert_eq!(p.normalize(&c(&compose, ida.clone(), v[0].clone())), v[0]);
        assert_eq!(p.normalize(&c(&compose, v[0].clone(), ida.clone())), v[0]);
        // all units collapse to the first one
        assert_eq!(p.normalize(&c(&compose, ida.clone(), ida.clone())), ida);
    }

    #[test]
    fn unit_without_assoc() {
        let (compose, id, v) = ops();
        let mut p = NormalizationPolicy::new();
        p.add(compose.clone(), false, Some(id.clone()));
        let e = AlgTerm::App(id, vec![]);
        let t = c(&compose, c(&compose, v[0].clone(), e.clone()), v[1].clone());
        assert_eq!(p.normalize(&t), c(&compose, v[0].clone(), v[1].clone()));
        let nested = c(&compose, v[0].clone(), c(&compose, v[1].clone(), v[2].clone()));
        assert_eq!(p.normalize(&nested), nested);
    }

    #[test]
    fn distinct_generators_stay_distinct() {
        let (compose, id, v) = ops();
        let mut p = NormalizationPolicy::new();
        p.add(compose, true, Some(id));
        assert_ne!(p.normalize(&v[0]), p.normalize(&v[1]));
    }
}
