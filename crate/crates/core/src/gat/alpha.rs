//! Equality up to the choice of scope tags and display names of variables.
//!
//! Two pieces of syntax are α-equal when a bijection between the scopes they
//! introduce makes them identical. Contexts correspond positionally; theory
//! segments correspond in order. Constructor names must still agree: renaming
//! a constructor changes the theory.

use std::collections::HashMap;

use super::syntax::{AlgTerm, AlgType, TermInCtx, TypeCtx, TypeInCtx};
use super::theory::{Gat, Judgment};
use crate::scopes::{Ident, ScopeTag};

#[derive(Default, Clone)]
struct Corr {
    map: HashMap<ScopeTag, ScopeTag>,
}

impl Corr {
    fn ident(&self, a: &Ident, b: &Ident) -> bool {
        let t = self.map.get(&a.tag).copied().unwrap_or(a.tag);
        t == b.tag && a.index == b.index
    }

    fn term(&self, a: &AlgTerm, b: &AlgTerm) -> bool {
        match (a, b) {
            (AlgTerm::Var(x), AlgTerm::Var(y)) => self.ident(x, y),
            (AlgTerm::App(f, xs), AlgTerm::App(g, ys)) => {
                self.ident(f, g)
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            _ => false,
        }
    }

    fn ty(&self, a: &AlgType, b: &AlgType) -> bool {
        self.ident(&a.head, &b.head)
            && a.args.len() == b.args.len()
            && a.args.iter().zip(&b.args).all(|(x, y)| self.term(x, y))
    }

    /// Compares contexts and, on success, records their correspondence.
    fn ctx(&mut self, a: &TypeCtx, b: &TypeCtx) -> bool {
        if a.len() != b.len() {
            return false;
        }
        self.map.insert(a.tag(), b.tag());
        (1..=a.len()).all(|i| self.ty(a.ty(i), b.ty(i)))
    }

    fn judgment(&mut self, a: &Judgment, b: &Judgment) -> bool {
        match (a, b) {
            (Judgment::TypeCon(x), Judgment::TypeCon(y)) => self.ctx(&x.args, &y.args),
            (Judgment::TermCon(x), Judgment::TermCon(y)) => {
                self.ctx(&x.localcontext, &y.localcontext)
                    && x.explicit_args.len() == y.explicit_args.len()
                    && x
                        .explicit_args
                        .iter()
                        .zip(&y.explicit_args)
                        .all(|(p, q)| self.ident(p, q))
                    && self.ty(&x.result, &y.result)
            }
            (Judgment::Axiom(x), Judgment::Axiom(y)) => {
                self.ctx(&x.localcontext, &y.localcontext)
                    && self.ident(&x.sort.0, &y.sort.0)
                    && self.term(&x.lhs, &y.lhs)
                    && self.term(&x.rhs, &y.rhs)
            }
            _ => false,
        }
    }
}

pub fn alpha_equal(a: &TermInCtx, b: &TermInCtx) -> bool {
    let mut c = Corr::default();
    c.ctx(&a.ctx, &b.ctx) && c.term(&a.term, &b.term)
}

pub fn alpha_equal_type(a: &TypeInCtx, b: &TypeInCtx) -> bool {
    let mut c = Corr::default();
    c.ctx(&a.ctx, &b.ctx) && c.ty(&a.ty, &b.ty)
}

pub fn alpha_equal_ctx(a: &TypeCtx, b: &TypeCtx) -> bool {
    Corr::default().ctx(a, b)
}

/// α-equality of theories: non-empty segments correspond in order, bindings
/// within them by position with equal names, and aliases and normalization
/// rules agree. The theory's own name is ignored.
pub fn alpha_equal_gat(a: &Gat, b: &Gat) -> bool {
    gat_difference(a, b).is_none()
}

/// A description of the first difference found, if the theories are not
/// α-equal.
pub fn gat_difference(a: &Gat, b: &Gat) -> Option<String> {
    let sa: Vec<_> = a.segments().scopes().iter().filter(|s| !s.is_empty()).collect();
    let sb: Vec<_> = b.segments().scopes().iter().filter(|s| !s.is_empty()).collect();
    if sa.len() != sb.len() {
        return Some(format!("{} segments vs {}", sa.len(), sb.len()));
    }
    let mut corr = Corr::default();
    for (x, y) in sa.iter().zip(&sb) {
        corr.map.insert(x.tag(), y.tag());
    }
    for (k, (x, y)) in sa.iter().zip(&sb).enumerate() {
        if x.len() != y.len() {
            return Some(format!(
                "segment {} has {} bindings vs {}",
                k + 1,
                x.len(),
                y.len()
            ));
        }
        for (p, q) in x.bindings().iter().zip(y.bindings()) {
            if p.name != q.name || p.arity != q.arity {
                return Some(format!("binding {} vs {}", p.name, q.name));
            }
            if !corr.judgment(&p.payload, &q.payload) {
                return Some(format!("{} {} differs", p.payload.kind(), p.name));
            }
        }
    }
    if a.aliases() != b.aliases() {
        return Some(format!("aliases {:?} vs {:?}", a.aliases(), b.aliases()));
    }
    let ra: Vec<_> = a.policy().rules().collect();
    let rb: Vec<_> = b.policy().rules().collect();
    let rules_match = ra.len() == rb.len()
        && ra.iter().all(|(op, assoc, unit)| {
            rb.iter().any(|(op2, assoc2, unit2)| {
                corr.ident(op, op2)
                    && assoc == assoc2
                    && match (unit, unit2) {
                        (Some(u), Some(v)) => corr.ident(u, v),
                        (None, None) => true,
                        _ => false,
                    }
            })
        });
    if !rules_match {
        return Some("normalization rules differ".to_string());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scopes::fresh_tag;

    fn term(names: [&str; 2], swap: bool) -> TermInCtx {
        let th = fresh_tag();
        let ty = AlgType::constant(Ident::new(th, 1, "default"));
        let op = Ident::new(th, 2, "⋅");
        let mut ctx = TypeCtx::new();
        let x = ctx.push(names[0], ty.clone()).unwrap();
        let y = ctx.push(names[1], ty).unwrap();
        let (l, r) = if swap { (y, x) } else { (x, y) };
        TermInCtx::new(ctx, AlgTerm::App(op, vec![AlgTerm::Var(l), AlgTerm::Var(r)]))
    }

    fn same_theory(t: &TermInCtx, other: &TermInCtx) -> TermInCtx {
        // move `other`'s constructor idents onto `t`'s theory tag
        let th = t.term.head().tag;
        let mut out = other.clone();
        out.term = other.term.map_heads(&mut |h| h.with_tag(th));
        out.ctx = other.ctx.map_idents(&mut |h| {
            if h.tag == other.ctx.tag() {
                h.clone()
            } else {
                h.with_tag(th)
            }
        });
        out
    }

    #[test]
    fn renaming_is_invisible() {
        let a = term(["x", "y"], false);
        let b = same_theory(&a, &term(["p", "q"], false));
        assert!(alpha_equal(&a, &b));
        assert!(alpha_equal(&b, &a));
    }

    #[test]
    fn order_matters() {
        let a = term(["x", "y"], false);
        let b = same_theory(&a, &term(["x", "y"], true));
        assert!(!alpha_equal(&a, &b));
    }

    #[test]
    fn different_theories_differ() {
        let a = term(["x", "y"], false);
        let b = term(["x", "y"], false);
        assert!(!alpha_equal(&a, &b));
    }
}
