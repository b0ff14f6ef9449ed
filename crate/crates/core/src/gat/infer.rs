//! Sort inference and structural type inference.
//!
//! Sort inference only looks at head constructors and is always decidable.
//! Type inference also computes the dependent arguments of a term's type by
//! solving the implicit arguments of each application: the explicit
//! arguments' inferred types are matched, first-order, against the
//! constructor's declared context. Two solutions for one implicit argument
//! are compared up to the theory's normalization policy; in strict mode a
//! disagreement is an error, in lenient mode the first solution wins.

use std::collections::VecDeque;

use super::normalize::equal_upto_norm;
use super::syntax::{AlgSort, AlgTerm, AlgType, TypeCtx};
use super::theory::{Gat, TermConstructor};
use super::GatError;
use crate::scopes::Ident;

pub fn infer_sort(gat: &Gat, ctx: &TypeCtx, t: &AlgTerm) -> Result<AlgSort, GatError> {
    match t {
        AlgTerm::Var(v) => ctx
            .type_of(v)
            .map(AlgType::sort)
            .ok_or_else(|| GatError::UnboundVariable(v.name.to_string())),
        AlgTerm::App(h, args) => {
            let con = termcon(gat, h)?;
            check_arity(gat, h, con.explicit_args.len(), args.len())?;
            for (a, p) in args.iter().zip(&con.explicit_args) {
                let found = infer_sort(gat, ctx, a)?;
                let expected = con.localcontext.ty(p.index).sort();
                if found != expected {
                    return Err(GatError::SortMismatch {
                        expected: format!("{}::{}", p.name, expected),
                        found: format!("{a}::{found}"),
                    });
                }
            }
            Ok(AlgSort(gat.canonical(&con.result.head)))
        }
    }
}

/// The full type of `t`, with implicit arguments solved strictly.
pub fn infer_type(gat: &Gat, ctx: &TypeCtx, t: &AlgTerm) -> Result<AlgType, GatError> {
    infer_type_mode(gat, ctx, t, true)
}

/// Like [`infer_type`], but disagreeing solutions for an implicit argument are
/// not reported (the first one is kept). Sorts are still checked.
pub fn infer_type_lenient(gat: &Gat, ctx: &TypeCtx, t: &AlgTerm) -> Result<AlgType, GatError> {
    infer_type_mode(gat, ctx, t, false)
}

/// Checks `t` structurally.
pub fn check_term(gat: &Gat, ctx: &TypeCtx, t: &AlgTerm) -> Result<(), GatError> {
    infer_type(gat, ctx, t).map(|_| ())
}

fn infer_type_mode(
    gat: &Gat,
    ctx: &TypeCtx,
    t: &AlgTerm,
    strict: bool,
) -> Result<AlgType, GatError> {
    match t {
        AlgTerm::Var(v) => ctx
            .type_of(v)
            .cloned()
            .ok_or_else(|| GatError::UnboundVariable(v.name.to_string())),
        AlgTerm::App(h, args) => {
            let con = termcon(gat, h)?;
            check_arity(gat, h, con.explicit_args.len(), args.len())?;
            let positions = con.explicit_positions();
            let sigma = solve(gat, ctx, &h.name, &con.localcontext, &positions, args, strict)?;
            let lc = con.localcontext.tag();
            Ok(con
                .result
                .substitute(&|v| (v.tag == lc).then(|| sigma[v.index - 1].clone())))
        }
    }
}

/// Values for every position of `head`'s local context when applied to
/// `args`: the arguments themselves at explicit positions, and solved terms
/// at implicit ones.
pub fn solve_implicits(
    gat: &Gat,
    ctx: &TypeCtx,
    head: &Ident,
    args: &[AlgTerm],
    strict: bool,
) -> Result<Vec<AlgTerm>, GatError> {
    let con = termcon(gat, head)?;
    check_arity(gat, head, con.explicit_args.len(), args.len())?;
    solve(
        gat,
        ctx,
        &head.name,
        &con.localcontext,
        &con.explicit_positions(),
        args,
        strict,
    )
}

/// Checks a type: its head is a type constructor applied to the right number
/// of arguments, each of the declared (dependent) type.
pub fn check_type(gat: &Gat, ctx: &TypeCtx, ty: &AlgType) -> Result<(), GatError> {
    let tc = gat
        .typecon(&ty.head)
        .ok_or_else(|| GatError::UnknownConstructor(ty.head.name.to_string()))?;
    check_arity(gat, &ty.head, tc.args.len(), ty.args.len())?;
    let positions: Vec<usize> = (1..=tc.args.len()).collect();
    solve(gat, ctx, &ty.head.name, &tc.args, &positions, &ty.args, true)?;
    Ok(())
}

/// Checks that every type in `ctx` mentions only earlier variables of `ctx`
/// and is itself well-formed.
pub fn check_context(gat: &Gat, ctx: &TypeCtx) -> Result<(), GatError> {
    for i in 1..=ctx.len() {
        let ty = ctx.ty(i);
        for v in ty.vars() {
            if v.tag != ctx.tag() {
                return Err(GatError::UnboundVariable(v.name.to_string()));
            }
            if v.index >= i {
                return Err(GatError::ForwardReference {
                    var: ctx.name(v.index).to_string(),
                    binding: ctx.name(i).to_string(),
                });
            }
        }
        check_type(gat, ctx, ty)?;
    }
    Ok(())
}

/// A position of `lc` that no amount of matching against the explicit
/// arguments' types can determine.
pub fn undetermined_implicit(lc: &TypeCtx, explicit: &[usize]) -> Option<Ident> {
    let mut known = vec![false; lc.len()];
    let mut queue: VecDeque<usize> = explicit.iter().copied().collect();
    for &p in explicit {
        known[p - 1] = true;
    }
    while let Some(p) = queue.pop_front() {
        for v in lc.ty(p).vars() {
            if v.tag == lc.tag() && !known[v.index - 1] {
                known[v.index - 1] = true;
                queue.push_back(v.index);
            }
        }
    }
    known.iter().position(|k| !k).map(|i| lc.var(i + 1))
}

fn termcon<'g>(gat: &'g Gat, h: &Ident) -> Result<&'g TermConstructor, GatError> {
    gat.termcon(h)
        .ok_or_else(|| GatError::UnknownConstructor(h.name.to_string()))
}

fn check_arity(gat: &Gat, h: &Ident, expected: usize, found: usize) -> Result<(), GatError> {
    if expected != found {
        return Err(GatError::ArityMismatch {
            name: gat.canonical(h).name.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}

struct Solver<'a> {
    gat: &'a Gat,
    ctx: &'a TypeCtx,
    lc: &'a TypeCtx,
    sigma: Vec<Option<AlgTerm>>,
    queue: VecDeque<usize>,
    strict: bool,
}

fn solve(
    gat: &Gat,
    ctx: &TypeCtx,
    name: &str,
    lc: &TypeCtx,
    explicit: &[usize],
    args: &[AlgTerm],
    strict: bool,
) -> Result<Vec<AlgTerm>, GatError> {
    let mut s = Solver {
        gat,
        ctx,
        lc,
        sigma: vec![None; lc.len()],
        queue: VecDeque::new(),
        strict,
    };
    for (&p, a) in explicit.iter().zip(args) {
        s.sigma[p - 1] = Some(a.clone());
        s.queue.push_back(p);
    }
    while let Some(p) = s.queue.pop_front() {
        let value = s.sigma[p - 1].clone().expect("queued positions are solved");
        let actual = infer_type_mode(gat, ctx, &value, strict)?;
        let pattern = lc.ty(p).clone();
        if pattern.head != actual.head {
            return Err(GatError::SortMismatch {
                expected: format!("{}::{}", lc.name(p), pattern.head),
                found: format!("{value}::{}", gat.canonical(&actual.head)),
            });
        }
        for (pt, at) in pattern.args.iter().zip(&actual.args) {
            if !s.match_term(pt, at) {
                return Err(GatError::SortMismatch {
                    expected: format!("{}::{}", lc.name(p), s.show(&pattern)),
                    found: format!("{value}::{actual}"),
                });
            }
        }
    }
    let mut out = Vec::with_capacity(lc.len());
    for (i, v) in s.sigma.into_iter().enumerate() {
        match v {
            Some(t) => out.push(t),
            None => {
                return Err(GatError::ImplicitArgUnderdetermined {
                    constructor: name.to_string(),
                    var: lc.name(i + 1).to_string(),
                })
            }
        }
    }
    Ok(out)
}

impl Solver<'_> {
    /// Matches a pattern over `lc` against a term over `ctx`, extending the
    /// solution. Returns `false` on a conflict that strict mode must report.
    fn match_term(&mut self, pattern: &AlgTerm, actual: &AlgTerm) -> bool {
        match pattern {
            AlgTerm::Var(v) if v.tag == self.lc.tag() => match &self.sigma[v.index - 1] {
                Some(solved) => {
                    let ok = equal_upto_norm(self.gat, self.ctx, solved, actual, self.gat.policy());
                    ok || !self.strict
                }
                None => {
                    self.sigma[v.index - 1] = Some(actual.clone());
                    self.queue.push_back(v.index);
                    true
                }
            },
            AlgTerm::Var(_) => pattern == actual || !self.strict,
            AlgTerm::App(h, ps) => match actual {
                AlgTerm::App(h2, xs) if h == h2 && ps.len() == xs.len() => {
                    ps.iter().zip(xs).all(|(p, x)| self.match_term(p, x))
                }
                _ => !self.strict,
            },
        }
    }

    fn show(&self, pattern: &AlgType) -> AlgType {
        let lc = self.lc.tag();
        pattern.substitute(&|v| {
            if v.tag == lc {
                self.sigma[v.index - 1].clone()
            } else {
                None
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gat::GatBuilder;

    struct Cat {
        gat: Gat,
        ob: Ident,
        hom: Ident,
        compose: Ident,
        id: Ident,
    }

    fn category() -> Cat {
        let mut b = GatBuilder::new("ThCategory");
        let ob = b.add_typecon("Ob", TypeCtx::new()).unwrap();
        let mut args = TypeCtx::new();
        args.push("dom", AlgType::constant(ob.clone())).unwrap();
        args.push("codom", AlgType::constant(ob.clone())).unwrap();
        let hom = b.add_typecon("Hom", args).unwrap();
        let h = |x: &Ident, y: &Ident| {
            AlgType::new(hom.clone(), vec![AlgTerm::Var(x.clone()), AlgTerm::Var(y.clone())])
        };
        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(ob.clone())).unwrap();
        let bb = ctx.push("b", AlgType::constant(ob.clone())).unwrap();
        let c = ctx.push("c", AlgType::constant(ob.clone())).unwrap();
        let f = ctx.push("f", h(&a, &bb)).unwrap();
        let g = ctx.push("g", h(&bb, &c)).unwrap();
        let compose = b.add_termcon("compose", ctx, vec![f, g], h(&a, &c)).unwrap();
        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(ob.clone())).unwrap();
        let id = b.add_termcon("id", ctx, vec![a.clone()], h(&a, &a)).unwrap();
        Cat {
            gat: b.build().unwrap(),
            ob,
            hom,
            compose,
            id,
        }
    }

    fn v(x: &Ident) -> AlgTerm {
        AlgTerm::Var(x.clone())
    }

    #[test]
    fn sorts_and_types_of_figure_one_terms() {
        let cat = category();
        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(cat.ob.clone())).unwrap();
        let b = ctx.push("b", AlgType::constant(cat.ob.clone())).unwrap();
        let c = ctx.push("c", AlgType::constant(cat.ob.clone())).unwrap();
        let f = ctx
            .push("f", AlgType::new(cat.hom.clone(), vec![v(&a), v(&b)]))
            .unwrap();
        let g = ctx
            .push("g", AlgType::new(cat.hom.clone(), vec![v(&b), v(&c)]))
            .unwrap();
        let fg = AlgTerm::App(cat.compose.clone(), vec![v(&f), v(&g)]);
        assert_eq!(infer_sort(&cat.gat, &ctx, &fg).unwrap(), AlgSort(cat.hom.clone()));
        assert_eq!(infer_sort(&cat.gat, &ctx, &v(&a)).unwrap(), AlgSort(cat.ob.clone()));
        assert_eq!(
            infer_type(&cat.gat, &ctx, &fg).unwrap(),
            AlgType::new(cat.hom.clone(), vec![v(&a), v(&c)])
        );
        let ida = AlgTerm::App(cat.id.clone(), vec![v(&a)]);
        assert_eq!(
            infer_type(&cat.gat, &ctx, &ida).unwrap(),
            AlgType::new(cat.hom.clone(), vec![v(&a), v(&a)])
        );
    }

    #[test]
    fn non_composable_pair_is_rejected_only_in_strict_mode() {
        let cat = category();
        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(cat.ob.clone())).unwrap();
        let b = ctx.push("b", AlgType::constant(cat.ob.clone())).unwrap();
        let f = ctx
            .push("f", AlgType::new(cat.hom.clone(), vec![v(&a), v(&b)]))
            .unwrap();
        let ff = AlgTerm::App(cat.compose.clone(), vec![v(&f), v(&f)]);
        assert!(infer_sort(&cat.gat, &ctx, &ff).is_ok());
        assert!(matches!(
            infer_type(&cat.gat, &ctx, &ff),
            Err(GatError::SortMismatch { .. })
        ));
        assert!(infer_type_lenient(&cat.gat, &ctx, &ff).is_ok());
    }

    #[test]
    fn contexts_must_be_dependency_ordered() {
        let cat = category();
        assert!(check_context(&cat.gat, &TypeCtx::new()).is_ok());
        let mut good = TypeCtx::new();
        let a = good.push("a", AlgType::constant(cat.ob.clone())).unwrap();
        let b = good.push("b", AlgType::constant(cat.ob.clone())).unwrap();
        good.push("f", AlgType::new(cat.hom.clone(), vec![v(&a), v(&b)]))
            .unwrap();
        assert!(check_context(&cat.gat, &good).is_ok());

        let mut bad = TypeCtx::new();
        let t = bad.tag();
        let a = Ident::new(t, 2, "a");
        let b = Ident::new(t, 3, "b");
        bad.push("f", AlgType::new(cat.hom.clone(), vec![v(&a), v(&b)]))
            .unwrap();
        bad.push("a", AlgType::constant(cat.ob.clone())).unwrap();
        bad.push("b", AlgType::constant(cat.ob.clone())).unwrap();
        assert!(matches!(
            check_context(&cat.gat, &bad),
            Err(GatError::ForwardReference { .. })
        ));
    }

    #[test]
    fn arity_and_unknown_heads() {
        let cat = category();
        let ctx = TypeCtx::new();
        let bad = AlgType::new(cat.hom.clone(), vec![]);
        let err = check_type(&cat.gat, &ctx, &bad).unwrap_err();
        assert_eq!(err.to_string(), "Ill-typed arguments for Hom: expected 2, found 0");
        let t = AlgTerm::App(cat.ob.clone(), vec![]);
        assert!(matches!(
            infer_sort(&cat.gat, &ctx, &t),
            Err(GatError::UnknownConstructor(_))
        ));
    }

    #[test]
    fn implicit_determination() {
        let cat = category();
        let con = cat.gat.termcon(&cat.compose).unwrap();
        assert_eq!(undetermined_implicit(&con.localcontext, &[4, 5]), None);
        assert_eq!(
            undetermined_implicit(&con.localcontext, &[4]).map(|v| v.name.to_string()),
            Some("c".to_string())
        );
    }
}
