//! From surface syntax to kernel syntax.
//!
//! Names resolve through the theory being built: a context variable wins
//! over a constructor, and among overloaded constructors the first (innermost)
//! one whose argument sorts fit is chosen. When the expected sort of a
//! position is known it is pushed down, which is what makes overloaded
//! constants such as `zero()` resolvable.

use std::collections::HashMap;

use indexmap::IndexMap;

use super::ast::{CtxGroup, Decl, Expr, Line, MapClause, MapDecl, TheoryDecl};
use super::parser::{parse_ctx_ast, parse_file, parse_term_ast};
use super::registry::Registry;
use super::{Span, SurfaceError, SurfaceErrorKind};
use crate::colimits::{extend_with_using, UsingClause};
use crate::gat::{
    alpha_equal_ctx, check_term, check_type, infer_sort, AlgTerm, AlgType, Gat, GatBuilder, GatError, Judgment,
    TermInCtx, TypeCtx, TypeInCtx,
};
use crate::morphisms::{Pusher, TheoryMap, TheoryMapKind};
use crate::scopes::Ident;

type Res<T> = Result<T, SurfaceError>;

fn gat_err(e: impl Into<GatError>, span: Span) -> SurfaceError {
    SurfaceError::new(e.into(), span)
}

/// Arity of a constructor as written at a use site.
fn use_arity(gat: &Gat, c: &Ident) -> Option<usize> {
    match gat.lookup(c)? {
        Judgment::TypeCon(t) => Some(t.args.len()),
        Judgment::TermCon(t) => Some(t.explicit_args.len()),
        Judgment::Axiom(_) => None,
    }
}

fn termcons_named(gat: &Gat, sym: &str) -> Vec<Ident> {
    gat.candidates(sym)
        .into_iter()
        .filter(|c| gat.termcon(c).is_some())
        .collect()
}

fn typecons_named(gat: &Gat, sym: &str) -> Vec<Ident> {
    gat.candidates(sym)
        .into_iter()
        .filter(|c| gat.typecon(c).is_some())
        .collect()
}

/// Elaborates a term. `expected` is the head of the sort the position wants,
/// used only to choose between overloads.
pub(crate) fn elab_term(gat: &Gat, ctx: &TypeCtx, e: &Expr, expected: Option<&Ident>) -> Res<AlgTerm> {
    match e {
        Expr::Ascribed(inner, _, _) => elab_term(gat, ctx, inner, expected),
        Expr::Name(n, span) => {
            if let Some(v) = ctx.lookup_name(n) {
                return Ok(AlgTerm::Var(v));
            }
            let cands: Vec<Ident> = termcons_named(gat, n)
                .into_iter()
                .filter(|c| use_arity(gat, c) == Some(0))
                .collect();
            if cands.is_empty() {
                return Err(gat_err(GatError::UnboundVariable(n.clone()), *span));
            }
            Ok(AlgTerm::app(gat.canonical(&pick_by_result(gat, &cands, expected)), vec![]))
        }
        Expr::Call(f, args, span) => {
            let args: Vec<&Expr> = args.iter().collect();
            elab_app(gat, ctx, f, &args, *span, expected)
        }
        Expr::BinOp(op, l, r, span) => elab_app(gat, ctx, op, &[l, r], *span, expected),
    }
}

fn pick_by_result(gat: &Gat, cands: &[Ident], expected: Option<&Ident>) -> Ident {
    expected
        .and_then(|want| {
            cands
                .iter()
                .find(|c| gat.termcon(c).is_some_and(|t| &t.result.head == want))
        })
        .unwrap_or(&cands[0])
        .clone()
}

fn elab_app(
    gat: &Gat,
    ctx: &TypeCtx,
    f: &str,
    args: &[&Expr],
    span: Span,
    expected: Option<&Ident>,
) -> Res<AlgTerm> {
    let all = termcons_named(gat, f);
    if all.is_empty() {
        return Err(gat_err(GatError::UnknownConstructor(f.to_string()), span));
    }
    let mut fitting: Vec<Ident> = all
        .iter()
        .filter(|c| use_arity(gat, c) == Some(args.len()))
        .cloned()
        .collect();
    if fitting.is_empty() {
        return Err(gat_err(
            GatError::ArityMismatch {
                name: f.to_string(),
                expected: use_arity(gat, &all[0]).unwrap_or(0),
                found: args.len(),
            },
            span,
        ));
    }
    // candidates with the wanted result sort go first
    if let Some(want) = expected {
        fitting.sort_by_key(|c| gat.termcon(c).map(|t| &t.result.head != want).unwrap_or(true));
    }
    let mut first_err = None;
    for c in &fitting {
        let con = gat.termcon(c).expect("term constructor");
        let attempt = (|| -> Res<Vec<AlgTerm>> {
            let mut out = Vec::new();
            for (a, p) in args.iter().zip(&con.explicit_args) {
                let want = &con.localcontext.ty(p.index).head;
                let t = elab_term(gat, ctx, a, Some(want))?;
                let s = infer_sort(gat, ctx, &t).map_err(|e| gat_err(e, a.span()))?;
                if &s.0 != want {
                    return Err(gat_err(
                        GatError::SortMismatch {
                            expected: want.name.to_string(),
                            found: s.0.name.to_string(),
                        },
                        a.span(),
                    ));
                }
                out.push(t);
            }
            Ok(out)
        })();
        match attempt {
            Ok(out) => return Ok(AlgTerm::app(gat.canonical(c), out)),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    // nothing fits cleanly: keep the first reading and let checking report it,
    // unless the arguments themselves do not elaborate
    let c = &fitting[0];
    let mut out = Vec::new();
    for a in args {
        match elab_term(gat, ctx, a, None) {
            Ok(t) => out.push(t),
            Err(_) => return Err(first_err.expect("an attempt was made")),
        }
    }
    Ok(AlgTerm::app(gat.canonical(c), out))
}

pub(crate) fn elab_type(gat: &Gat, ctx: &TypeCtx, e: &Expr) -> Res<AlgType> {
    let (head, args, span): (&str, Vec<&Expr>, Span) = match e {
        Expr::Name(n, s) => (n, vec![], *s),
        Expr::Call(f, args, s) => (f, args.iter().collect(), *s),
        Expr::BinOp(op, l, r, s) => (op, vec![l, r], *s),
        Expr::Ascribed(_, _, s) => return Err(SurfaceError::syntax("a type cannot be ascribed", *s)),
    };
    let cands = typecons_named(gat, head);
    if cands.is_empty() {
        return Err(gat_err(GatError::UnknownConstructor(head.to_string()), span));
    }
    let c = cands
        .iter()
        .find(|c| use_arity(gat, c) == Some(args.len()))
        .unwrap_or(&cands[0])
        .clone();
    let tc = gat.typecon(&c).expect("type constructor");
    let mut out = Vec::new();
    for (i, a) in args.iter().enumerate() {
        let want = (i < tc.args.len()).then(|| tc.args.ty(i + 1).head.clone());
        out.push(elab_term(gat, ctx, a, want.as_ref())?);
    }
    Ok(AlgType::new(gat.canonical(&c), out))
}

fn default_type(gat: &Gat, var: &str, span: Span) -> Res<AlgType> {
    gat.default_type()
        .map(|d| AlgType::constant(gat.canonical(&d)))
        .ok_or_else(|| {
            SurfaceError::new(
                SurfaceErrorKind::Pattern(format!(
                    "{var} needs a type: the theory has no default type"
                )),
                span,
            )
        })
}

/// Appends the bindings of `groups` to `ctx`.
pub(crate) fn elab_ctx_into(gat: &Gat, ctx: &mut TypeCtx, groups: &[CtxGroup]) -> Res<()> {
    let all_names: Vec<&str> = groups
        .iter()
        .flat_map(|g| g.names.iter().map(|(n, _)| n.as_str()))
        .collect();
    let mut seen = 0;
    for g in groups {
        for (name, span) in &g.names {
            seen += 1;
            let ty = match &g.ty {
                None => default_type(gat, name, *span)?,
                Some(te) => match elab_type(gat, ctx, te) {
                    Ok(t) => t,
                    Err(e) => {
                        if let Some(GatError::UnboundVariable(v)) = e.gat_error() {
                            let later = all_names[seen - 1..].contains(&v.as_str());
                            if later {
                                return Err(gat_err(
                                    GatError::ForwardReference {
                                        var: v.clone(),
                                        binding: name.clone(),
                                    },
                                    *span,
                                ));
                            }
                        }
                        return Err(e);
                    }
                },
            };
            ctx.push(name.as_str(), ty).map_err(|e| gat_err(e, *span))?;
        }
    }
    Ok(())
}

pub(crate) fn elab_ctx(gat: &Gat, groups: Option<&[CtxGroup]>) -> Res<TypeCtx> {
    let mut ctx = TypeCtx::new();
    if let Some(gs) = groups {
        elab_ctx_into(gat, &mut ctx, gs)?;
    }
    Ok(ctx)
}

/// Declaration heads: `x` or `x::T`, adding `x` to `ctx` unless it is
/// already there. Returns the variable.
fn head_arg(gat: &Gat, ctx: &mut TypeCtx, a: &Expr) -> Res<Ident> {
    let (name, ty, span) = match a {
        Expr::Name(n, s) => (n, None, *s),
        Expr::Ascribed(inner, ty, s) => match &**inner {
            Expr::Name(n, _) => (n, Some(&**ty), *s),
            _ => return Err(SurfaceError::syntax("expected a variable name", *s)),
        },
        other => {
            return Err(SurfaceError::syntax(
                "arguments of a declaration must be variables",
                other.span(),
            ))
        }
    };
    if let Some(v) = ctx.lookup_name(name) {
        if let Some(te) = ty {
            let t = elab_type(gat, ctx, te)?;
            if ctx.type_of(&v) != Some(&t) {
                return Err(SurfaceError::new(
                    SurfaceErrorKind::Pattern(format!(
                        "{name} is given two different types"
                    )),
                    span,
                ));
            }
        }
        return Ok(v);
    }
    let t = match ty {
        Some(te) => elab_type(gat, ctx, te)?,
        None => default_type(gat, name, span)?,
    };
    ctx.push(name.as_str(), t).map_err(|e| gat_err(e, span))
}

fn elab_line(b: &mut GatBuilder, line: &Line) -> Res<()> {
    match line {
        Line::TypeCon { name, args, ctx, span } => {
            let mut lc = elab_ctx(b.gat(), ctx.as_deref())?;
            let mut listed = Vec::new();
            for a in args.iter().flatten() {
                listed.push(head_arg(b.gat(), &mut lc, a)?);
            }
            let all: Vec<Ident> = lc.vars().collect();
            if args.is_some() && listed != all {
                return Err(SurfaceError::new(
                    SurfaceErrorKind::Pattern(format!(
                        "the parameters of {name} must list its whole context, in order"
                    )),
                    *span,
                ));
            }
            b.add_typecon(name, lc).map_err(|e| gat_err(e, *span))?;
        }
        Line::TermCon { lhs, result, ctx, span } => {
            let mut lc = elab_ctx(b.gat(), ctx.as_deref())?;
            let (name, args): (String, Vec<&Expr>) = match lhs {
                Expr::Name(n, _) => (n.clone(), vec![]),
                Expr::Call(f, args, _) => (f.clone(), args.iter().collect()),
                Expr::BinOp(op, l, r, _) => {
                    let name = b.gat().aliases().get(op).cloned().unwrap_or_else(|| op.clone());
                    (name, vec![&**l, &**r])
                }
                Expr::Ascribed(_, _, s) => {
                    return Err(SurfaceError::syntax("unexpected ascription", *s))
                }
            };
            let mut explicit = Vec::new();
            for a in args {
                explicit.push(head_arg(b.gat(), &mut lc, a)?);
            }
            let res = elab_type(b.gat(), &lc, result)?;
            b.add_termcon(&name, lc, explicit, res)
                .map_err(|e| gat_err(e, *span))?;
        }
        Line::Axiom { name, lhs, rhs, ctx, span } => {
            let lc = elab_ctx(b.gat(), ctx.as_deref())?;
            let l = elab_term(b.gat(), &lc, lhs, None)?;
            let sort = infer_sort(b.gat(), &lc, &l).ok().map(|s| s.0);
            let r = elab_term(b.gat(), &lc, rhs, sort.as_ref())?;
            b.add_axiom(name.as_deref(), lc, l, r)
                .map_err(|e| gat_err(e, *span))?;
        }
        Line::Alias { symbol, target, span } => {
            b.add_alias(symbol, target).map_err(|e| gat_err(e, *span))?;
        }
        Line::Normalize { op, assoc, unit, span } => {
            let gat = b.gat();
            let op_id = termcons_named(gat, op)
                .into_iter()
                .find(|c| use_arity(gat, c) == Some(2))
                .ok_or_else(|| gat_err(GatError::UnknownConstructor(op.clone()), *span))?;
            let unit_id = match unit {
                None => None,
                // a nullary unit if there is one; otherwise an indexed one like `id`
                Some(u) => {
                    let cands = termcons_named(gat, u);
                    let pick = cands
                        .iter()
                        .find(|c| use_arity(gat, c) == Some(0))
                        .or(cands.first())
                        .cloned();
                    Some(pick.ok_or_else(|| gat_err(GatError::UnknownConstructor(u.clone()), *span))?)
                }
            };
            let op_id = gat.canonical(&op_id);
            let unit_id = unit_id.map(|u| gat.canonical(&u));
            b.add_rule(op_id, *assoc, unit_id)
                .map_err(|e| gat_err(e, *span))?;
        }
        Line::Segment { lines, .. } => {
            b.new_segment();
            for l in lines {
                elab_line(b, l)?;
            }
            b.new_segment();
        }
        Line::Using { .. } => {}
    }
    Ok(())
}

fn lookup_theory<'r>(reg: &'r Registry, name: &str, span: Span) -> Res<&'r Gat> {
    reg.theory(name)
        .ok_or_else(|| SurfaceError::new(SurfaceErrorKind::UnknownTheory(name.to_string()), span))
}

pub fn elaborate_theory(decl: &TheoryDecl, reg: &Registry) -> Res<Gat> {
    let parent = match &decl.parent {
        Some((p, span)) => Some(lookup_theory(reg, p, *span)?.clone()),
        None => None,
    };
    let mut clauses = Vec::new();
    let mut using_span = decl.span;
    for line in &decl.lines {
        if let Line::Using { theory, renames, span } = line {
            using_span = *span;
            clauses.push(UsingClause {
                theory: lookup_theory(reg, theory, *span)?.clone(),
                renames: renames.iter().cloned().collect::<IndexMap<_, _>>(),
            });
        }
    }
    let base = if clauses.is_empty() {
        parent
    } else {
        if let Some(p) = parent {
            clauses.insert(
                0,
                UsingClause {
                    theory: p,
                    renames: IndexMap::new(),
                },
            );
        }
        Some(extend_with_using(&decl.name, &clauses).map_err(|e| SurfaceError::new(e, using_span))?)
    };
    let mut b = match &base {
        Some(g) => GatBuilder::extend(decl.name.clone(), g),
        None => GatBuilder::new(decl.name.clone()),
    };
    for line in &decl.lines {
        elab_line(&mut b, line)?;
    }
    b.build().map_err(|e| gat_err(e, decl.span))
}

/// Which domain constructor a clause pattern names.
fn clause_target(dom: &Gat, c: &MapClause) -> Res<Ident> {
    let (sym, arity) = match &c.lhs {
        Expr::Name(n, _) => (n.as_str(), None),
        Expr::Call(f, args, _) => (f.as_str(), Some(args.len())),
        Expr::BinOp(op, _, _, _) => (op.as_str(), Some(2)),
        Expr::Ascribed(_, _, s) => return Err(SurfaceError::syntax("unexpected ascription", *s)),
    };
    let cands = dom.candidates(sym);
    let found = match arity {
        None => cands.first(),
        Some(n) => cands
            .iter()
            .find(|k| use_arity(dom, k) == Some(n))
            .or(cands.first()),
    };
    found
        .map(|k| dom.canonical(k))
        .ok_or_else(|| gat_err(GatError::UnknownConstructor(sym.to_string()), c.lhs.span()))
}

/// Names the pattern gives to the positions of the constructor's context.
fn pattern_names(dom: &Gat, target: &Ident, c: &MapClause) -> Vec<(usize, String)> {
    let args: Vec<&Expr> = match &c.lhs {
        Expr::Call(_, args, _) => args.iter().collect(),
        Expr::BinOp(_, l, r, _) => vec![l, r],
        _ => vec![],
    };
    let positions: Vec<usize> = match dom.lookup(target) {
        Some(Judgment::TypeCon(t)) => (1..=t.args.len()).collect(),
        Some(Judgment::TermCon(t)) => t.explicit_positions(),
        _ => vec![],
    };
    args.iter()
        .zip(positions)
        .filter_map(|(a, p)| match a {
            Expr::Name(n, _) => Some((p, n.clone())),
            _ => None,
        })
        .collect()
}

pub fn elaborate_map(decl: &MapDecl, reg: &Registry) -> Res<TheoryMap> {
    let dom = lookup_theory(reg, &decl.dom.0, decl.dom.1)?.clone();
    let codom = lookup_theory(reg, &decl.codom.0, decl.codom.1)?.clone();

    let mut clauses: HashMap<Ident, &MapClause> = HashMap::new();
    for c in &decl.clauses {
        let t = clause_target(&dom, c)?;
        if !dom.is_constructor(&t) {
            return Err(SurfaceError::new(
                SurfaceErrorKind::Pattern(format!("{} is not a constructor", t.name)),
                c.span,
            ));
        }
        if clauses.insert(t.clone(), c).is_some() {
            return Err(gat_err(GatError::DuplicateName(t.name.to_string()), c.span));
        }
    }

    let mut typemap: IndexMap<Ident, TypeInCtx> = IndexMap::new();
    let mut termmap: IndexMap<Ident, TermInCtx> = IndexMap::new();
    let mut spans = HashMap::new();

    for (id, j) in dom.judgments() {
        let (lc, is_type) = match j {
            Judgment::TypeCon(t) => (&t.args, true),
            Judgment::TermCon(t) => (&t.localcontext, false),
            Judgment::Axiom(_) => continue,
        };
        let kind = TheoryMapKind::General {
            typemap: typemap.clone(),
            termmap: termmap.clone(),
        };
        let pusher = Pusher::partial(&dom, &codom, &kind);
        let span = clauses.get(&id).map(|c| c.span).unwrap_or(decl.span);
        let mut ctx = pusher
            .ctx(lc)
            .map_err(|e| SurfaceError::new(e, span))?;

        let Some(clause) = clauses.get(&id) else {
            // constructors the codomain already has map to themselves
            if !codom.has_segment(id.tag) {
                return Err(SurfaceError::new(
                    crate::morphisms::MapError::MissingImage(id.name.to_string()),
                    decl.span,
                ));
            }
            if is_type {
                let args = ctx.vars().map(AlgTerm::Var).collect();
                typemap.insert(id.clone(), TypeInCtx::new(ctx, AlgType::new(id.clone(), args)));
            } else {
                let con = dom.termcon(&id).expect("term constructor");
                let args = con.explicit_positions().into_iter().map(|p| AlgTerm::Var(ctx.var(p))).collect();
                termmap.insert(id.clone(), TermInCtx::new(ctx, AlgTerm::app(id.clone(), args)));
            }
            continue;
        };
        spans.insert(id.clone(), clause.span);

        if let Some(groups) = &clause.ctx {
            let given = elab_ctx(&dom, Some(groups))?;
            if !alpha_equal_ctx(&given, lc) {
                return Err(SurfaceError::new(
                    SurfaceErrorKind::Pattern(format!(
                        "the context of this clause does not match the declaration of {}",
                        id.name
                    )),
                    clause.span,
                ));
            }
            for i in 1..=given.len() {
                ctx.set_name(i, given.name(i).to_string());
            }
        } else {
            for (p, n) in pattern_names(&dom, &id, clause) {
                ctx.set_name(p, n);
            }
        }

        // `Hom => Leq`: a bare name for a bare name renames the constructor
        let renaming = match (&clause.lhs, &clause.image, &clause.ctx) {
            (Expr::Name(..), Expr::Name(n, _), None) => ctx.lookup_name(n).is_none().then_some(n),
            _ => None,
        };

        if is_type {
            let ty = match renaming {
                Some(n) => {
                    let cands = typecons_named(&codom, n);
                    let c = cands.first().ok_or_else(|| {
                        gat_err(GatError::UnknownConstructor(n.clone()), clause.image.span())
                    })?;
                    let args = ctx.vars().map(AlgTerm::Var).collect();
                    AlgType::new(codom.canonical(c), args)
                }
                None => elab_type(&codom, &ctx, &clause.image)?,
            };
            typemap.insert(id.clone(), TypeInCtx::new(ctx, ty));
        } else {
            let con = dom.termcon(&id).expect("term constructor");
            let expected = pusher
                .ty(lc, ctx.tag(), &con.result)
                .ok()
                .map(|t| t.head);
            let term = match renaming {
                Some(n) => {
                    let cands = termcons_named(&codom, n);
                    let c = cands.first().ok_or_else(|| {
                        gat_err(GatError::UnknownConstructor(n.clone()), clause.image.span())
                    })?;
                    let args = con
                        .explicit_positions()
                        .into_iter()
                        .map(|p| AlgTerm::Var(ctx.var(p)))
                        .collect();
                    AlgTerm::app(codom.canonical(c), args)
                }
                None => elab_term(&codom, &ctx, &clause.image, expected.as_ref())?,
            };
            termmap.insert(id.clone(), TermInCtx::new(ctx, term));
        }
    }

    TheoryMap::from_images(decl.name.clone(), dom, codom, typemap, termmap)
        .map(|m| m.with_spans(spans))
        .map_err(|e| SurfaceError::new(e, decl.span))
}

fn single_decl(src: &str) -> Res<Decl> {
    let mut decls = parse_file(src)?;
    if decls.len() != 1 {
        return Err(SurfaceError::syntax(
            format!("expected exactly one declaration, found {}", decls.len()),
            Span::new(1, 1),
        ));
    }
    Ok(decls.remove(0))
}

/// Parses and elaborates one `theory` declaration.
pub fn parse_theory(src: &str, reg: &Registry) -> Res<Gat> {
    match single_decl(src)? {
        Decl::Theory(t) => elaborate_theory(&t, reg),
        Decl::Map(m) => Err(SurfaceError::syntax("expected a theory, found a map", m.span)),
    }
}

/// Parses and elaborates one `map` declaration.
pub fn parse_map(src: &str, reg: &Registry) -> Res<TheoryMap> {
    match single_decl(src)? {
        Decl::Map(m) => elaborate_map(&m, reg),
        Decl::Theory(t) => Err(SurfaceError::syntax("expected a map, found a theory", t.span)),
    }
}

/// Parses `t ⊣ [ctx]` (the context is optional) in `gat`.
pub fn parse_term(gat: &Gat, src: &str) -> Res<TermInCtx> {
    let (e, groups) = parse_term_ast(src)?;
    let ctx = elab_ctx(gat, groups.as_deref())?;
    let t = elab_term(gat, &ctx, &e, None)?;
    check_term(gat, &ctx, &t).map_err(|err| gat_err(err, e.span()))?;
    Ok(TermInCtx::new(ctx, t))
}

/// Parses a term without a context, in an existing context.
pub fn parse_term_in(gat: &Gat, ctx: &TypeCtx, src: &str) -> Res<AlgTerm> {
    let (e, groups) = parse_term_ast(src)?;
    if groups.is_some() {
        return Err(SurfaceError::syntax("a context is not allowed here", e.span()));
    }
    let t = elab_term(gat, ctx, &e, None)?;
    check_term(gat, ctx, &t).map_err(|err| gat_err(err, e.span()))?;
    Ok(t)
}

/// Parses `T ⊣ [ctx]` in `gat`.
pub fn parse_type(gat: &Gat, src: &str) -> Res<TypeInCtx> {
    let (e, groups) = parse_term_ast(src)?;
    let ctx = elab_ctx(gat, groups.as_deref())?;
    let t = elab_type(gat, &ctx, &e)?;
    check_type(gat, &ctx, &t).map_err(|err| gat_err(err, e.span()))?;
    Ok(TypeInCtx::new(ctx, t))
}

/// Parses the inside of a context, with or without brackets.
pub fn parse_context(gat: &Gat, src: &str) -> Res<TypeCtx> {
    let groups = parse_ctx_ast(src)?;
    elab_ctx(gat, Some(&groups))
}
