//! Printing kernel syntax back into the surface language.
//!
//! Output re-parses to an α-equal object. Infix applications are fully
//! parenthesized when nested, so `(Z()+x)+Z()` rather than `Z()+x+Z()`.

use std::fmt::Write;

use super::lexer::is_operator_symbol;
use crate::gat::{AlgTerm, AlgType, Gat, Judgment, TermInCtx, TypeCtx, TypeInCtx};
use crate::morphisms::TheoryMap;
use crate::scopes::Ident;

fn var_name(ctx: &TypeCtx, v: &Ident) -> String {
    if ctx.has_var(v) {
        ctx.name(v.index).to_string()
    } else {
        v.name.to_string()
    }
}

/// The constructor's own name, when it is an infix symbol.
fn infix(gat: &Gat, h: &Ident) -> Option<String> {
    let name = gat.binding(h).map(|b| b.name.to_string()).unwrap_or_else(|_| h.name.to_string());
    is_operator_symbol(&name).then_some(name)
}

fn head_name(gat: &Gat, h: &Ident) -> String {
    gat.binding(h)
        .map(|b| b.name.to_string())
        .unwrap_or_else(|_| h.name.to_string())
}

fn term_into(out: &mut String, gat: &Gat, ctx: &TypeCtx, t: &AlgTerm, nested: bool) {
    match t {
        AlgTerm::Var(v) => out.push_str(&var_name(ctx, v)),
        AlgTerm::App(h, args) => match (infix(gat, h), args.as_slice()) {
            (Some(op), [l, r]) => {
                if nested {
                    out.push('(');
                }
                term_into(out, gat, ctx, l, true);
                out.push_str(&op);
                term_into(out, gat, ctx, r, true);
                if nested {
                    out.push(')');
                }
            }
            _ => {
                out.push_str(&head_name(gat, h));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    term_into(out, gat, ctx, a, false);
                }
                out.push(')');
            }
        },
    }
}

pub fn pretty_term(gat: &Gat, ctx: &TypeCtx, t: &AlgTerm) -> String {
    let mut s = String::new();
    term_into(&mut s, gat, ctx, t, false);
    s
}

pub fn pretty_type(gat: &Gat, ctx: &TypeCtx, ty: &AlgType) -> String {
    let name = head_name(gat, &ty.head);
    match (infix(gat, &ty.head), ty.args.as_slice()) {
        (Some(op), [l, r]) => {
            let mut s = String::new();
            term_into(&mut s, gat, ctx, l, true);
            s.push_str(&op);
            term_into(&mut s, gat, ctx, r, true);
            s
        }
        (_, []) => name,
        (_, args) => {
            let args: Vec<String> = args.iter().map(|a| pretty_term(gat, ctx, a)).collect();
            format!("{name}({})", args.join(", "))
        }
    }
}

fn is_default(gat: &Gat, ty: &AlgType) -> bool {
    ty.args.is_empty() && gat.default_type().is_some_and(|d| gat.canonical(&d) == gat.canonical(&ty.head))
}

/// `[x, f::Hom(a, b)]`; variables of the default type are left bare.
pub fn pretty_ctx(gat: &Gat, ctx: &TypeCtx) -> String {
    let entries: Vec<String> = (1..=ctx.len())
        .map(|i| {
            let ty = ctx.ty(i);
            if is_default(gat, ty) {
                ctx.name(i).to_string()
            } else {
                format!("{}::{}", ctx.name(i), pretty_type(gat, ctx, ty))
            }
        })
        .collect();
    format!("[{}]", entries.join(", "))
}

fn with_ctx(gat: &Gat, ctx: &TypeCtx, body: String) -> String {
    if ctx.is_empty() {
        body
    } else {
        format!("{body} ⊣ {}", pretty_ctx(gat, ctx))
    }
}

pub fn pretty_term_in_ctx(gat: &Gat, t: &TermInCtx) -> String {
    with_ctx(gat, &t.ctx, pretty_term(gat, &t.ctx, &t.term))
}

pub fn pretty_type_in_ctx(gat: &Gat, t: &TypeInCtx) -> String {
    with_ctx(gat, &t.ctx, pretty_type(gat, &t.ctx, &t.ty))
}

/// One judgment as a declaration line.
fn judgment_line(gat: &Gat, name: &str, j: &Judgment) -> String {
    match j {
        Judgment::TypeCon(t) => {
            if t.args.is_empty() {
                format!("{name}::TYPE")
            } else {
                let ps: Vec<String> = (1..=t.args.len())
                    .map(|i| {
                        let ty = t.args.ty(i);
                        if is_default(gat, ty) {
                            t.args.name(i).to_string()
                        } else {
                            format!("{}::{}", t.args.name(i), pretty_type(gat, &t.args, ty))
                        }
                    })
                    .collect();
                format!("{name}({})::TYPE", ps.join(", "))
            }
        }
        Judgment::TermCon(t) => {
            let lc = &t.localcontext;
            let args: Vec<String> = t.explicit_args.iter().map(|v| lc.name(v.index).to_string()).collect();
            let head = if is_operator_symbol(name) && args.len() == 2 {
                format!("({}{name}{})", args[0], args[1])
            } else {
                format!("{name}({})", args.join(", "))
            };
            with_ctx(gat, lc, format!("{head}::{}", pretty_type(gat, lc, &t.result)))
        }
        Judgment::Axiom(a) => {
            let eq = format!(
                "{} == {}",
                pretty_term(gat, &a.localcontext, &a.lhs),
                pretty_term(gat, &a.localcontext, &a.rhs)
            );
            let eq = if name.is_empty() { eq } else { format!("{name} := {eq}") };
            with_ctx(gat, &a.localcontext, eq)
        }
    }
}

/// The whole theory as a flat declaration, one `segment` block per
/// inherited segment so that re-parsing keeps the segment structure.
pub fn pretty_gat(gat: &Gat) -> String {
    let mut out = String::new();
    writeln!(out, "theory {} {{", gat.name()).unwrap();
    for (sym, target) in gat.aliases() {
        writeln!(out, "  alias {sym} = {target}").unwrap();
    }
    let scopes = gat.segments().scopes();
    for (k, scope) in scopes.iter().enumerate() {
        let last = k + 1 == scopes.len();
        let indent = if last { "  " } else { "    " };
        if !last {
            writeln!(out, "  segment {{").unwrap();
        }
        for b in scope.bindings() {
            writeln!(out, "{indent}{}", judgment_line(gat, &b.name, &b.payload)).unwrap();
        }
        for (op, assoc, unit) in gat.policy().rules() {
            if op.tag != scope.tag() {
                continue;
            }
            let mut line = format!("{indent}normalize {}", head_name(gat, op));
            if assoc {
                line.push_str(" assoc");
            }
            if let Some(u) = unit {
                write!(line, " unit {}", head_name(gat, u)).unwrap();
            }
            writeln!(out, "{line}").unwrap();
        }
        if !last {
            writeln!(out, "  }}").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// A map as a declaration: one clause per domain constructor, each with
/// the constructor's full context so that re-parsing needs no guessing.
pub fn pretty_map(m: &TheoryMap) -> String {
    let mut out = String::new();
    writeln!(out, "map {}({}, {}) {{", m.name(), m.dom().name(), m.codom().name()).unwrap();
    let (dom, codom) = (m.dom(), m.codom());
    let renamed = |ictx: &TypeCtx, lc: &TypeCtx| {
        let mut c = ictx.clone();
        for i in 1..=lc.len().min(c.len()) {
            c.set_name(i, lc.name(i).to_string());
        }
        c
    };
    for c in dom.typecons().into_iter().chain(dom.termcons()) {
        let name = head_name(dom, &c);
        let line = if let Some(tc) = dom.typecon(&c) {
            match m.type_image(&c) {
                Ok(img) => {
                    let lc = &tc.args;
                    let args: Vec<String> = (1..=lc.len()).map(|i| lc.name(i).to_string()).collect();
                    let lhs = if args.is_empty() {
                        name
                    } else {
                        format!("{name}({})", args.join(", "))
                    };
                    let ictx = renamed(&img.ctx, lc);
                    format!(
                        "{} => {}",
                        with_ctx(dom, lc, lhs),
                        pretty_type(codom, &ictx, &img.ty)
                    )
                }
                Err(e) => format!("# {name}: {e}"),
            }
        } else {
            let con = dom.termcon(&c).expect("term constructor");
            match m.term_image(&c) {
                Ok(img) => {
                    let lc = &con.localcontext;
                    let args: Vec<String> =
                        con.explicit_positions().iter().map(|p| lc.name(*p).to_string()).collect();
                    let lhs = if is_operator_symbol(&name) && args.len() == 2 {
                        format!("{}{name}{}", args[0], args[1])
                    } else {
                        format!("{name}({})", args.join(", "))
                    };
                    let ictx = renamed(&img.ctx, lc);
                    format!(
                        "{} => {}",
                        with_ctx(dom, lc, lhs),
                        pretty_term(codom, &ictx, &img.term)
                    )
                }
                Err(e) => format!("# {name}: {e}"),
            }
        };
        writeln!(out, "  {line}").unwrap();
    }
    out.push_str("}\n");
    out
}
