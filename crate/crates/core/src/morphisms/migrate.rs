use std::sync::Arc;

use super::{MapError, TheoryMap, TheoryMapKind};
use crate::models::{CheckError, Model, ModelBuilder, ModelError, Value};
use crate::scopes::Ident;

/// Pulls a model of the codomain back to a model of the domain: each domain
/// operation evaluates its image in `mb`, and each domain type coerces
/// through its image type.
///
/// The image of every term constructor may only mention its explicit
/// arguments, since operations never see implicit ones. This is checked up
/// front and reported as [`MapError::ErasureViolation`].
pub fn migrate_model(m: &TheoryMap, mb: &Model) -> Result<Model, MapError> {
    if !mb.theory().same_theory(m.codom()) {
        return Err(MapError::TheoryMismatch {
            left: m.codom().name().to_string(),
            right: mb.theory().name().to_string(),
        });
    }
    let general = m.promote()?;
    let TheoryMapKind::General { typemap, termmap } = general.kind() else {
        unreachable!("promote returns a general map")
    };
    let dom = m.dom();
    let mb = Arc::new(mb.clone());
    let mut b = ModelBuilder::new(format!("{}*{}", m.name(), mb.name()), dom);
    for (k, v) in mb.params() {
        b = b.param(k, v.clone());
    }

    for (c, img) in termmap {
        let con = dom.termcon(c).expect("domain term constructor");
        let explicit = con.explicit_positions();
        let itag = img.ctx.tag();
        if let Some(v) = img
            .term
            .vars()
            .into_iter()
            .find(|v| v.tag == itag && !explicit.contains(&v.index))
        {
            return Err(MapError::ErasureViolation {
                constructor: dom.canonical(c).name.to_string(),
                var: v.name.to_string(),
            });
        }
        let model = mb.clone();
        let term = img.term.clone();
        b = b.op_id(
            c.clone(),
            Arc::new(move |args: &[Value]| {
                let lookup = |v: &Ident| {
                    if v.tag != itag {
                        return None;
                    }
                    explicit.iter().position(|p| *p == v.index).map(|i| args[i].clone())
                };
                model.eval_with(&lookup, &term).map_err(|e| match e {
                    ModelError::Check(c) => c,
                    other => CheckError::msg(other.to_string()),
                })
            }),
        );
    }

    for (c, img) in typemap {
        let itag = img.ctx.tag();
        let head = img.ty.head.clone();
        let targs = img.ty.args.clone();
        let eval_args = {
            let model = mb.clone();
            move |args: &[Value]| -> Result<Vec<Value>, CheckError> {
                let lookup = |v: &Ident| (v.tag == itag).then(|| args.get(v.index - 1).cloned()).flatten();
                targs
                    .iter()
                    .map(|t| model.eval_with(&lookup, t).map_err(|e| CheckError::msg(e.to_string())))
                    .collect()
            }
        };
        let eval_args = Arc::new(eval_args);
        let (model, h, ea) = (mb.clone(), head.clone(), eval_args.clone());
        b = b.coerce_id(
            c.clone(),
            Arc::new(move |v, args| model.coerce(&h, v, &ea(args)?)),
        );
        if let Some(en) = mb.enumerator(&head).cloned() {
            let ea = eval_args.clone();
            b = b.enumerate_id(c.clone(), Arc::new(move |args| ea(args).map(|a| en(&a)).unwrap_or_default()));
        }
        if let Some(kind) = mb.carrier(&head) {
            b = b.carrier_id(c.clone(), kind.clone());
        }
    }

    // literals of a domain type are literals of its image type
    let heads: std::collections::HashMap<Ident, Ident> =
        typemap.iter().map(|(c, img)| (c.clone(), img.ty.head.clone())).collect();
    let model = mb.clone();
    b = b.literal(Arc::new(move |ty, text| {
        let h = heads.get(ty).ok_or_else(|| format!("no image for type {}", ty.name))?;
        model.parse_value(h, text).map_err(|e| e.to_string())
    }));

    b.build().map_err(|e| MapError::Migration(e.to_string()))
}
