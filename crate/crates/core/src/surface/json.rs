//! JSON documents for theories, maps and terms.
//!
//! Scope tags are process-local, so documents number them canonically in
//! order of first appearance: segments first, then contexts. Two α-equal
//! objects therefore serialize identically. A map document embeds both
//! theories; segments they share get the same number and are shared again
//! after decoding.

use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;
use serde_json::{json, Value};

use super::SurfaceError;
use crate::gat::{
    AlgSort, AlgTerm, AlgType, Axiom, Gat, Judgment, NormalizationPolicy, TermConstructor,
    TermInCtx, TypeConstructor, TypeCtx, TypeInCtx,
};
use crate::morphisms::{TheoryMap, TheoryMapKind};
use crate::scopes::{fresh_tag, Binding, Ident, Scope, ScopeList, ScopeTag};

/// Anything a document can hold.
#[derive(Clone, Debug)]
pub enum JsonEntity {
    Theory(Gat),
    Map(TheoryMap),
    Term(Gat, TermInCtx),
}

#[derive(Default)]
struct Encoder {
    tags: HashMap<ScopeTag, usize>,
}

impl Encoder {
    fn tag(&mut self, t: ScopeTag) -> usize {
        let n = self.tags.len() + 1;
        *self.tags.entry(t).or_insert(n)
    }

    fn ident(&mut self, id: &Ident) -> Value {
        json!({ "tag": self.tag(id.tag), "index": id.index, "name": &*id.name })
    }

    fn term(&mut self, t: &AlgTerm) -> Value {
        match t {
            AlgTerm::Var(v) => json!({ "var": self.ident(v) }),
            AlgTerm::App(h, args) => {
                let head = self.ident(h);
                let args: Vec<Value> = args.iter().map(|a| self.term(a)).collect();
                json!({ "app": head, "args": args })
            }
        }
    }

    fn ty(&mut self, t: &AlgType) -> Value {
        let head = self.ident(&t.head);
        let args: Vec<Value> = t.args.iter().map(|a| self.term(a)).collect();
        json!({ "head": head, "args": args })
    }

    fn ctx(&mut self, c: &TypeCtx) -> Value {
        let tag = self.tag(c.tag());
        let bindings: Vec<Value> = (1..=c.len())
            .map(|i| json!({ "name": c.name(i), "type": self.ty(c.ty(i)) }))
            .collect();
        json!({ "tag": tag, "bindings": bindings })
    }

    fn judgment(&mut self, j: &Judgment) -> Value {
        match j {
            Judgment::TypeCon(t) => json!({ "kind": "typecon", "args": self.ctx(&t.args) }),
            Judgment::TermCon(t) => {
                let ctx = self.ctx(&t.localcontext);
                let explicit: Vec<usize> = t.explicit_positions();
                json!({ "kind": "termcon", "ctx": ctx, "explicit": explicit, "result": self.ty(&t.result) })
            }
            Judgment::Axiom(a) => {
                let ctx = self.ctx(&a.localcontext);
                json!({
                    "kind": "axiom",
                    "ctx": ctx,
                    "sort": self.ident(&a.sort.0),
                    "lhs": self.term(&a.lhs),
                    "rhs": self.term(&a.rhs),
                })
            }
        }
    }

    fn theory(&mut self, g: &Gat) -> Value {
        // number segments before anything else so the numbering is canonical
        for s in g.segments().scopes() {
            self.tag(s.tag());
        }
        let segments: Vec<Value> = g
            .segments()
            .scopes()
            .iter()
            .map(|s| {
                let bindings: Vec<Value> = s
                    .bindings()
                    .iter()
                    .map(|b| {
                        json!({
                            "name": &*b.name,
                            "arity": b.arity,
                            "judgment": self.judgment(&b.payload),
                        })
                    })
                    .collect();
                json!({ "tag": self.tag(s.tag()), "bindings": bindings })
            })
            .collect();
        let policy: Vec<Value> = g
            .policy()
            .rules()
            .map(|(op, assoc, unit)| {
                json!({ "op": self.ident(op), "assoc": assoc, "unit": unit.map(|u| self.ident(u)) })
            })
            .collect();
        json!({
            "kind": "theory",
            "name": g.name(),
            "segments": segments,
            "aliases": g.aliases(),
            "policy": policy,
        })
    }
}

pub fn theory_to_json(g: &Gat) -> Value {
    Encoder::default().theory(g)
}

pub fn map_to_json(m: &TheoryMap) -> Value {
    let mut enc = Encoder::default();
    let dom = enc.theory(m.dom());
    let codom = enc.theory(m.codom());
    let mut typemap = Vec::new();
    let mut termmap = Vec::new();
    let mut error = None;
    for c in m.dom().typecons() {
        match m.type_image(&c) {
            Ok(img) => {
                let source = enc.ident(&c);
                let ctx = enc.ctx(&img.ctx);
                typemap.push(json!({ "source": source, "ctx": ctx, "type": enc.ty(&img.ty) }));
            }
            Err(e) => error = Some(e.to_string()),
        }
    }
    for c in m.dom().termcons() {
        match m.term_image(&c) {
            Ok(img) => {
                let source = enc.ident(&c);
                let ctx = enc.ctx(&img.ctx);
                termmap.push(json!({ "source": source, "ctx": ctx, "term": enc.term(&img.term) }));
            }
            Err(e) => error = Some(e.to_string()),
        }
    }
    let mut v = json!({
        "kind": "map",
        "name": m.name(),
        "map_kind": m.kind().label(),
        "dom": dom,
        "codom": codom,
        "typemap": typemap,
        "termmap": termmap,
    });
    if let Some(e) = error {
        v["error"] = json!(e);
    }
    v
}

pub fn term_to_json(g: &Gat, t: &TermInCtx) -> Value {
    let mut enc = Encoder::default();
    let theory = enc.theory(g);
    let ctx = enc.ctx(&t.ctx);
    json!({ "kind": "term", "theory": theory, "ctx": ctx, "term": enc.term(&t.term) })
}

pub fn to_json(e: &JsonEntity) -> Value {
    match e {
        JsonEntity::Theory(g) => theory_to_json(g),
        JsonEntity::Map(m) => map_to_json(m),
        JsonEntity::Term(g, t) => term_to_json(g, t),
    }
}

type Res<T> = Result<T, SurfaceError>;

#[derive(Default)]
struct Decoder {
    tags: HashMap<u64, ScopeTag>,
    segments: HashMap<u64, Arc<Scope<Judgment>>>,
    /// Length of every scope decoded so far, and every identifier with the
    /// path it was read from, so bad references are reported where they are.
    scope_lens: HashMap<ScopeTag, usize>,
    idents: Vec<(Ident, String)>,
}

fn field<'v>(v: &'v Value, key: &str, path: &str) -> Res<&'v Value> {
    v.get(key)
        .ok_or_else(|| SurfaceError::malformed(path, format!("missing field `{key}`")))
}

fn as_str<'v>(v: &'v Value, key: &str, path: &str) -> Res<&'v str> {
    field(v, key, path)?
        .as_str()
        .ok_or_else(|| SurfaceError::malformed(format!("{path}.{key}"), "expected a string"))
}

fn as_u64(v: &Value, key: &str, path: &str) -> Res<u64> {
    field(v, key, path)?
        .as_u64()
        .ok_or_else(|| SurfaceError::malformed(format!("{path}.{key}"), "expected a nonnegative integer"))
}

fn as_array<'v>(v: &'v Value, key: &str, path: &str) -> Res<&'v Vec<Value>> {
    field(v, key, path)?
        .as_array()
        .ok_or_else(|| SurfaceError::malformed(format!("{path}.{key}"), "expected an array"))
}

impl Decoder {
    fn tag(&mut self, n: u64) -> ScopeTag {
        *self.tags.entry(n).or_insert_with(fresh_tag)
    }

    fn ident(&mut self, v: &Value, path: &str) -> Res<Ident> {
        let tag = as_u64(v, "tag", path)?;
        let index = as_u64(v, "index", path)? as usize;
        if index == 0 {
            return Err(SurfaceError::malformed(format!("{path}.index"), "indices start at 1"));
        }
        let name = as_str(v, "name", path)?;
        let id = Ident::new(self.tag(tag), index, name);
        self.idents.push((id.clone(), path.to_string()));
        Ok(id)
    }

    /// Every identifier read so far points into a scope of the document.
    fn check_references(&self) -> Res<()> {
        for (id, path) in &self.idents {
            match self.scope_lens.get(&id.tag) {
                Some(&n) if id.index <= n => {}
                Some(&n) => {
                    return Err(SurfaceError::malformed(
                        format!("{path}.index"),
                        format!("index {} is past the end of a scope of length {n}", id.index),
                    ))
                }
                None => return Err(SurfaceError::malformed(format!("{path}.tag"), "no scope in the document has this tag")),
            }
        }
        Ok(())
    }

    fn term(&mut self, v: &Value, path: &str) -> Res<AlgTerm> {
        if let Some(x) = v.get("var") {
            return Ok(AlgTerm::Var(self.ident(x, &format!("{path}.var"))?));
        }
        let head = self.ident(field(v, "app", path)?, &format!("{path}.app"))?;
        let args = as_array(v, "args", path)?
            .iter()
            .enumerate()
            .map(|(i, a)| self.term(a, &format!("{path}.args[{i}]")))
            .collect::<Res<Vec<_>>>()?;
        Ok(AlgTerm::app(head, args))
    }

    fn ty(&mut self, v: &Value, path: &str) -> Res<AlgType> {
        let head = self.ident(field(v, "head", path)?, &format!("{path}.head"))?;
        let args = as_array(v, "args", path)?
            .iter()
            .enumerate()
            .map(|(i, a)| self.term(a, &format!("{path}.args[{i}]")))
            .collect::<Res<Vec<_>>>()?;
        Ok(AlgType::new(head, args))
    }

    fn ctx(&mut self, v: &Value, path: &str) -> Res<TypeCtx> {
        let tag = self.tag(as_u64(v, "tag", path)?);
        let mut scope = Scope::with_tag(tag);
        for (i, b) in as_array(v, "bindings", path)?.iter().enumerate() {
            let p = format!("{path}.bindings[{i}]");
            let name = as_str(b, "name", &p)?;
            let ty = self.ty(field(b, "type", &p)?, &format!("{p}.type"))?;
            scope.push_unchecked(Binding::new(name, ty));
        }
        self.scope_lens.insert(tag, scope.len());
        Ok(TypeCtx::from_scope(scope))
    }

    fn judgment(&mut self, v: &Value, path: &str) -> Res<Judgment> {
        match as_str(v, "kind", path)? {
            "typecon" => Ok(Judgment::TypeCon(TypeConstructor {
                args: self.ctx(field(v, "args", path)?, &format!("{path}.args"))?,
            })),
            "termcon" => {
                let lc = self.ctx(field(v, "ctx", path)?, &format!("{path}.ctx"))?;
                let mut explicit_args = Vec::new();
                for (i, p) in as_array(v, "explicit", path)?.iter().enumerate() {
                    let p = p.as_u64().filter(|p| *p >= 1 && (*p as usize) <= lc.len()).ok_or_else(|| {
                        SurfaceError::malformed(format!("{path}.explicit[{i}]"), "not a position of the context")
                    })?;
                    explicit_args.push(lc.var(p as usize));
                }
                let result = self.ty(field(v, "result", path)?, &format!("{path}.result"))?;
                Ok(Judgment::TermCon(TermConstructor {
                    localcontext: lc,
                    explicit_args,
                    result,
                }))
            }
            "axiom" => {
                let lc = self.ctx(field(v, "ctx", path)?, &format!("{path}.ctx"))?;
                Ok(Judgment::Axiom(Axiom {
                    localcontext: lc,
                    sort: AlgSort(self.ident(field(v, "sort", path)?, &format!("{path}.sort"))?),
                    lhs: self.term(field(v, "lhs", path)?, &format!("{path}.lhs"))?,
                    rhs: self.term(field(v, "rhs", path)?, &format!("{path}.rhs"))?,
                }))
            }
            other => Err(SurfaceError::malformed(
                format!("{path}.kind"),
                format!("unknown judgment kind `{other}`"),
            )),
        }
    }

    fn theory(&mut self, v: &Value, path: &str) -> Res<Gat> {
        let kind = as_str(v, "kind", path)?;
        if kind != "theory" {
            return Err(SurfaceError::malformed(format!("{path}.kind"), format!("expected a theory, found `{kind}`")));
        }
        let name = as_str(v, "name", path)?;
        let mut scopes = Vec::new();
        for (k, s) in as_array(v, "segments", path)?.iter().enumerate() {
            let p = format!("{path}.segments[{k}]");
            let n = as_u64(s, "tag", &p)?;
            if let Some(shared) = self.segments.get(&n) {
                scopes.push(shared.clone());
                continue;
            }
            let mut scope = Scope::with_tag(self.tag(n));
            for (i, b) in as_array(s, "bindings", &p)?.iter().enumerate() {
                let bp = format!("{p}.bindings[{i}]");
                let bname = as_str(b, "name", &bp)?;
                let j = self.judgment(field(b, "judgment", &bp)?, &format!("{bp}.judgment"))?;
                let binding = match b.get("arity").and_then(Value::as_u64) {
                    Some(a) => Binding::with_arity(bname, a as usize, j),
                    None => Binding::new(bname, j),
                };
                scope.push_unchecked(binding);
            }
            self.scope_lens.insert(scope.tag(), scope.len());
            let scope = Arc::new(scope);
            self.segments.insert(n, scope.clone());
            scopes.push(scope);
        }
        let segments = ScopeList::from_scopes(scopes)
            .map_err(|e| SurfaceError::malformed(format!("{path}.segments"), e.to_string()))?;

        let mut aliases = IndexMap::new();
        if let Some(a) = v.get("aliases") {
            let a = a
                .as_object()
                .ok_or_else(|| SurfaceError::malformed(format!("{path}.aliases"), "expected an object"))?;
            for (k, t) in a {
                let t = t.as_str().ok_or_else(|| {
                    SurfaceError::malformed(format!("{path}.aliases.{k}"), "expected a string")
                })?;
                aliases.insert(k.clone(), t.to_string());
            }
        }
        let mut policy = NormalizationPolicy::new();
        if let Some(rules) = v.get("policy") {
            let rules = rules
                .as_array()
                .ok_or_else(|| SurfaceError::malformed(format!("{path}.policy"), "expected an array"))?;
            for (i, r) in rules.iter().enumerate() {
                let p = format!("{path}.policy[{i}]");
                let op = self.ident(field(r, "op", &p)?, &format!("{p}.op"))?;
                let assoc = field(r, "assoc", &p)?.as_bool().unwrap_or(false);
                let unit = match r.get("unit") {
                    None | Some(Value::Null) => None,
                    Some(u) => Some(self.ident(u, &format!("{p}.unit"))?),
                };
                policy.add(op, assoc, unit);
            }
        }
        self.check_references()?;
        let g = Gat::from_parts(name.to_string(), segments, aliases, policy);
        g.self_check()
            .map_err(|e| SurfaceError::malformed(path, format!("ill-formed theory: {e}")))?;
        // identifiers must point at bindings that exist
        for (op, _, unit) in g.policy().rules() {
            for id in std::iter::once(op).chain(unit) {
                if g.termcon(id).is_none() {
                    return Err(SurfaceError::malformed(
                        format!("{path}.policy"),
                        format!("{} is not a term constructor", id.name),
                    ));
                }
            }
        }
        Ok(g)
    }
}

pub fn theory_from_json(v: &Value) -> Res<Gat> {
    Decoder::default().theory(v, "$")
}

pub fn map_from_json(v: &Value) -> Res<TheoryMap> {
    let mut dec = Decoder::default();
    let kind = as_str(v, "kind", "$")?;
    if kind != "map" {
        return Err(SurfaceError::malformed("$.kind", format!("expected a map, found `{kind}`")));
    }
    let name = as_str(v, "name", "$")?;
    let dom = dec.theory(field(v, "dom", "$")?, "$.dom")?;
    let codom = dec.theory(field(v, "codom", "$")?, "$.codom")?;
    let mut typemap = IndexMap::new();
    for (i, e) in as_array(v, "typemap", "$")?.iter().enumerate() {
        let p = format!("$.typemap[{i}]");
        let source = dec.ident(field(e, "source", &p)?, &format!("{p}.source"))?;
        let ctx = dec.ctx(field(e, "ctx", &p)?, &format!("{p}.ctx"))?;
        let ty = dec.ty(field(e, "type", &p)?, &format!("{p}.type"))?;
        if dom.typecon(&source).is_none() {
            return Err(SurfaceError::malformed(format!("{p}.source"), "not a type constructor of the domain"));
        }
        typemap.insert(dom.canonical(&source), TypeInCtx::new(ctx, ty));
    }
    let mut termmap = IndexMap::new();
    for (i, e) in as_array(v, "termmap", "$")?.iter().enumerate() {
        let p = format!("$.termmap[{i}]");
        let source = dec.ident(field(e, "source", &p)?, &format!("{p}.source"))?;
        let ctx = dec.ctx(field(e, "ctx", &p)?, &format!("{p}.ctx"))?;
        let term = dec.term(field(e, "term", &p)?, &format!("{p}.term"))?;
        if dom.termcon(&source).is_none() {
            return Err(SurfaceError::malformed(format!("{p}.source"), "not a term constructor of the domain"));
        }
        termmap.insert(dom.canonical(&source), TermInCtx::new(ctx, term));
    }
    dec.check_references()?;
    let m = TheoryMap::from_images(name, dom, codom, typemap, termmap)
        .map_err(|e| SurfaceError::malformed("$", e.to_string()))?;
    // an inclusion that re-decoded as shared segments is reported as such
    if let TheoryMapKind::General { .. } = m.kind() {
        crate::morphisms::check_welltyped(&m).map_err(|errs| {
            SurfaceError::malformed("$", errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))
        })?;
    }
    Ok(m)
}

pub fn term_from_json(v: &Value) -> Res<(Gat, TermInCtx)> {
    let mut dec = Decoder::default();
    let kind = as_str(v, "kind", "$")?;
    if kind != "term" {
        return Err(SurfaceError::malformed("$.kind", format!("expected a term, found `{kind}`")));
    }
    let g = dec.theory(field(v, "theory", "$")?, "$.theory")?;
    let ctx = dec.ctx(field(v, "ctx", "$")?, "$.ctx")?;
    let term = dec.term(field(v, "term", "$")?, "$.term")?;
    dec.check_references()?;
    crate::gat::check_context(&g, &ctx).map_err(|e| SurfaceError::malformed("$.ctx", e.to_string()))?;
    crate::gat::infer_sort(&g, &ctx, &term).map_err(|e| SurfaceError::malformed("$.term", e.to_string()))?;
    Ok((g, TermInCtx::new(ctx, term)))
}

/// Decodes any document, dispatching on its `kind`.
pub fn from_json(v: &Value) -> Res<JsonEntity> {
    match v.get("kind").and_then(Value::as_str) {
        Some("theory") => theory_from_json(v).map(JsonEntity::Theory),
        Some("map") => map_from_json(v).map(JsonEntity::Map),
        Some("term") => term_from_json(v).map(|(g, t)| JsonEntity::Term(g, t)),
        Some(k) => Err(SurfaceError::malformed("$.kind", format!("unknown document kind `{k}`"))),
        None => Err(SurfaceError::malformed("$", "missing field `kind`")),
    }
}
