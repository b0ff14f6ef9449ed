//! Theory maps: identity, inclusion, simple (constructor renaming) and
//! general (constructor ↦ term in context), with pushforward, composition,
//! checking, and model migration.
//!
//! Every kind can be promoted to a general map, so the general case is the
//! semantic reference; the narrower kinds exist because they make the
//! common operations cheap (pushforward by renaming heads) and make more
//! checks decidable (simple validity is a syntactic comparison).

mod check;
mod migrate;

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::gat::{
    solve_implicits, AlgTerm, AlgType, Gat, GatError, Judgment, TermInCtx, TypeCtx, TypeInCtx,
};
use crate::scopes::{Ident, ScopeTag, TagMap};
use crate::surface::Span;

pub use check::{
    check_axiom_preservation, check_simple_validity, check_welltyped, AxiomVerdict, Diagnostic,
    ValidityReport,
};
pub use migrate::migrate_model;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MapError {
    #[error("no image for {0}")]
    MissingImage(String),
    #[error("cannot compose: codomain {left} is not domain {right}")]
    TheoryMismatch { left: String, right: String },
    #[error("{0} is not a simple map")]
    NotSimple(String),
    #[error("cannot migrate along {constructor}: variable {var} of its image is not an explicit argument")]
    ErasureViolation { constructor: String, var: String },
    #[error("migration failed: {0}")]
    Migration(String),
    #[error(transparent)]
    Gat(#[from] GatError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TheoryMapKind {
    Id,
    /// Every domain segment is a codomain segment, up to the tag map
    /// (identity when the segments are shared).
    Incl { segments: Vec<(ScopeTag, ScopeTag)> },
    Simple {
        typemap: IndexMap<Ident, Ident>,
        termmap: IndexMap<Ident, Ident>,
    },
    General {
        typemap: IndexMap<Ident, TypeInCtx>,
        termmap: IndexMap<Ident, TermInCtx>,
    },
}

impl TheoryMapKind {
    pub fn label(&self) -> &'static str {
        match self {
            TheoryMapKind::Id => "identity",
            TheoryMapKind::Incl { .. } => "inclusion",
            TheoryMapKind::Simple { .. } => "simple",
            TheoryMapKind::General { .. } => "general",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TheoryMap {
    name: String,
    dom: Gat,
    codom: Gat,
    kind: TheoryMapKind,
    spans: HashMap<Ident, Span>,
}

impl TheoryMap {
    pub fn identity(gat: &Gat) -> TheoryMap {
        TheoryMap::from_kind(format!("id({})", gat.name()), gat.clone(), gat.clone(), TheoryMapKind::Id)
    }

    /// The inclusion of `dom` into `codom` when `codom` contains all of
    /// `dom`'s segments.
    pub fn shared_inclusion(dom: &Gat, codom: &Gat) -> Option<TheoryMap> {
        let segs: Vec<_> = dom.segment_tags();
        if !segs.iter().all(|t| codom.has_segment(*t)) {
            return None;
        }
        if dom.same_theory(codom) {
            return Some(TheoryMap::identity(dom));
        }
        Some(TheoryMap::from_kind(
            format!("{}↪{}", dom.name(), codom.name()),
            dom.clone(),
            codom.clone(),
            TheoryMapKind::Incl {
                segments: segs.into_iter().map(|t| (t, t)).collect(),
            },
        ))
    }

    pub fn from_kind(name: impl Into<String>, dom: Gat, codom: Gat, kind: TheoryMapKind) -> TheoryMap {
        TheoryMap {
            name: name.into(),
            dom,
            codom,
            kind,
            spans: HashMap::new(),
        }
    }

    pub fn simple(
        name: impl Into<String>,
        dom: Gat,
        codom: Gat,
        typemap: IndexMap<Ident, Ident>,
        termmap: IndexMap<Ident, Ident>,
    ) -> TheoryMap {
        let typemap = typemap.into_iter().map(|(k, v)| (k, codom.canonical(&v))).collect();
        let termmap = termmap.into_iter().map(|(k, v)| (k, codom.canonical(&v))).collect();
        TheoryMap::from_kind(name, dom, codom, TheoryMapKind::Simple { typemap, termmap })
    }

    /// A map given by images for every domain constructor, stored as the
    /// narrowest kind that represents it.
    pub fn from_images(
        name: impl Into<String>,
        dom: Gat,
        codom: Gat,
        typemap: IndexMap<Ident, TypeInCtx>,
        termmap: IndexMap<Ident, TermInCtx>,
    ) -> Result<TheoryMap, MapError> {
        for c in dom.typecons() {
            if !typemap.contains_key(&c) {
                return Err(MapError::MissingImage(dom.canonical(&c).name.to_string()));
            }
        }
        for c in dom.termcons() {
            if !termmap.contains_key(&c) {
                return Err(MapError::MissingImage(dom.canonical(&c).name.to_string()));
            }
        }
        let kind = classify(&dom, &codom, &typemap, &termmap);
        Ok(TheoryMap::from_kind(name, dom, codom, kind))
    }

    pub fn with_spans(mut self, spans: HashMap<Ident, Span>) -> TheoryMap {
        self.spans = spans;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> TheoryMap {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dom(&self) -> &Gat {
        &self.dom
    }

    pub fn codom(&self) -> &Gat {
        &self.codom
    }

    pub fn kind(&self) -> &TheoryMapKind {
        &self.kind
    }

    pub fn span_of(&self, c: &Ident) -> Option<Span> {
        self.spans.get(c).copied()
    }

    /// The codomain constructor a domain constructor is renamed to, for the
    /// kinds that rename.
    pub fn ident_image(&self, c: &Ident) -> Option<Ident> {
        match &self.kind {
            TheoryMapKind::Id => Some(self.codom.canonical(c)),
            TheoryMapKind::Incl { segments } => {
                let tag = segments.iter().find(|(a, _)| *a == c.tag)?.1;
                Some(self.codom.canonical(&c.with_tag(tag)))
            }
            TheoryMapKind::Simple { typemap, termmap } => {
                typemap.get(c).or_else(|| termmap.get(c)).cloned()
            }
            TheoryMapKind::General { .. } => None,
        }
    }

    /// The image of a type constructor, in the pushed-forward context of its
    /// parameters.
    pub fn type_image(&self, c: &Ident) -> Result<TypeInCtx, MapError> {
        if let TheoryMapKind::General { typemap, .. } = &self.kind {
            return typemap
                .get(c)
                .cloned()
                .ok_or_else(|| MapError::MissingImage(c.name.to_string()));
        }
        let generic = self.dom.generic_type(c)?;
        self.pushforward_type(&generic)
    }

    /// The image of a term constructor, in the pushed-forward context of its
    /// local context.
    pub fn term_image(&self, c: &Ident) -> Result<TermInCtx, MapError> {
        if let TheoryMapKind::General { termmap, .. } = &self.kind {
            return termmap
                .get(c)
                .cloned()
                .ok_or_else(|| MapError::MissingImage(c.name.to_string()));
        }
        let generic = self.dom.generic_term(c)?;
        self.pushforward_term(&generic)
    }

    /// The same map as a general map.
    pub fn promote(&self) -> Result<TheoryMap, MapError> {
        if matches!(self.kind, TheoryMapKind::General { .. }) {
            return Ok(self.clone());
        }
        let mut typemap = IndexMap::new();
        let mut termmap = IndexMap::new();
        for c in self.dom.typecons() {
            typemap.insert(c.clone(), self.type_image(&c)?);
        }
        for c in self.dom.termcons() {
            termmap.insert(c.clone(), self.term_image(&c)?);
        }
        Ok(TheoryMap {
            name: self.name.clone(),
            dom: self.dom.clone(),
            codom: self.codom.clone(),
            kind: TheoryMapKind::General { typemap, termmap },
            spans: self.spans.clone(),
        })
    }

    pub fn pushforward_ctx(&self, ctx: &TypeCtx) -> Result<TypeCtx, MapError> {
        Pusher::new(self).ctx(ctx)
    }

    pub fn pushforward_term(&self, t: &TermInCtx) -> Result<TermInCtx, MapError> {
        let p = Pusher::new(self);
        let ctx = p.ctx(&t.ctx)?;
        let term = p.term(&t.ctx, ctx.tag(), &t.term)?;
        Ok(TermInCtx::new(ctx, term))
    }

    pub fn pushforward_type(&self, t: &TypeInCtx) -> Result<TypeInCtx, MapError> {
        let p = Pusher::new(self);
        let ctx = p.ctx(&t.ctx)?;
        let ty = p.ty(&t.ctx, ctx.tag(), &t.ty)?;
        Ok(TypeInCtx::new(ctx, ty))
    }

    /// Pushes a term forward into an already pushed-forward context.
    pub fn push_term_into(
        &self,
        src_ctx: &TypeCtx,
        target_ctx: &TypeCtx,
        t: &AlgTerm,
    ) -> Result<AlgTerm, MapError> {
        Pusher::new(self).term(src_ctx, target_ctx.tag(), t)
    }

    pub fn push_type_into(
        &self,
        src_ctx: &TypeCtx,
        target_ctx: &TypeCtx,
        t: &AlgType,
    ) -> Result<AlgType, MapError> {
        Pusher::new(self).ty(src_ctx, target_ctx.tag(), t)
    }
}

impl fmt::Display for TheoryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty_map(self))
    }
}

/// Pushes syntax forward along a map, image lookups and all.
///
/// Also used while elaborating a map declaration, when only part of the
/// general data exists yet (`partial`).
pub(crate) struct Pusher<'a> {
    dom: &'a Gat,
    codom: &'a Gat,
    kind: &'a TheoryMapKind,
}

impl<'a> Pusher<'a> {
    pub(crate) fn new(m: &'a TheoryMap) -> Pusher<'a> {
        Pusher {
            dom: &m.dom,
            codom: &m.codom,
            kind: &m.kind,
        }
    }

    pub(crate) fn partial(dom: &'a Gat, codom: &'a Gat, kind: &'a TheoryMapKind) -> Pusher<'a> {
        Pusher { dom, codom, kind }
    }

    fn rename(&self, h: &Ident) -> Result<Ident, MapError> {
        match self.kind {
            TheoryMapKind::Id => Ok(h.clone()),
            TheoryMapKind::Incl { segments } => segments
                .iter()
                .find(|(a, _)| *a == h.tag)
                .map(|(_, b)| self.codom.canonical(&h.with_tag(*b)))
                .ok_or_else(|| MapError::MissingImage(h.name.to_string())),
            TheoryMapKind::Simple { typemap, termmap } => typemap
                .get(h)
                .or_else(|| termmap.get(h))
                .cloned()
                .ok_or_else(|| MapError::MissingImage(h.name.to_string())),
            TheoryMapKind::General { .. } => unreachable!("general maps substitute images"),
        }
    }

    /// A fresh context whose entries are the pushed-forward types.
    pub(crate) fn ctx(&self, ctx: &TypeCtx) -> Result<TypeCtx, MapError> {
        let mut out = TypeCtx::new();
        for i in 1..=ctx.len() {
            let ty = self.ty(ctx, out.tag(), ctx.ty(i))?;
            out.push(ctx.name(i), ty).map_err(GatError::from)?;
        }
        Ok(out)
    }

    fn var(src: &TypeCtx, target: ScopeTag, v: &Ident) -> Ident {
        if v.tag == src.tag() {
            Ident::new(target, v.index, v.name.clone())
        } else {
            v.clone()
        }
    }

    pub(crate) fn term(&self, src: &TypeCtx, target: ScopeTag, t: &AlgTerm) -> Result<AlgTerm, MapError> {
        match t {
            AlgTerm::Var(v) => Ok(AlgTerm::Var(Self::var(src, target, v))),
            AlgTerm::App(h, args) => {
                let pushed = args
                    .iter()
                    .map(|a| self.term(src, target, a))
                    .collect::<Result<Vec<_>, _>>()?;
                let TheoryMapKind::General { termmap, .. } = self.kind else {
                    return Ok(AlgTerm::App(self.rename(h)?, pushed));
                };
                let image = termmap
                    .get(h)
                    .ok_or_else(|| MapError::MissingImage(h.name.to_string()))?;
                let con = self
                    .dom
                    .termcon(h)
                    .ok_or_else(|| GatError::UnknownConstructor(h.name.to_string()))?;
                if con.explicit_args.len() != args.len() {
                    return Err(GatError::ArityMismatch {
                        name: h.name.to_string(),
                        expected: con.explicit_args.len(),
                        found: args.len(),
                    }
                    .into());
                }
                let itag = image.ctx.tag();
                let mut env: HashMap<usize, AlgTerm> = con
                    .explicit_args
                    .iter()
                    .zip(pushed)
                    .map(|(p, a)| (p.index, a))
                    .collect();
                // implicit arguments the image mentions are solved on the source side
                let needs_implicit = image
                    .term
                    .vars()
                    .iter()
                    .any(|v| v.tag == itag && !env.contains_key(&v.index));
                if needs_implicit {
                    let sigma = solve_implicits(self.dom, src, h, args, false)?;
                    for v in image.term.vars() {
                        if v.tag == itag && !env.contains_key(&v.index) {
                            let solved = self.term(src, target, &sigma[v.index - 1])?;
                            env.insert(v.index, solved);
                        }
                    }
                }
                Ok(image
                    .term
                    .substitute(&|v| if v.tag == itag { env.get(&v.index).cloned() } else { None }))
            }
        }
    }

    pub(crate) fn ty(&self, src: &TypeCtx, target: ScopeTag, t: &AlgType) -> Result<AlgType, MapError> {
        let pushed = t
            .args
            .iter()
            .map(|a| self.term(src, target, a))
            .collect::<Result<Vec<_>, _>>()?;
        let TheoryMapKind::General { typemap, .. } = self.kind else {
            return Ok(AlgType::new(self.rename(&t.head)?, pushed));
        };
        let image = typemap
            .get(&t.head)
            .ok_or_else(|| MapError::MissingImage(t.head.name.to_string()))?;
        if image.ctx.len() != pushed.len() {
            return Err(GatError::ArityMismatch {
                name: t.head.name.to_string(),
                expected: image.ctx.len(),
                found: pushed.len(),
            }
            .into());
        }
        let itag = image.ctx.tag();
        Ok(image
            .ty
            .substitute(&|v| (v.tag == itag).then(|| pushed[v.index - 1].clone())))
    }
}

/// The narrowest kind representing the given images.
fn classify(
    dom: &Gat,
    codom: &Gat,
    typemap: &IndexMap<Ident, TypeInCtx>,
    termmap: &IndexMap<Ident, TermInCtx>,
) -> TheoryMapKind {
    let mut simple_types = IndexMap::new();
    let mut simple_terms = IndexMap::new();
    let mut identity = true;
    let mut simple = true;
    for (c, img) in typemap {
        let positions: Vec<usize> = (1..=img.ctx.len()).collect();
        match renaming_head(&img.ty.head, &img.ty.args, &img.ctx, &positions) {
            Some(h) => {
                identity &= h == *c;
                simple_types.insert(c.clone(), codom.canonical(&h));
            }
            None => simple = false,
        }
    }
    for (c, img) in termmap {
        let positions = match dom.lookup(c) {
            Some(Judgment::TermCon(con)) => con.explicit_positions(),
            _ => {
                simple = false;
                continue;
            }
        };
        match &img.term {
            AlgTerm::App(h, args) => match renaming_head(h, args, &img.ctx, &positions) {
                Some(h) => {
                    identity &= h == *c;
                    simple_terms.insert(c.clone(), codom.canonical(&h));
                }
                None => simple = false,
            },
            AlgTerm::Var(_) => simple = false,
        }
    }
    if simple && identity {
        if dom.same_theory(codom) {
            return TheoryMapKind::Id;
        }
        let tags = dom.segment_tags();
        if tags.iter().all(|t| codom.has_segment(*t)) {
            return TheoryMapKind::Incl {
                segments: tags.into_iter().map(|t| (t, t)).collect(),
            };
        }
    }
    if simple {
        TheoryMapKind::Simple {
            typemap: simple_types,
            termmap: simple_terms,
        }
    } else {
        TheoryMapKind::General {
            typemap: typemap.clone(),
            termmap: termmap.clone(),
        }
    }
}

/// `h` when `args` are exactly the context variables at `positions`.
fn renaming_head(h: &Ident, args: &[AlgTerm], ctx: &TypeCtx, positions: &[usize]) -> Option<Ident> {
    (args.len() == positions.len()
        && args
            .iter()
            .zip(positions)
            .all(|(a, p)| a.as_var() == Some(&ctx.var(*p))))
    .then(|| h.clone())
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose_maps(f: &TheoryMap, g: &TheoryMap) -> Result<TheoryMap, MapError> {
    if !f.codom.same_theory(&g.dom) {
        return Err(MapError::TheoryMismatch {
            left: f.codom.name().to_string(),
            right: g.dom.name().to_string(),
        });
    }
    let name = format!("{}∘{}", g.name, f.name);
    use TheoryMapKind::*;
    match (&f.kind, &g.kind) {
        (Id, _) => return Ok(g.clone().with_dom(f.dom.clone()).with_name(name)),
        (_, Id) => return Ok(f.clone().with_codom(g.codom.clone()).with_name(name)),
        (Incl { segments: a }, Incl { segments: b }) => {
            let tm: TagMap = b.iter().copied().collect();
            let segments = a.iter().map(|(x, y)| (*x, tm.get(*y))).collect();
            return Ok(TheoryMap::from_kind(name, f.dom.clone(), g.codom.clone(), Incl { segments }));
        }
        _ => {}
    }
    let renames = |m: &TheoryMap| !matches!(m.kind, General { .. });
    if renames(f) && renames(g) {
        let mut typemap = IndexMap::new();
        let mut termmap = IndexMap::new();
        for c in f.dom.typecons() {
            let mid = f.ident_image(&c).ok_or_else(|| MapError::MissingImage(c.name.to_string()))?;
            let end = g.ident_image(&mid).ok_or_else(|| MapError::MissingImage(mid.name.to_string()))?;
            typemap.insert(c, end);
        }
        for c in f.dom.termcons() {
            let mid = f.ident_image(&c).ok_or_else(|| MapError::MissingImage(c.name.to_string()))?;
            let end = g.ident_image(&mid).ok_or_else(|| MapError::MissingImage(mid.name.to_string()))?;
            termmap.insert(c, end);
        }
        return Ok(TheoryMap::simple(name, f.dom.clone(), g.codom.clone(), typemap, termmap));
    }
    // Kleisli-style: push each of f's images along g
    let mut typemap = IndexMap::new();
    let mut termmap = IndexMap::new();
    for c in f.dom.typecons() {
        typemap.insert(c.clone(), g.pushforward_type(&f.type_image(&c)?)?);
    }
    for c in f.dom.termcons() {
        termmap.insert(c.clone(), g.pushforward_term(&f.term_image(&c)?)?);
    }
    Ok(TheoryMap::from_kind(
        name,
        f.dom.clone(),
        g.codom.clone(),
        General { typemap, termmap },
    ))
}

impl TheoryMap {
    fn with_dom(mut self, dom: Gat) -> TheoryMap {
        self.dom = dom;
        self
    }

    fn with_codom(mut self, codom: Gat) -> TheoryMap {
        if matches!(self.kind, TheoryMapKind::Id) && !self.dom.same_theory(&codom) {
            // an identity followed by a different theory is an inclusion
            self.kind = TheoryMapKind::Incl {
                segments: self.dom.segment_tags().into_iter().map(|t| (t, t)).collect(),
            };
        }
        self.codom = codom;
        self
    }
}
