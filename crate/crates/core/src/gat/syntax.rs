use std::collections::HashSet;
use std::fmt;

use crate::scopes::{Binding, Ident, Name, Retag, Scope, ScopeError, ScopeTag, TagMap};

/// A first-order term: a variable, or a term constructor applied to its
/// explicit arguments.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AlgTerm {
    Var(Ident),
    App(Ident, Vec<AlgTerm>),
}

impl AlgTerm {
    pub fn app(head: Ident, args: Vec<AlgTerm>) -> AlgTerm {
        AlgTerm::App(head, args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, AlgTerm::Var(_))
    }

    pub fn as_var(&self) -> Option<&Ident> {
        match self {
            AlgTerm::Var(v) => Some(v),
            AlgTerm::App(..) => None,
        }
    }

    /// Head ident: the variable itself, or the applied constructor.
    pub fn head(&self) -> &Ident {
        match self {
            AlgTerm::Var(v) | AlgTerm::App(v, _) => v,
        }
    }

    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Ident>) {
        match self {
            AlgTerm::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            AlgTerm::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn mentions_tag(&self, tag: ScopeTag) -> bool {
        match self {
            AlgTerm::Var(v) => v.tag == tag,
            AlgTerm::App(_, args) => args.iter().any(|a| a.mentions_tag(tag)),
        }
    }

    /// Simultaneous substitution of variables. Variables for which `f` returns
    /// `None` are kept.
    pub fn substitute(&self, f: &dyn Fn(&Ident) -> Option<AlgTerm>) -> AlgTerm {
        match self {
            AlgTerm::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            AlgTerm::App(h, args) => {
                AlgTerm::App(h.clone(), args.iter().map(|a| a.substitute(f)).collect())
            }
        }
    }

    /// Rewrites every ident, variables and heads alike.
    pub fn map_idents(&self, f: &mut dyn FnMut(&Ident) -> Ident) -> AlgTerm {
        match self {
            AlgTerm::Var(v) => AlgTerm::Var(f(v)),
            AlgTerm::App(h, args) => {
                let h = f(h);
                AlgTerm::App(h, args.iter().map(|a| a.map_idents(f)).collect())
            }
        }
    }

    /// Rewrites constructor heads only.
    pub fn map_heads(&self, f: &mut dyn FnMut(&Ident) -> Ident) -> AlgTerm {
        match self {
            AlgTerm::Var(_) => self.clone(),
            AlgTerm::App(h, args) => {
                let h = f(h);
                AlgTerm::App(h, args.iter().map(|a| a.map_heads(f)).collect())
            }
        }
    }

    pub fn visit_heads(&self, f: &mut dyn FnMut(&Ident)) {
        if let AlgTerm::App(h, args) = self {
            f(h);
            args.iter().for_each(|a| a.visit_heads(f));
        }
    }

    pub fn size(&self) -> usize {
        match self {
            AlgTerm::Var(_) => 1,
            AlgTerm::App(_, args) => 1 + args.iter().map(AlgTerm::size).sum::<usize>(),
        }
    }
}

impl Retag for AlgTerm {
    fn retag(&self, map: &TagMap) -> Self {
        self.map_idents(&mut |i| i.retag(map))
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        match self {
            AlgTerm::Var(v) => out.push(v.tag),
            AlgTerm::App(h, args) => {
                out.push(h.tag);
                args.iter().for_each(|a| a.collect_tags(out));
            }
        }
    }
}

impl fmt::Display for AlgTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgTerm::Var(v) => write!(f, "{v}"),
            AlgTerm::App(h, args) => {
                write!(f, "{h}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A type constructor applied to term arguments, e.g. `Hom(a, b)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgType {
    pub head: Ident,
    pub args: Vec<AlgTerm>,
}

impl AlgType {
    pub fn new(head: Ident, args: Vec<AlgTerm>) -> AlgType {
        AlgType { head, args }
    }

    pub fn constant(head: Ident) -> AlgType {
        AlgType {
            head,
            args: Vec::new(),
        }
    }

    pub fn sort(&self) -> AlgSort {
        AlgSort(self.head.clone())
    }

    pub fn substitute(&self, f: &dyn Fn(&Ident) -> Option<AlgTerm>) -> AlgType {
        AlgType {
            head: self.head.clone(),
            args: self.args.iter().map(|a| a.substitute(f)).collect(),
        }
    }

    pub fn map_idents(&self, f: &mut dyn FnMut(&Ident) -> Ident) -> AlgType {
        let head = f(&self.head);
        AlgType {
            head,
            args: self.args.iter().map(|a| a.map_idents(f)).collect(),
        }
    }

    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        for a in &self.args {
            for v in a.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

impl Retag for AlgType {
    fn retag(&self, map: &TagMap) -> Self {
        self.map_idents(&mut |i| i.retag(map))
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        out.push(self.head.tag);
        self.args.iter().for_each(|a| a.collect_tags(out));
    }
}

impl fmt::Display for AlgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// The head type constructor of a type, without its arguments.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgSort(pub Ident);

impl fmt::Display for AlgSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered context of typed variables. Each type may mention only the
/// variables before it.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct TypeCtx {
    scope: Scope<AlgType>,
}

impl TypeCtx {
    pub fn new() -> TypeCtx {
        TypeCtx {
            scope: Scope::new(),
        }
    }

    pub fn with_tag(tag: ScopeTag) -> TypeCtx {
        TypeCtx {
            scope: Scope::with_tag(tag),
        }
    }

    pub fn from_scope(scope: Scope<AlgType>) -> TypeCtx {
        TypeCtx { scope }
    }

    pub fn scope(&self) -> &Scope<AlgType> {
        &self.scope
    }

    pub fn tag(&self) -> ScopeTag {
        self.scope.tag()
    }

    pub fn len(&self) -> usize {
        self.scope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scope.is_empty()
    }

    /// Adds a variable; names must be unique within one context.
    pub fn push(&mut self, name: impl Into<Name>, ty: AlgType) -> Result<Ident, ScopeError> {
        self.scope.push(Binding::new(name, ty))
    }

    /// The variable at 1-based `index`.
    pub fn var(&self, index: usize) -> Ident {
        self.scope.ident(index)
    }

    pub fn vars(&self) -> impl Iterator<Item = Ident> + '_ {
        self.scope.idents()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.scope.bindings()[index - 1].name
    }

    pub fn ty(&self, index: usize) -> &AlgType {
        &self.scope.bindings()[index - 1].payload
    }

    /// The type of `v`, when `v` is one of this context's variables.
    pub fn type_of(&self, v: &Ident) -> Option<&AlgType> {
        if v.tag != self.tag() {
            return None;
        }
        self.scope.binding(v.index).map(|b| &b.payload)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Ident, &AlgType)> + '_ {
        self.scope
            .bindings()
            .iter()
            .enumerate()
            .map(move |(i, b)| (Ident::new(self.tag(), i + 1, b.name.clone()), &b.payload))
    }

    pub fn lookup_name(&self, name: &str) -> Option<Ident> {
        self.scope.find(name, None).pop()
    }

    pub fn has_var(&self, v: &Ident) -> bool {
        v.tag == self.tag() && v.index >= 1 && v.index <= self.len()
    }

    /// A copy under a fresh tag, with self-references moved along.
    pub fn fresh_copy(&self) -> TypeCtx {
        let map: TagMap = [(self.tag(), crate::scopes::fresh_tag())].into_iter().collect();
        self.retag(&map)
    }

    pub fn map_idents(&self, f: &mut dyn FnMut(&Ident) -> Ident) -> TypeCtx {
        TypeCtx {
            scope: self.scope.map_payloads(|b| b.payload.map_idents(f)),
        }
    }

    pub fn set_name(&mut self, index: usize, name: impl Into<Name>) {
        self.scope.rename(index, name);
    }

    pub fn names(&self) -> HashSet<Name> {
        self.scope.bindings().iter().map(|b| b.name.clone()).collect()
    }
}

impl Retag for TypeCtx {
    fn retag(&self, map: &TagMap) -> Self {
        TypeCtx {
            scope: self.scope.retag(map),
        }
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        self.scope.collect_tags(out);
    }
}

impl fmt::Display for TypeCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (v, ty)) in self.entries().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}::{ty}")?;
        }
        f.write_str("]")
    }
}

/// A term together with the context its variables live in.
#[derive(Clone, PartialEq, Debug)]
pub struct TermInCtx {
    pub ctx: TypeCtx,
    pub term: AlgTerm,
}

impl TermInCtx {
    pub fn new(ctx: TypeCtx, term: AlgTerm) -> TermInCtx {
        TermInCtx { ctx, term }
    }
}

impl Retag for TermInCtx {
    fn retag(&self, map: &TagMap) -> Self {
        TermInCtx {
            ctx: self.ctx.retag(map),
            term: self.term.retag(map),
        }
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        self.ctx.collect_tags(out);
        self.term.collect_tags(out);
    }
}

impl fmt::Display for TermInCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊣ {}", self.term, self.ctx)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct TypeInCtx {
    pub ctx: TypeCtx,
    pub ty: AlgType,
}

impl TypeInCtx {
    pub fn new(ctx: TypeCtx, ty: AlgType) -> TypeInCtx {
        TypeInCtx { ctx, ty }
    }
}

impl Retag for TypeInCtx {
    fn retag(&self, map: &TagMap) -> Self {
        TypeInCtx {
            ctx: self.ctx.retag(map),
            ty: self.ty.retag(map),
        }
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        self.ctx.collect_tags(out);
        self.ty.collect_tags(out);
    }
}

impl fmt::Display for TypeInCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊣ {}", self.ty, self.ctx)
    }
}
