use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use super::infer::{check_context, check_type, infer_sort, infer_type, undetermined_implicit};
use super::normalize::{equal_upto_norm, NormalizationPolicy};
use super::syntax::{AlgSort, AlgTerm, AlgType, TermInCtx, TypeCtx, TypeInCtx};
use super::GatError;
use crate::scopes::{Binding, Ident, Name, Retag, Scope, ScopeError, ScopeList, ScopeTag, TagMap};

#[derive(Clone, PartialEq, Debug)]
pub struct TypeConstructor {
    pub args: TypeCtx,
}

#[derive(Clone, PartialEq, Debug)]
pub struct TermConstructor {
    pub localcontext: TypeCtx,
    /// Variables of `localcontext` passed explicitly, in argument order.
    pub explicit_args: Vec<Ident>,
    pub result: AlgType,
}

impl TermConstructor {
    /// 1-based positions of the explicit arguments.
    pub fn explicit_positions(&self) -> Vec<usize> {
        self.explicit_args.iter().map(|v| v.index).collect()
    }

    pub fn is_explicit(&self, index: usize) -> bool {
        self.explicit_args.iter().any(|v| v.index == index)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Axiom {
    pub localcontext: TypeCtx,
    pub sort: AlgSort,
    pub lhs: AlgTerm,
    pub rhs: AlgTerm,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Judgment {
    TypeCon(TypeConstructor),
    TermCon(TermConstructor),
    Axiom(Axiom),
}

impl Judgment {
    pub fn kind(&self) -> &'static str {
        match self {
            Judgment::TypeCon(_) => "type constructor",
            Judgment::TermCon(_) => "term constructor",
            Judgment::Axiom(_) => "axiom",
        }
    }

    pub fn context(&self) -> &TypeCtx {
        match self {
            Judgment::TypeCon(t) => &t.args,
            Judgment::TermCon(t) => &t.localcontext,
            Judgment::Axiom(a) => &a.localcontext,
        }
    }

    pub fn map_idents(&self, f: &mut dyn FnMut(&Ident) -> Ident) -> Judgment {
        match self {
            Judgment::TypeCon(t) => Judgment::TypeCon(TypeConstructor {
                args: t.args.map_idents(f),
            }),
            Judgment::TermCon(t) => {
                let localcontext = t.localcontext.map_idents(f);
                let explicit_args = t.explicit_args.iter().map(|v| f(v)).collect();
                let result = t.result.map_idents(f);
                Judgment::TermCon(TermConstructor {
                    localcontext,
                    explicit_args,
                    result,
                })
            }
            Judgment::Axiom(a) => {
                let localcontext = a.localcontext.map_idents(f);
                let sort = AlgSort(f(&a.sort.0));
                let lhs = a.lhs.map_idents(f);
                let rhs = a.rhs.map_idents(f);
                Judgment::Axiom(Axiom {
                    localcontext,
                    sort,
                    lhs,
                    rhs,
                })
            }
        }
    }
}

impl Retag for Judgment {
    fn retag(&self, map: &TagMap) -> Self {
        match self {
            Judgment::TypeCon(t) => Judgment::TypeCon(TypeConstructor {
                args: t.args.retag(map),
            }),
            Judgment::TermCon(t) => Judgment::TermCon(TermConstructor {
                localcontext: t.localcontext.retag(map),
                explicit_args: t.explicit_args.iter().map(|v| v.retag(map)).collect(),
                result: t.result.retag(map),
            }),
            Judgment::Axiom(a) => Judgment::Axiom(Axiom {
                localcontext: a.localcontext.retag(map),
                sort: AlgSort(a.sort.0.retag(map)),
                lhs: a.lhs.retag(map),
                rhs: a.rhs.retag(map),
            }),
        }
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        match self {
            Judgment::TypeCon(t) => t.args.collect_tags(out),
            Judgment::TermCon(t) => {
                t.localcontext.collect_tags(out);
                t.result.collect_tags(out);
            }
            Judgment::Axiom(a) => {
                a.localcontext.collect_tags(out);
                out.push(a.sort.0.tag);
                a.lhs.collect_tags(out);
                a.rhs.collect_tags(out);
            }
        }
    }
}

/// A generalized algebraic theory: segments of judgments, outermost first.
///
/// Extending a theory appends a segment and shares the parent's segments, so
/// idents of the parent remain valid in the child.
#[derive(Clone, Debug)]
pub struct Gat {
    name: String,
    segments: ScopeList<Judgment>,
    aliases: IndexMap<String, String>,
    policy: NormalizationPolicy,
}

impl Gat {
    pub fn empty(name: impl Into<String>) -> Gat {
        Gat {
            name: name.into(),
            segments: ScopeList::new(),
            aliases: IndexMap::new(),
            policy: NormalizationPolicy::new(),
        }
    }

    pub(crate) fn from_parts(
        name: String,
        segments: ScopeList<Judgment>,
        aliases: IndexMap<String, String>,
        policy: NormalizationPolicy,
    ) -> Gat {
        Gat {
            name,
            segments,
            aliases,
            policy,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Gat {
        self.name = name.into();
        self
    }

    pub fn segments(&self) -> &ScopeList<Judgment> {
        &self.segments
    }

    pub fn aliases(&self) -> &IndexMap<String, String> {
        &self.aliases
    }

    pub fn policy(&self) -> &NormalizationPolicy {
        &self.policy
    }

    pub fn segment_tags(&self) -> Vec<ScopeTag> {
        self.segments.scopes().iter().map(|s| s.tag()).collect()
    }

    /// Same theory object: identical segment tags in the same order.
    pub fn same_theory(&self, other: &Gat) -> bool {
        self.segment_tags() == other.segment_tags()
    }

    pub fn has_segment(&self, tag: ScopeTag) -> bool {
        self.segments.has_tag(tag)
    }

    pub fn binding(&self, id: &Ident) -> Result<&Binding<Judgment>, ScopeError> {
        self.segments.lookup(id)
    }

    pub fn lookup(&self, id: &Ident) -> Option<&Judgment> {
        self.segments.lookup(id).ok().map(|b| &b.payload)
    }

    /// The ident with its current display name.
    pub fn canonical(&self, id: &Ident) -> Ident {
        match self.segments.lookup(id) {
            Ok(b) => id.with_name(b.name.clone()),
            Err(_) => id.clone(),
        }
    }

    pub fn typecon(&self, id: &Ident) -> Option<&TypeConstructor> {
        match self.lookup(id) {
            Some(Judgment::TypeCon(t)) => Some(t),
            _ => None,
        }
    }

    pub fn termcon(&self, id: &Ident) -> Option<&TermConstructor> {
        match self.lookup(id) {
            Some(Judgment::TermCon(t)) => Some(t),
            _ => None,
        }
    }

    pub fn axiom(&self, id: &Ident) -> Option<&Axiom> {
        match self.lookup(id) {
            Some(Judgment::Axiom(a)) => Some(a),
            _ => None,
        }
    }

    pub fn resolve(&self, name: &str, arity: Option<usize>) -> Result<Ident, ScopeError> {
        self.segments.resolve(name, arity)
    }

    /// Resolves an operator symbol or name, following aliases.
    pub fn resolve_symbol(&self, sym: &str, arity: Option<usize>) -> Result<Ident, ScopeError> {
        match self.aliases.get(sym) {
            Some(target) => self.segments.resolve(target, arity),
            None => self.segments.resolve(sym, arity),
        }
    }

    /// All constructors bound to `sym` (through aliases too), innermost first.
    pub fn candidates(&self, sym: &str) -> Vec<Ident> {
        let name = self.aliases.get(sym).map(String::as_str).unwrap_or(sym);
        self.segments
            .candidates(name)
            .into_iter()
            .filter(|id| !matches!(self.lookup(id), Some(Judgment::Axiom(_))))
            .collect()
    }

    pub fn judgments(&self) -> impl Iterator<Item = (Ident, &Judgment)> + '_ {
        self.segments.iter().map(|(id, b)| (id, &b.payload))
    }

    pub fn typecons(&self) -> Vec<Ident> {
        self.judgments()
            .filter(|(_, j)| matches!(j, Judgment::TypeCon(_)))
            .map(|(id, _)| id)
            .collect()
    }

    pub fn termcons(&self) -> Vec<Ident> {
        self.judgments()
            .filter(|(_, j)| matches!(j, Judgment::TermCon(_)))
            .map(|(id, _)| id)
            .collect()
    }

    pub fn axioms(&self) -> Vec<Ident> {
        self.judgments()
            .filter(|(_, j)| matches!(j, Judgment::Axiom(_)))
            .map(|(id, _)| id)
            .collect()
    }

    pub fn is_constructor(&self, id: &Ident) -> bool {
        matches!(
            self.lookup(id),
            Some(Judgment::TypeCon(_)) | Some(Judgment::TermCon(_))
        )
    }

    /// The `default` type, when the theory has a parameterless one.
    pub fn default_type(&self) -> Option<Ident> {
        let id = self.resolve("default", Some(0)).ok()?;
        match self.typecon(&id) {
            Some(t) if t.args.is_empty() => Some(id),
            _ => None,
        }
    }

    /// The infix symbol used to print `id`, if any: its own name when that is
    /// an operator symbol, or an alias for it.
    pub fn operator_symbol(&self, id: &Ident) -> Option<String> {
        let name = self.binding(id).ok()?.name.clone();
        if crate::surface::is_operator_symbol(&name) {
            return Some(name.to_string());
        }
        self.aliases
            .iter()
            .find(|(_, target)| target.as_str() == &*name)
            .map(|(sym, _)| sym.clone())
    }

    /// `tc(x1, ..., xn) ⊣ localcontext` for a term constructor.
    pub fn generic_term(&self, tc: &Ident) -> Result<TermInCtx, GatError> {
        let con = self
            .termcon(tc)
            .ok_or_else(|| GatError::UnknownConstructor(tc.name.to_string()))?;
        let args = con
            .explicit_args
            .iter()
            .map(|v| AlgTerm::Var(con.localcontext.var(v.index)))
            .collect();
        Ok(TermInCtx::new(
            con.localcontext.clone(),
            AlgTerm::App(self.canonical(tc), args),
        ))
    }

    /// `T(x1, ..., xn) ⊣ args` for a type constructor.
    pub fn generic_type(&self, tc: &Ident) -> Result<TypeInCtx, GatError> {
        let con = self
            .typecon(tc)
            .ok_or_else(|| GatError::UnknownConstructor(tc.name.to_string()))?;
        let args = con.args.vars().map(AlgTerm::Var).collect();
        Ok(TypeInCtx::new(
            con.args.clone(),
            AlgType::new(self.canonical(tc), args),
        ))
    }

    /// Re-checks every judgment: contexts, result types, and axiom sorts.
    pub fn self_check(&self) -> Result<(), GatError> {
        for (id, j) in self.judgments() {
            let wrap = |e: GatError| GatError::InJudgment {
                judgment: display_name(&id),
                source: Box::new(e),
            };
            check_context(self, j.context()).map_err(wrap)?;
            match j {
                Judgment::TypeCon(_) => {}
                Judgment::TermCon(t) => {
                    check_type(self, &t.localcontext, &t.result).map_err(wrap)?
                }
                Judgment::Axiom(a) => {
                    let l = infer_sort(self, &a.localcontext, &a.lhs).map_err(wrap)?;
                    let r = infer_sort(self, &a.localcontext, &a.rhs).map_err(wrap)?;
                    if l != a.sort || r != a.sort {
                        return Err(wrap(GatError::SortMismatch {
                            expected: a.sort.to_string(),
                            found: if l != a.sort { l.to_string() } else { r.to_string() },
                        }));
                    }
                }
            }
        }
        for (sym, target) in &self.aliases {
            if self.segments.candidates(target).is_empty() {
                return Err(GatError::UnknownAliasTarget {
                    symbol: sym.clone(),
                    target: target.clone(),
                });
            }
        }
        Ok(())
    }

    /// Copies the theory under fresh tags (segments and every local context),
    /// renaming bindings for which `rename` returns a new name. Returns the
    /// copy and the tag map used.
    pub fn fresh_copy(&self, rename: &dyn Fn(&str) -> Option<String>) -> (Gat, TagMap) {
        let mut tags = Vec::new();
        for s in self.segments.scopes() {
            s.collect_tags(&mut tags);
        }
        self.policy.collect_tags(&mut tags);
        let mut map = TagMap::new();
        for t in tags {
            if !map.contains(t) {
                map.insert(t, crate::scopes::fresh_tag());
            }
        }
        let mut names: HashMap<Ident, Name> = HashMap::new();
        let mut scopes = Vec::new();
        for s in self.segments.scopes() {
            let mut scope = s.retag(&map);
            let tag = scope.tag();
            for i in 1..=scope.len() {
                let b = scope.binding_mut(i).expect("index in range");
                if !b.is_anonymous() {
                    if let Some(n) = rename(&b.name) {
                        b.name = n.into();
                    }
                }
                names.insert(Ident::new(tag, i, ""), b.name.clone());
            }
            scopes.push(scope);
        }
        let mut fix = |id: &Ident| match names.get(id) {
            Some(n) => id.with_name(n.clone()),
            None => id.clone(),
        };
        let mut segments = ScopeList::new();
        for scope in scopes {
            let fixed = scope.map_payloads(|b| b.payload.map_idents(&mut fix));
            segments.push(Arc::new(fixed)).expect("fresh tags are distinct");
        }
        let aliases = self
            .aliases
            .iter()
            .map(|(sym, target)| (sym.clone(), rename(target).unwrap_or_else(|| target.clone())))
            .collect();
        let policy = self.policy.retag(&map).map_idents(&mut fix);
        (
            Gat {
                name: self.name.clone(),
                segments,
                aliases,
                policy,
            },
            map,
        )
    }
}

fn display_name(id: &Ident) -> String {
    if id.name.is_empty() {
        format!("axiom #{}", id.index)
    } else {
        id.name.to_string()
    }
}

impl PartialEq for Gat {
    /// Structural equality including tags; see `alpha_equal_gat` for equality
    /// up to renaming of scopes.
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.aliases == other.aliases
            && self.policy == other.policy
            && self.segments.len() == other.segments.len()
            && self
                .segments
                .scopes()
                .iter()
                .zip(other.segments.scopes())
                .all(|(a, b)| a == b)
    }
}

impl fmt::Display for Gat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty_gat(self))
    }
}

/// Incremental construction of a theory. Each added judgment is checked
/// against everything before it.
#[derive(Debug)]
pub struct GatBuilder {
    gat: Gat,
}

impl GatBuilder {
    pub fn new(name: impl Into<String>) -> GatBuilder {
        let mut gat = Gat::empty(name);
        gat.segments
            .push(Arc::new(Scope::new()))
            .expect("fresh tag");
        GatBuilder { gat }
    }

    /// Starts a new segment on top of `parent`, sharing its segments.
    pub fn extend(name: impl Into<String>, parent: &Gat) -> GatBuilder {
        let mut gat = parent.clone();
        gat.name = name.into();
        gat.segments
            .push(Arc::new(Scope::new()))
            .expect("fresh tag");
        GatBuilder { gat }
    }

    /// The theory built so far, current segment included.
    pub fn gat(&self) -> &Gat {
        &self.gat
    }

    pub fn current_tag(&self) -> ScopeTag {
        self.gat.segments.scopes().last().expect("builder has a segment").tag()
    }

    /// Closes the current segment and opens a new one.
    pub fn new_segment(&mut self) {
        let empty = self
            .gat
            .segments
            .scopes()
            .last()
            .map(|s| s.is_empty())
            .unwrap_or(false);
        if !empty {
            self.gat
                .segments
                .push(Arc::new(Scope::new()))
                .expect("fresh tag");
        }
    }

    fn push(&mut self, binding: Binding<Judgment>) -> Result<Ident, GatError> {
        let scope = self.gat.segments.last_mut().expect("builder has a segment");
        Ok(Arc::make_mut(scope).push(binding)?)
    }

    pub fn add_typecon(&mut self, name: &str, args: TypeCtx) -> Result<Ident, GatError> {
        check_context(&self.gat, &args)?;
        let arity = args.len();
        self.push(Binding::with_arity(
            name,
            arity,
            Judgment::TypeCon(TypeConstructor { args }),
        ))
    }

    pub fn add_termcon(
        &mut self,
        name: &str,
        localcontext: TypeCtx,
        explicit_args: Vec<Ident>,
        result: AlgType,
    ) -> Result<Ident, GatError> {
        check_context(&self.gat, &localcontext)?;
        let mut seen = Vec::new();
        for v in &explicit_args {
            if !localcontext.has_var(v) {
                return Err(GatError::UnboundVariable(v.name.to_string()));
            }
            if seen.contains(&v.index) {
                return Err(GatError::DuplicateName(v.name.to_string()));
            }
            seen.push(v.index);
        }
        check_type(&self.gat, &localcontext, &result)?;
        let positions: Vec<usize> = explicit_args.iter().map(|v| v.index).collect();
        if let Some(v) = undetermined_implicit(&localcontext, &positions) {
            return Err(GatError::ImplicitArgUnderdetermined {
                constructor: name.to_string(),
                var: v.name.to_string(),
            });
        }
        let explicit_args = explicit_args
            .iter()
            .map(|v| localcontext.var(v.index))
            .collect::<Vec<_>>();
        self.push(Binding::with_arity(
            name,
            explicit_args.len(),
            Judgment::TermCon(TermConstructor {
                localcontext,
                explicit_args,
                result,
            }),
        ))
    }

    pub fn add_axiom(
        &mut self,
        name: Option<&str>,
        localcontext: TypeCtx,
        lhs: AlgTerm,
        rhs: AlgTerm,
    ) -> Result<Ident, GatError> {
        check_context(&self.gat, &localcontext)?;
        let l = infer_sort(&self.gat, &localcontext, &lhs)?;
        let r = infer_sort(&self.gat, &localcontext, &rhs)?;
        if l != r {
            return Err(GatError::SortMismatch {
                expected: l.to_string(),
                found: r.to_string(),
            });
        }
        // both sides must be fully inferable, and agree on their type arguments
        let lt = infer_type(&self.gat, &localcontext, &lhs)?;
        let rt = infer_type(&self.gat, &localcontext, &rhs)?;
        let policy = self.gat.policy();
        let agree = lt.args.iter().zip(&rt.args).all(|(x, y)| {
            equal_upto_norm(&self.gat, &localcontext, x, y, policy)
        });
        if !agree {
            return Err(GatError::SortMismatch {
                expected: lt.to_string(),
                found: rt.to_string(),
            });
        }
        self.push(Binding::new(
            name.unwrap_or(""),
            Judgment::Axiom(Axiom {
                localcontext,
                sort: l,
                lhs,
                rhs,
            }),
        ))
    }

    /// Declares `symbol` as an alias for the constructor called `target`.
    /// The target may be declared later in the same theory.
    pub fn add_alias(&mut self, symbol: &str, target: &str) -> Result<(), GatError> {
        if let Some(existing) = self.gat.aliases.get(symbol) {
            if existing != target {
                return Err(GatError::DuplicateName(symbol.to_string()));
            }
        }
        self.gat.aliases.insert(symbol.to_string(), target.to_string());
        Ok(())
    }

    /// Declares a normalization rule for a binary operator.
    pub fn add_rule(
        &mut self,
        op: Ident,
        assoc: bool,
        unit: Option<Ident>,
    ) -> Result<(), GatError> {
        let con = self
            .gat
            .termcon(&op)
            .ok_or_else(|| GatError::UnknownConstructor(op.name.to_string()))?;
        if con.explicit_args.len() != 2 {
            return Err(GatError::ArityMismatch {
                name: op.name.to_string(),
                expected: 2,
                found: con.explicit_args.len(),
            });
        }
        if let Some(u) = &unit {
            if self.gat.termcon(u).is_none() {
                return Err(GatError::UnknownConstructor(u.name.to_string()));
            }
        }
        self.gat.policy.add(op, assoc, unit);
        Ok(())
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.gat.name = name.into();
    }

    pub fn build(mut self) -> Result<Gat, GatError> {
        if self.gat.segments.scopes().last().map(|s| s.is_empty()) == Some(true) {
            self.gat.segments.pop();
        }
        for (sym, target) in &self.gat.aliases {
            if self.gat.segments.candidates(target).is_empty() {
                return Err(GatError::UnknownAliasTarget {
                    symbol: sym.clone(),
                    target: target.clone(),
                });
            }
        }
        Ok(self.gat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn category() -> Gat {
        let mut b = GatBuilder::new("ThCategory");
        let ob = b.add_typecon("Ob", TypeCtx::new()).unwrap();
        let mut hom_args = TypeCtx::new();
        hom_args.push("dom", AlgType::constant(ob.clone())).unwrap();
        hom_args.push("codom", AlgType::constant(ob.clone())).unwrap();
        let hom = b.add_typecon("Hom", hom_args).unwrap();
        let hom_ty = |x: &Ident, y: &Ident| {
            AlgType::new(hom.clone(), vec![AlgTerm::Var(x.clone()), AlgTerm::Var(y.clone())])
        };

        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(ob.clone())).unwrap();
        let bb = ctx.push("b", AlgType::constant(ob.clone())).unwrap();
        let c = ctx.push("c", AlgType::constant(ob.clone())).unwrap();
        let f = ctx.push("f", hom_ty(&a, &bb)).unwrap();
        let g = ctx.push("g", hom_ty(&bb, &c)).unwrap();
        let compose = b
            .add_termcon("compose", ctx, vec![f, g], hom_ty(&a, &c))
            .unwrap();

        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(ob.clone())).unwrap();
        let id = b
            .add_termcon("id", ctx, vec![a.clone()], hom_ty(&a, &a))
            .unwrap();

        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(ob.clone())).unwrap();
        let bb = ctx.push("b", AlgType::constant(ob.clone())).unwrap();
        let f = ctx.push("f", hom_ty(&a, &bb)).unwrap();
        let lhs = AlgTerm::App(
            compose.clone(),
            vec![AlgTerm::App(id.clone(), vec![AlgTerm::Var(a)]), AlgTerm::Var(f.clone())],
        );
        b.add_axiom(Some("idl"), ctx, lhs, AlgTerm::Var(f)).unwrap();
        b.add_alias("→", "Hom").unwrap();
        b.add_alias("⋅", "compose").unwrap();
        b.build().unwrap()
    }

    #[test]
    fn builder_counts() {
        let c = category();
        assert_eq!(c.typecons().len(), 2);
        assert_eq!(c.termcons().len(), 2);
        assert_eq!(c.axioms().len(), 1);
        c.self_check().unwrap();
        assert!(c.resolve_symbol("⋅", Some(2)).is_ok());
    }

    #[test]
    fn axiom_sorts_must_agree() {
        let c = category();
        let mut b = GatBuilder::extend("Bad", &c);
        let ob = c.resolve("Ob", None).unwrap();
        let hom = c.resolve("Hom", None).unwrap();
        let mut ctx = TypeCtx::new();
        let a = ctx.push("a", AlgType::constant(ob)).unwrap();
        let f = ctx
            .push(
                "f",
                AlgType::new(hom, vec![AlgTerm::Var(a.clone()), AlgTerm::Var(a.clone())]),
            )
            .unwrap();
        let err = b
            .add_axiom(None, ctx, AlgTerm::Var(a), AlgTerm::Var(f))
            .unwrap_err();
        assert!(matches!(err, GatError::SortMismatch { .. }), "{err}");
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut b = GatBuilder::new("T");
        b.add_typecon("X", TypeCtx::new()).unwrap();
        assert!(matches!(
            b.add_typecon("X", TypeCtx::new()),
            Err(GatError::Scope(ScopeError::DuplicateName { .. }))
        ));
    }

    #[test]
    fn empty_extension_keeps_judgments() {
        let c = category();
        let same = GatBuilder::extend("ThCategory", &c).build().unwrap();
        assert_eq!(same, c);
    }

    #[test]
    fn fresh_copy_renames() {
        let c = category();
        let (copy, _) = c.fresh_copy(&|n| (n == "Ob").then(|| "Obj".to_string()));
        assert!(copy.resolve("Obj", None).is_ok());
        assert!(copy.resolve("Ob", None).is_err());
        assert!(copy.segment_tags().iter().all(|t| !c.has_segment(*t)));
        copy.self_check().unwrap();
        let hom = copy.resolve("Hom", None).unwrap();
        let args = &copy.typecon(&hom).unwrap().args;
        assert_eq!(&*args.ty(1).head.name, "Obj");
    }
}
