//! Hygienic identifiers.
//!
//! Every piece of syntax that introduces bindings (a theory segment, the
//! right-hand side of a turnstile, a generator list) is a [`Scope`] carrying a
//! unique [`ScopeTag`]. An [`Ident`] is a `(tag, index)` pair plus a display
//! name. Resolution by name happens once, at parse time, and picks the
//! innermost scope binding that name; after that, lookups go by tag, so moving
//! syntax between contexts can never capture a variable.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

/// Display names are shared freely between idents.
pub type Name = Arc<str>;

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

/// Identity of one scope. Comparison is by the raw token only.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScopeTag(u64);

impl ScopeTag {
    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for ScopeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Returns a tag distinct from every tag previously returned in this process.
pub fn fresh_tag() -> ScopeTag {
    let raw = NEXT_TAG.fetch_add(1, Ordering::Relaxed);
    if raw == u64::MAX {
        panic!("scope tag counter exhausted");
    }
    ScopeTag(raw)
}

/// A reference to the binding at `index` (1-based) of the scope tagged `tag`.
///
/// `name` is carried for display only; equality and hashing ignore it.
#[derive(Clone)]
pub struct Ident {
    pub tag: ScopeTag,
    pub index: usize,
    pub name: Name,
}

impl Ident {
    pub fn new(tag: ScopeTag, index: usize, name: impl Into<Name>) -> Self {
        Ident {
            tag,
            index,
            name: name.into(),
        }
    }

    pub fn with_tag(&self, tag: ScopeTag) -> Ident {
        Ident {
            tag,
            index: self.index,
            name: self.name.clone(),
        }
    }

    pub fn with_name(&self, name: impl Into<Name>) -> Ident {
        Ident {
            tag: self.tag,
            index: self.index,
            name: name.into(),
        }
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag && self.index == other.index
    }
}

impl Eq for Ident {}

impl std::hash::Hash for Ident {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.tag.hash(state);
        self.index.hash(state);
    }
}

impl PartialOrd for Ident {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ident {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.tag, self.index).cmp(&(other.tag, other.index))
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}.{}", self.name, self.tag, self.index)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScopeError {
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("ambiguous overload `{name}`: arities {arities:?} all match")]
    AmbiguousOverload { name: String, arities: Vec<usize> },
    #[error("no scope with tag {0:?} in this context")]
    TagNotFound(ScopeTag),
    #[error("index {index} out of range for scope {tag:?} of length {len}")]
    IndexOutOfRange {
        tag: ScopeTag,
        index: usize,
        len: usize,
    },
    #[error("retag mapping is not injective: {0:?} and {1:?} collide")]
    NonInjectiveMapping(ScopeTag, ScopeTag),
    #[error("duplicate binding `{name}` in one scope")]
    DuplicateName { name: String },
    #[error("duplicate scope tag {0:?} in a scope list")]
    DuplicateTag(ScopeTag),
}

/// Tag substitution; tags not in the map are left alone.
#[derive(Clone, Debug, Default)]
pub struct TagMap(HashMap<ScopeTag, ScopeTag>);

impl TagMap {
    pub fn new() -> Self {
        TagMap(HashMap::new())
    }

    pub fn insert(&mut self, from: ScopeTag, to: ScopeTag) {
        self.0.insert(from, to);
    }

    pub fn get(&self, tag: ScopeTag) -> ScopeTag {
        self.0.get(&tag).copied().unwrap_or(tag)
    }

    pub fn contains(&self, tag: ScopeTag) -> bool {
        self.0.contains_key(&tag)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ScopeTag, ScopeTag)> + '_ {
        self.0.iter().map(|(a, b)| (*a, *b))
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &TagMap) -> TagMap {
        let mut out: HashMap<_, _> = self.0.iter().map(|(k, v)| (*k, then.get(*v))).collect();
        for (k, v) in then.iter() {
            out.entry(k).or_insert(v);
        }
        TagMap(out)
    }
}

impl FromIterator<(ScopeTag, ScopeTag)> for TagMap {
    fn from_iter<I: IntoIterator<Item = (ScopeTag, ScopeTag)>>(iter: I) -> Self {
        TagMap(iter.into_iter().collect())
    }
}

/// Syntax that mentions scope tags.
pub trait Retag: Sized {
    fn retag(&self, map: &TagMap) -> Self;
    /// Every tag mentioned, including tags of scopes the value itself introduces.
    fn collect_tags(&self, out: &mut Vec<ScopeTag>);
}

impl Retag for Ident {
    fn retag(&self, map: &TagMap) -> Self {
        self.with_tag(map.get(self.tag))
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        out.push(self.tag);
    }
}

impl Retag for () {
    fn retag(&self, _: &TagMap) -> Self {}
    fn collect_tags(&self, _: &mut Vec<ScopeTag>) {}
}

/// A named binding with an opaque payload. `arity` is set for bindings that
/// may be overloaded by argument count.
#[derive(Clone, Debug, PartialEq)]
pub struct Binding<T> {
    pub name: Name,
    pub arity: Option<usize>,
    pub payload: T,
}

impl<T> Binding<T> {
    pub fn new(name: impl Into<Name>, payload: T) -> Self {
        Binding {
            name: name.into(),
            arity: None,
            payload,
        }
    }

    pub fn with_arity(name: impl Into<Name>, arity: usize, payload: T) -> Self {
        Binding {
            name: name.into(),
            arity: Some(arity),
            payload,
        }
    }

    /// Anonymous bindings (unnamed axioms) are never found by name.
    pub fn is_anonymous(&self) -> bool {
        self.name.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scope<T> {
    tag: ScopeTag,
    bindings: Vec<Binding<T>>,
}

impl<T> Scope<T> {
    pub fn new() -> Self {
        Scope::with_tag(fresh_tag())
    }

    pub fn with_tag(tag: ScopeTag) -> Self {
        Scope {
            tag,
            bindings: Vec::new(),
        }
    }

    pub fn tag(&self) -> ScopeTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn bindings(&self) -> &[Binding<T>] {
        &self.bindings
    }

    pub fn binding(&self, index: usize) -> Option<&Binding<T>> {
        index.checked_sub(1).and_then(|i| self.bindings.get(i))
    }

    pub fn binding_mut(&mut self, index: usize) -> Option<&mut Binding<T>> {
        index.checked_sub(1).and_then(move |i| self.bindings.get_mut(i))
    }

    /// The ident of the binding at 1-based `index`.
    pub fn ident(&self, index: usize) -> Ident {
        let b = &self.bindings[index - 1];
        Ident::new(self.tag, index, b.name.clone())
    }

    pub fn idents(&self) -> impl Iterator<Item = Ident> + '_ {
        self.bindings
            .iter()
            .enumerate()
            .map(|(i, b)| Ident::new(self.tag, i + 1, b.name.clone()))
    }

    /// Appends a binding, rejecting a second binding with the same name unless
    /// both declare distinct arities.
    pub fn push(&mut self, binding: Binding<T>) -> Result<Ident, ScopeError> {
        if !binding.is_anonymous() {
            let clash = self.bindings.iter().any(|b| {
                b.name == binding.name
                    && match (b.arity, binding.arity) {
                        (Some(x), Some(y)) => x == y,
                        _ => true,
                    }
            });
            if clash {
                return Err(ScopeError::DuplicateName {
                    name: binding.name.to_string(),
                });
            }
        }
        self.bindings.push(binding);
        let index = self.bindings.len();
        Ok(Ident::new(self.tag, index, self.bindings[index - 1].name.clone()))
    }

    /// Appends without the duplicate check.
    pub fn push_unchecked(&mut self, binding: Binding<T>) -> Ident {
        self.bindings.push(binding);
        let index = self.bindings.len();
        Ident::new(self.tag, index, self.bindings[index - 1].name.clone())
    }

    /// Matching bindings in this scope, in declaration order.
    pub fn find(&self, name: &str, arity: Option<usize>) -> Vec<Ident> {
        self.bindings
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.is_anonymous() && &*b.name == name)
            .filter(|(_, b)| arity.is_none() || b.arity.is_none() || b.arity == arity)
            .map(|(i, b)| Ident::new(self.tag, i + 1, b.name.clone()))
            .collect()
    }

    pub fn map_payloads<U>(&self, mut f: impl FnMut(&Binding<T>) -> U) -> Scope<U> {
        Scope {
            tag: self.tag,
            bindings: self
                .bindings
                .iter()
                .map(|b| Binding {
                    name: b.name.clone(),
                    arity: b.arity,
                    payload: f(b),
                })
                .collect(),
        }
    }

    /// Renames binding `index` without touching any idents that refer to it.
    pub fn rename(&mut self, index: usize, name: impl Into<Name>) {
        if let Some(b) = self.binding_mut(index) {
            b.name = name.into();
        }
    }
}

impl<T> Default for Scope<T> {
    fn default() -> Self {
        Scope::new()
    }
}

impl<T: Retag> Retag for Scope<T> {
    fn retag(&self, map: &TagMap) -> Self {
        Scope {
            tag: map.get(self.tag),
            bindings: self
                .bindings
                .iter()
                .map(|b| Binding {
                    name: b.name.clone(),
                    arity: b.arity,
                    payload: b.payload.retag(map),
                })
                .collect(),
        }
    }

    fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
        out.push(self.tag);
        for b in &self.bindings {
            b.payload.collect_tags(out);
        }
    }
}

/// Ordered scopes, outermost first. Scopes are shared structurally.
#[derive(Clone, Debug)]
pub struct ScopeList<T> {
    scopes: Vec<Arc<Scope<T>>>,
}

impl<T> Default for ScopeList<T> {
    fn default() -> Self {
        ScopeList { scopes: Vec::new() }
    }
}

impl<T> ScopeList<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_scopes(scopes: Vec<Arc<Scope<T>>>) -> Result<Self, ScopeError> {
        let mut seen = HashSet::new();
        for s in &scopes {
            if !seen.insert(s.tag()) {
                return Err(ScopeError::DuplicateTag(s.tag()));
            }
        }
        Ok(ScopeList { scopes })
    }

    pub fn push(&mut self, scope: Arc<Scope<T>>) -> Result<(), ScopeError> {
        if self.scopes.iter().any(|s| s.tag() == scope.tag()) {
            return Err(ScopeError::DuplicateTag(scope.tag()));
        }
        self.scopes.push(scope);
        Ok(())
    }

    pub fn scopes(&self) -> &[Arc<Scope<T>>] {
        &self.scopes
    }

    pub fn last_mut(&mut self) -> Option<&mut Arc<Scope<T>>> {
        self.scopes.last_mut()
    }

    pub fn pop(&mut self) -> Option<Arc<Scope<T>>> {
        self.scopes.pop()
    }

    pub fn len(&self) -> usize {
        self.scopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scopes.is_empty()
    }

    pub fn scope(&self, tag: ScopeTag) -> Option<&Scope<T>> {
        self.scopes.iter().find(|s| s.tag() == tag).map(|s| &**s)
    }

    pub fn has_tag(&self, tag: ScopeTag) -> bool {
        self.scopes.iter().any(|s| s.tag() == tag)
    }

    /// The ident of the innermost binding called `name` (with matching arity
    /// when one is given).
    pub fn resolve(&self, name: &str, arity: Option<usize>) -> Result<Ident, ScopeError> {
        for scope in self.scopes.iter().rev() {
            let found = scope.find(name, arity);
            match found.len() {
                0 => continue,
                1 => return Ok(found.into_iter().next().unwrap()),
                _ => {
                    let arities = found
                        .iter()
                        .filter_map(|id| scope.binding(id.index).and_then(|b| b.arity))
                        .collect();
                    return Err(ScopeError::AmbiguousOverload {
                        name: name.to_string(),
                        arities,
                    });
                }
            }
        }
        Err(ScopeError::UnboundName(name.to_string()))
    }

    /// Every binding called `name`, innermost scope first.
    pub fn candidates(&self, name: &str) -> Vec<Ident> {
        self.scopes
            .iter()
            .rev()
            .flat_map(|s| s.find(name, None))
            .collect()
    }

    pub fn lookup(&self, id: &Ident) -> Result<&Binding<T>, ScopeError> {
        let scope = self.scope(id.tag).ok_or(ScopeError::TagNotFound(id.tag))?;
        scope.binding(id.index).ok_or(ScopeError::IndexOutOfRange {
            tag: id.tag,
            index: id.index,
            len: scope.len(),
        })
    }

    /// All bindings in order, with their idents.
    pub fn iter(&self) -> impl Iterator<Item = (Ident, &Binding<T>)> + '_ {
        self.scopes.iter().flat_map(|s| {
            s.bindings()
                .iter()
                .enumerate()
                .map(move |(i, b)| (Ident::new(s.tag(), i + 1, b.name.clone()), b))
        })
    }
}

impl<T: Retag + Clone> ScopeList<T> {
    /// Replaces tags everywhere per `mapping`, which must be injective on the
    /// tags that occur.
    pub fn retag(&self, mapping: &HashMap<ScopeTag, ScopeTag>) -> Result<Self, ScopeError> {
        let mut occurring = Vec::new();
        for s in &self.scopes {
            s.collect_tags(&mut occurring);
        }
        occurring.sort();
        occurring.dedup();
        let mut images: HashMap<ScopeTag, ScopeTag> = HashMap::new();
        for t in occurring {
            let image = mapping.get(&t).copied().unwrap_or(t);
            if let Some(prev) = images.insert(image, t) {
                return Err(ScopeError::NonInjectiveMapping(prev, t));
            }
        }
        let map: TagMap = mapping.iter().map(|(a, b)| (*a, *b)).collect();
        Ok(ScopeList {
            scopes: self.scopes.iter().map(|s| Arc::new(s.retag(&map))).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn payload_list() -> ScopeList<Vec<Ident>> {
        let mut theory = Scope::new();
        theory.push(Binding::new("Ob", vec![])).unwrap();
        theory.push(Binding::new("Hom", vec![])).unwrap();
        let mut local: Scope<Vec<Ident>> = Scope::new();
        let a = local.push(Binding::new("a", vec![])).unwrap();
        let b = local.push(Binding::new("b", vec![])).unwrap();
        local.push(Binding::new("f", vec![a, b])).unwrap();
        ScopeList::from_scopes(vec![Arc::new(theory), Arc::new(local)]).unwrap()
    }

    impl Retag for Vec<Ident> {
        fn retag(&self, map: &TagMap) -> Self {
            self.iter().map(|i| i.retag(map)).collect()
        }
        fn collect_tags(&self, out: &mut Vec<ScopeTag>) {
            out.extend(self.iter().map(|i| i.tag));
        }
    }

    #[test]
    fn tags_are_fresh() {
        let a = fresh_tag();
        let b = fresh_tag();
        assert_ne!(a, b);
        let many: HashSet<_> = (0..1000).map(|_| fresh_tag()).collect();
        assert_eq!(many.len(), 1000);
    }

    #[test]
    fn resolve_finds_local_binding() {
        let sl = payload_list();
        let f = sl.resolve("f", None).unwrap();
        assert_eq!(f.tag, sl.scopes()[1].tag());
        assert_eq!(f.index, 3);
        assert_eq!(&*f.name, "f");
        assert_eq!(&*sl.lookup(&f).unwrap().name, "f");
    }

    #[test]
    fn inner_scope_shadows() {
        let mut outer: Scope<()> = Scope::new();
        outer.push(Binding::new("x", ())).unwrap();
        let mut inner: Scope<()> = Scope::new();
        inner.push(Binding::new("y", ())).unwrap();
        inner.push(Binding::new("x", ())).unwrap();
        let inner_tag = inner.tag();
        let sl = ScopeList::from_scopes(vec![Arc::new(outer), Arc::new(inner)]).unwrap();
        let x = sl.resolve("x", None).unwrap();
        assert_eq!(x.tag, inner_tag);
        assert_eq!(x.index, 2);
    }

    #[test]
    fn unbound_and_foreign() {
        let sl = payload_list();
        assert_eq!(
            sl.resolve("zzz", None),
            Err(ScopeError::UnboundName("zzz".into()))
        );
        let foreign = Ident::new(fresh_tag(), 1, "f");
        assert!(matches!(sl.lookup(&foreign), Err(ScopeError::TagNotFound(_))));
        let too_far = Ident::new(sl.scopes()[0].tag(), 9, "Ob");
        assert!(matches!(
            sl.lookup(&too_far),
            Err(ScopeError::IndexOutOfRange { len: 2, .. })
        ));
    }

    #[test]
    fn overloads_by_arity() {
        let mut s: Scope<()> = Scope::new();
        s.push(Binding::with_arity("compose", 2, ())).unwrap();
        s.push(Binding::with_arity("compose", 3, ())).unwrap();
        assert!(s.push(Binding::with_arity("compose", 2, ())).is_err());
        let sl = ScopeList::from_scopes(vec![Arc::new(s)]).unwrap();
        assert_eq!(sl.resolve("compose", Some(3)).unwrap().index, 2);
        assert!(matches!(
            sl.resolve("compose", None),
            Err(ScopeError::AmbiguousOverload { .. })
        ));
    }

    #[test]
    fn retag_identity_and_swap() {
        let sl = payload_list();
        let same = sl.retag(&HashMap::new()).unwrap();
        assert_eq!(same.scopes()[1], sl.scopes()[1]);

        let t0 = sl.scopes()[0].tag();
        let t1 = sl.scopes()[1].tag();
        let swap: HashMap<_, _> = [(t0, t1), (t1, t0)].into_iter().collect();
        let twice = sl.retag(&swap).unwrap().retag(&swap).unwrap();
        for (a, b) in twice.scopes().iter().zip(sl.scopes()) {
            assert_eq!(a, b);
        }

        let collapse: HashMap<_, _> = [(t0, t1)].into_iter().collect();
        assert!(matches!(
            sl.retag(&collapse),
            Err(ScopeError::NonInjectiveMapping(..))
        ));
    }

    #[test]
    fn retag_commutes_with_resolve() {
        let sl = payload_list();
        let new0 = fresh_tag();
        let new1 = fresh_tag();
        let m: HashMap<_, _> = [(sl.scopes()[0].tag(), new0), (sl.scopes()[1].tag(), new1)]
            .into_iter()
            .collect();
        let map: TagMap = m.iter().map(|(a, b)| (*a, *b)).collect();
        let moved = sl.retag(&m).unwrap();
        for name in ["Ob", "Hom", "a", "b", "f"] {
            let before = sl.resolve(name, None).unwrap().retag(&map);
            let after = moved.resolve(name, None).unwrap();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn lookup_ignores_display_names() {
        let sl = payload_list();
        let f = sl.resolve("f", None).unwrap();
        let mut local = (*sl.scopes()[1]).clone();
        local.rename(3, "renamed");
        let renamed =
            ScopeList::from_scopes(vec![sl.scopes()[0].clone(), Arc::new(local)]).unwrap();
        assert_eq!(renamed.lookup(&f).unwrap().payload, sl.lookup(&f).unwrap().payload);
    }
}
