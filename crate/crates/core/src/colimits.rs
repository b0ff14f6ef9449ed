//! Renaming, inclusions, and pushouts of spans of renaming maps; the
//! `using` clauses of the surface language lower to these.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::gat::{
    alpha_equal, alpha_equal_ctx, alpha_equal_type, Gat, GatBuilder, GatError, Judgment,
    NormalizationPolicy, TermInCtx, TypeInCtx,
};
use crate::morphisms::{check_simple_validity, MapError, TheoryMap, TheoryMapKind};
use crate::scopes::{fresh_tag, Ident, Retag, ScopeList, ScopeTag, TagMap};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ColimitError {
    #[error("{0} is not a constructor of the theory being renamed")]
    UnknownName(String),
    #[error("renaming would make {0} ambiguous")]
    NameCollision(String),
    #[error("not an inclusion: {}", .0.join("; "))]
    NotAnInclusion(Vec<String>),
    #[error("cannot identify {left} with {right}: {reason}")]
    IncompatibleIdentification {
        left: String,
        right: String,
        reason: String,
    },
    #[error("pushouts are only computed for renaming maps; {0} is general")]
    NotSimple(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Gat(#[from] GatError),
}

/// A copy of `g` under fresh tags with constructors renamed, and the
/// isomorphism from `g` to the copy.
pub fn rename_theory(g: &Gat, renames: &IndexMap<String, String>) -> Result<(Gat, TheoryMap), ColimitError> {
    let names: HashSet<String> = g.judgments().map(|(id, _)| id.name.to_string()).collect();
    let mut targets = HashSet::new();
    for (old, new) in renames {
        if !names.contains(old) {
            return Err(ColimitError::UnknownName(old.clone()));
        }
        if !targets.insert(new.clone()) || (names.contains(new) && !renames.contains_key(new)) {
            return Err(ColimitError::NameCollision(new.clone()));
        }
    }
    let (copy, tags) = g.fresh_copy(&|n| renames.get(n).cloned());
    let map = segment_map(g, &copy, &tags);
    Ok((copy, map))
}

/// The renaming map from `g` to a fresh copy of it.
fn segment_map(g: &Gat, copy: &Gat, tags: &TagMap) -> TheoryMap {
    let mut typemap = IndexMap::new();
    let mut termmap = IndexMap::new();
    for c in g.typecons() {
        typemap.insert(c.clone(), copy.canonical(&c.retag(tags)));
    }
    for c in g.termcons() {
        termmap.insert(c.clone(), copy.canonical(&c.retag(tags)));
    }
    TheoryMap::simple(
        format!("{}≅{}", g.name(), copy.name()),
        g.clone(),
        copy.clone(),
        typemap,
        termmap,
    )
}

/// The inclusion of `sub` into `sup`: by shared segments when `sup` was
/// built on top of `sub`, else by finding each segment of `sub` in order
/// among those of `sup` and checking the judgments agree.
pub fn inclusion_map(sub: &Gat, sup: &Gat) -> Result<TheoryMap, ColimitError> {
    if let Some(m) = TheoryMap::shared_inclusion(sub, sup) {
        return Ok(m);
    }
    let sup_scopes = sup.segments().scopes();
    let mut next = 0;
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for s in sub.segments().scopes() {
        let names: Vec<_> = s.bindings().iter().map(|b| b.name.clone()).collect();
        let found = sup_scopes[next..].iter().position(|t| {
            t.bindings().iter().map(|b| b.name.clone()).collect::<Vec<_>>() == names
        });
        match found {
            Some(k) => {
                pairs.push((s.tag(), sup_scopes[next + k].tag()));
                next += k + 1;
            }
            None => missing.extend(names.iter().map(|n| format!("missing {n}"))),
        }
    }
    if !missing.is_empty() {
        return Err(ColimitError::NotAnInclusion(missing));
    }
    let m = TheoryMap::from_kind(
        format!("{}↪{}", sub.name(), sup.name()),
        sub.clone(),
        sup.clone(),
        TheoryMapKind::Incl { segments: pairs.clone() },
    );
    let mut problems: Vec<String> = match check_simple_validity(&m) {
        Ok(()) => vec![],
        Err(ds) => ds.iter().map(|d| d.to_string()).collect(),
    };
    for a in sub.axioms() {
        let ax = sub.axiom(&a).expect("axiom");
        let tag = pairs.iter().find(|(x, _)| *x == a.tag).map(|p| p.1).expect("paired");
        let same = sup.axiom(&a.with_tag(tag)).is_some_and(|bx| {
            let push = |t| m.pushforward_term(&TermInCtx::new(ax.localcontext.clone(), t));
            match (push(ax.lhs.clone()), push(ax.rhs.clone())) {
                (Ok(l), Ok(r)) => {
                    alpha_equal(&l, &TermInCtx::new(bx.localcontext.clone(), bx.lhs.clone()))
                        && alpha_equal(&r, &TermInCtx::new(bx.localcontext.clone(), bx.rhs.clone()))
                }
                _ => false,
            }
        });
        if !same {
            problems.push(format!("axiom {} differs", if a.name.is_empty() { "(unnamed)" } else { &a.name }));
        }
    }
    if problems.is_empty() {
        Ok(m)
    } else {
        Err(ColimitError::NotAnInclusion(problems))
    }
}

/// A pushout of `left: A → L` and `right: A → R`.
#[derive(Clone, Debug)]
pub struct PushoutResult {
    pub theory: Gat,
    /// `L → P`, an inclusion: the pushout is built on top of `L`.
    pub left: TheoryMap,
    /// `R → P`, a renaming.
    pub right: TheoryMap,
    /// Things worth telling the user, e.g. apex axioms whose two images
    /// were kept as separate axioms.
    pub notes: Vec<String>,
    /// Segments of `R` copied whole, with their tags in the pushout.
    pub copied_segments: Vec<(ScopeTag, ScopeTag)>,
}

/// Where a leg sends an apex judgment, when it sends it to a judgment.
fn leg_image(leg: &TheoryMap, id: &Ident) -> Option<Ident> {
    if leg.dom().is_constructor(id) {
        return leg.ident_image(id);
    }
    match leg.kind() {
        TheoryMapKind::Id => Some(id.clone()),
        TheoryMapKind::Incl { segments } => segments.iter().find(|(a, _)| *a == id.tag).map(|(_, b)| id.with_tag(*b)),
        _ => None,
    }
}

fn display(id: &Ident) -> String {
    if id.name.is_empty() {
        format!("axiom #{}", id.index)
    } else {
        id.name.to_string()
    }
}

/// Compares a judgment of `R`, already translated into the pushout's
/// idents, with the judgment of `L` it is identified with.
fn same_shape(a: &Judgment, b: &Judgment) -> bool {
    match (a, b) {
        (Judgment::TypeCon(x), Judgment::TypeCon(y)) => alpha_equal_ctx(&x.args, &y.args),
        (Judgment::TermCon(x), Judgment::TermCon(y)) => {
            x.explicit_positions() == y.explicit_positions()
                && alpha_equal_type(
                    &TypeInCtx::new(x.localcontext.clone(), x.result.clone()),
                    &TypeInCtx::new(y.localcontext.clone(), y.result.clone()),
                )
        }
        (Judgment::Axiom(x), Judgment::Axiom(y)) => axioms_alpha_equal(x, y),
        _ => false,
    }
}

fn axioms_alpha_equal(x: &crate::gat::Axiom, y: &crate::gat::Axiom) -> bool {
    x.sort.0 == y.sort.0
        && alpha_equal(
            &TermInCtx::new(x.localcontext.clone(), x.lhs.clone()),
            &TermInCtx::new(y.localcontext.clone(), y.lhs.clone()),
        )
        && alpha_equal(
            &TermInCtx::new(x.localcontext.clone(), x.rhs.clone()),
            &TermInCtx::new(y.localcontext.clone(), y.rhs.clone()),
        )
}

/// The pushout of a span of renaming maps: `L` plus the parts of `R` not
/// identified with something in `L`, where each apex judgment's image in
/// `R` is identified with its image in `L`. Axioms that become α-equal to
/// an existing one are dropped.
pub fn pushout_simple(left: &TheoryMap, right: &TheoryMap) -> Result<PushoutResult, ColimitError> {
    for leg in [left, right] {
        if matches!(leg.kind(), TheoryMapKind::General { .. }) {
            return Err(ColimitError::NotSimple(leg.name().to_string()));
        }
    }
    if !left.dom().same_theory(right.dom()) {
        return Err(MapError::TheoryMismatch {
            left: left.dom().name().to_string(),
            right: right.dom().name().to_string(),
        }
        .into());
    }
    let (apex, l, r) = (left.dom(), left.codom(), right.codom());

    // R ident → pushout ident
    let mut ident_map: HashMap<Ident, Ident> = HashMap::new();
    for (c, _) in apex.judgments() {
        let (Some(li), Some(ri)) = (leg_image(left, &c), leg_image(right, &c)) else { continue };
        let li = l.canonical(&li);
        if let Some(prev) = ident_map.get(&ri) {
            if *prev != li {
                return Err(ColimitError::IncompatibleIdentification {
                    left: format!("{} and {}", prev.name, li.name),
                    right: ri.name.to_string(),
                    reason: "one constructor would be identified with two different ones".into(),
                });
            }
        }
        ident_map.insert(ri, li);
    }

    // translate an R judgment into pushout idents, with fresh local scopes
    let r_segments: HashSet<ScopeTag> = r.segment_tags().into_iter().collect();
    let translate = |j: &Judgment, ident_map: &HashMap<Ident, Ident>| -> Judgment {
        let mapped = j.map_idents(&mut |id: &Ident| match ident_map.get(id) {
            Some(t) => t.clone(),
            None => id.clone(),
        });
        let mut tags = Vec::new();
        j.collect_tags(&mut tags);
        let local: TagMap = tags
            .into_iter()
            .filter(|t| !r_segments.contains(t))
            .collect::<HashSet<_>>()
            .into_iter()
            .map(|t| (t, fresh_tag()))
            .collect();
        mapped.retag(&local)
    };

    for (ri, li) in &ident_map {
        let (Some(rj), Some(lj)) = (r.lookup(ri), l.lookup(li)) else { continue };
        if !same_shape(&translate(rj, &ident_map), lj) {
            return Err(ColimitError::IncompatibleIdentification {
                left: display(li),
                right: display(ri),
                reason: "their declarations differ".into(),
            });
        }
    }

    let mut b = GatBuilder::extend(format!("{}+{}", l.name(), r.name()), l);
    let mut notes = Vec::new();
    let mut copied_segments = Vec::new();
    for scope in r.segments().scopes() {
        let tag = scope.tag();
        let all_identified = (1..=scope.len()).all(|i| ident_map.contains_key(&scope.ident(i)));
        if all_identified {
            continue;
        }
        b.new_segment();
        let mut whole = true;
        for i in 1..=scope.len() {
            let id = scope.ident(i);
            if ident_map.contains_key(&id) {
                whole = false;
                continue;
            }
            let binding = scope.binding(i).expect("index in range");
            let j = translate(&binding.payload, &ident_map);
            let name: &str = &binding.name;
            let new = match &j {
                Judgment::TypeCon(t) => b.add_typecon(name, t.args.clone())?,
                Judgment::TermCon(t) => {
                    b.add_termcon(name, t.localcontext.clone(), t.explicit_args.clone(), t.result.clone())?
                }
                Judgment::Axiom(a) => {
                    let dup = b
                        .gat()
                        .axioms()
                        .into_iter()
                        .find(|x| b.gat().axiom(x).is_some_and(|y| axioms_alpha_equal(a, y)));
                    if let Some(existing) = dup {
                        whole = false;
                        ident_map.insert(id, existing);
                        continue;
                    }
                    let n = (!name.is_empty()).then_some(name);
                    b.add_axiom(n, a.localcontext.clone(), a.lhs.clone(), a.rhs.clone())?
                }
            };
            ident_map.insert(id, new);
        }
        if whole {
            copied_segments.push((tag, b.current_tag()));
        }
    }

    // aliases and normalization rules of R, in pushout names
    let name_of = |target: &str| -> Option<String> {
        r.candidates(target)
            .first()
            .and_then(|id| ident_map.get(id))
            .map(|id| id.name.to_string())
    };
    for (sym, target) in r.aliases() {
        let Some(t) = name_of(target) else { continue };
        if b.add_alias(sym, &t).is_err() {
            notes.push(format!("alias {sym} kept for {}; not added for {t}", b.gat().aliases()[sym]));
        }
    }
    let mut policy = NormalizationPolicy::new();
    for (op, assoc, unit) in r.policy().rules() {
        if let Some(o) = ident_map.get(op) {
            let u = unit.and_then(|u| ident_map.get(u)).cloned();
            policy.add(o.clone(), assoc, u);
        }
    }
    for (op, assoc, unit) in policy.rules() {
        if b.gat().policy().rule(op).is_none() {
            b.add_rule(op.clone(), assoc, unit.cloned())?;
        }
    }
    let p = b.build()?;

    let left_leg = TheoryMap::shared_inclusion(l, &p).expect("pushout extends the left theory");
    let mut typemap = IndexMap::new();
    let mut termmap = IndexMap::new();
    for c in r.typecons() {
        typemap.insert(c.clone(), ident_map[&c].clone());
    }
    for c in r.termcons() {
        termmap.insert(c.clone(), ident_map[&c].clone());
    }
    let right_leg = TheoryMap::simple(format!("{}→{}", r.name(), p.name()), r.clone(), p.clone(), typemap, termmap);

    // apex axioms whose two images did not end up as one axiom
    for a in apex.axioms() {
        let (Some(la), Some(ra)) = (leg_image(left, &a), leg_image(right, &a)) else {
            continue;
        };
        if ident_map.get(&ra) != Some(&la) {
            notes.push(format!(
                "apex axiom {} has distinct images {} and {}; both are kept",
                display(&a),
                display(&la),
                display(&ra)
            ));
        }
    }

    Ok(PushoutResult {
        theory: p,
        left: left_leg,
        right: right_leg,
        notes,
        copied_segments,
    })
}

/// One `using` clause: a theory and the renamings applied to it.
#[derive(Clone, Debug)]
pub struct UsingClause {
    pub theory: Gat,
    pub renames: IndexMap<String, String>,
}

/// Lowers `using` clauses: each clause is renamed, then the clauses are
/// glued one after another by pushouts over what they share — the leading
/// segments both sides inherited from a common ancestor without renaming
/// anything in them (nothing, the empty theory, in the common case).
pub fn extend_with_using(name: &str, clauses: &[UsingClause]) -> Result<Gat, ColimitError> {
    let Some((first, rest)) = clauses.split_first() else {
        return Ok(Gat::empty(name));
    };

    /// Where an original segment ended up in the accumulated theory, and
    /// whether any of its bindings were renamed on the way.
    type Placed = HashMap<ScopeTag, (ScopeTag, bool)>;

    let renamed_segment = |c: &UsingClause, tag: ScopeTag| -> bool {
        c.theory
            .segments()
            .scope(tag)
            .is_some_and(|s| s.bindings().iter().any(|b| c.renames.contains_key(&*b.name)))
    };
    let prepare = |c: &UsingClause| -> Result<(Gat, TagMap), ColimitError> {
        if c.renames.is_empty() {
            return Ok((c.theory.clone(), TagMap::new()));
        }
        let (copy, _) = rename_theory(&c.theory, &c.renames)?;
        let tags = c.theory.segment_tags().into_iter().zip(copy.segment_tags()).collect();
        Ok((copy, tags))
    };

    let (mut acc, tags) = prepare(first)?;
    let mut placed: Placed = first
        .theory
        .segment_tags()
        .into_iter()
        .map(|t| (t, (tags.get(t), renamed_segment(first, t))))
        .collect();

    for clause in rest {
        let (copy, tags) = prepare(clause)?;
        let mut overlap = Vec::new();
        let mut tainted = false;
        for t in clause.theory.segment_tags() {
            tainted |= renamed_segment(clause, t);
            match placed.get(&t) {
                Some((_, false)) if !tainted => overlap.push(t),
                _ => break,
            }
        }
        let scopes: Vec<_> = overlap
            .iter()
            .map(|t| {
                let s = clause.theory.segments().scope(*t).expect("segment").clone();
                Arc::new(s)
            })
            .collect();
        let segments = ScopeList::from_scopes(scopes).map_err(GatError::from)?;
        let apex = overlap_theory(&clause.theory, segments);
        let left = TheoryMap::from_kind(
            "overlap→left",
            apex.clone(),
            acc.clone(),
            incl_kind(&apex, &acc, overlap.iter().map(|t| (*t, placed[t].0)).collect()),
        );
        let right = TheoryMap::from_kind(
            "overlap→right",
            apex.clone(),
            copy.clone(),
            incl_kind(&apex, &copy, overlap.iter().map(|t| (*t, tags.get(*t))).collect()),
        );
        let po = pushout_simple(&left, &right)?;
        for t in clause.theory.segment_tags() {
            if placed.contains_key(&t) && overlap.contains(&t) {
                continue;
            }
            let in_copy = tags.get(t);
            if let Some((_, p)) = po.copied_segments.iter().find(|(r, _)| *r == in_copy) {
                placed.insert(t, (*p, renamed_segment(clause, t)));
            }
        }
        acc = po.theory;
    }
    Ok(acc.with_name(name))
}

fn incl_kind(apex: &Gat, codom: &Gat, segments: Vec<(ScopeTag, ScopeTag)>) -> TheoryMapKind {
    if apex.same_theory(codom) {
        TheoryMapKind::Id
    } else {
        TheoryMapKind::Incl { segments }
    }
}

/// The theory made of some leading segments of `g`, with the aliases and
/// rules that still make sense there.
fn overlap_theory(g: &Gat, segments: ScopeList<Judgment>) -> Gat {
    let tags: HashSet<ScopeTag> = segments.scopes().iter().map(|s| s.tag()).collect();
    let aliases = g
        .aliases()
        .iter()
        .filter(|(_, target)| !segments.candidates(target).is_empty())
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    let mut policy = NormalizationPolicy::new();
    for (op, assoc, unit) in g.policy().rules() {
        if tags.contains(&op.tag) && unit.is_none_or(|u| tags.contains(&u.tag)) {
            policy.add(op.clone(), assoc, unit.cloned());
        }
    }
    Gat::from_parts("overlap".into(), segments, aliases, policy)
}
