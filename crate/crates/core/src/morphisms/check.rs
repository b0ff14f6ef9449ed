use std::fmt;

use super::{MapError, TheoryMap, TheoryMapKind};
use crate::gat::{
    alpha_equal, alpha_equal_type, check_context, check_type, equal_upto_norm, infer_sort,
    infer_type, GatError, TypeCtx,
};
use crate::models::{search_counterexample, Enumerators, Model, Search, Value};
use crate::scopes::Ident;
use crate::surface::{pretty_term_in_ctx, pretty_type_in_ctx, Span};

/// A problem with one constructor's image.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub constructor: String,
    pub message: String,
    pub span: Option<Span>,
}

impl Diagnostic {
    fn new(m: &TheoryMap, c: &Ident, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            constructor: m.dom().canonical(c).name.to_string(),
            message: message.into(),
            span: m.span_of(c),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "constructor": self.constructor,
            "message": self.message,
            "span": self.span.map(|s| s.to_string()),
        })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = self.span {
            write!(f, "{s}: ")?;
        }
        write!(f, "{}: {}", self.constructor, self.message)
    }
}

fn arg_message(head: &str, e: &GatError, plural: bool) -> String {
    match e.root() {
        e @ GatError::ArityMismatch { .. } => e.to_string(),
        e => {
            let s = if plural { "arguments" } else { "argument" };
            format!("Ill-typed {s} for {head}: {e}")
        }
    }
}

/// Checks that every image is well-formed in the pushed-forward context of
/// its source constructor, and that term images have the pushed-forward
/// result type.
pub fn check_welltyped(m: &TheoryMap) -> Result<(), Vec<Diagnostic>> {
    let general = match m.promote() {
        Ok(g) => g,
        Err(e) => {
            return Err(vec![Diagnostic {
                constructor: m.name().to_string(),
                message: e.to_string(),
                span: None,
            }])
        }
    };
    let TheoryMapKind::General { typemap, termmap } = general.kind() else {
        unreachable!("promote returns a general map")
    };
    let (dom, codom) = (m.dom(), m.codom());
    let mut errors = Vec::new();

    let mut typecon_errors = false;
    for (c, img) in typemap {
        if let Err(e) = check_type(codom, &img.ctx, &img.ty) {
            typecon_errors = true;
            let head = codom.canonical(&img.ty.head).name.to_string();
            errors.push(Diagnostic::new(m, c, arg_message(&head, &e, true)));
        }
    }

    for (c, img) in termmap {
        let con = dom.termcon(c).expect("domain term constructor");
        let head = match &img.term {
            crate::gat::AlgTerm::App(h, _) => codom.canonical(h).name.to_string(),
            crate::gat::AlgTerm::Var(v) => v.name.to_string(),
        };
        if let Err(e) = infer_sort(codom, &img.ctx, &img.term) {
            errors.push(Diagnostic::new(m, c, arg_message(&head, &e, false)));
            continue;
        }
        if let Err(e) = check_context(codom, &img.ctx) {
            // usually a consequence of a bad type image, already reported
            if !typecon_errors {
                errors.push(Diagnostic::new(m, c, format!("ill-formed context: {e}")));
            }
            continue;
        }
        let found = match infer_type(codom, &img.ctx, &img.term) {
            Ok(t) => t,
            Err(e) => {
                errors.push(Diagnostic::new(m, c, arg_message(&head, &e, false)));
                continue;
            }
        };
        let expected = match general.push_type_into(&con.localcontext, &img.ctx, &con.result) {
            Ok(t) => t,
            Err(e) => {
                errors.push(Diagnostic::new(m, c, e.to_string()));
                continue;
            }
        };
        let agree = found.head == expected.head
            && found.args.len() == expected.args.len()
            && found
                .args
                .iter()
                .zip(&expected.args)
                .all(|(x, y)| equal_upto_norm(codom, &img.ctx, x, y, codom.policy()));
        if !agree {
            errors.push(Diagnostic::new(
                m,
                c,
                format!(
                    "image has type {} but the pushed-forward result type is {}",
                    crate::surface::pretty_type(codom, &img.ctx, &found),
                    crate::surface::pretty_type(codom, &img.ctx, &expected)
                ),
            ));
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// For a renaming map: the pushforward of each constructor's generic term
/// (or type) is α-equal to the generic term of its image.
pub fn check_simple_validity(m: &TheoryMap) -> Result<(), Vec<Diagnostic>> {
    if matches!(m.kind(), TheoryMapKind::General { .. }) {
        return Err(vec![Diagnostic {
            constructor: m.name().to_string(),
            message: MapError::NotSimple(m.name().to_string()).to_string(),
            span: None,
        }]);
    }
    let (dom, codom) = (m.dom(), m.codom());
    let mut errors = Vec::new();
    for c in dom.typecons() {
        let Some(target) = m.ident_image(&c) else { continue };
        let result = (|| -> Result<Option<String>, MapError> {
            let pushed = m.pushforward_type(&dom.generic_type(&c)?)?;
            let generic = codom.generic_type(&target)?;
            Ok((!alpha_equal_type(&pushed, &generic)).then(|| {
                format!(
                    "{} is not {}",
                    pretty_type_in_ctx(codom, &pushed),
                    pretty_type_in_ctx(codom, &generic)
                )
            }))
        })();
        match result {
            Ok(None) => {}
            Ok(Some(msg)) => errors.push(Diagnostic::new(m, &c, msg)),
            Err(e) => errors.push(Diagnostic::new(m, &c, e.to_string())),
        }
    }
    for c in dom.termcons() {
        let Some(target) = m.ident_image(&c) else { continue };
        let result = (|| -> Result<Option<String>, MapError> {
            let pushed = m.pushforward_term(&dom.generic_term(&c)?)?;
            let generic = codom.generic_term(&target)?;
            Ok((!alpha_equal(&pushed, &generic)).then(|| {
                format!(
                    "{} is not {}",
                    pretty_term_in_ctx(codom, &pushed),
                    pretty_term_in_ctx(codom, &generic)
                )
            }))
        })();
        match result {
            Ok(None) => {}
            Ok(Some(msg)) => errors.push(Diagnostic::new(m, &c, msg)),
            Err(e) => errors.push(Diagnostic::new(m, &c, e.to_string())),
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AxiomVerdict {
    ProvedByNormalization,
    Counterexample {
        env: Vec<(String, Value)>,
        lhs: Value,
        rhs: Value,
        model: String,
    },
    /// Neither proved nor refuted; `checked` assignments were tried.
    Unverified { checked: usize, note: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub map: String,
    pub errors: Vec<Diagnostic>,
    pub axioms: Vec<(String, AxiomVerdict)>,
}

impl ValidityReport {
    pub fn welltyped(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = (&String, &AxiomVerdict)> {
        self.axioms
            .iter()
            .filter(|(_, v)| matches!(v, AxiomVerdict::Counterexample { .. }))
            .map(|(n, v)| (n, v))
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let axioms: Vec<_> = self
            .axioms
            .iter()
            .map(|(name, v)| match v {
                AxiomVerdict::ProvedByNormalization => json!({ "axiom": name, "status": "proved" }),
                AxiomVerdict::Counterexample { env, lhs, rhs, model } => json!({
                    "axiom": name,
                    "status": "counterexample",
                    "model": model,
                    "env": env.iter().map(|(k, v)| (k.clone(), v.to_json())).collect::<serde_json::Map<_, _>>(),
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                }),
                AxiomVerdict::Unverified { checked, note } => {
                    json!({ "axiom": name, "status": "unverified", "checked": checked, "note": note })
                }
            })
            .collect();
        json!({
            "map": self.map,
            "welltyped": self.welltyped(),
            "errors": self.errors.iter().map(Diagnostic::to_json).collect::<Vec<_>>(),
            "axioms": axioms,
        })
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map {}: {}", self.map, if self.welltyped() { "well-typed" } else { "ILL-TYPED" })?;
        for e in &self.errors {
            writeln!(f, "  {e}")?;
        }
        for (name, v) in &self.axioms {
            match v {
                AxiomVerdict::ProvedByNormalization => writeln!(f, "  {name}: proved by normalization")?,
                AxiomVerdict::Counterexample { env, lhs, rhs, model } => {
                    let env: Vec<String> = env.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    writeln!(f, "  {name}: COUNTEREXAMPLE in {model} at {}: {lhs} ≠ {rhs}", env.join(", "))?
                }
                AxiomVerdict::Unverified { note, .. } => writeln!(f, "  {name}: unverified ({note})")?,
            }
        }
        Ok(())
    }
}

/// Checks well-typedness, then tries to establish each domain axiom's image:
/// first by normalization under the codomain's policy, then by searching for
/// a counterexample in `witness`.
pub fn check_axiom_preservation(
    m: &TheoryMap,
    witness: Option<&Model>,
    enums: &Enumerators,
    bound: Option<usize>,
) -> ValidityReport {
    let errors = check_welltyped(m).err().unwrap_or_default();
    let (dom, codom) = (m.dom(), m.codom());
    let mut axioms = Vec::new();
    for a in dom.axioms() {
        let ax = dom.axiom(&a).expect("listed axiom");
        let name = if a.name.is_empty() {
            format!("axiom #{}", a.index)
        } else {
            a.name.to_string()
        };
        let pushed = (|| -> Result<_, MapError> {
            let ctx: TypeCtx = m.pushforward_ctx(&ax.localcontext)?;
            let l = m.push_term_into(&ax.localcontext, &ctx, &ax.lhs)?;
            let r = m.push_term_into(&ax.localcontext, &ctx, &ax.rhs)?;
            Ok((ctx, l, r))
        })();
        let (ctx, l, r) = match pushed {
            Ok(x) => x,
            Err(e) => {
                axioms.push((
                    name,
                    AxiomVerdict::Unverified {
                        checked: 0,
                        note: format!("cannot push forward: {e}"),
                    },
                ));
                continue;
            }
        };
        if equal_upto_norm(codom, &ctx, &l, &r, codom.policy()) {
            axioms.push((name, AxiomVerdict::ProvedByNormalization));
            continue;
        }
        let verdict = match witness {
            None => AxiomVerdict::Unverified {
                checked: 0,
                note: "not provable by normalization; no witness model".into(),
            },
            Some(w) => match search_counterexample(w, enums, &ctx, &l, &r, bound) {
                Search::Counterexample { env, lhs, rhs } => AxiomVerdict::Counterexample {
                    env,
                    lhs,
                    rhs,
                    model: w.name().to_string(),
                },
                Search::NoCounterexample { checked, exhaustive } => AxiomVerdict::Unverified {
                    checked,
                    note: format!(
                        "no counterexample in {} ({checked} assignments{})",
                        w.name(),
                        if exhaustive { ", exhaustive" } else { "" }
                    ),
                },
                Search::Failed(e) => AxiomVerdict::Unverified {
                    checked: 0,
                    note: format!("search in {} failed: {e}", w.name()),
                },
            },
        };
        axioms.push((name, verdict));
    }
    ValidityReport {
        map: m.name().to_string(),
        errors,
        axioms,
    }
}
