//! The bundled library: every entry loads, checks, and behaves.

use indexmap::IndexMap;

use gatkit::models::{builtin_model, check_axioms, Enumerators, BUILTIN_MODELS, DEFAULT_BOUND};
use gatkit::morphisms::{check_axiom_preservation, check_simple_validity, check_welltyped, compose_maps, migrate_model, TheoryMapKind};
use gatkit::stdlib::{load_stdlib, stdlib, theory, EntryKind, EXPECTED_INVALID};
use gatkit::surface::{parse_term, pretty_term_in_ctx};

#[test]
fn index_lists_every_entry_once() {
    let (reg, index) = load_stdlib().unwrap();
    let mut seen = std::collections::HashSet::new();
    for e in &index.entries {
        assert!(seen.insert(e.name.clone()), "{} listed twice", e.name);
        match e.kind {
            EntryKind::Theory => assert!(reg.theory(&e.name).is_some(), "{}", e.name),
            EntryKind::Map => assert!(reg.map(&e.name).is_some(), "{}", e.name),
            EntryKind::Model => assert_eq!(e.source, "builtin"),
        }
        assert_eq!(e.expected_invalid, EXPECTED_INVALID.contains(&e.name.as_str()), "{}", e.name);
    }
    assert_eq!(index.of_kind(EntryKind::Model).count(), BUILTIN_MODELS.len());
}

#[test]
fn theories_pass_their_own_checks() {
    let (_, index) = load_stdlib().unwrap();
    for e in index.of_kind(EntryKind::Theory) {
        theory(&e.name).self_check().unwrap_or_else(|err| panic!("{}: {err}", e.name));
    }
}

#[test]
fn maps_are_well_typed_unless_meant_to_fail() {
    let (_, index) = load_stdlib().unwrap();
    for e in index.of_kind(EntryKind::Map) {
        let m = stdlib().map(&e.name).unwrap();
        let typed = check_welltyped(m);
        if e.expected_invalid {
            continue;
        }
        typed.unwrap_or_else(|d| panic!("{}: {d:?}", e.name));
        if matches!(m.kind(), TheoryMapKind::Simple { .. }) {
            check_simple_validity(m).unwrap_or_else(|d| panic!("{}: {d:?}", e.name));
        }
    }
}

#[test]
fn expected_failures_fail() {
    assert!(check_welltyped(stdlib().map("Bad₂").unwrap()).is_err());
    let bad1 = stdlib().map("Bad₁").unwrap();
    check_welltyped(bad1).unwrap();
    let nat = builtin_model("NatArithNative", &IndexMap::new(), stdlib()).unwrap();
    let report = check_axiom_preservation(bad1, Some(&nat), &Enumerators::new(), Some(DEFAULT_BOUND));
    let failing: Vec<&str> = report.counterexamples().map(|(n, _)| n.as_str()).collect();
    assert_eq!(failing, ["idl", "idr"]);
}

#[test]
fn builtin_models_satisfy_their_axioms() {
    for (name, _, _) in BUILTIN_MODELS {
        let m = builtin_model(name, &IndexMap::new(), stdlib()).unwrap();
        let report = check_axioms(&m, &Enumerators::new(), Some(DEFAULT_BOUND));
        assert!(report.ok(), "{name}:\n{report}");
    }
}

#[test]
fn model_parameters_are_validated() {
    let params = |k: &str, v: &str| IndexMap::from([(k.to_string(), v.to_string())]);
    assert!(builtin_model("ModularPlusMonoid", &params("n", "0"), stdlib()).is_err());
    assert!(builtin_model("ModularPlusMonoid", &params("n", "seven"), stdlib()).is_err());
    assert!(builtin_model("ModularPlusMonoid", &params("n", "5"), stdlib()).is_ok());
    assert!(builtin_model("SliceC", &params("base", "FinSetFib"), stdlib()).is_ok());
    assert!(builtin_model("NoSuchModel", &IndexMap::new(), stdlib()).is_err());
}

#[test]
fn valid_maps_migrate_lawful_models() {
    for (map, model) in [("PlusM", "NatArithNative"), ("TimesM", "NatArithNative"), ("OpMonoid", "StringMonoid"), ("OpCat", "FinSetC")] {
        let base = builtin_model(model, &IndexMap::new(), stdlib()).unwrap();
        let migrated = migrate_model(stdlib().map(map).unwrap(), &base).unwrap();
        let report = check_axioms(&migrated, &Enumerators::new(), Some(DEFAULT_BOUND));
        assert!(report.ok(), "{map} along {model}:\n{report}");
    }
}

#[test]
fn composition_is_sequential_pushforward() {
    let (op, plus) = (stdlib().map("OpMonoid").unwrap(), stdlib().map("PlusM").unwrap());
    let both = compose_maps(op, plus).unwrap();
    let t = parse_term(theory("ThMonoid"), "(x⋅e())⋅(y⋅x) ⊣ [x, y]").unwrap();
    let stepwise = plus.pushforward_term(&op.pushforward_term(&t).unwrap()).unwrap();
    let at_once = both.pushforward_term(&t).unwrap();
    let arith = theory("ThArith");
    assert_eq!(pretty_term_in_ctx(arith, &at_once), pretty_term_in_ctx(arith, &stepwise));
    assert_eq!(pretty_term_in_ctx(arith, &at_once), "(x+y)+(Z()+x) ⊣ [x::ℕ, y::ℕ]");
}

#[test]
fn module_operations_resolve_by_sort() {
    let module = theory("ThModule");
    // `+` and `zero` exist for scalars and for vectors
    let t = parse_term(module, "(a+b)⋅(v+zero()) ⊣ [(a, b)::Scalar, v::Vector]").unwrap();
    let s = gatkit::gat::infer_sort(module, &t.ctx, &t.term).unwrap();
    assert_eq!(&*module.canonical(&s.0).name, "Vector");
}
