//! What goes wrong, and where it is reported.

use indexmap::IndexMap;
use serde_json::json;

use gatkit::colimits::{inclusion_map, pushout_simple, rename_theory, ColimitError};
use gatkit::gat::GatError;
use gatkit::morphisms::check_welltyped;
use gatkit::stdlib::{stdlib, theory};
use gatkit::surface::{
    from_json, map_from_json, parse_map, parse_term, parse_theory, term_from_json, theory_from_json,
    theory_to_json, Registry, Span, SurfaceErrorKind,
};

fn theory_err(src: &str) -> gatkit::surface::SurfaceError {
    parse_theory(src, stdlib()).expect_err(src)
}

#[test]
fn unterminated_theory() {
    let e = theory_err("theory T { Ob::TYPE");
    assert!(matches!(e.kind, SurfaceErrorKind::Syntax(_)));
    assert_eq!(e.span, Span::new(1, 20));
    assert_eq!(e.to_string(), "1:20: syntax error: expected `}`, found end of input");
}

#[test]
fn bad_theory_name() {
    let e = theory_err("theory 3 { }");
    assert_eq!(e.to_string(), "1:8: syntax error: expected a name, found `3`");
}

#[test]
fn unknown_type_constructor() {
    let e = theory_err("theory T { x::Nope }");
    assert_eq!(e.gat_error(), Some(&GatError::UnknownConstructor("Nope".into())));
    assert_eq!(e.span, Span::new(1, 15));
}

#[test]
fn unknown_parent() {
    let e = theory_err("theory T extends Nope { }");
    assert_eq!(e.kind, SurfaceErrorKind::UnknownTheory("Nope".into()));
}

#[test]
fn duplicate_constructor_points_at_second() {
    let e = theory_err("theory T { Ob::TYPE\n Ob::TYPE }");
    assert_eq!(e.span, Span::new(2, 2));
}

#[test]
fn forward_reference_in_context() {
    let src = "theory T {\n  Ob::TYPE\n  Hom(a, b)::TYPE ⊣ [a::Ob, b::Ob]\n  f::Hom(a, b) ⊣ [g::Hom(a, b), a::Ob, b::Ob]\n}";
    let e = theory_err(src);
    assert!(matches!(e.gat_error(), Some(GatError::ForwardReference { var, binding }) if var == "a" && binding == "g"));
    assert_eq!(e.span, Span::new(4, 19));
}

#[test]
fn wrong_declaration_kind() {
    let e = parse_map("theory T { }", stdlib()).unwrap_err();
    assert_eq!(e.to_string(), "1:1: syntax error: expected a map, found a theory");
}

#[test]
fn map_to_unknown_theory() {
    let e = parse_map("map M(ThSet, ThNope) { }", stdlib()).unwrap_err();
    assert_eq!(e.kind, SurfaceErrorKind::UnknownTheory("ThNope".into()));
}

#[test]
fn map_missing_a_clause() {
    let e = parse_map("map M(ThMonoid, ThArith) { x⋅y ⊣ [x,y] => x+y }", stdlib()).unwrap_err();
    assert!(e.to_string().contains("no image for default"), "{e}");
}

#[test]
fn duplicate_registry_entry() {
    let mut reg = Registry::new();
    reg.load_source("theory T { }").unwrap();
    let e = reg.load_source("theory T { }").unwrap_err();
    assert_eq!(e.kind, SurfaceErrorKind::DuplicateEntry("T".into()));
    reg.set_shadowing(true);
    reg.load_source("theory T { X::TYPE }").unwrap();
    assert_eq!(reg.theory("T").unwrap().typecons().len(), 1);
}

#[test]
fn term_errors() {
    let cat = theory("ThCategory");
    let arity = parse_term(cat, "compose(f) ⊣ [f::Hom(a, a), a::Ob]");
    assert!(arity.is_err());
    let sorts = parse_term(cat, "compose(a, a) ⊣ [a::Ob]").unwrap_err();
    assert!(sorts.to_string().contains("sort mismatch"), "{sorts}");
    let unbound = parse_term(cat, "id(q) ⊣ [a::Ob]").unwrap_err();
    assert_eq!(unbound.gat_error(), Some(&GatError::UnboundVariable("q".into())));
}

#[test]
fn ill_typed_library_map() {
    let diags = check_welltyped(stdlib().map("Bad₂").unwrap()).unwrap_err();
    let ob = diags.iter().find(|d| d.constructor == "Ob").expect("a diagnostic for Ob");
    assert!(ob.message.starts_with("Ill-typed arguments for Hom"));
    assert!(diags.iter().any(|d| d.constructor == "id" && d.message.starts_with("Ill-typed argument for id")));
}

mod json_documents {
    use super::*;

    fn malformed(e: gatkit::surface::SurfaceError) -> (String, String) {
        match e.kind {
            SurfaceErrorKind::Malformed { path, message } => (path, message),
            other => panic!("expected a malformed-document error, got {other}"),
        }
    }

    #[test]
    fn missing_top_level_field() {
        let (path, message) = malformed(theory_from_json(&json!({ "kind": "theory" })).unwrap_err());
        assert_eq!(path, "$");
        assert!(message.contains("name"), "{message}");
    }

    #[test]
    fn unknown_kind() {
        let (path, _) = malformed(from_json(&json!({ "kind": "banana" })).unwrap_err());
        assert_eq!(path, "$.kind");
    }

    #[test]
    fn nested_path_is_reported() {
        let mut doc = theory_to_json(theory("ThCategory"));
        doc["segments"][0]["bindings"][0]["judgment"] = json!(3);
        let (path, _) = malformed(theory_from_json(&doc).unwrap_err());
        assert_eq!(path, "$.segments[0].bindings[0].judgment");
    }

    #[test]
    fn wrong_kind_for_entry_point() {
        let doc = theory_to_json(theory("ThSet"));
        assert!(map_from_json(&doc).is_err());
        assert!(term_from_json(&doc).is_err());
    }

    #[test]
    fn index_past_the_end_of_a_scope() {
        let mut doc = theory_to_json(theory("ThCategory"));
        doc["segments"][0]["bindings"][1]["judgment"]["args"]["bindings"][0]["type"]["head"]["index"] = json!(99);
        let (path, _) = malformed(theory_from_json(&doc).unwrap_err());
        assert_eq!(path, "$.segments[0].bindings[1].judgment.args.bindings[0].type.head.index");
    }

    #[test]
    fn tags_are_numbered_from_one() {
        let doc = theory_to_json(theory("ThCategory"));
        assert_eq!(doc["segments"][0]["bindings"][0]["judgment"]["args"]["tag"], 2);
        assert_eq!(doc["policy"][0]["op"]["tag"], 1);
    }

    #[test]
    fn not_an_object() {
        for doc in [json!(null), json!([1, 2]), json!("theory")] {
            assert!(from_json(&doc).is_err(), "{doc}");
        }
    }
}

mod colimit_errors {
    use super::*;

    fn renames(pairs: &[(&str, &str)]) -> IndexMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn renaming_an_unknown_constructor() {
        let e = rename_theory(theory("ThMonoid"), &renames(&[("nope", "x")])).unwrap_err();
        assert_eq!(e, ColimitError::UnknownName("nope".into()));
    }

    #[test]
    fn renaming_into_a_collision() {
        let e = rename_theory(theory("ThMonoid"), &renames(&[("e", "⋅")])).unwrap_err();
        assert_eq!(e, ColimitError::NameCollision("⋅".into()));
    }

    #[test]
    fn inclusion_needs_every_constructor() {
        match inclusion_map(theory("ThMonoid"), theory("ThSet")).unwrap_err() {
            ColimitError::NotAnInclusion(missing) => assert!(missing.contains(&"missing e".to_string())),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn pushout_rejects_general_maps() {
        let e = pushout_simple(stdlib().map("TimesM").unwrap(), stdlib().map("PlusM").unwrap()).unwrap_err();
        assert_eq!(e, ColimitError::NotSimple("TimesM".into()));
    }

    #[test]
    fn pushout_needs_a_common_domain() {
        let set_in_monoid = inclusion_map(theory("ThSet"), theory("ThMonoid")).unwrap();
        assert!(pushout_simple(stdlib().map("PlusM").unwrap(), &set_in_monoid).is_err());
    }
}
