//! Every library theory and map survives printing and JSON.

use gatkit::gat::alpha_equal_gat;
use gatkit::stdlib::{load_stdlib, stdlib, EntryKind};
use gatkit::surface::{
    from_json, map_from_json, map_to_json, parse_map, parse_theory, pretty_gat, pretty_map, theory_from_json,
    theory_to_json, to_json, Entry, JsonEntity, Registry,
};

fn names(kind: EntryKind) -> Vec<String> {
    let (_, index) = load_stdlib().unwrap();
    index.of_kind(kind).map(|e| e.name.clone()).collect()
}

#[test]
fn theories_reparse_from_pretty() {
    for name in names(EntryKind::Theory) {
        let g = stdlib().theory(&name).unwrap();
        let text = pretty_gat(g);
        let back = parse_theory(&text, &Registry::new()).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert!(alpha_equal_gat(g, &back), "{name} changed:\n{text}");
        assert_eq!(pretty_gat(&back), text, "{name}: printing is not a fixed point");
    }
}

#[test]
fn theories_round_trip_json() {
    for name in names(EntryKind::Theory) {
        let g = stdlib().theory(&name).unwrap();
        let doc = theory_to_json(g);
        let back = theory_from_json(&doc).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(alpha_equal_gat(g, &back), "{name}");
        // canonical numbering makes the encoding itself a fixed point
        assert_eq!(theory_to_json(&back), doc, "{name}");
        let text = serde_json::to_string(&doc).unwrap();
        let reread: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(reread, doc);
    }
}

#[test]
fn maps_reparse_from_pretty() {
    for name in names(EntryKind::Map) {
        let m = stdlib().map(&name).unwrap();
        let text = pretty_map(m);
        if text.contains("# ") {
            // an ill-typed library map prints its broken clauses as comments
            continue;
        }
        let back = parse_map(&text, stdlib()).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(pretty_map(&back), text, "{name}");
    }
}

#[test]
fn maps_round_trip_json() {
    for name in names(EntryKind::Map) {
        let m = stdlib().map(&name).unwrap();
        let doc = map_to_json(m);
        let back = map_from_json(&doc).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(alpha_equal_gat(m.dom(), back.dom()), "{name}: domain");
        assert!(alpha_equal_gat(m.codom(), back.codom()), "{name}: codomain");
        assert_eq!(map_to_json(&back), doc, "{name}");
        assert_eq!(pretty_map(&back), pretty_map(m), "{name}");
    }
}

#[test]
fn generic_entry_point_dispatches_on_kind() {
    for (name, e) in stdlib().entries() {
        let doc = match e {
            Entry::Theory(g) => to_json(&JsonEntity::Theory(g.clone())),
            Entry::Map(m) => to_json(&JsonEntity::Map(m.clone())),
        };
        match (e, from_json(&doc).unwrap()) {
            (Entry::Theory(g), JsonEntity::Theory(h)) => assert!(alpha_equal_gat(g, &h), "{name}"),
            (Entry::Map(m), JsonEntity::Map(n)) => assert_eq!(pretty_map(m), pretty_map(&n), "{name}"),
            _ => panic!("{name} decoded as the wrong kind"),
        }
    }
}
