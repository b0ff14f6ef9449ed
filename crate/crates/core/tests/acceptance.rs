//! The ten acceptance criteria, one PASS/FAIL line each.
//! Run with `cargo test -p gatkit --test acceptance`.

use std::collections::HashMap;
use std::process::ExitCode;

use indexmap::IndexMap;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use gatkit::colimits::{inclusion_map, pushout_simple, rename_theory};
use gatkit::gat::{alpha_equal, alpha_equal_gat, compose_env, substitute, AlgTerm, Gat, TermInCtx, TypeCtx};
use gatkit::models::{
    check_axioms, finset_c, finset_fib, free_category, int_plus_monoid, int_range, modular_plus_monoid,
    nat_arith_native, slice_c, string_monoid, AxiomStatus, Enumerators, Model, Value,
};
use gatkit::morphisms::{
    check_axiom_preservation, check_simple_validity, check_welltyped, compose_maps, migrate_model, AxiomVerdict,
    TheoryMap,
};
use gatkit::scopes::Ident;
use gatkit::stdlib::{stdlib, theory};
use gatkit::surface::{parse_term, parse_theory, pretty_gat, pretty_term_in_ctx, theory_from_json, theory_to_json, Registry};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn map(name: &str) -> &'static TheoryMap {
    stdlib().map(name).unwrap_or_else(|| panic!("no map {name}"))
}

fn sym(g: &Gat, s: &str) -> Ident {
    g.resolve_symbol(s, None).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn apply(m: &Model, op: &Ident, args: &[Value]) -> Result<Value, String> {
    m.apply(op, args).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let g = theory("ThCategory");
    let counts = (g.typecons().len(), g.termcons().len());
    ensure(counts == (2, 2), || format!("constructor counts {counts:?}"))?;
    let mut names: Vec<String> = g.axioms().iter().map(|a| a.name.to_string()).collect();
    names.sort();
    ensure(names == ["assoc", "idl", "idr"], || format!("axioms {names:?}"))?;
    let reparsed = parse_theory(&pretty_gat(g), &Registry::new()).map_err(|e| e.to_string())?;
    ensure(alpha_equal_gat(g, &reparsed), || "pretty round-trip differs".into())?;
    let decoded = theory_from_json(&theory_to_json(g)).map_err(|e| e.to_string())?;
    ensure(alpha_equal_gat(g, &decoded), || "JSON round-trip differs".into())
}

fn push_pretty(m: &TheoryMap, src: &str) -> Result<String, String> {
    let t = parse_term(m.dom(), src).map_err(|e| e.to_string())?;
    let out = m.pushforward_term(&t).map_err(|e| e.to_string())?;
    Ok(pretty_term_in_ctx(m.codom(), &out))
}

fn criterion_2() -> Outcome {
    let plus = push_pretty(map("PlusM"), "e()⋅x⋅e() ⊣ [x]")?;
    ensure(plus == "(Z()+x)+Z() ⊣ [x::ℕ]", || format!("PlusM gave {plus}"))?;
    let op = push_pretty(map("OpMonoid"), "x⋅(e()⋅y) ⊣ [x, y]")?;
    ensure(op == "(y⋅e())⋅x ⊣ [x, y]", || format!("OpMonoid gave {op}"))
}

fn criterion_3() -> Outcome {
    let errs = check_welltyped(map("Bad₂")).err().unwrap_or_default();
    let has = |c: &str, needle: &str| errs.iter().any(|d| d.constructor == c && d.message.contains(needle));
    ensure(has("Ob", "Ill-typed arguments for Hom"), || format!("no Hom arity diagnostic in {errs:?}"))?;
    ensure(has("id", "Ill-typed argument for id"), || format!("no id argument diagnostic in {errs:?}"))?;

    let bad1 = map("Bad₁");
    check_welltyped(bad1).map_err(|e| format!("Bad₁ should be well-typed: {e:?}"))?;
    let nat = nat_arith_native(theory("ThArith")).map_err(|e| e.to_string())?;
    let mut enums = Enumerators::new();
    enums.insert(sym(theory("ThArith"), "ℕ"), int_range(0, 20));
    let report = check_axiom_preservation(bad1, Some(&nat), &enums, None);
    let at_zero = report.axioms.iter().any(|(name, v)| {
        (name == "idl" || name == "idr")
            && matches!(v, AxiomVerdict::Counterexample { env, .. } if env.first().map(|(k, v)| (k.as_str(), v)) == Some(("x", &Value::Int(0))))
    });
    ensure(at_zero, || format!("no unitality counterexample at x=0:\n{report}"))
}

fn criterion_4() -> Outcome {
    check_simple_validity(map("F")).map_err(|e| format!("{e:?}"))
}

fn criterion_5() -> Outcome {
    let mon = theory("ThMonoid");
    let (dot, e) = (sym(mon, "⋅"), sym(mon, "e"));
    let ip = int_plus_monoid(mon).map_err(|e| e.to_string())?;
    ensure(apply(&ip, &dot, &[1.into(), 2.into()])? == Value::Int(3), || "1⋅2".into())?;
    ensure(apply(&ip, &e, &[])? == Value::Int(0), || "e()".into())?;
    let sm = string_monoid(mon).map_err(|e| e.to_string())?;
    ensure(apply(&sm, &dot, &["a".into(), "b".into()])? == Value::from("ab"), || "\"a\"⋅\"b\"".into())?;
    let z7 = modular_plus_monoid(mon, 7).map_err(|e| e.to_string())?;
    ensure(apply(&z7, &dot, &[3.into(), 4.into()])? == apply(&z7, &e, &[])?, || "3⋅4 in Z/7".into())?;

    let cat = theory("ThCategory");
    let (id, compose, hom, ob) = (sym(cat, "id"), sym(cat, "compose"), sym(cat, "Hom"), sym(cat, "Ob"));
    let fc = finset_c(cat).map_err(|e| e.to_string())?;
    ensure(apply(&fc, &id, &[3.into()])? == Value::from(vec![1, 2, 3]), || "id(3)".into())?;
    let c = apply(&fc, &compose, &[vec![2, 1].into(), vec![3, 3, 1].into()])?;
    ensure(c == Value::from(vec![3, 3]), || format!("compose gave {c}"))?;
    let neg = fc.coerce(&ob, &Value::Int(-1), &[]).err().map(|e| e.to_string()).unwrap_or_default();
    ensure(neg.contains("expected nonnegative integer"), || format!("Ob(-1) gave {neg:?}"))?;
    let len = fc
        .coerce(&hom, &vec![1, 1].into(), &[3.into(), 2.into()])
        .err()
        .map(|e| e.to_string())
        .unwrap_or_default();
    ensure(len.contains("length of morphism does not match domain"), || format!("bad Hom gave {len:?}"))
}

fn homs(m: &Model, hom: &Ident, a: i64, b: i64) -> Vec<Value> {
    (m.enumerator(hom).expect("Hom enumerator"))(&[a.into(), b.into()])
}

fn criterion_6() -> Outcome {
    let mon = theory("ThMonoid");
    let (dot, e) = (sym(mon, "⋅"), sym(mon, "e"));
    let nat = nat_arith_native(theory("ThArith")).map_err(|e| e.to_string())?;
    let migrated = migrate_model(map("PlusM"), &nat).map_err(|e| e.to_string())?;
    let ip = int_plus_monoid(mon).map_err(|e| e.to_string())?;
    ensure(apply(&migrated, &e, &[])? == apply(&ip, &e, &[])?, || "e()".into())?;
    for a in 0..50i64 {
        for b in 0..50i64 {
            let (x, y) = (apply(&migrated, &dot, &[a.into(), b.into()])?, apply(&ip, &dot, &[a.into(), b.into()])?);
            ensure(x == y, || format!("{a}⋅{b}: {x} vs {y}"))?;
        }
    }

    let cat = theory("ThCategory");
    let (compose, hom, id) = (sym(cat, "compose"), sym(cat, "Hom"), sym(cat, "id"));
    let fc = finset_c(cat).map_err(|e| e.to_string())?;
    let op = migrate_model(map("OpCat"), &fc).map_err(|e| e.to_string())?;
    for a in 0..=3i64 {
        ensure(apply(&op, &id, &[a.into()])? == apply(&fc, &id, &[a.into()])?, || format!("id({a})"))?;
        for b in 0..=3i64 {
            for c in 0..=3i64 {
                // f: a → b and g: b → c in the opposite category
                for f in homs(&fc, &hom, b, a) {
                    for g in homs(&fc, &hom, c, b) {
                        let x = apply(&op, &compose, &[f.clone(), g.clone()])?;
                        let y = apply(&fc, &compose, &[g.clone(), f.clone()])?;
                        ensure(x == y, || format!("op compose({f}, {g}): {x} vs {y}"))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn all_hold(m: &Model, enums: &Enumerators, want_proved: bool) -> Outcome {
    let report = check_axioms(m, enums, None);
    for r in &report.results {
        let ok = match &r.status {
            AxiomStatus::Proved { .. } => true,
            AxiomStatus::Holds { exhaustive, .. } => *exhaustive && !want_proved,
            _ => false,
        };
        ensure(ok, || format!("{}: {} is {:?}", m.name(), r.name, r.status))?;
    }
    ensure(!report.results.is_empty(), || "no axioms checked".into())
}

fn criterion_7() -> Outcome {
    let mon = theory("ThMonoid");
    let mut enums = Enumerators::new();
    enums.insert(sym(mon, "default"), int_range(0, 6));
    all_hold(&modular_plus_monoid(mon, 7).map_err(|e| e.to_string())?, &enums, false)?;

    let cat = theory("ThCategory");
    let mut obs = Enumerators::new();
    obs.insert(sym(cat, "Ob"), int_range(0, 3));
    let fc = finset_c(cat).map_err(|e| e.to_string())?;
    all_hold(&fc, &obs, false)?;
    // slice objects are maps into 2 from base objects of size ≤ 3
    let slice = slice_c(&fc, Value::Int(2)).map_err(|e| e.to_string())?;
    all_hold(&slice, &Enumerators::new(), false)?;
    let free = free_category(cat).map_err(|e| e.to_string())?;
    all_hold(&free, &Enumerators::new(), true)
}

/// Random monoid terms over `n` variables.
#[derive(Clone, Debug)]
enum Shape {
    Var(usize),
    Unit,
    Op(Box<Shape>, Box<Shape>),
}

fn shape() -> impl Strategy<Value = Shape> {
    let leaf = prop_oneof![4 => (0usize..8).prop_map(Shape::Var), 1 => Just(Shape::Unit)];
    leaf.prop_recursive(5, 32, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Shape::Op(Box::new(l), Box::new(r)))
    })
}

fn build(s: &Shape, ctx: &TypeCtx, dot: &Ident, e: &Ident) -> AlgTerm {
    match s {
        Shape::Var(i) => AlgTerm::Var(ctx.var(i % ctx.len() + 1)),
        Shape::Unit => AlgTerm::app(e.clone(), vec![]),
        Shape::Op(l, r) => AlgTerm::app(dot.clone(), vec![build(l, ctx, dot, e), build(r, ctx, dot, e)]),
    }
}

fn monoid_ctx(names: &[&str]) -> TypeCtx {
    let mon = theory("ThMonoid");
    let d = gatkit::gat::AlgType::constant(sym(mon, "default"));
    let mut ctx = TypeCtx::new();
    for n in names {
        ctx.push(*n, d.clone()).unwrap();
    }
    ctx
}

fn occurrences(t: &AlgTerm, v: &Ident) -> usize {
    match t {
        AlgTerm::Var(x) => usize::from(x == v),
        AlgTerm::App(_, args) => args.iter().map(|a| occurrences(a, v)).sum(),
    }
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases: 1000, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn criterion_8() -> Outcome {
    let mon = theory("ThMonoid");
    let (dot, e) = (sym(mon, "⋅"), sym(mon, "e"));
    // every context uses the same display names, in different orders
    let src = monoid_ctx(&["x", "y", "z"]);
    let mid = monoid_ctx(&["z", "x", "y"]);
    let dst = monoid_ctx(&["y", "z", "x"]);

    let strategy = (shape(), proptest::collection::vec(shape(), 3), proptest::collection::vec(shape(), 3));
    runner()
        .run(&strategy, |(t, s1, s2)| {
            let t = TermInCtx::new(src.clone(), build(&t, &src, &dot, &e));
            let env1: HashMap<Ident, AlgTerm> =
                src.vars().zip(&s1).map(|(v, s)| (v, build(s, &mid, &dot, &e))).collect();
            let env2: HashMap<Ident, AlgTerm> =
                mid.vars().zip(&s2).map(|(v, s)| (v, build(s, &dst, &dot, &e))).collect();

            let once = substitute(mon, &t, &env1, &mid).map_err(|e| TestCaseError::fail(e.to_string()))?;
            // no capture: only `mid` variables remain, each as often as the images say
            prop_assert!(once.vars().iter().all(|v| mid.has_var(v)));
            for w in mid.vars() {
                let expected: usize = src.vars().map(|v| occurrences(&t.term, &v) * occurrences(&env1[&v], &w)).sum();
                prop_assert_eq!(occurrences(&once, &w), expected);
            }
            let twice = substitute(mon, &TermInCtx::new(mid.clone(), once), &env2, &dst)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let composed = substitute(mon, &t, &compose_env(&env1, &env2), &dst)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(twice, composed);
            Ok(())
        })
        .map_err(|e| format!("substitution: {e}"))?;

    let pairs = [
        (map("OpMonoid"), map("PlusM")),
        (map("OpMonoid"), map("OpMonoid")),
        (map("OpMonoid"), map("TimesM")),
    ];
    for (f, g) in pairs {
        let gf = compose_maps(f, g).map_err(|e| e.to_string())?;
        runner()
            .run(&shape(), |s| {
                let t = TermInCtx::new(src.clone(), build(&s, &src, &dot, &e));
                let direct = gf.pushforward_term(&t).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let stepwise = f
                    .pushforward_term(&t)
                    .and_then(|u| g.pushforward_term(&u))
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert!(alpha_equal(&direct, &stepwise));
                Ok(())
            })
            .map_err(|e| format!("functoriality of {}: {e}", gf.name()))?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let renames = |to: &str| -> IndexMap<String, String> { [("default".to_string(), to.to_string())].into_iter().collect() };
    let (ring, _) = rename_theory(theory("ThRing"), &renames("Scalar")).map_err(|e| err(&e))?;
    let (group, _) = rename_theory(theory("ThAdditiveAbelianGroup"), &renames("Vector")).map_err(|e| err(&e))?;
    let empty = theory("ThEmpty");
    let (l, r) = (
        inclusion_map(empty, &ring).map_err(|e| err(&e))?,
        inclusion_map(empty, &group).map_err(|e| err(&e))?,
    );
    let p = pushout_simple(&l, &r).map_err(|e| err(&e))?;

    let mut reg = Registry::new();
    reg.insert_theory(p.theory.clone().with_name("ScalarsAndVectors")).map_err(|e| err(&e))?;
    let module_body = "theory ThModule extends ScalarsAndVectors {
      (α ⋅ v)::Vector ⊣ [α::Scalar, v::Vector]
      act_plus := α ⋅ (u + v) == (α ⋅ u) + (α ⋅ v) ⊣ [α::Scalar, (u, v)::Vector]
      plus_act := (α + β) ⋅ v == (α ⋅ v) + (β ⋅ v) ⊣ [(α, β)::Scalar, v::Vector]
      times_act := (α * β) ⋅ v == α ⋅ (β ⋅ v) ⊣ [(α, β)::Scalar, v::Vector]
      one_act := one() ⋅ v == v ⊣ [v::Vector]
    }";
    let explicit = parse_theory(module_body, &reg).map_err(|e| err(&e))?;
    ensure(alpha_equal_gat(&explicit, theory("ThModule")), || {
        format!(
            "explicit pushout differs from ThModule: {}",
            gatkit::gat::gat_difference(&explicit, theory("ThModule")).unwrap_or_default()
        )
    })?;

    // the square commutes, here over a non-trivial apex too
    for (l, r) in [
        (l, r),
        (
            inclusion_map(theory("ThSet"), theory("ThMonoid")).map_err(|e| err(&e))?,
            inclusion_map(theory("ThSet"), theory("ThAdditiveAbelianGroup")).map_err(|e| err(&e))?,
        ),
    ] {
        let p = pushout_simple(&l, &r).map_err(|e| err(&e))?;
        let via_l = compose_maps(&l, &p.left).map_err(|e| err(&e))?;
        let via_r = compose_maps(&r, &p.right).map_err(|e| err(&e))?;
        for c in l.dom().typecons().into_iter().chain(l.dom().termcons()) {
            let (a, b) = (via_l.ident_image(&c), via_r.ident_image(&c));
            ensure(a.is_some() && a == b, || format!("square does not commute at {}", c.name))?;
        }
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let cat = theory("ThCategory");
    let (compose, hom, id) = (sym(cat, "compose"), sym(cat, "Hom"), sym(cat, "id"));
    let fc = finset_c(cat).map_err(|e| e.to_string())?;
    let fib = finset_fib(cat).map_err(|e| e.to_string())?;
    let lift = |f: &Value, a: i64, b: i64| fib.coerce(&hom, f, &[a.into(), b.into()]).map_err(|e| e.to_string());
    for a in 0..=3i64 {
        let x = apply(&fib, &id, &[a.into()])?.erase();
        ensure(x == apply(&fc, &id, &[a.into()])?, || format!("id({a})"))?;
        for b in 0..=3i64 {
            for c in 0..=3i64 {
                for f in homs(&fc, &hom, a, b) {
                    for g in homs(&fc, &hom, b, c) {
                        let x = apply(&fib, &compose, &[lift(&f, a, b)?, lift(&g, b, c)?])?.erase();
                        let y = apply(&fc, &compose, &[f.clone(), g.clone()])?;
                        ensure(x == y, || format!("compose({f}, {g}): {x} vs {y}"))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("ThCategory shape; pretty and JSON round-trips", criterion_1),
        ("pushforward along PlusM and OpMonoid", criterion_2),
        ("Bad₂ diagnostics; Bad₁ unitality counterexample at x=0", criterion_3),
        ("F is a valid renaming", criterion_4),
        ("model arithmetic and FinSetC errors", criterion_5),
        ("migrated models agree with their direct counterparts", criterion_6),
        ("exhaustive axiom checks of the built-in models", criterion_7),
        ("hygiene, substitution composition, functoriality", criterion_8),
        ("ThModule as an explicit pushout; commuting squares", criterion_9),
        ("FinSetFib and FinSetC agree under erasure", criterion_10),
    ];
    let mut failed = 0;
    for (i, (what, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(()) => println!("PASS {:>2}: {what}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}: {what}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
