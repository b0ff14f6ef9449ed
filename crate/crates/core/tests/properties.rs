//! Properties of random terms: printing, JSON, evaluation, normalization
//! and pushforward agree with a direct reading of the same expression.

use std::collections::HashMap;

use proptest::prelude::*;

use gatkit::gat::{alpha_equal, equal_upto_norm, infer_type, TermInCtx, TypeInCtx};
use gatkit::models::{finset_c, int_plus_monoid, nat_arith_native, string_monoid, Model, Value};
use gatkit::scopes::Ident;
use gatkit::stdlib::{stdlib, theory};
use gatkit::surface::{
    parse_term, parse_term_in, pretty_term_in_ctx, pretty_type_in_ctx, term_from_json, term_to_json,
};

const VARS: [&str; 3] = ["x", "y", "z"];

/// A monoid expression, independent of the library's term representation.
#[derive(Clone, Debug)]
enum M {
    Var(usize),
    Unit,
    Op(Box<M>, Box<M>),
}

impl M {
    fn render(&self) -> String {
        match self {
            M::Var(i) => VARS[*i].to_string(),
            M::Unit => "e()".to_string(),
            M::Op(l, r) => format!("({}⋅{})", l.render(), r.render()),
        }
    }

    fn leaves(&self, out: &mut Vec<usize>) {
        match self {
            M::Var(i) => out.push(*i),
            M::Unit => {}
            M::Op(l, r) => {
                l.leaves(out);
                r.leaves(out);
            }
        }
    }

    fn sum(&self, vals: &[i64]) -> i64 {
        let mut ls = Vec::new();
        self.leaves(&mut ls);
        ls.iter().map(|i| vals[*i]).sum()
    }

    fn concat(&self, vals: &[String]) -> String {
        let mut ls = Vec::new();
        self.leaves(&mut ls);
        ls.iter().map(|i| vals[*i].as_str()).collect()
    }
}

fn monoid_expr() -> impl Strategy<Value = M> {
    let leaf = prop_oneof![4 => (0..3usize).prop_map(M::Var), 1 => Just(M::Unit)];
    leaf.prop_recursive(6, 48, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| M::Op(Box::new(l), Box::new(r)))
    })
}

fn parse_monoid(m: &M) -> TermInCtx {
    let src = format!("{} ⊣ [x, y, z]", m.render());
    parse_term(theory("ThMonoid"), &src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn env(t: &TermInCtx, vals: Vec<Value>) -> HashMap<Ident, Value> {
    t.ctx.entries().map(|(v, _)| v).zip(vals).collect()
}

fn eval(model: &Model, t: &TermInCtx, vals: Vec<Value>) -> Value {
    model.eval_term(&env(t, vals), &t.term).unwrap()
}

fn words() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec("[a-c]{0,3}", 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pretty_output_reparses(m in monoid_expr()) {
        let t = parse_monoid(&m);
        let g = theory("ThMonoid");
        let text = pretty_term_in_ctx(g, &t);
        let back = parse_term(g, &text).unwrap();
        prop_assert!(alpha_equal(&t, &back), "{} vs {}", text, pretty_term_in_ctx(g, &back));
        prop_assert_eq!(pretty_term_in_ctx(g, &back), text);
    }

    #[test]
    fn json_terms_round_trip(m in monoid_expr()) {
        let g = theory("ThMonoid");
        let t = parse_monoid(&m);
        let doc = term_to_json(g, &t);
        let (g2, t2) = term_from_json(&doc).unwrap();
        prop_assert_eq!(pretty_term_in_ctx(&g2, &t2), pretty_term_in_ctx(g, &t));
        prop_assert_eq!(term_to_json(&g2, &t2), doc);
    }

    #[test]
    fn evaluation_matches_direct_reading(m in monoid_expr(), xs in proptest::collection::vec(-1000i64..1000, 3), ws in words()) {
        let t = parse_monoid(&m);
        let plus = int_plus_monoid(theory("ThMonoid")).unwrap();
        prop_assert_eq!(eval(&plus, &t, xs.iter().map(|x| Value::Int(*x)).collect()), Value::Int(m.sum(&xs)));
        let strings = string_monoid(theory("ThMonoid")).unwrap();
        let got = eval(&strings, &t, ws.iter().map(|w| Value::Text(w.clone())).collect());
        prop_assert_eq!(got, Value::Text(m.concat(&ws)));
    }

    /// Normalization is sound in a non-commutative model, and identifies
    /// exactly the expressions with the same sequence of variables.
    #[test]
    fn normalization_is_flattening(a in monoid_expr(), b in monoid_expr(), ws in words()) {
        let g = theory("ThMonoid");
        let ta = parse_monoid(&a);
        let n = g.policy().normalize(&ta.term);
        let strings = string_monoid(g).unwrap();
        let vals: Vec<Value> = ws.iter().map(|w| Value::Text(w.clone())).collect();
        let normalized = TermInCtx::new(ta.ctx.clone(), n);
        prop_assert_eq!(eval(&strings, &normalized, vals.clone()), eval(&strings, &ta, vals));

        let tb = parse_term_in(g, &ta.ctx, &b.render()).unwrap();
        let (mut la, mut lb) = (Vec::new(), Vec::new());
        a.leaves(&mut la);
        b.leaves(&mut lb);
        let same = equal_upto_norm(g, &ta.ctx, &ta.term, &tb, g.policy());
        prop_assert_eq!(same, la == lb, "{} vs {}", a.render(), b.render());
    }

    #[test]
    fn op_monoid_is_an_involution(m in monoid_expr(), ws in words()) {
        let op = stdlib().map("OpMonoid").unwrap();
        let t = parse_monoid(&m);
        let once = op.pushforward_term(&t).unwrap();
        let twice = op.pushforward_term(&once).unwrap();
        prop_assert!(alpha_equal(&t, &twice));
        // in the string monoid, the opposite concatenates in reverse
        let strings = string_monoid(theory("ThMonoid")).unwrap();
        let vals: Vec<Value> = ws.iter().map(|w| Value::Text(w.clone())).collect();
        let mut ls = Vec::new();
        m.leaves(&mut ls);
        let reversed: String = ls.iter().rev().map(|i| ws[*i].as_str()).collect();
        prop_assert_eq!(eval(&strings, &once, vals), Value::Text(reversed));
    }

    #[test]
    fn plus_m_agrees_with_integer_addition(m in monoid_expr(), xs in proptest::collection::vec(0i64..1000, 3)) {
        let plus_m = stdlib().map("PlusM").unwrap();
        let t = parse_monoid(&m);
        let pushed = plus_m.pushforward_term(&t).unwrap();
        let nat = nat_arith_native(theory("ThArith")).unwrap();
        let got = eval(&nat, &pushed, xs.iter().map(|x| Value::Int(*x)).collect());
        prop_assert_eq!(got, Value::Int(m.sum(&xs)));
    }
}

/// A bracketing of the composable path `f1, ..., fn`.
#[derive(Clone, Debug)]
enum P {
    Arrow(usize),
    Compose(Box<P>, Box<P>),
}

fn bracketing(lo: usize, hi: usize) -> BoxedStrategy<P> {
    if hi - lo == 1 {
        return Just(P::Arrow(lo)).boxed();
    }
    ((lo + 1)..hi)
        .prop_flat_map(move |mid| {
            (bracketing(lo, mid), bracketing(mid, hi)).prop_map(|(l, r)| P::Compose(Box::new(l), Box::new(r)))
        })
        .boxed()
}

impl P {
    fn render(&self) -> String {
        match self {
            P::Arrow(i) => format!("f{}", i + 1),
            P::Compose(l, r) => format!("compose({}, {})", l.render(), r.render()),
        }
    }
}

fn path_ctx(n: usize) -> String {
    let objs: Vec<String> = (0..=n).map(|i| format!("a{i}")).collect();
    let arrows: Vec<String> = (0..n).map(|i| format!("f{}::Hom(a{i}, a{})", i + 1, i + 1)).collect();
    format!("[({})::Ob, {}]", objs.join(", "), arrows.join(", "))
}

/// Object sizes and 1-based functions between them.
fn finset_path(n: usize) -> impl Strategy<Value = (Vec<i64>, Vec<Vec<i64>>)> {
    proptest::collection::vec(1i64..4, n + 1).prop_flat_map(move |sizes| {
        let fs: Vec<_> = (0..n)
            .map(|i| proptest::collection::vec(1..=sizes[i + 1], sizes[i] as usize))
            .collect();
        (Just(sizes), fs)
    })
}

fn path_case() -> impl Strategy<Value = (usize, P, P, (Vec<i64>, Vec<Vec<i64>>))> {
    (1usize..6).prop_flat_map(|n| (Just(n), bracketing(0, n), bracketing(0, n), finset_path(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composites_have_the_endpoint_hom((n, p, q, (sizes, fs)) in path_case()) {
        let cat = theory("ThCategory");
        let ctx = path_ctx(n);
        let tp = parse_term(cat, &format!("{} ⊣ {ctx}", p.render())).unwrap();
        let ty = infer_type(cat, &tp.ctx, &tp.term).unwrap();
        let shown = pretty_type_in_ctx(cat, &TypeInCtx::new(tp.ctx.clone(), ty));
        let want = format!("Hom(a0, a{n})");
        prop_assert!(shown.starts_with(&want), "{shown}");

        // different bracketings evaluate alike in FinSetC, and are equal by normalization
        let tq = parse_term(cat, &format!("{} ⊣ {ctx}", q.render())).unwrap();
        let fin = finset_c(cat).unwrap();
        let vals: Vec<Value> = sizes.iter().map(|s| Value::Int(*s)).chain(fs.iter().map(|f| Value::IntList(f.clone()))).collect();
        prop_assert_eq!(eval(&fin, &tp, vals.clone()), eval(&fin, &tq, vals));
        let tq_in_p = parse_term_in(cat, &tp.ctx, &q.render()).unwrap();
        prop_assert!(equal_upto_norm(cat, &tp.ctx, &tp.term, &tq_in_p, cat.policy()));
    }
}
