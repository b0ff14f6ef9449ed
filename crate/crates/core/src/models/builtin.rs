//! The built-in computational models.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use indexmap::IndexMap;

use super::free::free_model;
use super::model::{CheckError, Model, ModelBuilder, ModelError};
use super::value::{CarrierKind, OpaqueValue, Value};
use crate::gat::{AlgTerm, AlgType, Gat, TypeCtx};
use crate::surface::Registry;

/// Name, theory, and parameters of every built-in model.
pub const BUILTIN_MODELS: &[(&str, &str, &str)] = &[
    ("IntPlusMonoid", "ThMonoid", ""),
    ("TimesIntMonoid", "ThMonoid", ""),
    ("StringMonoid", "ThMonoid", ""),
    ("ModularPlusMonoid", "ThMonoid", "n (modulus, default 7)"),
    ("NatArithNative", "ThArith", ""),
    ("FinSetC", "ThCategory", ""),
    ("FinSetFib", "ThCategory", ""),
    ("SliceC", "ThCategory", "base (FinSetC or FinSetFib, default FinSetC), over (object, default 2)"),
    ("FreeCategory", "ThCategory", ""),
];

fn int(v: &Value) -> Result<i64, CheckError> {
    v.as_int()
        .ok_or_else(|| CheckError::msg(format!("expected an integer, found {}", v.variant())))
}

fn nat(v: &Value) -> Result<i64, CheckError> {
    match v.as_int() {
        Some(n) if n >= 0 => Ok(n),
        _ => Err(CheckError::msg("expected nonnegative integer")),
    }
}

fn overflow() -> CheckError {
    CheckError::msg("integer overflow")
}

fn int_monoid(
    name: &str,
    th: &Gat,
    unit: i64,
    op: fn(i64, i64) -> Option<i64>,
) -> Result<Model, ModelError> {
    ModelBuilder::new(name, th)
        .carrier("default", CarrierKind::Int)
        .coerce("default", |v, _| int(v).map(Value::Int))
        .op("e", move |_| Ok(Value::Int(unit)))
        .op("⋅", move |a| {
            op(int(&a[0])?, int(&a[1])?).map(Value::Int).ok_or_else(overflow)
        })
        .enumerate("default", |_| (-4..=4).map(Value::Int).collect())
        .build()
}

/// Integers under addition: `e() = 0`, `x⋅y = x + y`.
pub fn int_plus_monoid(th_monoid: &Gat) -> Result<Model, ModelError> {
    int_monoid("IntPlusMonoid", th_monoid, 0, i64::checked_add)
}

/// Integers under multiplication: `e() = 1`, `x⋅y = x * y`.
pub fn times_int_monoid(th_monoid: &Gat) -> Result<Model, ModelError> {
    int_monoid("TimesIntMonoid", th_monoid, 1, i64::checked_mul)
}

/// Strings under concatenation.
pub fn string_monoid(th_monoid: &Gat) -> Result<Model, ModelError> {
    let text = |v: &Value| {
        v.as_text()
            .map(str::to_string)
            .ok_or_else(|| CheckError::msg(format!("expected text, found {}", v.variant())))
    };
    ModelBuilder::new("StringMonoid", th_monoid)
        .carrier("default", CarrierKind::Text)
        .coerce("default", move |v, _| text(v).map(Value::Text))
        .op("e", |_| Ok(Value::from("")))
        .op("⋅", move |a| Ok(Value::Text(text(&a[0])? + &text(&a[1])?)))
        .enumerate("default", |_| ["", "a", "b", "ab"].into_iter().map(Value::from).collect())
        .build()
}

/// Integers modulo `n`. Coercion reduces into `0..n`, so any integer is
/// accepted and canonicalized.
pub fn modular_plus_monoid(th_monoid: &Gat, n: i64) -> Result<Model, ModelError> {
    if n <= 0 {
        return Err(ModelError::Other(format!("modulus must be positive, got {n}")));
    }
    ModelBuilder::new("ModularPlusMonoid", th_monoid)
        .param("n", n)
        .carrier("default", CarrierKind::Int)
        .coerce("default", move |v, _| Ok(Value::Int(int(v)?.rem_euclid(n))))
        .op("e", |_| Ok(Value::Int(0)))
        .op("⋅", move |a| Ok(Value::Int((int(&a[0])? + int(&a[1])?).rem_euclid(n))))
        .enumerate("default", move |_| (0..n).map(Value::Int).collect())
        .build()
}

/// Natural-number arithmetic on machine integers.
pub fn nat_arith_native(th_arith: &Gat) -> Result<Model, ModelError> {
    ModelBuilder::new("NatArithNative", th_arith)
        .carrier("ℕ", CarrierKind::Int)
        .coerce("ℕ", |v, _| nat(v).map(Value::Int))
        .op("Z", |_| Ok(Value::Int(0)))
        .op("S", |a| nat(&a[0])?.checked_add(1).map(Value::Int).ok_or_else(overflow))
        .op("+", |a| nat(&a[0])?.checked_add(nat(&a[1])?).map(Value::Int).ok_or_else(overflow))
        .op("*", |a| nat(&a[0])?.checked_mul(nat(&a[1])?).map(Value::Int).ok_or_else(overflow))
        .enumerate("ℕ", |_| (0..=20).map(Value::Int).collect())
        .build()
}

/// Every function `{1..n} → {1..m}` as a list of values.
fn functions(n: i64, m: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                (1..=m).map(move |x| {
                    let mut f = f.clone();
                    f.push(x);
                    f
                })
            })
            .collect();
    }
    out
}

fn check_function(f: &[i64], n: i64, m: i64) -> Result<(), CheckError> {
    if f.len() as i64 != n {
        return Err(CheckError::msg(format!(
            "length of morphism does not match domain: {} != {n}",
            f.len()
        )));
    }
    for (i, x) in f.iter().enumerate() {
        if !(1..=m).contains(x) {
            return Err(CheckError::msg(format!("index not in codomain: {}", i + 1)));
        }
    }
    Ok(())
}

/// `g[f]`: first `f`, then `g`.
fn compose_lists(f: &[i64], g: &[i64]) -> Result<Vec<i64>, CheckError> {
    f.iter()
        .map(|&i| {
            usize::try_from(i - 1)
                .ok()
                .and_then(|k| g.get(k).copied())
                .ok_or_else(|| CheckError::msg(format!("index {i} out of range for a morphism of length {}", g.len())))
        })
        .collect()
}

const MAX_OB: i64 = 3;

/// Finite sets and functions, indexed style: objects are sizes and
/// morphisms are plain lists of 1-based values; the dependent type
/// `Hom(n, m)` is a check, not part of the value.
pub fn finset_c(th_category: &Gat) -> Result<Model, ModelError> {
    let list = |v: &Value| {
        v.as_list()
            .map(<[i64]>::to_vec)
            .ok_or_else(|| CheckError::msg(format!("expected a list of integers, found {}", v.variant())))
    };
    ModelBuilder::new("FinSetC", th_category)
        .carrier("Ob", CarrierKind::Int)
        .carrier("Hom", CarrierKind::IntList)
        .coerce("Ob", |v, _| nat(v).map(Value::Int))
        .coerce("Hom", move |v, args| {
            let f = list(v)?;
            check_function(&f, int(&args[0])?, int(&args[1])?)?;
            Ok(Value::IntList(f))
        })
        .op("id", |a| Ok(Value::IntList((1..=nat(&a[0])?).collect())))
        .op("compose", move |a| Ok(Value::IntList(compose_lists(&list(&a[0])?, &list(&a[1])?)?)))
        .enumerate("Ob", |_| (0..=MAX_OB).map(Value::Int).collect())
        .enumerate("Hom", |args| match (args[0].as_int(), args[1].as_int()) {
            (Some(n), Some(m)) if n >= 0 && m >= 0 => functions(n, m).into_iter().map(Value::IntList).collect(),
            _ => vec![],
        })
        .build()
}

/// A function between finite sets that carries its domain and codomain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinFunction {
    pub values: Vec<i64>,
    pub dom: i64,
    pub codom: i64,
}

impl fmt::Display for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} → {}", Value::IntList(self.values.clone()), self.dom, self.codom)
    }
}

impl OpaqueValue for FinFunction {
    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn eq_opaque(&self, other: &dyn OpaqueValue) -> bool {
        other.as_any().downcast_ref::<FinFunction>() == Some(self)
    }

    fn hash_opaque(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    fn erase(&self) -> Option<Value> {
        Some(Value::IntList(self.values.clone()))
    }
}

/// Finite sets and functions, fibered style: a morphism value knows its
/// domain and codomain. A plain list is accepted by the coercion and
/// wrapped using the expected indices.
pub fn finset_fib(th_category: &Gat) -> Result<Model, ModelError> {
    let fun = |v: &Value| {
        v.downcast::<FinFunction>()
            .cloned()
            .ok_or_else(|| CheckError::msg(format!("expected a finite function, found {}", v.variant())))
    };
    ModelBuilder::new("FinSetFib", th_category)
        .carrier("Ob", CarrierKind::Int)
        .carrier("Hom", CarrierKind::IntList)
        .coerce("Ob", |v, _| nat(v).map(Value::Int))
        .coerce("Hom", move |v, args| {
            let (n, m) = (int(&args[0])?, int(&args[1])?);
            let f = match v {
                Value::IntList(values) => FinFunction {
                    values: values.clone(),
                    dom: n,
                    codom: m,
                },
                other => fun(other)?,
            };
            if f.dom != n || f.codom != m {
                return Err(CheckError::msg(format!(
                    "expected a morphism {n} → {m}, found one {} → {}",
                    f.dom, f.codom
                )));
            }
            check_function(&f.values, n, m)?;
            Ok(Value::opaque(f))
        })
        .op("id", |a| {
            let n = nat(&a[0])?;
            Ok(Value::opaque(FinFunction {
                values: (1..=n).collect(),
                dom: n,
                codom: n,
            }))
        })
        .op("compose", move |a| {
            let (f, g) = (fun(&a[0])?, fun(&a[1])?);
            if f.codom != g.dom {
                return Err(CheckError::msg("domain and codomain do not match"));
            }
            Ok(Value::opaque(FinFunction {
                values: compose_lists(&f.values, &g.values)?,
                dom: f.dom,
                codom: g.codom,
            }))
        })
        .enumerate("Ob", |_| (0..=MAX_OB).map(Value::Int).collect())
        .enumerate("Hom", |args| match (args[0].as_int(), args[1].as_int()) {
            (Some(n), Some(m)) if n >= 0 && m >= 0 => functions(n, m)
                .into_iter()
                .map(|values| Value::opaque(FinFunction { values, dom: n, codom: m }))
                .collect(),
            _ => vec![],
        })
        .build()
}

/// The slice of a category model over one of its objects. Objects are
/// pairs `(ob, hom)` with `hom: ob → over`; morphisms are base morphisms
/// making the triangle commute.
pub fn slice_c(base: &Model, over: Value) -> Result<Model, ModelError> {
    let th = base.theory().clone();
    let id_of = |s: &str| {
        th.resolve_symbol(s, None)
            .map_err(|e| ModelError::Other(format!("SliceC needs {s} in its base theory: {e}")))
    };
    let (ob, hom, compose) = (id_of("Ob")?, id_of("Hom")?, id_of("compose")?);
    let over = base
        .coerce(&ob, &over, &[])
        .map_err(|e| ModelError::Other(format!("SliceC: invalid object to slice over: {e}")))?;
    let base = Arc::new(base.clone());
    let name = format!("SliceC({}, {over})", base.name());
    let pair = |v: &Value| {
        v.as_pair()
            .map(|(a, b)| (a.clone(), b.clone()))
            .ok_or_else(|| CheckError::msg(format!("expected a slice object (ob, hom), found {}", v.variant())))
    };

    let (b1, b2, b3, b4, b5) = (base.clone(), base.clone(), base.clone(), base.clone(), base.clone());
    let (ob1, hom1, hom2, ob3, hom3) = (ob.clone(), hom.clone(), hom.clone(), ob.clone(), hom.clone());
    let (c1, c2) = (compose.clone(), compose.clone());
    let (over1, over3) = (over.clone(), over.clone());
    let base_carrier = |id| base.carrier(id).cloned().unwrap_or(CarrierKind::Opaque("base".into()));

    ModelBuilder::new(name, &th)
        .param("base", Value::from(base.name()))
        .param("over", over.clone())
        .carrier_id(
            ob.clone(),
            CarrierKind::Pair(Box::new(base_carrier(&ob)), Box::new(base_carrier(&hom))),
        )
        .carrier_id(hom.clone(), base_carrier(&hom))
        .coerce_id(
            ob.clone(),
            Arc::new(move |v, _| {
                let (x, h) = pair(v)?;
                let x = b1
                    .coerce(&ob1, &x, &[])
                    .map_err(|e| CheckError::msg("ob is not valid").caused_by(e))?;
                let h = b1
                    .coerce(&hom1, &h, &[x.clone(), over1.clone()])
                    .map_err(|e| CheckError::msg("hom is not valid").caused_by(e))?;
                Ok(Value::pair(x, h))
            }),
        )
        .coerce_id(
            hom.clone(),
            Arc::new(move |f, args| {
                let (x, y) = (pair(&args[0])?, pair(&args[1])?);
                let f = b2
                    .coerce(&hom2, f, &[x.0.clone(), y.0.clone()])
                    .map_err(|e| CheckError::msg("morphism is not valid in base category").caused_by(e))?;
                let tri = b2
                    .apply(&c1, &[f.clone(), y.1.clone()])
                    .map_err(|e| CheckError::msg(e.to_string()))?;
                if tri != x.1 {
                    return Err(CheckError::msg("commutativity of triangle does not hold"));
                }
                Ok(f)
            }),
        )
        .op("id", move |a| {
            let (x, _) = pair(&a[0])?;
            b4.apply(&b4.theory().resolve_symbol("id", None).map_err(|e| CheckError::msg(e.to_string()))?, &[x])
                .map_err(|e| CheckError::msg(e.to_string()))
        })
        .op_id(
            compose,
            Arc::new(move |a| b5.apply(&c2, a).map_err(|e| CheckError::msg(e.to_string()))),
        )
        .enumerate_id(
            ob,
            Arc::new(move |_| {
                let none = Default::default();
                let obs = super::check::candidates(&b3, &none, &ob3, &[]).unwrap_or_default();
                obs.into_iter()
                    .flat_map(|x| {
                        super::check::candidates(&b3, &none, &hom3, &[x.clone(), over3.clone()])
                            .unwrap_or_default()
                            .into_iter()
                            .map(move |h| Value::pair(x.clone(), h))
                    })
                    .collect()
            }),
        )
        .enumerate_id(
            hom.clone(),
            Arc::new(move |args| {
                let (Some((x, _)), Some((y, _))) = (args[0].as_pair(), args[1].as_pair()) else {
                    return vec![];
                };
                let none = Default::default();
                super::check::candidates(&base, &none, &hom, &[x.clone(), y.clone()]).unwrap_or_default()
            }),
        )
        .build()
}

/// The free category on objects `A`, `B` and morphisms `f: A → B`,
/// `g: B → A`, normalized by associativity and unit laws.
pub fn free_category(th_category: &Gat) -> Result<Model, ModelError> {
    let id_of = |s: &str| th_category.resolve_symbol(s, None).map_err(|e| ModelError::Other(e.to_string()));
    let (ob, hom) = (id_of("Ob")?, id_of("Hom")?);
    let mut gens = TypeCtx::new();
    let err = |e: crate::scopes::ScopeError| ModelError::Other(e.to_string());
    let a = gens.push("A", AlgType::constant(ob.clone())).map_err(err)?;
    let b = gens.push("B", AlgType::constant(ob)).map_err(err)?;
    let (va, vb) = (AlgTerm::Var(a), AlgTerm::Var(b));
    gens.push("f", AlgType::new(hom.clone(), vec![va.clone(), vb.clone()])).map_err(err)?;
    gens.push("g", AlgType::new(hom, vec![vb, va])).map_err(err)?;
    free_model("FreeCategory", th_category, gens, th_category.policy().clone(), true)
}

fn theory<'r>(reg: &'r Registry, name: &str) -> Result<&'r Gat, ModelError> {
    reg.theory(name)
        .ok_or_else(|| ModelError::Other(format!("theory {name} is not loaded")))
}

/// Builds a built-in model by name, with its theory taken from `reg`.
/// Parameters are given as text (`n=7`, `over=2`).
pub fn builtin_model(name: &str, params: &IndexMap<String, String>, reg: &Registry) -> Result<Model, ModelError> {
    let known: Vec<&str> = match name {
        "ModularPlusMonoid" => vec!["n"],
        "SliceC" => vec!["base", "over"],
        _ => vec![],
    };
    if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(ModelError::Other(format!("{name} has no parameter {k}")));
    }
    match name {
        "IntPlusMonoid" => int_plus_monoid(theory(reg, "ThMonoid")?),
        "TimesIntMonoid" => times_int_monoid(theory(reg, "ThMonoid")?),
        "StringMonoid" => string_monoid(theory(reg, "ThMonoid")?),
        "ModularPlusMonoid" => {
            let n = match params.get("n") {
                Some(s) => s
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| ModelError::BadLiteral(format!("n must be an integer, found {s:?}")))?,
                None => 7,
            };
            modular_plus_monoid(theory(reg, "ThMonoid")?, n)
        }
        "NatArithNative" => nat_arith_native(theory(reg, "ThArith")?),
        "FinSetC" => finset_c(theory(reg, "ThCategory")?),
        "FinSetFib" => finset_fib(theory(reg, "ThCategory")?),
        "SliceC" => {
            let base_name = params.get("base").map(String::as_str).unwrap_or("FinSetC");
            if !matches!(base_name, "FinSetC" | "FinSetFib") {
                return Err(ModelError::Other(format!("SliceC base must be FinSetC or FinSetFib, not {base_name}")));
            }
            let base = builtin_model(base_name, &IndexMap::new(), reg)?;
            let ob = base.theory().resolve_symbol("Ob", None).map_err(|e| ModelError::Other(e.to_string()))?;
            let over = match params.get("over") {
                Some(s) => base.parse_value(&ob, s)?,
                None => Value::Int(2),
            };
            slice_c(&base, over)
        }
        "FreeCategory" => free_category(theory(reg, "ThCategory")?),
        other => Err(ModelError::Other(format!("unknown model {other}"))),
    }
}
