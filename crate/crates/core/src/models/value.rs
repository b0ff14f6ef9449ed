use std::any::Any;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::gat::AlgTerm;

/// A model-defined datum. Models that use one supply its equality.
pub trait OpaqueValue: fmt::Debug + fmt::Display + Send + Sync {
    fn as_any(&self) -> &dyn Any;
    fn eq_opaque(&self, other: &dyn OpaqueValue) -> bool;
    fn hash_opaque(&self) -> u64;
    /// The value with any bundled indices forgotten, when that makes sense.
    fn erase(&self) -> Option<Value> {
        None
    }
}

/// The dynamic value universe shared by all models.
#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    IntList(Vec<i64>),
    Text(String),
    Pair(Box<Value>, Box<Value>),
    /// A term over a free model's generators, kept in normal form.
    Symbolic(AlgTerm),
    Opaque(Arc<dyn OpaqueValue>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn opaque(v: impl OpaqueValue + 'static) -> Value {
        Value::Opaque(Arc::new(v))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[i64]> {
        match self {
            Value::IntList(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_term(&self) -> Option<&AlgTerm> {
        match self {
            Value::Symbolic(t) => Some(t),
            _ => None,
        }
    }

    pub fn downcast<T: 'static>(&self) -> Option<&T> {
        match self {
            Value::Opaque(o) => o.as_any().downcast_ref(),
            _ => None,
        }
    }

    /// Forgets indices carried inside opaque values, recursively.
    pub fn erase(&self) -> Value {
        match self {
            Value::Opaque(o) => o.erase().unwrap_or_else(|| self.clone()),
            Value::Pair(a, b) => Value::pair(a.erase(), b.erase()),
            other => other.clone(),
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::IntList(_) => "integer list",
            Value::Text(_) => "text",
            Value::Pair(..) => "pair",
            Value::Symbolic(_) => "symbolic term",
            Value::Opaque(_) => "opaque value",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Value::Int(n) => json!(n),
            Value::IntList(xs) => json!(xs),
            Value::Text(s) => json!(s),
            Value::Pair(a, b) => json!({ "pair": [a.to_json(), b.to_json()] }),
            Value::Symbolic(t) => json!({ "term": t.to_string() }),
            Value::Opaque(o) => json!({ "opaque": o.to_string() }),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::IntList(a), Value::IntList(b)) => a == b,
            (Value::Text(a), Value::Text(b)) => a == b,
            (Value::Pair(a, b), Value::Pair(c, d)) => a == c && b == d,
            (Value::Symbolic(a), Value::Symbolic(b)) => a == b,
            (Value::Opaque(a), Value::Opaque(b)) => a.eq_opaque(b.as_ref()),
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Value::Int(n) => n.hash(state),
            Value::IntList(xs) => xs.hash(state),
            Value::Text(s) => s.hash(state),
            Value::Pair(a, b) => {
                a.hash(state);
                b.hash(state);
            }
            Value::Symbolic(t) => t.hash(state),
            Value::Opaque(o) => o.hash_opaque().hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::IntList(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
            Value::Text(s) => write!(f, "{s:?}"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Symbolic(t) => write!(f, "{t}"),
            Value::Opaque(o) => write!(f, "{o}"),
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Value {
        Value::Int(n)
    }
}

impl From<Vec<i64>> for Value {
    fn from(xs: Vec<i64>) -> Value {
        Value::IntList(xs)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Value {
        Value::Text(s.to_string())
    }
}

/// What values of a carrier look like, for reading literals.
#[derive(Clone, Debug, PartialEq)]
pub enum CarrierKind {
    Int,
    IntList,
    Text,
    Pair(Box<CarrierKind>, Box<CarrierKind>),
    Symbolic,
    Opaque(String),
}

/// Reads a command-line literal for a carrier: integers bare, lists as
/// `[1,2,3]`, text quoted or bare, pairs as `(a, b)`.
pub fn parse_literal(kind: &CarrierKind, text: &str) -> Result<Value, String> {
    let s = text.trim();
    match kind {
        CarrierKind::Int => s
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| format!("expected an integer, found {s:?}")),
        CarrierKind::IntList => {
            let inner = s
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| format!("expected a list like [1,2,3], found {s:?}"))?;
            if inner.trim().is_empty() {
                return Ok(Value::IntList(vec![]));
            }
            inner
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad list entry {x:?}")))
                .collect::<Result<Vec<_>, _>>()
                .map(Value::IntList)
        }
        CarrierKind::Text => Ok(Value::Text(
            match s.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
                Some(inner) => inner.to_string(),
                None => s.to_string(),
            },
        )),
        CarrierKind::Pair(a, b) => {
            let inner = s
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| format!("expected a pair like (a, b), found {s:?}"))?;
            let split = top_level_comma(inner).ok_or_else(|| format!("expected a pair, found {s:?}"))?;
            Ok(Value::pair(
                parse_literal(a, &inner[..split])?,
                parse_literal(b, &inner[split + 1..])?,
            ))
        }
        CarrierKind::Symbolic | CarrierKind::Opaque(_) => {
            Err(format!("literals of this carrier cannot be read here: {s:?}"))
        }
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_literal(&CarrierKind::Int, " -4 ").unwrap(), Value::Int(-4));
        assert_eq!(
            parse_literal(&CarrierKind::IntList, "[1, 2,3]").unwrap(),
            Value::IntList(vec![1, 2, 3])
        );
        assert_eq!(parse_literal(&CarrierKind::IntList, "[]").unwrap(), Value::IntList(vec![]));
        assert_eq!(parse_literal(&CarrierKind::Text, "\"ab\"").unwrap(), Value::from("ab"));
        assert_eq!(parse_literal(&CarrierKind::Text, "a").unwrap(), Value::from("a"));
        let pair = CarrierKind::Pair(Box::new(CarrierKind::Int), Box::new(CarrierKind::IntList));
        assert_eq!(
            parse_literal(&pair, "(2, [1,2])").unwrap(),
            Value::pair(Value::Int(2), Value::IntList(vec![1, 2]))
        );
        assert!(parse_literal(&CarrierKind::Int, "x").is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Value::IntList(vec![1, 2]).to_string(), "[1, 2]");
        assert_eq!(Value::from("ab").to_string(), "\"ab\"");
    }
}
