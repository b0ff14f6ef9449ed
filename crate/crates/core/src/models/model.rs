use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use super::value::{parse_literal, CarrierKind, Value};
use crate::gat::{AlgTerm, Gat, NormalizationPolicy, TypeCtx};
use crate::scopes::Ident;

/// Validates (and possibly canonicalizes) a value against a type's
/// arguments.
pub type Coercion = Arc<dyn Fn(&Value, &[Value]) -> Result<Value, CheckError> + Send + Sync>;
/// Evaluates a term constructor on its explicit arguments.
pub type Operation = Arc<dyn Fn(&[Value]) -> Result<Value, CheckError> + Send + Sync>;
/// Candidate values of a type, given its arguments. Candidates are filtered
/// through the coercion, so an enumerator may over-approximate.
pub type Enumerator = Arc<dyn Fn(&[Value]) -> Vec<Value> + Send + Sync>;
/// Reads a literal of a type from text, for carriers with no generic syntax.
pub type LiteralReader = Arc<dyn Fn(&Ident, &str) -> Result<Value, String> + Send + Sync>;

/// A failed check inside a model, with where it happened and why.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckError {
    pub message: String,
    pub theory: String,
    pub model: String,
    pub operation: String,
    pub cause: Option<Box<CheckError>>,
}

impl CheckError {
    pub fn msg(message: impl Into<String>) -> CheckError {
        CheckError {
            message: message.into(),
            theory: String::new(),
            model: String::new(),
            operation: String::new(),
            cause: None,
        }
    }

    pub fn caused_by(mut self, cause: CheckError) -> CheckError {
        self.cause = Some(Box::new(cause));
        self
    }

    /// Fills in location fields that are still empty.
    pub(crate) fn located(mut self, theory: &str, model: &str, operation: &str) -> CheckError {
        if self.theory.is_empty() {
            self.theory = theory.to_string();
        }
        if self.model.is_empty() {
            self.model = model.to_string();
        }
        if self.operation.is_empty() {
            self.operation = operation.to_string();
        }
        self
    }

    /// The chain of messages, outermost first.
    pub fn chain(&self) -> Vec<&str> {
        let mut out = vec![self.message.as_str()];
        let mut cur = &self.cause;
        while let Some(c) = cur {
            out.push(&c.message);
            cur = &c.cause;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "message": self.message,
            "theory": self.theory,
            "model": self.model,
            "operation": self.operation,
            "cause": self.cause.as_ref().map(|c| c.to_json()),
        })
    }
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)?;
        if !self.model.is_empty() {
            write!(f, " [{}, model {}, {}]", self.theory, self.model, self.operation)?;
        }
        if let Some(c) = &self.cause {
            write!(f, "\n  caused by: {c}")?;
        }
        Ok(())
    }
}

impl std::error::Error for CheckError {}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("{0}")]
    Check(#[from] CheckError),
    #[error("Ill-typed arguments for {op}: expected {expected}, found {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("no value for variable {0}")]
    MissingAssignment(String),
    #[error("{model} has no implementation of {name}")]
    Unimplemented { model: String, name: String },
    #[error("{0} is not a constructor of the model's theory")]
    UnknownConstructor(String),
    #[error("bad literal: {0}")]
    BadLiteral(String),
    #[error("{0}")]
    Other(String),
}

/// An interpretation of a theory: a checked coercion for every type
/// constructor and an evaluator for every term constructor.
#[derive(Clone)]
pub struct Model {
    name: String,
    theory: Gat,
    params: IndexMap<String, Value>,
    carriers: HashMap<Ident, CarrierKind>,
    coercions: HashMap<Ident, Coercion>,
    operations: HashMap<Ident, Operation>,
    enumerators: HashMap<Ident, Enumerator>,
    literal: Option<LiteralReader>,
    free: Option<FreeData>,
}

/// What makes a model free: its generators and the rewriting it normalizes by.
#[derive(Clone, Debug)]
pub struct FreeData {
    pub generators: TypeCtx,
    pub policy: NormalizationPolicy,
    pub strict: bool,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("theory", &self.theory.name())
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl Model {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn theory(&self) -> &Gat {
        &self.theory
    }

    pub fn params(&self) -> &IndexMap<String, Value> {
        &self.params
    }

    pub fn free_data(&self) -> Option<&FreeData> {
        self.free.as_ref()
    }

    pub fn carrier(&self, ty: &Ident) -> Option<&CarrierKind> {
        self.carriers.get(ty)
    }

    pub fn enumerator(&self, ty: &Ident) -> Option<&Enumerator> {
        self.enumerators.get(ty)
    }

    pub fn coerce(&self, ty: &Ident, v: &Value, args: &[Value]) -> Result<Value, CheckError> {
        let name = self.theory.canonical(ty).name.to_string();
        let f = self.coercions.get(ty).ok_or_else(|| {
            CheckError::msg(format!("{name} is not a type of this model")).located(
                self.theory.name(),
                &self.name,
                &name,
            )
        })?;
        f(v, args).map_err(|e| e.located(self.theory.name(), &self.name, &name))
    }

    pub fn apply(&self, op: &Ident, args: &[Value]) -> Result<Value, ModelError> {
        let con = self
            .theory
            .termcon(op)
            .ok_or_else(|| ModelError::UnknownConstructor(op.name.to_string()))?;
        let name = self.theory.canonical(op).name.to_string();
        if con.explicit_args.len() != args.len() {
            return Err(ModelError::ArityMismatch {
                op: name,
                expected: con.explicit_args.len(),
                found: args.len(),
            });
        }
        let f = self.operations.get(op).ok_or_else(|| ModelError::Unimplemented {
            model: self.name.clone(),
            name: name.clone(),
        })?;
        f(args).map_err(|e| ModelError::Check(e.located(self.theory.name(), &self.name, &name)))
    }

    /// Evaluates a term with its variables looked up in `env`.
    pub fn eval_term(&self, env: &HashMap<Ident, Value>, t: &AlgTerm) -> Result<Value, ModelError> {
        self.eval_with(&|v| env.get(v).cloned(), t)
    }

    /// Like [`Model::eval_term`], with variables looked up by a function.
    pub fn eval_with(
        &self,
        lookup: &dyn Fn(&Ident) -> Option<Value>,
        t: &AlgTerm,
    ) -> Result<Value, ModelError> {
        match t {
            AlgTerm::Var(v) => lookup(v).ok_or_else(|| ModelError::MissingAssignment(v.name.to_string())),
            AlgTerm::App(h, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_with(lookup, a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.apply(h, &vals)
            }
        }
    }

    /// Reads a literal for a value of type `ty`.
    pub fn parse_value(&self, ty: &Ident, text: &str) -> Result<Value, ModelError> {
        if let Some(read) = &self.literal {
            return read(ty, text).map_err(ModelError::BadLiteral);
        }
        let kind = self
            .carriers
            .get(ty)
            .ok_or_else(|| ModelError::BadLiteral(format!("no carrier declared for {}", ty.name)))?;
        parse_literal(kind, text).map_err(ModelError::BadLiteral)
    }
}

/// Assembles a model; `build` insists every constructor is implemented.
pub struct ModelBuilder {
    model: Model,
    errors: Vec<String>,
}

impl ModelBuilder {
    pub fn new(name: impl Into<String>, theory: &Gat) -> ModelBuilder {
        ModelBuilder {
            model: Model {
                name: name.into(),
                theory: theory.clone(),
                params: IndexMap::new(),
                carriers: HashMap::new(),
                coercions: HashMap::new(),
                operations: HashMap::new(),
                enumerators: HashMap::new(),
                literal: None,
                free: None,
            },
            errors: Vec::new(),
        }
    }

    fn resolve(&mut self, name: &str) -> Option<Ident> {
        match self.model.theory.resolve_symbol(name, None) {
            Ok(id) => Some(id),
            Err(e) => {
                self.errors.push(format!("{name}: {e}"));
                None
            }
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.model.params.insert(key.to_string(), v.into());
        self
    }

    pub fn carrier(mut self, ty: &str, kind: CarrierKind) -> Self {
        if let Some(id) = self.resolve(ty) {
            self.model.carriers.insert(id, kind);
        }
        self
    }

    pub fn coerce(
        mut self,
        ty: &str,
        f: impl Fn(&Value, &[Value]) -> Result<Value, CheckError> + Send + Sync + 'static,
    ) -> Self {
        if let Some(id) = self.resolve(ty) {
            self.model.coercions.insert(id, Arc::new(f));
        }
        self
    }

    pub fn op(
        mut self,
        name: &str,
        f: impl Fn(&[Value]) -> Result<Value, CheckError> + Send + Sync + 'static,
    ) -> Self {
        if let Some(id) = self.resolve(name) {
            self.model.operations.insert(id, Arc::new(f));
        }
        self
    }

    pub fn enumerate(mut self, ty: &str, f: impl Fn(&[Value]) -> Vec<Value> + Send + Sync + 'static) -> Self {
        if let Some(id) = self.resolve(ty) {
            self.model.enumerators.insert(id, Arc::new(f));
        }
        self
    }

    pub fn carrier_id(mut self, ty: Ident, kind: CarrierKind) -> Self {
        self.model.carriers.insert(ty, kind);
        self
    }

    pub fn coerce_id(mut self, ty: Ident, f: Coercion) -> Self {
        self.model.coercions.insert(ty, f);
        self
    }

    pub fn op_id(mut self, op: Ident, f: Operation) -> Self {
        self.model.operations.insert(op, f);
        self
    }

    pub fn enumerate_id(mut self, ty: Ident, f: Enumerator) -> Self {
        self.model.enumerators.insert(ty, f);
        self
    }

    pub fn literal(mut self, f: LiteralReader) -> Self {
        self.model.literal = Some(f);
        self
    }

    pub(crate) fn free(mut self, data: FreeData) -> Self {
        self.model.free = Some(data);
        self
    }

    pub fn build(self) -> Result<Model, ModelError> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(ModelError::Other(format!("{}: {e}", self.model.name)));
        }
        let m = self.model;
        for ty in m.theory.typecons() {
            if !m.coercions.contains_key(&ty) {
                return Err(ModelError::Unimplemented {
                    model: m.name.clone(),
                    name: m.theory.canonical(&ty).name.to_string(),
                });
            }
        }
        for op in m.theory.termcons() {
            if !m.operations.contains_key(&op) {
                return Err(ModelError::Unimplemented {
                    model: m.name.clone(),
                    name: m.theory.canonical(&op).name.to_string(),
                });
            }
        }
        Ok(m)
    }
}
