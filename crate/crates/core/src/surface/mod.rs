//! The textual language: lexer, parser, elaboration into kernel syntax,
//! pretty-printing, JSON, and the registry that `extends`/`using` and map
//! declarations resolve through.
//!
//! ```text
//! file     := decl*
//! decl     := theory | map
//! theory   := "theory" NAME ["extends" NAME] "{" line* "}"
//! line     := typecon | termcon | axiom | alias | using | normalize | segment
//! typecon  := NAME ["(" argdecls ")"] "::" "TYPE" [turnstile]
//! termcon  := lhs "::" type [turnstile]
//! axiom    := [NAME ":="] term "==" term [turnstile]
//! alias    := "alias" OPSYM "=" NAME
//! using    := "using" NAME [":" NAME "as" NAME {"," NAME "as" NAME}]
//! normalize:= "normalize" (NAME | OPSYM) ["assoc"] ["unit" NAME]
//! segment  := "segment" "{" line* "}"
//! map      := "map" NAME "(" NAME "," NAME ")" "{" clause* "}"
//! clause   := pattern [turnstile] "=>" expr
//! turnstile:= "⊣" "[" [binding {"," binding}] "]"
//! binding  := NAME ["::" type] | "(" NAME {"," NAME} ")" "::" type
//! ```

mod ast;
mod elaborate;
mod json;
mod lexer;
mod parser;
mod pretty;
mod registry;

use std::fmt;

use thiserror::Error;

use crate::colimits::ColimitError;
use crate::gat::GatError;
use crate::morphisms::MapError;

pub use ast::{CtxGroup, Decl, Expr, Line, MapClause, MapDecl, TheoryDecl};
pub use elaborate::{elaborate_map, elaborate_theory, parse_context, parse_map, parse_term, parse_term_in, parse_theory, parse_type};
pub use json::{
    from_json, map_from_json, map_to_json, term_from_json, term_to_json, theory_from_json,
    theory_to_json, to_json, JsonEntity,
};
pub use lexer::{is_operator_symbol, is_valid_name};
pub use parser::{parse_file, parse_term_ast};
pub use pretty::{pretty_ctx, pretty_gat, pretty_map, pretty_term, pretty_term_in_ctx, pretty_type, pretty_type_in_ctx};
pub use registry::{fold_name, Entry, Registry};

/// A 1-based line/column position in source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Span {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SurfaceErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Gat(#[from] GatError),
    #[error("unknown theory {0}")]
    UnknownTheory(String),
    #[error("unknown map {0}")]
    UnknownMap(String),
    #[error("{0} is already defined")]
    DuplicateEntry(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Colimit(#[from] ColimitError),
    #[error("bad pattern: {0}")]
    Pattern(String),
    #[error("malformed document at {path}: {message}")]
    Malformed { path: String, message: String },
}

#[derive(Clone, Debug, Error, PartialEq)]
pub struct SurfaceError {
    pub kind: SurfaceErrorKind,
    pub span: Span,
}

impl fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // line 0 means "not from source text", e.g. a JSON document
        if self.span.line == 0 {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}: {}", self.span, self.kind)
        }
    }
}

impl SurfaceError {
    pub fn new(kind: impl Into<SurfaceErrorKind>, span: Span) -> SurfaceError {
        SurfaceError {
            kind: kind.into(),
            span,
        }
    }

    pub fn syntax(message: impl Into<String>, span: Span) -> SurfaceError {
        SurfaceError::new(SurfaceErrorKind::Syntax(message.into()), span)
    }

    pub fn malformed(path: impl Into<String>, message: impl Into<String>) -> SurfaceError {
        SurfaceError::new(
            SurfaceErrorKind::Malformed {
                path: path.into(),
                message: message.into(),
            },
            Span::default(),
        )
    }

    /// The kernel error underneath, if this is one.
    pub fn gat_error(&self) -> Option<&GatError> {
        match &self.kind {
            SurfaceErrorKind::Gat(e) => Some(e.root()),
            _ => None,
        }
    }
}
