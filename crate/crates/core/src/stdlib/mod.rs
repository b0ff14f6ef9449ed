//! The bundled library: `.gat` sources for reference theories and maps,
//! plus an index that also lists the built-in models.

use std::sync::OnceLock;

use thiserror::Error;

use crate::gat::Gat;
use crate::models::BUILTIN_MODELS;
use crate::morphisms::{check_simple_validity, check_welltyped, TheoryMapKind};
use crate::surface::{Entry, Registry, SurfaceError};

/// Library sources in load order; later files refer to earlier ones.
pub const SOURCES: &[(&str, &str)] = &[
    ("stdlib/algebra.gat", include_str!("../../stdlib/algebra.gat")),
    ("stdlib/arith.gat", include_str!("../../stdlib/arith.gat")),
    ("stdlib/category.gat", include_str!("../../stdlib/category.gat")),
    ("stdlib/maps.gat", include_str!("../../stdlib/maps.gat")),
];

/// Maps that are in the library to be rejected.
pub const EXPECTED_INVALID: &[&str] = &["Bad₁", "Bad₂"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Theory,
    Map,
    Model,
}

impl EntryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::Theory => "theory",
            EntryKind::Map => "map",
            EntryKind::Model => "model",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LibraryEntry {
    pub name: String,
    pub kind: EntryKind,
    /// A `.gat` path, or `builtin` for models implemented in Rust.
    pub source: String,
    pub expected_invalid: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LibraryIndex {
    pub entries: Vec<LibraryEntry>,
}

impl LibraryIndex {
    pub fn get(&self, name: &str) -> Option<&LibraryEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn of_kind(&self, kind: EntryKind) -> impl Iterator<Item = &LibraryEntry> {
        self.entries.iter().filter(move |e| e.kind == kind)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum StdlibError {
    #[error("{source_path}: {error}")]
    Source { source_path: String, error: SurfaceError },
    #[error("{name}: {message}")]
    Check { name: String, message: String },
}

/// Loads every library source and checks each entry: theories against
/// themselves, maps for well-typedness (and renaming validity for simple
/// maps), except the maps that are meant to fail.
pub fn load_stdlib() -> Result<(Registry, LibraryIndex), StdlibError> {
    let mut reg = Registry::new();
    let mut index = LibraryIndex::default();
    for (path, src) in SOURCES {
        let added = reg.load_source(src).map_err(|error| StdlibError::Source {
            source_path: path.to_string(),
            error,
        })?;
        for name in added {
            let kind = match reg.get(&name) {
                Some(Entry::Theory(_)) => EntryKind::Theory,
                _ => EntryKind::Map,
            };
            index.entries.push(LibraryEntry {
                expected_invalid: EXPECTED_INVALID.contains(&name.as_str()),
                name,
                kind,
                source: path.to_string(),
            });
        }
    }
    for (name, _, _) in BUILTIN_MODELS {
        index.entries.push(LibraryEntry {
            name: name.to_string(),
            kind: EntryKind::Model,
            source: "builtin".into(),
            expected_invalid: false,
        });
    }

    for e in &index.entries {
        let fail = |message: String| StdlibError::Check {
            name: e.name.clone(),
            message,
        };
        match (e.kind, reg.get(&e.name)) {
            (EntryKind::Theory, Some(Entry::Theory(g))) => {
                g.self_check().map_err(|err| fail(err.to_string()))?;
            }
            (EntryKind::Map, Some(Entry::Map(m))) if !e.expected_invalid => {
                check_welltyped(m).map_err(|errs| fail(join(&errs)))?;
                if matches!(m.kind(), TheoryMapKind::Simple { .. }) {
                    check_simple_validity(m).map_err(|errs| fail(join(&errs)))?;
                }
            }
            _ => {}
        }
    }
    Ok((reg, index))
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// The library, loaded once. Panics if it does not load, which would be a
/// bug in the bundled sources.
pub fn stdlib() -> &'static Registry {
    static LIB: OnceLock<(Registry, LibraryIndex)> = OnceLock::new();
    &LIB.get_or_init(|| load_stdlib().unwrap_or_else(|e| panic!("the bundled library is broken: {e}"))).0
}

/// Shorthand for a library theory. Panics on unknown names.
pub fn theory(name: &str) -> &'static Gat {
    stdlib()
        .theory(name)
        .unwrap_or_else(|| panic!("no theory {name} in the library"))
}
