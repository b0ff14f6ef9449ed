use std::path::Path;

use indexmap::IndexMap;

use super::ast::Decl;
use super::elaborate::{elaborate_map, elaborate_theory};
use super::parser::parse_file;
use super::{Span, SurfaceError, SurfaceErrorKind};
use crate::gat::Gat;
use crate::morphisms::TheoryMap;

#[derive(Clone, Debug)]
pub enum Entry {
    Theory(Gat),
    Map(TheoryMap),
}

impl Entry {
    pub fn kind(&self) -> &'static str {
        match self {
            Entry::Theory(_) => "theory",
            Entry::Map(_) => "map",
        }
    }
}

/// Folds subscript digits to ASCII, so `Bad₁` can be typed as `Bad1`.
pub fn fold_name(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '₀'..='₉' => char::from_digit(c as u32 - '₀' as u32, 10).unwrap(),
            c => c,
        })
        .collect()
}

/// Named theories and maps, in declaration order. Declarations refer to
/// earlier entries by name.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: IndexMap<String, Entry>,
    shadowing: bool,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    /// Exact name first, then up to [`fold_name`].
    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.get(name).or_else(|| {
            let folded = fold_name(name);
            self.entries
                .iter()
                .find(|(k, _)| fold_name(k) == folded)
                .map(|(_, e)| e)
        })
    }

    pub fn theory(&self, name: &str) -> Option<&Gat> {
        match self.get(name)? {
            Entry::Theory(g) => Some(g),
            Entry::Map(_) => None,
        }
    }

    pub fn map(&self, name: &str) -> Option<&TheoryMap> {
        match self.get(name)? {
            Entry::Map(m) => Some(m),
            Entry::Theory(_) => None,
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// When on, a new declaration replaces an existing entry of the same
    /// name instead of being rejected. Entries elaborated earlier keep the
    /// definitions they were elaborated against.
    pub fn set_shadowing(&mut self, on: bool) {
        self.shadowing = on;
    }

    fn insert(&mut self, name: String, e: Entry, span: Span) -> Result<(), SurfaceError> {
        if self.shadowing {
            self.entries.shift_remove(&name);
        }
        if self.entries.contains_key(&name) {
            return Err(SurfaceError::new(SurfaceErrorKind::DuplicateEntry(name), span));
        }
        self.entries.insert(name, e);
        Ok(())
    }

    pub fn insert_theory(&mut self, g: Gat) -> Result<(), SurfaceError> {
        self.insert(g.name().to_string(), Entry::Theory(g), Span::default())
    }

    pub fn insert_map(&mut self, m: TheoryMap) -> Result<(), SurfaceError> {
        self.insert(m.name().to_string(), Entry::Map(m), Span::default())
    }

    /// Elaborates every declaration of `src` in order, adding each to the
    /// registry. Returns the names added. On error, declarations before the
    /// failing one stay registered.
    pub fn load_source(&mut self, src: &str) -> Result<Vec<String>, SurfaceError> {
        let mut added = Vec::new();
        for d in parse_file(src)? {
            match d {
                Decl::Theory(t) => {
                    let g = elaborate_theory(&t, self)?;
                    self.insert(t.name.clone(), Entry::Theory(g), t.span)?;
                    added.push(t.name);
                }
                Decl::Map(m) => {
                    let tm = elaborate_map(&m, self)?;
                    self.insert(m.name.clone(), Entry::Map(tm), m.span)?;
                    added.push(m.name);
                }
            }
        }
        Ok(added)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<Vec<String>, SurfaceError> {
        let src = std::fs::read_to_string(path).map_err(|e| {
            SurfaceError::syntax(format!("cannot read {}: {e}", path.display()), Span::default())
        })?;
        self.load_source(&src)
    }
}
