//! Generalized algebraic theories: a scoped kernel, a textual language,
//! models, theory maps, and pushouts.

pub mod colimits;
pub mod gat;
pub mod models;
pub mod morphisms;
pub mod scopes;
pub mod stdlib;
pub mod surface;

/// The guide's code listings, compiled and run by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/theories.md")]
    mod theories {}
    #[doc = include_str!("../../../book/src/terms.md")]
    mod terms {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/pushouts.md")]
    mod pushouts {}
    #[doc = include_str!("../../../book/src/json.md")]
    mod json {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
