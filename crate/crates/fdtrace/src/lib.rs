pub mod cli;
pub mod error;
pub mod dualspace;
pub mod functionals;
pub mod groupoid;
pub mod json;
pub mod ktrace;
pub mod matalg;
pub mod sample;
pub mod verify;

pub use error::{Error, Result};

// Doc-test the guide so its examples stay in sync with the crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/k0.md")]
    mod k0 {}
    #[doc = include_str!("../../../book/src/dual.md")]
    mod dual {}
    #[doc = include_str!("../../../book/src/groupoids.md")]
    mod groupoids {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
