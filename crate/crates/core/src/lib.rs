//! Prolate operators on balls, their commutation with the truncated Fourier
//! transform, and the entropy forms and modular operators built from them.
//!
//! The guide in `book/` walks through each module with runnable examples.

pub mod cli;
pub mod entropy;
pub mod error;
pub mod numerics;
pub mod prolate1d;
pub mod modular;
pub mod prolate_nd;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/interval.md")]
    mod interval {}
    #[doc = include_str!("../../../book/src/sectors.md")]
    mod sectors {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/modular.md")]
    mod modular {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/schema.md")]
    mod schema {}
}
