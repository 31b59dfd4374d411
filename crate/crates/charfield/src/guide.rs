//! The narrative guide.
//!
//! Each module below renders one chapter of the prose guide in `book/`
//! (also buildable standalone with `mdbook build book`). Including the
//! markdown here keeps the guide honest: every code block in the book
//! runs as a doc-test of this crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/invariants.md")]
pub mod invariants {}

#[doc = include_str!("../../../book/src/pairs.md")]
pub mod conservation_pairs {}

#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}

#[doc = include_str!("../../../book/src/kernels.md")]
pub mod kernels {}

#[doc = include_str!("../../../book/src/equivalence.md")]
pub mod equivalence {}

#[doc = include_str!("../../../book/src/cavity.md")]
pub mod cavity {}

#[doc = include_str!("../../../book/src/cli_chapter.md")]
pub mod cli_chapter {}
