//! The chapters of the guide, compiled as documentation so that their
//! snippets run with `cargo test -p mwrc-guide`.

#[doc = include_str!("src/intro.md")]
pub mod intro {}

#[doc = include_str!("src/fields.md")]
pub mod fields {}

#[doc = include_str!("src/codes.md")]
pub mod codes {}

#[doc = include_str!("src/fdf.md")]
pub mod fdf {}

#[doc = include_str!("src/regions.md")]
pub mod regions {}

#[doc = include_str!("src/cli.md")]
pub mod cli {}

#[doc = include_str!("../README.md")]
pub mod readme {}
