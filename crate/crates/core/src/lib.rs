//! Termination analysis for many-sorted term rewrite systems with the
//! dependency pair framework and formative rules.
pub mod dp;
pub mod filters;
pub mod framework;
pub mod orders;
pub mod parser;
pub mod rewriting;
pub mod terms;
