//! Doc-test harness for the guide.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/input.md")]
pub mod input {}

#[doc = include_str!("../../book/src/dependency-pairs.md")]
pub mod dependency_pairs {}

#[doc = include_str!("../../book/src/rule-sets.md")]
pub mod rule_sets {}

#[doc = include_str!("../../book/src/reduction-pairs.md")]
pub mod reduction_pairs {}

#[doc = include_str!("../../book/src/proving.md")]
pub mod proving {}

#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}
