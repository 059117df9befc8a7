//! Argument filterings, linear polynomial interpretations and the search
//! for reduction pairs built from them.

mod filtering;
mod poly;
mod search;

pub use filtering::ArgumentFiltering;
pub use poly::{compare, eval_poly, linear_form, Constraint, EvalError, Interpretation, LinearForm, LinearPoly};
pub use search::{
    filterings, find_interpretation, search_reduction_pair, Candidate, FilterSpace, Found, Model, SearchConfig,
    SearchOutcome, SearchStats,
};
