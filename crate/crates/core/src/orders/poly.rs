use std::collections::BTreeMap;
use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use crate::terms::{Symbol, Term, Var};

/// `f(x1,…,xn) = c1·x1 + … + cn·xn + c0` over the naturals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearPoly {
    pub coeffs: Vec<u32>,
    pub constant: u32,
}

impl LinearPoly {
    pub fn new(coeffs: Vec<u32>, constant: u32) -> Self {
        LinearPoly { coeffs, constant }
    }

    pub fn zero(arity: usize) -> Self {
        LinearPoly::new(vec![0; arity], 0)
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }
}

impl fmt::Display for LinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                c => parts.push(format!("{c}·x{}", i + 1)),
            }
        }
        if self.constant > 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        f.write_str(&parts.join(" + "))
    }
}

/// A linear polynomial interpretation for each symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation(pub BTreeMap<Symbol, LinearPoly>);

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, f: &str, coeffs: &[u32], constant: u32) {
        self.0
            .insert(Symbol::new(f), LinearPoly::new(coeffs.to_vec(), constant));
    }

    pub fn with(mut self, f: &str, coeffs: &[u32], constant: u32) -> Self {
        self.set(f, coeffs, constant);
        self
    }

    pub fn get(&self, f: &Symbol) -> Option<&LinearPoly> {
        self.0.get(f)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (sym, p)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            let args: Vec<String> = (1..=p.arity()).map(|i| format!("x{i}")).collect();
            write!(f, "[{sym}]({}) = {p}", args.join(","))?;
        }
        Ok(())
    }
}

/// Serialized as `{"f": [c1, …, cn, c0]}`.
impl Serialize for Interpretation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (f, p) in &self.0 {
            let mut v = p.coeffs.clone();
            v.push(p.constant);
            m.serialize_entry(f.name(), &v)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no interpretation for symbol {0}")]
    Missing(Symbol),
    #[error("interpretation of {symbol} has {expected} coefficients but is applied to {found} arguments")]
    Arity {
        symbol: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("variable {0} has no value")]
    Unassigned(Var),
}

/// `Σ ci·xi + c0` with integer coefficients, for comparing interpretations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    pub vars: BTreeMap<Var, i64>,
    pub constant: i64,
}

impl LinearForm {
    fn add_scaled(&mut self, other: &LinearForm, k: i64) {
        if k == 0 {
            return;
        }
        for (v, c) in &other.vars {
            *self.vars.entry(v.clone()).or_insert(0) += k * c;
        }
        self.constant += k * other.constant;
    }

    pub fn minus(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.add_scaled(other, -1);
        out
    }

    /// All coefficients and the constant are `≥ 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.constant >= 0 && self.vars.values().all(|&c| c >= 0)
    }
}

/// The linear form of `[t]`, with a lookup for symbol interpretations.
pub(crate) fn form_with<'a>(
    t: &Term,
    lookup: &impl Fn(&Symbol) -> Option<&'a LinearPoly>,
) -> Result<LinearForm, EvalError> {
    match t {
        Term::Var(x) => Ok(LinearForm {
            vars: BTreeMap::from([(x.clone(), 1)]),
            constant: 0,
        }),
        Term::App(f, args) => {
            let p = lookup(f).ok_or_else(|| EvalError::Missing(f.clone()))?;
            if p.arity() != args.len() {
                return Err(EvalError::Arity {
                    symbol: f.clone(),
                    expected: p.arity(),
                    found: args.len(),
                });
            }
            let mut out = LinearForm {
                vars: BTreeMap::new(),
                constant: p.constant as i64,
            };
            for (a, &c) in args.iter().zip(&p.coeffs) {
                if c > 0 {
                    out.add_scaled(&form_with(a, lookup)?, c as i64);
                }
            }
            Ok(out)
        }
    }
}

pub fn linear_form(interp: &Interpretation, t: &Term) -> Result<LinearForm, EvalError> {
    form_with(t, &|f| interp.get(f))
}

/// `[t]` under a variable assignment.
pub fn eval_poly(interp: &Interpretation, t: &Term, assignment: &BTreeMap<Var, u64>) -> Result<u64, EvalError> {
    match t {
        Term::Var(x) => assignment
            .get(x)
            .copied()
            .ok_or_else(|| EvalError::Unassigned(x.clone())),
        Term::App(f, args) => {
            let p = interp.get(f).ok_or_else(|| EvalError::Missing(f.clone()))?;
            if p.arity() != args.len() {
                return Err(EvalError::Arity {
                    symbol: f.clone(),
                    expected: p.arity(),
                    found: args.len(),
                });
            }
            let mut v = p.constant as u64;
            for (a, &c) in args.iter().zip(&p.coeffs) {
                v += c as u64 * eval_poly(interp, a, assignment)?;
            }
            Ok(v)
        }
    }
}

/// `lhs ≻ rhs` (strict) or `lhs ≿ rhs` (weak), both sides already filtered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: Term,
    pub rhs: Term,
    pub strict: bool,
}

impl Constraint {
    pub fn weak(lhs: Term, rhs: Term) -> Self {
        Constraint {
            lhs,
            rhs,
            strict: false,
        }
    }

    pub fn strict(lhs: Term, rhs: Term) -> Self {
        Constraint { lhs, rhs, strict: true }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.strict { "≻" } else { "≿" };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

/// Coefficient-wise comparison: `[lhs] − [rhs]` must have only non-negative
/// coefficients and a non-negative (strict: positive) constant. Missing
/// interpretations make the comparison fail.
pub fn compare(interp: &Interpretation, c: &Constraint) -> bool {
    let (Ok(l), Ok(r)) = (linear_form(interp, &c.lhs), linear_form(interp, &c.rhs)) else {
        return false;
    };
    let d = l.minus(&r);
    d.is_nonnegative() && (!c.strict || d.constant > 0)
}
