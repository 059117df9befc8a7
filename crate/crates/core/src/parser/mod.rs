//! Reading and writing problem files.
//!
//! The format is the plain-text TPDB one, extended with an optional `SIG`
//! block that declares sorts:
//!
//! ```text
//! (VAR x y)
//! (SIG (f A B -> C) (a -> A))
//! (RULES
//!   f(x, y) -> ...
//! )
//! (STRATEGY INNERMOST)
//! ```
//!
//! Without `SIG` every symbol and variable gets the single sort `o`.

mod emit;
mod lexer;

pub use emit::{emit_proof, node_json, proof_json, ProofFormat};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use lexer::{Lexer, Tok, Token};

use crate::rewriting::{Mtrs, Rule, RuleError, RuleId};
use crate::terms::{infer_sorts, Signature, Sort, SortDecl, SortError, Symbol, Term, Var, DPSORT};

/// `(f A B -> C)`: the symbol's token, name, argument sorts and result sort.
type SigEntry = (Token, String, Vec<String>, String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

impl ParseError {
    fn at(tok: &Token, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: tok.line,
            col: tok.col,
            message: message.into(),
        }
    }
}

/// A parsed problem: the rewrite system and its strategy annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub mtrs: Mtrs,
    pub innermost: bool,
    /// Whether sorts came from a `SIG` block (or inference) rather than
    /// defaulting to `o`.
    pub sorted: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Infer the most general sorts for files without a `SIG` block.
    pub infer_sorts: bool,
}

pub fn parse(text: &str) -> Result<Problem, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, options: ParseOptions) -> Result<Problem, ParseError> {
    let mut p = Parser { lex: Lexer::new(text) };
    let file = p.file()?;
    build(file, options)
}

#[derive(Debug, Clone)]
struct RawTerm {
    name: String,
    args: Option<Vec<RawTerm>>,
    tok: Token,
}

#[derive(Default)]
struct RawFile {
    vars: BTreeSet<String>,
    sig: Option<Vec<SigEntry>>,
    rules: Vec<(RawTerm, RawTerm)>,
    innermost: bool,
}

struct Parser<'a> {
    lex: Lexer<'a>,
}

impl Parser<'_> {
    fn expect(&mut self, want: Tok) -> Result<Token, ParseError> {
        let t = self.lex.next()?;
        if t.kind == want {
            Ok(t)
        } else {
            Err(ParseError::at(&t, format!("expected {}, found {}", want, t.describe())))
        }
    }

    fn ident(&mut self) -> Result<(Token, String), ParseError> {
        let t = self.lex.next()?;
        match &t.kind {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((t, s))
            }
            _ => Err(ParseError::at(
                &t,
                format!("expected an identifier, found {}", t.describe()),
            )),
        }
    }

    fn file(&mut self) -> Result<RawFile, ParseError> {
        let mut file = RawFile::default();
        let mut seen_rules = false;
        loop {
            let open = self.lex.next()?;
            match open.kind {
                Tok::Eof => break,
                Tok::Open => {}
                _ => {
                    return Err(ParseError::at(
                        &open,
                        format!("expected '(', found {}", open.describe()),
                    ))
                }
            }
            let (kw_tok, kw) = self.ident()?;
            match kw.as_str() {
                "VAR" => loop {
                    let t = self.lex.next()?;
                    match t.kind {
                        Tok::Close => break,
                        Tok::Ident(name) => {
                            file.vars.insert(name);
                        }
                        _ => return Err(ParseError::at(&t, "expected a variable name")),
                    }
                },
                "SIG" => {
                    if file.sig.is_some() {
                        return Err(ParseError::at(&kw_tok, "duplicate SIG block"));
                    }
                    file.sig = Some(self.sig_block()?);
                }
                "RULES" => {
                    if seen_rules {
                        return Err(ParseError::at(&kw_tok, "duplicate RULES block"));
                    }
                    seen_rules = true;
                    self.rules_block(&mut file)?;
                }
                "STRATEGY" => {
                    let (t, s) = self.ident()?;
                    match s.as_str() {
                        "INNERMOST" => file.innermost = true,
                        "FULL" => file.innermost = false,
                        _ => return Err(ParseError::at(&t, format!("unsupported strategy {s}"))),
                    }
                    self.expect(Tok::Close)?;
                }
                "COMMENT" => self.lex.skip_balanced()?,
                other => return Err(ParseError::at(&kw_tok, format!("unsupported section {other}"))),
            }
        }
        Ok(file)
    }

    fn sig_block(&mut self) -> Result<Vec<SigEntry>, ParseError> {
        let mut decls = Vec::new();
        loop {
            let t = self.lex.next()?;
            match t.kind {
                Tok::Close => return Ok(decls),
                Tok::Open => {}
                _ => return Err(ParseError::at(&t, "expected a declaration like (f A B -> C)")),
            }
            let (ftok, f) = self.ident()?;
            let mut sorts = Vec::new();
            loop {
                let t = self.lex.next()?;
                match &t.kind {
                    Tok::Arrow => break,
                    Tok::Ident(s) => {
                        let s = s.clone();
                        sorts.push((t, s));
                    }
                    _ => return Err(ParseError::at(&t, "expected a sort name or '->'")),
                }
            }
            let (rtok, result) = self.ident()?;
            self.expect(Tok::Close)?;
            for (tok, s) in sorts.iter().chain([(rtok, result.clone())].iter()) {
                if s == DPSORT {
                    return Err(ParseError::at(tok, format!("sort name {DPSORT} is reserved")));
                }
            }
            decls.push((ftok, f, sorts.into_iter().map(|(_, s)| s).collect(), result));
        }
    }

    fn rules_block(&mut self, file: &mut RawFile) -> Result<(), ParseError> {
        loop {
            if self.lex.peek()?.kind == Tok::Close {
                self.lex.next()?;
                return Ok(());
            }
            let lhs = self.term()?;
            self.expect(Tok::Arrow)?;
            let rhs = self.term()?;
            file.rules.push((lhs, rhs));
        }
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let (tok, name) = self.ident()?;
        if self.lex.peek()?.kind != Tok::Open {
            return Ok(RawTerm { name, args: None, tok });
        }
        self.lex.next()?;
        let mut args = Vec::new();
        if self.lex.peek()?.kind == Tok::Close {
            self.lex.next()?;
            return Ok(RawTerm {
                name,
                args: Some(args),
                tok,
            });
        }
        loop {
            args.push(self.term()?);
            let t = self.lex.next()?;
            match t.kind {
                Tok::Comma => {}
                Tok::Close => break,
                _ => {
                    return Err(ParseError::at(
                        &t,
                        format!("expected ',' or ')', found {}", t.describe()),
                    ))
                }
            }
        }
        Ok(RawTerm {
            name,
            args: Some(args),
            tok,
        })
    }
}

fn build(file: RawFile, options: ParseOptions) -> Result<Problem, ParseError> {
    match &file.sig {
        Some(decls) => build_sorted(&file, decls),
        None => build_unsorted(&file, options),
    }
}

fn build_unsorted(file: &RawFile, options: ParseOptions) -> Result<Problem, ParseError> {
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    fn scan(t: &RawTerm, vars: &BTreeSet<String>, arities: &mut BTreeMap<String, usize>) -> Result<(), ParseError> {
        if vars.contains(&t.name) {
            if t.args.is_some() {
                return Err(ParseError::at(
                    &t.tok,
                    format!("variable {} applied to arguments", t.name),
                ));
            }
            return Ok(());
        }
        let args = t.args.as_deref().unwrap_or(&[]);
        match arities.get(&t.name) {
            Some(&n) if n != args.len() => {
                return Err(ParseError::at(
                    &t.tok,
                    format!(
                        "symbol {} used with {} arguments, earlier with {}",
                        t.name,
                        args.len(),
                        n
                    ),
                ))
            }
            _ => {
                arities.insert(t.name.clone(), args.len());
            }
        }
        args.iter().try_for_each(|a| scan(a, vars, arities))
    }
    for (l, r) in &file.rules {
        scan(l, &file.vars, &mut arities)?;
        scan(r, &file.vars, &mut arities)?;
    }
    let mut sig = Signature::new();
    for (f, n) in &arities {
        sig.declare(Symbol::new(f), SortDecl::unsorted(*n))
            .expect("fresh symbol");
    }
    let o = Sort::unsorted();
    fn convert(t: &RawTerm, vars: &BTreeSet<String>, o: &Sort) -> Term {
        if vars.contains(&t.name) {
            Term::var(&t.name, o)
        } else {
            let args = t.args.as_deref().unwrap_or(&[]);
            Term::app(&t.name, args.iter().map(|a| convert(a, vars, o)).collect())
        }
    }
    let pairs: Vec<(Term, Term)> = file
        .rules
        .iter()
        .map(|(l, r)| (convert(l, &file.vars, &o), convert(r, &file.vars, &o)))
        .collect();
    let (sig, pairs) = if options.infer_sorts {
        infer_sorts(&sig, &pairs)
    } else {
        (sig, pairs)
    };
    let rules = number(pairs);
    Ok(Problem {
        mtrs: Mtrs::new(sig, rules)?,
        innermost: file.innermost,
        sorted: options.infer_sorts,
    })
}

fn number(pairs: Vec<(Term, Term)>) -> Vec<Rule> {
    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (l, r))| Rule::new(i as u32 + 1, l, r))
        .collect()
}

fn build_sorted(file: &RawFile, decls: &[(Token, String, Vec<String>, String)]) -> Result<Problem, ParseError> {
    let mut sig = Signature::new();
    for (tok, f, args, result) in decls {
        if file.vars.contains(f) {
            return Err(ParseError::at(
                tok,
                format!("{f} is declared both as a variable and a symbol"),
            ));
        }
        let decl = SortDecl::new(args.iter().map(|s| Sort::new(s)).collect(), Sort::new(result));
        sig.declare(Symbol::new(f), decl)
            .map_err(|e| ParseError::at(tok, e.to_string()))?;
    }

    let mut rules = Vec::new();
    for (k, (l, r)) in file.rules.iter().enumerate() {
        let id = RuleId(k as u32 + 1);
        let mut var_sorts: BTreeMap<String, Sort> = BTreeMap::new();
        collect_var_sorts(&sig, &file.vars, l, None, id, &mut var_sorts)?;
        collect_var_sorts(&sig, &file.vars, r, None, id, &mut var_sorts)?;
        let lhs_vars = raw_vars(l, &file.vars);
        let extra: Vec<&String> = raw_vars(r, &file.vars)
            .into_iter()
            .filter(|v| !lhs_vars.contains(v))
            .collect();
        if !extra.is_empty() {
            return Err(RuleError::VariableCondition {
                id,
                vars: extra.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
            }
            .into());
        }
        if l.args.is_none() && file.vars.contains(&l.name) {
            return Err(RuleError::VariableLhs(id).into());
        }
        let conv = |t: &RawTerm| convert_sorted(t, &file.vars, &var_sorts);
        rules.push(Rule {
            id,
            lhs: conv(l),
            rhs: conv(r),
            provenance: crate::rewriting::Provenance::User,
        });
    }
    Ok(Problem {
        mtrs: Mtrs::new(sig, rules)?,
        innermost: file.innermost,
        sorted: true,
    })
}

fn raw_vars<'a>(t: &'a RawTerm, vars: &BTreeSet<String>) -> BTreeSet<&'a String> {
    let mut out = BTreeSet::new();
    fn go<'a>(t: &'a RawTerm, vars: &BTreeSet<String>, out: &mut BTreeSet<&'a String>) {
        if t.args.is_none() && vars.contains(&t.name) {
            out.insert(&t.name);
        }
        for a in t.args.iter().flatten() {
            go(a, vars, out);
        }
    }
    go(t, vars, &mut out);
    out
}

fn collect_var_sorts(
    sig: &Signature,
    vars: &BTreeSet<String>,
    t: &RawTerm,
    expected: Option<&Sort>,
    id: RuleId,
    out: &mut BTreeMap<String, Sort>,
) -> Result<(), ParseError> {
    if vars.contains(&t.name) {
        if t.args.is_some() {
            return Err(ParseError::at(
                &t.tok,
                format!("variable {} applied to arguments", t.name),
            ));
        }
        if let Some(s) = expected {
            match out.get(&t.name) {
                Some(prev) if prev != s => {
                    return Err(RuleError::IllSorted {
                        id,
                        source: SortError::Mismatch {
                            position: crate::terms::Position::root(),
                            expected: prev.clone(),
                            found: s.clone(),
                        },
                    }
                    .into())
                }
                _ => {
                    out.insert(t.name.clone(), s.clone());
                }
            }
        }
        return Ok(());
    }
    let f = Symbol::new(&t.name);
    let decl = sig
        .decl(&f)
        .ok_or_else(|| ParseError::at(&t.tok, format!("symbol {} is not declared in SIG", t.name)))?;
    let args = t.args.as_deref().unwrap_or(&[]);
    if args.len() != decl.arity() {
        return Err(ParseError::at(
            &t.tok,
            format!(
                "symbol {} expects {} arguments, got {}",
                t.name,
                decl.arity(),
                args.len()
            ),
        ));
    }
    for (a, s) in args.iter().zip(&decl.args) {
        collect_var_sorts(sig, vars, a, Some(s), id, out)?;
    }
    Ok(())
}

fn convert_sorted(t: &RawTerm, vars: &BTreeSet<String>, var_sorts: &BTreeMap<String, Sort>) -> Term {
    if vars.contains(&t.name) {
        Term::Var(Var::new(
            &t.name,
            var_sorts.get(&t.name).cloned().unwrap_or_else(Sort::unsorted),
        ))
    } else {
        let args = t.args.as_deref().unwrap_or(&[]);
        Term::app(
            &t.name,
            args.iter().map(|a| convert_sorted(a, vars, var_sorts)).collect(),
        )
    }
}

/// Renders a problem in the input format; `parse(&print(p))` gives back `p`.
pub fn print(problem: &Problem) -> String {
    let m = &problem.mtrs;
    let mut out = String::new();
    let vars: BTreeSet<String> = m
        .rules
        .iter()
        .flat_map(|r| r.lhs.vars().into_iter().chain(r.rhs.vars()))
        .map(|v| v.name.to_string())
        .collect();
    out.push_str("(VAR");
    for v in &vars {
        write!(out, " {v}").unwrap();
    }
    out.push_str(")\n");
    if problem.sorted {
        out.push_str("(SIG\n");
        for (f, d) in m.signature.symbols() {
            write!(out, "  ({f}").unwrap();
            for s in &d.args {
                write!(out, " {s}").unwrap();
            }
            writeln!(out, " -> {})", d.result).unwrap();
        }
        out.push_str(")\n");
    }
    out.push_str("(RULES\n");
    for r in &m.rules {
        writeln!(out, "  {} -> {}", r.lhs, r.rhs).unwrap();
    }
    out.push_str(")\n");
    if problem.innermost {
        out.push_str("(STRATEGY INNERMOST)\n");
    }
    out
}
