use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Open => f.write_str("'('"),
            Tok::Close => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) struct Token {
    pub kind: Tok,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn describe(&self) -> String {
        self.kind.to_string()
    }
}

pub(super) struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
    peeked: Option<Token>,
}

impl<'a> Lexer<'a> {
    pub fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
            peeked: None,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub fn peek(&mut self) -> Result<&Token, ParseError> {
        if self.peeked.is_none() {
            let t = self.scan()?;
            self.peeked = Some(t);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    pub fn next(&mut self) -> Result<Token, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.scan(),
        }
    }

    /// Skips everything up to and including the `)` closing the current
    /// section, respecting nested parentheses.
    pub fn skip_balanced(&mut self) -> Result<(), ParseError> {
        let mut depth = 1usize;
        if let Some(t) = self.peeked.take() {
            match t.kind {
                Tok::Open => depth += 1,
                Tok::Close => depth -= 1,
                Tok::Eof => return Err(ParseError::at(&t, "unterminated COMMENT")),
                _ => {}
            }
        }
        while depth > 0 {
            let (line, col) = (self.line, self.col);
            match self.bump() {
                Some('(') => depth += 1,
                Some(')') => depth -= 1,
                Some(_) => {}
                None => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        message: "unterminated COMMENT".into(),
                    })
                }
            }
        }
        Ok(())
    }

    fn scan(&mut self) -> Result<Token, ParseError> {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let tok = |kind| Token { kind, line, col };
        let Some(&c) = self.chars.peek() else {
            return Ok(tok(Tok::Eof));
        };
        match c {
            '(' => {
                self.bump();
                Ok(tok(Tok::Open))
            }
            ')' => {
                self.bump();
                Ok(tok(Tok::Close))
            }
            ',' => {
                self.bump();
                Ok(tok(Tok::Comma))
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || "(),".contains(c) {
                        break;
                    }
                    if c == '-' && s.is_empty() {
                        let mut ahead = self.chars.clone();
                        ahead.next();
                        if ahead.peek() == Some(&'>') {
                            self.bump();
                            self.bump();
                            return Ok(tok(Tok::Arrow));
                        }
                    }
                    if c == '-' && !s.is_empty() {
                        let mut ahead = self.chars.clone();
                        ahead.next();
                        if ahead.peek() == Some(&'>') {
                            break;
                        }
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(tok(Tok::Ident(s)))
            }
        }
    }
}
