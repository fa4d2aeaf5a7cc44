//! Text form of polynomials.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor (['*'] factor)*
//! factor := atom ['^' integer]
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. `Display` on [`IntPoly`] prints a string this
//! grammar reads back to the same polynomial.

use num_bigint::BigInt;
use thiserror::Error;

use crate::monomial::Monomial;
use crate::poly::IntPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("malformed exponent at position {pos}")]
    MalformedExponent { pos: usize },
    #[error("unexpected `{found}` at position {pos}")]
    Unexpected { found: char, pos: usize },
    #[error("unexpected end of input at position {pos}")]
    UnexpectedEnd { pos: usize },
    #[error("unclosed parenthesis opened at position {pos}")]
    Unclosed { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let tok = match c {
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '^' => Token::Caret,
            '(' => Token::Open,
            ')' => Token::Close,
            '0'..='9' => {
                let mut end = pos;
                while let Some(&(i, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = i + d.len_utf8();
                    chars.next();
                }
                out.push((Token::Int(text[pos..end].parse().expect("digits")), pos));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut end = pos;
                while let Some(&(i, d)) = chars.peek() {
                    if !(d.is_alphanumeric() || d == '_') {
                        break;
                    }
                    end = i + d.len_utf8();
                    chars.next();
                }
                out.push((Token::Ident(text[pos..end].to_string()), pos));
                continue;
            }
            other => return Err(ParseError::Unexpected { found: other, pos }),
        };
        chars.next();
        out.push((tok, pos));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
    vars: &'a [String],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.cursor).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.cursor).cloned();
        self.cursor += 1;
        t
    }

    fn expr(&mut self) -> Result<IntPoly, ParseError> {
        let mut acc = IntPoly::zero(self.vars);
        let mut negate = false;
        match self.peek() {
            Some(Token::Plus) => {
                self.bump();
            }
            Some(Token::Minus) => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if negate { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(Token::Plus) => negate = false,
                Some(Token::Minus) => negate = true,
                _ => return Ok(acc),
            }
            self.bump();
        }
    }

    fn term(&mut self) -> Result<IntPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                }
                Some(Token::Int(_) | Token::Ident(_) | Token::Open) => {}
                _ => return Ok(acc),
            }
            acc = acc.mul(&self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<IntPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        let (_, caret_pos) = self.bump().expect("peeked");
        match self.bump() {
            Some((Token::Int(k), _)) => {
                let k = u32::try_from(k).map_err(|_| ParseError::MalformedExponent { pos: caret_pos })?;
                Ok(base.pow(k))
            }
            _ => Err(ParseError::MalformedExponent { pos: caret_pos }),
        }
    }

    fn atom(&mut self) -> Result<IntPoly, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some((Token::Int(c), _)) => Ok(IntPoly::constant(self.vars, c)),
            Some((Token::Ident(name), _)) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(ParseError::UnknownVariable { name, pos })?;
                Ok(IntPoly::monomial(self.vars, Monomial::var(self.vars.len(), idx), 1))
            }
            Some((Token::Open, _)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((Token::Close, _)) => Ok(inner),
                    Some((tok, p)) => Err(unexpected(&tok, p)),
                    None => Err(ParseError::Unclosed { pos }),
                }
            }
            Some((tok, p)) => Err(unexpected(&tok, p)),
            None => Err(ParseError::UnexpectedEnd { pos }),
        }
    }
}

fn unexpected(tok: &Token, pos: usize) -> ParseError {
    let found = match tok {
        Token::Plus => '+',
        Token::Minus => '-',
        Token::Star => '*',
        Token::Caret => '^',
        Token::Open => '(',
        Token::Close => ')',
        Token::Int(_) => '0',
        Token::Ident(s) => s.chars().next().unwrap_or('?'),
    };
    ParseError::Unexpected { found, pos }
}

/// Parses `text` as a polynomial with integer coefficients in `vars`.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<IntPoly, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens,
        cursor: 0,
        vars,
        end: text.len(),
    };
    let poly = parser.expr()?;
    match parser.bump() {
        None => Ok(poly),
        Some((tok, pos)) => Err(unexpected(&tok, pos)),
    }
}

/// Splits a comma-separated variable list, e.g. `"x,y,z"`.
pub fn parse_vars(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
