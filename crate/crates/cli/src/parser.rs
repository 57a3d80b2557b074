//! Recursive-descent parser for the region-expression grammar.
//!
//! ```text
//! expr      := primitive
//!            | "rot" "(" num "," expr ")"
//!            | "refl" "(" expr ")"
//!            | "disp" "(" num "," num "," expr ")"
//!            | "union" "(" expr { "," expr } ")"
//! primitive := "point"
//!            | "seg" "(" num "," num ")"
//!            | "line" "(" num "," num ")"
//!            | "rect" "(" num "," num "," num "," num ")"
//!            | "disk" "(" num "," num "," num ")"
//!            | "tri" "(" num "," num ")"
//!            | "poly" "(" num "," num ")"
//! ```
//!
//! Errors carry the 1-based line and column of the offending token. Angles
//! are radians; all literals must be finite; the side counts of `tri` and
//! `poly` must be positive integers.

use std::fmt;

use crate::ast::{RegionExpr, Span};

/// Syntax error with a 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ParseError {
    fn at(span: Span, message: impl Into<String>) -> Self {
        Self {
            line: span.line,
            column: span.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
    text: String,
}

impl Token {
    fn describe(&self) -> String {
        match &self.tok {
            Tok::Eof => "end of input".into(),
            _ => format!("`{}`", self.text),
        }
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut column = 1u32;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column };
        match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
            }
            ' ' | '\t' | '\r' => {
                column += 1;
                i += 1;
            }
            '(' | ')' | ',' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                out.push(Token {
                    tok,
                    span,
                    text: c.to_string(),
                });
                column += 1;
                i += 1;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                    column += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(word.clone()),
                    span,
                    text: word,
                });
            }
            '-' | '.' | '0'..='9' => {
                let start = i;
                if chars[i] == '-' {
                    i += 1;
                }
                let digits_before = consume_digits(&chars, &mut i);
                let mut digits_after = 0;
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    digits_after = consume_digits(&chars, &mut i);
                }
                if digits_before + digits_after == 0 {
                    return Err(ParseError::at(
                        span,
                        format!("expected a number, found `{c}`"),
                    ));
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    i += 1;
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        i += 1;
                    }
                    if consume_digits(&chars, &mut i) == 0 {
                        return Err(ParseError::at(span, "exponent is missing its digits"));
                    }
                }
                let text: String = chars[start..i].iter().collect();
                column += text.chars().count() as u32;
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError::at(span, format!("malformed number `{text}`")))?;
                if !value.is_finite() {
                    return Err(ParseError::at(
                        span,
                        format!("non-finite numeric literal `{text}`"),
                    ));
                }
                out.push(Token {
                    tok: Tok::Number(value),
                    span,
                    text,
                });
            }
            other => {
                return Err(ParseError::at(
                    span,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, column },
        text: String::new(),
    });
    Ok(out)
}

fn consume_digits(chars: &[char], i: &mut usize) -> usize {
    let start = *i;
    while *i < chars.len() && chars[*i].is_ascii_digit() {
        *i += 1;
    }
    *i - start
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.advance();
        if t.tok == want {
            Ok(t)
        } else {
            Err(ParseError::at(
                t.span,
                format!("expected {what}, found {}", t.describe()),
            ))
        }
    }

    fn number(&mut self) -> Result<(f64, Span), ParseError> {
        let t = self.advance();
        match t.tok {
            Tok::Number(v) => Ok((v, t.span)),
            _ => Err(ParseError::at(
                t.span,
                format!("expected number, found {}", t.describe()),
            )),
        }
    }

    fn side_count(&mut self) -> Result<u32, ParseError> {
        let (v, span) = self.number()?;
        if v.fract() != 0.0 || !(1.0..=4096.0).contains(&v) {
            return Err(ParseError::at(
                span,
                format!("side count must be a positive integer, got `{v}`"),
            ));
        }
        Ok(v as u32)
    }

    fn expr(&mut self) -> Result<RegionExpr, ParseError> {
        let t = self.advance();
        let span = t.span;
        let name = match &t.tok {
            Tok::Ident(name) => name.clone(),
            _ => {
                return Err(ParseError::at(
                    span,
                    format!("expected a region or map name, found {}", t.describe()),
                ))
            }
        };
        match name.as_str() {
            "point" => Ok(RegionExpr::Point { span }),
            "seg" => {
                self.expect(Tok::LParen, "`(`")?;
                let (length, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (theta, _) = self.number()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Seg {
                    length,
                    theta,
                    span,
                })
            }
            "line" => {
                self.expect(Tok::LParen, "`(`")?;
                let (theta, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (offset, _) = self.number()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Line {
                    theta,
                    offset,
                    span,
                })
            }
            "rect" => {
                self.expect(Tok::LParen, "`(`")?;
                let (x0, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (k0, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (a, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (b, _) = self.number()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Rect { x0, k0, a, b, span })
            }
            "disk" => {
                self.expect(Tok::LParen, "`(`")?;
                let (cx, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (cy, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (diameter, _) = self.number()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Disk {
                    cx,
                    cy,
                    diameter,
                    span,
                })
            }
            "tri" => {
                self.expect(Tok::LParen, "`(`")?;
                let (a, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let sides = self.side_count()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Tri { a, sides, span })
            }
            "poly" => {
                self.expect(Tok::LParen, "`(`")?;
                let (a, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let sides = self.side_count()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Poly { a, sides, span })
            }
            "rot" => {
                self.expect(Tok::LParen, "`(`")?;
                let (angle, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let inner = Box::new(self.expr()?);
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Rot { angle, inner, span })
            }
            "refl" => {
                self.expect(Tok::LParen, "`(`")?;
                let inner = Box::new(self.expr()?);
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Refl { inner, span })
            }
            "disp" => {
                self.expect(Tok::LParen, "`(`")?;
                let (s, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let (t_shift, _) = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let inner = Box::new(self.expr()?);
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Disp {
                    s,
                    t: t_shift,
                    inner,
                    span,
                })
            }
            "union" => {
                self.expect(Tok::LParen, "`(`")?;
                let mut members = vec![self.expr()?];
                while self.peek().tok == Tok::Comma {
                    self.advance();
                    members.push(self.expr()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(RegionExpr::Union { members, span })
            }
            other => Err(ParseError::at(
                span,
                format!("unknown region or map name `{other}`"),
            )),
        }
    }
}

/// Parses a region expression, reporting syntax errors with 1-based
/// line:column positions.
pub fn parse_region_expression(text: &str) -> Result<RegionExpr, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    let trailing = parser.peek().clone();
    if trailing.tok != Tok::Eof {
        return Err(ParseError::at(
            trailing.span,
            format!("unexpected trailing {}", trailing.describe()),
        ));
    }
    Ok(expr)
}
