//! Line-oriented concrete syntax:
//!
//! ```text
//! input  ld : Real
//! output acc := acc[-1|0] + ld[now] - ld[-3|0]
//! output ok : Bool := acc[now] <= 15
//! assumption 1 <= ld[now] && ld[now] <= 10
//! ```

use super::ast::{BinOp, Sort, Specification, StreamDecl, StreamExpr, UnOp, Value};
use super::check;
use super::error::SpecError;
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

const SYMBOLS: &[&str] = &[
    ":=", "<=", ">=", "==", "->", "&&", "||", "(", ")", "[", "]", "|", ",", ":", "<", ">", "=",
    "+", "-", "*", "^", "!",
];

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, SpecError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(Token {
                tok: Tok::Number(chars[start..i].iter().collect()),
                column,
            });
        } else {
            let rest: String = chars[i..].iter().take(2).collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| SpecError::Syntax {
                    line: line_no,
                    column,
                    message: format!("unexpected character `{c}`"),
                })?;
            i += sym.len();
            out.push(Token {
                tok: Tok::Sym(sym),
                column,
            });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or(self.end_column)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SpecError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String, SpecError> {
        match self.peek() {
            Some(Tok::Ident(name)) if !is_keyword(name) => {
                self.pos += 1;
                Ok(name.clone())
            }
            _ => self.error("expected identifier"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

const KEYWORDS: &[&str] = &[
    "input",
    "output",
    "assumption",
    "not",
    "and",
    "or",
    "xor",
    "implies",
    "ite",
    "tt",
    "ff",
    "true",
    "false",
    "now",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn number(cur: &Cursor<'_>, text: &str, negate: bool) -> Result<Rational, SpecError> {
    match parse_rational(text) {
        Some(r) => Ok(if negate { -r } else { r }),
        None => cur.error(format!("malformed number `{text}`")),
    }
}

fn parse_expr(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    let lhs = parse_or(cur)?;
    if cur.eat_sym("->") || cur.eat_kw("implies") {
        let rhs = parse_expr(cur)?;
        return Ok(StreamExpr::bin(BinOp::Implies, lhs, rhs));
    }
    Ok(lhs)
}

fn parse_or(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    let mut lhs = parse_xor(cur)?;
    while cur.eat_sym("||") || cur.eat_kw("or") {
        lhs = StreamExpr::bin(BinOp::Or, lhs, parse_xor(cur)?);
    }
    Ok(lhs)
}

fn parse_xor(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    let mut lhs = parse_and(cur)?;
    while cur.eat_sym("^") || cur.eat_kw("xor") {
        lhs = StreamExpr::bin(BinOp::Xor, lhs, parse_and(cur)?);
    }
    Ok(lhs)
}

fn parse_and(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    let mut lhs = parse_not(cur)?;
    while cur.eat_sym("&&") || cur.eat_kw("and") {
        lhs = StreamExpr::bin(BinOp::And, lhs, parse_not(cur)?);
    }
    Ok(lhs)
}

fn parse_not(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    if cur.eat_sym("!") || cur.eat_kw("not") {
        return Ok(StreamExpr::not(parse_not(cur)?));
    }
    parse_cmp(cur)
}

fn parse_cmp(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    let lhs = parse_add(cur)?;
    let op = match cur.peek() {
        Some(Tok::Sym(s)) if matches!(*s, "<" | "<=" | ">" | ">=" | "=" | "==") => *s,
        _ => return Ok(lhs),
    };
    cur.bump();
    let rhs = parse_add(cur)?;
    Ok(match op {
        "<" => StreamExpr::bin(BinOp::Lt, lhs, rhs),
        "<=" => StreamExpr::bin(BinOp::Le, lhs, rhs),
        ">" => StreamExpr::bin(BinOp::Lt, rhs, lhs),
        ">=" => StreamExpr::bin(BinOp::Le, rhs, lhs),
        _ => StreamExpr::bin(BinOp::Eq, lhs, rhs),
    })
}

fn parse_add(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    let mut lhs = parse_mul(cur)?;
    loop {
        if cur.eat_sym("+") {
            lhs = StreamExpr::bin(BinOp::Add, lhs, parse_mul(cur)?);
        } else if cur.eat_sym("-") {
            lhs = StreamExpr::bin(BinOp::Sub, lhs, parse_mul(cur)?);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_mul(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    let mut lhs = parse_unary(cur)?;
    while cur.eat_sym("*") {
        lhs = StreamExpr::bin(BinOp::Mul, lhs, parse_unary(cur)?);
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    if cur.eat_sym("-") {
        if let Some(Tok::Number(n)) = cur.peek() {
            cur.bump();
            return Ok(StreamExpr::real(number(cur, n, true)?));
        }
        return Ok(StreamExpr::Unary(UnOp::Neg, Box::new(parse_unary(cur)?)));
    }
    parse_primary(cur)
}

fn parse_literal(cur: &mut Cursor<'_>) -> Result<Value, SpecError> {
    let negate = cur.eat_sym("-");
    match cur.peek() {
        Some(Tok::Number(n)) => {
            cur.bump();
            Ok(Value::Real(number(cur, n, negate)?))
        }
        Some(Tok::Ident(k)) if !negate && (k == "tt" || k == "true") => {
            cur.bump();
            Ok(Value::Bool(true))
        }
        Some(Tok::Ident(k)) if !negate && (k == "ff" || k == "false") => {
            cur.bump();
            Ok(Value::Bool(false))
        }
        _ => cur.error("expected literal"),
    }
}

fn parse_primary(cur: &mut Cursor<'_>) -> Result<StreamExpr, SpecError> {
    match cur.peek() {
        Some(Tok::Number(_)) => Ok(StreamExpr::Const(parse_literal(cur)?)),
        Some(Tok::Ident(k)) if matches!(k.as_str(), "tt" | "ff" | "true" | "false") => {
            Ok(StreamExpr::Const(parse_literal(cur)?))
        }
        Some(Tok::Sym("(")) => {
            cur.bump();
            let e = parse_expr(cur)?;
            cur.expect_sym(")")?;
            Ok(e)
        }
        Some(Tok::Ident(k)) if k == "ite" => {
            cur.bump();
            cur.expect_sym("(")?;
            let c = parse_expr(cur)?;
            cur.expect_sym(",")?;
            let t = parse_expr(cur)?;
            cur.expect_sym(",")?;
            let e = parse_expr(cur)?;
            cur.expect_sym(")")?;
            Ok(StreamExpr::ite(c, t, e))
        }
        Some(Tok::Ident(_)) => {
            let stream = cur.ident()?;
            if !cur.eat_sym("[") {
                return Ok(StreamExpr::now(stream));
            }
            if cur.eat_kw("now") {
                cur.expect_sym("]")?;
                return Ok(StreamExpr::now(stream));
            }
            let negative = cur.eat_sym("-");
            if !negative {
                cur.eat_sym("+");
            }
            let offset = match cur.bump() {
                Some(Tok::Number(n)) => match n.parse::<i64>() {
                    Ok(v) => {
                        if negative {
                            -v
                        } else {
                            v
                        }
                    }
                    Err(_) => {
                        cur.pos -= 1;
                        return cur.error("offset must be an integer");
                    }
                },
                _ => {
                    if cur.pos > 0 {
                        cur.pos -= 1;
                    }
                    return cur.error("expected offset");
                }
            };
            let default = if cur.eat_sym("|") {
                Some(parse_literal(cur)?)
            } else {
                None
            };
            cur.expect_sym("]")?;
            Ok(StreamExpr::Offset {
                stream,
                offset,
                default,
            })
        }
        _ => cur.error("expected expression"),
    }
}

fn parse_sort(cur: &mut Cursor<'_>) -> Result<Sort, SpecError> {
    if cur.eat_kw("Bool") {
        Ok(Sort::Bool)
    } else if cur.eat_kw("Real") {
        Ok(Sort::Real)
    } else {
        cur.error("expected `Bool` or `Real`")
    }
}

/// Parses a specification and checks it: identifiers resolved, sorts checked,
/// and no zero-offset cycles.
pub fn parse_spec(text: &str) -> Result<Specification, SpecError> {
    let mut inputs = Vec::new();
    let mut outputs: Vec<(String, Option<Sort>, StreamExpr)> = Vec::new();
    let mut assumptions = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokenize(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: line_no,
            end_column: line.chars().count() + 1,
        };
        if cur.eat_kw("input") {
            let name = cur.ident()?;
            cur.expect_sym(":")?;
            let sort = parse_sort(&mut cur)?;
            inputs.push(StreamDecl::input(name, sort));
        } else if cur.eat_kw("output") {
            let name = cur.ident()?;
            let sort = if cur.eat_sym(":") {
                Some(parse_sort(&mut cur)?)
            } else {
                None
            };
            cur.expect_sym(":=")?;
            let expr = parse_expr(&mut cur)?;
            outputs.push((name, sort, expr));
        } else if cur.eat_kw("assumption") {
            assumptions.push(parse_expr(&mut cur)?);
        } else {
            return cur.error("expected `input`, `output` or `assumption`");
        }
        if !cur.at_end() {
            return cur.error("unexpected trailing tokens");
        }
    }

    check::resolve(inputs, outputs, assumptions)
}
