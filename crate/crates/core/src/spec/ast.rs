use crate::rational::{fmt_exact, Rational};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Real,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Bool => "Bool",
            Sort::Real => "Real",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Real(Rational),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Bool(_) => Sort::Bool,
            Value::Real(_) => Sort::Real,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<&Rational> {
        match self {
            Value::Real(r) => Some(r),
            Value::Bool(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("tt"),
            Value::Bool(false) => f.write_str("ff"),
            Value::Real(r) => f.write_str(&fmt_exact(r)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Implies,
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Eq,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Xor => "^",
            BinOp::Implies => "->",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "=",
        }
    }
}

/// Stream expression as written in a specification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StreamExpr {
    Const(Value),
    /// `stream[offset|default]`; offset 0 carries no default (`stream[now]`).
    Offset {
        stream: String,
        offset: i64,
        default: Option<Value>,
    },
    Unary(UnOp, Box<StreamExpr>),
    Binary(BinOp, Box<StreamExpr>, Box<StreamExpr>),
    Ite(Box<StreamExpr>, Box<StreamExpr>, Box<StreamExpr>),
}

impl StreamExpr {
    pub fn now(stream: impl Into<String>) -> Self {
        StreamExpr::Offset {
            stream: stream.into(),
            offset: 0,
            default: None,
        }
    }

    pub fn offset(stream: impl Into<String>, offset: i64, default: Value) -> Self {
        StreamExpr::Offset {
            stream: stream.into(),
            offset,
            default: Some(default),
        }
    }

    pub fn real(r: Rational) -> Self {
        StreamExpr::Const(Value::Real(r))
    }

    pub fn boolean(b: bool) -> Self {
        StreamExpr::Const(Value::Bool(b))
    }

    pub fn not(e: StreamExpr) -> Self {
        StreamExpr::Unary(UnOp::Not, Box::new(e))
    }

    pub fn bin(op: BinOp, a: StreamExpr, b: StreamExpr) -> Self {
        StreamExpr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn ite(c: StreamExpr, t: StreamExpr, e: StreamExpr) -> Self {
        StreamExpr::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    /// Calls `f` on every `Offset` node.
    pub fn for_each_offset(&self, f: &mut impl FnMut(&str, i64, Option<&Value>)) {
        match self {
            StreamExpr::Const(_) => {}
            StreamExpr::Offset {
                stream,
                offset,
                default,
            } => f(stream, *offset, default.as_ref()),
            StreamExpr::Unary(_, a) => a.for_each_offset(f),
            StreamExpr::Binary(_, a, b) => {
                a.for_each_offset(f);
                b.for_each_offset(f);
            }
            StreamExpr::Ite(c, t, e) => {
                c.for_each_offset(f);
                t.for_each_offset(f);
                e.for_each_offset(f);
            }
        }
    }

    /// Smallest (most negative) offset referenced, 0 if none.
    pub fn min_offset(&self) -> i64 {
        let mut min = 0;
        self.for_each_offset(&mut |_, o, _| min = min.min(o));
        min
    }

    pub fn references_streams(&self) -> bool {
        let mut any = false;
        self.for_each_offset(&mut |_, _, _| any = true);
        any
    }
}

impl fmt::Display for StreamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StreamExpr::Const(v) => write!(f, "{v}"),
            StreamExpr::Offset {
                stream,
                offset: 0,
                default: None,
            } => write!(f, "{stream}[now]"),
            StreamExpr::Offset {
                stream,
                offset,
                default,
            } => match default {
                Some(d) => write!(f, "{stream}[{offset}|{d}]"),
                None => write!(f, "{stream}[{offset}]"),
            },
            StreamExpr::Unary(UnOp::Not, a) => write!(f, "(not {a})"),
            StreamExpr::Unary(UnOp::Neg, a) => write!(f, "(-({a}))"),
            StreamExpr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            StreamExpr::Ite(c, t, e) => write!(f, "ite({c}, {t}, {e})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamDecl {
    pub name: String,
    pub sort: Sort,
    pub kind: StreamKind,
    /// Present exactly for outputs.
    pub expr: Option<StreamExpr>,
}

impl StreamDecl {
    pub fn input(name: impl Into<String>, sort: Sort) -> Self {
        StreamDecl {
            name: name.into(),
            sort,
            kind: StreamKind::Input,
            expr: None,
        }
    }

    pub fn output(name: impl Into<String>, sort: Sort, expr: StreamExpr) -> Self {
        StreamDecl {
            name: name.into(),
            sort,
            kind: StreamKind::Output,
            expr: Some(expr),
        }
    }
}

/// A specification: typed inputs, defined outputs and Bool assumptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    pub inputs: Vec<StreamDecl>,
    pub outputs: Vec<StreamDecl>,
    pub assumptions: Vec<StreamExpr>,
    /// Deepest past offset referenced by any assumption.
    pub lookback: usize,
    /// Input-like streams introduced by ite rewriting; they never receive readings.
    pub helpers: Vec<String>,
}

impl Specification {
    pub fn streams(&self) -> impl Iterator<Item = &StreamDecl> {
        self.inputs.iter().chain(self.outputs.iter())
    }

    pub fn stream(&self, name: &str) -> Option<&StreamDecl> {
        self.streams().find(|d| d.name == name)
    }

    /// Position in `inputs ++ outputs`.
    pub fn stream_index(&self, name: &str) -> Option<usize> {
        self.streams().position(|d| d.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&StreamDecl> {
        self.outputs.iter().find(|d| d.name == name)
    }

    pub fn stream_names(&self) -> Vec<String> {
        self.streams().map(|d| d.name.clone()).collect()
    }

    pub fn compute_lookback(assumptions: &[StreamExpr]) -> usize {
        assumptions
            .iter()
            .map(|a| a.min_offset().unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Specification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.inputs {
            writeln!(f, "input {} : {}", d.name, d.sort)?;
        }
        for d in &self.outputs {
            let expr = d.expr.as_ref().expect("output without definition");
            writeln!(f, "output {} : {} := {}", d.name, d.sort, expr)?;
        }
        for a in &self.assumptions {
            writeln!(f, "assumption {a}")?;
        }
        Ok(())
    }
}
