//! Real-valued expressions in the variables `x`, `s` and `y`.
//!
//! Grammar (whitespace is insignificant, `−` U+2212 is read as `-`):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | variable | function "(" expr ")" | "(" expr ")" ;
//! number  = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ]
//!         | "." digit { digit } [ exponent ] ;
//! variable = "x" | "s" | "y" ;
//! function = "exp" | "log" | "sin" | "cos" | "sqrt" | "abs" ;
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-2^2`
//! is `-(2^2)` and `2^3^2` is `2^(3^2)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    S,
    Y,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::S => "s",
            Var::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression together with the text it came from.
#[derive(Debug, Clone)]
pub struct Expression {
    ast: Node,
    source: String,
}

impl PartialEq for Expression {
    /// Structural equality of the trees; the source text is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("nesting deeper than {MAX_DEPTH} levels at byte {offset}")]
    TooDeep { offset: usize },
    #[error("function `{func}` at byte {offset} takes exactly one argument, got {got}")]
    Arity {
        func: &'static str,
        offset: usize,
        got: usize,
    },
}

impl ParseError {
    /// Byte offset into the source text, when the error has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::TooDeep { offset }
            | ParseError::Arity { offset, .. } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} of negative argument {arg} in `{expr}`")]
    Domain {
        func: &'static str,
        arg: f64,
        expr: String,
    },
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: String },
    #[error("non-finite value {value} in `{expr}`")]
    NonFinite { value: f64, expr: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' | b'.' => {
                let end = scan_number(bytes, i);
                let lit = &text[start..end];
                let value = lit
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ParseError::Syntax {
                        offset: start,
                        expected: "a finite number".into(),
                        found: format!("`{lit}`"),
                    })?;
                out.push((Tok::Num(value), start));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = i;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                out.push((Tok::Ident(text[start..end].to_string()), start));
                i = end;
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('\u{fffd}');
                if ch == '\u{2212}' {
                    out.push((Tok::Minus, start));
                    i += ch.len_utf8();
                    continue;
                }
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: "an operator, number, identifier or parenthesis".into(),
                    found: format!("`{ch}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

/// Bound on parenthesis, call and prefix-operator nesting.
pub const MAX_DEPTH: usize = 200;

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep {
                offset: self.offset(),
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        self.descend()?;
        let node = self.expr_inner();
        self.depth -= 1;
        node
    }

    fn expr_inner(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.descend()?;
            let inner = self.unary();
            self.depth -= 1;
            return Ok(Node::Neg(Box::new(inner?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            self.descend()?;
            let exponent = self.unary();
            self.depth -= 1;
            let exponent = exponent?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Node::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.bump();
                match name.as_str() {
                    "x" => return Ok(Node::Var(Var::X)),
                    "s" => return Ok(Node::Var(Var::S)),
                    "y" => return Ok(Node::Var(Var::Y)),
                    _ => {}
                }
                let func = Func::lookup(&name)
                    .ok_or(ParseError::UnknownIdentifier { name, offset: at })?;
                self.call(func, at)
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn call(&mut self, func: Func, at: usize) -> Result<Node, ParseError> {
        if *self.peek() != Tok::LParen {
            return Err(self.unexpected(&format!("`(` after `{}`", func.name())));
        }
        self.bump();
        if *self.peek() == Tok::RParen {
            return Err(ParseError::Arity {
                func: func.name(),
                offset: at,
                got: 0,
            });
        }
        let arg = self.expr()?;
        if *self.peek() == Tok::Comma {
            let mut got = 1;
            while *self.peek() == Tok::Comma {
                self.bump();
                self.expr()?;
                got += 1;
            }
            return Err(ParseError::Arity {
                func: func.name(),
                offset: at,
                got,
            });
        }
        self.expect_rparen()?;
        Ok(Node::Call(func, Box::new(arg)))
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }
}

/// Parses `text` into an [`Expression`].
pub fn parse(text: &str) -> Result<Expression, ParseError> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(Expression {
        ast,
        source: text.to_string(),
    })
}

impl FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// Binding strength used by the printer.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Const(_) | Node::Var(_) | Node::Call(..) => PREC_ATOM,
            Node::Neg(_) => PREC_UNARY,
            Node::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
            Node::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
            Node::Binary(BinOp::Pow, ..) => PREC_POW,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let parens = self.precedence() < min_prec;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Node::Const(v) => write!(f, "{v}")?,
            Node::Var(v) => f.write_str(v.name())?,
            Node::Neg(inner) => {
                f.write_str("-")?;
                inner.write_at(f, PREC_UNARY)?;
            }
            Node::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.write_at(f, 0)?;
                f.write_str(")")?;
            }
            Node::Binary(BinOp::Pow, base, exp) => {
                base.write_at(f, PREC_ATOM)?;
                f.write_str("^")?;
                exp.write_at(f, PREC_UNARY)?;
            }
            Node::Binary(op, lhs, rhs) => {
                let p = self.precedence();
                lhs.write_at(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // left-associative: an equal-precedence right operand needs parentheses
                let rhs_min = if p == PREC_ADD { PREC_MUL } else { PREC_UNARY };
                rhs.write_at(f, rhs_min)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }

    fn eval(&self, x: f64, s: f64, y: f64) -> Result<f64, EvalError> {
        let v = match self {
            Node::Const(v) => *v,
            Node::Var(Var::X) => x,
            Node::Var(Var::S) => s,
            Node::Var(Var::Y) => y,
            Node::Neg(inner) => -inner.eval(x, s, y)?,
            Node::Binary(op, lhs, rhs) => {
                let a = lhs.eval(x, s, y)?;
                let b = rhs.eval(x, s, y)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero {
                                expr: self.to_string(),
                            });
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Node::Call(func, arg) => {
                let a = arg.eval(x, s, y)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a < 0.0 {
                            return Err(EvalError::Domain {
                                func: "log",
                                arg: a,
                                expr: self.to_string(),
                            });
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain {
                                func: "sqrt",
                                arg: a,
                                expr: self.to_string(),
                            });
                        }
                        a.sqrt()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Abs => a.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                value: v,
                expr: self.to_string(),
            })
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(*v);
            }
            Node::Neg(inner) | Node::Call(_, inner) => inner.collect_vars(out),
            Node::Binary(_, lhs, rhs) => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
        }
    }

    fn map_vars(&self, f: &impl Fn(Var) -> Var) -> Node {
        match self {
            Node::Const(v) => Node::Const(*v),
            Node::Var(v) => Node::Var(f(*v)),
            Node::Neg(inner) => Node::Neg(Box::new(inner.map_vars(f))),
            Node::Call(func, arg) => Node::Call(*func, Box::new(arg.map_vars(f))),
            Node::Binary(op, lhs, rhs) => {
                Node::Binary(*op, Box::new(lhs.map_vars(f)), Box::new(rhs.map_vars(f)))
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl Expression {
    /// Wraps an already-built tree; the source text is its printed form.
    pub fn from_ast(ast: Node) -> Self {
        let source = ast.to_string();
        Self { ast, source }
    }

    pub fn ast(&self) -> &Node {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates at `(x, s, y)`. Variables absent from the expression are ignored.
    pub fn evaluate(&self, x: f64, s: f64, y: f64) -> Result<f64, EvalError> {
        self.ast.eval(x, s, y)
    }

    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.ast.collect_vars(&mut out);
        out
    }

    /// Canonical text that parses back to the same tree.
    pub fn pretty(&self) -> String {
        self.ast.to_string()
    }

    /// Exchanges the roles of `x` and `s`.
    pub fn swap_x_s(&self) -> Expression {
        Expression::from_ast(self.ast.map_vars(&|v| match v {
            Var::X => Var::S,
            Var::S => Var::X,
            Var::Y => Var::Y,
        }))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}
