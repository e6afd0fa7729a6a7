//! Expression language for curve coordinates and marching-scale functions.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-'? power
//! power  := atom ('^' power)?
//! atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tightest and is right-associative, so `-q^2` is `-(q^2)` and
//! `2^3^2` is `2^(3^2)`. The only named constant is `pi`.
//!
//! Expressions evaluate either to plain reals ([`Expression::evaluate`]) or
//! to third-order jets in one active variable ([`Expression::evaluate_jet3`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::jet::Jet3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable '{name}' at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("unknown function '{name}' at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("variable '{0}' is not bound")]
    Unbound(String),
    #[error("domain error in '{subexpr}': {message}")]
    Domain { subexpr: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 13] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Asin,
        Func::Acos,
        Func::Atan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Asin => "asin",
            Func::Acos => "acos",
            Func::Atan => "atan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Number(f64),
    Pi,
    Var(String),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

// Printing precedence levels; atoms sit above every operator.
const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Number(x) if *x < 0.0 || x.is_sign_negative() => PREC_NEG,
            Node::Number(_) | Node::Pi | Node::Var(_) | Node::Call(..) => PREC_ATOM,
            Node::Neg(_) => PREC_NEG,
            Node::Binary(op, ..) => op.precedence(),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Node::Var(name) => {
                out.insert(name.clone());
            }
            Node::Neg(a) | Node::Call(_, a) => a.collect_vars(out),
            Node::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Node::Number(_) | Node::Pi => {}
        }
    }

    /// Replace every variable-free subtree by its value.
    fn fold(&self) -> Node {
        let folded = match self {
            Node::Neg(a) => Node::Neg(Box::new(a.fold())),
            Node::Call(f, a) => Node::Call(*f, Box::new(a.fold())),
            Node::Binary(op, a, b) => Node::Binary(*op, Box::new(a.fold()), Box::new(b.fold())),
            other => other.clone(),
        };
        let mut vars = BTreeSet::new();
        folded.collect_vars(&mut vars);
        if vars.is_empty() {
            if let Ok(v) = eval_node::<f64>(&folded, &Env::Empty) {
                return Node::Number(v);
            }
        }
        folded
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Node, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Number(x) => {
                if x.is_sign_negative() {
                    write!(f, "-{}", -x)
                } else {
                    write!(f, "{x}")
                }
            }
            Node::Pi => f.write_str("pi"),
            Node::Var(name) => f.write_str(name),
            Node::Neg(a) => {
                f.write_str("-")?;
                // factor := '-' power, so the operand must be a power or an atom
                write_child(f, a, BinOp::Pow.precedence())
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::Binary(op, a, b) => {
                let p = op.precedence();
                // left-associative levels accept an equal-precedence left child;
                // the base of '^' must be an atom
                let (left_min, right_min) = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => (p, p + 1),
                    BinOp::Pow => (PREC_ATOM, p),
                };
                write_child(f, a, left_min)?;
                write!(f, "{}", op.symbol())?;
                write_child(f, b, right_min)
            }
        }
    }
}

/// A parsed expression together with its free variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    free_vars: BTreeSet<String>,
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

/// Variable bindings for evaluation.
pub type Bindings = BTreeMap<String, f64>;

impl Expression {
    /// Parse `source`, accepting only the variable names in `allowed_vars`.
    pub fn parse(source: &str, allowed_vars: &[&str]) -> Result<Expression, ExprError> {
        let mut parser = Parser {
            src: source,
            pos: 0,
            allowed: allowed_vars,
        };
        let root = parser.parse_expr()?;
        parser.skip_ws();
        if parser.pos < source.len() {
            return Err(parser.syntax("expected operator or end of input"));
        }
        Ok(Expression::from_node(root))
    }

    pub fn from_node(root: Node) -> Expression {
        let mut free_vars = BTreeSet::new();
        root.collect_vars(&mut free_vars);
        Expression { root, free_vars }
    }

    pub fn constant(value: f64) -> Expression {
        Expression::from_node(Node::Number(value))
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn free_vars(&self) -> &BTreeSet<String> {
        &self.free_vars
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.free_vars.contains(var)
    }

    /// Constant-folded copy; numbers print in shortest round-trip form.
    pub fn folded(&self) -> Expression {
        Expression::from_node(self.root.fold())
    }

    /// Canonical text used to compare closed forms: constants folded, a
    /// constant factor pulled to the front (`t/2` becomes `0.5*t`, `-t`
    /// becomes `-1*t`) and numbers rounded to 12 significant digits.
    pub fn canonical(&self) -> String {
        fn is_scaling(node: &Node) -> bool {
            match node {
                Node::Binary(BinOp::Mul, ..) | Node::Neg(_) => true,
                Node::Binary(BinOp::Div, _, b) => matches!(**b, Node::Number(k) if k != 0.0),
                _ => false,
            }
        }
        fn split_factor(node: Node) -> (f64, Option<Node>) {
            match node {
                Node::Binary(BinOp::Mul, a, b) => {
                    let (ka, a) = split_factor(*a);
                    let (kb, b) = split_factor(*b);
                    let rest = match (a, b) {
                        (Some(a), Some(b)) => Some(Node::Binary(BinOp::Mul, Box::new(a), Box::new(b))),
                        (a, b) => a.or(b),
                    };
                    (ka * kb, rest)
                }
                Node::Binary(BinOp::Div, a, b) if matches!(*b, Node::Number(k) if k != 0.0) => {
                    let Node::Number(k) = *b else { unreachable!() };
                    let (ka, a) = split_factor(*a);
                    (ka / k, a)
                }
                Node::Neg(a) => {
                    let (k, a) = split_factor(*a);
                    (-k, a)
                }
                Node::Number(k) => (k, None),
                other => (1.0, Some(normalize(other))),
            }
        }
        fn normalize(node: Node) -> Node {
            if is_scaling(&node) {
                return match split_factor(node) {
                    (k, None) => Node::Number(k),
                    (1.0, Some(rest)) => rest,
                    (k, Some(rest)) => Node::Binary(BinOp::Mul, Box::new(Node::Number(k)), Box::new(rest)),
                };
            }
            match node {
                Node::Binary(op, a, b) => Node::Binary(op, Box::new(normalize(*a)), Box::new(normalize(*b))),
                Node::Call(f, a) => Node::Call(f, Box::new(normalize(*a))),
                other => other,
            }
        }
        fn round_numbers(node: &Node) -> Node {
            match node {
                Node::Number(x) => {
                    let r: f64 = format!("{x:.11e}").parse().unwrap_or(*x);
                    Node::Number(r)
                }
                Node::Neg(a) => Node::Neg(Box::new(round_numbers(a))),
                Node::Call(f, a) => Node::Call(*f, Box::new(round_numbers(a))),
                Node::Binary(op, a, b) => {
                    Node::Binary(*op, Box::new(round_numbers(a)), Box::new(round_numbers(b)))
                }
                other => other.clone(),
            }
        }
        round_numbers(&normalize(self.root.fold())).to_string()
    }

    /// Plain real evaluation.
    pub fn evaluate(&self, bindings: &Bindings) -> Result<f64, ExprError> {
        eval_node::<f64>(&self.root, &Env::Plain(bindings))
    }

    /// Evaluate with no variables bound.
    pub fn evaluate_const(&self) -> Result<f64, ExprError> {
        eval_node::<f64>(&self.root, &Env::Empty)
    }

    /// Value and first three derivatives with respect to `active_var` at
    /// `point`; other variables are taken from `fixed`.
    pub fn evaluate_jet3(
        &self,
        active_var: &str,
        point: f64,
        fixed: &Bindings,
    ) -> Result<Jet3, ExprError> {
        eval_node::<Jet3>(
            &self.root,
            &Env::Jet {
                active: active_var,
                point,
                fixed,
            },
        )
    }
}

enum Env<'a> {
    Empty,
    Plain(&'a Bindings),
    Jet {
        active: &'a str,
        point: f64,
        fixed: &'a Bindings,
    },
}

/// Numeric carrier for the shared evaluator.
trait Value: Copy {
    fn lift(x: f64) -> Self;
    fn var(env: &Env<'_>, name: &str) -> Result<Self, ExprError>;
    fn value(&self) -> f64;
    fn is_const(&self) -> bool;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Self;
    fn neg(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: f64) -> Self;
    fn apply(self, f: Func) -> Self;
    fn finite(&self) -> bool;
}

impl Value for f64 {
    fn lift(x: f64) -> Self {
        x
    }
    fn var(env: &Env<'_>, name: &str) -> Result<Self, ExprError> {
        let found = match env {
            Env::Empty => None,
            Env::Plain(b) => b.get(name).copied(),
            Env::Jet { .. } => unreachable!("plain evaluation with jet environment"),
        };
        found.ok_or_else(|| ExprError::Unbound(name.to_string()))
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_const(&self) -> bool {
        true
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Self {
        self / o
    }
    fn neg(self) -> Self {
        -self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn apply(self, f: Func) -> Self {
        match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Asin => self.asin(),
            Func::Acos => self.acos(),
            Func::Atan => self.atan(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Tanh => self.tanh(),
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sqrt => self.sqrt(),
            Func::Abs => self.abs(),
        }
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl Value for Jet3 {
    fn lift(x: f64) -> Self {
        Jet3::constant(x)
    }
    fn var(env: &Env<'_>, name: &str) -> Result<Self, ExprError> {
        match env {
            Env::Jet {
                active,
                point,
                fixed,
            } => {
                if name == *active {
                    Ok(Jet3::variable(*point))
                } else {
                    fixed
                        .get(name)
                        .map(|&v| Jet3::constant(v))
                        .ok_or_else(|| ExprError::Unbound(name.to_string()))
                }
            }
            _ => Err(ExprError::Unbound(name.to_string())),
        }
    }
    fn value(&self) -> f64 {
        self.v0
    }
    fn is_const(&self) -> bool {
        self.is_constant()
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Self {
        self / o
    }
    fn neg(self) -> Self {
        -self
    }
    fn powi(self, n: i32) -> Self {
        Jet3::powi(self, n)
    }
    fn powf(self, p: f64) -> Self {
        Jet3::powf(self, p)
    }
    fn apply(self, f: Func) -> Self {
        if self.is_constant() {
            return Jet3::constant(self.v0.apply(f));
        }
        match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Asin => self.asin(),
            Func::Acos => self.acos(),
            Func::Atan => self.atan(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Tanh => self.tanh(),
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sqrt => self.sqrt(),
            Func::Abs => self.abs(),
        }
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

fn domain(node: &Node, message: impl Into<String>) -> ExprError {
    ExprError::Domain {
        subexpr: node.to_string(),
        message: message.into(),
    }
}

fn check_function_domain<V: Value>(node: &Node, f: Func, arg: &V) -> Result<(), ExprError> {
    let x = arg.value();
    let differentiating = !arg.is_const();
    let bad = match f {
        Func::Ln => (x <= 0.0).then_some("logarithm of a non-positive value"),
        Func::Sqrt if x < 0.0 => Some("square root of a negative value"),
        Func::Sqrt if x == 0.0 && differentiating => Some("square root is not differentiable at 0"),
        Func::Asin | Func::Acos if x.abs() > 1.0 => Some("argument outside [-1, 1]"),
        Func::Asin | Func::Acos if x.abs() == 1.0 && differentiating => {
            Some("not differentiable at the endpoints of [-1, 1]")
        }
        Func::Abs if x == 0.0 && differentiating => Some("abs is not differentiable at 0"),
        Func::Tan if x.cos() == 0.0 => Some("tangent pole"),
        _ => None,
    };
    match bad {
        Some(msg) => Err(domain(node, msg)),
        None => Ok(()),
    }
}

fn eval_node<V: Value>(node: &Node, env: &Env<'_>) -> Result<V, ExprError> {
    let out = match node {
        Node::Number(x) => V::lift(*x),
        Node::Pi => V::lift(std::f64::consts::PI),
        Node::Var(name) => V::var(env, name)?,
        Node::Neg(a) => eval_node::<V>(a, env)?.neg(),
        Node::Call(f, a) => {
            let arg = eval_node::<V>(a, env)?;
            check_function_domain(node, *f, &arg)?;
            arg.apply(*f)
        }
        Node::Binary(op, a, b) => {
            let lhs = eval_node::<V>(a, env)?;
            let rhs = eval_node::<V>(b, env)?;
            match op {
                BinOp::Add => lhs.add(rhs),
                BinOp::Sub => lhs.sub(rhs),
                BinOp::Mul => lhs.mul(rhs),
                BinOp::Div => {
                    if rhs.value() == 0.0 {
                        return Err(domain(node, "division by zero"));
                    }
                    lhs.div(rhs)
                }
                BinOp::Pow => eval_pow(node, lhs, rhs)?,
            }
        }
    };
    if !out.finite() {
        return Err(domain(node, "non-finite result"));
    }
    Ok(out)
}

fn eval_pow<V: Value>(node: &Node, base: V, exponent: V) -> Result<V, ExprError> {
    let b = base.value();
    if exponent.is_const() {
        let p = exponent.value();
        if p.fract() == 0.0 && p.abs() <= f64::from(i32::MAX) {
            let n = p as i32;
            if b == 0.0 && n < 0 {
                return Err(domain(node, "zero raised to a negative power"));
            }
            return Ok(base.powi(n));
        }
        if b < 0.0 {
            return Err(domain(node, "negative base with non-integer exponent"));
        }
        if b == 0.0 && !base.is_const() {
            return Err(domain(node, "fractional power is not differentiable at 0"));
        }
        return Ok(base.powf(p));
    }
    // variable exponent: b^e = exp(e ln b)
    if b <= 0.0 {
        return Err(domain(node, "variable exponent requires a positive base"));
    }
    Ok(exponent.mul(base.apply(Func::Ln)).apply(Func::Exp))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    allowed: &'a [&'a str],
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    fn parse_expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.parse_term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn parse_term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.parse_factor()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.parse_factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn parse_factor(&mut self) -> Result<Node, ExprError> {
        if self.eat('-') {
            let inner = self.parse_power()?;
            Ok(Node::Neg(Box::new(inner)))
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<Node, ExprError> {
        let base = self.parse_atom()?;
        if self.eat('^') {
            let exponent = self.parse_power()?;
            Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<Node, ExprError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                if !self.eat(')') {
                    self.skip_ws();
                    return Err(self.syntax("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.parse_number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.parse_ident(),
            Some(_) => Err(self.syntax("expected number, identifier or '('")),
            None => Err(self.syntax("unexpected end of input, expected number, identifier or '('")),
        }
    }

    fn parse_number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut n = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            n += digits(&mut i);
        }
        if n == 0 {
            return Err(self.syntax("malformed number"));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) > 0 {
                i = j;
            }
        }
        let text = &self.src[start..i];
        let value: f64 = text.parse().map_err(|_| self.syntax("malformed number"))?;
        self.pos = i;
        Ok(Node::Number(value))
    }

    fn parse_ident(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let name = &self.src[start..self.pos];
        self.skip_ws();
        if self.peek() == Some('(') {
            let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.parse_expr()?;
            if !self.eat(')') {
                self.skip_ws();
                return Err(self.syntax("expected ')'"));
            }
            return Ok(Node::Call(func, Box::new(arg)));
        }
        if name == "pi" {
            return Ok(Node::Pi);
        }
        if self.allowed.contains(&name) {
            Ok(Node::Var(name.to_string()))
        } else {
            Err(ExprError::UnknownVariable {
                name: name.to_string(),
                offset: start,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(x: f64) -> Bindings {
        Bindings::from([("q".to_string(), x)])
    }

    #[test]
    fn sine_parses_and_vanishes_at_zero() {
        let e = Expression::parse("sin(q)", &["q"]).unwrap();
        assert_eq!(
            e.root(),
            &Node::Call(Func::Sin, Box::new(Node::Var("q".into())))
        );
        assert_eq!(e.evaluate(&q(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn eight_curve_speed_polynomial_at_zero() {
        let e = Expression::parse("4*cos(q)^4 - 3*cos(q)^2 + 1", &["q"]).unwrap();
        assert_eq!(e.evaluate(&q(0.0)).unwrap(), 2.0);
    }

    #[test]
    fn unbalanced_parenthesis_reports_end_offset() {
        let err = Expression::parse("sin(", &["q"]).unwrap_err();
        assert!(matches!(err, ExprError::Syntax { offset: 4, .. }), "{err:?}");
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            Expression::parse("2*r", &["q"]),
            Err(ExprError::UnknownVariable { offset: 2, .. })
        ));
        assert!(matches!(
            Expression::parse("foo(q)", &["q"]),
            Err(ExprError::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(
            Expression::parse("q q", &["q"]),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn plain_evaluation() {
        let cube = Expression::parse("q^3", &["q"]).unwrap();
        assert_eq!(cube.evaluate(&q(2.0)).unwrap(), 8.0);
        let c = Expression::parse("sqrt(3)/2", &[]).unwrap();
        assert_relative_eq!(c.evaluate_const().unwrap(), 0.866_025_403_784_438_6, epsilon = 1e-15);
        let bad = Expression::parse("sqrt(q)", &["q"]).unwrap();
        assert!(matches!(bad.evaluate(&q(-1.0)), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = Expression::parse("1 + 1/(q-1)", &["q"]).unwrap();
        match e.evaluate(&q(1.0)) {
            Err(ExprError::Domain { subexpr, .. }) => assert_eq!(subexpr, "1/(q-1)"),
            other => panic!("{other:?}"),
        }
        let l = Expression::parse("ln(q)", &["q"]).unwrap();
        assert!(l.evaluate(&q(0.0)).is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        let e = Expression::parse("-2^2", &[]).unwrap();
        assert_eq!(e.evaluate_const().unwrap(), -4.0);
        let e = Expression::parse("2^3^2", &[]).unwrap();
        assert_eq!(e.evaluate_const().unwrap(), 512.0);
        let e = Expression::parse("8/4/2", &[]).unwrap();
        assert_eq!(e.evaluate_const().unwrap(), 1.0);
        let e = Expression::parse("1 - 2 - 3", &[]).unwrap();
        assert_eq!(e.evaluate_const().unwrap(), -4.0);
        let e = Expression::parse("2*-3 + -1", &[]).unwrap();
        assert_eq!(e.evaluate_const().unwrap(), -7.0);
        let e = Expression::parse("1.5e2 + .5 + 2.", &[]).unwrap();
        assert_eq!(e.evaluate_const().unwrap(), 152.5);
        assert!(Expression::parse("--1", &[]).is_err());
    }

    #[test]
    fn jets_of_named_examples() {
        let empty = Bindings::new();
        let sin = Expression::parse("sin(q)", &["q"]).unwrap();
        assert_eq!(sin.evaluate_jet3("q", 0.0, &empty).unwrap(), Jet3::new(0.0, 1.0, 0.0, -1.0));
        let cube = Expression::parse("q^3", &["q"]).unwrap();
        assert_eq!(cube.evaluate_jet3("q", 2.0, &empty).unwrap(), Jet3::new(8.0, 12.0, 12.0, 6.0));
        let exp = Expression::parse("exp(q)", &["q"]).unwrap();
        let j = exp.evaluate_jet3("q", 1.0, &empty).unwrap();
        for v in j.to_array() {
            assert_relative_eq!(v, std::f64::consts::E, epsilon = 1e-15);
        }
    }

    #[test]
    fn jet_of_absent_variable_is_constant() {
        let e = Expression::parse("t*2 + 1", &["q", "t"]).unwrap();
        let fixed = Bindings::from([("t".to_string(), 3.0)]);
        let j = e.evaluate_jet3("q", 0.5, &fixed).unwrap();
        assert_eq!(j, Jet3::constant(7.0));
    }

    #[test]
    fn jet_derivative_domain_errors() {
        let empty = Bindings::new();
        for src in ["abs(q)", "sqrt(q)", "q^0.5"] {
            let e = Expression::parse(src, &["q"]).unwrap();
            assert!(e.evaluate(&q(0.0)).is_ok(), "{src}");
            assert!(
                matches!(e.evaluate_jet3("q", 0.0, &empty), Err(ExprError::Domain { .. })),
                "{src}"
            );
        }
        // sqrt of a variable-free zero is fine
        let e = Expression::parse("q + sqrt(0)", &["q"]).unwrap();
        assert!(e.evaluate_jet3("q", 0.0, &empty).is_ok());
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        let cases = [
            ("(a+b)*c", "(a+b)*c"),
            ("a-(b-c)", "a-(b-c)"),
            ("a-(b+c)", "a-(b+c)"),
            ("(a-b)-c", "a-b-c"),
            ("a/(b*c)", "a/(b*c)"),
            ("(-a)^2", "(-a)^2"),
            ("-a^2", "-a^2"),
            ("a^(b^c)", "a^b^c"),
            ("(a^b)^c", "(a^b)^c"),
            ("sin( a ) * - b", "sin(a)*-b"),
            ("2^(-a)", "2^(-a)"),
            ("-(a*b)", "-(a*b)"),
            ("pi*a", "pi*a"),
        ];
        for (src, want) in cases {
            let e = Expression::parse(src, &["a", "b", "c"]).unwrap();
            assert_eq!(e.to_string(), want, "{src}");
        }
    }

    #[test]
    fn canonical_form_folds_constants() {
        let a = Expression::parse("sqrt(3)/2*t", &["t"]).unwrap();
        let b = Expression::parse("0.8660254037844387*t", &["t"]).unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), "0.866025403784*t");
        for (x, y) in [("t/2", "0.5*t"), ("t*2*3", "6*t"), ("-(t/4)", "-0.25*t"), ("sin(2*t)/2", "0.5*sin(2*t)")] {
            assert_eq!(Expression::parse(x, &["t"]).unwrap().canonical(), Expression::parse(y, &["t"]).unwrap().canonical());
        }
        assert_eq!(Expression::parse("1/t", &["t"]).unwrap().canonical(), "1/t");
    }
}
