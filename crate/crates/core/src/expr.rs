//! Scalar expression trees with symbolic differentiation.
//!
//! Profiles given as text (`phi:sqrt(1+s^2)`, `L:u+v+sqrt(u^2+v^2)`) are
//! parsed into [`Expr`] and differentiated exactly; numeric differentiation
//! is kept out of this path so it can serve as an independent check.
//!
//! Grammar (precedence low to high, `^` right associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sqrt => x.sqrt(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(Arc<str>),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Neg(Expr),
    Call(Func, Expr),
}

/// Immutable, cheaply clonable expression tree.
///
/// All constructors simplify locally (constant folding, neutral elements,
/// `sqrt(x)^2 → x`), so derivative trees stay small.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

#[allow(clippy::should_implement_trait)]
impl Expr {
    fn node(&self) -> &Node {
        &self.0
    }

    fn wrap(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn constant(c: f64) -> Expr {
        Expr::wrap(Node::Const(c))
    }

    pub fn var(name: &str) -> Expr {
        Expr::wrap(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(v)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => match b.node() {
                Node::Neg(inner) => Expr::sub(a, inner.clone()),
                _ => Expr::wrap(Node::Add(a, b)),
            },
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ if a == b => Expr::constant(0.0),
            _ => Expr::wrap(Node::Sub(a, b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(0.0), _) | (_, Some(0.0)) => Expr::constant(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            (Some(-1.0), _) => Expr::neg(b),
            (_, Some(-1.0)) => Expr::neg(a),
            _ => {
                if let (Node::Call(Func::Sqrt, p), Node::Call(Func::Sqrt, q)) = (a.node(), b.node())
                {
                    if p == q {
                        return p.clone();
                    }
                }
                // Keep constants on the left so folding sees them.
                if b.as_const().is_some() {
                    Expr::wrap(Node::Mul(b, a))
                } else {
                    Expr::wrap(Node::Mul(a, b))
                }
            }
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x / y),
            (Some(0.0), _) => Expr::constant(0.0),
            (_, Some(1.0)) => a,
            _ => Expr::wrap(Node::Div(a, b)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x.powf(y)),
            (_, Some(0.0)) => Expr::constant(1.0),
            (_, Some(1.0)) => a,
            (Some(1.0), _) => Expr::constant(1.0),
            (_, Some(y)) => {
                // sqrt(x)^(2k) = x^k on the domain where sqrt(x) is real.
                if let Node::Call(Func::Sqrt, inner) = a.node() {
                    let half = y / 2.0;
                    if half.fract() == 0.0 && half > 0.0 {
                        return Expr::pow(inner.clone(), Expr::constant(half));
                    }
                }
                Expr::wrap(Node::Pow(a, b))
            }
            _ => Expr::wrap(Node::Pow(a, b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::wrap(Node::Neg(a)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        match a.as_const() {
            Some(c) => Expr::constant(f.apply(c)),
            None => Expr::wrap(Node::Call(f, a)),
        }
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::call(Func::Sqrt, a)
    }

    /// Evaluate with variables bound by `lookup`; unbound variables give NaN.
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> f64 {
        match self.node() {
            Node::Const(c) => *c,
            Node::Var(name) => lookup(name).unwrap_or(f64::NAN),
            Node::Add(a, b) => a.eval_with(lookup) + b.eval_with(lookup),
            Node::Sub(a, b) => a.eval_with(lookup) - b.eval_with(lookup),
            Node::Mul(a, b) => a.eval_with(lookup) * b.eval_with(lookup),
            Node::Div(a, b) => a.eval_with(lookup) / b.eval_with(lookup),
            Node::Pow(a, b) => {
                let base = a.eval_with(lookup);
                match b.as_const() {
                    Some(e) if e.fract() == 0.0 && e.abs() < 64.0 => base.powi(e as i32),
                    _ => base.powf(b.eval_with(lookup)),
                }
            }
            Node::Neg(a) => -a.eval_with(lookup),
            Node::Call(f, a) => f.apply(a.eval_with(lookup)),
        }
    }

    /// Evaluate with a slice of `(name, value)` bindings.
    pub fn eval(&self, vars: &[(&str, f64)]) -> f64 {
        self.eval_with(&|name| vars.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, var: &str) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::constant(0.0),
            Node::Var(name) => Expr::constant(if &**name == var { 1.0 } else { 0.0 }),
            Node::Add(a, b) => Expr::add(a.diff(var), b.diff(var)),
            Node::Sub(a, b) => Expr::sub(a.diff(var), b.diff(var)),
            Node::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(var), b.clone()),
                Expr::mul(a.clone(), b.diff(var)),
            ),
            Node::Div(a, b) => {
                let num = Expr::sub(
                    Expr::mul(a.diff(var), b.clone()),
                    Expr::mul(a.clone(), b.diff(var)),
                );
                Expr::div(num, Expr::pow(b.clone(), Expr::constant(2.0)))
            }
            Node::Pow(a, b) => {
                if let Some(e) = b.as_const() {
                    Expr::mul(
                        Expr::mul(
                            Expr::constant(e),
                            Expr::pow(a.clone(), Expr::constant(e - 1.0)),
                        ),
                        a.diff(var),
                    )
                } else {
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    let ln_a = Expr::call(Func::Ln, a.clone());
                    let inner = Expr::add(
                        Expr::mul(b.diff(var), ln_a),
                        Expr::div(Expr::mul(b.clone(), a.diff(var)), a.clone()),
                    );
                    Expr::mul(self.clone(), inner)
                }
            }
            Node::Neg(a) => Expr::neg(a.diff(var)),
            Node::Call(f, a) => {
                let da = a.diff(var);
                if da.is_const(0.0) {
                    return Expr::constant(0.0);
                }
                let outer = match f {
                    Func::Sqrt => Expr::div(Expr::constant(0.5), self.clone()),
                    Func::Exp => self.clone(),
                    Func::Ln => Expr::div(Expr::constant(1.0), a.clone()),
                    Func::Sin => Expr::call(Func::Cos, a.clone()),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, a.clone())),
                };
                Expr::mul(outer, da)
            }
        }
    }

    /// Replace variables by expressions, re-simplifying on the way up.
    pub fn substitute(&self, bindings: &[(&str, Expr)]) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(name) => bindings
                .iter()
                .find(|(n, _)| *n == &**name)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Node::Add(a, b) => Expr::add(a.substitute(bindings), b.substitute(bindings)),
            Node::Sub(a, b) => Expr::sub(a.substitute(bindings), b.substitute(bindings)),
            Node::Mul(a, b) => Expr::mul(a.substitute(bindings), b.substitute(bindings)),
            Node::Div(a, b) => Expr::div(a.substitute(bindings), b.substitute(bindings)),
            Node::Pow(a, b) => Expr::pow(a.substitute(bindings), b.substitute(bindings)),
            Node::Neg(a) => Expr::neg(a.substitute(bindings)),
            Node::Call(f, a) => Expr::call(*f, a.substitute(bindings)),
        }
    }

    /// Names of the free variables, sorted and deduplicated.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e.node() {
                Node::Const(_) => {}
                Node::Var(n) => out.push(n.to_string()),
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Pow(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Node::Neg(a) | Node::Call(_, a) => walk(a, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Number of nodes, counting shared subtrees once per reference.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => 1 + a.size() + b.size(),
            Node::Neg(a) | Node::Call(_, a) => 1 + a.size(),
        }
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            depth: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesize a child when its precedence is below `min`.
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self.node() {
            Node::Const(c) => {
                // No literals for non-finite values; keep them re-parseable.
                if c.is_finite() {
                    write!(f, "{c:?}")
                } else if c.is_nan() {
                    write!(f, "(0.0/0.0)")
                } else if *c > 0.0 {
                    write!(f, "(1.0/0.0)")
                } else {
                    write!(f, "(-1.0/0.0)")
                }
            }
            Node::Var(n) => write!(f, "{n}"),
            Node::Add(a, b) => {
                child(f, a, 1)?;
                write!(f, "+")?;
                child(f, b, 2)
            }
            Node::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, "-")?;
                child(f, b, 2)
            }
            Node::Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 3)
            }
            Node::Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 3)
            }
            Node::Pow(a, b) => {
                child(f, a, 5)?;
                write!(f, "^")?;
                child(f, b, 4)
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                child(f, a, 4)
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

const MAX_DEPTH: usize = 200;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.error("expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::mul(lhs, self.unary()?);
            } else if self.eat(b'/') {
                lhs = Expr::div(lhs, self.unary()?);
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat(b'-') {
            Expr::neg(self.unary()?)
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            Ok(Expr::pow(base, exp))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if self.peek() == Some(b'(') {
                    let func = Func::from_name(name).ok_or_else(|| Error::Parse {
                        pos: start,
                        msg: format!("unknown function `{name}`"),
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.error("expected `)` after function argument"));
                    }
                    Ok(Expr::call(func, arg))
                } else if name == "pi" {
                    Ok(Expr::constant(std::f64::consts::PI))
                } else {
                    Ok(Expr::var(name))
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Expr::constant)
            .map_err(|_| Error::Parse {
                pos: start,
                msg: format!("malformed number `{text}`"),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(src: &str, vars: &[(&str, f64)]) -> f64 {
        Expr::parse(src).unwrap().eval(vars)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1+2*3", &[]), 7.0);
        assert_eq!(ev("2^3^2", &[]), 512.0);
        assert_eq!(ev("-2^2", &[]), -4.0);
        assert_eq!(ev("2^-1", &[]), 0.5);
        assert_eq!(ev("(1-0.9*s^2)", &[("s", 1.0)]), 1.0 - 0.9);
        assert_eq!(ev("8/4/2", &[]), 1.0);
        assert_eq!(ev("1e-3*1000", &[]), 1.0);
    }

    #[test]
    fn parse_errors_carry_position() {
        match Expr::parse("1+*2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Expr::parse("foo(s)").is_err());
        assert!(Expr::parse("(s").is_err());
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("s s").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let src = "(".repeat(10_000) + "s" + &")".repeat(10_000);
        assert!(Expr::parse(&src).is_err());
        let src = "-".repeat(10_000) + "s";
        assert!(Expr::parse(&src).is_err());
    }

    #[test]
    fn derivatives_of_known_functions() {
        let e = Expr::parse("sqrt(1+s^2)").unwrap();
        let d1 = e.diff("s");
        let d2 = d1.diff("s");
        let s = 0.3_f64;
        let phi = (1.0 + s * s).sqrt();
        assert!((d1.eval(&[("s", s)]) - s / phi).abs() < 1e-15);
        assert!((d2.eval(&[("s", s)]) - 1.0 / phi.powi(3)).abs() < 1e-15);

        let e = Expr::parse("exp(2*s)*sin(s)+ln(1+s)-cos(s)").unwrap();
        let d = e.diff("s").eval(&[("s", s)]);
        let want =
            2.0 * (2.0 * s).exp() * s.sin() + (2.0 * s).exp() * s.cos() + 1.0 / (1.0 + s) + s.sin();
        assert!((d - want).abs() < 1e-14);

        // variable exponent
        let e = Expr::parse("u^v").unwrap();
        let d = e.diff("v").eval(&[("u", 2.0), ("v", 3.0)]);
        assert!((d - 8.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn sqrt_squared_collapses_under_substitution() {
        let phi = Expr::parse("1-0.9*s^2").unwrap();
        let w = Expr::parse("v/(u+v)").unwrap();
        let sub = phi.substitute(&[("s", Expr::sqrt(w))]);
        assert!(!sub.to_string().contains("sqrt"), "{sub}");
        let phi = Expr::parse("sqrt(1+s^2)").unwrap();
        let sq = Expr::pow(phi, Expr::constant(2.0));
        assert_eq!(sq.to_string(), "1.0+s^2.0");
    }

    #[test]
    fn display_reparses_to_same_tree() {
        for src in [
            "u+v+(u^2+v^2)^(1/2)",
            "-(s-1)^2",
            "2^(-s)",
            "(u-v)-(u-v)*2",
            "1/(s*(1+s))",
            "-s^2",
            "(-2)^s",
        ] {
            let e = Expr::parse(src).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            assert_eq!(e, back, "{src} -> {e}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-3.0f64..3.0).prop_map(|c| Expr::constant((c * 4.0).round() / 4.0)),
            Just(Expr::var("s")),
            Just(Expr::var("u")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
                (inner.clone(), 0u8..4).prop_map(|(a, k)| Expr::pow(a, Expr::constant(k as f64))),
                inner.clone().prop_map(Expr::neg),
                inner.prop_map(|a| Expr::call(Func::Exp, Expr::mul(Expr::constant(0.1), a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn printing_round_trips(e in arb_expr()) {
            let back = Expr::parse(&e.to_string()).unwrap();
            let vars = [("s", 0.37), ("u", 1.3)];
            let (x, y) = (e.eval(&vars), back.eval(&vars));
            prop_assert!(x == y || (x.is_nan() && y.is_nan()), "{} vs {}", e, back);
        }

        #[test]
        fn symbolic_derivative_matches_central_difference(e in arb_expr()) {
            let s0 = 0.41;
            let f = |s: f64| e.eval(&[("s", s), ("u", 1.3)]);
            let d = e.diff("s").eval(&[("s", s0), ("u", 1.3)]);
            let h = 1e-6;
            let fd = (f(s0 + h) - f(s0 - h)) / (2.0 * h);
            prop_assume!(d.is_finite() && fd.is_finite() && d.abs() < 1e4);
            prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + d.abs()), "{}: {} vs {}", e, d, fd);
        }
    }
}
