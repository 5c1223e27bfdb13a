//! Closed-form symbols given as expressions, evaluated through jets.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::jet::{Jet, JetLayout, JetTable};
use super::PointSymbol;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Complex64),
    /// Index into `(x₁ … x_d, ξ₁ … ξ_d)`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Neg(e) => e.as_const().map(|c| -c),
            _ => None,
        }
    }

    pub fn eval(&self, p: &[f64]) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => Complex64::new(p[*i], 0.0),
            Expr::Neg(a) => -a.eval(p),
            Expr::Add(a, b) => a.eval(p) + b.eval(p),
            Expr::Sub(a, b) => a.eval(p) - b.eval(p),
            Expr::Mul(a, b) => a.eval(p) * b.eval(p),
            Expr::Div(a, b) => a.eval(p) / b.eval(p),
            Expr::Pow(a, b) => match integer_exponent(b) {
                Some(n) if n >= 0 => a.eval(p).powu(n as u32),
                Some(n) => a.eval(p).powu(n.unsigned_abs() as u32).inv(),
                None => a.eval(p).powc(b.eval(p)),
            },
            Expr::Call(f, a) => {
                let v = a.eval(p);
                match f {
                    Func::Exp => v.exp(),
                    Func::Ln => v.ln(),
                    Func::Sqrt => v.sqrt(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                }
            }
        }
    }

    pub fn jet(&self, layout: &Arc<JetLayout>, p: &[f64]) -> Result<Jet> {
        Ok(match self {
            Expr::Const(c) => Jet::constant(layout, *c),
            Expr::Var(i) => Jet::variable(layout, *i, p[*i]),
            Expr::Neg(a) => a.jet(layout, p)?.neg(),
            Expr::Add(a, b) => a.jet(layout, p)?.add(&b.jet(layout, p)?),
            Expr::Sub(a, b) => a.jet(layout, p)?.sub(&b.jet(layout, p)?),
            Expr::Mul(a, b) => a.jet(layout, p)?.mul(&b.jet(layout, p)?),
            Expr::Div(a, b) => a.jet(layout, p)?.div(&b.jet(layout, p)?).map_err(|_| vanish(p))?,
            Expr::Pow(a, b) => {
                let base = a.jet(layout, p)?;
                match (integer_exponent(b), b.as_const()) {
                    (Some(n), _) if n >= 0 => base.powi(n as u32),
                    (Some(n), _) => base.recip().map_err(|_| vanish(p))?.powi(n.unsigned_abs() as u32),
                    (None, Some(c)) => base.powc(c).map_err(|_| vanish(p))?,
                    (None, None) => b.jet(layout, p)?.mul(&base.ln().map_err(|_| vanish(p))?).exp(),
                }
            }
            Expr::Call(f, a) => {
                let u = a.jet(layout, p)?;
                match f {
                    Func::Exp => u.exp(),
                    Func::Ln => u.ln().map_err(|_| vanish(p))?,
                    Func::Sqrt => u.sqrt().map_err(|_| vanish(p))?,
                    Func::Sin | Func::Cos => {
                        let u0 = u.value();
                        let (s, c) = (u0.sin(), u0.cos());
                        // derivatives cycle sin, cos, -sin, -cos
                        let cycle = if *f == Func::Sin { [s, c, -s, -c] } else { [c, -s, -c, s] };
                        let mut coeffs = Vec::new();
                        let mut fact = 1.0;
                        for k in 0..=layout.order() {
                            if k > 0 {
                                fact *= f64::from(k);
                            }
                            coeffs.push(cycle[(k % 4) as usize] / fact);
                        }
                        u.compose_series(&coeffs)
                    }
                }
            }
        })
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }
}

fn vanish(p: &[f64]) -> Error {
    Error::Vanishing { point: Vec::from(p) }
}

fn integer_exponent(e: &Expr) -> Option<i64> {
    let c = e.as_const()?;
    if c.im == 0.0 && num_traits::Float::fract(c.re) == 0.0 && c.re.abs() <= 64.0 {
        Some(c.re as i64)
    } else {
        None
    }
}

/// A symbol given by a closed-form expression in `x` and `ξ`.
///
/// Variables are `x, xi` in one dimension and `x1 … xd, xi1 … xid` in
/// general; for `d = 2` the names `x, y, xi, eta` are accepted as well.
#[derive(Clone, Debug)]
pub struct ExprSymbol {
    d: usize,
    expr: Expr,
    source: String,
}

impl ExprSymbol {
    pub fn parse(source: &str, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::pre("expression symbol", "dimension must be positive"));
        }
        let mut p = Parser { src: source.as_bytes(), pos: 0, d };
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        if let Some(v) = expr.max_var() {
            debug_assert!(v < 2 * d);
        }
        Ok(ExprSymbol { d, expr, source: source.to_string() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl PointSymbol for ExprSymbol {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, point: &[f64]) -> Complex64 {
        self.expr.eval(point)
    }

    fn jets(&self, layout: &Arc<JetLayout>, point: &[f64]) -> Result<JetTable> {
        if point.len() != 2 * self.d || layout.nvars() != 2 * self.d {
            return Err(Error::Dimension { expected: 2 * self.d, found: point.len() });
        }
        Ok(self.expr.jet(layout, point)?.into_table())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    d: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.err("invalid number"))?;
        let v: f64 = text.parse().map_err(|_| Error::Parse { pos: start, msg: format!("invalid number {text:?}") })?;
        Ok(Expr::Const(Complex64::new(v, 0.0)))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let func = match name {
            "exp" => Some(Func::Exp),
            "log" | "ln" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        };
        if let Some(f) = func {
            if !self.eat(b'(') {
                return Err(self.err("expected '(' after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        match name {
            "i" => return Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            "pi" => return Ok(Expr::Const(Complex64::new(core::f64::consts::PI, 0.0))),
            _ => {}
        }
        let d = self.d;
        let var = match (name, d) {
            ("x", 1) => Some(0),
            ("xi", 1) => Some(1),
            ("x", 2) => Some(0),
            ("y", 2) => Some(1),
            ("xi", 2) => Some(2),
            ("eta", 2) => Some(3),
            _ => indexed(name, "xi", d).map(|i| d + i).or_else(|| indexed(name, "x", d)),
        };
        var.map(Expr::Var)
            .ok_or_else(|| Error::Parse { pos: start, msg: format!("unknown identifier {name:?} for d = {d}") })
    }
}

fn indexed(name: &str, prefix: &str, d: usize) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let k: usize = rest.parse().ok()?;
    (1..=d).contains(&k).then(|| k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::jet_eval;

    #[test]
    fn parses_and_evaluates() {
        let s = ExprSymbol::parse("1 + x^2 + xi^2", 1).unwrap();
        assert_eq!(s.eval(&[1.0, 2.0]), Complex64::new(6.0, 0.0));
        let t = ExprSymbol::parse("(xi - y/2)^2 + (eta - x/2)^2", 2).unwrap();
        assert_eq!(t.eval(&[2.0, 2.0, 1.0, 1.0]), Complex64::new(0.0, 0.0));
        let u = ExprSymbol::parse("x1*xi2 - 2.5e-1*i", 2).unwrap();
        assert_eq!(u.eval(&[3.0, 0.0, 0.0, 2.0]), Complex64::new(6.0, -0.25));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(ExprSymbol::parse("x +", 1).is_err());
        assert!(ExprSymbol::parse("x3", 2).is_err());
        assert!(ExprSymbol::parse("foo(x)", 1).is_err());
        assert!(ExprSymbol::parse("(x", 1).is_err());
        assert!(ExprSymbol::parse("x x", 1).is_err());
    }

    #[test]
    fn exp_jet_at_origin() {
        let s = ExprSymbol::parse("exp(x)", 1).unwrap();
        let t = jet_eval(&s, &[0.0, 0.0], 3).unwrap();
        for k in 0..=3 {
            assert!((t.partial(&[k, 0]).unwrap() - 1.0).norm() < 1e-15);
        }
        assert_eq!(t.partial(&[0, 1]).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn trig_and_general_powers() {
        let s = ExprSymbol::parse("sin(x) * x^xi", 1).unwrap();
        let p = [0.7, 1.3];
        let t = jet_eval(&s, &p, 2).unwrap();
        let f = |x: f64, xi: f64| x.sin() * x.powf(xi);
        let h = 1e-4;
        let fd = (f(p[0] + h, p[1] + h) - f(p[0] + h, p[1] - h) - f(p[0] - h, p[1] + h) + f(p[0] - h, p[1] - h))
            / (4.0 * h * h);
        assert!((t.partial(&[1, 1]).unwrap().re - fd).abs() < 1e-6);
    }
}
