//! Scalar phase-space symbols `sigma(x, p)` written as arithmetic expressions.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right associative)
//! primary := number | 'x' | 'p' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | tanh | sqrt | abs
//! ```

use std::fmt;

use thiserror::Error;

pub const MAX_EXPR_LEN: usize = 4096;
pub const DEFAULT_GRAD_STEP: f64 = 1e-5;
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("expression longer than {MAX_EXPR_LEN} characters")]
    TooLong,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("unbalanced parentheses at offset {offset}")]
    Unbalanced { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Unbalanced { offset } => Some(*offset),
            ParseError::Empty | ParseError::TooLong => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error in {func}({arg})")]
    Domain { func: &'static str, arg: f64 },
    #[error("non-finite result")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, a: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Exp => a.exp(),
            Func::Tanh => a.tanh(),
            Func::Sqrt => {
                if a < 0.0 {
                    return Err(EvalError::Domain { func: "sqrt", arg: a });
                }
                a.sqrt()
            }
            Func::Abs => a.abs(),
        })
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
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    P,
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, p: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::P => p,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(a) => -a.eval(x, p)?,
            Expr::Call(f, a) => f.apply(a.eval(x, p)?)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(x, p)?, b.eval(x, p)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(EvalError::Domain { func: "pow", arg: a });
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a.powf(b)
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Central-difference gradient `(d/dx, d/dp)`.
    pub fn grad(&self, x: f64, p: f64, h: f64) -> Result<(f64, f64), EvalError> {
        let dx = (self.eval(x + h, p)? - self.eval(x - h, p)?) / (2.0 * h);
        let dp = (self.eval(x, p + h)? - self.eval(x, p - h)?) / (2.0 * h);
        Ok((dx, dp))
    }

    /// Central-difference Hessian, symmetrized.
    pub fn hessian(&self, x: f64, p: f64, h: f64) -> Result<[[f64; 2]; 2], EvalError> {
        let f0 = self.eval(x, p)?;
        let h2 = h * h;
        let hxx = (self.eval(x + h, p)? - 2.0 * f0 + self.eval(x - h, p)?) / h2;
        let hpp = (self.eval(x, p + h)? - 2.0 * f0 + self.eval(x, p - h)?) / h2;
        let pp = self.eval(x + h, p + h)?;
        let pm = self.eval(x + h, p - h)?;
        let mp = self.eval(x - h, p + h)?;
        let mm = self.eval(x - h, p - h)?;
        // the two one-sided orderings of the mixed stencil
        let hxp = ((pp - mp) - (pm - mm)) / (4.0 * h2);
        let hpx = ((pp - pm) - (mp - mm)) / (4.0 * h2);
        let off = 0.5 * (hxp + hpx);
        Ok([[hxx, off], [off, hpp]])
    }

    pub fn depends_on_x(&self) -> bool {
        self.any(&|e| matches!(e, Expr::X))
    }

    pub fn depends_on_p(&self) -> bool {
        self.any(&|e| matches!(e, Expr::P))
    }

    fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Num(_) | Expr::X | Expr::P | Expr::Pi => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.any(pred),
            Expr::Binary(_, a, b) => a.any(pred) || b.any(pred),
        }
    }
}

/// Canonical, fully parenthesized form; re-parses to an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => f.write_str("x"),
            Expr::P => f.write_str("p"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.chars().count() > MAX_EXPR_LEN {
        return Err(ParseError::TooLong);
    }
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = parser.expr()?;
    match parser.peek() {
        None => Ok(e),
        Some((off, Tok::RParen)) => Err(ParseError::Unbalanced { offset: off }),
        Some((off, t)) => Err(ParseError::Syntax {
            offset: off,
            message: format!("unexpected {}", t.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Tok::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
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
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number '{lit}'"),
                })?;
                out.push((start, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: i,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Tok)> {
        self.tokens.get(self.pos).map(|(o, t)| (*o, t))
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |(o, _)| o)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some((_, Tok::Op(c))) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some((_, Tok::RParen)) => {
                self.pos += 1;
                Ok(())
            }
            None => Err(ParseError::Unbalanced { offset: self.end }),
            Some((off, t)) => Err(ParseError::Syntax {
                offset: off,
                message: format!("expected ')' but found {}", t.describe()),
            }),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        let Some((_, tok)) = self.peek() else {
            return Err(ParseError::Syntax {
                offset: off,
                message: "unexpected end of expression".into(),
            });
        };
        let tok = tok.clone();
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::RParen => Err(ParseError::Unbalanced { offset: off }),
            Tok::Op(c) => Err(ParseError::Syntax {
                offset: off,
                message: format!("unexpected '{c}'"),
            }),
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "p" => Ok(Expr::P),
                "pi" => Ok(Expr::Pi),
                _ => {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(ParseError::UnknownIdentifier { offset: off, name });
                    };
                    match self.peek() {
                        Some((_, Tok::LParen)) => self.pos += 1,
                        _ => {
                            return Err(ParseError::Syntax {
                                offset: self.offset(),
                                message: format!("expected '(' after {}", func.name()),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            },
        }
    }
}

/// Sampled growth of a symbol toward the edge of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthWarning {
    pub inner_max_value: f64,
    pub outer_max_value: f64,
    pub inner_max_hessian: f64,
    pub outer_max_hessian: f64,
}

impl fmt::Display for GrowthWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "perturbation grows toward the sampled box boundary (|sigma|: {:.3e} -> {:.3e}, \
             |Hess sigma|: {:.3e} -> {:.3e}); boundedness assumptions may fail outside the box",
            self.inner_max_value,
            self.outer_max_value,
            self.inner_max_hessian,
            self.outer_max_hessian
        )
    }
}

fn spectral_norm_sym(h: &[[f64; 2]; 2]) -> f64 {
    let (a, b, d) = (h[0][0], h[0][1], h[1][1]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean + rad).abs().max((mean - rad).abs())
}

/// Heuristic boundedness probe: samples `|sigma|` and the Hessian norm on the
/// inner half and the outer ring of `box_` and reports when either grows by
/// more than a factor of two toward the boundary. Never a hard error.
pub fn check_growth(
    e: &Expr,
    box_: [f64; 4],
    samples: usize,
) -> Result<Option<GrowthWarning>, EvalError> {
    let [x0, x1, p0, p1] = box_;
    let samples = samples.max(4);
    let (cx, cp) = (0.5 * (x0 + x1), 0.5 * (p0 + p1));
    let (hx, hp) = (0.5 * (x1 - x0), 0.5 * (p1 - p0));
    let mut inner = (0.0f64, 0.0f64);
    let mut outer = (0.0f64, 0.0f64);
    for i in 0..samples {
        for j in 0..samples {
            let x = x0 + (x1 - x0) * i as f64 / (samples - 1) as f64;
            let p = p0 + (p1 - p0) * j as f64 / (samples - 1) as f64;
            let v = e.eval(x, p)?.abs();
            let h = spectral_norm_sym(&e.hessian(x, p, DEFAULT_HESSIAN_STEP)?);
            let r = ((x - cx).abs() / hx.max(f64::MIN_POSITIVE))
                .max((p - cp).abs() / hp.max(f64::MIN_POSITIVE));
            let slot = if r <= 0.5 { &mut inner } else { &mut outer };
            slot.0 = slot.0.max(v);
            slot.1 = slot.1.max(h);
        }
    }
    let grows = |a: f64, b: f64| b > 2.0 * a + 1e-12;
    if grows(inner.0, outer.0) || grows(inner.1, outer.1) {
        Ok(Some(GrowthWarning {
            inner_max_value: inner.0,
            outer_max_value: outer.0,
            inner_max_hessian: inner.1,
            outer_max_hessian: outer.1,
        }))
    } else {
        Ok(None)
    }
}
