//! A small expression language for maps `f: R -> R`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' integer)?
//! primary := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func    := 'exp' | 'sin' | 'cos' | 'abs'
//! integer := '-'? digits | '(' '-'? digits ')'
//! ```
//!
//! Exponents are integer constants only, and a literal zero is rejected as a
//! denominator at parse time.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

use crate::num::powi;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Sin,
    Cos,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parsed expression tree. Every leaf is a constant or the variable `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax { offset: usize, message: String },
    UnknownIdentifier { offset: usize, name: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, message } => {
                write!(f, "syntax error at offset {offset}: {message}")
            }
            ParseError::UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{name}` at offset {offset}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalError {
    /// Division by zero, or an operation that produced NaN, at this `x`.
    Domain { x: f64 },
    /// The value is not representable as a finite double.
    Overflow { x: f64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Domain { x } => write!(f, "domain error evaluating at x = {x}"),
            EvalError::Overflow { x } => write!(f, "overflow evaluating at x = {x}"),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0 };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(match byte {
                b'(' => "expected `(`",
                b')' => "expected `)`",
                _ => "unexpected token",
            }))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinaryOp::Add,
                Some(b'-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinaryOp::Mul,
                Some(b'/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            self.skip_ws();
            let rhs_offset = self.pos;
            let rhs = self.unary()?;
            if op == BinaryOp::Div && rhs.is_literal_zero() {
                return Err(ParseError::Syntax {
                    offset: rhs_offset,
                    message: "division by a literal zero".to_string(),
                });
            }
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.pos += 1;
        }
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("exponent must be an integer constant"));
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'.' | b'e' | b'E') {
            return Err(self.syntax("exponent must be an integer constant"));
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let magnitude: i32 = digits
            .parse()
            .map_err(|_| ParseError::Syntax { offset: start, message: "exponent out of range".to_string() })?;
        if parenthesized {
            self.expect(b')')?;
        }
        let exponent = if negative { -magnitude } else { magnitude };
        Ok(Expr::Pow(Box::new(base), exponent))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.syntax("unexpected token")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src;
        let mut end = start;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        // Optional exponent, only when digits follow (so `2e` is not a number).
        if end < bytes.len() && matches!(bytes[end], b'e' | b'E') {
            let mut probe = end + 1;
            if probe < bytes.len() && matches!(bytes[probe], b'+' | b'-') {
                probe += 1;
            }
            if probe < bytes.len() && bytes[probe].is_ascii_digit() {
                while probe < bytes.len() && bytes[probe].is_ascii_digit() {
                    probe += 1;
                }
                end = probe;
            }
        }
        let text = core::str::from_utf8(&bytes[start..end]).unwrap_or("");
        let value: f64 =
            text.parse().map_err(|_| ParseError::Syntax { offset: start, message: "malformed number".to_string() })?;
        self.pos = end;
        Ok(Expr::Const(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let op = match name {
            "x" => return Ok(Expr::Var),
            "exp" => UnaryOp::Exp,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "abs" => UnaryOp::Abs,
            _ => return Err(ParseError::UnknownIdentifier { offset: start, name: name.to_string() }),
        };
        self.expect(b'(')?;
        let arg = self.expr()?;
        self.expect(b')')?;
        Ok(Expr::Unary(op, Box::new(arg)))
    }
}

impl Expr {
    fn is_literal_zero(&self) -> bool {
        match self {
            Expr::Const(c) => *c == 0.0,
            Expr::Unary(UnaryOp::Neg, inner) => inner.is_literal_zero(),
            _ => false,
        }
    }

    /// Evaluates without the finiteness check; infinities propagate so that
    /// root finders can still order them. NaN is reported as a domain error.
    pub fn eval_raw(&self, x: f64) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Unary(op, inner) => {
                let v = inner.eval_raw(x)?;
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Exp => libm::exp(v),
                    UnaryOp::Sin => libm::sin(v),
                    UnaryOp::Cos => libm::cos(v),
                    UnaryOp::Abs => libm::fabs(v),
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_raw(x)?;
                let b = rhs.eval_raw(x)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::Domain { x });
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(base, n) => {
                let b = base.eval_raw(x)?;
                if b == 0.0 && *n < 0 {
                    return Err(EvalError::Domain { x });
                }
                powi(b, *n)
            }
        };
        if value.is_nan() {
            return Err(EvalError::Domain { x });
        }
        Ok(value)
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let value = self.eval_raw(x)?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::Overflow { x })
        }
    }

    /// Returns `c` when the expression is syntactically a translation
    /// `x + c`, `c + x` or `x - c` with constant `c` (after folding
    /// constant subtrees).
    pub fn translation_offset(&self) -> Option<f64> {
        match self {
            Expr::Binary(BinaryOp::Add, lhs, rhs) => match (lhs.as_ref(), rhs.as_ref()) {
                (Expr::Var, c) | (c, Expr::Var) => c.fold_constant(),
                (inner, c) => Some(inner.translation_offset()? + c.fold_constant()?),
            },
            Expr::Binary(BinaryOp::Sub, lhs, rhs) => {
                let c = rhs.fold_constant()?;
                match lhs.as_ref() {
                    Expr::Var => Some(-c),
                    inner => Some(inner.translation_offset()? - c),
                }
            }
            _ => None,
        }
    }

    /// An expression for `f(x) - x`. When `x` appears as a bare summand it
    /// is dropped symbolically, so the displacement keeps full relative
    /// precision where it is tiny next to `x`.
    pub fn displacement(&self) -> Expr {
        self.drop_var_summand()
            .unwrap_or_else(|| Expr::Binary(BinaryOp::Sub, Box::new(self.clone()), Box::new(Expr::Var)))
    }

    fn drop_var_summand(&self) -> Option<Expr> {
        match self {
            Expr::Var => Some(Expr::Const(0.0)),
            Expr::Binary(BinaryOp::Add, lhs, rhs) => {
                if let Some(l) = lhs.drop_var_summand() {
                    Some(Expr::Binary(BinaryOp::Add, Box::new(l), rhs.clone()))
                } else {
                    let r = rhs.drop_var_summand()?;
                    Some(Expr::Binary(BinaryOp::Add, lhs.clone(), Box::new(r)))
                }
            }
            Expr::Binary(BinaryOp::Sub, lhs, rhs) => {
                let l = lhs.drop_var_summand()?;
                Some(Expr::Binary(BinaryOp::Sub, Box::new(l), rhs.clone()))
            }
            _ => None,
        }
    }

    fn fold_constant(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Var => None,
            _ => {
                if self.contains_var() {
                    None
                } else {
                    self.eval(0.0).ok()
                }
            }
        }
    }

    fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Unary(_, inner) | Expr::Pow(inner, _) => inner.contains_var(),
            Expr::Binary(_, lhs, rhs) => lhs.contains_var() || rhs.contains_var(),
        }
    }
}

pub fn eval_expr(expr: &Expr, x: f64) -> Result<f64, EvalError> {
    expr.eval(x)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => f.write_str("x"),
            Expr::Unary(UnaryOp::Neg, inner) => write!(f, "(-{inner})"),
            Expr::Unary(op, inner) => {
                let name = match op {
                    UnaryOp::Exp => "exp",
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Abs => "abs",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({inner})")
            }
            Expr::Binary(op, lhs, rhs) => {
                let sym = match op {
                    BinaryOp::Add => '+',
                    BinaryOp::Sub => '-',
                    BinaryOp::Mul => '*',
                    BinaryOp::Div => '/',
                };
                write!(f, "({lhs} {sym} {rhs})")
            }
            Expr::Pow(base, n) => write!(f, "{base}^({n})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b))
    }

    #[test]
    fn parses_translation() {
        assert_eq!(parse_expr("x + 3").unwrap(), add(Expr::Var, Expr::Const(3.0)));
    }

    #[test]
    fn parses_function_call() {
        let expected = add(Expr::Var, Expr::Unary(UnaryOp::Exp, Box::new(Expr::Var)));
        assert_eq!(parse_expr("x + exp(x)").unwrap(), expected);
    }

    #[test]
    fn rejects_double_operator_at_offset() {
        match parse_expr("x + + 3") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_identifier() {
        match parse_expr("x + tan(x)") {
            Err(ParseError::UnknownIdentifier { offset, name }) => {
                assert_eq!(offset, 4);
                assert_eq!(name, "tan");
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
    }

    #[test]
    fn rejects_literal_zero_denominator() {
        assert!(matches!(parse_expr("x / 0"), Err(ParseError::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expr("x / -0.0"), Err(ParseError::Syntax { .. })));
        assert!(parse_expr("x / (x - x + 1)").is_ok());
    }

    #[test]
    fn rejects_non_integer_exponent() {
        assert!(parse_expr("x^0.5").is_err());
        assert!(parse_expr("x^x").is_err());
        assert_eq!(parse_expr("x^(-2)").unwrap(), Expr::Pow(Box::new(Expr::Var), -2));
        assert_eq!(parse_expr("x^-2").unwrap(), Expr::Pow(Box::new(Expr::Var), -2));
    }

    #[test]
    fn rejects_trailing_and_truncated_input() {
        assert!(parse_expr("x 3").is_err());
        assert!(parse_expr("x +").is_err());
        assert!(parse_expr("exp(x").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2 + 2*3").unwrap();
        assert_eq!(e.eval(3.0).unwrap(), -3.0);
        let e = parse_expr("2 - 3 - 4").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), -5.0);
        let e = parse_expr("8 / 2 / 2").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 2.0);
    }

    #[test]
    fn evaluates_examples() {
        assert_eq!(parse_expr("x + 3").unwrap().eval(2.0).unwrap(), 5.0);
        assert_eq!(parse_expr("x + exp(x)").unwrap().eval(0.0).unwrap(), 1.0);
        assert_eq!(parse_expr("x + 0.5 + 0.4*sin(x)").unwrap().eval(0.0).unwrap(), 0.5);
        assert_eq!(parse_expr("1.5e2 + x").unwrap().eval(0.0).unwrap(), 150.0);
    }

    #[test]
    fn eval_errors() {
        let e = parse_expr("1 / x").unwrap();
        assert_eq!(e.eval(0.0), Err(EvalError::Domain { x: 0.0 }));
        let e = parse_expr("exp(x)").unwrap();
        assert_eq!(e.eval(1000.0), Err(EvalError::Overflow { x: 1000.0 }));
        assert_eq!(e.eval_raw(1000.0), Ok(f64::INFINITY));
    }

    #[test]
    fn translation_detection() {
        assert_eq!(parse_expr("x + 3").unwrap().translation_offset(), Some(3.0));
        assert_eq!(parse_expr("3 + x").unwrap().translation_offset(), Some(3.0));
        assert_eq!(parse_expr("x - 1").unwrap().translation_offset(), Some(-1.0));
        assert_eq!(parse_expr("x + 1 + 2").unwrap().translation_offset(), Some(3.0));
        assert_eq!(parse_expr("x + exp(1)").unwrap().translation_offset(), Some(libm::exp(1.0)));
        assert_eq!(parse_expr("x + exp(x)").unwrap().translation_offset(), None);
        assert_eq!(parse_expr("2*x + 1").unwrap().translation_offset(), None);
    }

    #[test]
    fn display_reparses_to_same_values() {
        for text in ["x + 0.5 + 0.4*sin(x)", "-x^3 / (1 + abs(x))", "cos(x) - 2*x"] {
            let e = parse_expr(text).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            for x in [-2.5, 0.0, 1.25] {
                assert_eq!(e.eval(x).unwrap(), again.eval(x).unwrap());
            }
        }
    }
}
