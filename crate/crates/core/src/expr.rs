//! Closed-form weight expressions in the index `k`, e.g. `20^(k+1)`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?        right-associative
//! primary := number | 'k' | '(' expr ')'
//! ```

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("expression error at byte {offset}: {message}")]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

impl ExprError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ExprError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    K,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(ExprError::new(p.pos, format!("unexpected '{}'", p.src[p.pos] as char)));
        }
        Ok(e)
    }

    pub fn eval(&self, k: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::K => k,
            Expr::Neg(a) => -a.eval(k),
            Expr::Add(a, b) => a.eval(k) + b.eval(k),
            Expr::Sub(a, b) => a.eval(k) - b.eval(k),
            Expr::Mul(a, b) => a.eval(k) * b.eval(k),
            Expr::Div(a, b) => a.eval(k) / b.eval(k),
            Expr::Pow(a, b) => a.eval(k).powf(b.eval(k)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::K => f.write_str("k"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
        }
    }
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

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == b'*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(ExprError::new(self.pos, "unexpected end of expression")),
            Some(b'k') => {
                self.pos += 1;
                Ok(Expr::K)
            }
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(ExprError::new(self.pos, format!("unclosed '(' opened at byte {open}")));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) => Err(ExprError::new(self.pos, format!("unexpected '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse()
            .map(Expr::Num)
            .map_err(|_| ExprError::new(start, format!("malformed number '{text}'")))
    }
}

/// Parses and evaluates `expr` at `k`.
pub fn eval_weight_expr(expr: &str, k: usize) -> Result<f64, ExprError> {
    Ok(Expr::parse(expr)?.eval(k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_examples() {
        assert_eq!(eval_weight_expr("20^k", 2).unwrap(), 400.0);
        assert_eq!(eval_weight_expr("20^(k+1)", 0).unwrap(), 20.0);
        assert_eq!(eval_weight_expr("1", 17).unwrap(), 1.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval_weight_expr("2^3^2", 0).unwrap(), 512.0);
        assert_eq!(eval_weight_expr("1 + 2 * 3", 0).unwrap(), 7.0);
        assert_eq!(eval_weight_expr("(1 + 2) * 3", 0).unwrap(), 9.0);
        assert_eq!(eval_weight_expr("8 / 4 / 2", 0).unwrap(), 1.0);
        assert_eq!(eval_weight_expr("10 - 3 - 2", 0).unwrap(), 5.0);
        assert_eq!(eval_weight_expr("-2^2", 0).unwrap(), -4.0);
        assert_eq!(eval_weight_expr("2^-1", 0).unwrap(), 0.5);
        assert_eq!(eval_weight_expr(" 0.5 * k ", 4).unwrap(), 2.0);
    }

    #[test]
    fn large_powers() {
        assert_eq!(eval_weight_expr("20^k", 80).unwrap(), 20f64.powf(80.0));
        assert_eq!(eval_weight_expr("(0-2)^3", 0).unwrap(), -8.0);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = eval_weight_expr("20^", 0).unwrap_err();
        assert_eq!(e.offset, 3);
        let e = eval_weight_expr("2 * x", 0).unwrap_err();
        assert_eq!(e.offset, 4);
        let e = eval_weight_expr("(k + 1", 0).unwrap_err();
        assert_eq!(e.offset, 6);
        assert!(e.message.contains("unclosed"));
        let e = eval_weight_expr("1 2", 0).unwrap_err();
        assert_eq!(e.offset, 2);
        let e = eval_weight_expr("", 0).unwrap_err();
        assert_eq!(e.offset, 0);
        let e = eval_weight_expr("1.2.3", 0).unwrap_err();
        assert_eq!(e.offset, 3);
    }

    /// Random trees over the grammar, with a direct evaluator as oracle.
    #[derive(Debug, Clone)]
    enum Tree {
        Lit(u32),
        K,
        Bin(char, Box<Tree>, Box<Tree>),
        Neg(Box<Tree>),
    }

    impl Tree {
        fn render(&self) -> String {
            match self {
                Tree::Lit(v) => v.to_string(),
                Tree::K => "k".into(),
                Tree::Neg(a) => format!("-({})", a.render()),
                Tree::Bin(op, a, b) => format!("({}) {} ({})", a.render(), op, b.render()),
            }
        }

        fn value(&self, k: f64) -> f64 {
            match self {
                Tree::Lit(v) => *v as f64,
                Tree::K => k,
                Tree::Neg(a) => -a.value(k),
                Tree::Bin(op, a, b) => {
                    let (x, y) = (a.value(k), b.value(k));
                    match op {
                        '+' => x + y,
                        '-' => x - y,
                        '*' => x * y,
                        '/' => x / y,
                        _ => x.powf(y),
                    }
                }
            }
        }
    }

    fn tree() -> impl Strategy<Value = Tree> {
        let leaf = prop_oneof![(0u32..30).prop_map(Tree::Lit), Just(Tree::K)];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (prop::sample::select(vec!['+', '-', '*', '/', '^']), inner.clone(), inner.clone())
                    .prop_map(|(op, a, b)| Tree::Bin(op, Box::new(a), Box::new(b))),
                inner.prop_map(|a| Tree::Neg(Box::new(a))),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn evaluator_matches_direct_arithmetic(t in tree(), k in 0usize..50) {
            let got = eval_weight_expr(&t.render(), k).unwrap();
            let want = t.value(k as f64);
            prop_assert!(got == want || (got.is_nan() && want.is_nan()), "{} -> {} vs {}", t.render(), got, want);
        }

        #[test]
        fn display_round_trips(t in tree()) {
            let e = Expr::parse(&t.render()).unwrap();
            let again = Expr::parse(&e.to_string()).unwrap();
            prop_assert_eq!(e, again);
        }
    }
}
