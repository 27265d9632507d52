//! Polynomial expressions over `x1..xn`.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := rational | 'x' index | '(' expr ')'
//! ```

use critmul::{Polynomial, Rat};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {pos}")]
pub struct ExprError {
    pub pos: usize,
    pub message: String,
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError { pos, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(Rat),
    /// Zero-based variable index.
    Var(usize),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, u32),
}

impl ExprAst {
    pub fn to_polynomial(&self, n: usize) -> Polynomial {
        match self {
            ExprAst::Num(c) => Polynomial::constant(c.clone(), n),
            ExprAst::Var(i) => Polynomial::var(*i, n),
            ExprAst::Neg(a) => a.to_polynomial(n).neg(),
            ExprAst::Add(a, b) => a.to_polynomial(n).add(&b.to_polynomial(n)),
            ExprAst::Sub(a, b) => a.to_polynomial(n).sub(&b.to_polynomial(n)),
            ExprAst::Mul(a, b) => a.to_polynomial(n).mul(&b.to_polynomial(n)),
            ExprAst::Pow(a, k) => a.to_polynomial(n).pow(*k),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = match self.peek() {
            Some('-') => {
                self.pos += 1;
                ExprAst::Neg(Box::new(self.term()?))
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' { ExprAst::Add(Box::new(lhs), Box::new(rhs)) } else { ExprAst::Sub(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.base()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let at = self.pos;
        if self.src[self.pos..].starts_with('-') {
            return err(at, "negative exponent");
        }
        let d = self.digits();
        if d.is_empty() {
            return err(at, "expected a nonnegative integer exponent");
        }
        let k: u32 = d.parse().map_err(|_| ExprError { pos: at, message: "exponent too large".into() })?;
        if self.src[self.pos..].starts_with(['.', '/']) {
            return err(at, "fractional exponent");
        }
        Ok(ExprAst::Pow(Box::new(base), k))
    }

    fn base(&mut self) -> Result<ExprAst, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return err(self.pos, "expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some('x') => {
                self.pos += 1;
                let at = self.pos;
                let d = self.digits();
                let i: usize = d.parse().map_err(|_| ExprError { pos: at, message: "expected a variable index".into() })?;
                if i == 0 || i > self.n {
                    return err(at, format!("variable x{i} out of range 1..{}", self.n));
                }
                Ok(ExprAst::Var(i - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                self.digits();
                if self.src[self.pos..].starts_with('/') || self.src[self.pos..].starts_with('.') {
                    self.pos += 1;
                    if self.digits().is_empty() {
                        return err(self.pos, "malformed number");
                    }
                }
                let text = &self.src[start..self.pos];
                let r: Rat = text.parse().map_err(|_| ExprError { pos: start, message: format!("bad number {text:?}") })?;
                Ok(ExprAst::Num(r))
            }
            Some(c) => err(self.pos, format!("unexpected {c:?}")),
            None => err(self.pos, "unexpected end of input"),
        }
    }
}

pub fn parse_expression(text: &str, n: usize) -> Result<ExprAst, ExprError> {
    let mut p = Parser { src: text, pos: 0, n };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return err(p.pos, format!("unexpected {c:?}"));
    }
    Ok(e)
}

pub fn parse_polynomial(text: &str, n: usize) -> Result<Polynomial, ExprError> {
    Ok(parse_expression(text, n)?.to_polynomial(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(parse_polynomial("x1^2 + 2*x1*x2", 2).unwrap().to_string(), "x1^2 + 2*x1*x2");
        assert_eq!(parse_polynomial("-x1", 1).unwrap().to_string(), "-x1");
        assert_eq!(parse_polynomial("1/2*x1^2 - 3", 1).unwrap().to_string(), "1/2*x1^2 - 3");
        assert_eq!(parse_polynomial("(x1 - x2)^2 - x1^2", 2).unwrap().to_string(), "-2*x1*x2 + x2^2");
        assert_eq!(parse_polynomial("0.25*x1 + 0", 1).unwrap().to_string(), "1/4*x1");
        assert_eq!(parse_polynomial("  0 ", 3).unwrap().to_string(), "0");
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_expression("x3", 2).unwrap_err().pos, 1);
        assert!(parse_expression("x1^-1", 1).unwrap_err().message.contains("negative"));
        assert!(parse_expression("x1^1/2", 1).unwrap_err().message.contains("fractional"));
        assert_eq!(parse_expression("x1 + * x1", 1).unwrap_err().pos, 5);
        assert!(parse_expression("(x1", 1).is_err());
        assert!(parse_expression("x1 x1", 1).is_err());
        assert!(parse_expression("", 1).is_err());
    }
}
