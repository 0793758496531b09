//! Parser for polynomial and matrix expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-'? base ('^' nat)?
//! base   := rational | 'J' | 'hbar' | var | '(' expr ')' | matrix
//! var    := ('q' | 'p') digits?
//! matrix := '[' row (',' row)* ']'
//! row    := '[' expr (',' expr)* ']'
//! ```
//!
//! The printers of [`PhasePoly`] and [`SquareMatrix`] emit this grammar, so
//! parsing a printed element gives it back.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::phase::{Monomial, PhasePoly};
use crate::scalar::{Epsilon, PairScalar, Rational};

/// A parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Phase(PhasePoly),
    Matrix(SquareMatrix),
}

impl Parsed {
    pub fn into_phase(self) -> Result<PhasePoly> {
        match self {
            Parsed::Phase(p) => Ok(p),
            Parsed::Matrix(_) => Err(Error::KindMismatch { left: "phase", right: "matrix" }),
        }
    }

    pub fn into_matrix(self) -> Result<SquareMatrix> {
        match self {
            Parsed::Matrix(m) => Ok(m),
            Parsed::Phase(_) => Err(Error::KindMismatch { left: "matrix", right: "phase" }),
        }
    }
}

/// Parses `text` with scalars of class `eps`. Polynomials live on
/// `max(dof, highest variable index)` degrees of freedom, at least one.
pub fn parse_expression(text: &str, eps: Epsilon, dof: Option<usize>) -> Result<Parsed> {
    let tokens = lex(text)?;
    let mut n = dof.unwrap_or(1).max(1);
    for t in &tokens {
        if let Tok::Var(_, i) = t.kind {
            n = n.max(i + 1);
        }
    }
    let mut p = Parser { tokens, pos: 0, eps, n, end: text.len() };
    let v = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(match v {
        Value::Poly(x) => Parsed::Phase(x),
        Value::Matrix(m) => Parsed::Matrix(m),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(char, usize),
    J,
    Hbar,
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push(Token { kind: Tok::Num(n), offset: start });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let word_end = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let word = &text[start..word_end];
            let digits = &text[word_end..i];
            let kind = match (word, digits) {
                ("J", "") => Tok::J,
                ("hbar", "") => Tok::Hbar,
                ("q" | "p", "") => Tok::Var(word.chars().next().expect("nonempty"), 0),
                ("q" | "p", d) => match d.parse::<usize>() {
                    Ok(k) if k >= 1 => Tok::Var(word.chars().next().expect("nonempty"), k - 1),
                    _ => return Err(Error::UnknownIdentifier { offset: start, name: text[start..i].into() }),
                },
                _ => return Err(Error::UnknownIdentifier { offset: start, name: text[start..i].into() }),
            };
            out.push(Token { kind, offset: start });
        } else if "+-*/^()[],".contains(c) {
            out.push(Token { kind: Tok::Sym(c), offset: i });
            i += 1;
        } else {
            return Err(Error::Syntax { offset: i, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

enum Value {
    Poly(PhasePoly),
    Matrix(SquareMatrix),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eps: Epsilon,
    n: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax { offset: self.offset(), message: message.into() }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn scalar(&self, c: PairScalar) -> Value {
        Value::Poly(PhasePoly::constant(self.n, c))
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            let at = self.offset();
            let neg = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Ok(acc);
            };
            let mut rhs = self.term()?;
            if neg {
                rhs = negate(rhs);
            }
            acc = combine(acc, rhs, at, Op::Add)?;
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        loop {
            let at = self.offset();
            if !self.eat('*') {
                return Ok(acc);
            }
            let rhs = self.factor()?;
            acc = combine(acc, rhs, at, Op::Mul)?;
        }
    }

    fn factor(&mut self) -> Result<Value> {
        if self.eat('-') {
            return Ok(negate(self.factor()?));
        }
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let k = match self.peek() {
            Some(Tok::Num(k)) => u32::try_from(k.clone()).map_err(|_| self.error("exponent too large"))?,
            _ => return Err(self.error("expected a natural exponent")),
        };
        self.pos += 1;
        Ok(match base {
            Value::Poly(p) => Value::Poly(p.pow(k)),
            Value::Matrix(m) => Value::Matrix(m.pow(k)),
        })
    }

    fn base(&mut self) -> Result<Value> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        match tok {
            Tok::Num(num) => {
                self.pos += 1;
                let mut den = BigInt::one();
                if self.eat('/') {
                    match self.peek() {
                        Some(Tok::Num(d)) if *d != BigInt::from(0) => den = d.clone(),
                        _ => return Err(self.error("expected a nonzero denominator")),
                    }
                    self.pos += 1;
                }
                Ok(self.scalar(PairScalar::real(Rational::new(num, den), self.eps)))
            }
            Tok::J => {
                self.pos += 1;
                Ok(self.scalar(PairScalar::unit_u(self.eps)))
            }
            Tok::Hbar => {
                self.pos += 1;
                Ok(Value::Poly(PhasePoly::hbar(self.n, self.eps)))
            }
            Tok::Var(c, i) => {
                self.pos += 1;
                Ok(Value::Poly(if c == 'q' { PhasePoly::q(self.n, i, self.eps) } else { PhasePoly::p(self.n, i, self.eps) }))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Sym('[') => self.matrix(),
            Tok::Sym(_) => Err(self.error("expected a number, variable, `(` or `[`")),
        }
    }

    fn matrix(&mut self) -> Result<Value> {
        let start = self.offset();
        self.expect('[')?;
        let mut rows: Vec<Vec<PairScalar>> = Vec::new();
        loop {
            self.expect('[')?;
            let mut row = Vec::new();
            loop {
                let at = self.offset();
                match self.expr()? {
                    Value::Poly(p) if p.is_constant() => row.push(p.coefficient(&Monomial::one(self.n))),
                    _ => return Err(Error::Syntax { offset: at, message: "matrix entries must be scalars".into() }),
                }
                if !self.eat(',') {
                    break;
                }
            }
            self.expect(']')?;
            rows.push(row);
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Syntax { offset: start, message: "matrix must be square".into() });
        }
        Ok(Value::Matrix(SquareMatrix::new(dim, self.eps, rows.into_iter().flatten().collect())?))
    }
}

fn negate(v: Value) -> Value {
    match v {
        Value::Poly(p) => Value::Poly(p.neg()),
        Value::Matrix(m) => Value::Matrix(m.neg()),
    }
}

enum Op {
    Add,
    Mul,
}

fn combine(a: Value, b: Value, offset: usize, op: Op) -> Result<Value> {
    let mixed = || Error::Syntax { offset, message: "cannot combine a matrix with a non-constant polynomial".into() };
    Ok(match (a, b, op) {
        (Value::Poly(x), Value::Poly(y), Op::Add) => Value::Poly(x.add(&y)?),
        (Value::Poly(x), Value::Poly(y), Op::Mul) => Value::Poly(x.mul(&y)?),
        (Value::Matrix(x), Value::Matrix(y), Op::Add) => Value::Matrix(x.add(&y)?),
        (Value::Matrix(x), Value::Matrix(y), Op::Mul) => Value::Matrix(x.matmul(&y)?),
        (Value::Poly(s), Value::Matrix(m), Op::Mul) | (Value::Matrix(m), Value::Poly(s), Op::Mul) => {
            if !s.is_constant() {
                return Err(mixed());
            }
            let c = s.coefficient(&Monomial::one(s.dof()));
            Value::Matrix(m.scale(&c)?)
        }
        (Value::Poly(s), Value::Matrix(m), Op::Add) | (Value::Matrix(m), Value::Poly(s), Op::Add) => {
            if !s.is_constant() {
                return Err(mixed());
            }
            let c = s.coefficient(&Monomial::one(s.dof()));
            let id = SquareMatrix::identity(m.dim(), m.eps()).scale(&c)?;
            Value::Matrix(m.add(&id)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const E: Epsilon = Epsilon::Minus;

    #[test]
    fn polynomial_with_two_terms() {
        let p = parse_expression("q^2*p - 1/2*hbar", E, None).unwrap().into_phase().unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.dof(), 1);
        let q = PhasePoly::q(1, 0, E);
        let want = q.mul(&q).unwrap().mul(&PhasePoly::p(1, 0, E)).unwrap().sub(&PhasePoly::hbar(1, E).scale_rational(&rat(1, 2))).unwrap();
        assert_eq!(p, want);
    }

    #[test]
    fn pauli_x_literal() {
        let m = parse_expression("[[0,1],[1,0]]", E, None).unwrap().into_matrix().unwrap();
        assert_eq!(m, SquareMatrix::pauli_x(E));
    }

    #[test]
    fn dangling_caret() {
        assert_eq!(
            parse_expression("q^", E, None).unwrap_err(),
            Error::Syntax { offset: 2, message: "expected a natural exponent".into() }
        );
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse_expression("q + x2", E, None).unwrap_err(),
            Error::UnknownIdentifier { offset: 4, name: "x2".into() }
        );
        assert!(matches!(parse_expression("q0", E, None), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn other_errors() {
        assert!(matches!(parse_expression("(q", E, None), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expression("[[1,2],[3]]", E, None), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expression("[[q]]", E, None), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expression("1/0", E, None), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression("q $", E, None), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expression("q q", E, None), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn j_squares_to_the_class() {
        for eps in Epsilon::ALL {
            let p = parse_expression("J^2", eps, None).unwrap().into_phase().unwrap();
            assert_eq!(p, PhasePoly::constant(1, PairScalar::real(eps.as_rational(), eps)));
        }
    }

    #[test]
    fn indexed_variables_set_dof() {
        let p = parse_expression("q1*p3 + 2", E, None).unwrap().into_phase().unwrap();
        assert_eq!(p.dof(), 3);
        let p = parse_expression("q", E, Some(2)).unwrap().into_phase().unwrap();
        assert_eq!(p, PhasePoly::q(2, 0, E));
    }

    #[test]
    fn scalar_matrix_arithmetic() {
        let m = parse_expression("2*[[1,0],[0,1]] - [[0,J],[J,0]]^2", E, None).unwrap().into_matrix().unwrap();
        assert_eq!(m, SquareMatrix::identity(2, E).scale_rational(&int(3)));
        assert!(parse_expression("q*[[1]]", E, None).is_err());
    }

    proptest! {
        #[test]
        fn polynomials_round_trip(seed in any::<u64>(), n in 1usize..=3, eps_i in 0usize..3, hb in any::<bool>()) {
            let eps = Epsilon::ALL[eps_i];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = PhasePoly::random(n, eps, 4, 5, hb, &mut rng);
            let back = parse_expression(&p.to_string(), eps, Some(n)).unwrap().into_phase().unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn matrices_round_trip(seed in any::<u64>(), dim in 1usize..=4, eps_i in 0usize..3) {
            let eps = Epsilon::ALL[eps_i];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = SquareMatrix::random(dim, eps, &mut rng);
            let back = parse_expression(&m.to_string(), eps, None).unwrap().into_matrix().unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
