//! Exact scalars: arbitrary-precision rationals and the paired scalar
//! `a + b·u` with `u² = ε`, `ε ∈ {-1, 0, +1}`.
//!
//! The three values of `ε` give the complex, dual and split-complex numbers,
//! which are the carrier scalars of the elliptic, parabolic and hyperbolic
//! composition classes respectively.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Builds a rational from machine integers. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a` or `a/b`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let r: Rational = text.trim().parse().ok()?;
    Some(r)
}

/// The square of the imaginary-like unit: `u² = ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Epsilon {
    /// `u² = -1` (complex numbers).
    Minus,
    /// `u² = 0` (dual numbers).
    Zero,
    /// `u² = +1` (split-complex numbers).
    Plus,
}

impl Epsilon {
    pub const ALL: [Epsilon; 3] = [Epsilon::Minus, Epsilon::Zero, Epsilon::Plus];

    pub fn value(self) -> i64 {
        match self {
            Epsilon::Minus => -1,
            Epsilon::Zero => 0,
            Epsilon::Plus => 1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Epsilon::Minus),
            0 => Some(Epsilon::Zero),
            1 => Some(Epsilon::Plus),
            _ => None,
        }
    }

    pub fn as_rational(self) -> Rational {
        int(self.value())
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

/// Exact paired scalar `re + im·u` with `u² = eps`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairScalar {
    re: Rational,
    im: Rational,
    eps: Epsilon,
}

impl PairScalar {
    pub fn new(re: Rational, im: Rational, eps: Epsilon) -> Self {
        PairScalar { re, im, eps }
    }

    pub fn real(re: Rational, eps: Epsilon) -> Self {
        Self::new(re, Rational::zero(), eps)
    }

    pub fn from_ints(re: i64, im: i64, eps: Epsilon) -> Self {
        Self::new(int(re), int(im), eps)
    }

    pub fn zero(eps: Epsilon) -> Self {
        Self::real(Rational::zero(), eps)
    }

    pub fn one(eps: Epsilon) -> Self {
        Self::real(Rational::one(), eps)
    }

    /// The unit `u` itself.
    pub fn unit_u(eps: Epsilon) -> Self {
        Self::new(Rational::zero(), Rational::one(), eps)
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.eps == other.eps {
            Ok(())
        } else {
            Err(Error::ClassMismatch {
                left: self.eps,
                right: other.eps,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(&self.re + &other.re, &self.im + &other.im, self.eps))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(&self.re - &other.re, &self.im - &other.im, self.eps))
    }

    /// `(a+bu)(c+du) = (ac + ε·bd) + (ad + bc)u`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut re = &self.re * &other.re;
        match self.eps {
            Epsilon::Minus => re -= &self.im * &other.im,
            Epsilon::Zero => {}
            Epsilon::Plus => re += &self.im * &other.im,
        }
        let im = &self.re * &other.im + &self.im * &other.re;
        Ok(Self::new(re, im, self.eps))
    }

    /// `a² − ε·b²`, so that `x · conj(x) = modulus(x)`.
    pub fn modulus(&self) -> Rational {
        let a2 = &self.re * &self.re;
        let b2 = &self.im * &self.im;
        match self.eps {
            Epsilon::Minus => a2 + b2,
            Epsilon::Zero => a2,
            Epsilon::Plus => a2 - b2,
        }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im, self.eps)
    }

    pub fn inv(&self) -> Result<Self> {
        let m = self.modulus();
        if m.is_zero() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        Ok(Self::new(&self.re / &m, -&self.im / &m, self.eps))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r, self.eps)
    }

    /// Multiplication by the unit `u`: `(a + bu)u = εb + au`.
    pub fn mul_u(&self) -> Self {
        let re = &self.im * self.eps.as_rational();
        Self::new(re, self.re.clone(), self.eps)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.eps);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Decomposes into two rationals; used where unknowns are real and the
    /// two components give independent equations.
    pub fn into_parts(self) -> (Rational, Rational) {
        (self.re, self.im)
    }
}

impl fmt::Display for PairScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |c: &Rational| if c.is_one() { "J".to_string() } else { format!("{}*J", fmt_rational(c)) };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) if self.im.is_negative() => write!(f, "-{}", j(&-&self.im)),
            (true, false) => f.write_str(&j(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{} - {}", fmt_rational(&self.re), j(&-&self.im))
                } else {
                    write!(f, "{} + {}", fmt_rational(&self.re), j(&self.im))
                }
            }
        }
    }
}

impl fmt::Debug for PairScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [u²={}]", self, self.eps)
    }
}

// Operator forms panic on an epsilon mismatch. Containers enforce a uniform
// epsilon on construction, so inside the crate a mismatch is a bug.

impl Add for &PairScalar {
    type Output = PairScalar;
    fn add(self, rhs: &PairScalar) -> PairScalar {
        self.try_add(rhs).expect("paired scalar class mismatch")
    }
}

impl Sub for &PairScalar {
    type Output = PairScalar;
    fn sub(self, rhs: &PairScalar) -> PairScalar {
        self.try_sub(rhs).expect("paired scalar class mismatch")
    }
}

impl Mul for &PairScalar {
    type Output = PairScalar;
    fn mul(self, rhs: &PairScalar) -> PairScalar {
        self.try_mul(rhs).expect("paired scalar class mismatch")
    }
}

impl Neg for &PairScalar {
    type Output = PairScalar;
    fn neg(self) -> PairScalar {
        PairScalar::new(-&self.re, -&self.im, self.eps)
    }
}

impl Neg for PairScalar {
    type Output = PairScalar;
    fn neg(self) -> PairScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(re: Rational, im: Rational, eps: Epsilon) -> PairScalar {
        PairScalar::new(re, im, eps)
    }

    #[test]
    fn add_examples() {
        let e = Epsilon::Minus;
        let x = ps(rat(1, 2), int(0), e);
        let y = ps(rat(1, 3), int(0), e);
        assert_eq!(x.try_add(&y).unwrap(), ps(rat(5, 6), int(0), e));

        let u = PairScalar::unit_u(e);
        assert!(u.try_add(&-&u).unwrap().is_zero());

        let a = PairScalar::from_ints(2, 3, e);
        let b = PairScalar::from_ints(-2, 0, e);
        assert_eq!(a.try_add(&b).unwrap(), PairScalar::from_ints(0, 3, e));
    }

    #[test]
    fn unit_squares_to_epsilon() {
        for eps in Epsilon::ALL {
            let u = PairScalar::unit_u(eps);
            assert_eq!(u.try_mul(&u).unwrap(), PairScalar::from_ints(eps.value(), 0, eps));
        }
    }

    #[test]
    fn mismatched_classes_are_rejected() {
        let x = PairScalar::one(Epsilon::Minus);
        let y = PairScalar::one(Epsilon::Plus);
        assert!(matches!(x.try_add(&y), Err(Error::ClassMismatch { .. })));
        assert!(matches!(x.try_mul(&y), Err(Error::ClassMismatch { .. })));
    }

    #[test]
    fn inverses() {
        let i = PairScalar::unit_u(Epsilon::Minus);
        assert_eq!(i.inv().unwrap(), PairScalar::from_ints(0, -1, Epsilon::Minus));

        // 1 + u is a zero divisor of the split-complex numbers.
        let zd = PairScalar::from_ints(1, 1, Epsilon::Plus);
        assert!(matches!(zd.inv(), Err(Error::NotInvertible(_))));

        let d = PairScalar::from_ints(2, 3, Epsilon::Zero);
        let inv = d.inv().unwrap();
        assert_eq!(inv, ps(rat(1, 2), rat(-3, 4), Epsilon::Zero));
        assert!(d.try_mul(&inv).unwrap().is_one());
    }

    #[test]
    fn dual_unit_is_nilpotent() {
        for (b, d) in [(1, 1), (-3, 7), (5, 0)] {
            let x = PairScalar::from_ints(0, b, Epsilon::Zero);
            let y = PairScalar::from_ints(0, d, Epsilon::Zero);
            assert!(x.try_mul(&y).unwrap().is_zero());
        }
    }

    #[test]
    fn mul_u_matches_multiplication() {
        for eps in Epsilon::ALL {
            let x = ps(rat(3, 7), rat(-2, 5), eps);
            assert_eq!(x.mul_u(), &x * &PairScalar::unit_u(eps));
        }
    }

    #[test]
    fn display() {
        let e = Epsilon::Minus;
        assert_eq!(ps(rat(1, 2), int(0), e).to_string(), "1/2");
        assert_eq!(ps(int(0), rat(-3, 4), e).to_string(), "-3/4*J");
        assert_eq!(ps(int(2), rat(-1, 3), e).to_string(), "2 - 1/3*J");
        assert_eq!(ps(int(2), int(1), e).to_string(), "2 + J");
    }
}
