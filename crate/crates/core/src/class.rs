//! Composition classes and ħ-dependent coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_rational, int, rat, Epsilon, PairScalar, Rational};

/// Planck's constant as used by the products: either a positive rational or
/// the formal deformation symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Hbar {
    Numeric(Rational),
    Formal,
}

impl Hbar {
    /// `formal` or a rational such as `1` or `1/2`.
    pub fn parse(text: &str) -> Result<Self> {
        if text == "formal" {
            return Ok(Hbar::Formal);
        }
        crate::scalar::parse_rational(text)
            .map(Hbar::Numeric)
            .ok_or_else(|| Error::Unsupported(format!("hbar must be `formal` or a rational, got `{text}`")))
    }
}

impl fmt::Display for Hbar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hbar::Numeric(r) => f.write_str(&fmt_rational(r)),
            Hbar::Formal => f.write_str("formal"),
        }
    }
}

/// The value of `J²` together with ħ. Every element is built under exactly
/// one class and never mixes with elements of another.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositionClass {
    j_squared: Epsilon,
    hbar: Hbar,
}

impl CompositionClass {
    pub fn new(j_squared: Epsilon, hbar: Hbar) -> Result<Self> {
        if let Hbar::Numeric(h) = &hbar {
            if *h <= Rational::zero() {
                return Err(Error::Unsupported(format!(
                    "hbar must be positive, got {}",
                    fmt_rational(h)
                )));
            }
        }
        Ok(CompositionClass { j_squared, hbar })
    }

    pub fn elliptic(hbar: Hbar) -> Self {
        Self::new(Epsilon::Minus, hbar).expect("valid hbar")
    }

    pub fn parabolic(hbar: Hbar) -> Self {
        Self::new(Epsilon::Zero, hbar).expect("valid hbar")
    }

    pub fn hyperbolic(hbar: Hbar) -> Self {
        Self::new(Epsilon::Plus, hbar).expect("valid hbar")
    }

    /// Parses `elliptic`, `parabolic` or `hyperbolic`.
    pub fn from_name(name: &str, hbar: Hbar) -> Result<Self> {
        let eps = match name {
            "elliptic" => Epsilon::Minus,
            "parabolic" => Epsilon::Zero,
            "hyperbolic" => Epsilon::Plus,
            other => return Err(Error::Unsupported(format!("unknown class `{other}`"))),
        };
        Self::new(eps, hbar)
    }

    pub fn name(&self) -> &'static str {
        match self.j_squared {
            Epsilon::Minus => "elliptic",
            Epsilon::Zero => "parabolic",
            Epsilon::Plus => "hyperbolic",
        }
    }

    pub fn eps(&self) -> Epsilon {
        self.j_squared
    }

    pub fn hbar(&self) -> &Hbar {
        &self.hbar
    }

    pub fn numeric_hbar(&self) -> Result<&Rational> {
        match &self.hbar {
            Hbar::Numeric(h) => Ok(h),
            Hbar::Formal => Err(Error::FormalHbar),
        }
    }

    /// ħ as a coefficient.
    pub fn hbar_coeff(&self) -> HbarPoly {
        match &self.hbar {
            Hbar::Numeric(h) => HbarPoly::constant(PairScalar::real(h.clone(), self.j_squared)),
            Hbar::Formal => HbarPoly::monomial(PairScalar::one(self.j_squared), 1),
        }
    }

    /// `J²ħ²/4`: the compatibility coefficient and the canonical `b11`.
    pub fn compat_coeff(&self) -> HbarPoly {
        let h = self.hbar_coeff();
        h.mul(&h).scale(&(self.j_squared.as_rational() * rat(1, 4)))
    }

    /// `J·ħ/2`, the factor in front of α in the associative product.
    pub fn half_hbar_j(&self) -> HbarPoly {
        self.hbar_coeff().scale(&rat(1, 2)).mul_u()
    }
}

impl fmt::Display for CompositionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (J² = {}, ħ = {})", self.name(), self.j_squared.value(), self.hbar)
    }
}

/// A polynomial in the formal ħ with paired-scalar coefficients. With a
/// numeric ħ it is always a constant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HbarPoly {
    eps: Epsilon,
    terms: BTreeMap<u32, PairScalar>,
}

impl HbarPoly {
    pub fn zero(eps: Epsilon) -> Self {
        HbarPoly { eps, terms: BTreeMap::new() }
    }

    pub fn constant(c: PairScalar) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: PairScalar, power: u32) -> Self {
        let eps = c.eps();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(power, c);
        }
        HbarPoly { eps, terms }
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(PairScalar::is_one)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &PairScalar)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// The value when free of ħ.
    pub fn as_constant(&self) -> Option<PairScalar> {
        match self.terms.len() {
            0 => Some(PairScalar::zero(self.eps)),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &HbarPoly) -> HbarPoly {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let sum = match out.terms.get(k) {
                Some(cur) => cur + v,
                None => v.clone(),
            };
            if sum.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(*k, sum);
            }
        }
        out
    }

    pub fn mul(&self, other: &HbarPoly) -> HbarPoly {
        let mut out = HbarPoly::zero(self.eps);
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                out = out.add(&HbarPoly::monomial(v1 * v2, k1 + k2));
            }
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> HbarPoly {
        let mut out = HbarPoly::zero(self.eps);
        for (k, v) in &self.terms {
            out = out.add(&HbarPoly::monomial(v.scale(r), *k));
        }
        out
    }

    pub fn mul_u(&self) -> HbarPoly {
        let mut out = HbarPoly::zero(self.eps);
        for (k, v) in &self.terms {
            out = out.add(&HbarPoly::monomial(v.mul_u(), *k));
        }
        out
    }

    pub fn neg(&self) -> HbarPoly {
        self.scale(&int(-1))
    }

    /// Substitutes a numeric value for ħ.
    pub fn eval(&self, hbar: &Rational) -> PairScalar {
        let mut acc = PairScalar::zero(self.eps);
        for (k, v) in &self.terms {
            let mut p = Rational::one();
            for _ in 0..*k {
                p *= hbar;
            }
            acc = &acc + &v.scale(&p);
        }
        acc
    }
}

impl fmt::Display for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| {
                let c = if v.is_real() { v.to_string() } else { format!("({v})") };
                match k {
                    0 => c,
                    1 => format!("{c}*hbar"),
                    _ => format!("{c}*hbar^{k}"),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compat_coefficient_values() {
        let e = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        assert_eq!(e.compat_coeff().as_constant().unwrap(), PairScalar::real(rat(-1, 4), Epsilon::Minus));

        let p = CompositionClass::parabolic(Hbar::Formal);
        assert!(p.compat_coeff().is_zero());

        let h = CompositionClass::hyperbolic(Hbar::Numeric(int(2)));
        assert!(h.compat_coeff().is_one());

        let f = CompositionClass::elliptic(Hbar::Formal);
        let c = f.compat_coeff();
        assert_eq!(c.as_constant(), None);
        assert_eq!(c.eval(&int(2)), PairScalar::from_ints(-1, 0, Epsilon::Minus));
    }

    #[test]
    fn rejects_non_positive_hbar() {
        assert!(CompositionClass::new(Epsilon::Minus, Hbar::Numeric(int(0))).is_err());
        assert!(CompositionClass::new(Epsilon::Minus, Hbar::Numeric(int(-1))).is_err());
    }

    #[test]
    fn half_hbar_j_is_imaginary() {
        let e = CompositionClass::elliptic(Hbar::Numeric(int(3)));
        assert_eq!(
            e.half_hbar_j().as_constant().unwrap(),
            PairScalar::new(int(0), rat(3, 2), Epsilon::Minus)
        );
    }
}
