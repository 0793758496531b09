//! Small exact solvers over the rationals: an incremental reduced row
//! echelon form and univariate polynomial gcd.

use num_traits::{One, Zero};

use crate::scalar::{fmt_rational, Rational};

/// Outcome of adding one equation to a [`LinearSystem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insert {
    /// The equation introduced a new pivot on this variable.
    Pivot(usize),
    /// Implied by the equations already present.
    Redundant,
    /// Reduces to `0 = c` with `c ≠ 0`.
    Inconsistent,
}

/// A linear system `Σ a_i x_i = b` kept in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    n: usize,
    rows: Vec<(Vec<Rational>, Rational)>,
    pivots: Vec<usize>,
}

impl LinearSystem {
    pub fn new(n: usize) -> Self {
        LinearSystem { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, mut coeffs: Vec<Rational>, mut rhs: Rational) -> Insert {
        assert_eq!(coeffs.len(), self.n);
        for ((row, b), &p) in self.rows.iter().zip(&self.pivots) {
            if coeffs[p].is_zero() {
                continue;
            }
            let f = coeffs[p].clone();
            for (c, r) in coeffs.iter_mut().zip(row) {
                *c -= &f * r;
            }
            rhs -= &f * b;
        }
        let Some(p) = coeffs.iter().position(|c| !c.is_zero()) else {
            return if rhs.is_zero() { Insert::Redundant } else { Insert::Inconsistent };
        };
        let inv = Rational::one() / &coeffs[p];
        for c in coeffs.iter_mut() {
            *c *= &inv;
        }
        rhs *= &inv;
        for (row, b) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (r, c) in row.iter_mut().zip(&coeffs) {
                *r -= &f * c;
            }
            *b -= &f * &rhs;
        }
        self.rows.push((coeffs, rhs));
        self.pivots.push(p);
        Insert::Pivot(p)
    }

    /// The value of `var` when the system pins it down uniquely.
    pub fn value(&self, var: usize) -> Option<Rational> {
        let i = self.pivots.iter().position(|&p| p == var)?;
        let (row, b) = &self.rows[i];
        row.iter().enumerate().all(|(j, c)| j == var || c.is_zero()).then(|| b.clone())
    }

    /// Pivot rows that still depend on non-pivot variables, as
    /// `(pivot, [(var, coefficient)], rhs)` meaning `x_p + Σ c x_v = rhs`.
    pub fn relations(&self) -> Vec<(usize, Vec<(usize, Rational)>, Rational)> {
        let mut out = Vec::new();
        for ((row, b), &p) in self.rows.iter().zip(&self.pivots) {
            let others: Vec<_> = row
                .iter()
                .enumerate()
                .filter(|(j, c)| *j != p && !c.is_zero())
                .map(|(j, c)| (j, c.clone()))
                .collect();
            if !others.is_empty() {
                out.push((p, others, b.clone()));
            }
        }
        out
    }

    pub fn is_pivot(&self, var: usize) -> bool {
        self.pivots.contains(&var)
    }
}

/// Dense univariate polynomial, coefficients from low to high degree, with
/// no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    fn monic(&self) -> Self {
        match self.0.last() {
            Some(lead) => {
                let inv = Rational::one() / lead;
                UniPoly(self.0.iter().map(|c| c * &inv).collect())
            }
            None => self.clone(),
        }
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let f = rem.last().expect("nonempty") / &lead;
            for (i, c) in d.0.iter().enumerate() {
                rem[k + i] -= &f * c;
            }
            quot[k] = f;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    /// `p / gcd(p, p')`: same roots, each simple.
    pub fn square_free(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Rational roots when the square-free part splits into linear factors
    /// over the rationals (degree ≤ 2); `None` otherwise.
    pub fn rational_roots(&self) -> Option<Vec<Rational>> {
        let sf = self.square_free();
        match sf.degree()? {
            0 => Some(Vec::new()),
            1 => Some(vec![-sf.coeff(0) / sf.coeff(1)]),
            2 => {
                let (a, b, c) = (sf.coeff(2), sf.coeff(1), sf.coeff(0));
                if c.is_zero() {
                    let mut r = vec![Rational::zero(), -b / a];
                    r.sort();
                    return Some(r);
                }
                let disc = &b * &b - Rational::from_integer(4.into()) * &a * &c;
                let root = rational_sqrt(&disc)?;
                let two_a = Rational::from_integer(2.into()) * a;
                let mut r = vec![(-&b + &root) / &two_a, (-&b - &root) / &two_a];
                r.sort();
                Some(r)
            }
            _ => None,
        }
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            parts.push(match (mono.is_empty(), c.is_one()) {
                (true, _) => fmt_rational(c),
                (false, true) => mono,
                (false, false) => format!("{}*{}", fmt_rational(c), mono),
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if *r < Rational::zero() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}
