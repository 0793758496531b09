//! Phase-space representation: exact polynomials in `q1..qn`, `p1..pn` and
//! the formal deformation symbol ħ.
//!
//! α and σ are built from powers of the Poisson bidifferential operator
//! `∇ = Σᵢ (←∂qᵢ →∂pᵢ − ←∂pᵢ →∂qᵢ)`. For polynomials every series in ∇
//! terminates once `k` exceeds the smaller total degree of the two
//! arguments, so all products here are finite exact sums.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::class::{CompositionClass, HbarPoly};
use crate::error::{Error, Result};
use crate::scalar::{int, rat, Epsilon, PairScalar, Rational};

/// Exponent vector laid out as `[q1..qn, p1..pn, ħ]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; 2 * n + 1])
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        assert!(exps.len() % 2 == 1, "monomial layout is [q.., p.., hbar]");
        Monomial(exps)
    }

    pub fn dof(&self) -> usize {
        self.0.len() / 2
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn q(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn p(&self, i: usize) -> u32 {
        self.0[self.dof() + i]
    }

    pub fn hbar(&self) -> u32 {
        self.0[2 * self.dof()]
    }

    /// Total degree in the phase-space variables (ħ excluded).
    pub fn degree(&self) -> u32 {
        self.0[..2 * self.dof()].iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Derivative with respect to slot `idx`: `(exponent, reduced monomial)`.
    fn diff(&self, idx: usize) -> Option<(u32, Monomial)> {
        let e = self.0[idx];
        if e == 0 {
            return None;
        }
        let mut out = self.0.clone();
        out[idx] -= 1;
        Some((e, Monomial(out)))
    }

    fn with_hbar(&self, h: u32) -> Monomial {
        let mut out = self.0.clone();
        let last = out.len() - 1;
        out[last] = h;
        Monomial(out)
    }
}

/// Exact polynomial over paired scalars. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhasePoly {
    n: usize,
    eps: Epsilon,
    terms: BTreeMap<Monomial, PairScalar>,
}

impl PhasePoly {
    pub fn zero(n: usize, eps: Epsilon) -> Self {
        PhasePoly { n, eps, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: PairScalar) -> Self {
        Self::term(n, c, Monomial::one(n))
    }

    pub fn one(n: usize, eps: Epsilon) -> Self {
        Self::constant(n, PairScalar::one(eps))
    }

    pub fn term(n: usize, c: PairScalar, m: Monomial) -> Self {
        assert_eq!(m.dof(), n, "monomial dof mismatch");
        let mut p = Self::zero(n, c.eps());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    fn unit_exp(n: usize, slot: usize) -> Monomial {
        let mut e = vec![0; 2 * n + 1];
        e[slot] = 1;
        Monomial(e)
    }

    /// `q_{i+1}` (zero-based index).
    pub fn q(n: usize, i: usize, eps: Epsilon) -> Self {
        assert!(i < n);
        Self::term(n, PairScalar::one(eps), Self::unit_exp(n, i))
    }

    /// `p_{i+1}` (zero-based index).
    pub fn p(n: usize, i: usize, eps: Epsilon) -> Self {
        assert!(i < n);
        Self::term(n, PairScalar::one(eps), Self::unit_exp(n, n + i))
    }

    pub fn hbar(n: usize, eps: Epsilon) -> Self {
        Self::term(n, PairScalar::one(eps), Self::unit_exp(n, 2 * n))
    }

    /// The constant `J`.
    pub fn unit_j(n: usize, eps: Epsilon) -> Self {
        Self::constant(n, PairScalar::unit_u(eps))
    }

    pub fn from_terms(n: usize, eps: Epsilon, terms: impl IntoIterator<Item = (Monomial, PairScalar)>) -> Self {
        let mut p = Self::zero(n, eps);
        for (m, c) in terms {
            assert_eq!(m.dof(), n, "monomial dof mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn dof(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &PairScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> PairScalar {
        self.terms.get(m).cloned().unwrap_or_else(|| PairScalar::zero(self.eps))
    }

    /// Total degree in the phase-space variables; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// True when no phase-space variable occurs (ħ and J may).
    pub fn is_constant(&self) -> bool {
        self.total_degree() == 0
    }

    fn add_term(&mut self, m: Monomial, c: PairScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(cur) => {
                let sum = &*cur + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *cur = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.eps != other.eps {
            return Err(Error::ClassMismatch { left: self.eps, right: other.eps });
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n, self.eps);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n, self.eps);
        for _ in 0..k {
            acc = acc.mul(self).expect("same shape");
        }
        acc
    }

    fn map_coeffs(&self, f: impl Fn(&PairScalar) -> PairScalar) -> Self {
        let mut out = Self::zero(self.n, self.eps);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn scale(&self, s: &PairScalar) -> Result<Self> {
        if s.eps() != self.eps {
            return Err(Error::ClassMismatch { left: self.eps, right: s.eps() });
        }
        Ok(self.map_coeffs(|c| c * s))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    /// Multiplies every coefficient by `J`.
    pub fn mul_u(&self) -> Self {
        self.map_coeffs(PairScalar::mul_u)
    }

    /// Conjugates every coefficient (`J → −J`).
    pub fn conj(&self) -> Self {
        self.map_coeffs(PairScalar::conj)
    }

    /// Multiplies by `ħ^k`.
    pub fn mul_hbar_pow(&self, k: u32) -> Self {
        let mut out = Self::zero(self.n, self.eps);
        for (m, c) in &self.terms {
            let h = m.hbar() + k;
            out.add_term(m.with_hbar(h), c.clone());
        }
        out
    }

    /// Multiplies by a coefficient polynomial in ħ.
    pub fn mul_hbar_poly(&self, w: &HbarPoly) -> Result<Self> {
        if w.eps() != self.eps {
            return Err(Error::ClassMismatch { left: self.eps, right: w.eps() });
        }
        let mut out = Self::zero(self.n, self.eps);
        for (k, c) in w.terms() {
            out = out.add(&self.mul_hbar_pow(k).scale(c)?)?;
        }
        Ok(out)
    }

    /// The coefficient of `ħ^k`, as a polynomial free of ħ.
    pub fn hbar_coefficient(&self, k: u32) -> Self {
        let mut out = Self::zero(self.n, self.eps);
        for (m, c) in &self.terms {
            if m.hbar() == k {
                out.add_term(m.with_hbar(0), c.clone());
            }
        }
        out
    }

    /// Substitutes a numeric value for ħ.
    pub fn substitute_hbar(&self, value: &Rational) -> Self {
        let mut out = Self::zero(self.n, self.eps);
        for (m, c) in &self.terms {
            let mut f = Rational::one();
            for _ in 0..m.hbar() {
                f *= value;
            }
            out.add_term(m.with_hbar(0), c.scale(&f));
        }
        out
    }

    fn diff_slot(&self, slot: usize) -> Self {
        let mut out = Self::zero(self.n, self.eps);
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.diff(slot) {
                out.add_term(dm, c.scale(&int(e as i64)));
            }
        }
        out
    }

    pub fn d_q(&self, i: usize) -> Self {
        self.diff_slot(i)
    }

    pub fn d_p(&self, i: usize) -> Self {
        self.diff_slot(self.n + i)
    }

    /// Re-expresses the polynomial with `total` degrees of freedom, placing
    /// its own variables at `offset..offset + n`. ħ stays shared.
    pub fn embed(&self, total: usize, offset: usize) -> Self {
        assert!(offset + self.n <= total);
        let mut out = Self::zero(total, self.eps);
        for (m, c) in &self.terms {
            let mut e = vec![0; 2 * total + 1];
            for i in 0..self.n {
                e[offset + i] = m.q(i);
                e[total + offset + i] = m.p(i);
            }
            e[2 * total] = m.hbar();
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Sparse random polynomial with `n_terms` draws of total degree at most
    /// `max_degree`. Coefficients use numerators in [−9, 9] and denominators
    /// in [1, 4]; the J part is nonzero only for `eps ≠ 0`. With
    /// `with_hbar`, some terms carry a factor ħ.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        eps: Epsilon,
        max_degree: u32,
        n_terms: usize,
        with_hbar: bool,
        rng: &mut R,
    ) -> Self {
        let mut out = Self::zero(n, eps);
        for _ in 0..n_terms {
            let deg = rng.gen_range(0..=max_degree);
            let mut e = vec![0u32; 2 * n + 1];
            for _ in 0..deg {
                e[rng.gen_range(0..2 * n)] += 1;
            }
            if with_hbar && rng.gen_bool(0.25) {
                e[2 * n] = 1;
            }
            let re = rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
            let im = if eps != Epsilon::Zero && rng.gen_bool(0.5) {
                rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))
            } else {
                Rational::zero()
            };
            out.add_term(Monomial(e), PairScalar::new(re, im, eps));
        }
        out
    }

    pub fn var_name(n: usize, slot: usize) -> String {
        if slot == 2 * n {
            "hbar".into()
        } else if n == 1 {
            if slot == 0 { "q".into() } else { "p".into() }
        } else if slot < n {
            format!("q{}", slot + 1)
        } else {
            format!("p{}", slot - n + 1)
        }
    }
}

fn monomial_text(n: usize, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (slot, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(PhasePoly::var_name(n, slot)),
            _ => parts.push(format!("{}^{}", PhasePoly::var_name(n, slot), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest degree first.
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| (b.degree(), b.hbar(), *b).cmp(&(a.degree(), a.hbar(), *a)));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            let mono = monomial_text(self.n, m);
            let negative = c.re().is_negative() && c.im().is_zero()
                || c.re().is_zero() && c.im().is_negative();
            let mag = if negative { -c } else { c.clone() };
            let coeff = if !mag.re().is_zero() && !mag.im().is_zero() {
                format!("({mag})")
            } else {
                mag.to_string()
            };
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => coeff,
                (false, true) => mono,
                (false, false) => format!("{coeff}*{mono}"),
            };
            match (i, negative) {
                (0, false) => f.write_str(&body)?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [n={}, u²={}]", self, self.n, self.eps)
    }
}

/// A finite element of the formal tensor square, held as merged pairs of
/// monomials `(left, right)` with paired-scalar weights. Applying ∇ maps
/// pairs to pairs; collapsing multiplies each pair back together.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BidiffState {
    n: usize,
    eps: Epsilon,
    pairs: BTreeMap<(Monomial, Monomial), PairScalar>,
}

impl BidiffState {
    pub fn from_pair(f: &PhasePoly, g: &PhasePoly) -> Result<Self> {
        f.check(g)?;
        let mut pairs = BTreeMap::new();
        for (m1, c1) in &f.terms {
            for (m2, c2) in &g.terms {
                pairs.insert((m1.clone(), m2.clone()), c1 * c2);
            }
        }
        Ok(BidiffState { n: f.n, eps: f.eps, pairs })
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// The pairs as single-term polynomials with their weights.
    pub fn pairs(&self) -> Vec<(PhasePoly, PhasePoly, PairScalar)> {
        let one = PairScalar::one(self.eps);
        self.pairs
            .iter()
            .map(|((l, r), w)| {
                (
                    PhasePoly::term(self.n, one.clone(), l.clone()),
                    PhasePoly::term(self.n, one.clone(), r.clone()),
                    w.clone(),
                )
            })
            .collect()
    }

    fn push(&mut self, key: (Monomial, Monomial), w: PairScalar) {
        if w.is_zero() {
            return;
        }
        match self.pairs.get_mut(&key) {
            Some(cur) => {
                let sum = &*cur + &w;
                if sum.is_zero() {
                    self.pairs.remove(&key);
                } else {
                    *cur = sum;
                }
            }
            None => {
                self.pairs.insert(key, w);
            }
        }
    }

    /// One application of ∇ to every pair.
    pub fn apply(&self) -> BidiffState {
        let n = self.n;
        let mut out = BidiffState { n, eps: self.eps, pairs: BTreeMap::new() };
        for ((l, r), w) in &self.pairs {
            for i in 0..n {
                if let (Some((el, dl)), Some((er, dr))) = (l.diff(i), r.diff(n + i)) {
                    out.push((dl, dr), w.scale(&int((el * er) as i64)));
                }
                if let (Some((el, dl)), Some((er, dr))) = (l.diff(n + i), r.diff(i)) {
                    out.push((dl, dr), w.scale(&int(-((el * er) as i64))));
                }
            }
        }
        out
    }

    pub fn collapse(&self) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n, self.eps);
        for ((l, r), w) in &self.pairs {
            out.add_term(l.mul(r), w.clone());
        }
        out
    }
}

/// One application of ∇ to a state.
pub fn bidiff_apply(state: &BidiffState) -> BidiffState {
    state.apply()
}

/// `f ∇^k g`; `k = 0` is the pointwise product.
pub fn bidiff_power(f: &PhasePoly, g: &PhasePoly, k: u32) -> Result<PhasePoly> {
    let mut state = BidiffState::from_pair(f, g)?;
    for _ in 0..k {
        if state.is_empty() {
            break;
        }
        state = state.apply();
    }
    Ok(state.collapse())
}

/// All nonvanishing powers `[f∇⁰g, f∇¹g, …]`.
fn bidiff_powers(f: &PhasePoly, g: &PhasePoly) -> Result<Vec<PhasePoly>> {
    let max = f.total_degree().min(g.total_degree());
    let mut state = BidiffState::from_pair(f, g)?;
    let mut out = Vec::with_capacity(max as usize + 1);
    for k in 0..=max {
        if k > 0 {
            state = state.apply();
        }
        out.push(state.collapse());
    }
    Ok(out)
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `(ħ/2)^k / k!` applied to `term`.
fn weight(term: &PhasePoly, k: u32, extra: Rational) -> PhasePoly {
    let w = extra / Rational::from_integer(BigInt::from(2u32).pow(k) * factorial(k));
    term.mul_hbar_pow(k).scale_rational(&w)
}

/// The Poisson bracket `{f, g} = f ∇ g`.
pub fn poisson(f: &PhasePoly, g: &PhasePoly) -> Result<PhasePoly> {
    bidiff_power(f, g, 1)
}

fn require_elliptic(class: &CompositionClass, what: &str) -> Result<()> {
    if class.eps() != Epsilon::Minus {
        return Err(Error::Unsupported(format!("{what} needs the elliptic class, got {}", class.name())));
    }
    Ok(())
}

fn require_class(f: &PhasePoly, class: &CompositionClass) -> Result<()> {
    if f.eps() != class.eps() {
        return Err(Error::ClassMismatch { left: f.eps(), right: class.eps() });
    }
    Ok(())
}

/// Moyal sine bracket `(2/ħ) sin((ħ/2)∇)`, with ħ formal:
/// `Σₘ (−1)^m (ħ/2)^{2m} / (2m+1)! ∇^{2m+1}`.
pub fn moyal_sine(f: &PhasePoly, g: &PhasePoly, class: &CompositionClass) -> Result<PhasePoly> {
    require_elliptic(class, "the Moyal sine bracket")?;
    require_class(f, class)?;
    let powers = bidiff_powers(f, g)?;
    let mut out = PhasePoly::zero(f.n, f.eps);
    for (k, term) in powers.iter().enumerate().skip(1).step_by(2) {
        let m = (k - 1) / 2;
        let sign = if m % 2 == 0 { 1 } else { -1 };
        // (2/ħ)(ħ/2)^k/k! = (ħ/2)^{k-1}/k!
        let w = int(2 * sign) / Rational::from_integer(BigInt::from(2u32).pow(k as u32) * factorial(k as u32));
        out = out.add(&term.mul_hbar_pow(k as u32 - 1).scale_rational(&w))?;
    }
    Ok(out)
}

/// Cosine bracket `cos((ħ/2)∇)`.
pub fn moyal_cosine(f: &PhasePoly, g: &PhasePoly, class: &CompositionClass) -> Result<PhasePoly> {
    require_elliptic(class, "the cosine bracket")?;
    require_class(f, class)?;
    let powers = bidiff_powers(f, g)?;
    let mut out = PhasePoly::zero(f.n, f.eps);
    for (k, term) in powers.iter().enumerate().step_by(2) {
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        out = out.add(&weight(term, k as u32, int(sign)))?;
    }
    Ok(out)
}

/// Star product `f e^{±(Jħ/2)∇} g`.
pub fn star(f: &PhasePoly, g: &PhasePoly, class: &CompositionClass, sign: i8) -> Result<PhasePoly> {
    require_elliptic(class, "the star product")?;
    require_class(f, class)?;
    let powers = bidiff_powers(f, g)?;
    let mut out = PhasePoly::zero(f.n, f.eps);
    let j = PairScalar::unit_u(f.eps);
    let mut jk = PairScalar::one(f.eps);
    for (k, term) in powers.iter().enumerate() {
        let s = if sign < 0 && k % 2 == 1 { -1 } else { 1 };
        out = out.add(&weight(term, k as u32, int(s)).scale(&jk)?)?;
        jk = &jk * &j;
    }
    Ok(out)
}

/// α of the phase-space algebra for the class: the Moyal sine bracket
/// (elliptic) or the Poisson bracket (parabolic). ħ stays formal.
pub fn phase_alpha(f: &PhasePoly, g: &PhasePoly, class: &CompositionClass) -> Result<PhasePoly> {
    require_class(f, class)?;
    match class.eps() {
        Epsilon::Minus => moyal_sine(f, g, class),
        Epsilon::Zero => poisson(f, g),
        Epsilon::Plus => Err(hyperbolic_phase()),
    }
}

/// σ of the phase-space algebra: the cosine bracket (elliptic) or the
/// pointwise product (parabolic).
pub fn phase_sigma(f: &PhasePoly, g: &PhasePoly, class: &CompositionClass) -> Result<PhasePoly> {
    require_class(f, class)?;
    match class.eps() {
        Epsilon::Minus => moyal_cosine(f, g, class),
        Epsilon::Zero => f.mul(g),
        Epsilon::Plus => Err(hyperbolic_phase()),
    }
}

fn hyperbolic_phase() -> Error {
    Error::Unsupported("the phase-space representation covers the elliptic and parabolic classes".into())
}
