//! Operator representation: dense square matrices over paired scalars, with
//! α the scaled commutator `(J/ħ)(AB − BA)` and σ the Jordan product
//! `½(AB + BA)`.

use std::fmt;

use rand::Rng;

use crate::class::CompositionClass;
use crate::error::{Error, Result};
use crate::scalar::{int, rat, Epsilon, PairScalar, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix {
    dim: usize,
    eps: Epsilon,
    // row-major
    entries: Vec<PairScalar>,
}

impl SquareMatrix {
    pub fn new(dim: usize, eps: Epsilon, entries: Vec<PairScalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Unsupported("matrix dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { left: dim * dim, right: entries.len() });
        }
        if let Some(bad) = entries.iter().find(|e| e.eps() != eps) {
            return Err(Error::ClassMismatch { left: eps, right: bad.eps() });
        }
        Ok(SquareMatrix { dim, eps, entries })
    }

    pub fn from_fn(dim: usize, eps: Epsilon, mut f: impl FnMut(usize, usize) -> PairScalar) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let v = f(r, c);
                assert_eq!(v.eps(), eps, "matrix entry class mismatch");
                entries.push(v);
            }
        }
        SquareMatrix { dim, eps, entries }
    }

    /// Integer entries, row-major.
    pub fn from_ints(dim: usize, eps: Epsilon, re: &[i64], im: &[i64]) -> Self {
        Self::from_fn(dim, eps, |r, c| PairScalar::from_ints(re[r * dim + c], im[r * dim + c], eps))
    }

    pub fn zero(dim: usize, eps: Epsilon) -> Self {
        Self::from_fn(dim, eps, |_, _| PairScalar::zero(eps))
    }

    pub fn identity(dim: usize, eps: Epsilon) -> Self {
        Self::from_fn(dim, eps, |r, c| if r == c { PairScalar::one(eps) } else { PairScalar::zero(eps) })
    }

    pub fn pauli_x(eps: Epsilon) -> Self {
        Self::from_ints(2, eps, &[0, 1, 1, 0], &[0; 4])
    }

    /// `[[0, −u], [u, 0]]`; the usual σy when `u = i`.
    pub fn pauli_y(eps: Epsilon) -> Self {
        Self::from_ints(2, eps, &[0; 4], &[0, -1, 1, 0])
    }

    pub fn pauli_z(eps: Epsilon) -> Self {
        Self::from_ints(2, eps, &[1, 0, 0, -1], &[0; 4])
    }

    /// Entries with numerators in [−9, 9] and denominators in [1, 4] for
    /// both components.
    pub fn random<R: Rng + ?Sized>(dim: usize, eps: Epsilon, rng: &mut R) -> Self {
        let draw = |rng: &mut R| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        Self::from_fn(dim, eps, |_, _| {
            let re = draw(rng);
            let im = draw(rng);
            PairScalar::new(re, im, eps)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn get(&self, r: usize, c: usize) -> &PairScalar {
        &self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[PairScalar] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PairScalar::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.eps != other.eps {
            return Err(Error::ClassMismatch { left: self.eps, right: other.eps });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    fn zip(&self, other: &Self, f: impl Fn(&PairScalar, &PairScalar) -> PairScalar) -> Result<Self> {
        self.check(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        Ok(SquareMatrix { dim: self.dim, eps: self.eps, entries })
    }

    fn map(&self, f: impl Fn(&PairScalar) -> PairScalar) -> Self {
        SquareMatrix { dim: self.dim, eps: self.eps, entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    pub fn scale(&self, s: &PairScalar) -> Result<Self> {
        if s.eps() != self.eps {
            return Err(Error::ClassMismatch { left: self.eps, right: s.eps() });
        }
        Ok(self.map(|a| a * s))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.map(|a| a.scale(r))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = PairScalar::zero(self.eps);
                for k in 0..n {
                    acc = &acc + &(self.get(r, k) * other.get(k, c));
                }
                entries.push(acc);
            }
        }
        Ok(SquareMatrix { dim: n, eps: self.eps, entries })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim, self.eps);
        for _ in 0..k {
            acc = acc.matmul(self).expect("same shape");
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, self.eps, |r, c| self.get(c, r).clone())
    }

    /// Entrywise `u → −u`.
    pub fn conj(&self) -> Self {
        self.map(PairScalar::conj)
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, self.eps, |r, c| self.get(c, r).conj())
    }

    pub fn is_hermitean(&self) -> bool {
        *self == self.conj_transpose()
    }

    /// Multiplies every entry by the unit `u`. Twice gives multiplication by ε.
    pub fn mul_u(&self) -> Self {
        self.map(PairScalar::mul_u)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.eps != other.eps {
            return Err(Error::ClassMismatch { left: self.eps, right: other.eps });
        }
        let (m, n) = (self.dim, other.dim);
        Ok(Self::from_fn(m * n, self.eps, |r, c| {
            self.get(r / n, c / n) * other.get(r % n, c % n)
        }))
    }
}

fn check_class(a: &SquareMatrix, class: &CompositionClass) -> Result<()> {
    if class.eps() == Epsilon::Zero {
        return Err(Error::Unsupported(
            "the matrix representation has no parabolic class".into(),
        ));
    }
    if a.eps() != class.eps() {
        return Err(Error::ClassMismatch { left: a.eps(), right: class.eps() });
    }
    Ok(())
}

/// The map `J`: multiplication by the unit of the class.
pub fn apply_j(a: &SquareMatrix, class: &CompositionClass) -> Result<SquareMatrix> {
    check_class(a, class)?;
    Ok(a.mul_u())
}

/// `AαB = (J/ħ)(AB − BA)`.
pub fn mat_alpha(a: &SquareMatrix, b: &SquareMatrix, class: &CompositionClass) -> Result<SquareMatrix> {
    check_class(a, class)?;
    let hbar = class.numeric_hbar()?;
    let comm = a.matmul(b)?.sub(&b.matmul(a)?)?;
    Ok(comm.mul_u().scale_rational(&(int(1) / hbar)))
}

/// `AσB = ½(AB + BA)`.
pub fn mat_sigma(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    let anti = a.matmul(b)?.add(&b.matmul(a)?)?;
    Ok(anti.scale_rational(&rat(1, 2)))
}

/// Splits `A = H + K` into its Hermitean and anti-Hermitean parts.
pub fn hermitean_split(a: &SquareMatrix, class: &CompositionClass) -> Result<(SquareMatrix, SquareMatrix)> {
    if class.eps() != Epsilon::Minus {
        return Err(Error::Unsupported("hermitean split needs the elliptic class".into()));
    }
    check_class(a, class)?;
    let d = a.conj_transpose();
    let half = rat(1, 2);
    let h = a.add(&d)?.scale_rational(&half);
    let k = a.sub(&d)?.scale_rational(&half);
    Ok((h, k))
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.dim {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for c in 0..self.dim {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [u²={}]", self, self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::Hbar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ell() -> CompositionClass {
        CompositionClass::elliptic(Hbar::Numeric(int(1)))
    }

    const E: Epsilon = Epsilon::Minus;

    #[test]
    fn commutator_of_paulis() {
        // σxσy − σyσx = 2iσz, times i gives −2σz.
        let r = mat_alpha(&SquareMatrix::pauli_x(E), &SquareMatrix::pauli_y(E), &ell()).unwrap();
        assert_eq!(r, SquareMatrix::pauli_z(E).scale_rational(&int(-2)));
    }

    #[test]
    fn alpha_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = SquareMatrix::random(3, E, &mut rng);
        assert!(mat_alpha(&SquareMatrix::identity(3, E), &b, &ell()).unwrap().is_zero());
        assert!(mat_alpha(&b, &b, &ell()).unwrap().is_zero());
    }

    #[test]
    fn sigma_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = SquareMatrix::random(2, E, &mut rng);
        assert_eq!(mat_sigma(&SquareMatrix::identity(2, E), &b).unwrap(), b);
        let sx = SquareMatrix::pauli_x(E);
        assert_eq!(mat_sigma(&sx, &sx).unwrap(), SquareMatrix::identity(2, E));
        assert!(mat_sigma(&sx, &SquareMatrix::pauli_y(E)).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch() {
        let a = SquareMatrix::identity(2, E);
        let b = SquareMatrix::identity(3, E);
        assert!(matches!(mat_sigma(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(mat_alpha(&a, &b, &ell()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn parabolic_is_rejected() {
        let c = CompositionClass::parabolic(Hbar::Numeric(int(1)));
        let a = SquareMatrix::identity(2, Epsilon::Zero);
        assert!(matches!(mat_alpha(&a, &a, &c), Err(Error::Unsupported(_))));
        assert!(matches!(apply_j(&a, &c), Err(Error::Unsupported(_))));
    }

    #[test]
    fn formal_hbar_is_rejected() {
        let c = CompositionClass::elliptic(Hbar::Formal);
        let a = SquareMatrix::identity(2, E);
        assert_eq!(mat_alpha(&a, &a, &c), Err(Error::FormalHbar));
    }

    #[test]
    fn j_twice_is_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (eps, sign) in [(Epsilon::Minus, -1), (Epsilon::Plus, 1)] {
            let class = CompositionClass::new(eps, Hbar::Numeric(int(1))).unwrap();
            let a = SquareMatrix::random(3, eps, &mut rng);
            let jj = apply_j(&apply_j(&a, &class).unwrap(), &class).unwrap();
            assert_eq!(jj, a.scale_rational(&int(sign)));
            let ji = apply_j(&SquareMatrix::identity(2, eps), &class).unwrap();
            assert_eq!(ji, SquareMatrix::identity(2, eps).scale(&PairScalar::unit_u(eps)).unwrap());
        }
    }

    #[test]
    fn hermitean_split_cases() {
        let c = ell();
        let sx = SquareMatrix::pauli_x(E);
        let (h, k) = hermitean_split(&sx, &c).unwrap();
        assert_eq!(h, sx);
        assert!(k.is_zero());

        let anti = sx.mul_u();
        let (h, k) = hermitean_split(&anti, &c).unwrap();
        assert!(h.is_zero());
        assert_eq!(k, anti);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let a = SquareMatrix::random(3, E, &mut rng);
            let (h, k) = hermitean_split(&a, &c).unwrap();
            assert!(h.is_hermitean());
            assert_eq!(k.conj_transpose(), k.neg());
            assert_eq!(h.add(&k).unwrap(), a);
        }
    }

    #[test]
    fn hermitean_products_stay_hermitean() {
        let c = CompositionClass::elliptic(Hbar::Numeric(rat(1, 3)));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = hermitean_split(&SquareMatrix::random(3, E, &mut rng), &c).unwrap().0;
            let b = hermitean_split(&SquareMatrix::random(3, E, &mut rng), &c).unwrap().0;
            assert!(mat_sigma(&a, &b).unwrap().is_hermitean());
            assert!(mat_alpha(&a, &b, &c).unwrap().is_hermitean());
        }
    }

    #[test]
    fn kron_shape_and_identity() {
        let i2 = SquareMatrix::identity(2, E);
        let k = i2.kron(&i2).unwrap();
        assert_eq!(k.dim(), 4);
        assert_eq!(k, SquareMatrix::identity(4, E));
        let k = SquareMatrix::pauli_x(E).kron(&SquareMatrix::identity(3, E)).unwrap();
        assert_eq!(k.dim(), 6);
        assert!(k.get(0, 3).is_one());
        assert!(k.get(0, 0).is_zero());
    }

    #[test]
    fn display_literal() {
        assert_eq!(SquareMatrix::pauli_z(E).to_string(), "[[1, 0], [0, -1]]");
        assert_eq!(SquareMatrix::pauli_y(E).to_string(), "[[0, -J], [J, 0]]");
    }
}
