//! Bipartite composition. Products on `A ⊗ A` are fixed by a coproduct
//! table:
//!
//! ```text
//! (f1⊗f2) α12 (g1⊗g2) = Σ a_ij (f1 ∘i g1) ⊗ (f2 ∘j g2)
//! (f1⊗f2) σ12 (g1⊗g2) = Σ b_ij (f1 ∘i g1) ⊗ (f2 ∘j g2)
//! ```
//!
//! with `∘1 = α` and `∘2 = σ`. Tensor elements stay formal sums of pure
//! tensors; flattening (Kronecker product for matrices, joint phase space
//! for polynomials) is used only to decide equality.

use std::fmt;

use crate::algebra::{AlgebraElement, ElementKind, Product};
use crate::class::{CompositionClass, HbarPoly};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::phase::PhasePoly;
use crate::scalar::{PairScalar, Rational};

pub const ENTRY_NAMES: [&str; 8] = ["a11", "a12", "a21", "a22", "b11", "b12", "b21", "b22"];

/// Which composite product a table row defines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Row {
    Alpha,
    Sigma,
}

/// Position of a coefficient: row, product on the first factor, product on
/// the second factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub row: Row,
    pub left: Product,
    pub right: Product,
}

impl Slot {
    pub fn index(self) -> usize {
        let r = match self.row {
            Row::Alpha => 0,
            Row::Sigma => 4,
        };
        let i = if self.left == Product::Alpha { 0 } else { 2 };
        let j = if self.right == Product::Alpha { 0 } else { 1 };
        r + i + j
    }

    pub fn from_index(idx: usize) -> Slot {
        assert!(idx < 8);
        let pick = |b: bool| if b { Product::Sigma } else { Product::Alpha };
        Slot {
            row: if idx < 4 { Row::Alpha } else { Row::Sigma },
            left: pick(idx % 4 >= 2),
            right: pick(idx % 2 == 1),
        }
    }

    pub fn name(self) -> &'static str {
        ENTRY_NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Slot> {
        ENTRY_NAMES.iter().position(|n| *n == name).map(Slot::from_index)
    }
}

/// The eight coproduct coefficients; any of them may be unknown.
#[derive(Clone, PartialEq, Eq)]
pub struct CoproductTable {
    entries: [Option<HbarPoly>; 8],
}

impl CoproductTable {
    pub fn unknown() -> Self {
        CoproductTable { entries: Default::default() }
    }

    /// `a = (0, 1, 1, 0)`, `b = (J²ħ²/4, 0, 0, 1)`.
    pub fn canonical(class: &CompositionClass) -> Self {
        let eps = class.eps();
        let c = |v: i64| Some(HbarPoly::constant(PairScalar::from_ints(v, 0, eps)));
        CoproductTable {
            entries: [c(0), c(1), c(1), c(0), Some(class.compat_coeff()), c(0), c(0), c(1)],
        }
    }

    pub fn get(&self, slot: Slot) -> Option<&HbarPoly> {
        self.entries[slot.index()].as_ref()
    }

    pub fn entry(&self, slot: Slot) -> Result<&HbarPoly> {
        self.get(slot).ok_or(Error::UnknownTableEntry(slot.name()))
    }

    pub fn by_name(&self, name: &str) -> Option<&HbarPoly> {
        Slot::from_name(name).and_then(|s| self.get(s))
    }

    pub fn with(mut self, slot: Slot, value: Option<HbarPoly>) -> Self {
        self.entries[slot.index()] = value;
        self
    }

    /// Overrides one entry with a rational constant.
    pub fn with_rational(self, name: &str, value: Rational, class: &CompositionClass) -> Result<Self> {
        let slot = Slot::from_name(name).ok_or_else(|| Error::Unsupported(format!("no table entry `{name}`")))?;
        Ok(self.with(slot, Some(HbarPoly::constant(PairScalar::real(value, class.eps())))))
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }
}

impl fmt::Display for CoproductTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .zip(ENTRY_NAMES)
            .map(|(e, n)| match e {
                Some(v) => format!("{n}={v}"),
                None => format!("{n}=?"),
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}

impl fmt::Debug for CoproductTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The coefficients of a composite algebra for the class.
pub fn canonical_table(class: &CompositionClass) -> CoproductTable {
    CoproductTable::canonical(class)
}

#[derive(Clone, PartialEq)]
pub struct Summand {
    pub coeff: PairScalar,
    pub left: AlgebraElement,
    pub right: AlgebraElement,
}

/// Formal sum `Σ c_k left_k ⊗ right_k` with duplicate pure tensors merged.
/// Remembers the units of both factors so that the zero element keeps its
/// shape.
#[derive(Clone, PartialEq)]
pub struct TensorElement {
    summands: Vec<Summand>,
    units: Option<Box<(AlgebraElement, AlgebraElement)>>,
}

/// A tensor element collapsed into a single representation element.
#[derive(Debug, Clone, PartialEq)]
pub enum Flat {
    Matrix(SquareMatrix),
    Phase(PhasePoly),
}

impl TensorElement {
    pub fn pure(coeff: PairScalar, left: AlgebraElement, right: AlgebraElement) -> Result<Self> {
        if left.class() != right.class() {
            return Err(Error::ClassMismatch { left: left.class().eps(), right: right.class().eps() });
        }
        let family = |e: &AlgebraElement| match e.kind() {
            ElementKind::Matrix(_) => "matrix",
            _ => "phase",
        };
        if family(&left) != family(&right) {
            return Err(Error::KindMismatch { left: left.tag(), right: right.tag() });
        }
        let units = Some(Box::new((left.unit_like(), right.unit_like())));
        let mut out = TensorElement { summands: Vec::new(), units };
        out.push(Summand { coeff, left, right });
        Ok(out)
    }

    fn empty_like(&self) -> Self {
        TensorElement { summands: Vec::new(), units: self.units.clone() }
    }

    pub fn class(&self) -> Option<&CompositionClass> {
        self.units.as_ref().map(|u| u.0.class())
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    fn push(&mut self, s: Summand) {
        if s.coeff.is_zero() || s.left.is_zero() || s.right.is_zero() {
            return;
        }
        if let Some(pos) = self.summands.iter().position(|t| t.left == s.left && t.right == s.right) {
            let c = &self.summands[pos].coeff + &s.coeff;
            if c.is_zero() {
                self.summands.remove(pos);
            } else {
                self.summands[pos].coeff = c;
            }
        } else {
            self.summands.push(s);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if let (Some(a), Some(b)) = (&self.units, &other.units) {
            a.0.compatible(&b.0)?;
            a.1.compatible(&b.1)?;
        }
        let mut out = self.clone();
        if out.units.is_none() {
            out.units = other.units.clone();
        }
        for s in &other.summands {
            out.push(s.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &PairScalar) -> Self {
        let mut out = self.empty_like();
        for s in &self.summands {
            out.push(Summand { coeff: &s.coeff * c, left: s.left.clone(), right: s.right.clone() });
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.empty_like();
        for s in &self.summands {
            out.push(Summand { coeff: s.coeff.conj(), left: s.left.conj(), right: s.right.conj() });
        }
        out
    }

    /// Multiplies by an ħ-dependent coefficient, absorbed into the left factor.
    pub fn scale_hbar(&self, w: &HbarPoly) -> Result<Self> {
        if let Some(c) = w.as_constant() {
            return Ok(self.scale(&c));
        }
        let mut out = self.empty_like();
        for s in &self.summands {
            out.push(Summand { coeff: s.coeff.clone(), left: s.left.scale_hbar(w)?, right: s.right.clone() });
        }
        Ok(out)
    }

    /// `unit ⊗ unit`.
    pub fn unit_like(&self) -> Option<Self> {
        let units = self.units.as_ref()?;
        let one = PairScalar::one(units.0.class().eps());
        TensorElement::pure(one, units.0.clone(), units.1.clone()).ok()
    }

    pub fn flatten(&self) -> Result<Flat> {
        let units = self
            .units
            .as_ref()
            .ok_or_else(|| Error::Unsupported("cannot flatten a tensor without known factors".into()))?;
        let mut acc = joint(&flatten_element(&units.0)?, &flatten_element(&units.1)?)?;
        acc = scale_flat(&acc, &PairScalar::zero(units.0.class().eps()));
        for s in &self.summands {
            let term = joint(&flatten_element(&s.left)?, &flatten_element(&s.right)?)?;
            acc = add_flat(&acc, &scale_flat(&term, &s.coeff))?;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        if self.summands.is_empty() {
            return true;
        }
        match self.flatten() {
            Ok(Flat::Matrix(m)) => m.is_zero(),
            Ok(Flat::Phase(p)) => p.is_zero(),
            Err(_) => false,
        }
    }

    /// Equality as elements of the tensor product, not as formal sums.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        Ok(self.flatten()? == other.flatten()?)
    }
}

fn flatten_element(e: &AlgebraElement) -> Result<Flat> {
    match e.kind() {
        ElementKind::Matrix(m) => Ok(Flat::Matrix(m.clone())),
        ElementKind::Phase(p) => Ok(Flat::Phase(p.clone())),
        ElementKind::Tensor { elem, .. } => elem.flatten(),
    }
}

fn joint(a: &Flat, b: &Flat) -> Result<Flat> {
    match (a, b) {
        (Flat::Matrix(x), Flat::Matrix(y)) => Ok(Flat::Matrix(x.kron(y)?)),
        (Flat::Phase(x), Flat::Phase(y)) => {
            let total = x.dof() + y.dof();
            Ok(Flat::Phase(x.embed(total, 0).mul(&y.embed(total, x.dof()))?))
        }
        _ => Err(Error::KindMismatch { left: "matrix", right: "phase" }),
    }
}

fn scale_flat(a: &Flat, c: &PairScalar) -> Flat {
    match a {
        Flat::Matrix(m) => Flat::Matrix(m.scale(c).expect("same class")),
        Flat::Phase(p) => Flat::Phase(p.scale(c).expect("same class")),
    }
}

fn add_flat(a: &Flat, b: &Flat) -> Result<Flat> {
    match (a, b) {
        (Flat::Matrix(x), Flat::Matrix(y)) => Ok(Flat::Matrix(x.add(y)?)),
        (Flat::Phase(x), Flat::Phase(y)) => Ok(Flat::Phase(x.add(y)?)),
        _ => Err(Error::KindMismatch { left: "matrix", right: "phase" }),
    }
}

/// `Σ (f1 ∘left g1) ⊗ (f2 ∘right g2)` over all pairs of summands.
pub fn compose_slot(f: &TensorElement, g: &TensorElement, left: Product, right: Product) -> Result<TensorElement> {
    let mut out = f.empty_like();
    if out.units.is_none() {
        out.units = g.units.clone();
    }
    for s in &f.summands {
        for t in &g.summands {
            let l = left.apply(&s.left, &t.left)?;
            if l.is_zero() {
                continue;
            }
            let r = right.apply(&s.right, &t.right)?;
            out.push(Summand { coeff: &s.coeff * &t.coeff, left: l, right: r });
        }
    }
    Ok(out)
}

fn compose(table: &CoproductTable, row: Row, f: &TensorElement, g: &TensorElement) -> Result<TensorElement> {
    let mut out = f.empty_like();
    if out.units.is_none() {
        out.units = g.units.clone();
    }
    for left in [Product::Alpha, Product::Sigma] {
        for right in [Product::Alpha, Product::Sigma] {
            let w = table.entry(Slot { row, left, right })?;
            if w.is_zero() {
                continue;
            }
            let term = compose_slot(f, g, left, right)?;
            out = out.add(&term.scale_hbar(w)?)?;
        }
    }
    Ok(out)
}

/// The composite α12 defined by `table`.
pub fn compose_alpha(table: &CoproductTable, f: &TensorElement, g: &TensorElement) -> Result<TensorElement> {
    compose(table, Row::Alpha, f, g)
}

/// The composite σ12 defined by `table`.
pub fn compose_sigma(table: &CoproductTable, f: &TensorElement, g: &TensorElement) -> Result<TensorElement> {
    compose(table, Row::Sigma, f, g)
}

/// `Σ c_k · kron(left_k, right_k)`.
pub fn kronecker_flatten(f: &TensorElement) -> Result<SquareMatrix> {
    match f.flatten()? {
        Flat::Matrix(m) => Ok(m),
        Flat::Phase(_) => Err(Error::Unsupported("kronecker flattening needs matrix components".into())),
    }
}

/// `Σ c_k · left_k(x) · right_k(y)` on the joint phase space.
pub fn phase_flatten(f: &TensorElement) -> Result<PhasePoly> {
    match f.flatten()? {
        Flat::Phase(p) => Ok(p),
        Flat::Matrix(_) => Err(Error::Unsupported("phase flattening needs polynomial components".into())),
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return f.write_str("0");
        }
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if !s.coeff.is_one() {
                write!(f, "({})*", s.coeff)?;
            }
            write!(f, "({}) ⊗ ({})", s.left, s.right)?;
        }
        Ok(())
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
