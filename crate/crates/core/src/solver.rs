//! Recovers the coproduct table from the unit laws and the bipartite
//! Leibniz rule. The eight entries are treated as unknowns, composite
//! products are expanded symbolically in them, and the resulting
//! polynomial constraints are solved in stages: linear unit constraints by
//! exact elimination, then the quadratic Leibniz constraints in `a11` by a
//! gcd over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{alpha, leibniz_defect, AlgebraElement, Product};
use crate::class::CompositionClass;
use crate::error::{Error, Result};
use crate::exact::{Insert, LinearSystem, UniPoly};
use crate::matrix::SquareMatrix;
use crate::phase::PhasePoly;
use crate::sample::{Base, Sampler};
use crate::scalar::{fmt_rational, int, Epsilon, PairScalar, Rational};
use crate::tensor::{compose_slot, CoproductTable, Flat, Row, Slot, TensorElement, ENTRY_NAMES};

const RETRIES: usize = 10;
const A11: usize = 0;
const UNIT_ENTRIES: [usize; 6] = [1, 2, 3, 5, 6, 7];

type Exps = [u8; 8];

/// Polynomial in the eight table entries with paired-scalar coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct UnknownPoly {
    eps: Epsilon,
    terms: BTreeMap<Exps, PairScalar>,
}

impl UnknownPoly {
    pub fn zero(eps: Epsilon) -> Self {
        UnknownPoly { eps, terms: BTreeMap::new() }
    }

    pub fn constant(c: PairScalar) -> Self {
        Self::monomial([0; 8], c)
    }

    fn monomial(exps: Exps, c: PairScalar) -> Self {
        let mut out = Self::zero(c.eps());
        if !c.is_zero() {
            out.terms.insert(exps, c);
        }
        out
    }

    /// The unknown with table index `idx` (`a11 = 0`, …, `b22 = 7`).
    pub fn var(idx: usize, eps: Epsilon) -> Self {
        let mut e = [0; 8];
        e[idx] = 1;
        Self::monomial(e, PairScalar::one(eps))
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u32).sum()).max().unwrap_or(0)
    }

    /// Indices of the unknowns that occur.
    pub fn vars(&self) -> Vec<usize> {
        (0..8).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    pub fn coefficient(&self, exps: &Exps) -> PairScalar {
        self.terms.get(exps).cloned().unwrap_or_else(|| PairScalar::zero(self.eps))
    }

    fn add_term(&mut self, exps: Exps, c: PairScalar) {
        let sum = match self.terms.get(&exps) {
            Some(cur) => cur + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&PairScalar::real(int(-1), self.eps)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.eps);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let mut e = *e1;
                for (x, y) in e.iter_mut().zip(e2) {
                    *x += y;
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &PairScalar) -> Self {
        let mut out = Self::zero(self.eps);
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    /// Replaces the unknowns in `values` by their values.
    pub fn substitute(&self, values: &BTreeMap<usize, Rational>) -> Self {
        let mut out = Self::zero(self.eps);
        for (e, c) in &self.terms {
            let mut e = *e;
            let mut f = Rational::one();
            for (i, v) in values {
                for _ in 0..e[*i] {
                    f *= v;
                }
                e[*i] = 0;
            }
            out.add_term(e, c.scale(&f));
        }
        out
    }

    /// Keeps only the terms that are a pure power of one unknown.
    fn only_power(&self, var: usize, power: u8) -> Self {
        let mut e = [0; 8];
        e[var] = power;
        Self::monomial(e, self.coefficient(&e))
    }

    /// Rational coefficient vectors of the real and `J` parts, for a
    /// polynomial of degree ≤ 1: `(Σ coeffs·x, −constant)` per part.
    fn linear_parts(&self) -> [(Vec<Rational>, Rational); 2] {
        let part = |pick: fn(&PairScalar) -> &Rational| {
            let mut coeffs = vec![Rational::zero(); 8];
            let mut rhs = Rational::zero();
            for (e, c) in &self.terms {
                match e.iter().position(|&x| x > 0) {
                    Some(i) => coeffs[i] = pick(c).clone(),
                    None => rhs = -pick(c),
                }
            }
            (coeffs, rhs)
        };
        [part(PairScalar::re), part(PairScalar::im)]
    }

    /// Real and `J` parts as univariate polynomials in `var`. Only valid when
    /// `var` is the sole unknown.
    fn univariate_parts(&self, var: usize) -> [UniPoly; 2] {
        let part = |pick: fn(&PairScalar) -> &Rational| {
            let deg = self.degree() as usize;
            let mut c = vec![Rational::zero(); deg + 1];
            for (e, v) in &self.terms {
                c[e[var] as usize] += pick(v);
            }
            UniPoly::new(c)
        };
        [part(PairScalar::re), part(PairScalar::im)]
    }

    /// Divides by the leading coefficient when it is invertible.
    fn normalized(&self) -> Self {
        let lead = self
            .terms
            .iter()
            .max_by_key(|(e, _)| (e.iter().map(|&x| x as u32).sum::<u32>(), **e))
            .map(|(_, c)| c.clone());
        match lead.and_then(|c| c.inv().ok()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn eval(&self, values: &BTreeMap<usize, Rational>) -> Result<PairScalar> {
        let s = self.substitute(values);
        match s.vars().first() {
            Some(&v) => Err(Error::UnknownTableEntry(ENTRY_NAMES[v])),
            None => Ok(s.coefficient(&[0; 8])),
        }
    }
}

impl fmt::Display for UnknownPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(e, _)| std::cmp::Reverse((e.iter().map(|&x| x as u32).sum::<u32>(), **e)));
        let mut out = String::new();
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = (0..8)
                .filter(|&k| e[k] > 0)
                .map(|k| if e[k] == 1 { ENTRY_NAMES[k].to_string() } else { format!("{}^{}", ENTRY_NAMES[k], e[k]) })
                .collect();
            let mono = mono.join("*");
            let (neg, mag) = if c.is_real() && *c.re() < Rational::zero() { (true, -c) } else { (false, c.clone()) };
            let coeff = if mag.is_real() { mag.to_string() } else { format!("({mag})") };
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => coeff,
                (false, true) => mono,
                (false, false) => format!("{coeff}*{mono}"),
            };
            match (i, neg) {
                (0, true) => out.push_str(&format!("-{body}")),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for UnknownPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Where a constraint came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub axiom: String,
    pub sample: usize,
    pub detail: String,
}

/// `polynomial = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzConstraint {
    pub polynomial: UnknownPoly,
    pub provenance: Provenance,
}

impl AnsatzConstraint {
    /// `entry = value`, e.g. to inject a forged assumption.
    pub fn pin(entry: &str, value: Rational, eps: Epsilon) -> Result<Self> {
        let idx = ENTRY_NAMES
            .iter()
            .position(|n| *n == entry)
            .ok_or_else(|| Error::Unsupported(format!("unknown table entry `{entry}`")))?;
        let polynomial = UnknownPoly::var(idx, eps).sub(&UnknownPoly::constant(PairScalar::real(value.clone(), eps)));
        Ok(AnsatzConstraint {
            polynomial,
            provenance: Provenance { axiom: "assumption".into(), sample: 0, detail: format!("{entry} = {}", fmt_rational(&value)) },
        })
    }
}

/// Which part of the Leibniz expansion becomes a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tracking {
    /// Every term of the expansion.
    Full,
    /// Only the `a11²` terms coming from two `α ⊗ α` slots.
    AlphaSquared,
}

/// Tensor whose coefficients are polynomials in the unknowns:
/// `Σ_e x^e · T_e`.
#[derive(Clone)]
struct SymTensor {
    terms: BTreeMap<Exps, TensorElement>,
}

impl SymTensor {
    fn constant(t: TensorElement) -> Self {
        SymTensor { terms: BTreeMap::from([([0; 8], t)]) }
    }

    fn add_term(&mut self, e: Exps, t: TensorElement) -> Result<()> {
        let next = match self.terms.remove(&e) {
            Some(cur) => cur.add(&t)?,
            None => t,
        };
        self.terms.insert(e, next);
        Ok(())
    }

    fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (e, t) in &other.terms {
            out.add_term(*e, t.clone())?;
        }
        Ok(out)
    }

    fn neg(&self) -> Self {
        let eps = self.terms.values().next().and_then(|t| t.class()).map(|c| c.eps()).unwrap_or(Epsilon::Minus);
        let m = PairScalar::real(int(-1), eps);
        SymTensor { terms: self.terms.iter().map(|(e, t)| (*e, t.scale(&m))).collect() }
    }

    /// Coordinates of the flattened tensor as polynomials in the unknowns.
    fn coordinates(&self, eps: Epsilon) -> Result<BTreeMap<Vec<u32>, UnknownPoly>> {
        let mut out: BTreeMap<Vec<u32>, UnknownPoly> = BTreeMap::new();
        for (e, t) in &self.terms {
            let coords: Vec<(Vec<u32>, PairScalar)> = match t.flatten()? {
                Flat::Matrix(m) => matrix_coords(&m),
                Flat::Phase(p) => phase_coords(&p),
            };
            for (k, v) in coords {
                let slot = out.entry(k).or_insert_with(|| UnknownPoly::zero(eps));
                *slot = slot.add(&UnknownPoly::monomial(*e, v));
            }
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }
}

fn matrix_coords(m: &SquareMatrix) -> Vec<(Vec<u32>, PairScalar)> {
    m.entries().iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (vec![i as u32], v.clone())).collect()
}

fn phase_coords(p: &PhasePoly) -> Vec<(Vec<u32>, PairScalar)> {
    p.terms().map(|(m, c)| (m.exps().to_vec(), c.clone())).collect()
}

/// Coefficient of each table slot: a known value or the unknown itself.
fn slot_coefficients(known: &BTreeMap<usize, Rational>, eps: Epsilon) -> [UnknownPoly; 8] {
    std::array::from_fn(|i| match known.get(&i) {
        Some(v) => UnknownPoly::constant(PairScalar::real(v.clone(), eps)),
        None => UnknownPoly::var(i, eps),
    })
}

/// The composite product of `row` with symbolic table entries.
fn sym_compose(coeffs: &[UnknownPoly; 8], row: Row, f: &SymTensor, g: &SymTensor) -> Result<SymTensor> {
    let mut out = SymTensor { terms: BTreeMap::new() };
    for (ef, tf) in &f.terms {
        for (eg, tg) in &g.terms {
            for left in [Product::Alpha, Product::Sigma] {
                for right in [Product::Alpha, Product::Sigma] {
                    let slot = Slot { row, left, right };
                    let w = &coeffs[slot.index()];
                    if w.is_zero() {
                        continue;
                    }
                    let t = compose_slot(tf, tg, left, right)?;
                    if t.summands().is_empty() {
                        // keep the shape so that a vanishing result still flattens
                        out.add_term([0; 8], t)?;
                        continue;
                    }
                    for (ew, c) in &w.terms {
                        let mut e = *ew;
                        for k in 0..8 {
                            e[k] += ef[k] + eg[k];
                        }
                        out.add_term(e, t.scale(c))?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn pure(l: &AlgebraElement, r: &AlgebraElement) -> Result<TensorElement> {
    TensorElement::pure(PairScalar::one(l.class().eps()), l.clone(), r.clone())
}

/// Turns `lhs = 0` into one constraint per nonzero coordinate, dropping
/// duplicates.
fn push_constraints(out: &mut Vec<AnsatzConstraint>, lhs: &SymTensor, eps: Epsilon, provenance: &Provenance) -> Result<usize> {
    let before = out.len();
    for poly in lhs.coordinates(eps)?.into_values() {
        let polynomial = poly.normalized();
        if out.iter().any(|c| c.polynomial == polynomial) {
            continue;
        }
        out.push(AnsatzConstraint { polynomial, provenance: provenance.clone() });
    }
    Ok(out.len() - before)
}

/// The four unit axioms on one pair `(f, g)`:
/// `(1⊗f)∘(1⊗g) = 1⊗(f∘g)` and `(f⊗1)∘(g⊗1) = (f∘g)⊗1` for `∘ ∈ {α, σ}`.
pub fn unit_constraints_for(f: &AlgebraElement, g: &AlgebraElement, sample: usize) -> Result<Vec<AnsatzConstraint>> {
    let eps = f.class().eps();
    let one = f.unit_like();
    let coeffs = slot_coefficients(&BTreeMap::new(), eps);
    let detail = format!("f = {f}, g = {g}");
    let mut out = Vec::new();
    for (row, product, name) in [(Row::Alpha, Product::Alpha, "alpha"), (Row::Sigma, Product::Sigma, "sigma")] {
        let fg = product.apply(f, g)?;
        let cases = [
            ("left", pure(&one, f)?, pure(&one, g)?, pure(&one, &fg)?),
            ("right", pure(f, &one)?, pure(g, &one)?, pure(&fg, &one)?),
        ];
        for (side, x, y, expected) in cases {
            let lhs = sym_compose(&coeffs, row, &SymTensor::constant(x), &SymTensor::constant(y))?
                .add(&SymTensor::constant(expected).neg())?;
            let prov = Provenance { axiom: format!("unit ({name}, {side} factor)"), sample, detail: detail.clone() };
            let mut found = Vec::new();
            push_constraints(&mut found, &lhs, eps, &prov)?;
            for c in found {
                if !out.iter().any(|o: &AnsatzConstraint| o.polynomial == c.polynomial) {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

fn linear_rank(constraints: &[AnsatzConstraint], vars: &[usize]) -> usize {
    let mut sys = LinearSystem::new(8);
    for c in constraints.iter().filter(|c| c.polynomial.degree() <= 1) {
        for (coeffs, rhs) in c.polynomial.linear_parts() {
            sys.insert(coeffs, rhs);
        }
    }
    vars.iter().filter(|&&v| sys.value(v).is_some()).count()
}

/// Unit-law constraints from `count` sampled pairs. Keeps drawing (up to
/// ten extra pairs) until the six unit entries are pinned.
pub fn unit_constraints(sampler: &mut Sampler, base: &Base, count: usize) -> Result<Vec<AnsatzConstraint>> {
    let mut out = Vec::new();
    if count == 0 {
        return Ok(out);
    }
    let mut sample = 0;
    while sample < count + RETRIES {
        let f = sampler.draw(base)?;
        let g = sampler.draw(base)?;
        sample += 1;
        for c in unit_constraints_for(&f, &g, sample)? {
            if !out.iter().any(|o: &AnsatzConstraint| o.polynomial == c.polynomial) {
                out.push(c);
            }
        }
        if sample >= count && linear_rank(&out, &UNIT_ENTRIES) == UNIT_ENTRIES.len() {
            return Ok(out);
        }
    }
    Err(Error::InsufficientRank(format!(
        "unit constraints from {sample} samples of {base} pin only {} of 6 entries",
        linear_rank(&out, &UNIT_ENTRIES)
    )))
}

/// Leibniz constraints `Fα(GαH) − (FαG)αH − Gα(FαH) = 0` for one triple of
/// bipartite elements. `known` must hold at least `a12`, `a21` and `a22`.
pub fn leibniz_constraints_for(
    triple: [&TensorElement; 3],
    known: &BTreeMap<usize, Rational>,
    tracking: Tracking,
    sample: usize,
) -> Result<Vec<AnsatzConstraint>> {
    for i in 1..4 {
        if !known.contains_key(&i) {
            return Err(Error::UnknownTableEntry(ENTRY_NAMES[i]));
        }
    }
    let eps = triple[0].class().map(|c| c.eps()).unwrap_or(Epsilon::Minus);
    let coeffs = slot_coefficients(known, eps);
    let [f, g, h] = triple.map(|t| SymTensor::constant(t.clone()));
    let a = |x: &SymTensor, y: &SymTensor| sym_compose(&coeffs, Row::Alpha, x, y);
    let lhs = a(&f, &a(&g, &h)?)?;
    let t1 = a(&a(&f, &g)?, &h)?;
    let t2 = a(&g, &a(&f, &h)?)?;
    let defect = lhs.add(&t1.neg())?.add(&t2.neg())?;
    let prov = Provenance {
        axiom: "leibniz (alpha over alpha)".into(),
        sample,
        detail: format!("F = {}, G = {}, H = {}", triple[0], triple[1], triple[2]),
    };
    let mut out = Vec::new();
    for poly in defect.coordinates(eps)?.into_values() {
        let poly = match tracking {
            Tracking::Full => poly,
            Tracking::AlphaSquared => poly.only_power(A11, 2),
        };
        let polynomial = poly.normalized();
        if polynomial.is_zero() || out.iter().any(|c: &AnsatzConstraint| c.polynomial == polynomial) {
            continue;
        }
        out.push(AnsatzConstraint { polynomial, provenance: prov.clone() });
    }
    Ok(out)
}

/// Leibniz constraints from `count` sampled triples of pure tensors. A
/// triple whose constraints all vanish is redrawn, up to ten times.
pub fn leibniz_constraints(
    sampler: &mut Sampler,
    base: &Base,
    count: usize,
    known: &BTreeMap<usize, Rational>,
    tracking: Tracking,
) -> Result<Vec<AnsatzConstraint>> {
    let mut out: Vec<AnsatzConstraint> = Vec::new();
    let mut sample = 0;
    for _ in 0..count {
        let mut found = Vec::new();
        for _ in 0..=RETRIES {
            sample += 1;
            let mut draw = || -> Result<TensorElement> { pure(&sampler.draw(base)?, &sampler.draw(base)?) };
            let (f, g, h) = (draw()?, draw()?, draw()?);
            found = leibniz_constraints_for([&f, &g, &h], known, tracking, sample)?;
            if !found.is_empty() {
                break;
            }
        }
        if found.is_empty() {
            return Err(Error::InsufficientRank(format!("every sampled Leibniz coefficient vanished for {base}")));
        }
        for c in found {
            if !out.iter().any(|o| o.polynomial == c.polynomial) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Solved table entries. Entries in `dependent` are tied to free ones by
/// a linear relation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionFamily {
    #[serde(serialize_with = "ser_fixed")]
    pub fixed: BTreeMap<String, Rational>,
    pub free: Vec<String>,
    pub dependent: Vec<String>,
    pub witnesses: Vec<String>,
}

fn ser_fixed<S: serde::Serializer>(m: &BTreeMap<String, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k, fmt_rational(v))))
}

impl SolutionFamily {
    pub fn value(&self, entry: &str) -> Option<&Rational> {
        self.fixed.get(entry)
    }

    /// Whether `constraints` vanish when the free entries take `free`.
    pub fn satisfies(&self, constraints: &[AnsatzConstraint], free: &BTreeMap<String, Rational>) -> Result<bool> {
        let mut values = BTreeMap::new();
        for (name, v) in self.fixed.iter().chain(free) {
            if let Some(i) = ENTRY_NAMES.iter().position(|n| n == name) {
                values.insert(i, v.clone());
            }
        }
        for c in constraints {
            let s = c.polynomial.substitute(&values);
            if !s.is_zero() {
                if s.vars().is_empty() {
                    return Ok(false);
                }
                return Err(Error::UnknownTableEntry(ENTRY_NAMES[s.vars()[0]]));
            }
        }
        Ok(true)
    }

    /// The table with every fixed entry filled in and free entries unknown.
    pub fn table(&self, class: &CompositionClass) -> Result<CoproductTable> {
        let mut t = CoproductTable::unknown();
        for (name, v) in &self.fixed {
            t = t.with_rational(name, v.clone(), class)?;
        }
        Ok(t)
    }
}

fn describe(c: &AnsatzConstraint) -> String {
    format!("{} = 0 [{}, sample {}]", c.polynomial, c.provenance.axiom, c.provenance.sample)
}

/// Solves the constraints and explains, per constraint, what it
/// contributed.
pub fn solve_logged(constraints: &[AnsatzConstraint]) -> Result<(SolutionFamily, Vec<String>)> {
    let mut sys = LinearSystem::new(8);
    let mut notes: Vec<String> = vec![String::new(); constraints.len()];
    let mut pivots: Vec<Vec<usize>> = vec![Vec::new(); constraints.len()];
    let mut pending: Vec<usize> = Vec::new();

    let insert = |sys: &mut LinearSystem, poly: &UnknownPoly, idx: usize, pivots: &mut Vec<Vec<usize>>| -> Result<()> {
        for (coeffs, rhs) in poly.linear_parts() {
            match sys.insert(coeffs, rhs) {
                Insert::Pivot(p) => pivots[idx].push(p),
                Insert::Redundant => {}
                Insert::Inconsistent => {
                    return Err(Error::NoSolution { witness: describe(&constraints[idx]) });
                }
            }
        }
        Ok(())
    };

    // unknowns that occur nonlinearly anywhere are settled by the gcd stage
    let nonlinear: Vec<usize> = constraints
        .iter()
        .filter(|c| c.polynomial.degree() > 1)
        .flat_map(|c| c.polynomial.vars())
        .collect();
    for (i, c) in constraints.iter().enumerate() {
        if c.polynomial.degree() <= 1 && c.polynomial.vars().iter().all(|v| !nonlinear.contains(v)) {
            insert(&mut sys, &c.polynomial, i, &mut pivots)?;
        } else {
            pending.push(i);
        }
    }

    let known = |sys: &LinearSystem| -> BTreeMap<usize, Rational> {
        (0..8).filter_map(|v| sys.value(v).map(|x| (v, x))).collect()
    };

    loop {
        let values = known(&sys);
        let mut progress = false;
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut still = Vec::new();
        for &i in &pending {
            let s = constraints[i].polynomial.substitute(&values);
            if s.vars().len() == 1 {
                groups.entry(s.vars()[0]).or_default().push(i);
            } else if s.degree() <= 1 {
                insert(&mut sys, &s, i, &mut pivots)?;
                if s.is_zero() {
                    notes[i] = "holds identically after substitution".into();
                }
                progress = true;
            } else {
                still.push(i);
            }
        }
        pending = still;
        for (var, members) in groups {
            let name = ENTRY_NAMES[var];
            let mut g = UniPoly::zero();
            for &i in &members {
                let s = constraints[i].polynomial.substitute(&values);
                for part in s.univariate_parts(var) {
                    g = g.gcd(&part);
                }
                if g.degree() == Some(0) {
                    return Err(Error::NoSolution { witness: describe(&constraints[i]) });
                }
            }
            let roots = g.rational_roots().unwrap_or_default();
            let [root] = roots.as_slice() else {
                return Err(Error::Unsupported(format!(
                    "{name} is constrained by the common factor {} with roots that are not unique rationals",
                    g.to_string_in(name)
                )));
            };
            for &i in &members {
                let s = constraints[i].polynomial.substitute(&values);
                let [re, im] = s.univariate_parts(var);
                let p = re.gcd(&im);
                let repeated = p.square_free().degree() < p.degree();
                let own = match p.rational_roots() {
                    Some(r) => r.iter().map(fmt_rational).collect::<Vec<_>>().join(", "),
                    None => "irrational".into(),
                };
                notes[i] = format!(
                    "roots {{{own}}}{}; common factor {} gives {name} = {}",
                    if repeated { ", repeated" } else { "" },
                    g.to_string_in(name),
                    fmt_rational(root)
                );
            }
            let mut pin = vec![Rational::zero(); 8];
            pin[var] = Rational::one();
            if sys.insert(pin, root.clone()) == Insert::Inconsistent {
                return Err(Error::NoSolution { witness: describe(&constraints[members[0]]) });
            }
            progress = true;
        }
        if !progress || pending.is_empty() {
            break;
        }
    }
    if let Some(&i) = pending.first() {
        return Err(Error::Unsupported(format!("constraint couples several unknowns: {}", describe(&constraints[i]))));
    }

    let values = known(&sys);
    for (i, ps) in pivots.iter().enumerate() {
        if !notes[i].is_empty() {
            continue;
        }
        let fixed: Vec<String> = ps
            .iter()
            .filter_map(|p| values.get(p).map(|v| format!("{} = {}", ENTRY_NAMES[*p], fmt_rational(v))))
            .collect();
        notes[i] = if fixed.is_empty() && ps.is_empty() {
            "implied by earlier constraints".into()
        } else if fixed.is_empty() {
            "linear relation".into()
        } else {
            format!("fixes {}", fixed.join(", "))
        };
    }

    let mut witnesses: Vec<String> = Vec::new();
    for c in constraints {
        let w = format!("{} #{}: {}", c.provenance.axiom, c.provenance.sample, c.provenance.detail);
        if !witnesses.contains(&w) {
            witnesses.push(w);
        }
    }
    let fixed = values.iter().map(|(k, v)| (ENTRY_NAMES[*k].to_string(), v.clone())).collect();
    let dependent: Vec<String> =
        (0..8).filter(|v| sys.is_pivot(*v) && !values.contains_key(v)).map(|v| ENTRY_NAMES[v].to_string()).collect();
    let free = (0..8).filter(|v| !sys.is_pivot(*v)).map(|v| ENTRY_NAMES[v].to_string()).collect();
    Ok((SolutionFamily { fixed, free, dependent, witnesses }, notes))
}

pub fn solve(constraints: &[AnsatzConstraint]) -> Result<SolutionFamily> {
    solve_logged(constraints).map(|(f, _)| f)
}

/// A pair showing that the one-product ansatz
/// `(f1⊗f2)α12(g1⊗g2) = a (f1αg1)⊗(f2αg2)` cannot reproduce `α` on a
/// subsystem: `(f⊗1)α12(g⊗1) = a (fαg)⊗(1α1) = 0` while `(fαg)⊗1 ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfeasibilityWitness {
    pub f: String,
    pub g: String,
    pub required: String,
    pub obtained: String,
}

/// Looks for a pair with nonzero `fαg`, trying the canonical pair of the
/// representation first. `None` means α vanishes on every candidate, in
/// which case the single product is consistent.
pub fn single_product_infeasibility(sampler: &mut Sampler, base: &Base) -> Result<Option<InfeasibilityWitness>> {
    let class = sampler.class().clone();
    let eps = class.eps();
    let mut candidates: Vec<(AlgebraElement, AlgebraElement)> = Vec::new();
    match base {
        Base::Matrix { dim: 2 } => candidates.push((
            AlgebraElement::matrix(&class, SquareMatrix::pauli_x(eps))?,
            AlgebraElement::matrix(&class, SquareMatrix::pauli_y(eps))?,
        )),
        Base::Phase { .. } => {
            candidates.push((AlgebraElement::phase(&class, PhasePoly::q(1, 0, eps))?, AlgebraElement::phase(&class, PhasePoly::p(1, 0, eps))?))
        }
        _ => {}
    }
    for _ in 0..=RETRIES {
        candidates.push((sampler.draw(base)?, sampler.draw(base)?));
    }
    for (f, g) in candidates {
        let fg = alpha(&f, &g)?;
        if fg.is_zero() {
            continue;
        }
        let one = f.unit_like();
        let required = pure(&fg, &one)?;
        // the single slot evaluated on (f⊗1, g⊗1): (fαg) ⊗ (1α1)
        let obtained = compose_slot(&pure(&f, &one)?, &pure(&g, &one)?, Product::Alpha, Product::Alpha)?;
        if required.equivalent(&obtained)? {
            continue;
        }
        return Ok(Some(InfeasibilityWitness {
            f: f.to_string(),
            g: g.to_string(),
            required: required.to_string(),
            obtained: obtained.to_string(),
        }));
    }
    Ok(None)
}

/// A triple on which the composite α of a table fails the Leibniz rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeibnizWitness {
    pub f: String,
    pub g: String,
    pub h: String,
    pub inner: String,
    pub defect: String,
}

/// Searches sampled pure-tensor triples for a Leibniz violation under a
/// complete `table`.
pub fn leibniz_violation(sampler: &mut Sampler, base: &Base, table: &CoproductTable, attempts: usize) -> Result<Option<LeibnizWitness>> {
    let table = Arc::new(table.clone());
    for _ in 0..attempts.max(1) {
        let mut draw = || -> Result<AlgebraElement> {
            AlgebraElement::pure_tensor(table.clone(), sampler.draw(base)?, sampler.draw(base)?)
        };
        let (f, g, h) = (draw()?, draw()?, draw()?);
        for inner in [Product::Alpha, Product::Sigma] {
            let d = leibniz_defect(&f, &g, &h, inner)?;
            if !d.is_zero() {
                return Ok(Some(LeibnizWitness {
                    f: f.to_string(),
                    g: g.to_string(),
                    h: h.to_string(),
                    inner: inner.name().into(),
                    defect: d.to_string(),
                }));
            }
        }
    }
    Ok(None)
}

/// One line of a derivation transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptRow {
    pub axiom: String,
    pub sample: String,
    pub constraint: String,
    pub resolution: String,
}

/// Full output of the solver pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoproductReport {
    pub schema: u32,
    pub class: String,
    pub representation: String,
    pub seed: u64,
    pub tracking: Tracking,
    pub rows: Vec<TranscriptRow>,
    pub family: SolutionFamily,
}

impl CoproductReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Pipeline settings.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub unit_samples: usize,
    pub leibniz_samples: usize,
    pub tracking: Tracking,
    /// Extra `entry = value` constraints added after the unit stage.
    pub assumptions: Vec<(String, Rational)>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { unit_samples: 5, leibniz_samples: 3, tracking: Tracking::Full, assumptions: Vec::new() }
    }
}

/// Representation used by the solver for a class: matrices of dimension 2
/// or low-degree polynomials in one degree of freedom.
pub fn solver_base(representation: &str) -> Result<Base> {
    match representation {
        "matrix" => Ok(Base::Matrix { dim: 2 }),
        "phase" => Ok(Base::Phase { dof: 1, max_degree: 3, terms: 3 }),
        other => Err(Error::Unsupported(format!("unknown representation `{other}`"))),
    }
}

/// Units first, then the Leibniz stage on the remaining entry, then the
/// free-entry report.
pub fn solve_coproduct(class: &CompositionClass, base: &Base, seed: u64, opts: &SolveOptions) -> Result<CoproductReport> {
    let eps = class.eps();
    let mut sampler = Sampler::new(class, seed);
    let mut constraints = unit_constraints(&mut sampler, base, opts.unit_samples)?;
    for (name, value) in &opts.assumptions {
        constraints.push(AnsatzConstraint::pin(name, value.clone(), eps)?);
    }
    let unit_family = solve(&constraints)?;
    let known: BTreeMap<usize, Rational> = ENTRY_NAMES
        .iter()
        .enumerate()
        .filter_map(|(i, n)| unit_family.value(n).map(|v| (i, v.clone())))
        .collect();
    constraints.extend(leibniz_constraints(&mut sampler, base, opts.leibniz_samples, &known, opts.tracking)?);
    let (family, notes) = solve_logged(&constraints)?;

    let mut rows: Vec<TranscriptRow> = constraints
        .iter()
        .zip(notes)
        .map(|(c, resolution)| TranscriptRow {
            axiom: c.provenance.axiom.clone(),
            sample: format!("#{}: {}", c.provenance.sample, c.provenance.detail),
            constraint: format!("{} = 0", c.polynomial),
            resolution,
        })
        .collect();
    for name in &family.free {
        rows.push(TranscriptRow {
            axiom: "free entries".into(),
            sample: "-".into(),
            constraint: "-".into(),
            resolution: format!("{name} does not occur in any constraint after substitution; it stays free"),
        });
    }
    Ok(CoproductReport {
        schema: 1,
        class: class.name().into(),
        representation: base.to_string(),
        seed,
        tracking: opts.tracking,
        rows,
        family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::Hbar;
    use crate::scalar::rat;

    fn expected() -> BTreeMap<String, Rational> {
        [("a11", 0), ("a12", 1), ("a21", 1), ("a22", 0), ("b12", 0), ("b21", 0), ("b22", 1)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), int(v)))
            .collect()
    }

    #[test]
    fn unknown_poly_display_and_substitution() {
        let e = Epsilon::Minus;
        let x = UnknownPoly::var(0, e);
        let p = x.mul(&x).scale(&PairScalar::from_ints(3, 0, e)).sub(&UnknownPoly::var(1, e));
        assert_eq!(p.to_string(), "3*a11^2 - a12");
        assert_eq!(p.degree(), 2);
        let s = p.substitute(&BTreeMap::from([(1, int(2))]));
        assert_eq!(s.to_string(), "3*a11^2 - 2");
        assert_eq!(p.eval(&BTreeMap::from([(0, int(1)), (1, int(3))])).unwrap(), PairScalar::zero(e));
    }

    #[test]
    fn unit_stage_pins_six_entries() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let mut s = Sampler::new(&class, 3);
        let cs = unit_constraints(&mut s, &Base::Matrix { dim: 2 }, 5).unwrap();
        assert!(cs.iter().all(|c| c.polynomial.degree() <= 1));
        let fam = solve(&cs).unwrap();
        let mut want = expected();
        want.remove("a11");
        assert_eq!(fam.fixed, want);
        assert_eq!(fam.free, vec!["a11", "b11"]);
    }

    #[test]
    fn zero_count_gives_no_constraints() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let mut s = Sampler::new(&class, 3);
        assert!(unit_constraints(&mut s, &Base::Matrix { dim: 2 }, 0).unwrap().is_empty());
    }

    #[test]
    fn constant_sampler_is_degenerate() {
        let class = CompositionClass::parabolic(Hbar::Formal);
        let mut s = Sampler::new(&class, 3);
        let err = unit_constraints(&mut s, &Base::Constant, 3).unwrap_err();
        assert!(matches!(err, Error::InsufficientRank(_)));
    }

    #[test]
    fn full_pipeline_recovers_the_table() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let r = solve_coproduct(&class, &Base::Matrix { dim: 2 }, 1, &SolveOptions::default()).unwrap();
        assert_eq!(r.family.fixed, expected());
        assert_eq!(r.family.free, vec!["b11"]);
        assert!(r.family.dependent.is_empty());
    }

    #[test]
    fn alpha_squared_tracking_gives_pure_squares() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let mut s = Sampler::new(&class, 5);
        let base = Base::Matrix { dim: 2 };
        let known: BTreeMap<usize, Rational> = [(1, int(1)), (2, int(1)), (3, int(0))].into();
        let cs = leibniz_constraints(&mut s, &base, 2, &known, Tracking::AlphaSquared).unwrap();
        assert!(!cs.is_empty());
        for c in &cs {
            assert_eq!(c.polynomial.vars(), vec![A11]);
            assert_eq!(c.polynomial.terms.len(), 1);
            assert_eq!(c.polynomial.degree(), 2);
        }
        assert_eq!(solve(&cs).unwrap().value("a11"), Some(&int(0)));
    }

    #[test]
    fn unit_triple_is_trivial() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let mut s = Sampler::new(&class, 5);
        let base = Base::Matrix { dim: 2 };
        let f = s.draw(&base).unwrap();
        let one = f.unit_like();
        let u = pure(&one, &one).unwrap();
        let t = pure(&f, &s.draw(&base).unwrap()).unwrap();
        let known: BTreeMap<usize, Rational> = [(1, int(1)), (2, int(1)), (3, int(0))].into();
        let cs = leibniz_constraints_for([&u, &t, &t], &known, Tracking::Full, 1).unwrap();
        assert!(cs.is_empty());
    }

    #[test]
    fn forged_assumption_is_rejected() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let opts = SolveOptions { assumptions: vec![("a12".into(), int(2))], ..Default::default() };
        let err = solve_coproduct(&class, &Base::Matrix { dim: 2 }, 1, &opts).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }), "{err}");
    }

    #[test]
    fn b11_certificate() {
        let class = CompositionClass::hyperbolic(Hbar::Numeric(int(1)));
        let mut s = Sampler::new(&class, 9);
        let base = Base::Matrix { dim: 2 };
        let mut cs = unit_constraints(&mut s, &base, 3).unwrap();
        let known: BTreeMap<usize, Rational> = [(1, int(1)), (2, int(1)), (3, int(0))].into();
        cs.extend(leibniz_constraints(&mut s, &base, 2, &known, Tracking::Full).unwrap());
        let fam = solve(&cs).unwrap();
        for v in [int(-1), int(0), int(1), rat(7, 3)] {
            assert!(fam.satisfies(&cs, &BTreeMap::from([("b11".to_string(), v)])).unwrap());
        }
    }

    #[test]
    fn single_product_witnesses() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let mut s = Sampler::new(&class, 1);
        let w = single_product_infeasibility(&mut s, &Base::Matrix { dim: 2 }).unwrap().unwrap();
        assert_eq!(w.f, "[[0, 1], [1, 0]]");
        assert_eq!(w.obtained, "0");

        let class = CompositionClass::parabolic(Hbar::Formal);
        let mut s = Sampler::new(&class, 1);
        let w = single_product_infeasibility(&mut s, &Base::Phase { dof: 1, max_degree: 2, terms: 2 }).unwrap().unwrap();
        assert_eq!((w.f.as_str(), w.g.as_str()), ("q", "p"));

        let mut s = Sampler::new(&class, 1);
        assert!(single_product_infeasibility(&mut s, &Base::Constant).unwrap().is_none());
    }
}
