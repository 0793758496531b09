//! Seeded random elements for audits and constraint generation.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraElement;
use crate::class::CompositionClass;
use crate::error::Result;
use crate::matrix::SquareMatrix;
use crate::phase::PhasePoly;
use crate::scalar::{rat, PairScalar};
use crate::tensor::{CoproductTable, TensorElement};

/// Shape of the random elements drawn from a representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Matrix { dim: usize },
    Phase { dof: usize, max_degree: u32, terms: usize },
    /// Constant polynomials only: every product α vanishes.
    Constant,
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Matrix { dim } => write!(f, "matrix(dim={dim})"),
            Base::Phase { dof, max_degree, terms } => write!(f, "phase(n={dof}, deg<={max_degree}, terms={terms})"),
            Base::Constant => f.write_str("constant"),
        }
    }
}

pub struct Sampler {
    class: CompositionClass,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(class: &CompositionClass, seed: u64) -> Self {
        Sampler { class: class.clone(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn class(&self) -> &CompositionClass {
        &self.class
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn draw(&mut self, base: &Base) -> Result<AlgebraElement> {
        let eps = self.class.eps();
        match base {
            Base::Matrix { dim } => AlgebraElement::matrix(&self.class, SquareMatrix::random(*dim, eps, &mut self.rng)),
            Base::Phase { dof, max_degree, terms } => {
                let with_hbar = matches!(self.class.hbar(), crate::class::Hbar::Formal);
                let p = PhasePoly::random(*dof, eps, *max_degree, *terms, with_hbar, &mut self.rng);
                AlgebraElement::phase(&self.class, p)
            }
            Base::Constant => {
                let c = PairScalar::real(rat(self.rng.gen_range(-9..=9), self.rng.gen_range(1..=4)), eps);
                AlgebraElement::phase(&self.class, PhasePoly::constant(1, c))
            }
        }
    }

    pub fn unit(&mut self, base: &Base) -> Result<AlgebraElement> {
        Ok(self.draw(base)?.unit_like())
    }

    /// A sum of `summands` random pure tensors under `table`.
    pub fn draw_composite(&mut self, base: &Base, table: &Arc<CoproductTable>, summands: usize) -> Result<AlgebraElement> {
        let eps = self.class.eps();
        let mut acc: Option<TensorElement> = None;
        for _ in 0..summands.max(1) {
            let l = self.draw(base)?;
            let r = self.draw(base)?;
            let t = TensorElement::pure(PairScalar::one(eps), l, r)?;
            acc = Some(match acc {
                Some(a) => a.add(&t)?,
                None => t,
            });
        }
        AlgebraElement::tensor(&self.class, table.clone(), acc.expect("at least one summand"))
    }
}
