//! Seeded identity audits over a representation, with JSON reports.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{
    alpha, antisymmetry_defect_alpha, associator, compatibility_defect, jacobi_defect, jordan_defect, leibniz_defect,
    sigma, symmetry_defect_sigma, AlgebraElement, Product, Sign,
};
use crate::class::{CompositionClass, Hbar};
use crate::error::{Error, Result};
use crate::sample::{Base, Sampler};
use crate::scalar::Epsilon;
use crate::tensor::CoproductTable;

/// Which elements an audit draws.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// Square matrices; dimensions cycle through 2, 3, 4.
    Matrix,
    /// Polynomials on one or two degrees of freedom, degree ≤ 4.
    Phase,
    /// Pure tensors of 2×2 matrices under `table` (the canonical one when
    /// `None`). Every identity is multilinear, so pure triples suffice.
    CompositeMatrix { table: Option<CoproductTable> },
    /// Pure tensors of one-dof polynomials.
    CompositePhase { table: Option<CoproductTable> },
}

impl Representation {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "matrix" => Ok(Representation::Matrix),
            "phase" => Ok(Representation::Phase),
            "composite-matrix" => Ok(Representation::CompositeMatrix { table: None }),
            "composite-phase" => Ok(Representation::CompositePhase { table: None }),
            other => Err(Error::Unsupported(format!("unknown representation `{other}`"))),
        }
    }

    /// The same representation with a replacement coproduct table.
    pub fn with_table(self, table: CoproductTable) -> Result<Self> {
        match self {
            Representation::CompositeMatrix { .. } => Ok(Representation::CompositeMatrix { table: Some(table) }),
            Representation::CompositePhase { .. } => Ok(Representation::CompositePhase { table: Some(table) }),
            _ => Err(Error::Unsupported("a coproduct table only applies to composite representations".into())),
        }
    }

    fn is_matrix(&self) -> bool {
        matches!(self, Representation::Matrix | Representation::CompositeMatrix { .. })
    }

    fn table(&self) -> Option<&Option<CoproductTable>> {
        match self {
            Representation::CompositeMatrix { table } | Representation::CompositePhase { table } => Some(table),
            _ => None,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, table) = match self {
            Representation::Matrix => ("matrix", None),
            Representation::Phase => ("phase", None),
            Representation::CompositeMatrix { table } => ("composite-matrix", table.as_ref()),
            Representation::CompositePhase { table } => ("composite-phase", table.as_ref()),
        };
        match table {
            Some(t) => write!(f, "{name} [{t}]"),
            None => f.write_str(name),
        }
    }
}

/// Rejects (class, representation) pairs that have no realization.
pub fn check_supported(class: &CompositionClass, rep: &Representation) -> Result<()> {
    if rep.is_matrix() {
        if class.eps() == Epsilon::Zero {
            return Err(Error::Unsupported("the matrix representation has no parabolic class".into()));
        }
        if matches!(class.hbar(), Hbar::Formal) {
            return Err(Error::Unsupported("the matrix representation needs a numeric hbar".into()));
        }
    } else if class.eps() == Epsilon::Plus {
        return Err(Error::Unsupported("the phase-space representation has no hyperbolic class".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRow {
    pub identity: String,
    pub checked: usize,
    pub failures: usize,
    pub first_witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub schema: u32,
    pub class: String,
    pub hbar: String,
    pub representation: String,
    pub seed: u64,
    pub samples: usize,
    pub rows: Vec<AuditRow>,
    pub pass: bool,
}

impl AuditReport {
    pub fn row(&self, identity: &str) -> Option<&AuditRow> {
        self.rows.iter().find(|r| r.identity == identity)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

type Check = fn(&AlgebraElement, &AlgebraElement, &AlgebraElement) -> Result<AlgebraElement>;

fn unit_defect(f: &AlgebraElement, _: &AlgebraElement, _: &AlgebraElement) -> Result<AlgebraElement> {
    // 1σf − f and 1αf
    let one = f.unit_like();
    sigma(&one, f)?.sub(f)?.add(&alpha(&one, f)?)
}

fn identities(class: &CompositionClass) -> Vec<(&'static str, Check)> {
    let mut out: Vec<(&'static str, Check)> = vec![
        ("alpha-antisymmetry", |f, g, _| antisymmetry_defect_alpha(f, g)),
        ("beta-minus-associativity", |f, g, h| associator(Product::Beta(Sign::Minus), f, g, h)),
        ("beta-plus-associativity", |f, g, h| associator(Product::Beta(Sign::Plus), f, g, h)),
        ("compatibility", compatibility_defect),
        ("jacobi", jacobi_defect),
        ("jordan", |f, g, _| jordan_defect(f, g)),
        ("leibniz-alpha", |f, g, h| leibniz_defect(f, g, h, Product::Alpha)),
        ("leibniz-sigma", |f, g, h| leibniz_defect(f, g, h, Product::Sigma)),
        ("sigma-symmetry", |f, g, _| symmetry_defect_sigma(f, g)),
        ("unit", unit_defect),
    ];
    if class.eps() == Epsilon::Zero {
        out.push(("sigma-associativity", |f, g, h| associator(Product::Sigma, f, g, h)));
    }
    out.sort_by_key(|(name, _)| *name);
    out
}

fn draw(sampler: &mut Sampler, rep: &Representation, i: usize, table: &Option<Arc<CoproductTable>>) -> Result<AlgebraElement> {
    match rep {
        Representation::Matrix => sampler.draw(&Base::Matrix { dim: 2 + i % 3 }),
        Representation::Phase => sampler.draw(&Base::Phase { dof: 1 + i % 2, max_degree: 4, terms: 3 }),
        Representation::CompositeMatrix { .. } => {
            sampler.draw_composite(&Base::Matrix { dim: 2 }, table.as_ref().expect("composite table"), 1)
        }
        Representation::CompositePhase { .. } => {
            sampler.draw_composite(&Base::Phase { dof: 1, max_degree: 2, terms: 2 }, table.as_ref().expect("composite table"), 1)
        }
    }
}

/// Checks every identity on `n_samples` seeded triples.
pub fn run_audit(class: &CompositionClass, rep: &Representation, n_samples: usize, seed: u64) -> Result<AuditReport> {
    if n_samples == 0 {
        return Err(Error::Unsupported("an audit needs at least one sample".into()));
    }
    check_supported(class, rep)?;
    let table = rep.table().map(|t| Arc::new(t.clone().unwrap_or_else(|| CoproductTable::canonical(class))));
    let checks = identities(class);
    let mut rows: Vec<AuditRow> = checks
        .iter()
        .map(|(name, _)| AuditRow { identity: (*name).into(), checked: 0, failures: 0, first_witness: None })
        .collect();
    let mut sampler = Sampler::new(class, seed);
    for i in 0..n_samples {
        let f = draw(&mut sampler, rep, i, &table)?;
        let g = draw(&mut sampler, rep, i, &table)?;
        let h = draw(&mut sampler, rep, i, &table)?;
        for ((_, check), row) in checks.iter().zip(rows.iter_mut()) {
            let d = check(&f, &g, &h)?;
            row.checked += 1;
            if !d.is_zero() {
                row.failures += 1;
                if row.first_witness.is_none() {
                    row.first_witness = Some(format!("sample {i}: f = {f}; g = {g}; h = {h}; defect = {d}"));
                }
            }
        }
    }
    let pass = rows.iter().all(|r| r.failures == 0);
    Ok(AuditReport {
        schema: 1,
        class: class.name().into(),
        hbar: class.hbar().to_string(),
        representation: rep.to_string(),
        seed,
        samples: n_samples,
        rows,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn elliptic_matrix_passes() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let r = run_audit(&class, &Representation::Matrix, 12, 42).unwrap();
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.rows.len(), 10);
        assert!(r.rows.windows(2).all(|w| w[0].identity < w[1].identity));
        assert!(r.rows.iter().all(|row| row.checked == 12));
    }

    #[test]
    fn parabolic_phase_has_associative_sigma() {
        let class = CompositionClass::parabolic(Hbar::Formal);
        let r = run_audit(&class, &Representation::Phase, 10, 7).unwrap();
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.row("sigma-associativity").unwrap().failures, 0);
    }

    #[test]
    fn forged_table_fails() {
        let class = CompositionClass::elliptic(Hbar::Numeric(int(1)));
        let forged = CoproductTable::canonical(&class).with_rational("b11", int(1), &class).unwrap();
        let rep = Representation::CompositeMatrix { table: None }.with_table(forged).unwrap();
        let r = run_audit(&class, &rep, 3, 42).unwrap();
        assert!(!r.pass);
        let row = r.row("compatibility").unwrap();
        assert!(row.failures > 0 && row.first_witness.as_deref().is_some_and(|w| w.starts_with("sample 0")));
    }

    #[test]
    fn unsupported_pairs() {
        let p = CompositionClass::parabolic(Hbar::Numeric(int(1)));
        assert!(matches!(run_audit(&p, &Representation::Matrix, 1, 0), Err(Error::Unsupported(_))));
        let h = CompositionClass::hyperbolic(Hbar::Numeric(int(1)));
        assert!(matches!(run_audit(&h, &Representation::Phase, 1, 0), Err(Error::Unsupported(_))));
        let e = CompositionClass::elliptic(Hbar::Formal);
        assert!(matches!(run_audit(&e, &Representation::Matrix, 1, 0), Err(Error::Unsupported(_))));
        assert!(run_audit(&e, &Representation::Phase, 0, 0).is_err());
    }
}
