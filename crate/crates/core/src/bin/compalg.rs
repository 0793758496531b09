use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use compalg::algebra::{alpha, beta, sigma, AlgebraElement, Sign};
use compalg::audit::{run_audit, Representation};
use compalg::chsh::{chsh_classical_max, chsh_quantum, ChshResult, OPTIMAL_ANGLES};
use compalg::class::{CompositionClass, Hbar};
use compalg::error::Error;
use compalg::parse::{parse_expression, Parsed};
use compalg::phase::star;
use compalg::sample::Sampler;
use compalg::scalar::parse_rational;
use compalg::solver::{single_product_infeasibility, solve_coproduct, solver_base, SolveOptions, Tracking};
use compalg::tensor::{compose_alpha, compose_sigma, CoproductTable, Flat, TensorElement};
use compalg::Rational;

// Quietly stop writing once stdout is closed, e.g. when piped into `head`.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "compalg", version, about = "Exact two-product algebras: brackets, composition, audits, coproduct recovery")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Composition class.
    #[arg(long, global = true, value_enum, default_value_t = ClassArg::Elliptic)]
    class: ClassArg,
    /// Representation: matrix, phase, composite-matrix or composite-phase.
    #[arg(long, global = true)]
    rep: Option<String>,
    /// Planck's constant: a positive rational or `formal`.
    #[arg(long, global = true, default_value = "1")]
    hbar: String,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl ClassArg {
    fn name(self) -> &'static str {
        match self {
            ClassArg::Elliptic => "elliptic",
            ClassArg::Parabolic => "parabolic",
            ClassArg::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// α, σ and β± of two expressions (polynomials or matrix literals).
    Bracket { f: String, g: String },
    /// Star product of two phase-space polynomials.
    Star {
        f: String,
        g: String,
        /// Use the opposite sign of the exponent.
        #[arg(long)]
        minus: bool,
    },
    /// Composite α12 and σ12 of (f1⊗f2) and (g1⊗g2).
    Compose {
        f1: String,
        f2: String,
        g1: String,
        g2: String,
        /// Override a table entry, e.g. `b11=1`.
        #[arg(long = "entry", value_name = "NAME=VALUE")]
        entries: Vec<String>,
    },
    /// Check the algebraic identities on seeded random triples.
    Audit {
        /// Override a coproduct table entry of a composite representation.
        #[arg(long = "entry", value_name = "NAME=VALUE")]
        entries: Vec<String>,
    },
    /// Recover the coproduct table from unit and Leibniz constraints.
    SolveCoproduct {
        #[arg(long, value_enum, default_value_t = TrackingArg::Full)]
        tracking: TrackingArg,
        /// Add an assumption such as `a12=2` after the unit stage.
        #[arg(long = "assume", value_name = "NAME=VALUE")]
        assumptions: Vec<String>,
        /// Show why a single product cannot compose instead.
        #[arg(long)]
        single_product: bool,
    },
    /// CHSH correlations (extension: uses the spin singlet state, which is
    /// not part of the algebraic theory).
    Chsh {
        /// Angles a,a',b,b' in radians; defaults to the optimal set.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Option<Vec<f64>>,
        /// Maximize over deterministic local strategies instead.
        #[arg(long)]
        classical: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TrackingArg {
    Full,
    AlphaSquared,
}

enum Failure {
    Check(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn class(g: &Global) -> Result<CompositionClass, Failure> {
    Ok(CompositionClass::from_name(g.class.name(), Hbar::parse(&g.hbar)?)?)
}

fn assignment(text: &str) -> Result<(String, Rational), Failure> {
    let (name, value) = text.split_once('=').ok_or_else(|| Failure::Usage(format!("expected NAME=VALUE, got `{text}`")))?;
    let v = parse_rational(value).ok_or_else(|| Failure::Usage(format!("`{value}` is not a rational")))?;
    Ok((name.trim().to_string(), v))
}

fn table(class: &CompositionClass, entries: &[String]) -> Result<CoproductTable, Failure> {
    let mut t = CoproductTable::canonical(class);
    for e in entries {
        let (name, v) = assignment(e)?;
        t = t.with_rational(&name, v, class)?;
    }
    Ok(t)
}

/// Parses expressions together so that polynomials share their degrees of
/// freedom.
fn elements(class: &CompositionClass, texts: &[&str]) -> Result<Vec<AlgebraElement>, Failure> {
    let eps = class.eps();
    let mut dof = 1;
    for t in texts {
        if let Parsed::Phase(p) = parse_expression(t, eps, None)? {
            dof = dof.max(p.dof());
        }
    }
    texts
        .iter()
        .map(|t| match parse_expression(t, eps, Some(dof))? {
            Parsed::Phase(p) => Ok(AlgebraElement::phase(class, p)?),
            Parsed::Matrix(m) => Ok(AlgebraElement::matrix(class, m)?),
        })
        .collect()
}

fn emit(json: bool, value: serde_json::Value, text: String) {
    if json {
        out!("{}", serde_json::to_string_pretty(&value).expect("json"));
    } else {
        out!("{text}");
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Bracket { f, g: gx } => {
            let class = class(g)?;
            let v = elements(&class, &[f, gx])?;
            let (a, s) = (alpha(&v[0], &v[1])?, sigma(&v[0], &v[1])?);
            let (bp, bm) = (beta(&v[0], &v[1], Sign::Plus)?, beta(&v[0], &v[1], Sign::Minus)?);
            emit(
                g.json,
                json!({"schema": 1, "class": class.name(), "hbar": class.hbar().to_string(),
                       "alpha": a.to_string(), "sigma": s.to_string(),
                       "beta_plus": bp.to_string(), "beta_minus": bm.to_string()}),
                format!("alpha  = {a}\nsigma  = {s}\nbeta+  = {bp}\nbeta-  = {bm}"),
            );
            Ok(true)
        }
        Command::Star { f, g: gx, minus } => {
            let class = class(g)?;
            let v = elements(&class, &[f, gx])?;
            let (Some(p), Some(q)) = (v[0].as_phase(), v[1].as_phase()) else {
                return Err(Failure::Usage("the star product needs phase-space polynomials".into()));
            };
            let mut r = star(p, q, &class, if *minus { -1 } else { 1 })?;
            if let Hbar::Numeric(h) = class.hbar() {
                r = r.substitute_hbar(h);
            }
            emit(g.json, json!({"schema": 1, "class": class.name(), "star": r.to_string()}), r.to_string());
            Ok(true)
        }
        Command::Compose { f1, f2, g1, g2, entries } => {
            let class = class(g)?;
            let t = table(&class, entries)?;
            let v = elements(&class, &[f1, f2, g1, g2])?;
            let one = compalg::PairScalar::one(class.eps());
            let f = TensorElement::pure(one.clone(), v[0].clone(), v[1].clone())?;
            let h = TensorElement::pure(one, v[2].clone(), v[3].clone())?;
            let t = Arc::new(t);
            let a = compose_alpha(&t, &f, &h)?;
            let s = compose_sigma(&t, &f, &h)?;
            let flat = |x: &TensorElement| -> Result<String, Failure> {
                Ok(match x.flatten()? {
                    Flat::Matrix(m) => m.to_string(),
                    Flat::Phase(p) => p.to_string(),
                })
            };
            let (fa, fs) = (flat(&a)?, flat(&s)?);
            emit(
                g.json,
                json!({"schema": 1, "class": class.name(), "table": t.to_string(),
                       "alpha": a.to_string(), "sigma": s.to_string(),
                       "alpha_flat": fa, "sigma_flat": fs}),
                format!("table   {t}\nalpha12 = {a}\n        = {fa}\nsigma12 = {s}\n        = {fs}"),
            );
            Ok(true)
        }
        Command::Audit { entries } => {
            let class = class(g)?;
            let mut rep = Representation::from_name(g.rep.as_deref().unwrap_or("matrix"))?;
            if !entries.is_empty() {
                rep = rep.with_table(table(&class, entries)?)?;
            }
            let report = run_audit(&class, &rep, g.samples, g.seed)?;
            if g.json {
                out!("{}", report.to_json());
            } else {
                out!("{} / {} / seed {} / {} samples", report.class, report.representation, report.seed, report.samples);
                for r in &report.rows {
                    out!("  {:<26} {:>4} checked  {:>4} failed", r.identity, r.checked, r.failures);
                    if let Some(w) = &r.first_witness {
                        out!("    first witness: {w}");
                    }
                }
                out!("{}", if report.pass { "PASS" } else { "FAIL" });
            }
            Ok(report.pass)
        }
        Command::SolveCoproduct { tracking, assumptions, single_product } => {
            let class = class(g)?;
            let rep = g.rep.as_deref().unwrap_or("matrix");
            let probe = match rep {
                "matrix" => Representation::Matrix,
                "phase" => Representation::Phase,
                other => return Err(Failure::Usage(format!("solve-coproduct supports matrix or phase, got `{other}`"))),
            };
            compalg::audit::check_supported(&class, &probe)?;
            let base = solver_base(rep)?;
            if *single_product {
                let mut sampler = Sampler::new(&class, g.seed);
                let w = single_product_infeasibility(&mut sampler, &base)?;
                let text = match &w {
                    Some(w) => format!(
                        "single product cannot compose:\n  f = {}\n  g = {}\n  required (f⊗1)α12(g⊗1) = {}\n  ansatz gives {}",
                        w.f, w.g, w.required, w.obtained
                    ),
                    None => "alpha vanishes on every sample; a single product is consistent".into(),
                };
                emit(g.json, json!({"schema": 1, "class": class.name(), "representation": rep, "seed": g.seed, "witness": w}), text);
                return Ok(true);
            }
            let opts = SolveOptions {
                tracking: match tracking {
                    TrackingArg::Full => Tracking::Full,
                    TrackingArg::AlphaSquared => Tracking::AlphaSquared,
                },
                assumptions: assumptions.iter().map(|a| assignment(a)).collect::<Result<_, _>>()?,
                ..SolveOptions::default()
            };
            let report = match solve_coproduct(&class, &base, g.seed, &opts) {
                Ok(r) => r,
                Err(Error::NoSolution { witness }) => return Err(Failure::Check(format!("no solution: {witness}"))),
                Err(e) => return Err(e.into()),
            };
            if g.json {
                out!("{}", serde_json::to_string_pretty(&report).expect("json"));
            } else {
                for r in &report.rows {
                    out!("[{}] {}\n    {}\n    => {}", r.axiom, r.sample, r.constraint, r.resolution);
                }
                let fixed: Vec<String> =
                    report.family.fixed.iter().map(|(k, v)| format!("{k}={}", compalg::scalar::fmt_rational(v))).collect();
                out!("fixed: {}\nfree: {}", fixed.join(", "), report.family.free.join(", "));
            }
            Ok(true)
        }
        Command::Chsh { angles, classical } => {
            let r: ChshResult = if *classical {
                chsh_classical_max()
            } else {
                let a = match angles.as_deref() {
                    Some(&[a, a2, b, b2]) => [a, a2, b, b2],
                    Some(_) => return Err(Failure::Usage("--angles takes exactly four values".into())),
                    None => OPTIMAL_ANGLES,
                };
                if a.iter().any(|x| !x.is_finite()) {
                    return Err(Failure::Usage("angles must be finite".into()));
                }
                chsh_quantum(a)
            };
            let text = match r.strategy {
                Some(s) => format!("classical max S = {} with strategy (A, A', B, B') = {s:?}", r.value),
                None => format!(
                    "quantum S = {:.12} (|S| {} 2*sqrt(2)), E = {:?}",
                    r.value,
                    if r.optimal { "=" } else { "<" },
                    r.correlations
                ),
            };
            let mut value = serde_json::to_value(&r).expect("json");
            value["schema"] = json!(1);
            emit(g.json, value, text);
            Ok(true)
        }
    }
}
