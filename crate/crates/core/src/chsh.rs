//! CHSH correlations: the quantum value from the spin singlet and the
//! classical bound from deterministic local strategies. This is the only
//! floating-point code in the crate.

use serde::Serialize;

/// Optimal measurement angles `(a, a′, b, b′)` for the singlet.
pub const OPTIMAL_ANGLES: [f64; 4] = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_4];

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChshMode {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshResult {
    pub mode: ChshMode,
    /// `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
    pub value: f64,
    /// Whether `|S|` reaches the bound of its mode.
    pub optimal: bool,
    /// `[E(a,b), E(a,b′), E(a′,b), E(a′,b′)]`.
    pub correlations: [f64; 4],
    pub angles: Option<[f64; 4]>,
    /// Outcomes `(A, A′, B, B′)` of a deterministic strategy.
    pub strategy: Option<[i8; 4]>,
}

type Mat2 = [[f64; 2]; 2];
type Mat4 = [[f64; 4]; 4];

/// `cos θ σz + sin θ σx`.
fn spin(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, s], [s, -c]]
}

fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `⟨ψ|A(θa) ⊗ B(θb)|ψ⟩` for the singlet `(|01⟩ − |10⟩)/√2`.
pub fn singlet_correlation(theta_a: f64, theta_b: f64) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, r, -r, 0.0];
    let m = kron(&spin(theta_a), &spin(theta_b));
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i] * m[i][j] * psi[j];
        }
    }
    acc
}

fn chsh(e: [f64; 4]) -> f64 {
    e[0] - e[1] + e[2] + e[3]
}

/// CHSH value of the singlet at angles `(a, a′, b, b′)`.
pub fn chsh_quantum(angles: [f64; 4]) -> ChshResult {
    let [a, a2, b, b2] = angles;
    let correlations = [
        singlet_correlation(a, b),
        singlet_correlation(a, b2),
        singlet_correlation(a2, b),
        singlet_correlation(a2, b2),
    ];
    let value = chsh(correlations);
    ChshResult {
        mode: ChshMode::Quantum,
        value,
        optimal: (value.abs() - TSIRELSON).abs() <= TOL,
        correlations,
        angles: Some(angles),
        strategy: None,
    }
}

/// CHSH value of one deterministic local strategy `(A, A′, B, B′)`.
pub fn chsh_strategy(s: [i8; 4]) -> f64 {
    let [a, a2, b, b2] = s.map(f64::from);
    chsh([a * b, a * b2, a2 * b, a2 * b2])
}

/// The best of all 16 deterministic local strategies; the first maximizer
/// in enumeration order starting from all `+1`.
pub fn chsh_classical_max() -> ChshResult {
    let mut best: Option<([i8; 4], f64)> = None;
    for bits in 0..16u8 {
        let s: [i8; 4] = std::array::from_fn(|k| if bits >> (3 - k) & 1 == 0 { 1 } else { -1 });
        let v = chsh_strategy(s);
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((s, v));
        }
    }
    let (s, value) = best.expect("sixteen strategies");
    let [a, a2, b, b2] = s.map(f64::from);
    ChshResult {
        mode: ChshMode::Classical,
        value,
        optimal: value == 2.0,
        correlations: [a * b, a * b2, a2 * b, a2 * b2],
        angles: None,
        strategy: Some(s),
    }
}
