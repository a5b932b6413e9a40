//! Closed-form spectra and the analytic thresholds on `μ` above which a
//! Bell-state input beats every product input.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::bell::{coherence_coefficients, output_matrix, BellVector};
use crate::channel::{check_range, ACoefficients, ChannelParams};
use crate::error::Result;
use crate::linalg::C64;
use crate::spectral::{eigenvalues_hermitian4, von_neumann_entropy, Spectrum};

/// An analytic threshold on the memory coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    pub name: &'static str,
    /// Critical `μ`, in `[0, 1]`.
    pub threshold_mu: f64,
}

impl ConditionReport {
    fn new(name: &'static str, threshold_mu: f64) -> Self {
        Self {
            name,
            threshold_mu: threshold_mu.clamp(0.0, 1.0),
        }
    }

    /// The condition is strict: `μ > threshold`.
    pub fn satisfied_at(&self, mu: f64) -> bool {
        mu > self.threshold_mu
    }
}

/// Which pair of eigenvalue formulas applies to the solvable family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `A_0 − A_1 ≥ |A_4| + |A_5|`: the Bell populations dominate.
    GapDominant,
    /// `A_0 − A_1 < |A_4| + |A_5|`: the `{Φ⁺, Ψ⁺}` coherence dominates.
    CouplingDominant,
}

impl Regime {
    /// Picks the regime from the coefficients; the boundary goes to
    /// `GapDominant` (both give the same spectrum there).
    pub fn select(ac: &ACoefficients) -> Self {
        if ac.gap() >= ac.get(4).abs() + ac.get(5).abs() {
            Regime::GapDominant
        } else {
            Regime::CouplingDominant
        }
    }
}

/// Relative phase of `a_j` against `a_i` that maximizes `|B_ij|` for an equal
/// superposition of Bell states `i` and `j`.
pub fn coupling_phase(ac: &ACoefficients, i: usize, j: usize) -> f64 {
    let (alpha, beta) = coherence_coefficients(ac, i, j);
    if alpha * beta >= 0.0 {
        0.0
    } else {
        FRAC_PI_2
    }
}

/// Eigenvalues of the solvable channel `q = (x, x, ½ − x, ½ − x)` for an
/// input with weight `k` on `{Φ⁺, Ψ⁺}`, after the in-block angles have been
/// chosen to spread the eigenvalues as far as possible.
///
/// Gap-dominant: `λ_{0,1} = k A_{0,1} + (1 − k) A_2`,
/// `λ_{2,3} = (1 − k) A_{0,1} + k A_2`. Coupling-dominant: the same with
/// `A_{0,1}` replaced by `A'_{0,1} = ½[A_0 + A_1 ± (|A_4| + |A_5|)]`.
pub fn solvable_eigenvalues(x: f64, mu: f64, k: f64, regime: Option<Regime>) -> Result<Spectrum> {
    check_range(k, 0.0, 1.0)?;
    let ac = ChannelParams::solvable(x, mu)?.a_coefficients();
    let regime = regime.unwrap_or_else(|| Regime::select(&ac));
    let (hi, lo) = block_populations(&ac, regime);
    let a2 = ac.get(2);
    Spectrum::new([
        k * hi + (1.0 - k) * a2,
        k * lo + (1.0 - k) * a2,
        (1.0 - k) * hi + k * a2,
        (1.0 - k) * lo + k * a2,
    ])
}

fn block_populations(ac: &ACoefficients, regime: Regime) -> (f64, f64) {
    match regime {
        Regime::GapDominant => (ac.get(0), ac.get(1)),
        Regime::CouplingDominant => {
            let c = ac.get(4).abs() + ac.get(5).abs();
            let s = ac.get(0) + ac.get(1);
            (0.5 * (s + c), 0.5 * (s - c))
        }
    }
}

/// The input realizing [`solvable_eigenvalues`]: `(√k, 0, √(1−k), 0)` in the
/// gap-dominant regime, equal in-block superpositions with the
/// coupling-maximizing phase otherwise.
pub fn solvable_input(x: f64, mu: f64, k: f64, regime: Option<Regime>) -> Result<BellVector> {
    check_range(k, 0.0, 1.0)?;
    let ac = ChannelParams::solvable(x, mu)?.a_coefficients();
    let regime = regime.unwrap_or_else(|| Regime::select(&ac));
    let (s, t) = (k.sqrt(), (1.0 - k).sqrt());
    let a = match regime {
        Regime::GapDominant => [
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(t, 0.0),
            C64::new(0.0, 0.0),
        ],
        Regime::CouplingDominant => {
            let phase = coupling_phase(&ac, 0, 1);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            [
                C64::new(s * r, 0.0),
                C64::from_polar(s * r, phase),
                C64::new(t * r, 0.0),
                C64::from_polar(t * r, phase),
            ]
        }
    };
    BellVector::normalized(a)
}

/// `μ > |4x − 1|` for the solvable family.
pub fn solvable_threshold(x: f64) -> Result<ConditionReport> {
    check_range(x, 0.0, 0.5)?;
    Ok(ConditionReport::new("solvable |4x-1|", (4.0 * x - 1.0).abs()))
}

/// `μ > (|4x − 1|/3) / (1 + |4x − 1|/3)` for `q = (x, (1−x)/3, (1−x)/3, (1−x)/3)`.
pub fn symmetric_threshold(x: f64) -> Result<ConditionReport> {
    check_range(x, 0.0, 1.0)?;
    let d = (4.0 * x - 1.0).abs() / 3.0;
    Ok(ConditionReport::new("symmetric", d / (1.0 + d)))
}

/// Spectrum for `a = (cos θ, sin θ e^{iφ}, 0, 0)` on a regularized channel:
/// `λ_{0,1} = ½[A_0 + A_1 ± √((A_0−A_1)² cos²2θ + sin²2θ (A_4² + A_5² + 2A_4A_5 cos 2φ))]`,
/// `λ_{2,3} = ½[A_2 + A_3 ± (A_2 − A_3) cos 2θ]`.
pub fn reduced_eigenvalues(ac: &ACoefficients, theta: f64, phi: f64) -> Result<Spectrum> {
    ac.check_regularized()?;
    let a = ac.as_array();
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let coupling_sq = a[4] * a[4] + a[5] * a[5] + 2.0 * a[4] * a[5] * (2.0 * phi).cos();
    let root = ((a[0] - a[1]).powi(2) * c2 * c2 + s2 * s2 * coupling_sq)
        .max(0.0)
        .sqrt();
    let split = (a[2] - a[3]) * c2;
    Spectrum::new([
        0.5 * (a[0] + a[1] + root),
        0.5 * (a[0] + a[1] - root),
        0.5 * (a[2] + a[3] + split),
        0.5 * (a[2] + a[3] - split),
    ])
}

/// [`reduced_eigenvalues`] at the optimal phase `φ = 0`, where the coupling
/// term becomes `(A_4 + A_5)²`.
pub fn reduced_eigenvalues_optimal(ac: &ACoefficients, theta: f64) -> Result<Spectrum> {
    reduced_eigenvalues(ac, theta, 0.0)
}

/// The general sufficient condition, evaluated on the regularized channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficientReport {
    pub report: ConditionReport,
    pub mu: f64,
    /// `μ > threshold`.
    pub satisfied: bool,
    /// `A_0 − A_1` of the regularized channel.
    pub gap: f64,
    /// `A_4 + A_5` of the regularized channel.
    pub coupling: f64,
    /// The equivalent coefficient form `A_0 − A_1 > A_4 + A_5`.
    pub a_form_satisfied: bool,
    /// `0/0` in the ratio (only the noiseless channel); threshold reported as 0.
    pub degenerate: bool,
}

/// `μ > (2q_0q_1 − q_2² − q_3²) / (q_2 + q_3 + 2q_0q_1 − q_2² − q_3²)` on the
/// regularized `q`; negative ratios clamp to 0.
pub fn sufficient_condition(ch: &ChannelParams) -> SufficientReport {
    let (reg, _) = ch.regularize();
    let q = reg.q();
    let numerator = 2.0 * q[0] * q[1] - q[2] * q[2] - q[3] * q[3];
    let denominator = q[2] + q[3] + numerator;
    let degenerate = denominator.abs() < 1e-300;
    let ratio = if degenerate { 0.0 } else { numerator / denominator };
    let report = ConditionReport::new("general sufficient", ratio);
    let ac = reg.a_coefficients();
    SufficientReport {
        report,
        mu: ch.mu(),
        satisfied: report.satisfied_at(ch.mu()),
        gap: ac.gap(),
        coupling: ac.coupling(),
        a_form_satisfied: ac.gap() > ac.coupling(),
        degenerate,
    }
}

/// Kind of structured candidate input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateKind {
    Bell(usize),
    Pair(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub psi: BellVector,
    pub spectrum: Spectrum,
    pub entropy: f64,
}

/// Output entropies of the four Bell states and the six equal two-Bell
/// superpositions (at the coupling-maximizing relative phase), ascending.
pub fn extremal_candidates(ac: &ACoefficients) -> Vec<Candidate> {
    let mut out = Vec::with_capacity(10);
    let mut push = |kind, psi: BellVector| {
        let spectrum = eigenvalues_hermitian4(&output_matrix(ac, &psi)).expect("channel output is a valid spectrum");
        out.push(Candidate {
            kind,
            psi,
            spectrum,
            entropy: von_neumann_entropy(&spectrum),
        });
    };
    for k in 0..4 {
        push(CandidateKind::Bell(k), BellVector::basis(k));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let phase = coupling_phase(ac, i, j);
            push(CandidateKind::Pair(i, j), BellVector::equal_superposition(i, j, phase));
        }
    }
    out.sort_by(|a, b| a.entropy.total_cmp(&b.entropy));
    out
}
