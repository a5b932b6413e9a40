//! First-order eigenvalue shifts around the two candidate optima: a Bell
//! state `e₀` and the equal superposition `(e₀ + e₁)/√2`.
//!
//! Shifts are expressed through the weights of the perturbed input. Around
//! `e₀` the output stays diagonal to this order; around the superposition the
//! `{2, 3}` eigenvalue is degenerate and is split by diagonalizing the `2×2`
//! block of the perturbation, which gives the discriminant `C`.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{output_unchecked, BellVector};
use crate::channel::{ACoefficients, ChannelParams};
use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, CVec4};
use crate::par;
use crate::sampling::random_tangent;
use crate::spectral::{eigh, entropy_bits, partial_sums};

/// Slack on the sign and majorization checks.
pub const SIGN_TOL: f64 = 1e-12;
/// Tolerance for treating `A₂` and `A₃` as equal.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasePoint {
    Bell,
    Product,
}

impl BasePoint {
    pub fn input(&self) -> BellVector {
        match self {
            BasePoint::Bell => BellVector::basis(0),
            BasePoint::Product => BellVector::equal_superposition(0, 1, 0.0),
        }
    }

    /// Unperturbed output eigenvalues, indexed like the shifts.
    pub fn base_eigenvalues(&self, ac: &ACoefficients) -> [f64; 4] {
        let a = ac.as_array();
        match self {
            BasePoint::Bell => [a[0], a[1], a[2], a[3]],
            BasePoint::Product => {
                let top = 0.5 * (a[0] + a[1]);
                let c = 0.5 * (a[4] + a[5]);
                let low = 0.5 * (a[2] + a[3]);
                [top + c, top - c, low, low]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub base: BasePoint,
    pub shifts: [f64; 4],
    /// Base eigenvalues plus shifts are majorized by the base eigenvalues.
    pub majorization_preserved: bool,
    /// `C` of the degenerate pair; product base only.
    pub discriminant: Option<f64>,
}

impl PerturbationReport {
    /// The sign chain for this base: `B′₀₀ ≤ 0` and `B′₀₀ + B′₁₁ ≤ 0` around
    /// the Bell state, `λ′₀ ≤ 0` around the superposition.
    pub fn sign_chain_holds(&self) -> bool {
        match self.base {
            BasePoint::Bell => self.shifts[0] <= SIGN_TOL && self.shifts[0] + self.shifts[1] <= SIGN_TOL,
            BasePoint::Product => self.shifts[0] <= SIGN_TOL,
        }
    }
}

fn descending(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn majorized_by(x: [f64; 4], y: [f64; 4]) -> bool {
    let px = partial_sums(&descending(x));
    let py = partial_sums(&descending(y));
    (0..3).all(|k| px[k] <= py[k] + SIGN_TOL)
}

/// Shifts `B′ᵢᵢ = Σₘ A_{i⊕m} |aₘ|² − Aᵢ` around `e₀`.
pub fn bell_first_order_shifts(ac: &ACoefficients, psi: &BellVector) -> PerturbationReport {
    let a = ac.as_array();
    let w = psi.weights();
    let shifts: [f64; 4] = std::array::from_fn(|i| (0..4).map(|m| a[i ^ m] * w[m]).sum::<f64>() - a[i]);
    let base = BasePoint::Bell.base_eigenvalues(ac);
    let moved: [f64; 4] = std::array::from_fn(|i| base[i] + shifts[i]);
    PerturbationReport {
        base: BasePoint::Bell,
        shifts,
        majorization_preserved: majorized_by(moved, base),
        discriminant: None,
    }
}

/// Shifts around `(e₀ + e₁)/√2`: `λ′₀,₁` on the non-degenerate pair and the
/// split `λ′₂,₃ = ½[(w₂+w₃)(A₀+A₁−A₂−A₃) ± √C]` of the degenerate one.
pub fn product_first_order_shifts(ac: &ACoefficients, psi: &BellVector) -> PerturbationReport {
    let a = ac.as_array();
    let amp = psi.amplitudes();
    let w = psi.weights();
    let outer = a[0] + a[1] - a[2] - a[3];
    let coupling = a[4] + a[5];
    let re01 = 2.0 * (amp[0] * amp[1].conj()).re;
    let lower = w[2] + w[3];

    let l0 = 0.5 * (-lower * outer + (re01 - 1.0) * coupling);
    let l1 = 0.5 * (-lower * outer - (re01 - 1.0) * coupling);

    let split = (w[0] - w[1]) * (a[2] - a[3]) + (w[2] - w[3]) * (a[0] - a[1]);
    let cross = (amp[2].conj().powi(2) * amp[3].powi(2)).re;
    let c = split * split + 4.0 * (w[2] * w[3] * (a[4] * a[4] + a[5] * a[5]) + 2.0 * cross * a[4] * a[5]);
    let root = c.max(0.0).sqrt();
    let l2 = 0.5 * (lower * outer + root);
    let l3 = 0.5 * (lower * outer - root);

    let shifts = [l0, l1, l2, l3];
    let base = BasePoint::Product.base_eigenvalues(ac);
    let moved: [f64; 4] = std::array::from_fn(|i| base[i] + shifts[i]);
    PerturbationReport {
        base: BasePoint::Product,
        shifts,
        majorization_preserved: majorized_by(moved, base),
        discriminant: Some(c),
    }
}

pub fn first_order_shifts(base: BasePoint, ac: &ACoefficients, psi: &BellVector) -> PerturbationReport {
    match base {
        BasePoint::Bell => bell_first_order_shifts(ac, psi),
        BasePoint::Product => product_first_order_shifts(ac, psi),
    }
}

/// Closed-form local conditions for a regularized channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConditions {
    /// `1 − 1/(2(q₀+q₁))`.
    pub bell_local_threshold: f64,
    pub bell_local: bool,
    /// `A₂ = A₃`, so the degenerate pair can be handled by majorization.
    pub majorization_verifiable: bool,
    /// `4(A₀−A₂)(A₁−A₂) > (A₄+A₅)²`; only when verifiable.
    pub degenerate_local: Option<bool>,
    /// `A₄+A₅ > A₀−A₁`; only when verifiable.
    pub product_local: Option<bool>,
}

/// Evaluates the local conditions on the regularized form of `ch`.
pub fn perturbation_conditions(ch: &ChannelParams) -> PerturbationConditions {
    let (reg, _) = ch.regularize();
    let q = reg.q();
    let a = *reg.a_coefficients().as_array();
    let bell_local_threshold = 1.0 - 1.0 / (2.0 * (q[0] + q[1]));
    let verifiable = (a[2] - a[3]).abs() <= DEGENERACY_TOL;
    let coupling = a[4] + a[5];
    PerturbationConditions {
        bell_local_threshold,
        bell_local: reg.mu() > bell_local_threshold,
        majorization_verifiable: verifiable,
        degenerate_local: verifiable.then(|| 4.0 * (a[0] - a[2]) * (a[1] - a[2]) > coupling * coupling),
        product_local: verifiable.then(|| coupling > a[0] - a[1]),
    }
}

/// Aggregate of a finite-difference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifferenceReport {
    /// `max |analytic − exact| / ε²` over trials, spectra compared sorted.
    pub max_residual: f64,
    pub sign_chain_violations: usize,
    /// Directions whose exact output entropy fell below the base entropy by
    /// more than `10 ε²`.
    pub entropy_decreases: usize,
    pub trials: usize,
}

fn perturbed(base: &CVec4, dir: &CVec4, eps: f64) -> BellVector {
    let v: CVec4 = std::array::from_fn(|k| base[k] + dir[k] * eps);
    let n = norm_sqr(&v).sqrt();
    BellVector::new(v.map(|x| x / n)).expect("renormalized input")
}

/// Compares analytic shifts with exact perturbed spectra along `trials`
/// seeded random tangent directions. The channel is regularized first.
pub fn finite_difference_check(
    ch: &ChannelParams,
    base: BasePoint,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<FiniteDifferenceReport> {
    if !(1e-8..=1e-2).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!("epsilon {epsilon} outside [1e-8, 1e-2]")));
    }
    let ac = ch.regularize().0.a_coefficients();
    let origin = *base.input().amplitudes();
    let lambda0 = base.base_eigenvalues(&ac);
    let s0 = entropy_bits(&lambda0);

    let per_trial = par::map_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let dir = random_tangent(&mut rng, &origin);
        let psi = perturbed(&origin, &dir, epsilon);
        let report = first_order_shifts(base, &ac, &psi);
        let predicted = descending(std::array::from_fn(|i| lambda0[i] + report.shifts[i]));
        let exact = eigh(&output_unchecked(&ac, psi.amplitudes()))
            .expect("channel output is Hermitian")
            .values;
        let exact = descending(exact);
        let residual = (0..4).map(|k| (predicted[k] - exact[k]).abs()).fold(0.0, f64::max) / (epsilon * epsilon);
        let decreased = entropy_bits(&exact) < s0 - 10.0 * epsilon * epsilon;
        (residual, report.sign_chain_holds(), decreased)
    });

    Ok(FiniteDifferenceReport {
        max_residual: per_trial.iter().map(|t| t.0).fold(0.0, f64::max),
        sign_chain_violations: per_trial.iter().filter(|t| !t.1).count(),
        entropy_decreases: per_trial.iter().filter(|t| t.2).count(),
        trials,
    })
}

/// Amplitudes of the product base point.
pub fn product_base_amplitudes() -> [f64; 4] {
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_regularized_channel;

    #[test]
    fn unperturbed_inputs_have_zero_shifts() {
        let ac = ChannelParams::new([0.4, 0.3, 0.2, 0.1], 0.6).unwrap().a_coefficients();
        let b = bell_first_order_shifts(&ac, &BellVector::basis(0));
        assert!(b.shifts.iter().all(|s| s.abs() < 1e-15));
        let p = product_first_order_shifts(&ac, &BasePoint::Product.input());
        assert!(p.shifts.iter().all(|s| s.abs() < 1e-15));
        assert!(p.discriminant.unwrap().abs() < 1e-15);
    }

    #[test]
    fn shifts_sum_to_zero_and_sign_chain_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let ac = random_regularized_channel(&mut rng).a_coefficients();
            for base in [BasePoint::Bell, BasePoint::Product] {
                let o = *base.input().amplitudes();
                let d = random_tangent(&mut rng, &o);
                let r = first_order_shifts(base, &ac, &perturbed(&o, &d, 1e-3));
                assert!(r.shifts.iter().sum::<f64>().abs() < 1e-12);
                assert!(r.sign_chain_holds(), "{base:?} {:?}", r.shifts);
            }
        }
    }

    #[test]
    fn conditions_examples() {
        let c = perturbation_conditions(&ChannelParams::new([0.4, 0.4, 0.1, 0.1], 0.5).unwrap());
        assert!((c.bell_local_threshold - 0.375).abs() < 1e-12);
        assert!(c.bell_local);
        let sym = perturbation_conditions(&ChannelParams::symmetric(0.7, 0.5).unwrap());
        assert!(sym.majorization_verifiable);
        assert!(sym.degenerate_local.is_some() && sym.product_local.is_some());
        let gen = perturbation_conditions(&ChannelParams::new([0.4, 0.3, 0.2, 0.1], 0.5).unwrap());
        assert!(!gen.majorization_verifiable);
        assert_eq!(gen.degenerate_local, None);
    }

    #[test]
    fn identity_channel_bell_residual() {
        // the output stays pure, while the diagonal shifts alone predict
        // weights (w0, w1, w2, w3): the gap is 1 − w0 = ε²/(1 + ε²)
        let r = finite_difference_check(&ChannelParams::identity(0.3).unwrap(), BasePoint::Bell, 1e-4, 20, 1).unwrap();
        assert!((r.max_residual - 1.0).abs() < 1e-6, "{}", r.max_residual);
    }

    #[test]
    fn epsilon_out_of_range_is_rejected() {
        let ch = ChannelParams::identity(0.3).unwrap();
        assert!(finite_difference_check(&ch, BasePoint::Bell, 0.1, 1, 0).is_err());
        assert!(finite_difference_check(&ch, BasePoint::Bell, 1e-9, 1, 0).is_err());
    }
}
