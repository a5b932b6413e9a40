//! Channel parameters, the correlated joint error distribution and the
//! A-coefficients that determine every Bell-basis output matrix.
//!
//! A two-use Pauli memory channel applies `σ_i ⊗ σ_j` with probability
//! `p_ij = (1 − μ) q_i q_j + μ q_i δ_ij`: `μ = 0` is independent noise on each
//! use, `μ = 1` applies the same Pauli twice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ q_i − 1` for user-supplied probabilities.
pub const INPUT_NORMALIZATION_TOL: f64 = 1e-9;
/// Tolerance used by internal consistency checks.
pub const INTERNAL_TOL: f64 = 1e-12;

/// Single-use Pauli probabilities `q_0..q_3` plus the memory coefficient `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    q: [f64; 4],
    mu: f64,
}

impl ChannelParams {
    /// Validates raw input. Probabilities within [`INPUT_NORMALIZATION_TOL`]
    /// of unit sum are accepted and rescaled to sum to one.
    pub fn new(q: [f64; 4], mu: f64) -> Result<Self> {
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("q"));
        }
        if !mu.is_finite() {
            return Err(Error::NonFinite("mu"));
        }
        if let Some((index, &value)) = q.iter().enumerate().find(|(_, &x)| x < 0.0) {
            return Err(Error::NegativeProbability { index, value });
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > INPUT_NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::MuOutOfRange(mu));
        }
        Ok(Self {
            q: q.map(|x| x / sum),
            mu,
        })
    }

    /// The noiseless channel `q = (1, 0, 0, 0)`.
    pub fn identity(mu: f64) -> Result<Self> {
        Self::new([1.0, 0.0, 0.0, 0.0], mu)
    }

    /// The exactly solvable family `q_0 = q_1 = x`, `q_2 = q_3 = ½ − x`.
    pub fn solvable(x: f64, mu: f64) -> Result<Self> {
        check_range(x, 0.0, 0.5)?;
        Self::new([x, x, 0.5 - x, 0.5 - x], mu)
    }

    /// The depolarizing-like family `q_0 = x`, `q_1 = q_2 = q_3 = (1 − x)/3`.
    pub fn symmetric(x: f64, mu: f64) -> Result<Self> {
        check_range(x, 0.0, 1.0)?;
        let y = (1.0 - x) / 3.0;
        Self::new([x, y, y, y], mu)
    }

    pub fn q(&self) -> [f64; 4] {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Same single-use probabilities, different memory coefficient.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.q, mu)
    }

    pub fn joint_distribution(&self) -> JointDistribution {
        JointDistribution::from_channel(self)
    }

    pub fn a_coefficients(&self) -> ACoefficients {
        ACoefficients::from_joint(&self.joint_distribution())
    }

    pub fn is_regularized(&self) -> bool {
        self.q.windows(2).all(|w| w[0] >= w[1])
    }

    /// Equivalent channel with descending `q`; see [`RegularizationRecord`].
    pub fn regularize(&self) -> (ChannelParams, RegularizationRecord) {
        let mut order = [0usize, 1, 2, 3];
        // stable: equal values keep their original index order
        order.sort_by(|&a, &b| self.q[b].total_cmp(&self.q[a]));
        let q = order.map(|k| self.q[k]);
        let klein = order[0];
        let axes = [order[1] ^ klein, order[2] ^ klein, order[3] ^ klein];
        (
            ChannelParams { q, mu: self.mu },
            RegularizationRecord { order, klein, axes },
        )
    }
}

pub(crate) fn check_range(x: f64, lo: f64, hi: f64) -> Result<()> {
    if !x.is_finite() || x < lo || x > hi {
        return Err(Error::XOutOfRange { x, lo, hi });
    }
    Ok(())
}

/// How a channel was mapped onto its regularized form.
///
/// The permutation factors into a Klein-group move (conjugating the input by
/// `σ_k ⊗ σ_k`, which relabels `i → i ⊕ k`) followed by a relabeling of the
/// three Pauli axes by a local Clifford `V ⊗ V`. Both leave the minimal output
/// entropy unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularizationRecord {
    /// `regularized.q[k] == original.q[order[k]]`
    pub order: [usize; 4],
    /// Klein move `σ_k ⊗ σ_k` applied first (0 means none).
    pub klein: usize,
    /// Axis relabeling applied after the Klein move: regularized axis `i + 1`
    /// is the post-Klein axis `axes[i]`.
    pub axes: [usize; 3],
}

impl RegularizationRecord {
    pub fn is_identity(&self) -> bool {
        self.order == [0, 1, 2, 3]
    }

    /// Maps regularized probabilities back to the original labeling.
    pub fn restore(&self, regularized: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, &src) in self.order.iter().enumerate() {
            out[src] = regularized[k];
        }
        out
    }

    pub fn describe(&self) -> String {
        if self.is_identity() {
            return "already regularized".to_string();
        }
        let mut parts = Vec::new();
        if self.klein != 0 {
            parts.push(format!(
                "Klein move sigma{k}(x)sigma{k} (q_i <- q_(i xor {k}))",
                k = self.klein
            ));
        }
        if self.axes != [1, 2, 3] {
            parts.push(format!(
                "Pauli axis relabeling (1,2,3) <- ({},{},{})",
                self.axes[0], self.axes[1], self.axes[2]
            ));
        }
        parts.join("; ")
    }
}

/// Joint error distribution `p_ij` over the sixteen Pauli pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    p: [[f64; 4]; 4],
}

impl JointDistribution {
    pub fn from_channel(ch: &ChannelParams) -> Self {
        let (q, mu) = (ch.q, ch.mu);
        let mut p = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let delta = if i == j { 1.0 } else { 0.0 };
                p[i][j] = (1.0 - mu) * q[i] * q[j] + mu * q[i] * delta;
            }
        }
        Self { p }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    pub fn as_array(&self) -> &[[f64; 4]; 4] {
        &self.p
    }

    pub fn row_sums(&self) -> [f64; 4] {
        self.p.map(|row| row.iter().sum())
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }
}

/// The ten coefficients `A_0..A_9`.
///
/// `A_0..A_3` are the probabilities that a Bell input is mapped to itself, or
/// moved by one of the three Klein permutations `i → i ⊕ k`. `A_4, A_6, A_8`
/// and `A_5, A_7, A_9` weight the coherences between Bell pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ACoefficients {
    a: [f64; 10],
}

impl ACoefficients {
    pub fn from_joint(jd: &JointDistribution) -> Self {
        let p = &jd.p;
        let mut a = [0.0; 10];
        a[0] = p[0][0] + p[1][1] + p[2][2] + p[3][3];
        a[1] = 2.0 * (p[0][1] + p[2][3]);
        a[5] = 2.0 * (p[0][1] - p[2][3]);
        a[2] = 2.0 * (p[0][2] + p[1][3]);
        a[7] = 2.0 * (p[0][2] - p[1][3]);
        a[3] = 2.0 * (p[0][3] + p[1][2]);
        a[9] = 2.0 * (p[0][3] - p[1][2]);
        a[4] = p[0][0] + p[1][1] - p[2][2] - p[3][3];
        a[6] = p[0][0] - p[1][1] + p[2][2] - p[3][3];
        a[8] = p[0][0] - p[1][1] - p[2][2] + p[3][3];
        Self { a }
    }

    pub fn from_array(a: [f64; 10]) -> Self {
        Self { a }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.a[k]
    }

    pub fn as_array(&self) -> &[f64; 10] {
        &self.a
    }

    /// `(A_0, A_1, A_2, A_3)`, the Bell-input output spectrum before sorting.
    pub fn populations(&self) -> [f64; 4] {
        [self.a[0], self.a[1], self.a[2], self.a[3]]
    }

    /// Gap `A_0 − A_1` between the two largest populations.
    pub fn gap(&self) -> f64 {
        self.a[0] - self.a[1]
    }

    /// Coupling `A_4 + A_5` of the `{Φ⁺, Ψ⁺}` block.
    pub fn coupling(&self) -> f64 {
        self.a[4] + self.a[5]
    }

    /// Checks the ordering `A_0 ≥ A_1 ≥ max(A_2, A_3)`, `A_4, A_5 ≥ 0` that
    /// regularized channels satisfy.
    pub fn check_regularized(&self) -> Result<()> {
        let a = &self.a;
        let tol = INTERNAL_TOL;
        if a[0] + tol < a[1] {
            return Err(Error::NotRegularized(format!("A0={} < A1={}", a[0], a[1])));
        }
        if a[1] + tol < a[2].max(a[3]) {
            return Err(Error::NotRegularized(format!(
                "A1={} < max(A2,A3)={}",
                a[1],
                a[2].max(a[3])
            )));
        }
        if a[4] < -tol || a[5] < -tol {
            return Err(Error::NotRegularized(format!(
                "negative coupling A4={}, A5={}",
                a[4], a[5]
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn make_channel_examples() {
        assert!(ChannelParams::new([1.0, 0.0, 0.0, 0.0], 0.5).is_ok());
        assert!(ChannelParams::new([0.25; 4], 0.0).is_ok());
        assert!(matches!(
            ChannelParams::new([0.5, 0.6, -0.1, 0.0], 0.3),
            Err(Error::NegativeProbability { index: 2, .. })
        ));
    }

    #[test]
    fn make_channel_rejects_bad_input() {
        assert!(matches!(
            ChannelParams::new([0.5, 0.5, 0.1, 0.0], 0.3),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            ChannelParams::new([0.25; 4], 1.5),
            Err(Error::MuOutOfRange(_))
        ));
        assert!(matches!(
            ChannelParams::new([0.25; 4], -0.1),
            Err(Error::MuOutOfRange(_))
        ));
        assert!(ChannelParams::new([f64::NAN, 0.0, 0.0, 1.0], 0.3).is_err());
        // inside the input tolerance: accepted and renormalized
        let ch = ChannelParams::new([0.25 + 4e-10, 0.25, 0.25, 0.25], 0.1).unwrap();
        assert!((ch.q().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn joint_distribution_limits() {
        let id = ChannelParams::identity(0.37).unwrap().joint_distribution();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert_eq!(id.get(i, j), want);
            }
        }

        let q = [0.4, 0.3, 0.2, 0.1];
        let free = ChannelParams::new(q, 0.0).unwrap().joint_distribution();
        let locked = ChannelParams::new(q, 1.0).unwrap().joint_distribution();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(free.get(i, j), q[i] * q[j], epsilon = 1e-15);
                let want = if i == j { q[i] } else { 0.0 };
                assert_abs_diff_eq!(locked.get(i, j), want, epsilon = 1e-15);
            }
        }
        for (r, qi) in free.row_sums().iter().zip(q) {
            assert_abs_diff_eq!(*r, qi, epsilon = 1e-15);
        }
    }

    #[test]
    fn identity_coefficients() {
        let ac = ChannelParams::identity(0.5).unwrap().a_coefficients();
        let want = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        assert_eq!(ac.as_array(), &want);
    }

    #[test]
    fn solvable_coefficients_match_closed_forms() {
        // independent route: sum the 16 joint-distribution entries by hand
        let (x, mu) = (0.3_f64, 0.7_f64);
        let q = [x, x, 0.5 - x, 0.5 - x];
        let p = |i: usize, j: usize| (1.0 - mu) * q[i] * q[j] + if i == j { mu * q[i] } else { 0.0 };
        let a0 = p(0, 0) + p(1, 1) + p(2, 2) + p(3, 3);
        let a1 = 2.0 * (p(0, 1) + p(2, 3));
        let a2 = 2.0 * (p(0, 2) + p(1, 3));
        assert_abs_diff_eq!(a0, 0.778, epsilon = 1e-12);
        assert_abs_diff_eq!(a1, 0.078, epsilon = 1e-12);
        assert_abs_diff_eq!(a2, 0.072, epsilon = 1e-12);

        let ac = ChannelParams::solvable(x, mu).unwrap().a_coefficients();
        assert_abs_diff_eq!(ac.get(0), 0.778, epsilon = 1e-12);
        assert_abs_diff_eq!(ac.get(1), 0.078, epsilon = 1e-12);
        assert_abs_diff_eq!(ac.get(2), 0.072, epsilon = 1e-12);
        assert_abs_diff_eq!(ac.get(3), 0.072, epsilon = 1e-12);
        // closed forms of the solvable family
        assert_abs_diff_eq!(ac.get(2), 4.0 * (1.0 - mu) * (0.5 - x) * x, epsilon = 1e-12);
        let a1_closed = 2.0 * (1.0 - mu) * ((0.5 - x).powi(2) + x * x);
        assert_abs_diff_eq!(ac.get(1), a1_closed, epsilon = 1e-12);
        assert_abs_diff_eq!(ac.get(0), mu + a1_closed, epsilon = 1e-12);
        // the decoupled-block structure of this family
        for k in [6, 7, 8, 9] {
            assert_abs_diff_eq!(ac.get(k), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn regularize_examples() {
        let (r, rec) = ChannelParams::new([0.1, 0.2, 0.3, 0.4], 0.5).unwrap().regularize();
        assert_eq!(r.q(), [0.4, 0.3, 0.2, 0.1]);
        assert_eq!(rec.order, [3, 2, 1, 0]);
        assert_eq!(rec.restore(r.q()), [0.1, 0.2, 0.3, 0.4]);

        let ch = ChannelParams::new([0.4, 0.3, 0.2, 0.1], 0.5).unwrap();
        let (r, rec) = ch.regularize();
        assert_eq!(r, ch);
        assert!(rec.is_identity());
        assert_eq!(rec.describe(), "already regularized");
    }

    #[test]
    fn regularize_ties_are_stable() {
        let (_, rec) = ChannelParams::new([0.2, 0.3, 0.3, 0.2], 0.1).unwrap().regularize();
        assert_eq!(rec.order, [1, 2, 0, 3]);
    }

    #[test]
    fn regularization_factors_into_klein_and_axis_moves() {
        let ch = ChannelParams::new([0.1, 0.4, 0.3, 0.2], 0.5).unwrap();
        let (r, rec) = ch.regularize();
        assert_eq!(rec.klein, 1);
        let q = ch.q();
        // Klein move then axis relabeling reproduces the sorted vector
        let after_klein = [q[1], q[0], q[3], q[2]];
        let mut rebuilt = [after_klein[0]; 4];
        for i in 0..3 {
            rebuilt[i + 1] = after_klein[rec.axes[i]];
        }
        assert_eq!(rebuilt, r.q());
        assert!(!rec.describe().is_empty());
    }

    #[test]
    fn solvable_range_checked() {
        assert!(matches!(
            ChannelParams::solvable(0.6, 0.2),
            Err(Error::XOutOfRange { .. })
        ));
        assert!(ChannelParams::symmetric(1.0, 0.2).is_ok());
        assert!(ChannelParams::symmetric(1.1, 0.2).is_err());
    }
}
