//! Bell-basis representation of pure two-qubit inputs and of the channel
//! output, plus the brute-force computational-basis Kraus sum used as an
//! oracle for it.
//!
//! Conventions: `Φ± = (|00⟩ ± |11⟩)/√2`, `Ψ± = (|01⟩ ± |10⟩)/√2`, basis order
//! `(Φ⁺, Ψ⁺, Ψ⁻, Φ⁻)`. In this basis every Pauli pair `σ_i ⊗ σ_j` is a phased
//! permutation from the Klein group `m → m ⊕ k`, so the output is fixed by
//! the ten [`ACoefficients`].

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::{ACoefficients, ChannelParams, INTERNAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, CVec4, Mat4, C64, I, ONE, ZERO};
use crate::spectral;

/// Tolerance on `Σ|a_i|² − 1` for a [`BellVector`].
pub const BELL_NORM_TOL: f64 = 1e-12;

/// Pure input `a_0 Φ⁺ + a_1 Ψ⁺ + a_2 Ψ⁻ + a_3 Φ⁻`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellVector {
    a: CVec4,
}

impl BellVector {
    pub fn new(a: CVec4) -> Result<Self> {
        let norm_sq = norm_sqr(&a);
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > BELL_NORM_TOL {
            return Err(Error::VectorNotNormalized { norm_sq });
        }
        Ok(Self { a })
    }

    /// Rescales `a` onto the unit sphere; fails only for the zero vector.
    pub fn normalized(a: CVec4) -> Result<Self> {
        let norm_sq = norm_sqr(&a);
        if !norm_sq.is_finite() || norm_sq < 1e-300 {
            return Err(Error::VectorNotNormalized { norm_sq });
        }
        let s = 1.0 / norm_sq.sqrt();
        Ok(Self { a: a.map(|x| x * s) })
    }

    pub fn from_real(a: [f64; 4]) -> Result<Self> {
        Self::new(a.map(|x| C64::new(x, 0.0)))
    }

    /// The `k`-th Bell state.
    pub fn basis(k: usize) -> Self {
        let mut a = [ZERO; 4];
        a[k] = ONE;
        Self { a }
    }

    /// `(e_i + e^{iφ} e_j)/√2`.
    pub fn equal_superposition(i: usize, j: usize, phase: f64) -> Self {
        assert!(i < 4 && j < 4 && i != j, "two distinct Bell indices");
        let mut a = [ZERO; 4];
        a[i] = C64::new(FRAC_1_SQRT_2, 0.0);
        a[j] = C64::from_polar(FRAC_1_SQRT_2, phase);
        Self { a }
    }

    pub fn amplitudes(&self) -> &CVec4 {
        &self.a
    }

    /// Bell populations `|a_i|²`.
    pub fn weights(&self) -> [f64; 4] {
        self.a.map(|x| x.norm_sqr())
    }

    /// Weight `k = |a_0|² + |a_1|²` of the `{Φ⁺, Ψ⁺}` subspace.
    pub fn subspace_weight(&self) -> f64 {
        self.a[0].norm_sqr() + self.a[1].norm_sqr()
    }

    /// Angle θ with `|a_0| = √k cos θ`, `|a_1| = √k sin θ`.
    pub fn theta(&self) -> f64 {
        self.a[1].norm().atan2(self.a[0].norm())
    }

    /// Relative phase φ of `a_1` with respect to `a_0`.
    pub fn phi(&self) -> f64 {
        if self.a[0].norm() == 0.0 || self.a[1].norm() == 0.0 {
            return 0.0;
        }
        (self.a[1] * self.a[0].conj()).arg()
    }

    /// Same ray with the first non-negligible amplitude real and positive.
    pub fn canonical_phase(&self) -> Self {
        let lead = self.a.iter().copied().find(|x| x.norm() > 1e-12).unwrap_or(ONE);
        let rot = lead.conj() / lead.norm();
        Self {
            a: self.a.map(|x| x * rot),
        }
    }

    /// Density matrix `|ψ⟩⟨ψ|` in the Bell basis.
    pub fn projector(&self) -> Mat4 {
        Mat4::projector(&self.a)
    }
}

/// `B = ℰ(|ψ⟩⟨ψ|)` in the Bell basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianOutput {
    b: Mat4,
}

impl HermitianOutput {
    /// Wraps a matrix after checking Hermiticity to `1e-12`.
    pub fn from_matrix(b: Mat4) -> Result<Self> {
        let defect = b.hermitian_defect();
        if defect > INTERNAL_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { b })
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.b
    }
}

/// Coherence coefficients `(α, β)` for the Bell pair `(i, j)`, `i ≠ j`, such
/// that `B_ij = α ρ_ij + β ρ_ji`.
///
/// The table is symmetric in `(i, j)` and invariant under the complementary
/// pair: `{0,1},{2,3} → (A_4, A_5)`, `{0,3},{1,2} → (A_8, A_9)`,
/// `{0,2},{1,3} → (A_6, −A_7)`. The sign on `A_7` comes from the phase `σ_2`
/// picks up between `Φ⁺` and `Ψ⁻` in the chosen convention.
pub fn coherence_coefficients(ac: &ACoefficients, i: usize, j: usize) -> (f64, f64) {
    debug_assert!(i != j);
    match i ^ j {
        1 => (ac.get(4), ac.get(5)),
        2 => (ac.get(6), -ac.get(7)),
        3 => (ac.get(8), ac.get(9)),
        _ => unreachable!("i and j must differ"),
    }
}

/// Applies the channel to an arbitrary operator given in the Bell basis.
///
/// The map is self-adjoint with respect to the Hilbert–Schmidt inner product,
/// so the same function also evaluates `ℰ†`.
pub fn apply_in_bell_basis(ac: &ACoefficients, rho: &Mat4) -> Mat4 {
    let pops = ac.populations();
    let mut out = Mat4::zeros();
    for i in 0..4 {
        let mut d = ZERO;
        for m in 0..4 {
            d += rho[(m, m)] * pops[i ^ m];
        }
        out[(i, i)] = d;
    }
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                let (alpha, beta) = coherence_coefficients(ac, i, j);
                out[(i, j)] = rho[(i, j)] * alpha + rho[(j, i)] * beta;
            }
        }
    }
    out
}

/// Output matrix for a pure input, straight from the A-coefficient formulas:
/// `B_ii = Σ_m A_{i⊕m} |a_m|²` and `B_ij = α a_i a_j* + β a_i* a_j`.
pub fn output_matrix(ac: &ACoefficients, psi: &BellVector) -> HermitianOutput {
    let a = psi.amplitudes();
    let w = psi.weights();
    let pops = ac.populations();
    let mut b = Mat4::zeros();
    for i in 0..4 {
        let d: f64 = (0..4).map(|m| pops[i ^ m] * w[m]).sum();
        b[(i, i)] = C64::new(d, 0.0);
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let (alpha, beta) = coherence_coefficients(ac, i, j);
            let z = a[i] * a[j].conj() * alpha + a[i].conj() * a[j] * beta;
            b[(i, j)] = z;
            b[(j, i)] = z.conj();
        }
    }
    HermitianOutput { b }
}

/// Output for a raw (not necessarily normalized) amplitude vector.
pub(crate) fn output_unchecked(ac: &ACoefficients, a: &CVec4) -> Mat4 {
    output_matrix(ac, &BellVector { a: *a }).b
}

/// Single-qubit Paulis `σ_0..σ_3`.
pub fn pauli(k: usize) -> [[C64; 2]; 2] {
    match k {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// `σ_i ⊗ σ_j` in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn pauli_pair(i: usize, j: usize) -> Mat4 {
    Mat4::kron2(&pauli(i), &pauli(j))
}

/// Unitary whose columns are `Φ⁺, Ψ⁺, Ψ⁻, Φ⁻` in the computational basis.
pub fn bell_basis() -> Mat4 {
    let r = FRAC_1_SQRT_2;
    Mat4::from_real([[r, 0.0, 0.0, r], [0.0, r, r, 0.0], [0.0, r, -r, 0.0], [r, 0.0, 0.0, -r]])
}

/// Computational-basis operator → Bell basis (`W† M W`).
pub fn to_bell_basis(m: &Mat4) -> Mat4 {
    let w = bell_basis();
    w.adjoint() * *m * w
}

/// Bell-basis operator → computational basis (`W M W†`).
pub fn to_computational_basis(m: &Mat4) -> Mat4 {
    m.conjugate_by(&bell_basis())
}

/// Computational-basis amplitudes of a Bell-basis vector.
pub fn bell_to_computational(psi: &BellVector) -> CVec4 {
    bell_basis().mul_vec(psi.amplitudes())
}

/// The sixteen-term Kraus sum `Σ p_ij (σ_i⊗σ_j) ρ (σ_i⊗σ_j)` applied in the
/// computational basis. Kept independent of the A-coefficient route.
pub fn apply_channel_computational(ch: &ChannelParams, rho: &Mat4) -> Result<Mat4> {
    validate_density_matrix(rho)?;
    Ok(kraus_sum(ch, rho))
}

fn kraus_sum(ch: &ChannelParams, rho: &Mat4) -> Mat4 {
    let p = ch.joint_distribution();
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let w = p.get(i, j);
            if w != 0.0 {
                out = out + rho.conjugate_by(&pauli_pair(i, j)).scale(w);
            }
        }
    }
    out
}

fn validate_density_matrix(rho: &Mat4) -> Result<()> {
    let defect = rho.hermitian_defect();
    if !defect.is_finite() || defect > 1e-10 {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (defect {defect:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    let eig = spectral::eigh(rho).map_err(|e| Error::InvalidDensityMatrix(e.to_string()))?;
    let min = eig.values[3];
    if min < -1e-10 {
        return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}
