//! Eigenvalues of 4×4 Hermitian matrices, von Neumann entropy and the
//! majorization tools used to compare output spectra.

use serde::{Deserialize, Serialize};

use crate::bell::HermitianOutput;
use crate::error::{Error, Result};
use crate::linalg::{Mat4, C64, ZERO};

/// Eigenvalues in `[−CLAMP_TOL, 0)` are treated as zero.
pub const CLAMP_TOL: f64 = 1e-10;
/// Partial-sum tolerance for [`majorizes`].
pub const MAJORIZATION_TOL: f64 = 1e-12;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Four eigenvalues in descending order summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    lambda: [f64; 4],
}

impl Spectrum {
    /// Sorts `values` descending and checks they form a probability vector.
    pub fn new(mut values: [f64; 4]) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("non-finite entry in {values:?}")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        if values[3] < -CLAMP_TOL {
            return Err(Error::NegativeEigenvalue(values[3]));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > CLAMP_TOL {
            return Err(Error::InvalidSpectrum(format!("eigenvalues sum to {sum}")));
        }
        Ok(Self { lambda: values })
    }

    pub fn values(&self) -> [f64; 4] {
        self.lambda
    }

    pub fn get(&self, k: usize) -> f64 {
        self.lambda[k]
    }

    /// Descending partial sums `λ_0, λ_0 + λ_1, …`.
    pub fn partial_sums(&self) -> [f64; 4] {
        partial_sums(&self.lambda)
    }

    pub fn max_abs_diff(&self, other: &Spectrum) -> f64 {
        self.lambda
            .iter()
            .zip(other.lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition: `m = V diag(values) V†`, values descending, the
/// `k`-th column of `vectors` belonging to `values[k]`.
#[derive(Debug, Clone, Copy)]
pub struct Eigh {
    pub values: [f64; 4],
    pub vectors: Mat4,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> [C64; 4] {
        [
            self.vectors[(0, k)],
            self.vectors[(1, k)],
            self.vectors[(2, k)],
            self.vectors[(3, k)],
        ]
    }

    pub fn reconstruct(&self) -> Mat4 {
        let d = Mat4::from_diag(self.values);
        self.vectors * d * self.vectors.adjoint()
    }
}

/// Cyclic complex Jacobi diagonalization of a Hermitian 4×4 matrix.
///
/// Sweeps until the off-diagonal Frobenius mass drops below `1e-14` (scaled
/// by the matrix norm when it exceeds one). Inputs whose Hermitian defect
/// exceeds `1e-10` are rejected; smaller defects are removed by keeping the
/// upper triangle.
pub fn eigh(m: &Mat4) -> Result<Eigh> {
    let defect = m.hermitian_defect();
    if !defect.is_finite() || defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let mut a = [[ZERO; 4]; 4];
    for i in 0..4 {
        a[i][i] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..4 {
            a[i][j] = m[(i, j)];
            a[j][i] = m[(i, j)].conj();
        }
    }
    let mut v = Mat4::identity().0;
    let tol = JACOBI_OFF_TOL * m.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..4)
            .flat_map(|i| ((i + 1)..4).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a[i][j].norm_sqr())
            .sum();
        if off.sqrt() < tol {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| a[y][y].re.total_cmp(&a[x][x].re));
    let values = order.map(|k| a[k][k].re);
    let mut vectors = Mat4::zeros();
    for (col, &k) in order.iter().enumerate() {
        for row in 0..4 {
            vectors[(row, col)] = v[row][k];
        }
    }
    Ok(Eigh { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut [[C64; 4]; 4], v: &mut [[C64; 4]; 4], p: usize, q: usize) {
    let apq = a[p][q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let u = apq / r;
    let tau = (a[q][q].re - a[p][p].re) / (2.0 * r);
    let t = if tau == 0.0 {
        1.0
    } else if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let su = u * s;
    let su_bar = su.conj();

    // A ← A J with J_pp = J_qq = c, J_pq = s u, J_qp = −s ū
    for row in a.iter_mut() {
        let (kp, kq) = (row[p], row[q]);
        row[p] = kp * c - kq * su_bar;
        row[q] = kp * su + kq * c;
    }
    // A ← J† A
    for k in 0..4 {
        let (pk, qk) = (a[p][k], a[q][k]);
        a[p][k] = pk * c - qk * su;
        a[q][k] = pk * su_bar + qk * c;
    }
    a[p][q] = ZERO;
    a[q][p] = ZERO;
    a[p][p].im = 0.0;
    a[q][q].im = 0.0;
    for row in v.iter_mut() {
        let (kp, kq) = (row[p], row[q]);
        row[p] = kp * c - kq * su_bar;
        row[q] = kp * su + kq * c;
    }
}

/// Eigenvalues of a channel output, descending.
pub fn eigenvalues_hermitian4(m: &HermitianOutput) -> Result<Spectrum> {
    Spectrum::new(eigh(m.matrix())?.values)
}

/// `−Σ λ log₂ λ` with `0 log 0 = 0`.
pub fn von_neumann_entropy(s: &Spectrum) -> f64 {
    entropy_bits(&s.lambda)
}

/// Entropy of raw eigenvalues; entries below zero count as zero.
pub fn entropy_bits(values: &[f64]) -> f64 {
    values.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `H₂(z) = −z log₂ z − (1 − z) log₂(1 − z)`.
pub fn binary_entropy(z: f64) -> f64 {
    entropy_bits(&[z, 1.0 - z])
}

pub fn partial_sums(values: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    let mut acc = 0.0;
    for (o, v) in out.iter_mut().zip(values) {
        acc += v;
        *o = acc;
    }
    out
}

/// `x ≻ y`: every descending partial sum of `x` dominates that of `y`.
pub fn majorizes(x: &Spectrum, y: &Spectrum) -> bool {
    let (px, py) = (x.partial_sums(), y.partial_sums());
    (0..3).all(|k| px[k] >= py[k] - MAJORIZATION_TOL) && (px[3] - py[3]).abs() <= CLAMP_TOL
}

/// Moves `delta` of weight from `λ_j` to `λ_i` (positions in descending
/// order) and re-sorts.
pub fn spread_pair(s: &Spectrum, i: usize, j: usize, delta: f64) -> Result<Spectrum> {
    if i >= 4 {
        return Err(Error::IndexError(i));
    }
    if j >= 4 || j == i {
        return Err(Error::IndexError(j));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidSpectrum(format!("spread delta {delta} must be >= 0")));
    }
    let mut l = s.lambda;
    if l[i] < l[j] {
        return Err(Error::InvalidSpectrum(format!(
            "spread source lambda_{i}={} is below lambda_{j}={}",
            l[i], l[j]
        )));
    }
    if l[j] - delta < 0.0 {
        return Err(Error::NegativeEigenvalue(l[j] - delta));
    }
    l[i] += delta;
    l[j] -= delta;
    Spectrum::new(l)
}

/// T-transform `y = t x + (1 − t) P_ij x`; the result is majorized by `s`.
pub fn t_transform(s: &Spectrum, i: usize, j: usize, t: f64) -> Result<Spectrum> {
    if i >= 4 || j >= 4 || i == j {
        return Err(Error::IndexError(i.max(j)));
    }
    let mut l = s.lambda;
    let (xi, xj) = (l[i], l[j]);
    l[i] = t * xi + (1.0 - t) * xj;
    l[j] = t * xj + (1.0 - t) * xi;
    Spectrum::new(l)
}
