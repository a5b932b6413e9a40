//! Seeded random generators for channels, inputs and test matrices.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::bell::BellVector;
use crate::channel::ChannelParams;
use crate::linalg::{inner, norm_sqr, CVec4, Mat4, C64};

/// Uniform point on the probability simplex.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    let e: [f64; 4] = std::array::from_fn(|_| Exp1.sample(rng));
    let total: f64 = e.iter().sum();
    e.map(|x| x / total)
}

/// `q` uniform on the simplex, `μ` uniform on `[0, 1]`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelParams {
    let q = random_simplex(rng);
    let mu = rng.gen::<f64>();
    ChannelParams::new(q, mu).expect("simplex sample is a valid channel")
}

/// Like [`random_channel`] with `q` sorted descending.
pub fn random_regularized_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelParams {
    random_channel(rng).regularize().0
}

pub fn random_complex_vector<R: Rng + ?Sized>(rng: &mut R) -> CVec4 {
    std::array::from_fn(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

/// Haar-random pure input.
pub fn random_bell_vector<R: Rng + ?Sized>(rng: &mut R) -> BellVector {
    loop {
        if let Ok(v) = BellVector::normalized(random_complex_vector(rng)) {
            return v;
        }
    }
}

/// Random unit vector orthogonal (in the real sense, `Re⟨a, d⟩ = 0`) to `a`,
/// with the global-phase direction `i a` also removed.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, a: &CVec4) -> CVec4 {
    loop {
        let mut d = random_complex_vector(rng);
        let overlap = inner(a, &d);
        for k in 0..4 {
            d[k] -= a[k] * overlap;
        }
        let n = norm_sqr(&d).sqrt();
        if n > 1e-8 {
            return d.map(|x| x / n);
        }
    }
}

/// Haar-random unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let mut cols: Vec<CVec4> = Vec::with_capacity(4);
    while cols.len() < 4 {
        let mut v = random_complex_vector(rng);
        for c in &cols {
            let ov = inner(c, &v);
            for k in 0..4 {
                v[k] -= c[k] * ov;
            }
        }
        let n = norm_sqr(&v).sqrt();
        if n > 1e-6 {
            cols.push(v.map(|x| x / n));
        }
    }
    let mut u = Mat4::zeros();
    for (j, c) in cols.iter().enumerate() {
        for i in 0..4 {
            u[(i, j)] = c[i];
        }
    }
    u
}

/// Random full-rank density matrix `G G† / tr`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let mut g = Mat4::zeros();
    for i in 0..4 {
        let row = random_complex_vector(rng);
        for j in 0..4 {
            g[(i, j)] = row[j];
        }
    }
    let m = g * g.adjoint();
    m.scale(1.0 / m.trace().re)
}
