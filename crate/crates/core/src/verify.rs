//! Self-verification suites run by `paulicap verify`.
//!
//! Each suite samples its own seeded inputs and reports the number of checks
//! and the worst observed defect. `quick` mode cuts trial counts by roughly
//! an order of magnitude.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bell::{apply_channel_computational, bell_to_computational, output_matrix, to_bell_basis, BellVector};
use crate::channel::{ACoefficients, ChannelParams};
use crate::conditions::{reduced_eigenvalues, solvable_eigenvalues, solvable_input, sufficient_condition};
use crate::linalg::Mat4;
use crate::optimizer::{analyze, threshold_scan, ExtremalClass, OptimizerConfig};
use crate::perturbation::{finite_difference_check, BasePoint};
use crate::sampling::{random_bell_vector, random_channel, random_regularized_channel, random_simplex};
use crate::spectral::{eigenvalues_hermitian4, majorizes, spread_pair, t_transform, von_neumann_entropy, Spectrum};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Largest defect seen, in the suite's own units.
    pub worst: f64,
    /// Extra finding that does not affect `passed`.
    pub note: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            passed: true,
            checks: 0,
            failures: 0,
            worst: 0.0,
            note: None,
        }
    }

    fn record(&mut self, defect: f64, ok: bool) {
        self.checks += 1;
        if defect.is_nan() || defect > self.worst {
            self.worst = defect;
        }
        if !ok || defect.is_nan() {
            self.failures += 1;
            self.passed = false;
        }
    }
}

fn scale(quick: bool, full: usize) -> usize {
    if quick {
        (full / 10).max(1)
    } else {
        full
    }
}

/// Bell-basis output from the coefficients against the 16-term Kraus sum.
pub fn oracle_equivalence(trials: usize, seed: u64) -> SuiteResult {
    oracle_equivalence_with(trials, seed, |ac, psi| *output_matrix(ac, psi).matrix())
}

/// [`oracle_equivalence`] with a substitute Bell-basis builder, so a
/// deliberately broken formula can be shown to be caught.
pub fn oracle_equivalence_with(
    trials: usize,
    seed: u64,
    build: impl Fn(&ACoefficients, &BellVector) -> Mat4,
) -> SuiteResult {
    let mut res = SuiteResult::new("oracle_equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let ch = random_channel(&mut rng);
        let psi = random_bell_vector(&mut rng);
        let rho = Mat4::projector(&bell_to_computational(&psi));
        let direct = match apply_channel_computational(&ch, &rho) {
            Ok(m) => to_bell_basis(&m),
            Err(_) => {
                res.record(f64::INFINITY, false);
                continue;
            }
        };
        let d = build(&ch.a_coefficients(), &psi).max_abs_diff(&direct);
        res.record(d, d <= 1e-12);
    }
    res
}

/// Closed-form spectra of the solvable family and of the two-Bell subspace
/// against full diagonalization.
pub fn closed_form_spectra(quick: bool, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("closed_form_spectra");
    let (nx, nmu, nk) = if quick { (6, 6, 6) } else { (11, 21, 21) };
    for ix in 0..nx {
        let x = 0.5 * ix as f64 / (nx - 1) as f64;
        for imu in 0..nmu {
            let mu = imu as f64 / (nmu - 1) as f64;
            let ac = ChannelParams::solvable(x, mu).expect("grid point").a_coefficients();
            for ik in 0..nk {
                let k = ik as f64 / (nk - 1) as f64;
                let (Ok(formula), Ok(psi)) = (solvable_eigenvalues(x, mu, k, None), solvable_input(x, mu, k, None))
                else {
                    res.record(f64::INFINITY, false);
                    continue;
                };
                let d = eigenvalues_hermitian4(&output_matrix(&ac, &psi))
                    .map(|s| s.max_abs_diff(&formula))
                    .unwrap_or(f64::INFINITY);
                res.record(d, d <= 1e-10);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channels = scale(quick, 50);
    for _ in 0..channels {
        let ac = random_regularized_channel(&mut rng).a_coefficients();
        for it in 0..=20 {
            let theta = std::f64::consts::FRAC_PI_2 * it as f64 / 20.0;
            for ip in 0..5 {
                let phi = std::f64::consts::PI * ip as f64 / 5.0;
                let psi = BellVector::new([
                    num_complex::Complex64::new(theta.cos(), 0.0),
                    num_complex::Complex64::from_polar(theta.sin(), phi),
                    num_complex::Complex64::new(0.0, 0.0),
                    num_complex::Complex64::new(0.0, 0.0),
                ])
                .expect("unit vector");
                let d = match (
                    reduced_eigenvalues(&ac, theta, phi),
                    eigenvalues_hermitian4(&output_matrix(&ac, &psi)),
                ) {
                    (Ok(f), Ok(e)) => f.max_abs_diff(&e),
                    _ => f64::INFINITY,
                };
                res.record(d, d <= 1e-10);
            }
        }
    }
    res
}

/// Above `μ = |4x − 1|` the Bell spectrum majorizes every in-family spectrum
/// with weight `k ∈ [½, 1]`.
pub fn solvable_majorization(quick: bool) -> SuiteResult {
    let mut res = SuiteResult::new("solvable_majorization");
    let n = if quick { 8 } else { 26 };
    for ix in 0..n {
        let x = 0.5 * ix as f64 / (n - 1) as f64;
        for imu in 0..n {
            let mu = imu as f64 / (n - 1) as f64;
            if mu <= (4.0 * x - 1.0).abs() {
                continue;
            }
            let bell = solvable_eigenvalues(x, mu, 1.0, None).expect("grid point");
            for ik in 0..=10 {
                let k = 0.5 + 0.05 * ik as f64;
                let s = solvable_eigenvalues(x, mu, k, None).expect("grid point");
                let ok = majorizes(&bell, &s);
                res.record(if ok { 0.0 } else { 1.0 }, ok);
            }
        }
    }
    res
}

fn random_spectrum(rng: &mut ChaCha8Rng) -> Spectrum {
    Spectrum::new(random_simplex(rng)).expect("simplex point")
}

/// T-transforms never lower the entropy and are majorized by their input.
pub fn schur_concavity(trials: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("schur_concavity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s = random_spectrum(&mut rng);
        let i = rng.gen_range(0..4);
        let j = (i + rng.gen_range(1..4)) % 4;
        let t = rng.gen::<f64>();
        let Ok(y) = t_transform(&s, i, j, t) else {
            res.record(f64::INFINITY, false);
            continue;
        };
        let drop = von_neumann_entropy(&s) - von_neumann_entropy(&y);
        res.record(drop.max(0.0), drop <= 1e-12 && majorizes(&s, &y));
    }
    res
}

/// Moving weight from a smaller to a larger eigenvalue lowers the entropy.
pub fn spreading_lemma(trials: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("spreading_lemma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s = random_spectrum(&mut rng);
        let i = rng.gen_range(0..3);
        let j = rng.gen_range(i + 1..4);
        let delta = rng.gen::<f64>() * s.get(j);
        let Ok(y) = spread_pair(&s, i, j, delta) else {
            res.record(f64::INFINITY, false);
            continue;
        };
        let rise = von_neumann_entropy(&y) - von_neumann_entropy(&s);
        res.record(rise.max(0.0), rise <= 1e-12 && majorizes(&y, &s));
    }
    res
}

/// Analytic shifts against exact perturbed spectra along the same directions
/// at `ε = 1e-3, 1e-4, 1e-5`. Passes when every sign chain holds and
/// `|analytic − exact| / ε²` stays put as `ε` shrinks (second-order error).
/// `worst` is the largest such ratio; how often it exceeds 10 is noted, since
/// it grows like coupling² / gap and has no fixed bound.
pub fn perturbation_residuals(channels: usize, trials: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("perturbation_residuals");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut above_ten = 0;
    for c in 0..channels {
        let ch = random_regularized_channel(&mut rng);
        for base in [BasePoint::Bell, BasePoint::Product] {
            let runs: Vec<_> = [1e-3, 1e-4, 1e-5]
                .into_iter()
                .map(|eps| finite_difference_check(&ch, base, eps, trials, seed ^ c as u64))
                .collect::<crate::error::Result<_>>()
                .unwrap_or_default();
            if runs.len() != 3 {
                res.record(f64::INFINITY, false);
                continue;
            }
            let (coarse, fine) = (runs[0].max_residual, runs[2].max_residual);
            let worst = runs.iter().map(|r| r.max_residual).fold(0.0, f64::max);
            let scaling = (fine - coarse).abs() <= 0.5 * coarse.max(fine) + 1e-6;
            let signs = runs.iter().all(|r| r.sign_chain_violations == 0);
            if worst > 10.0 {
                above_ten += 1;
            }
            res.record(worst, scaling && signs);
        }
    }
    res.note = Some(format!("{above_ten} of {} cases above 10", res.checks));
    res
}

/// The analytic thresholds against the optimizer: random channels above the
/// general sufficient threshold must have a Bell minimizer, and a bisection
/// on the solvable family must land on `|4x − 1|`.
pub fn threshold_consistency(channels: usize, seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("threshold_consistency");
    let cfg = OptimizerConfig {
        restarts: 8,
        seed,
        ..OptimizerConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..channels {
        let ch = random_channel(&mut rng);
        if !sufficient_condition(&ch).satisfied {
            continue;
        }
        match analyze(&ch, &cfg) {
            Ok(a) => {
                let ok = a.capacity.extremal_class == ExtremalClass::SingleBell;
                res.record(if ok { 0.0 } else { 1.0 }, ok);
            }
            Err(_) => res.record(f64::INFINITY, false),
        }
    }
    let x = 0.3;
    let q = ChannelParams::solvable(x, 0.0).expect("family point").q();
    let d = threshold_scan(q, 0.0, 1.0, &cfg)
        .map(|mu| (mu - (4.0 * x - 1.0_f64).abs()).abs())
        .unwrap_or(f64::INFINITY);
    res.record(d, d <= 1e-3);
    res
}

/// Identity and perfectly correlated channels are noiseless for Bell inputs.
pub fn capacity_limits(seed: u64) -> SuiteResult {
    let mut res = SuiteResult::new("capacity_limits");
    let cfg = OptimizerConfig {
        restarts: 4,
        seed,
        ..OptimizerConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut channels = vec![
        ChannelParams::identity(0.0).expect("valid"),
        ChannelParams::identity(1.0).expect("valid"),
    ];
    for _ in 0..5 {
        channels.push(ChannelParams::new(random_simplex(&mut rng), 1.0).expect("valid"));
    }
    for ch in channels {
        let d = analyze(&ch, &cfg)
            .map(|a| (a.capacity.capacity_bits - 2.0).abs())
            .unwrap_or(f64::INFINITY);
        res.record(d, d <= 1e-9);
    }
    res
}

/// All suites in a fixed order.
pub fn run_all(quick: bool, seed: u64) -> Vec<SuiteResult> {
    vec![
        oracle_equivalence(scale(quick, 1000), seed),
        closed_form_spectra(quick, seed),
        solvable_majorization(quick),
        schur_concavity(scale(quick, 10_000), seed),
        spreading_lemma(scale(quick, 10_000), seed),
        perturbation_residuals(scale(quick, 100), scale(quick, 50), seed),
        threshold_consistency(scale(quick, 300), seed),
        capacity_limits(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        for r in run_all(true, 0) {
            assert!(r.passed, "{r:?}");
            assert!(r.checks > 0, "{r:?}");
        }
    }

    #[test]
    fn corrupted_coefficients_are_caught() {
        let r = oracle_equivalence_with(20, 1, |ac, psi| {
            let mut a = *ac.as_array();
            a[7] = -a[7];
            *output_matrix(&ACoefficients::from_array(a), psi).matrix()
        });
        assert!(!r.passed);
    }
}
