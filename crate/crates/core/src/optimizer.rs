//! Minimal output entropy over pure two-qubit inputs, the two-use capacity
//! `C = 2 − min S(ℰ(ρ))`, and numerical location of the entanglement
//! threshold in `μ`.
//!
//! The search is Riemannian gradient descent on the unit sphere of Bell
//! amplitudes with Armijo backtracking, started from every Bell state, every
//! equal two-Bell superposition and a batch of seeded random points. Runs are
//! independent and merged by a deterministic reduction, so the answer does
//! not depend on whether the restarts ran in parallel.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{apply_in_bell_basis, output_matrix, output_unchecked, BellVector};
use crate::channel::{ACoefficients, ChannelParams};
use crate::conditions::{coupling_phase, extremal_candidates};
use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, CVec4, Mat4, ZERO};
use crate::par;
use crate::sampling::random_complex_vector;
use crate::spectral::{eigh, entropy_bits, von_neumann_entropy, Spectrum};

/// Entropy margin separating a strict entanglement advantage from a tie.
pub const ENHANCEMENT_MARGIN: f64 = 1e-9;
/// Bisection width for [`threshold_scan`].
pub const THRESHOLD_SCAN_TOL: f64 = 1e-4;
/// Weight tolerance used when classifying optimizer results.
pub const CLASSIFY_TOL: f64 = 1e-6;

const ARMIJO_C: f64 = 1e-4;
const STALL_WINDOW: usize = 50;
const STALL_DELTA: f64 = 1e-12;
const LOG_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Random restarts on top of the 22 structured starting points.
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Backtracking factor in `(0, 1)`.
    pub step_shrink: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 10_000,
            gradient_tolerance: 1e-10,
            step_shrink: 0.5,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.gradient_tolerance.is_nan() || self.gradient_tolerance <= 0.0 || !self.gradient_tolerance.is_finite() {
            return Err(Error::InvalidConfig("gradient_tolerance must be > 0".into()));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidConfig("step_shrink must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalClass {
    SingleBell,
    EqualTwoBell,
    Other,
}

impl ExtremalClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremalClass::SingleBell => "single_bell",
            ExtremalClass::EqualTwoBell => "equal_two_bell",
            ExtremalClass::Other => "other",
        }
    }
}

impl fmt::Display for ExtremalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Phase-insensitive classification by Bell populations.
pub fn classify_extremal(psi: &BellVector, tol: f64) -> ExtremalClass {
    let mut w = psi.weights();
    if w.iter().any(|&x| x > 1.0 - tol) {
        return ExtremalClass::SingleBell;
    }
    w.sort_by(|a, b| b.total_cmp(a));
    if (w[0] - 0.5).abs() < tol && (w[1] - 0.5).abs() < tol && w[2] < tol && w[3] < tol {
        ExtremalClass::EqualTwoBell
    } else {
        ExtremalClass::Other
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    pub capacity_bits: f64,
    pub min_entropy_bits: f64,
    pub argmin: BellVector,
    pub extremal_class: ExtremalClass,
    pub converged: bool,
}

/// Best Bell input against the best input of any other kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enhancement {
    /// Bell input wins by more than [`ENHANCEMENT_MARGIN`].
    pub enhanced: bool,
    /// The two agree within the margin.
    pub degenerate: bool,
    pub bell_entropy: f64,
    pub non_bell_entropy: f64,
}

/// Where a descent run started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Bell(usize),
    Pair { i: usize, j: usize, phase: f64 },
    Random(usize),
}

impl Start {
    pub fn is_seeded(&self) -> bool {
        !matches!(self, Start::Random(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMinimum {
    pub start: Start,
    pub psi: BellVector,
    pub entropy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub class: ExtremalClass,
}

/// Everything a single multistart search produces.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub channel: ChannelParams,
    pub capacity: CapacityResult,
    pub enhancement: Enhancement,
    pub runs: Vec<LocalMinimum>,
}

impl Analysis {
    /// Best entropy among runs started from structured points.
    pub fn seeded_best(&self) -> f64 {
        self.best_where(|r| r.start.is_seeded())
    }

    /// Best entropy among random restarts.
    pub fn random_best(&self) -> f64 {
        self.best_where(|r| !r.start.is_seeded())
    }

    fn best_where(&self, pred: impl Fn(&LocalMinimum) -> bool) -> f64 {
        self.runs
            .iter()
            .filter(|r| pred(r))
            .map(|r| r.entropy)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Output entropy (bits) of a unit amplitude vector.
pub fn output_entropy(ac: &ACoefficients, a: &CVec4) -> f64 {
    let b = output_unchecked(ac, a);
    entropy_bits(&eigh(&b).expect("channel output is Hermitian").values)
}

/// Entropy and its Riemannian gradient on the unit sphere.
///
/// With `B = ℰ(a a†)` and `G = −log₂ B`, the Euclidean gradient is `2 ℰ†(G) a`
/// (ℰ is self-adjoint); projecting out the radial part leaves a tangent
/// vector, which also has no component along the global phase `i a`.
pub fn entropy_gradient(ac: &ACoefficients, a: &CVec4) -> (f64, CVec4) {
    let b = output_unchecked(ac, a);
    let e = eigh(&b).expect("channel output is Hermitian");
    let entropy = entropy_bits(&e.values);
    let mut g = Mat4::zeros();
    for k in 0..4 {
        let w = -e.values[k].max(LOG_FLOOR).log2();
        g = g + Mat4::projector(&e.vector(k)).scale(w);
    }
    let h = apply_in_bell_basis(ac, &g);
    let euclid = h.mul_vec(a).map(|x| x * 2.0);
    let radial = inner(a, &euclid).re;
    let mut grad = [ZERO; 4];
    for k in 0..4 {
        grad[k] = euclid[k] - a[k] * radial;
    }
    (entropy, grad)
}

fn normalize(a: &CVec4) -> CVec4 {
    let n = norm_sqr(a).sqrt();
    a.map(|x| x / n)
}

fn real_dot(u: &CVec4, v: &CVec4) -> f64 {
    inner(u, v).re
}

struct Descent {
    a: CVec4,
    entropy: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
}

/// Armijo-backtracked gradient descent with Barzilai–Borwein trial steps and
/// renormalization as the retraction.
fn descend(ac: &ACoefficients, start: &CVec4, cfg: &OptimizerConfig) -> Descent {
    let mut a = normalize(start);
    let (mut f, mut g) = entropy_gradient(ac, &a);
    let mut step = 1.0;
    let mut history = Vec::with_capacity(cfg.max_iterations.min(4096) + 1);
    history.push(f);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        let gn2 = norm_sqr(&g);
        if gn2.sqrt() < cfg.gradient_tolerance || f <= 0.0 {
            converged = true;
            break;
        }
        let mut t = step;
        let mut accepted = None;
        while t > 1e-18 {
            let trial = normalize(&std::array::from_fn(|k| a[k] - g[k] * t));
            let ft = output_entropy(ac, &trial);
            if ft <= f - ARMIJO_C * t * gn2 {
                accepted = Some(trial);
                break;
            }
            t *= cfg.step_shrink;
        }
        let Some(next) = accepted else {
            // no descent direction left at working precision
            converged = true;
            break;
        };
        let (fn_, gn) = entropy_gradient(ac, &next);
        let s: CVec4 = std::array::from_fn(|k| next[k] - a[k]);
        let y: CVec4 = std::array::from_fn(|k| gn[k] - g[k]);
        let sy = real_dot(&s, &y);
        step = if sy > 1e-300 {
            (norm_sqr(&s) / sy).clamp(1e-8, 1e4)
        } else {
            (2.0 * t).min(1e4)
        };
        a = next;
        f = fn_;
        g = gn;
        iterations += 1;
        history.push(f);
        if history.len() > STALL_WINDOW && history[history.len() - 1 - STALL_WINDOW] - f < STALL_DELTA {
            converged = true;
            break;
        }
    }
    Descent {
        a,
        entropy: f,
        gradient_norm: norm_sqr(&g).sqrt(),
        iterations,
        converged,
    }
}

/// Replaces a descent result by a nearby structured point (a Bell state or an
/// equal two-Bell superposition) when that point is at least as good.
fn snap(ac: &ACoefficients, bell_entropy: f64, d: Descent) -> (BellVector, f64) {
    let psi = BellVector::normalized(d.a).expect("descent keeps unit norm");
    let mut best = (psi, d.entropy);
    let w = psi.weights();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| w[y].total_cmp(&w[x]));
    let (i, j) = (order[0].min(order[1]), order[0].max(order[1]));

    if w[order[0]] > 0.5 && bell_entropy <= best.1 + 1e-12 {
        return (BellVector::basis(order[0]), bell_entropy);
    }
    if w[i] + w[j] > 0.9 {
        let a = psi.amplitudes();
        let own_phase = (a[j] * a[i].conj()).arg();
        for phase in [own_phase, coupling_phase(ac, i, j)] {
            let cand = BellVector::equal_superposition(i, j, phase);
            let s = output_entropy(ac, cand.amplitudes());
            if s <= best.1 + 1e-12 {
                best = (cand, s);
            }
        }
    }
    best
}

fn starts(cfg: &OptimizerConfig) -> Vec<Start> {
    let mut out: Vec<Start> = (0..4).map(Start::Bell).collect();
    for i in 0..4 {
        for j in (i + 1)..4 {
            for phase in [0.0, FRAC_PI_2, PI] {
                out.push(Start::Pair { i, j, phase });
            }
        }
    }
    out.extend((0..cfg.restarts).map(Start::Random));
    out
}

fn start_vector(start: &Start, seed: u64) -> CVec4 {
    match *start {
        Start::Bell(k) => *BellVector::basis(k).amplitudes(),
        Start::Pair { i, j, phase } => *BellVector::equal_superposition(i, j, phase).amplitudes(),
        Start::Random(idx) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64 + 1);
            loop {
                let v = random_complex_vector(&mut rng);
                if norm_sqr(&v) > 1e-12 {
                    return v;
                }
            }
        }
    }
}

/// Lexicographic order on canonical-phase amplitudes; among equal entropies
/// the largest vector wins, so ties resolve towards low Bell indices.
fn lexicographic(a: &BellVector, b: &BellVector) -> Ordering {
    let (x, y) = (a.amplitudes(), b.amplitudes());
    for k in 0..4 {
        let o = x[k].re.total_cmp(&y[k].re).then(x[k].im.total_cmp(&y[k].im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Full multistart search: capacity, enhancement verdict and every local
/// minimum reached.
pub fn analyze(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<Analysis> {
    cfg.validate()?;
    let ac = ch.a_coefficients();
    let bell_entropy = von_neumann_entropy(&Spectrum::new(ac.populations())?);

    let runs: Vec<LocalMinimum> = par::map(starts(cfg), |start| {
        let d = descend(&ac, &start_vector(&start, cfg.seed), cfg);
        let (gradient_norm, iterations, converged) = (d.gradient_norm, d.iterations, d.converged);
        let (psi, entropy) = snap(&ac, bell_entropy, d);
        let psi = psi.canonical_phase();
        LocalMinimum {
            start,
            psi,
            entropy,
            gradient_norm,
            iterations,
            converged,
            class: classify_extremal(&psi, CLASSIFY_TOL),
        }
    });

    let best = runs
        .iter()
        .min_by(|a, b| {
            a.entropy
                .total_cmp(&b.entropy)
                .then_with(|| lexicographic(&b.psi, &a.psi))
        })
        .copied()
        .expect("at least one start");

    let candidate_best = extremal_candidates(&ac)
        .iter()
        .filter(|c| classify_extremal(&c.psi, CLASSIFY_TOL) != ExtremalClass::SingleBell)
        .map(|c| c.entropy)
        .fold(f64::INFINITY, f64::min);
    let non_bell_entropy = runs
        .iter()
        .filter(|r| r.class != ExtremalClass::SingleBell)
        .map(|r| r.entropy)
        .fold(candidate_best, f64::min);
    let enhancement = Enhancement {
        enhanced: bell_entropy + ENHANCEMENT_MARGIN < non_bell_entropy,
        degenerate: (bell_entropy - non_bell_entropy).abs() <= ENHANCEMENT_MARGIN,
        bell_entropy,
        non_bell_entropy,
    };

    let min_entropy = best.entropy.clamp(0.0, 2.0);
    let capacity = CapacityResult {
        capacity_bits: 2.0 - min_entropy,
        min_entropy_bits: min_entropy,
        argmin: best.psi,
        extremal_class: best.class,
        converged: best.converged,
    };
    Ok(Analysis {
        channel: *ch,
        capacity,
        enhancement,
        runs,
    })
}

pub fn minimize_output_entropy(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<CapacityResult> {
    Ok(analyze(ch, cfg)?.capacity)
}

/// True when a Bell input strictly beats every other input found.
pub fn entanglement_enhanced(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<bool> {
    Ok(analyze(ch, cfg)?.enhancement.enhanced)
}

/// Bisects `μ` between `mu_lo` and `mu_hi` for the point where the
/// enhancement verdict flips, to within [`THRESHOLD_SCAN_TOL`].
pub fn threshold_scan(q: [f64; 4], mu_lo: f64, mu_hi: f64, cfg: &OptimizerConfig) -> Result<f64> {
    let verdict = |mu: f64| -> Result<bool> { entanglement_enhanced(&ChannelParams::new(q, mu)?, cfg) };
    let (mut lo, mut hi) = (mu_lo.min(mu_hi), mu_lo.max(mu_hi));
    let at_lo = verdict(lo)?;
    let at_hi = verdict(hi)?;
    if at_lo == at_hi {
        return Err(Error::NoCrossing {
            mu_lo: lo,
            mu_hi: hi,
            enhanced: at_lo,
        });
    }
    while hi - lo > THRESHOLD_SCAN_TOL {
        let mid = 0.5 * (lo + hi);
        if verdict(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Spectrum of the output for a given input, for reporting.
pub fn output_spectrum(ac: &ACoefficients, psi: &BellVector) -> Result<Spectrum> {
    crate::spectral::eigenvalues_hermitian4(&output_matrix(ac, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::sampling::{random_bell_vector, random_channel, random_tangent};
    use crate::spectral::binary_entropy;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            step_shrink: 1.0,
            ..OptimizerConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig {
            gradient_tolerance: 0.0,
            ..OptimizerConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_extremal(&BellVector::basis(0), 1e-3),
            ExtremalClass::SingleBell
        );
        let two = BellVector::normalized([
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::from_polar(FRAC_1_SQRT_2, PI / 3.0),
            ZERO,
            ZERO,
        ])
        .unwrap();
        assert_eq!(classify_extremal(&two, 1e-3), ExtremalClass::EqualTwoBell);
        let other = BellVector::from_real([0.8, 0.6, 0.0, 0.0]).unwrap();
        assert_eq!(classify_extremal(&other, 1e-3), ExtremalClass::Other);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = 1e-6;
        for _ in 0..100 {
            let ac = random_channel(&mut rng).a_coefficients();
            let a = *random_bell_vector(&mut rng).amplitudes();
            let v = random_tangent(&mut rng, &a);
            let (_, g) = entropy_gradient(&ac, &a);
            let plus = normalize(&std::array::from_fn(|k| a[k] + v[k] * h));
            let minus = normalize(&std::array::from_fn(|k| a[k] - v[k] * h));
            let fd = (output_entropy(&ac, &plus) - output_entropy(&ac, &minus)) / (2.0 * h);
            let analytic = real_dot(&g, &v);
            let scale = analytic.abs().max(1e-3);
            assert!((fd - analytic).abs() / scale < 1e-4, "fd {fd} vs analytic {analytic}");
        }
    }

    #[test]
    fn gradient_has_no_phase_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let ac = random_channel(&mut rng).a_coefficients();
        let a = *random_bell_vector(&mut rng).amplitudes();
        let (_, g) = entropy_gradient(&ac, &a);
        let phase_dir = a.map(|x| x * C64::new(0.0, 1.0));
        assert!(real_dot(&g, &phase_dir).abs() < 1e-12);
        assert!(real_dot(&g, &a).abs() < 1e-12);
    }

    #[test]
    fn identity_channel_has_capacity_two() {
        let r = minimize_output_entropy(&ChannelParams::identity(0.5).unwrap(), &quick()).unwrap();
        assert_abs_diff_eq!(r.capacity_bits, 2.0, epsilon = 1e-12);
        assert_eq!(r.capacity_bits, 2.0 - r.min_entropy_bits);
    }

    #[test]
    fn perfectly_correlated_channel_has_capacity_two() {
        let ch = ChannelParams::new([0.4, 0.3, 0.2, 0.1], 1.0).unwrap();
        let r = minimize_output_entropy(&ch, &quick()).unwrap();
        assert_abs_diff_eq!(r.capacity_bits, 2.0, epsilon = 1e-12);
        assert_eq!(r.extremal_class, ExtremalClass::SingleBell);
    }

    #[test]
    fn memoryless_channel_matches_single_qubit_value() {
        // largest Bloch contraction is q0 + q1 − q2 − q3 = 0.8
        let ch = ChannelParams::new([0.7, 0.2, 0.05, 0.05], 0.0).unwrap();
        let r = minimize_output_entropy(&ch, &quick()).unwrap();
        let want = 2.0 * (1.0 - binary_entropy(0.9));
        assert_abs_diff_eq!(r.capacity_bits, want, epsilon = 1e-7);
        assert_eq!(r.extremal_class, ExtremalClass::EqualTwoBell);
    }

    #[test]
    fn solvable_channel_above_threshold() {
        let ch = ChannelParams::solvable(0.3, 0.7).unwrap();
        let a = analyze(&ch, &quick()).unwrap();
        let bell = entropy_bits(&[0.778, 0.078, 0.072, 0.072]);
        assert_abs_diff_eq!(a.capacity.min_entropy_bits, bell, epsilon = 1e-10);
        assert_abs_diff_eq!(a.capacity.capacity_bits, 0.884_567_6, epsilon = 1e-6);
        assert_eq!(a.capacity.extremal_class, ExtremalClass::SingleBell);
        assert!(a.enhancement.enhanced);
    }

    #[test]
    fn enhancement_examples() {
        let cfg = quick();
        assert!(entanglement_enhanced(&ChannelParams::solvable(0.4, 0.8).unwrap(), &cfg).unwrap());
        assert!(!entanglement_enhanced(&ChannelParams::solvable(0.4, 0.4).unwrap(), &cfg).unwrap());
        let id = analyze(&ChannelParams::identity(0.5).unwrap(), &cfg).unwrap();
        assert!(!id.enhancement.enhanced);
        assert!(id.enhancement.degenerate);
    }

    #[test]
    fn threshold_scan_no_crossing() {
        let q = [0.4, 0.4, 0.1, 0.1];
        assert!(matches!(
            threshold_scan(q, 0.9, 0.9, &quick()),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn results_are_reproducible() {
        let ch = ChannelParams::new([0.35, 0.3, 0.2, 0.15], 0.25).unwrap();
        let a = analyze(&ch, &quick()).unwrap();
        let b = analyze(&ch, &quick()).unwrap();
        assert_eq!(a.capacity, b.capacity);
        assert_eq!(a.runs, b.runs);
    }
}
