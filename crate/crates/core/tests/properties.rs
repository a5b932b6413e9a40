use pauli_memory::bell::{output_matrix, BellVector};
use pauli_memory::channel::ChannelParams;
use pauli_memory::conditions::{extremal_candidates, sufficient_condition};
use pauli_memory::linalg::C64;
use pauli_memory::optimizer::{minimize_output_entropy, OptimizerConfig};
use pauli_memory::perturbation::{bell_first_order_shifts, product_first_order_shifts};
use pauli_memory::spectral::{eigenvalues_hermitian4, majorizes, t_transform, von_neumann_entropy, Spectrum};
use proptest::prelude::*;

fn simplex() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0f64..1.0).prop_filter_map("nonzero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.map(|x| x / s))
    })
}

fn channel() -> impl Strategy<Value = ChannelParams> {
    (simplex(), 0.0f64..=1.0).prop_map(|(q, mu)| ChannelParams::new(q, mu).unwrap())
}

fn input() -> impl Strategy<Value = BellVector> {
    prop::array::uniform4((-1.0f64..1.0, -1.0f64..1.0)).prop_filter_map("nonzero", |v| {
        BellVector::normalized(v.map(|(re, im)| C64::new(re, im))).ok()
    })
}

proptest! {
    #[test]
    fn joint_distribution_is_a_distribution(ch in channel()) {
        let jd = ch.joint_distribution();
        prop_assert!((jd.total() - 1.0).abs() < 1e-12);
        let rows = jd.row_sums();
        for (r, q) in rows.iter().zip(ch.q()) {
            prop_assert!((r - q).abs() < 1e-12);
        }
    }

    #[test]
    fn output_is_a_density_matrix(ch in channel(), psi in input()) {
        let b = output_matrix(&ch.a_coefficients(), &psi);
        prop_assert!(b.matrix().hermitian_defect() < 1e-14);
        prop_assert!((b.matrix().trace().re - 1.0).abs() < 1e-12);
        let s = eigenvalues_hermitian4(&b).unwrap();
        prop_assert!(s.get(3) > -1e-12);
    }

    #[test]
    fn bell_inputs_share_one_spectrum(ch in channel(), k in 0usize..4) {
        let ac = ch.a_coefficients();
        let s = eigenvalues_hermitian4(&output_matrix(&ac, &BellVector::basis(k))).unwrap();
        let pops = Spectrum::new(ac.populations()).unwrap();
        prop_assert!(s.max_abs_diff(&pops) < 1e-12);
    }

    #[test]
    fn regularization_preserves_candidate_entropies(ch in channel()) {
        let best = |c: &ChannelParams| extremal_candidates(&c.a_coefficients())[0].entropy;
        let (reg, _) = ch.regularize();
        prop_assert!(reg.is_regularized());
        prop_assert!((best(&ch) - best(&reg)).abs() < 1e-10);
    }

    #[test]
    fn first_order_shifts_are_traceless(ch in channel(), psi in input()) {
        let ac = ch.regularize().0.a_coefficients();
        let b = bell_first_order_shifts(&ac, &psi);
        prop_assert!(b.shifts.iter().sum::<f64>().abs() < 1e-12);
        prop_assert!(b.sign_chain_holds());
        let p = product_first_order_shifts(&ac, &psi);
        prop_assert!(p.shifts.iter().sum::<f64>().abs() < 1e-12);
        prop_assert!(p.sign_chain_holds());
        prop_assert!(p.discriminant.unwrap() >= -1e-15);
    }

    #[test]
    fn t_transform_is_majorized(v in simplex(), i in 0usize..4, d in 1usize..4, t in 0.0f64..=1.0) {
        let s = Spectrum::new(v).unwrap();
        let y = t_transform(&s, i, (i + d) % 4, t).unwrap();
        prop_assert!(majorizes(&s, &y));
        prop_assert!(von_neumann_entropy(&y) >= von_neumann_entropy(&s) - 1e-12);
    }

    #[test]
    fn sufficient_ratio_matches_coefficient_form(ch in channel()) {
        let r = sufficient_condition(&ch);
        let margin = (ch.mu() - r.report.threshold_mu).abs();
        prop_assume!(margin > 1e-9 && !r.degenerate && r.report.threshold_mu > 0.0);
        prop_assert_eq!(r.satisfied, r.a_form_satisfied);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn capacity_is_bounded_and_beats_candidates(ch in channel()) {
        let cfg = OptimizerConfig { restarts: 4, ..OptimizerConfig::default() };
        let r = minimize_output_entropy(&ch, &cfg).unwrap();
        prop_assert!((0.0..=2.0).contains(&r.capacity_bits));
        prop_assert_eq!(r.capacity_bits, 2.0 - r.min_entropy_bits);
        let best_candidate = extremal_candidates(&ch.a_coefficients())[0].entropy;
        prop_assert!(r.min_entropy_bits <= best_candidate + 1e-12);
    }
}
