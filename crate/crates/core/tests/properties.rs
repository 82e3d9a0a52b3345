mod common;

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use proptest::prelude::*;
use splitspin::rotation::rotated_bras;
use splitspin::{
    condition, detection_weights, oat_state, outcome_table, qfi_mixed, qfi_pure, rho_lm, split_state,
    splitting_distribution, wigner_d_matrix, wigner_function, Complex64, DetectionNoise, DickeState, HeraldRule,
    OatParams, RotationSpec, SphereGrid, SpinDensity,
};

fn direction() -> impl Strategy<Value = RotationSpec> {
    (-1.0f64..=1.0, 0.0..TAU).prop_map(|(z, phi)| RotationSpec::new(z.acos(), phi).unwrap())
}

fn state(max_n: usize) -> impl Strategy<Value = DickeState> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n + 1).prop_filter_map("zero vector", |v| {
            let amp = nalgebra::DVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| Complex64::new(a, b)));
            let mut s = DickeState::from_amplitudes(amp).ok()?;
            s.normalize().ok()?;
            Some(s)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measurement_is_complete(n in 1usize..=12, mu in 0.0..TAU, dir in direction()) {
        let split = split_state(&OatParams::new(n, mu).unwrap());
        let binom = splitting_distribution(n);
        let mut total = 0.0;
        for n_a in 0..=n {
            let block = outcome_table(&split, n_a, &dir).unwrap().total();
            prop_assert!((block - binom[n_a]).abs() < 1e-10);
            total += block;
        }
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn d_matrices_are_orthogonal(two_j in 0usize..=100, beta in -PI..PI) {
        let d = wigner_d_matrix(two_j, beta).unwrap();
        prop_assert!((&d * d.transpose() - DMatrix::identity(two_j + 1, two_j + 1)).amax() < 1e-10);
    }

    #[test]
    fn rotated_bases_are_orthonormal(n in 1usize..=20, dir in direction()) {
        let b = rotated_bras(n, &dir).unwrap();
        prop_assert!((&b * b.adjoint() - DMatrix::<Complex64>::identity(n + 1, n + 1)).camax() < 1e-10);
    }

    #[test]
    fn detection_weights_are_distributions(n_a in 0usize..60, frac in 0.0f64..=1.0, sigma in 0.0f64..5.0) {
        let l_star = (frac * n_a as f64).round() as usize;
        let w = detection_weights(l_star, n_a, &DetectionNoise::new(sigma).unwrap()).unwrap();
        prop_assert_eq!(w.len(), n_a + 1);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        let reach = l_star.min(n_a - l_star);
        for d in 1..=reach {
            prop_assert!((w[l_star - d] - w[l_star + d]).abs() < 1e-15);
        }
    }

    #[test]
    fn herald_rules_stay_in_range(n_a in 0usize..500, k in 0usize..10) {
        for rule in [HeraldRule::CeilHalf, HeraldRule::BelowTop(k), HeraldRule::Fixed(k)] {
            if let Some(l) = rule.outcome(n_a) {
                prop_assert!(l <= n_a);
            }
        }
    }

    #[test]
    fn twisted_qfi_is_bounded(n in 1usize..=20, mu in 1e-3..(TAU - 1e-3)) {
        let fq = qfi_pure(&oat_state(&OatParams::new(n, mu).unwrap())).fq;
        let nf = n as f64;
        prop_assert!(fq >= nf - 1e-6 && fq <= nf * nf + 1e-6);
    }

    #[test]
    fn pure_and_mixed_qfi_agree(psi in state(16)) {
        let pure = qfi_pure(&psi).fq;
        let mixed = qfi_mixed(&SpinDensity::from_pure(&psi).unwrap()).unwrap().fq;
        prop_assert!((pure - mixed).abs() < 1e-8);
        let n = psi.n() as f64;
        prop_assert!(pure >= -1e-12 && pure <= n * n + 1e-6);
    }

    #[test]
    fn twisting_is_four_pi_periodic(n in 1usize..=30, mu in 0.0..TAU) {
        let a = oat_state(&OatParams::new(n, mu).unwrap());
        let b = oat_state(&OatParams::new(n, mu + 2.0 * TAU).unwrap());
        prop_assert!((a.overlap(&b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heralded_states_are_normalized(n in 2usize..=12, mu in 0.0..PI, dir in direction(), pick in 0.0f64..1.0) {
        let split = split_state(&OatParams::new(n, mu).unwrap());
        let n_a = ((pick * n as f64) as usize).min(n);
        for l_a in 0..=n_a {
            match condition(&split, n_a, l_a, &dir) {
                Ok(o) => {
                    prop_assert!((0.0..=1.0).contains(&o.prob));
                    prop_assert!((o.state_b.unwrap().norm_sqr() - 1.0).abs() < 1e-12);
                }
                Err(_) => prop_assert!(outcome_table(&split, n_a, &dir).unwrap().outcomes[l_a].prob < 1e-14),
            }
        }
    }

    #[test]
    fn wigner_fields_are_normalized_and_real(psi in state(12), other in state(12), w in 0.0f64..1.0) {
        let n = psi.n();
        let rho = if other.n() == n {
            psi.projector() * Complex64::from(w) + other.projector() * Complex64::from(1.0 - w)
        } else {
            psi.projector()
        };
        let rho = SpinDensity::new(rho).unwrap();
        let field = wigner_function(&rho, &SphereGrid::for_spin(n)).unwrap();
        prop_assert!((field.normalization() - 1.0).abs() < 1e-10);
        prop_assert!(field.max_imag < 1e-9);
        prop_assert!(field.negativity() > -1e-8);
    }

    #[test]
    fn multipoles_are_hermitian(psi in state(10), l_frac in 0.0f64..=1.0) {
        let rho = SpinDensity::from_pure(&psi).unwrap();
        let l = (l_frac * psi.n() as f64).round() as usize;
        for m in 0..=l as i64 {
            let plus = rho_lm(&rho, l, m).unwrap();
            let minus = rho_lm(&rho, l, -m).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((minus - plus.conj() * sign).norm() < 1e-10);
        }
    }
}
