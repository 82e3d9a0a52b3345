mod common;

use std::f64::consts::{PI, TAU};

use common::{dense_gamma_q, direct_sum, direct_sum_ops, lambda_max};
use nalgebra::{DMatrix, Matrix3};
use splitspin::metrology::{gamma_q, Block};
use splitspin::rotation::rotation_matrix;
use splitspin::{
    collective_spin_ops, condition, covariance_matrix, cramer_rao, oat_state, qfi_block_mixture, qfi_mixed, qfi_pure,
    split_state, BlockMixture, Complex64, DickeState, OatParams, RotationSpec, SpinDensity,
};

#[test]
fn covariance_matches_dense_operators() {
    let psi = oat_state(&OatParams::new(20, 0.2).unwrap());
    let ops = collective_spin_ops(20).unwrap();
    let s = ops.components();
    let gamma = covariance_matrix(&psi);
    for i in 0..3 {
        for j in 0..3 {
            let sym = (s[i] * s[j] + s[j] * s[i]) * Complex64::from(0.5);
            let expected = psi.expectation(&sym).re - psi.expectation(s[i]).re * psi.expectation(s[j]).re;
            assert!((gamma[(i, j)] - expected).abs() < 1e-10);
        }
    }
    let coherent = covariance_matrix(&DickeState::coherent_x(10));
    let expected = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.0, 2.5, 2.5));
    assert!((coherent - expected).amax() < 1e-12);
}

#[test]
fn pure_and_mixed_paths_agree() {
    for mu in [0.05, 0.3, 1.0, 2.5, PI, 4.0] {
        let psi = oat_state(&OatParams::new(20, mu).unwrap());
        let pure = qfi_pure(&psi);
        let mixed = qfi_mixed(&SpinDensity::from_pure(&psi).unwrap()).unwrap();
        assert!((pure.fq - mixed.fq).abs() < 1e-8);
        assert!((pure.gamma * 4.0 - mixed.gamma).amax() < 1e-8);
    }
}

#[test]
fn mixed_qfi_matches_dense_formula() {
    let mut rng = common::rng(9);
    for n in [3usize, 6, 10] {
        let states: Vec<DickeState> = (0..3).map(|_| common::random_state(&mut rng, n)).collect();
        let rho = states
            .iter()
            .zip([0.5, 0.3, 0.2])
            .fold(DMatrix::zeros(n + 1, n + 1), |acc, (s, w)| acc + s.projector() * Complex64::from(w));
        let ops = collective_spin_ops(n).unwrap();
        let expected = dense_gamma_q(&rho, &[ops.sx.clone(), ops.sy.clone(), ops.sz.clone()]);
        let got = gamma_q(&SpinDensity::new(rho).unwrap()).unwrap();
        assert!((got - expected).amax() < 1e-10);
    }
}

#[test]
fn extremal_mixture_by_hand() {
    let rho = DMatrix::from_fn(5, 5, |i, j| Complex64::from(if i == j && (i == 0 || i == 4) { 0.5 } else { 0.0 }));
    let res = qfi_mixed(&SpinDensity::new(rho).unwrap()).unwrap();
    let expected = Matrix3::from_diagonal(&nalgebra::Vector3::new(4.0, 4.0, 0.0));
    assert!((res.gamma - expected).amax() < 1e-12, "{}", res.gamma);
    assert!((res.fq - 4.0).abs() < 1e-12);
}

#[test]
fn block_mixture_matches_assembled_direct_sum() {
    let p = OatParams::new(12, 0.6).unwrap();
    let split = split_state(&p);
    let dir = RotationSpec::new(1.2, 0.4).unwrap();
    let weights = [0.2, 0.5, 0.3];
    let blocks: Vec<Block> = [7usize, 6, 5]
        .iter()
        .zip(weights)
        .map(|(&n_a, w)| Block {
            weight: w,
            density: SpinDensity::from_pure(&condition(&split, n_a, n_a / 2, &dir).unwrap().state_b.unwrap()).unwrap(),
        })
        .collect();
    let mixture = BlockMixture::new(blocks.clone()).unwrap();
    let res = qfi_block_mixture(&mixture).unwrap();
    let parts: Vec<DMatrix<Complex64>> = blocks.iter().map(|b| b.density.rho() * Complex64::from(b.weight)).collect();
    let assembled = direct_sum(&parts);
    assert!((mixture.assemble() - &assembled).camax() < 1e-15);
    let gamma = dense_gamma_q(&assembled, &direct_sum_ops(&[5, 6, 7]));
    assert!((res.qfi.fq - lambda_max(&gamma)).abs() < 1e-9);
    let mean_n = 0.2 * 5.0 + 0.5 * 6.0 + 0.3 * 7.0;
    assert!((res.mean_n - mean_n).abs() < 1e-14);
    assert!((res.density - res.qfi.fq / mean_n).abs() < 1e-14);
}

#[test]
fn degenerate_block_mixtures() {
    let psi = oat_state(&OatParams::new(8, 0.4).unwrap());
    let rho = SpinDensity::from_pure(&psi).unwrap();
    let single = qfi_block_mixture(&BlockMixture::new(vec![Block { weight: 1.0, density: rho.clone() }]).unwrap()).unwrap();
    let direct = qfi_mixed(&rho).unwrap();
    assert!((single.qfi.fq - direct.fq).abs() < 1e-12);
    let halves = vec![Block { weight: 0.5, density: rho.clone() }, Block { weight: 0.5, density: rho }];
    let twice = qfi_block_mixture(&BlockMixture::new(halves).unwrap()).unwrap();
    assert!((twice.qfi.fq - direct.fq).abs() < 1e-12);
    assert!(BlockMixture::new(vec![]).is_err());
}

#[test]
fn qfi_is_rotation_invariant() {
    let mut rng = common::rng(17);
    for n in [4usize, 9, 16] {
        let psi = common::random_state(&mut rng, n);
        let before = qfi_pure(&psi);
        let dir = common::random_direction(&mut rng);
        let u = rotation_matrix(n, &dir).unwrap();
        let rotated = DickeState::from_amplitudes(&u * psi.amp()).unwrap();
        let after = qfi_pure(&rotated);
        assert!((before.fq - after.fq).abs() < 1e-8);
        let rho = SpinDensity::from_pure(&psi).unwrap();
        let mixed = SpinDensity::new(rho.rho() * Complex64::from(0.7) + SpinDensity::maximally_mixed(n).rho() * Complex64::from(0.3)).unwrap();
        let mixed_rot = SpinDensity::new(&u * mixed.rho() * u.adjoint()).unwrap();
        assert!((qfi_mixed(&mixed).unwrap().fq - qfi_mixed(&mixed_rot).unwrap().fq).abs() < 1e-8);
    }
}

#[test]
fn twisted_states_sit_between_the_limits() {
    for n in [2usize, 5, 12, 20] {
        for i in 1..20 {
            let mu = TAU * i as f64 / 20.0;
            let fq = qfi_pure(&oat_state(&OatParams::new(n, mu).unwrap())).fq;
            let nf = n as f64;
            assert!(fq >= nf - 1e-6 && fq <= nf * nf + 1e-6, "N={n} mu={mu}: {fq}");
        }
    }
}

#[test]
fn generalized_covariance_is_positive_semidefinite() {
    let mut rng = common::rng(4);
    for n in [2usize, 7, 13] {
        let a = common::random_state(&mut rng, n);
        let b = common::random_state(&mut rng, n);
        let rho = a.projector() * Complex64::from(0.6) + b.projector() * Complex64::from(0.4);
        let g = gamma_q(&SpinDensity::new(rho).unwrap()).unwrap();
        assert!(g.symmetric_eigen().eigenvalues.min() > -1e-10);
        assert!((g - g.transpose()).amax() < 1e-12);
    }
}

#[test]
fn cramer_rao_bound() {
    assert!((cramer_rao(100.0, 1).unwrap() - 0.1).abs() < 1e-15);
    assert!((cramer_rao(1e4, 1).unwrap() - 0.01).abs() < 1e-15);
    assert!((cramer_rao(25.0, 4).unwrap() - 0.1).abs() < 1e-15);
    assert!(cramer_rao(0.0, 3).is_err());
}
