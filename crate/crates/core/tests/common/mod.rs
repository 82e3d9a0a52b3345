#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use splitspin::{collective_spin_ops, Complex64, DickeState, RotationSpec, SplitState};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_direction(rng: &mut StdRng) -> RotationSpec {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = std::f64::consts::TAU * rng.random::<f64>();
    RotationSpec::new(z.acos(), phi).unwrap()
}

pub fn random_state(rng: &mut StdRng, n: usize) -> DickeState {
    let amp = DVector::from_fn(n + 1, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let mut s = DickeState::from_amplitudes(amp).unwrap();
    s.normalize().unwrap();
    s
}

pub fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn exact_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

/// Racah's closed form, evaluated in exact rational arithmetic. Arguments are doubled.
pub fn exact_cg(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if tm != tm1 + tm2 || tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tj {
        return 0.0;
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj + tm) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i64| x / 2;
    let f = |x: i64| factorial(x);
    let tri = BigRational::new(
        BigInt::from(tj + 1) * f(h(tj1 + tj2 - tj)) * f(h(tj1 - tj2 + tj)) * f(h(-tj1 + tj2 + tj)),
        f(h(tj1 + tj2 + tj) + 1),
    );
    let proj = BigRational::from_integer(
        f(h(tj1 + tm1)) * f(h(tj1 - tm1)) * f(h(tj2 + tm2)) * f(h(tj2 - tm2)) * f(h(tj + tm)) * f(h(tj - tm)),
    );
    let mut sum = BigRational::zero();
    for k in 0..=h(tj1 + tj2 + tj) {
        let args = [
            k,
            h(tj1 + tj2 - tj) - k,
            h(tj1 - tm1) - k,
            h(tj2 + tm2) - k,
            h(tj - tj2 + tm1) + k,
            h(tj - tj1 - tm2) + k,
        ];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let den = args.iter().fold(BigInt::one(), |acc, &a| acc * f(a));
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let sq = (tri * proj * &sum * &sum).to_f64().unwrap();
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    sign * sq.sqrt()
}

/// Heralded state of `B` by brute force: diagonalize the collective spin of `A`
/// along `dir`, take the eigenvector for outcome `l_a` and contract it with the
/// amplitude block. Returns the joint probability and the normalized state.
pub fn dense_conditional(split: &SplitState, n_a: usize, l_a: usize, dir: &RotationSpec) -> (f64, DVector<Complex64>) {
    let block = split.block(n_a).unwrap();
    let v = if n_a == 0 {
        DVector::from_element(1, Complex64::new(1.0, 0.0))
    } else {
        let sn = collective_spin_ops(n_a).unwrap().along(dir.unit_vector());
        let eig = sn.symmetric_eigen();
        let target = l_a as f64 - n_a as f64 / 2.0;
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .unwrap();
        eig.eigenvectors.column(idx).into_owned()
    };
    let projector: DMatrix<Complex64> = &v * v.adjoint();
    let projected = &projector * block;
    let prob: f64 = projected.iter().map(|z| z.norm_sqr()).sum();
    let remainder: DVector<Complex64> = block.transpose() * v.conjugate();
    let norm = remainder.norm();
    (prob, remainder / Complex64::from(norm))
}

pub fn overlap(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    a.dotc(b).norm()
}

/// `exp(-i t h)` for Hermitian `h`, by eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::from_polar(1.0, -t * x)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Product-state expansion of the spin coherent state along the unit vector `v`.
pub fn coherent_ket(n: usize, v: [f64; 3]) -> DVector<Complex64> {
    let theta = v[2].clamp(-1.0, 1.0).acos();
    let phi = v[1].atan2(v[0]);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    DVector::from_fn(n + 1, |k, _| {
        let b = exact_binomial(n as u64, k as u64).to_f64().unwrap().sqrt();
        Complex64::from_polar(b * c.powi(k as i32) * s.powi((n - k) as i32), -(k as f64) * phi)
    })
}

/// Generalized covariance `2 sum (q - q')^2/(q + q') <k'|A_i|k><k|A_j|k'>` of a
/// density matrix with respect to arbitrary Hermitian generators.
pub fn dense_gamma_q(rho: &DMatrix<Complex64>, ops: &[DMatrix<Complex64>; 3]) -> nalgebra::Matrix3<f64> {
    let eig = rho.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let q = &eig.eigenvalues;
    let local: Vec<DMatrix<Complex64>> = ops.iter().map(|a| v.adjoint() * a * v).collect();
    let d = q.len();
    nalgebra::Matrix3::from_fn(|i, j| {
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                let s = q[a] + q[b];
                if s <= 1e-12 {
                    continue;
                }
                let f = (q[a] - q[b]).powi(2) / s;
                acc += 2.0 * f * (local[i][(b, a)] * local[j][(a, b)]).re;
            }
        }
        acc
    })
}

/// Largest eigenvalue of a symmetric 3x3 matrix.
pub fn lambda_max(m: &nalgebra::Matrix3<f64>) -> f64 {
    m.symmetric_eigen().eigenvalues.max()
}

/// Collective spin operators acting on the direct sum of Dicke spaces of sizes `ns`.
pub fn direct_sum_ops(ns: &[usize]) -> [DMatrix<Complex64>; 3] {
    let dim: usize = ns.iter().map(|n| n + 1).sum();
    let mut out = [DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim)];
    let mut off = 0;
    for &n in ns {
        let ops = collective_spin_ops(n).unwrap();
        for (o, s) in out.iter_mut().zip(ops.components()) {
            o.view_mut((off, off), (n + 1, n + 1)).copy_from(s);
        }
        off += n + 1;
    }
    out
}

/// Block-diagonal matrix over the concatenated bases.
pub fn direct_sum(blocks: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let dim: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(dim, dim);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), b.shape()).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Unnormalized Gaussian `exp(-d^2 / (2 sigma^2))`, a Kronecker delta at `sigma = 0`.
pub fn gaussian_kernel(d: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        if d == 0.0 { 1.0 } else { 0.0 }
    } else {
        (-d * d / (2.0 * sigma * sigma)).exp()
    }
}

/// Truncated, renormalized Gaussian weights evaluated from their definition.
pub fn gaussian_weights(l_star: usize, n_a: usize, sigma: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..=n_a).map(|l| gaussian_kernel(l_star as f64 - l as f64, sigma)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}
