//! Quantum Fisher information for rotations generated by collective spins.
//!
//! The generator is restricted to `H = n . S` with `n` a unit vector. For a
//! pure state the QFI is `4 Var(H)`, maximized by the top eigenvector of the
//! covariance matrix `Gamma`; for a mixed state with spectrum `{q_k, |k>}` the
//! generalized matrix
//!
//! `[Gamma_Q]_ij = 2 sum_{q_k + q_l > eps} (q_k - q_l)^2 / (q_k + q_l) Re(<l|S_i|k><k|S_j|l>)`
//!
//! plays the same role. On a pure state `Gamma_Q = 4 Gamma`, so both paths
//! report `F_Q = 4 lambda_max(Gamma) = lambda_max(Gamma_Q)`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dicke::{collective_spin_ops, DickeState, SpinOperators};
use crate::{Error, Result};

/// Pairs of eigenvalues with `q_k + q_l` at or below this are dropped from `Gamma_Q`.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

const TRACE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct QfiResult {
    pub fq: f64,
    /// Optimal rotation axis, as coefficients of `(S_x, S_y, S_z)`.
    pub axis: Vector3<f64>,
    /// `Gamma` for pure input, `Gamma_Q` for mixed input.
    pub gamma: Matrix3<f64>,
}

impl QfiResult {
    /// Top eigenpair of a symmetric 3x3 matrix scaled by `scale`.
    fn from_matrix(gamma: Matrix3<f64>, scale: f64) -> Self {
        let eig = gamma.symmetric_eigen();
        let (imax, lmax) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three eigenvalues");
        let mut axis: Vector3<f64> = eig.eigenvectors.column(imax).into_owned();
        let lead = axis.iamax();
        if axis[lead] < 0.0 {
            axis = -axis;
        }
        Self {
            fq: (scale * lmax).max(0.0),
            axis,
            gamma,
        }
    }
}

/// Symmetrized covariance `Gamma_ij = <{S_i, S_j}>/2 - <S_i><S_j>` of a pure state.
pub fn covariance_matrix(state: &DickeState) -> Matrix3<f64> {
    let Ok(ops) = collective_spin_ops(state.n()) else {
        return Matrix3::zeros();
    };
    covariance_with(state, &ops)
}

fn covariance_with(state: &DickeState, ops: &SpinOperators) -> Matrix3<f64> {
    let psi = state.amp();
    let norm = state.norm_sqr();
    let v: Vec<DVector<Complex64>> = ops.components().iter().map(|s| *s * psi).collect();
    let mean: Vec<f64> = v.iter().map(|vi| psi.dotc(vi).re / norm).collect();
    Matrix3::from_fn(|i, j| v[i].dotc(&v[j]).re / norm - mean[i] * mean[j])
}

/// `F_Q = 4 lambda_max(Gamma)` and the corresponding axis.
pub fn qfi_pure(state: &DickeState) -> QfiResult {
    QfiResult::from_matrix(covariance_matrix(state), 4.0)
}

/// Eigen-decomposition of a density matrix, eigenvalues ascending as returned.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Mixed state of a fixed-`n` ensemble in the Dicke basis.
#[derive(Clone, Debug)]
pub struct SpinDensity {
    n: usize,
    rho: DMatrix<Complex64>,
    spectrum: OnceLock<Spectrum>,
}

impl SpinDensity {
    /// Validates unit trace and Hermiticity; the stored matrix is exactly Hermitian.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::InvalidDensity(format!("shape {}x{}", rho.nrows(), rho.ncols())));
        }
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix entry"));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let asym = (&rho - rho.adjoint()).camax();
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {asym:e})")));
        }
        let rho = (&rho + rho.adjoint()) * Complex64::from(0.5);
        Ok(Self {
            n: rho.nrows() - 1,
            rho,
            spectrum: OnceLock::new(),
        })
    }

    /// Divides by the trace first; for assembling mixtures from unnormalized terms.
    pub fn from_unnormalized(rho: DMatrix<Complex64>) -> Result<Self> {
        let tr = rho.trace().re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        Self::new(rho.unscale(tr))
    }

    pub fn from_pure(state: &DickeState) -> Result<Self> {
        Self::from_unnormalized(state.projector())
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = n + 1;
        Self::new(DMatrix::identity(d, d) * Complex64::from(1.0 / d as f64)).expect("valid density")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// Spectral decomposition, computed on first use and cached.
    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| {
            let eig = self.rho.clone().symmetric_eigen();
            Spectrum {
                values: eig.eigenvalues,
                vectors: eig.eigenvectors,
            }
        })
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `Gamma_Q` of a density matrix (unnormalized input scales it linearly).
pub fn gamma_q(rho: &SpinDensity) -> Result<Matrix3<f64>> {
    let spec = rho.spectrum();
    let min = spec.values.min();
    if min < -PSD_TOL {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
    }
    let Ok(ops) = collective_spin_ops(rho.n()) else {
        return Ok(Matrix3::zeros());
    };
    let q: Vec<f64> = spec.values.iter().map(|&x| x.max(0.0)).collect();
    let v = &spec.vectors;
    let a: Vec<DMatrix<Complex64>> = ops.components().iter().map(|s| v.adjoint() * *s * v).collect();
    let d = q.len();
    let mut gamma = Matrix3::zeros();
    for k in 0..d {
        for l in 0..d {
            let sum = q[k] + q[l];
            if sum <= SPECTRAL_CUTOFF {
                continue;
            }
            let w = (q[k] - q[l]).powi(2) / sum;
            if w == 0.0 {
                continue;
            }
            for i in 0..3 {
                for j in i..3 {
                    gamma[(i, j)] += 2.0 * w * (a[i][(l, k)] * a[j][(k, l)]).re;
                }
            }
        }
    }
    for i in 0..3 {
        for j in 0..i {
            gamma[(i, j)] = gamma[(j, i)];
        }
    }
    Ok(gamma)
}

/// `F_Q = lambda_max(Gamma_Q)`.
pub fn qfi_mixed(rho: &SpinDensity) -> Result<QfiResult> {
    Ok(QfiResult::from_matrix(gamma_q(rho)?, 1.0))
}

/// One block of a direct sum: weight and normalized state on `n` particles.
#[derive(Clone, Debug)]
pub struct Block {
    pub weight: f64,
    pub density: SpinDensity,
}

/// `(+)_b p_b rho_b` over blocks of differing particle number.
#[derive(Clone, Debug)]
pub struct BlockMixture {
    blocks: Vec<Block>,
}

impl BlockMixture {
    /// Weights must be non-negative and sum to one.
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyMixture);
        }
        if blocks.iter().any(|b| !(b.weight >= 0.0) || !b.weight.is_finite()) {
            return Err(Error::InvalidParameter("block weights must be finite and non-negative".into()));
        }
        let total: f64 = blocks.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("block weights sum to {total}, not 1")));
        }
        Ok(Self { blocks })
    }

    /// Rescales the weights to sum to one; errors if they are all zero.
    pub fn normalized(mut blocks: Vec<Block>) -> Result<Self> {
        blocks.retain(|b| b.weight > 0.0);
        let total: f64 = blocks.iter().map(|b| b.weight).sum();
        if blocks.is_empty() || !(total > 0.0) {
            return Err(Error::EmptyMixture);
        }
        for b in &mut blocks {
            b.weight /= total;
        }
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `sum_b p_b n_b`.
    pub fn mean_n(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.density.n() as f64).sum()
    }

    /// Assembles the block-diagonal density over the concatenated bases.
    pub fn assemble(&self) -> DMatrix<Complex64> {
        let dim: usize = self.blocks.iter().map(|b| b.density.n() + 1).sum();
        let mut out = DMatrix::zeros(dim, dim);
        let mut off = 0;
        for b in &self.blocks {
            let d = b.density.n() + 1;
            out.view_mut((off, off), (d, d))
                .copy_from(&(b.density.rho() * Complex64::from(b.weight)));
            off += d;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct BlockQfi {
    pub qfi: QfiResult,
    /// `sum_b p_b n_b`.
    pub mean_n: f64,
    /// `F_Q / mean_n`.
    pub density: f64,
}

/// QFI of a direct sum. Collective spins conserve particle number, so the
/// generalized covariance of the sum is `sum_b p_b Gamma_Q(rho_b)`.
pub fn qfi_block_mixture(mixture: &BlockMixture) -> Result<BlockQfi> {
    let parts = mixture
        .blocks
        .par_iter()
        .map(|b| gamma_q(&b.density).map(|g| g * b.weight))
        .collect::<Result<Vec<_>>>()?;
    let gamma = parts.into_iter().fold(Matrix3::zeros(), |acc, g| acc + g);
    let qfi = QfiResult::from_matrix(gamma, 1.0);
    let mean_n = mixture.mean_n();
    if !(mean_n > 0.0) {
        return Err(Error::EmptyMixture);
    }
    Ok(BlockQfi {
        density: qfi.fq / mean_n,
        qfi,
        mean_n,
    })
}

/// Quantum Cramer-Rao bound `1 / sqrt(v F_Q)` after `v` repetitions.
pub fn cramer_rao(fq: f64, v: u64) -> Result<f64> {
    if !(fq > 0.0) || !fq.is_finite() {
        return Err(Error::NoSensitivity(fq));
    }
    if v == 0 {
        return Err(Error::InvalidParameter("at least one measurement is required".into()));
    }
    Ok(1.0 / (v as f64 * fq).sqrt())
}
