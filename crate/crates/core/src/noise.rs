//! Realistic noise: binomial partition noise on `N_B` and Gaussian read-out
//! noise on the measured `l_A` (and optionally `N_A`).
//!
//! Read-out noise enters through the kernel `g(d) = exp(-d^2 / 2 sigma^2)`
//! between the observed and the true value. Its prefactor is irrelevant: every
//! mixture below is trace-normalized once, globally, so only relative weights
//! matter. Blocks with `N_B = 0` carry no probe and are dropped; the remaining
//! weights are renormalized.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::conditioning::{projected_block, ZERO_PROBABILITY};
use crate::dicke::DickeState;
use crate::metrology::{qfi_block_mixture, qfi_mixed, qfi_pure, Block, BlockMixture, SpinDensity};
use crate::oat::{splitting_distribution, Axis, SplitState};
use crate::rotation::{rotated_dicke_bra, RotationSpec};
use crate::{Error, Result};

/// Gaussian read-out error with standard deviation `sigma` (in counts).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionNoise {
    sigma: f64,
}

impl DetectionNoise {
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParameter(format!("noise sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn noiseless() -> Self {
        Self { sigma: 0.0 }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Unnormalized kernel `g(observed - true)`; a Kronecker delta at `sigma = 0`.
    pub fn kernel(&self, offset: f64) -> f64 {
        if self.sigma == 0.0 {
            if offset == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (-offset * offset / (2.0 * self.sigma * self.sigma)).exp()
        }
    }
}

/// Probabilities of the true value `l_A in [0, n_a]` given the observed `l_star`:
/// the Gaussian truncated to the physical range and renormalized.
pub fn detection_weights(l_star: usize, n_a: usize, noise: &DetectionNoise) -> Result<Vec<f64>> {
    if l_star > n_a {
        return Err(Error::OutOfRange {
            what: "observed l_A",
            value: l_star as i64,
            max: n_a as i64,
        });
    }
    let raw: Vec<f64> = (0..=n_a).map(|l| noise.kernel(l_star as f64 - l as f64)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Which outcome is post-selected for each ancilla size `N_A`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HeraldRule {
    /// `l_A = ceil(N_A / 2)`.
    #[default]
    CeilHalf,
    /// `l_A = N_A - k`.
    BelowTop(usize),
    /// The same `l_A` for every `N_A` (blocks with `N_A < l_A` cannot herald).
    Fixed(usize),
}


impl HeraldRule {
    /// Selected outcome, or `None` if the rule has no valid outcome at `n_a`.
    pub fn outcome(&self, n_a: usize) -> Option<usize> {
        match *self {
            HeraldRule::CeilHalf => Some(n_a.div_ceil(2)),
            HeraldRule::BelowTop(k) => n_a.checked_sub(k),
            HeraldRule::Fixed(l) => (l <= n_a).then_some(l),
        }
    }
}

/// Noise on the counted `N_A`: the observed value and its read-out error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumberReadout {
    pub n_a_star: usize,
    pub noise: DetectionNoise,
}

/// Heralded state of block `n_a` for outcome `l_a`, with its probability
/// conditioned on `N_A`; `None` when that probability is below the cutoff.
fn heralded_in_block(
    split: &SplitState,
    n_a: usize,
    l_a: usize,
    dir: &RotationSpec,
) -> Result<Option<(f64, DickeState)>> {
    let bra = rotated_dicke_bra(n_a, l_a, dir)?;
    let mut state = DickeState::from_amplitudes(split.block(n_a)?.transpose() * bra)?;
    let p_block = split.block_weight(n_a)?;
    let p_cond = state.norm_sqr() / p_block;
    if !(p_cond >= ZERO_PROBABILITY) {
        return Ok(None);
    }
    state.normalize()?;
    Ok(Some((p_cond, state)))
}

/// Heralded pure state per `N_A` (with `N_B >= 1`), in ascending `N_A` order.
fn heralded_blocks(split: &SplitState, rule: HeraldRule, dir: &RotationSpec) -> Result<Vec<(usize, DickeState)>> {
    let n = split.n();
    let found = (0..n)
        .into_par_iter()
        .map(|n_a| match rule.outcome(n_a) {
            Some(l) => heralded_in_block(split, n_a, l, dir).map(|o| o.map(|(_, s)| (n_a, s))),
            None => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    let found: Vec<_> = found.into_iter().flatten().collect();
    if found.is_empty() {
        return Err(Error::EmptyMixture);
    }
    Ok(found)
}

/// `<F_Q / N_B> = sum_{N_B} p(N_B) F_Q[rho_B] / N_B`, each block heralded by `rule`
/// and measured along `axis` (resolved in the frame of the unsplit state).
pub fn avg_qfi_number_fluct(split: &SplitState, rule: HeraldRule, axis: Axis) -> Result<f64> {
    let dir = axis.direction(split.params())?;
    let p = splitting_distribution(split.n());
    let blocks = heralded_blocks(split, rule, &dir)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (n_a, state) in &blocks {
        let n_b = split.n() - n_a;
        num += p[*n_a] * qfi_pure(state).fq / n_b as f64;
        den += p[*n_a];
    }
    Ok(num / den)
}

/// The direct sum `(+) p(N_B) rho_B` of heralded states, weights renormalized
/// over the blocks that can herald.
pub fn joint_block_mixture(split: &SplitState, rule: HeraldRule, axis: Axis) -> Result<BlockMixture> {
    let dir = axis.direction(split.params())?;
    let p = splitting_distribution(split.n());
    let blocks = heralded_blocks(split, rule, &dir)?
        .into_iter()
        .map(|(n_a, state)| {
            Ok(Block {
                weight: p[n_a],
                density: SpinDensity::from_pure(&state)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    BlockMixture::normalized(blocks)
}

/// `F_Q[(+) p(N_B) rho_B] / sum p(N_B) N_B`: one probe optimization for all `N_B`.
pub fn avg_qfi_joint_block(split: &SplitState, rule: HeraldRule, axis: Axis) -> Result<f64> {
    Ok(qfi_block_mixture(&joint_block_mixture(split, rule, axis)?)?.density)
}

/// `sum_l g(l_star - l) |v_l><v_l|` over the unnormalized heralded vectors of a
/// block, together with its trace `p(N_A) sum_l p_{N_A}(l) g(l_star - l)`.
fn detection_mixture(
    split: &SplitState,
    n_a: usize,
    l_star: usize,
    dir: &RotationSpec,
    noise: &DetectionNoise,
) -> Result<(DMatrix<Complex64>, f64)> {
    let rows = projected_block(split, n_a, dir)?;
    let d = rows.ncols();
    let mut rho = DMatrix::zeros(d, d);
    for (l, row) in rows.row_iter().enumerate() {
        let g = noise.kernel(l_star as f64 - l as f64);
        if g == 0.0 {
            continue;
        }
        let v = row.transpose();
        rho += &v * v.adjoint() * Complex64::from(g);
    }
    let tr = rho.trace().re;
    Ok((rho, tr))
}

/// `rho(l_star, sigma) = N sum_l p_{N_A}(l) g(l_star - l) rho_B(l)`.
pub fn noisy_conditional_state(
    split: &SplitState,
    n_a: usize,
    l_star: usize,
    dir: &RotationSpec,
    noise: &DetectionNoise,
) -> Result<SpinDensity> {
    if l_star > n_a {
        return Err(Error::OutOfRange {
            what: "observed l_A",
            value: l_star as i64,
            max: n_a as i64,
        });
    }
    let (rho, tr) = detection_mixture(split, n_a, l_star, dir, noise)?;
    let p_cond = tr / split.block_weight(n_a)?;
    if !(p_cond >= ZERO_PROBABILITY) {
        return Err(Error::ZeroProbability {
            n_a,
            l_a: l_star,
            prob: tr,
        });
    }
    SpinDensity::from_unnormalized(rho)
}

/// `F_Q[rho(l_star, sigma)] / N_B` at fixed `N_A`.
pub fn avg_qfi_detection(
    split: &SplitState,
    n_a: usize,
    l_star: usize,
    dir: &RotationSpec,
    noise: &DetectionNoise,
) -> Result<f64> {
    let n_b = split.n().checked_sub(n_a).filter(|&nb| nb > 0).ok_or_else(|| {
        Error::InvalidParameter(format!("no probe particles left for N_A = {n_a}"))
    })?;
    let rho = noisy_conditional_state(split, n_a, l_star, dir, noise)?;
    Ok(qfi_mixed(&rho)?.fq / n_b as f64)
}

/// Direct sum over `N_A` of the detection-noise mixtures, weighted by
/// `p(N_A) sum_l p_{N_A}(l) g(l*(N_A) - l)` and, with a number read-out, also by
/// `g_N(N_A* - N_A)`; one global normalization.
pub fn full_noise_mixture(
    split: &SplitState,
    rule: HeraldRule,
    axis: Axis,
    noise: &DetectionNoise,
    readout: Option<&NumberReadout>,
) -> Result<BlockMixture> {
    let dir = axis.direction(split.params())?;
    let n = split.n();
    let blocks = (0..n)
        .into_par_iter()
        .map(|n_a| {
            let Some(l_star) = rule.outcome(n_a) else {
                return Ok(None);
            };
            let g_n = readout.map_or(1.0, |r| r.noise.kernel(r.n_a_star as f64 - n_a as f64));
            if g_n == 0.0 {
                return Ok(None);
            }
            let (rho, tr) = detection_mixture(split, n_a, l_star, &dir, noise)?;
            if !(tr / split.block_weight(n_a)? >= ZERO_PROBABILITY) {
                return Ok(None);
            }
            Ok(Some(Block {
                weight: tr * g_n,
                density: SpinDensity::from_unnormalized(rho)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    BlockMixture::normalized(blocks.into_iter().flatten().collect())
}

/// `F_Q` of [`full_noise_mixture`] divided by the mean probe size under the
/// same weights.
pub fn avg_qfi_full(
    split: &SplitState,
    rule: HeraldRule,
    axis: Axis,
    noise: &DetectionNoise,
    readout: Option<&NumberReadout>,
) -> Result<f64> {
    Ok(qfi_block_mixture(&full_noise_mixture(split, rule, axis, noise, readout)?)?.density)
}
