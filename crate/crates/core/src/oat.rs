//! One-axis-twisted states, their squeezing frame and the split two-mode state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dicke::{log_binomial, DickeState, LN_2};
use crate::rotation::RotationSpec;
use crate::{Error, Result};

/// Particle number and dimensionless twisting strength `mu = 2 chi t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OatParams {
    pub n: usize,
    pub mu: f64,
}

impl OatParams {
    pub fn new(n: usize, mu: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        if !mu.is_finite() {
            return Err(Error::NonFinite("twisting strength"));
        }
        Ok(Self { n, mu })
    }
}

/// OAT phase `exp(-i (mu/2) (n/2 - k)^2)` for total excitation `k`.
pub(crate) fn twist_phase(n: usize, mu: f64, k: usize) -> Complex64 {
    let x = n as f64 / 2.0 - k as f64;
    Complex64::from_polar(1.0, -0.5 * mu * x * x)
}

/// The `+x` coherent state after twisting by `exp(-i (mu/2) S_z^2)`.
pub fn oat_state(p: &OatParams) -> DickeState {
    let n = p.n;
    let amp = DVector::from_fn(n + 1, |k, _| {
        twist_phase(n, p.mu, k) * (0.5 * (log_binomial(n as u64, k as i64) - n as f64 * LN_2)).exp()
    });
    let mut psi = DickeState::from_amplitudes(amp).expect("finite amplitudes");
    psi.normalize().expect("non-zero state");
    psi
}

/// Angle of the squeezing axis `z' = -sin(t) y + cos(t) z` in the y-z plane.
///
/// `t = atan2(4 sin(mu/2) cos^{n-2}(mu/2), 1 - cos^{n-2}(mu)) / 2`. The
/// two-argument form fixes the branch for `n = 2` (vanishing denominator) and
/// wherever the denominator changes sign; with `S_z = k - n/2` this branch is
/// the one that minimizes the variance along `z'`.
pub fn theta_star(p: &OatParams) -> Result<f64> {
    if p.n < 2 {
        return Err(Error::FrameUndefined(p.n));
    }
    let e = (p.n - 2) as i32;
    let half = p.mu / 2.0;
    let num = 4.0 * half.sin() * half.cos().powi(e);
    let den = 1.0 - p.mu.cos().powi(e);
    Ok(0.5 * num.atan2(den))
}

/// Squeezing frame of an OAT state together with an in-plane measurement angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementFrame {
    pub theta_star: f64,
    /// Angle from `z'` towards `y'`.
    pub theta_a: f64,
}

impl MeasurementFrame {
    pub fn new(p: &OatParams, theta_a: f64) -> Result<Self> {
        Ok(Self {
            theta_star: theta_star(p)?,
            theta_a,
        })
    }

    pub fn x_axis(&self) -> [f64; 3] {
        [1.0, 0.0, 0.0]
    }

    /// Anti-squeezing axis `y' = cos(t) y + sin(t) z`.
    pub fn y_prime(&self) -> [f64; 3] {
        let (s, c) = self.theta_star.sin_cos();
        [0.0, c, s]
    }

    /// Squeezing axis `z' = -sin(t) y + cos(t) z`.
    pub fn z_prime(&self) -> [f64; 3] {
        let (s, c) = self.theta_star.sin_cos();
        [0.0, -s, c]
    }

    /// `sin(theta_a) y' + cos(theta_a) z'`.
    pub fn measurement_axis(&self) -> [f64; 3] {
        let (sa, ca) = self.theta_a.sin_cos();
        let y = self.y_prime();
        let z = self.z_prime();
        [0.0, sa * y[1] + ca * z[1], sa * y[2] + ca * z[2]]
    }

    pub fn direction(&self) -> Result<RotationSpec> {
        RotationSpec::from_vector(self.measurement_axis())
    }
}

/// Measurement axis named relative to the squeezing frame of the OAT state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    X,
    YPrime,
    ZPrime,
    /// `sin(a) y' + cos(a) z'`.
    PlaneAngle(f64),
    /// A fixed laboratory direction, independent of the frame.
    Fixed(RotationSpec),
}

impl Axis {
    /// Resolves the axis using the squeezing frame of `p` (the unsplit state).
    pub fn direction(&self, p: &OatParams) -> Result<RotationSpec> {
        match *self {
            Axis::X => Ok(RotationSpec::plus_x()),
            Axis::YPrime => MeasurementFrame::new(p, std::f64::consts::FRAC_PI_2)?.direction(),
            Axis::ZPrime => MeasurementFrame::new(p, 0.0)?.direction(),
            Axis::PlaneAngle(a) => MeasurementFrame::new(p, a)?.direction(),
            Axis::Fixed(dir) => Ok(dir),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Axis::X => "x".into(),
            Axis::YPrime => "yprime".into(),
            Axis::ZPrime => "zprime".into(),
            Axis::PlaneAngle(a) => format!("plane:{a}"),
            Axis::Fixed(d) => format!("fixed:{},{}", d.polar, d.azimuth),
        }
    }
}

/// `p(N_A) = C(n, N_A) / 2^n`, the 50:50 partition statistics.
pub fn splitting_distribution(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|na| (log_binomial(n as u64, na as i64) - n as f64 * LN_2).exp())
        .collect()
}

/// The OAT state after a 50:50 beam-splitter-like spatial split.
///
/// Block `N_A` is an `(N_A + 1) x (N_B + 1)` matrix of amplitudes on
/// `|k_A>_{N_A} |k_B>_{N_B}` with `N_B = n - N_A`.
#[derive(Clone, Debug)]
pub struct SplitState {
    params: OatParams,
    blocks: Vec<DMatrix<Complex64>>,
}

impl SplitState {
    pub fn params(&self) -> &OatParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Amplitude block for a given `N_A`.
    pub fn block(&self, n_a: usize) -> Result<&DMatrix<Complex64>> {
        self.blocks.get(n_a).ok_or(Error::OutOfRange {
            what: "N_A",
            value: n_a as i64,
            max: self.params.n as i64,
        })
    }

    pub fn amplitude(&self, n_a: usize, k_a: usize, k_b: usize) -> Option<Complex64> {
        self.blocks.get(n_a).and_then(|b| b.get((k_a, k_b))).copied()
    }

    /// Squared norm of block `N_A`.
    pub fn block_weight(&self, n_a: usize) -> Result<f64> {
        Ok(self.block(n_a)?.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.iter()).map(|z| z.norm_sqr()).sum()
    }
}

/// Builds the split state; blocks are independent and may be built in any order.
pub fn split_state(p: &OatParams) -> SplitState {
    let n = p.n;
    let phases: Vec<Complex64> = (0..=n).map(|k| twist_phase(n, p.mu, k)).collect();
    let blocks = (0..=n)
        .map(|n_a| {
            let n_b = n - n_a;
            let base = log_binomial(n as u64, n_a as i64) - 2.0 * n as f64 * LN_2;
            DMatrix::from_fn(n_a + 1, n_b + 1, |ka, kb| {
                let lw = base + log_binomial(n_a as u64, ka as i64) + log_binomial(n_b as u64, kb as i64);
                phases[ka + kb] * (0.5 * lw).exp()
            })
        })
        .collect();
    SplitState { params: *p, blocks }
}
