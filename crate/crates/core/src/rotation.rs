//! Rotations of the symmetric subspace: Wigner d-matrices and rotated Dicke bases.
//!
//! Rotations follow the z-y-z Euler convention with the third angle set to zero,
//! `D(phi, theta) = exp(-i phi S_z) exp(-i theta S_y)`, which maps the `+z` axis
//! onto the direction with polar angle `theta` and azimuth `phi`. A measurement
//! axis only fixes its eigenbasis up to a phase per vector; probabilities and
//! conditional density matrices do not depend on that choice, but the global
//! phase of a conditional pure state does.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Unit vector of a measurement axis in polar form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    /// Polar angle in `[0, pi]`.
    #[serde(rename = "theta")]
    pub polar: f64,
    /// Azimuth in `[0, 2 pi)`.
    #[serde(rename = "phi")]
    pub azimuth: f64,
}

impl RotationSpec {
    /// Validates the polar angle and wraps the azimuth into `[0, 2 pi)`.
    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !polar.is_finite() || !azimuth.is_finite() {
            return Err(Error::NonFinite("rotation angle"));
        }
        if !(0.0..=PI).contains(&polar) {
            return Err(Error::InvalidParameter(format!("polar angle {polar} outside [0, pi]")));
        }
        Ok(Self {
            polar,
            azimuth: wrap_azimuth(azimuth),
        })
    }

    pub fn plus_z() -> Self {
        Self {
            polar: 0.0,
            azimuth: 0.0,
        }
    }

    pub fn plus_x() -> Self {
        Self {
            polar: PI / 2.0,
            azimuth: 0.0,
        }
    }

    /// Direction of a (not necessarily normalized) Cartesian vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !r.is_finite() || r == 0.0 {
            return Err(Error::InvalidParameter("axis vector must be finite and non-zero".into()));
        }
        let polar = (v[2] / r).clamp(-1.0, 1.0).acos();
        let azimuth = if v[0] == 0.0 && v[1] == 0.0 { 0.0 } else { v[1].atan2(v[0]) };
        Self::new(polar, azimuth)
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.polar.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }
}

fn wrap_azimuth(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wigner small-d matrix `d^j_{m',m}(beta) = <j m'| exp(-i beta J_y) |j m>`.
///
/// `two_j = 2j`. Row and column `i` correspond to `m = -j + i`, so the matrix is
/// also `exp(-i beta S_y)` in the Dicke basis of `n = 2j` particles.
///
/// Built by adding one spin-1/2 at a time: with `c = cos(beta/2)`,
/// `s = sin(beta/2)` and
/// `|n+1, k> = sqrt(k/(n+1)) |n, k-1>|up> + sqrt((n+1-k)/(n+1)) |n, k>|down>`,
/// each entry of the `n+1` matrix is a weighted combination of four entries of
/// the `n` matrix with coefficients bounded by one, so nothing overflows and
/// round-off grows only linearly in `j`.
pub fn wigner_d_matrix(two_j: usize, beta: f64) -> Result<DMatrix<f64>> {
    if !beta.is_finite() {
        return Err(Error::NonFinite("rotation angle"));
    }
    let (s, c) = (beta / 2.0).sin_cos();
    let mut d = DMatrix::from_element(1, 1, 1.0);
    for n in 0..two_j {
        let m = n + 1;
        let mf = m as f64;
        let mut next = DMatrix::zeros(m + 1, m + 1);
        for kp in 0..=m {
            for k in 0..=m {
                let mut acc = 0.0;
                if kp > 0 && k > 0 {
                    acc += ((kp * k) as f64).sqrt() * c * d[(kp - 1, k - 1)];
                }
                if kp > 0 && k < m {
                    acc -= ((kp * (m - k)) as f64).sqrt() * s * d[(kp - 1, k)];
                }
                if kp < m && k > 0 {
                    acc += (((m - kp) * k) as f64).sqrt() * s * d[(kp, k - 1)];
                }
                if kp < m && k < m {
                    acc += (((m - kp) * (m - k)) as f64).sqrt() * c * d[(kp, k)];
                }
                next[(kp, k)] = acc / mf;
            }
        }
        d = next;
    }
    Ok(d)
}

/// `D(phi, theta) = exp(-i phi S_z) exp(-i theta S_y)` for `n` particles.
///
/// Column `l` is the `n`-particle Dicke state with `l` excitations along `dir`.
pub fn rotation_matrix(n: usize, dir: &RotationSpec) -> Result<DMatrix<Complex64>> {
    let d = wigner_d_matrix(n, dir.polar)?;
    let half = n as f64 / 2.0;
    Ok(DMatrix::from_fn(n + 1, n + 1, |k, l| {
        Complex64::from_polar(1.0, -dir.azimuth * (k as f64 - half)) * d[(k, l)]
    }))
}

/// All bras `<l|_dir` as rows, expanded in the standard Dicke basis: the adjoint
/// of [`rotation_matrix`].
pub fn rotated_bras(n: usize, dir: &RotationSpec) -> Result<DMatrix<Complex64>> {
    Ok(rotation_matrix(n, dir)?.adjoint())
}

/// The single bra `<l|_dir` as a vector of its components `<l|_dir |k>`.
pub fn rotated_dicke_bra(n: usize, l: usize, dir: &RotationSpec) -> Result<nalgebra::DVector<Complex64>> {
    if l > n {
        return Err(Error::OutOfRange {
            what: "excitation",
            value: l as i64,
            max: n as i64,
        });
    }
    let d = wigner_d_matrix(n, dir.polar)?;
    let half = n as f64 / 2.0;
    Ok(nalgebra::DVector::from_fn(n + 1, |k, _| {
        Complex64::from_polar(1.0, dir.azimuth * (k as f64 - half)) * d[(k, l)]
    }))
}
