//! Quadrature on the unit sphere and spherical harmonics.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::{Error, Result};

/// Gauss-Legendre nodes in `cos(theta)` times a uniform grid in `phi`.
///
/// Integrates `Y_lm Y_l'm'^*` exactly for `l + l' <= 2 n_theta - 1` and
/// `|m - m'| < n_phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    cos_theta: Vec<f64>,
    weights: Vec<f64>,
    n_phi: usize,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidParameter("sphere grid needs at least one node per axis".into()));
        }
        let (cos_theta, weights) = gauss_legendre(n_theta);
        Ok(Self {
            cos_theta,
            weights,
            n_phi,
        })
    }

    /// Default resolution for spin `two_j / 2`: the smallest power of two (at
    /// least 16) covering four times the band limit in polar nodes, and twice as
    /// many azimuthal nodes.
    ///
    /// The band limit alone integrates `W` exactly, but `|W|` has kinks at every
    /// sign change; polar node counts that are multiples of `2j + 1` line up
    /// with the fringe pattern and converge erratically, which an odd `2j + 1`
    /// never does for a power of two.
    pub fn for_spin(two_j: usize) -> Self {
        let n_theta = (4 * (two_j + 1)).next_power_of_two().max(16);
        Self::new(n_theta, 2 * n_theta).expect("non-empty grid")
    }

    /// Errors unless the grid resolves a Wigner function of spin `two_j / 2`.
    pub fn check_resolves(&self, two_j: usize) -> Result<()> {
        let (min_theta, min_phi) = (two_j + 1, 2 * two_j + 2);
        if self.n_theta() < min_theta || self.n_phi < min_phi {
            return Err(Error::GridUnderResolved {
                min_theta,
                min_phi,
                n_theta: self.n_theta(),
                n_phi: self.n_phi,
            });
        }
        Ok(())
    }

    pub fn n_theta(&self) -> usize {
        self.cos_theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.cos_theta[i].clamp(-1.0, 1.0).acos()
    }

    pub fn cos_theta(&self, i: usize) -> f64 {
        self.cos_theta[i]
    }

    pub fn phi(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_phi as f64
    }

    /// Solid-angle weight of node `(i, k)`.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i] * TAU / self.n_phi as f64
    }

    /// `sum_i sum_k weight(i) f(i, k)`.
    pub fn integrate(&self, mut f: impl FnMut(usize, usize) -> f64) -> f64 {
        (0..self.n_theta())
            .map(|i| self.weight(i) * (0..self.n_phi).map(|k| f(i, k)).sum::<f64>())
            .sum()
    }
}

/// Nodes (descending) and weights of `n`-point Gauss-Legendre quadrature on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for l in 2..=n {
        let lf = l as f64;
        let p2 = ((2.0 * lf - 1.0) * z * p1 - (lf - 1.0) * p0) / lf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// Orthonormal associated Legendre functions with the Condon-Shortley phase,
/// `Y_lm(theta, phi) = table[m][l - m] e^{i m phi}` for `0 <= m <= l <= l_max`.
pub(crate) fn normalized_legendre(l_max: usize, cos_t: f64, sin_t: f64) -> Vec<Vec<f64>> {
    let mut table = Vec::with_capacity(l_max + 1);
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=l_max {
        let mf = m as f64;
        if m > 0 {
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
        }
        let mut col = Vec::with_capacity(l_max - m + 1);
        col.push(pmm);
        if m < l_max {
            col.push((2.0 * mf + 3.0).sqrt() * cos_t * pmm);
        }
        for l in m + 2..=l_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            let i = l - m;
            col.push(a * (cos_t * col[i - 1] - b * col[i - 2]));
        }
        table.push(col);
    }
    table
}

/// `Y_lm(theta, phi)` for any `|m| <= l`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Complex64::new(0.0, 0.0);
    }
    let (s, c) = theta.sin_cos();
    let p = normalized_legendre(l, c, s)[am][l - am];
    let y = Complex64::from_polar(p, am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..=13 {
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
        let (x, w) = gauss_legendre(128);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn low_order_harmonics() {
        let (t, p) = (0.7, 1.9);
        let y10 = spherical_harmonic(1, 0, t, p);
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * t.cos()).abs() < 1e-15);
        let y11 = spherical_harmonic(1, 1, t, p);
        let e = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * t.sin(), p);
        assert!((y11 - e).norm() < 1e-15);
        let y1m1 = spherical_harmonic(1, -1, t, p);
        assert!((y1m1 + y11.conj()).norm() < 1e-15);
        let y20 = spherical_harmonic(2, 0, t, p);
        let e = (5.0 / (16.0 * PI)).sqrt() * (3.0 * t.cos().powi(2) - 1.0);
        assert!((y20.re - e).abs() < 1e-15);
    }

    #[test]
    fn harmonics_are_orthonormal_on_grid() {
        let g = SphereGrid::new(12, 24).unwrap();
        let pairs = [((3, 2), (3, 2)), ((5, -1), (5, -1)), ((4, 1), (2, 1)), ((6, 0), (6, 3))];
        for ((l1, m1), (l2, m2)) in pairs {
            let re = g.integrate(|i, k| {
                (spherical_harmonic(l1, m1, g.theta(i), g.phi(k)) * spherical_harmonic(l2, m2, g.theta(i), g.phi(k)).conj()).re
            });
            let expected = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
            assert!((re - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn default_grid_sizes() {
        let g = SphereGrid::for_spin(100);
        assert_eq!((g.n_theta(), g.n_phi()), (512, 1024));
        assert_eq!(SphereGrid::for_spin(0).n_theta(), 16);
        assert!(g.check_resolves(100).is_ok());
        assert!(g.check_resolves(600).is_err());
        for two_j in [0, 1, 5, 33] {
            SphereGrid::for_spin(two_j).check_resolves(two_j).unwrap();
        }
        assert!(SphereGrid::new(0, 3).is_err());
    }
}
