//! Spin Wigner functions on the sphere and their negativity.
//!
//! A state of spin `j = n/2` is expanded in the multipole operators
//! `T_lm = sum_{m1} (-1)^{j - m2} <j m1; j -m2 | l m> |j m1><j m2|`
//! (`m2 = m1 - m`, `0 <= l <= 2j`), and
//!
//! `W(theta, phi) = sqrt(4 pi / (2j + 1)) sum_lm rho_lm Y_lm(theta, phi)`,
//! `rho_lm = Tr(T_lm^dagger rho)`.
//!
//! The prefactor makes `(2j + 1)/(4 pi) * integral W dOmega = 1`, so the
//! maximally mixed state has the constant `W = 1/(2j + 1)`.

mod coupling;
mod sphere;

pub use coupling::{clebsch_gordan, three_j, three_j_family, ThreeJFamily};
pub use sphere::{spherical_harmonic, SphereGrid};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::metrology::SpinDensity;
use crate::{Error, Result};
use sphere::normalized_legendre;

/// Multipole coefficients `rho_lm` of a spin state.
#[derive(Clone, Debug)]
pub struct MultipoleExpansion {
    two_j: usize,
    /// `coeffs[l][m + l]`.
    coeffs: Vec<Vec<Complex64>>,
}

impl MultipoleExpansion {
    pub fn new(rho: &SpinDensity) -> Self {
        let n = rho.n();
        let r = rho.rho();
        let mut coeffs: Vec<Vec<Complex64>> = (0..=n).map(|l| vec![Complex64::new(0.0, 0.0); 2 * l + 1]).collect();
        let ni = n as i64;
        for m in -ni..=ni {
            for k1 in 0..=ni {
                let k2 = k1 - m;
                if !(0..=ni).contains(&k2) {
                    continue;
                }
                let value = r[(k1 as usize, k2 as usize)];
                if value == Complex64::new(0.0, 0.0) {
                    continue;
                }
                // <j m1; j -m2 | l m> = (-1)^m sqrt(2l+1) (j j l; m1 -m2 -m), doubled m1 = 2 k1 - n
                let fam = three_j_family(ni, ni, 2 * k1 - ni, ni - 2 * k2);
                let sign = if (ni - k2 + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                for (i, w) in fam.values.iter().enumerate() {
                    let l = (fam.two_j_min / 2) as usize + i;
                    let c = sign * (2.0 * l as f64 + 1.0).sqrt() * w;
                    coeffs[l][(m + l as i64) as usize] += value * c;
                }
            }
        }
        Self { two_j: n, coeffs }
    }

    pub fn two_j(&self) -> usize {
        self.two_j
    }

    /// `rho_lm`; zero outside `0 <= l <= 2j`, `|m| <= l`.
    pub fn coefficient(&self, l: usize, m: i64) -> Complex64 {
        match self.coeffs.get(l) {
            Some(row) if m.unsigned_abs() as usize <= l => row[(m + l as i64) as usize],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn prefactor(&self) -> f64 {
        (4.0 * PI / (self.two_j as f64 + 1.0)).sqrt()
    }

    /// `F_m(theta)` for `m = -2j..=2j`, so that `W = sum_m F_m e^{i m phi}`.
    fn azimuthal_modes(&self, theta: f64) -> Vec<Complex64> {
        let n = self.two_j;
        let (s, c) = theta.sin_cos();
        let p = normalized_legendre(n, c, s);
        let pre = self.prefactor();
        (-(n as i64)..=n as i64)
            .map(|m| {
                let am = m.unsigned_abs() as usize;
                let parity = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
                let sum: Complex64 = (am..=n).map(|l| self.coeffs[l][(m + l as i64) as usize] * p[am][l - am]).sum();
                sum * (pre * parity)
            })
            .collect()
    }

    /// `W(theta, phi)`, including any imaginary part left by round-off.
    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        let modes = self.azimuthal_modes(theta);
        let n = self.two_j as i64;
        modes
            .iter()
            .zip(-n..=n)
            .map(|(f, m)| f * Complex64::from_polar(1.0, m as f64 * phi))
            .sum()
    }
}

/// The single multipole coefficient `rho_lm = Tr(T_lm^dagger rho)`.
pub fn rho_lm(rho: &SpinDensity, l: usize, m: i64) -> Result<Complex64> {
    let n = rho.n();
    if l > n {
        return Err(Error::OutOfRange {
            what: "multipole order l",
            value: l as i64,
            max: n as i64,
        });
    }
    if m.unsigned_abs() as usize > l {
        return Err(Error::OutOfRange {
            what: "|m|",
            value: m.abs(),
            max: l as i64,
        });
    }
    let ni = n as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k1 in 0..=ni {
        let k2 = k1 - m;
        if !(0..=ni).contains(&k2) {
            continue;
        }
        let fam = three_j_family(ni, ni, 2 * k1 - ni, ni - 2 * k2);
        let sign = if (ni - k2 + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let c = sign * (2.0 * l as f64 + 1.0).sqrt() * fam.get(2 * l as i64);
        acc += rho.rho()[(k1 as usize, k2 as usize)] * c;
    }
    Ok(acc)
}

/// Wigner function sampled on a [`SphereGrid`].
#[derive(Clone, Debug)]
pub struct WignerField {
    pub two_j: usize,
    pub grid: SphereGrid,
    /// Real part, `values[(i, k)]` at `(theta_i, phi_k)`.
    pub values: DMatrix<f64>,
    /// Largest `|Im W|` encountered; zero up to round-off for Hermitian input.
    pub max_imag: f64,
}

impl WignerField {
    /// `(2j + 1)/(4 pi) * integral W dOmega`, equal to the trace of the state.
    pub fn normalization(&self) -> f64 {
        let scale = (self.two_j as f64 + 1.0) / (4.0 * PI);
        scale * self.grid.integrate(|i, k| self.values[(i, k)])
    }

    /// `(1/2) ((2j + 1)/(4 pi) * integral |W| dOmega - 1)`.
    ///
    /// Evaluated as `(1/2)(norm - 1) + (2j + 1)/(4 pi) * integral max(-W, 0)`.
    /// Along each meridian the negative part is integrated over local polynomial
    /// interpolants of the samples (eight nearest nodes), with sign changes located inside each
    /// interval, so the kinks of `|W|` do not spoil the convergence.
    pub fn negativity(&self) -> f64 {
        let scale = (self.two_j as f64 + 1.0) / (4.0 * PI);
        let theta: Vec<f64> = (0..self.grid.n_theta()).map(|i| self.grid.theta(i)).collect();
        let meridian = MeridianInterpolant::new(&theta);
        let rule = sphere::gauss_legendre(8);
        let dphi = std::f64::consts::TAU / self.grid.n_phi() as f64;
        let negative: f64 = (0..self.grid.n_phi())
            .into_par_iter()
            .map(|k| {
                let column: Vec<f64> = self.values.column(k).iter().copied().collect();
                meridian.negative_part(&column, &rule)
            })
            .collect::<Vec<_>>()
            .iter()
            .sum::<f64>()
            * dphi;
        0.5 * (self.normalization() - 1.0) + scale * negative
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }
}

const STENCIL: usize = 8;

/// Barycentric interpolation on the `STENCIL` polar nodes nearest each interval
/// `[theta_{s-1}, theta_s]` (with `theta_{-1} = 0`, `theta_n = pi`).
struct MeridianInterpolant {
    edges: Vec<f64>,
    starts: Vec<usize>,
    weights: Vec<Vec<f64>>,
    nodes: Vec<f64>,
    width: usize,
}

impl MeridianInterpolant {
    fn new(theta: &[f64]) -> Self {
        let n = theta.len();
        let width = n.min(STENCIL);
        let mut edges = Vec::with_capacity(n + 2);
        edges.push(0.0);
        edges.extend_from_slice(theta);
        edges.push(PI);
        let starts: Vec<usize> = (0..=n).map(|seg| seg.saturating_sub(width / 2).min(n - width)).collect();
        let weights = (0..=n - width)
            .map(|st| {
                let xs = &theta[st..st + width];
                (0..width)
                    .map(|i| 1.0 / (0..width).filter(|&j| j != i).map(|j| xs[i] - xs[j]).product::<f64>())
                    .collect()
            })
            .collect();
        Self {
            edges,
            starts,
            weights,
            nodes: theta.to_vec(),
            width,
        }
    }

    fn eval(&self, start: usize, values: &[f64], t: f64) -> f64 {
        let xs = &self.nodes[start..start + self.width];
        let ws = &self.weights[start];
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..self.width {
            let d = t - xs[i];
            if d == 0.0 {
                return values[i];
            }
            let c = ws[i] / d;
            num += c * values[i];
            den += c;
        }
        num / den
    }

    /// `integral_0^pi max(-w(theta), 0) sin(theta) d theta` for samples `w` at the nodes.
    fn negative_part(&self, w: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> f64 {
        const PIECES: usize = 4;
        let mut total = 0.0;
        for (seg, &start) in self.starts.iter().enumerate() {
            let values = &w[start..start + self.width];
            if values.iter().all(|&v| v > 0.0) {
                continue;
            }
            let (a, b) = (self.edges[seg], self.edges[seg + 1]);
            let p = |t: f64| self.eval(start, values, t);
            let weighted = |t: f64| -p(t) * t.sin();
            let (pa, pb) = (p(a), p(b));
            if pa < 0.0 && pb < 0.0 && values.iter().all(|&v| v < 0.0) {
                total += gauss(rule, weighted, a, b);
                continue;
            }
            let (mut lo, mut lo_v) = (a, pa);
            for s in 1..=PIECES {
                let hi = if s == PIECES { b } else { a + (b - a) * s as f64 / PIECES as f64 };
                let hi_v = if s == PIECES { pb } else { p(hi) };
                let span = match (lo_v < 0.0, hi_v < 0.0) {
                    (true, true) => Some((lo, hi)),
                    (true, false) => Some((lo, bisect_root(p, lo, hi))),
                    (false, true) => Some((bisect_root(p, lo, hi), hi)),
                    (false, false) => None,
                };
                if let Some((x0, x1)) = span {
                    total += gauss(rule, weighted, x0, x1);
                }
                lo = hi;
                lo_v = hi_v;
            }
        }
        total
    }
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_negative = f(lo) < 0.0;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn gauss(rule: &(Vec<f64>, Vec<f64>), f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
    rule.0.iter().zip(&rule.1).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Samples the Wigner function of `rho` on `grid`, which must resolve its band limit.
///
/// Each polar row is a trigonometric polynomial in `phi`, summed with one FFT.
pub fn wigner_function(rho: &SpinDensity, grid: &SphereGrid) -> Result<WignerField> {
    let n = rho.n();
    grid.check_resolves(n)?;
    let expansion = MultipoleExpansion::new(rho);
    let n_phi = grid.n_phi();
    let fft = FftPlanner::new().plan_fft_inverse(n_phi);
    let rows: Vec<(Vec<f64>, f64)> = (0..grid.n_theta())
        .into_par_iter()
        .map(|i| {
            let modes = expansion.azimuthal_modes(grid.theta(i));
            let mut buf = vec![Complex64::new(0.0, 0.0); n_phi];
            for (f, m) in modes.iter().zip(-(n as i64)..) {
                buf[m.rem_euclid(n_phi as i64) as usize] += f;
            }
            fft.process(&mut buf);
            let max_imag = buf.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
            (buf.iter().map(|w| w.re).collect(), max_imag)
        })
        .collect();
    let max_imag = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let values = DMatrix::from_fn(grid.n_theta(), n_phi, |i, k| rows[i].0[k]);
    Ok(WignerField {
        two_j: n,
        grid: grid.clone(),
        values,
        max_imag,
    })
}

/// Wigner negativity of `rho` evaluated on `grid`.
pub fn wigner_negativity(rho: &SpinDensity, grid: &SphereGrid) -> Result<f64> {
    Ok(wigner_function(rho, grid)?.negativity())
}
