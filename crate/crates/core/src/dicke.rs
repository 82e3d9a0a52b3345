//! Dicke-basis states, collective spin operators and binomial bookkeeping.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `ln C(n, k)`, or `-inf` when `k` lies outside `[0, n]`.
///
/// Evaluated as `sum_i ln((n - k + i) / i)` over the shorter side, which keeps
/// full relative precision without ever forming a factorial.
pub fn log_binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return f64::NEG_INFINITY;
    }
    let k = (k as u64).min(n - k as u64);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// `ln 2`, reused for the `2^{-n}` prefactors of binomial amplitudes.
pub(crate) const LN_2: f64 = std::f64::consts::LN_2;

/// `sqrt(C(n, k) / 2^n)`, the amplitude of the `+x` coherent state on `|k>`.
pub(crate) fn coherent_weight(n: usize, k: usize) -> f64 {
    (0.5 * (log_binomial(n as u64, k as i64) - n as f64 * LN_2)).exp()
}

/// A pure symmetric state of `n` spin-1/2 particles in the Dicke basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    n: usize,
    amp: DVector<Complex64>,
}

impl DickeState {
    /// Wraps an amplitude vector; its length fixes `n = len - 1`.
    pub fn from_amplitudes(amp: DVector<Complex64>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if amp.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("amplitude"));
        }
        Ok(Self {
            n: amp.len() - 1,
            amp,
        })
    }

    /// The Dicke state `|k>` on `n` particles.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::OutOfRange {
                what: "excitation",
                value: k as i64,
                max: n as i64,
            });
        }
        let mut amp = DVector::zeros(n + 1);
        amp[k] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amp })
    }

    /// The spin coherent state polarized along `+x`.
    pub fn coherent_x(n: usize) -> Self {
        let amp = DVector::from_fn(n + 1, |k, _| Complex64::new(coherent_weight(n, k), 0.0));
        Self { n, amp }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amp(&self) -> &DVector<Complex64> {
        &self.amp
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Rescales to unit norm and returns the squared norm it had before.
    pub fn normalize(&mut self) -> Result<f64> {
        let p = self.norm_sqr();
        if p <= 0.0 || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("cannot normalize a state of squared norm {p}")));
        }
        self.amp.unscale_mut(p.sqrt());
        Ok(p)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DickeState) -> Result<Complex64> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                got: other.n + 1,
            });
        }
        Ok(self.amp.dotc(&other.amp))
    }

    /// `|<self|other>|`, the phase-insensitive overlap.
    pub fn overlap(&self, other: &DickeState) -> Result<f64> {
        self.inner(other).map(|z| z.norm())
    }

    /// `<self| op |self>`.
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Complex64 {
        self.amp.dotc(&(op * &self.amp))
    }

    /// `|self><self|`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        &self.amp * self.amp.adjoint()
    }

    /// Serializable form; `mu` records the twisting strength the state came from.
    pub fn to_file(&self, mu: f64) -> StateFile {
        StateFile {
            n: self.n,
            mu,
            amp: self.amp.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// JSON layout of a stored [`DickeState`]: `{"n": .., "mu": .., "amp": [[re, im], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub mu: f64,
    pub amp: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn to_state(&self) -> Result<DickeState> {
        if self.amp.len() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                got: self.amp.len(),
            });
        }
        let amp = DVector::from_iterator(self.amp.len(), self.amp.iter().map(|&[re, im]| Complex64::new(re, im)));
        DickeState::from_amplitudes(amp)
    }

    pub fn read_from(reader: impl Read) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        serde_json::to_writer(&mut writer, self)?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// The collective spin operators `S_x, S_y, S_z` for `n` particles, `j = n/2`.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub n: usize,
    pub sx: DMatrix<Complex64>,
    pub sy: DMatrix<Complex64>,
    pub sz: DMatrix<Complex64>,
}

impl SpinOperators {
    /// `[S_x, S_y, S_z]`.
    pub fn components(&self) -> [&DMatrix<Complex64>; 3] {
        [&self.sx, &self.sy, &self.sz]
    }

    /// `v_x S_x + v_y S_y + v_z S_z`.
    pub fn along(&self, v: [f64; 3]) -> DMatrix<Complex64> {
        &self.sx * Complex64::from(v[0]) + &self.sy * Complex64::from(v[1]) + &self.sz * Complex64::from(v[2])
    }
}

/// Ladder coefficient `<k+1| S_+ |k> = sqrt((k + 1)(n - k))`.
pub(crate) fn raising_coefficient(n: usize, k: usize) -> f64 {
    (((k + 1) * (n - k)) as f64).sqrt()
}

/// Builds `S_x, S_y, S_z` in the Dicke basis with `S_z |k> = (k - n/2)|k>`.
pub fn collective_spin_ops(n: usize) -> Result<SpinOperators> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let dim = n + 1;
    let half = n as f64 / 2.0;
    let mut sx = DMatrix::zeros(dim, dim);
    let mut sy = DMatrix::zeros(dim, dim);
    let sz = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(r as f64 - half, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    for k in 0..n {
        let c = raising_coefficient(n, k);
        // S_+ = |k+1><k| c, S_x = (S_+ + S_-)/2, S_y = (S_+ - S_-)/(2i)
        sx[(k + 1, k)] = Complex64::new(c / 2.0, 0.0);
        sx[(k, k + 1)] = Complex64::new(c / 2.0, 0.0);
        sy[(k + 1, k)] = Complex64::new(0.0, -c / 2.0);
        sy[(k, k + 1)] = Complex64::new(0.0, c / 2.0);
    }
    Ok(SpinOperators { n, sx, sy, sz })
}
