//! Wigner 3j symbols and Clebsch-Gordan coefficients.
//!
//! For fixed `j1, j2, m1, m2` the 3j symbols `(j1 j2 J; m1 m2 m3)` with
//! `m3 = -m1 - m2` satisfy a three-term recursion in `J`. Running it forward
//! from `J_min` and backward from `J_max`, each only through the region where
//! the wanted solution grows, and splicing the two where they overlap keeps
//! the result accurate to a few ulps for spins in the hundreds.

use crate::{Error, Result};

const RESCALE: f64 = 1e150;

/// Twice a half-integer, or an error if `x` is not one.
pub(crate) fn doubled(x: f64) -> Result<i64> {
    let t = 2.0 * x;
    if !t.is_finite() || (t - t.round()).abs() > 1e-9 || t.abs() > 1e9 {
        return Err(Error::NotHalfInteger(x));
    }
    Ok(t.round() as i64)
}

/// All 3j symbols `(j1 j2 J; m1 m2 -m1-m2)` over the allowed range of `J`.
#[derive(Clone, Debug)]
pub struct ThreeJFamily {
    /// Twice the smallest allowed `J`.
    pub two_j_min: i64,
    /// Values for `J = J_min, J_min + 1, ...`; empty if no `J` is allowed.
    pub values: Vec<f64>,
}

impl ThreeJFamily {
    pub fn get(&self, two_j: i64) -> f64 {
        let off = two_j - self.two_j_min;
        if off < 0 || off % 2 != 0 {
            return 0.0;
        }
        self.values.get((off / 2) as usize).copied().unwrap_or(0.0)
    }
}

/// Computes the family from doubled quantum numbers.
pub fn three_j_family(two_j1: i64, two_j2: i64, two_m1: i64, two_m2: i64) -> ThreeJFamily {
    let two_m3 = -two_m1 - two_m2;
    let empty = ThreeJFamily {
        two_j_min: 0,
        values: Vec::new(),
    };
    if two_j1 < 0
        || two_j2 < 0
        || two_m1.abs() > two_j1
        || two_m2.abs() > two_j2
        || (two_j1 - two_m1) % 2 != 0
        || (two_j2 - two_m2) % 2 != 0
    {
        return empty;
    }
    let two_min = (two_j1 - two_j2).abs().max(two_m3.abs());
    let two_max = two_j1 + two_j2;
    if two_min > two_max {
        return empty;
    }
    let len = ((two_max - two_min) / 2 + 1) as usize;

    let (j1, j2) = (two_j1 as f64 / 2.0, two_j2 as f64 / 2.0);
    let (m1, m2, m3) = (two_m1 as f64 / 2.0, two_m2 as f64 / 2.0, two_m3 as f64 / 2.0);
    let jmin = two_min as f64 / 2.0;
    let jmax = two_max as f64 / 2.0;
    let a = |j: f64| -> f64 {
        ((j * j - (j1 - j2).powi(2)) * ((j1 + j2 + 1.0).powi(2) - j * j) * (j * j - m3 * m3))
            .max(0.0)
            .sqrt()
    };
    let b = |j: f64| -> f64 {
        -(2.0 * j + 1.0) * (j1 * (j1 + 1.0) * m3 - j2 * (j2 + 1.0) * m3 - j * (j + 1.0) * (m2 - m1))
    };

    let mut f = vec![0.0; len];
    if len == 1 {
        f[0] = 1.0;
    } else {
        // forward from J_min up to just past the first maximum of |f|
        let mut fwd = vec![1.0];
        fwd.push(if two_min == 0 {
            -(m2 - m1) / a(1.0)
        } else {
            -b(jmin) / (jmin * a(jmin + 1.0))
        });
        let mut peak = None;
        if fwd[1].abs() < fwd[0].abs() {
            peak = Some(0);
        }
        while peak.is_none() && fwd.len() < len {
            let i = fwd.len() - 1;
            let j = jmin + i as f64;
            let next = -(b(j) * fwd[i] + (j + 1.0) * a(j) * fwd[i - 1]) / (j * a(j + 1.0));
            fwd.push(next);
            if next.abs() < fwd[i].abs() {
                peak = Some(i);
            }
            if next.abs() > RESCALE {
                fwd.iter_mut().for_each(|x| *x /= RESCALE);
            }
        }
        match peak {
            None => f.copy_from_slice(&fwd),
            Some(p) => {
                // backward from J_max down to one below the peak
                let lo = p.saturating_sub(1);
                let mut bwd = vec![0.0; len];
                bwd[len - 1] = 1.0;
                bwd[len - 2] = -b(jmax) / ((jmax + 1.0) * a(jmax));
                for i in (lo..len - 2).rev() {
                    let j = jmin + (i + 1) as f64;
                    bwd[i] = -(b(j) * bwd[i + 1] + j * a(j + 1.0) * bwd[i + 2]) / ((j + 1.0) * a(j));
                    if bwd[i].abs() > RESCALE {
                        bwd[i..].iter_mut().for_each(|x| *x /= RESCALE);
                    }
                }
                let overlap = lo..=(p + 1).min(len - 1);
                let (mut fg, mut gg) = (0.0, 0.0);
                for i in overlap {
                    fg += fwd[i] * bwd[i];
                    gg += bwd[i] * bwd[i];
                }
                let scale = fg / gg;
                f[..=p].copy_from_slice(&fwd[..=p]);
                for i in p + 1..len {
                    f[i] = bwd[i] * scale;
                }
            }
        }
    }

    let norm: f64 = f
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (jmin + i as f64) + 1.0) * x * x)
        .sum::<f64>()
        .sqrt();
    let phase = (two_j1 - two_j2 - two_m3) / 2;
    let want_positive = phase.rem_euclid(2) == 0;
    let sign = if (f[len - 1] >= 0.0) == want_positive { 1.0 } else { -1.0 };
    f.iter_mut().for_each(|x| *x *= sign / norm);
    ThreeJFamily {
        two_j_min: two_min,
        values: f,
    }
}

/// The 3j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn three_j(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> Result<f64> {
    let [tj1, tj2, tj3, tm1, tm2, tm3] = [j1, j2, j3, m1, m2, m3].map(doubled);
    let (tj1, tj2, tj3, tm1, tm2, tm3) = (tj1?, tj2?, tj3?, tm1?, tm2?, tm3?);
    if tm1 + tm2 + tm3 != 0 || tj3 < 0 || tm3.abs() > tj3 || (tj3 - tm3) % 2 != 0 {
        return Ok(0.0);
    }
    Ok(three_j_family(tj1, tj2, tm1, tm2).get(tj3))
}

/// `<j1 m1; j2 m2 | j m>` in the Condon-Shortley convention.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let w = three_j(j1, j2, j, m1, m2, -m)?;
    let phase = (doubled(j1)? - doubled(j2)? + doubled(m)?) / 2;
    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * (2.0 * j + 1.0).sqrt() * w)
}
