//! Collective measurements on mode `A` and the heralded states of mode `B`.
//!
//! Measuring `(N_A, l_A)` along `dir` projects the split state with
//! `|l_A>_dir <l_A|_dir` on `A`; the unnormalized remainder on `B` is
//! `sum_{k_A} amp[N_A][k_A][k_B] <l_A|_dir |k_A>`, and its squared norm is the
//! joint probability `p(l_A, N_A | dir)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dicke::{coherent_weight, DickeState};
use crate::oat::{twist_phase, OatParams, SplitState};
use crate::rotation::{rotated_bras, rotated_dicke_bra, RotationSpec};
use crate::{Error, Result};

/// Below this joint probability a conditional state is reported as undefined.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct ConditionalOutcome {
    pub n_a: usize,
    pub l_a: usize,
    pub dir: RotationSpec,
    /// Joint probability `p(l_A, N_A | dir)`.
    pub prob: f64,
    /// Normalized state of `B` (`N_B = N - N_A` particles); `None` for zero-probability outcomes.
    pub state_b: Option<DickeState>,
}

/// Every outcome `l_A = 0..=N_A` of one measurement at fixed `N_A`.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    pub n_a: usize,
    pub dir: RotationSpec,
    /// `p(N_A)`, the squared norm of the split-state block.
    pub block_weight: f64,
    pub outcomes: Vec<ConditionalOutcome>,
}

impl OutcomeTable {
    /// `p_{N_A, dir}(l_A) = p(l_A, N_A | dir) / p(N_A)`.
    pub fn conditional_probs(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.prob / self.block_weight).collect()
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.prob).sum()
    }
}

fn check_n_a(split: &SplitState, n_a: usize) -> Result<()> {
    if n_a > split.n() {
        return Err(Error::OutOfRange {
            what: "N_A",
            value: n_a as i64,
            max: split.n() as i64,
        });
    }
    Ok(())
}

/// Unnormalized `B` vectors for all outcomes at fixed `N_A`; row `l_A` holds the
/// vector whose squared norm is `p(l_A, N_A | dir)`.
pub(crate) fn projected_block(split: &SplitState, n_a: usize, dir: &RotationSpec) -> Result<DMatrix<Complex64>> {
    check_n_a(split, n_a)?;
    let bras = rotated_bras(n_a, dir)?;
    Ok(bras * split.block(n_a)?)
}

/// Heralded state of `B` after observing `(n_a, l_a)` along `dir`.
pub fn condition(split: &SplitState, n_a: usize, l_a: usize, dir: &RotationSpec) -> Result<ConditionalOutcome> {
    check_n_a(split, n_a)?;
    let bra = rotated_dicke_bra(n_a, l_a, dir)?;
    let v: DVector<Complex64> = split.block(n_a)?.transpose() * bra;
    let mut state = DickeState::from_amplitudes(v)?;
    let prob = state.norm_sqr();
    if prob < ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { n_a, l_a, prob });
    }
    state.normalize()?;
    Ok(ConditionalOutcome {
        n_a,
        l_a,
        dir: *dir,
        prob,
        state_b: Some(state),
    })
}

/// All `N_A + 1` outcomes of the measurement along `dir` at fixed `N_A`.
pub fn outcome_table(split: &SplitState, n_a: usize, dir: &RotationSpec) -> Result<OutcomeTable> {
    let rows = projected_block(split, n_a, dir)?;
    let outcomes = rows
        .row_iter()
        .enumerate()
        .map(|(l_a, row)| {
            let mut state = DickeState::from_amplitudes(row.transpose())?;
            let prob = state.norm_sqr();
            let state_b = if prob < ZERO_PROBABILITY {
                None
            } else {
                state.normalize()?;
                Some(state)
            };
            Ok(ConditionalOutcome {
                n_a,
                l_a,
                dir: *dir,
                prob,
                state_b,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeTable {
        n_a,
        dir: *dir,
        block_weight: split.block_weight(n_a)?,
        outcomes,
    })
}

/// Heralded `B` state after measuring `S_z` on `A`: the `N_B`-particle twisted
/// state with its phase profile shifted by `l_A`, i.e. rotated about `z`.
pub fn sz_conditional_closed_form(p: &OatParams, n_a: usize, l_a: usize) -> Result<DickeState> {
    if n_a > p.n {
        return Err(Error::OutOfRange {
            what: "N_A",
            value: n_a as i64,
            max: p.n as i64,
        });
    }
    if l_a > n_a {
        return Err(Error::OutOfRange {
            what: "l_A",
            value: l_a as i64,
            max: n_a as i64,
        });
    }
    let n_b = p.n - n_a;
    let amp = DVector::from_fn(n_b + 1, |kb, _| {
        twist_phase(p.n, p.mu, l_a + kb) * coherent_weight(n_b, kb)
    });
    let mut psi = DickeState::from_amplitudes(amp)?;
    psi.normalize()?;
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oat::{split_state, splitting_distribution};

    #[test]
    fn unpolarized_x_measurement_at_zero_twist() {
        let p = OatParams::new(10, 0.0).unwrap();
        let split = split_state(&p);
        let w = splitting_distribution(10);
        for n_a in 1..10 {
            let out = condition(&split, n_a, n_a, &RotationSpec::plus_x()).unwrap();
            assert!((out.prob - w[n_a]).abs() < 1e-12);
            let coh = DickeState::coherent_x(10 - n_a);
            assert!((out.state_b.unwrap().overlap(&coh).unwrap() - 1.0).abs() < 1e-10);
            if n_a > 0 {
                let err = condition(&split, n_a, n_a - 1, &RotationSpec::plus_x()).unwrap_err();
                assert!(matches!(err, Error::ZeroProbability { .. }));
            }
        }
    }

    #[test]
    fn outcome_table_sums_to_block_weight() {
        let p = OatParams::new(6, 0.8).unwrap();
        let split = split_state(&p);
        let w = splitting_distribution(6);
        let dir = RotationSpec::new(1.1, 4.0).unwrap();
        for n_a in 0..=6 {
            let t = outcome_table(&split, n_a, &dir).unwrap();
            assert_eq!(t.outcomes.len(), n_a + 1);
            assert!((t.total() - w[n_a]).abs() < 1e-12);
            assert!((t.conditional_probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_probability_entries_carry_no_state() {
        let split = split_state(&OatParams::new(6, 0.0).unwrap());
        let t = outcome_table(&split, 3, &RotationSpec::plus_x()).unwrap();
        assert!(t.outcomes[3].state_b.is_some());
        assert!(t.outcomes[..3].iter().all(|o| o.state_b.is_none()));
    }

    #[test]
    fn closed_form_index_checks() {
        let p = OatParams::new(6, 0.3).unwrap();
        assert!(sz_conditional_closed_form(&p, 7, 0).is_err());
        assert!(sz_conditional_closed_form(&p, 3, 4).is_err());
        let coh = sz_conditional_closed_form(&OatParams::new(6, 0.0).unwrap(), 2, 1).unwrap();
        assert!((coh.overlap(&DickeState::coherent_x(4)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn index_errors() {
        let split = split_state(&OatParams::new(4, 0.3).unwrap());
        assert!(condition(&split, 5, 0, &RotationSpec::plus_z()).is_err());
        assert!(condition(&split, 2, 3, &RotationSpec::plus_z()).is_err());
        assert!(outcome_table(&split, 5, &RotationSpec::plus_z()).is_err());
    }
}
