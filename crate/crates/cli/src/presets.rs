use std::f64::consts::{PI, TAU};

use clap::ValueEnum;

use crate::config::{
    AllOutcomes, Average, AxisSpec, OneOrMany, OutcomeList, Quantity, RuleSpec, SweepConfig, CONFIG_VERSION,
};

/// Named sweeps regenerating the data behind each figure panel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// F_Q/N_B against the in-plane angle from z', l_A = N_A/2.
    Fig2a,
    /// Outcome distributions along y' and z'.
    Fig2bc,
    /// F_Q/N_B against mu for several outcomes along y' and z'.
    Fig2de,
    /// F_Q/N_B at l_A = N_A/2 against the OAT baseline.
    Fig2f,
    /// Outcome distributions, F_Q/N_B and the OAT baseline for x measurements.
    Fig3abd,
    /// F_Q/N_B under detection noise, against sigma and against mu.
    Fig4,
    /// Wigner negativity of the x-heralded cats against sigma.
    Fig5,
    /// F_Q/N of the OAT state over a full period.
    S1b,
    /// Conditional F_Q/N_B over a full period, all three axes.
    S3,
}

const N: usize = 100;

/// `k` evenly spaced values from `a` to `b`, rounded to twelve decimals.
pub fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| ((a + (b - a) * i as f64 / (k - 1) as f64) * 1e12).round() / 1e12)
        .collect()
}

fn sweep(mu_grid: Vec<f64>, axes: Vec<AxisSpec>, outputs: Vec<Quantity>) -> SweepConfig {
    SweepConfig {
        version: CONFIG_VERSION,
        n: N,
        mu_grid,
        axis: OneOrMany::Many(axes),
        rule: None,
        l_a_star: None,
        sigma_grid: vec![0.0],
        n_a: None,
        average: Average::None,
        n_a_star: None,
        sigma_n: None,
        outputs,
        skip_zero_probability: false,
        wigner_grid: None,
    }
}

fn outcomes(l: &[usize]) -> Option<OutcomeList> {
    Some(OutcomeList::Values(l.to_vec()))
}

fn noise_grid() -> Vec<f64> {
    let mut s = linspace(0.0, 3.0, 31);
    s.extend([0.49, 1.37]);
    s.sort_by(f64::total_cmp);
    s
}

impl Preset {
    pub fn configs(self) -> Vec<SweepConfig> {
        use AxisSpec::{YPrime, ZPrime, X};
        use Quantity::{Fq, Negativity, Oat, Prob};
        let yz = vec![YPrime, ZPrime];
        match self {
            Preset::Fig2a => {
                let angles = linspace(0.0, PI, 37).into_iter().map(AxisSpec::PlaneAngle).collect();
                vec![SweepConfig {
                    rule: Some(RuleSpec::CeilHalf),
                    ..sweep(vec![0.05, 0.1, 0.2, 0.4], angles, vec![Fq, Prob])
                }]
            }
            Preset::Fig2bc => vec![SweepConfig {
                l_a_star: Some(OutcomeList::All(AllOutcomes::All)),
                ..sweep(vec![0.02, 0.05, 0.1, 0.2, 0.4], yz, vec![Prob])
            }],
            Preset::Fig2de => vec![SweepConfig {
                l_a_star: outcomes(&[15, 20, 23, 25]),
                skip_zero_probability: true,
                ..sweep(linspace(0.01, 0.6, 60), yz, vec![Fq, Prob])
            }],
            Preset::Fig2f => vec![SweepConfig {
                rule: Some(RuleSpec::CeilHalf),
                ..sweep(linspace(0.005, 0.3, 60), vec![ZPrime, YPrime], vec![Fq, Prob, Oat])
            }],
            Preset::Fig3abd => vec![
                SweepConfig {
                    l_a_star: Some(OutcomeList::All(AllOutcomes::All)),
                    skip_zero_probability: true,
                    ..sweep(vec![0.02, 0.05, 0.1, 0.2, 0.4], vec![X], vec![Prob, Fq, Oat])
                },
                SweepConfig {
                    l_a_star: outcomes(&[50, 49, 48, 47, 45]),
                    skip_zero_probability: true,
                    ..sweep(linspace(0.005, 0.3, 60), vec![X], vec![Prob, Fq, Oat])
                },
            ],
            Preset::Fig4 => {
                let (vs_sigma, vs_mu) = (noise_grid(), vec![0.49, 1.37]);
                let x_outcomes = outcomes(&[49, 48, 47]);
                let base = |mu, axes, l: Option<OutcomeList>, sigma| SweepConfig {
                    l_a_star: l,
                    sigma_grid: sigma,
                    skip_zero_probability: true,
                    ..sweep(mu, axes, vec![Fq, Prob, Oat])
                };
                vec![
                    base(vec![0.1, 0.3], yz.clone(), outcomes(&[25]), vs_sigma.clone()),
                    base(linspace(0.01, 0.5, 50), yz, outcomes(&[25]), vs_mu.clone()),
                    base(vec![0.1], vec![X], x_outcomes.clone(), vs_sigma),
                    base(linspace(0.01, 0.5, 50), vec![X], x_outcomes, vs_mu),
                ]
            }
            Preset::Fig5 => vec![SweepConfig {
                l_a_star: outcomes(&[47, 48, 49]),
                sigma_grid: linspace(0.0, 1.0, 21),
                ..sweep(vec![0.1], vec![X], vec![Negativity, Fq, Prob])
            }],
            Preset::S1b => vec![sweep(linspace(0.0, TAU, 201), vec![ZPrime], vec![Oat])],
            Preset::S3 => {
                let mu = linspace(0.01, TAU, 200);
                vec![
                    SweepConfig {
                        rule: Some(RuleSpec::CeilHalf),
                        skip_zero_probability: true,
                        ..sweep(mu.clone(), yz, vec![Fq, Prob, Oat])
                    },
                    SweepConfig {
                        l_a_star: outcomes(&[49, 48, 47, 45]),
                        skip_zero_probability: true,
                        ..sweep(mu, vec![X], vec![Fq, Prob, Oat])
                    },
                ]
            }
        }
    }
}
