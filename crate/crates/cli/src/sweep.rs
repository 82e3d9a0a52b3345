use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use splitspin::{
    avg_qfi_full, avg_qfi_joint_block, avg_qfi_number_fluct, condition, noisy_conditional_state, oat_state,
    qfi_mixed, qfi_pure, split_state, wigner_function, DetectionNoise, NumberReadout, OatParams, RotationSpec,
    SphereGrid, SpinDensity, SplitState, WignerField,
};

use crate::config::{Average, AxisSpec, Quantity, Selector, SweepConfig};
use crate::error::{schema, CliError, Result};
use crate::output::{fmt_f64, write_csv};

const KEY_COLUMNS: [&str; 6] = ["mu", "axis", "average", "n_a", "la", "sigma"];

/// One sweep point, in configuration order.
#[derive(Clone, Debug)]
struct Point {
    config: usize,
    mu_index: usize,
    mu: f64,
    axis: AxisSpec,
    select: Select,
    sigma: f64,
}

#[derive(Clone, Copy, Debug)]
enum Select {
    Outcome(usize),
    Rule(crate::config::RuleSpec),
}

impl Select {
    fn label(self) -> String {
        match self {
            Select::Outcome(l) => l.to_string(),
            Select::Rule(r) => r.label(),
        }
    }
}

/// Computed values of one point; `None` cells are written empty.
#[derive(Clone, Debug, Default)]
struct Values {
    prob: Option<f64>,
    fq: Option<f64>,
    fq_raw: Option<f64>,
    negativity: Option<f64>,
    oat: Option<f64>,
    wigner_file: Option<String>,
}

/// A set of sweeps sharing one output table.
pub struct Sweep<'a> {
    configs: &'a [SweepConfig],
    outputs: Vec<Quantity>,
    wigner_base: Option<PathBuf>,
}

impl<'a> Sweep<'a> {
    /// `wigner_base` is the CSV path next to which Wigner fields are written.
    pub fn new(configs: &'a [SweepConfig], wigner_base: Option<&Path>) -> Result<Self> {
        let first = configs.first().ok_or_else(|| schema("no sweep configured"))?;
        let mut outputs = first.outputs.clone();
        outputs.sort();
        for cfg in configs {
            cfg.validate()?;
            let mut o = cfg.outputs.clone();
            o.sort();
            if o != outputs {
                return Err(schema("all sweeps of one table must request the same outputs"));
            }
        }
        if outputs.contains(&Quantity::Wigner) && wigner_base.is_none() {
            return Err(schema("the wigner output needs --out to name a file"));
        }
        Ok(Self {
            configs,
            outputs,
            wigner_base: wigner_base.map(Path::to_path_buf),
        })
    }

    pub fn header(&self) -> Vec<&'static str> {
        KEY_COLUMNS.iter().copied().chain(self.outputs.iter().map(|q| q.column())).collect()
    }

    fn points(&self) -> Vec<Point> {
        let mut points = Vec::new();
        for (ci, cfg) in self.configs.iter().enumerate() {
            let selects: Vec<Select> = match cfg.selector() {
                Selector::Outcomes(v) => v.into_iter().map(Select::Outcome).collect(),
                Selector::Rule(r) => vec![Select::Rule(r)],
            };
            for (mi, &mu) in cfg.mu_grid.iter().enumerate() {
                for &axis in &cfg.axes() {
                    for &select in &selects {
                        for &sigma in &cfg.sigma_grid {
                            points.push(Point {
                                config: ci,
                                mu_index: mi,
                                mu,
                                axis,
                                select,
                                sigma,
                            });
                        }
                    }
                }
            }
        }
        points
    }

    /// Evaluates every point (in parallel) and returns the rows in order.
    pub fn rows(&self) -> Result<Vec<Vec<String>>> {
        let needs_split = self.outputs.iter().any(|q| *q != Quantity::Oat);
        let splits: Vec<Vec<Option<SplitState>>> = self
            .configs
            .iter()
            .map(|cfg| {
                cfg.mu_grid
                    .par_iter()
                    .map(|&mu| Ok(needs_split.then(|| OatParams::new(cfg.n, mu).map(|p| split_state(&p))).transpose()?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let points = self.points();
        let results: Vec<Result<Vec<String>>> = points
            .par_iter()
            .enumerate()
            .map(|(index, p)| {
                let cfg = &self.configs[p.config];
                let split = splits[p.config][p.mu_index].as_ref();
                let values = self.evaluate(cfg, split, p, index)?;
                Ok(self.format_row(cfg, p, &values))
            })
            .collect();
        results.into_iter().collect()
    }

    pub fn write(&self, w: &mut dyn Write, hash: &str) -> Result<()> {
        let rows = self.rows()?;
        write_csv(w, &format!("config-hash: {hash}"), &self.header(), &rows)
    }

    fn format_row(&self, cfg: &SweepConfig, p: &Point, v: &Values) -> Vec<String> {
        let cell = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        let mut row = vec![
            fmt_f64(p.mu),
            p.axis.label(),
            cfg.average.label().to_string(),
            cfg.partition().map(|n| n.to_string()).unwrap_or_default(),
            p.select.label(),
            fmt_f64(p.sigma),
        ];
        for q in &self.outputs {
            row.push(match q {
                Quantity::Prob => cell(v.prob),
                Quantity::Fq => cell(v.fq),
                Quantity::FqRaw => cell(v.fq_raw),
                Quantity::Negativity => cell(v.negativity),
                Quantity::Oat => cell(v.oat),
                Quantity::Wigner => v.wigner_file.clone().unwrap_or_default(),
            });
        }
        row
    }

    fn evaluate(&self, cfg: &SweepConfig, split: Option<&SplitState>, p: &Point, index: usize) -> Result<Values> {
        let mut v = Values::default();
        if cfg.wants(Quantity::Oat) {
            let n_b = cfg.n - cfg.partition().unwrap_or(cfg.n / 2);
            v.oat = Some(qfi_pure(&oat_state(&OatParams::new(n_b, p.mu)?)).fq / n_b as f64);
        }
        let Some(split) = split else { return Ok(v) };
        let dir = p.axis.axis().direction(split.params())?;
        match (cfg.partition(), p.select) {
            (Some(n_a), Select::Outcome(l)) => self.single_block(cfg, split, n_a, l, &dir, p, index, &mut v)?,
            (Some(n_a), Select::Rule(r)) => {
                let l = r.rule().outcome(n_a).ok_or_else(|| schema("rule selects no outcome"))?;
                self.single_block(cfg, split, n_a, l, &dir, p, index, &mut v)?
            }
            (None, Select::Rule(r)) => averaged(cfg, split, r, &dir, p, &mut v)?,
            (None, Select::Outcome(_)) => return Err(schema("averaged sweeps select outcomes with a rule")),
        }
        Ok(v)
    }

    #[allow(clippy::too_many_arguments)]
    fn single_block(
        &self,
        cfg: &SweepConfig,
        split: &SplitState,
        n_a: usize,
        l: usize,
        dir: &RotationSpec,
        p: &Point,
        index: usize,
        v: &mut Values,
    ) -> Result<()> {
        let weight = split.block_weight(n_a)?;
        let heralded = match condition(split, n_a, l, dir) {
            Ok(out) => Some(out),
            Err(splitspin::Error::ZeroProbability { prob, .. }) => {
                v.prob = Some(prob / weight);
                None
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(out) = &heralded {
            v.prob = Some(out.prob / weight);
        }
        let state_needed = [Quantity::Fq, Quantity::FqRaw, Quantity::Negativity, Quantity::Wigner]
            .iter()
            .any(|q| cfg.wants(*q));
        if !state_needed {
            return Ok(());
        }
        let zero = CliError::ZeroProbability { mu: p.mu, l_a: l };
        let n_b = (cfg.n - n_a) as f64;
        let (fq, rho) = if p.sigma == 0.0 {
            let Some(out) = heralded else {
                return if cfg.skip_zero_probability { Ok(()) } else { Err(zero) };
            };
            let psi = out.state_b.expect("heralded state");
            (qfi_pure(&psi).fq, SpinDensity::from_pure(&psi)?)
        } else {
            match noisy_conditional_state(split, n_a, l, dir, &DetectionNoise::new(p.sigma)?) {
                Ok(rho) => (qfi_mixed(&rho)?.fq, rho),
                Err(splitspin::Error::ZeroProbability { .. }) if cfg.skip_zero_probability => return Ok(()),
                Err(splitspin::Error::ZeroProbability { .. }) => return Err(zero),
                Err(e) => return Err(e.into()),
            }
        };
        v.fq = Some(fq / n_b);
        v.fq_raw = Some(fq);
        if cfg.wants(Quantity::Negativity) || cfg.wants(Quantity::Wigner) {
            let grid = match cfg.wigner_grid {
                Some([nt, np]) => SphereGrid::new(nt, np)?,
                None => SphereGrid::for_spin(rho.n()),
            };
            let field = wigner_function(&rho, &grid)?;
            if cfg.wants(Quantity::Negativity) {
                v.negativity = Some(field.negativity());
            }
            if cfg.wants(Quantity::Wigner) {
                v.wigner_file = Some(self.write_field(&field, index)?);
            }
        }
        Ok(())
    }

    fn write_field(&self, field: &WignerField, index: usize) -> Result<String> {
        let base = self.wigner_base.as_ref().expect("checked in new");
        let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
        let name = format!("{stem}_w{index:05}.csv");
        let path = base.with_file_name(&name);
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_field(&mut w, field)?;
        Ok(name)
    }
}

fn averaged(
    cfg: &SweepConfig,
    split: &SplitState,
    rule: crate::config::RuleSpec,
    dir: &RotationSpec,
    p: &Point,
    v: &mut Values,
) -> Result<()> {
    let (rule, axis) = (rule.rule(), p.axis.axis());
    if cfg.wants(Quantity::Prob) {
        let mut total = 0.0;
        for n_a in 0..cfg.n {
            let Some(l) = rule.outcome(n_a) else { continue };
            total += match condition(split, n_a, l, dir) {
                Ok(out) => out.prob,
                Err(splitspin::Error::ZeroProbability { prob, .. }) => prob,
                Err(e) => return Err(e.into()),
            };
        }
        v.prob = Some(total);
    }
    if cfg.wants(Quantity::Fq) {
        let density = match cfg.average {
            Average::NumberFluct => avg_qfi_number_fluct(split, rule, axis)?,
            Average::JointBlock => avg_qfi_joint_block(split, rule, axis)?,
            Average::Full => {
                let noise = DetectionNoise::new(p.sigma)?;
                let readout = cfg
                    .n_a_star
                    .map(|n_a_star| {
                        Ok::<_, CliError>(NumberReadout {
                            n_a_star,
                            noise: DetectionNoise::new(cfg.sigma_n.unwrap_or(p.sigma))?,
                        })
                    })
                    .transpose()?;
                avg_qfi_full(split, rule, axis, &noise, readout.as_ref())?
            }
            Average::None => unreachable!("single-block sweeps are handled separately"),
        };
        v.fq = Some(density);
    }
    Ok(())
}

/// Writes a sampled field as `theta,phi,w` rows, polar index outermost.
pub fn write_field(w: &mut dyn Write, field: &WignerField) -> Result<()> {
    let g = &field.grid;
    writeln!(w, "# two-j: {}, grid: {} x {}", field.two_j, g.n_theta(), g.n_phi())?;
    writeln!(w, "theta,phi,w")?;
    for i in 0..g.n_theta() {
        for k in 0..g.n_phi() {
            writeln!(w, "{},{},{}", fmt_f64(g.theta(i)), fmt_f64(g.phi(k)), fmt_f64(field.values[(i, k)]))?;
        }
    }
    w.flush()?;
    Ok(())
}
