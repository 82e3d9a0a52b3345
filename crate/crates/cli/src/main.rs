mod config;
mod error;
mod output;
mod presets;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use splitspin::{
    condition, noisy_conditional_state, oat_state, qfi_mixed, qfi_pure, split_state, splitting_distribution,
    theta_star, wigner_function, DetectionNoise, DickeState, OatParams, RotationSpec, SphereGrid, SpinDensity,
    StateFile,
};

use config::{config_hash, AxisSpec, SweepConfig};
use error::{schema, CliError, Result};
use output::Sink;
use presets::Preset;
use sweep::Sweep;

#[derive(Parser)]
#[command(name = "splitspin", version, about = "Heralded states from split spin-squeezed ensembles")]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the one-axis-twisted state as a JSON state file.
    Oat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Partition statistics and squeezing frame of the split state.
    SplitInfo {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Heralded state of B after measuring (N_A, l_A) on A.
    Condition {
        #[command(flatten)]
        herald: Herald,
        /// Also write the heralded state as a state file.
        #[arg(long)]
        state_out: Option<PathBuf>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Quantum Fisher information and optimal rotation axis.
    Qfi {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Wigner function on a sphere grid (CSV) and its negativity (JSON).
    Wigner {
        #[command(flatten)]
        source: Source,
        /// Grid as NTHETAxNPHI (default: sized for the spin).
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        #[arg(long, default_value = "-")]
        out: String,
        /// Where to write the negativity summary (default: stdout, or stderr when the field goes to stdout).
        #[arg(long)]
        summary: Option<String>,
    },
    /// Run a parameter sweep from a JSON config or a named preset.
    Sweep {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

/// Measurement direction: a named axis of the squeezing frame or explicit angles.
#[derive(Args, Clone)]
struct Direction {
    /// x, yprime, zprime or plane:<angle from z'>.
    #[arg(long, value_parser = AxisSpec::parse, conflicts_with = "theta")]
    axis: Option<AxisSpec>,
    /// Polar angle of the measurement axis.
    #[arg(long, requires = "phi")]
    theta: Option<f64>,
    /// Azimuth of the measurement axis.
    #[arg(long, requires = "theta")]
    phi: Option<f64>,
}

impl Direction {
    fn resolve(&self, p: &OatParams) -> Result<RotationSpec> {
        match (self.theta, self.phi) {
            (Some(t), Some(f)) => Ok(RotationSpec::new(t, f)?),
            _ => Ok(self.axis.unwrap_or(AxisSpec::X).axis().direction(p)?),
        }
    }
}

#[derive(Args, Clone)]
struct Herald {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    na: usize,
    #[arg(long)]
    la: usize,
    #[command(flatten)]
    dir: Direction,
}

/// A state file, an OAT state, or a heralded (possibly noisy) state.
#[derive(Args, Clone)]
struct Source {
    /// State file to read (`-` for stdin).
    #[arg(long, conflicts_with_all = ["n", "mu", "na"])]
    state: Option<String>,
    #[arg(long, required_unless_present = "state", requires = "mu")]
    n: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    /// Herald on A with N_A particles (omit for the OAT state itself).
    #[arg(long, requires = "la")]
    na: Option<usize>,
    #[arg(long, requires = "na")]
    la: Option<usize>,
    /// Gaussian detection noise on l_A.
    #[arg(long, default_value_t = 0.0, requires = "na")]
    sigma: f64,
    #[command(flatten)]
    dir: Direction,
}

enum Loaded {
    Pure(DickeState),
    Mixed(SpinDensity),
}

impl Loaded {
    fn n(&self) -> usize {
        match self {
            Loaded::Pure(s) => s.n(),
            Loaded::Mixed(r) => r.n(),
        }
    }

    fn density(&self) -> Result<SpinDensity> {
        Ok(match self {
            Loaded::Pure(s) => SpinDensity::from_pure(s)?,
            Loaded::Mixed(r) => r.clone(),
        })
    }
}

impl Source {
    fn load(&self) -> Result<Loaded> {
        if let Some(path) = &self.state {
            let file = if path == "-" {
                StateFile::read_from(std::io::stdin().lock())
            } else {
                StateFile::load(path)
            }
            .map_err(|e| schema(format!("state file: {e}")))?;
            return Ok(Loaded::Pure(file.to_state()?));
        }
        let (n, mu) = (self.n.expect("clap requires n"), self.mu.expect("clap requires mu"));
        let p = OatParams::new(n, mu)?;
        let (Some(n_a), Some(l_a)) = (self.na, self.la) else {
            return Ok(Loaded::Pure(oat_state(&p)));
        };
        let split = split_state(&p);
        let dir = self.dir.resolve(&p)?;
        let zero = || CliError::ZeroProbability { mu, l_a };
        if self.sigma == 0.0 {
            return match condition(&split, n_a, l_a, &dir) {
                Ok(out) => Ok(Loaded::Pure(out.state_b.expect("heralded state"))),
                Err(splitspin::Error::ZeroProbability { .. }) => Err(zero()),
                Err(e) => Err(e.into()),
            };
        }
        match noisy_conditional_state(&split, n_a, l_a, &dir, &DetectionNoise::new(self.sigma)?) {
            Ok(rho) => Ok(Loaded::Mixed(rho)),
            Err(splitspin::Error::ZeroProbability { .. }) => Err(zero()),
            Err(e) => Err(e.into()),
        }
    }
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or("expected NTHETAxNPHI")?;
    Ok((a.trim().parse().map_err(|_| "bad NTHETA")?, b.trim().parse().map_err(|_| "bad NPHI")?))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SplitInfo {
    n: usize,
    mu: f64,
    theta_star: Option<f64>,
    #[serde(rename = "pNA")]
    p_na: Vec<f64>,
}

#[derive(Serialize)]
struct Angles {
    theta: f64,
    phi: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConditionReport {
    #[serde(rename = "nA")]
    n_a: usize,
    #[serde(rename = "lA")]
    l_a: usize,
    dir: Angles,
    /// Joint probability of `(N_A, l_A)`.
    prob: f64,
    /// Probability of `l_A` given `N_A`.
    #[serde(rename = "probGivenNA")]
    prob_given_n_a: f64,
    state_b: StateFile,
}

#[derive(Serialize)]
struct QfiReport {
    fq: f64,
    fq_per_particle: f64,
    axis: [f64; 3],
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WignerSummary {
    two_j: usize,
    n_theta: usize,
    n_phi: usize,
    negativity: f64,
    normalization: f64,
    min: f64,
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(schema("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| schema(e.to_string()))?;
    }
    match cli.command {
        Command::Oat { n, mu, out } => {
            let psi = oat_state(&OatParams::new(n, mu)?);
            let mut w = Sink::parse(&out).open()?;
            psi.to_file(mu).write_to(&mut w)?;
            w.flush()?;
        }
        Command::SplitInfo { n, mu, out } => {
            let p = OatParams::new(n, mu)?;
            let info = SplitInfo {
                n,
                mu,
                theta_star: theta_star(&p).ok(),
                p_na: splitting_distribution(n),
            };
            Sink::parse(&out).write_json(&info)?;
        }
        Command::Condition { herald, state_out, out } => {
            let p = OatParams::new(herald.n, herald.mu)?;
            let split = split_state(&p);
            let dir = herald.dir.resolve(&p)?;
            let res = match condition(&split, herald.na, herald.la, &dir) {
                Err(splitspin::Error::ZeroProbability { .. }) => {
                    return Err(CliError::ZeroProbability {
                        mu: herald.mu,
                        l_a: herald.la,
                    })
                }
                r => r?,
            };
            let state = res.state_b.expect("heralded state").to_file(herald.mu);
            if let Some(path) = state_out {
                state.save(path)?;
            }
            let report = ConditionReport {
                n_a: res.n_a,
                l_a: res.l_a,
                dir: Angles {
                    theta: dir.polar,
                    phi: dir.azimuth,
                },
                prob: res.prob,
                prob_given_n_a: res.prob / split.block_weight(herald.na)?,
                state_b: state,
            };
            Sink::parse(&out).write_json(&report)?;
        }
        Command::Qfi { source, out } => {
            let state = source.load()?;
            let q = match &state {
                Loaded::Pure(s) => qfi_pure(s),
                Loaded::Mixed(r) => qfi_mixed(r)?,
            };
            let report = QfiReport {
                fq: q.fq,
                fq_per_particle: q.fq / state.n() as f64,
                axis: [q.axis[0], q.axis[1], q.axis[2]],
            };
            Sink::parse(&out).write_json(&report)?;
        }
        Command::Wigner {
            source,
            grid,
            out,
            summary,
        } => {
            let rho = source.load()?.density()?;
            let grid = match grid {
                Some((nt, np)) => SphereGrid::new(nt, np).map_err(|e| schema(e.to_string()))?,
                None => SphereGrid::for_spin(rho.n()),
            };
            grid.check_resolves(rho.n()).map_err(|e| schema(e.to_string()))?;
            let field = wigner_function(&rho, &grid)?;
            let sink = Sink::parse(&out);
            let mut w = sink.open()?;
            sweep::write_field(&mut w, &field)?;
            drop(w);
            let report = WignerSummary {
                two_j: field.two_j,
                n_theta: grid.n_theta(),
                n_phi: grid.n_phi(),
                negativity: field.negativity(),
                normalization: field.normalization(),
                min: field.min(),
            };
            match (summary, &sink) {
                (Some(path), _) => Sink::parse(&path).write_json(&report)?,
                (None, Sink::File(_)) => Sink::Stdout.write_json(&report)?,
                (None, Sink::Stdout) => eprintln!("{}", serde_json::to_string(&report)?),
            }
        }
        Command::Sweep { config, preset, out } => {
            let configs = match (config, preset) {
                (Some(path), _) => vec![SweepConfig::from_json(&std::fs::read_to_string(path)?)?],
                (None, Some(p)) => p.configs(),
                (None, None) => return Err(schema("give --config or --preset")),
            };
            let sink = Sink::parse(&out);
            let sweep = Sweep::new(&configs, sink.path())?;
            let rows_hash = config_hash(&configs);
            let mut w = sink.open()?;
            sweep.write(&mut w, &rows_hash)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
