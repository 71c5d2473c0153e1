use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use annulus::energy::{self, EnergySolution, MinimizeOptions, ParityConstraint, Seed};
use annulus::explorer::{self, Budget, PlotFormat, SweepConfig, WORKERS_ENV};
use annulus::grid::{GridKind, GridSpec};
use annulus::pohozaev;
use annulus::shooting::{self, ShootOptions};
use annulus::spectral::{self, SpectralOptions};
use annulus::{Error, HalfWidth, ProblemParams};
use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "annulus", version, about = "Positive radial solutions on symmetric annuli of the three-sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find and count solutions at one point; prints a JSON record.
    Solve {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        grid: GridArgs,
        /// Skip the Morse index computation.
        #[arg(long)]
        no_spectrum: bool,
    },
    /// First-zero map Z(alpha) on an alpha grid, as CSV.
    ShootCurve {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        alpha_min: f64,
        #[arg(long)]
        alpha_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Space the heights geometrically.
        #[arg(long)]
        log: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One Rayleigh-quotient minimization.
    Minimize {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = ParityArg::Even)]
        parity: ParityArg,
        #[arg(long, value_enum)]
        seed: Option<SeedArg>,
        /// Store the solution (with its parameters) as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a plot of w(t) and u(r).
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Svg)]
        plot_format: FormatArg,
    },
    /// Eigenvalues of the linearization around a stored solution.
    Spectrum {
        /// JSON written by `minimize --out`.
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Skip the shooting confirmation.
        #[arg(long)]
        matrix_only: bool,
    },
    /// Sign checks of the Pohozaev densities.
    PohozaevCheck {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 10_000)]
        grid_n: usize,
    },
    /// Run a parameter sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// Override the config's epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Override the config's grid node count.
        #[arg(long)]
        grid_nodes: Option<usize>,
    },
    /// Regime verdict for (lambda, p).
    Classify {
        #[command(flatten)]
        point: Point,
    },
}

#[derive(Args, Clone, Copy)]
struct Point {
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long)]
    p: f64,
    /// Distance of the annulus from the poles.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Half-width in r; the annulus is r in (-a, a).
    #[arg(long)]
    a: Option<f64>,
    /// Half-width in the stretched variable t.
    #[arg(long)]
    b: Option<f64>,
}

impl Point {
    fn params(&self) -> anyhow::Result<ProblemParams> {
        let given: Vec<HalfWidth> = [
            self.epsilon.map(HalfWidth::Epsilon),
            self.a.map(HalfWidth::A),
            self.b.map(HalfWidth::B),
        ]
        .into_iter()
        .flatten()
        .collect();
        let width = *given
            .first()
            .ok_or_else(|| Error::Config("one of --epsilon, --a or --b is required".into()))?;
        if given.len() > 1 {
            eprintln!("warning: several half-widths given; using {width:?}");
        }
        Ok(ProblemParams::new(self.lambda, self.p, width)?)
    }
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    #[arg(long, default_value_t = annulus::grid::DEFAULT_NODES)]
    grid_nodes: usize,
    #[arg(long, value_enum, default_value_t = GridArg::Graded)]
    grid_kind: GridArg,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            nodes: self.grid_nodes,
            kind: match self.grid_kind {
                GridArg::Uniform => GridKind::Uniform,
                GridArg::Graded => GridKind::Graded,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Uniform,
    Graded,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Free,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedArg {
    BumpLeft,
    BumpRight,
    Even,
    Plateau,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Svg,
    Text,
}

/// A solution together with the parameters it solves.
#[derive(Serialize, Deserialize)]
struct Stored {
    params: ProblemParams,
    solution: EnergySolution,
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Solve {
            point,
            grid,
            no_spectrum,
        } => {
            let params = point.params()?;
            let budget = Budget {
                grid: grid.spec(),
                spectrum: !no_spectrum,
                ..Budget::default()
            };
            let record = explorer::count_solutions(&params, &budget);
            print_json(&record)?;
            if record.solutions_found == 0 && !record.failures.is_empty() && params.is_supported() {
                return Ok(ExitCode::from(4));
            }
        }
        Command::ShootCurve {
            point,
            alpha_min,
            alpha_max,
            points,
            log,
            out,
        } => {
            let params = point.params()?;
            if !(alpha_min > 0.0 && alpha_max > alpha_min && points >= 2) {
                return Err(Error::Config("need 0 < alpha-min < alpha-max and at least 2 points".into()).into());
            }
            let alphas: Vec<f64> = (0..points)
                .map(|i| {
                    let s = i as f64 / (points - 1) as f64;
                    if log {
                        alpha_min * (alpha_max / alpha_min).powf(s)
                    } else {
                        alpha_min + (alpha_max - alpha_min) * s
                    }
                })
                .collect();
            let samples = shooting::z_curve(&alphas, &params, &ShootOptions::default());
            let mut text = String::from("alpha,first_zero,terminated_by\n");
            for s in &samples {
                let zero = s.first_zero.map(|z| z.to_string()).unwrap_or_default();
                let how = match (&s.terminated_by, &s.error) {
                    (_, Some(e)) => format!("error: {e}"),
                    (Some(t), None) => serde_json::to_value(t)?.as_str().unwrap_or_default().to_string(),
                    (None, None) => String::new(),
                };
                text.push_str(&format!("{},{zero},{how}\n", s.alpha));
            }
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
        Command::Minimize {
            point,
            grid,
            parity,
            seed,
            out,
            plot,
            plot_format,
        } => {
            let params = point.params()?;
            let nodes = grid.spec().build(&params)?;
            let (constraint, default_seed) = match parity {
                ParityArg::Even => (ParityConstraint::Even, Seed::Even),
                ParityArg::Free => (ParityConstraint::Free, Seed::BumpLeft),
            };
            let seed = match seed {
                None => default_seed,
                Some(SeedArg::BumpLeft) => Seed::BumpLeft,
                Some(SeedArg::BumpRight) => Seed::BumpRight,
                Some(SeedArg::Even) => Seed::Even,
                Some(SeedArg::Plateau) => Seed::Plateau,
            };
            let start = energy::seed_profile(seed, &params, &nodes)?;
            let solution = energy::minimize_rayleigh(&params, constraint, &start, &MinimizeOptions::default())?;
            if let Some(path) = &plot {
                let format = match plot_format {
                    FormatArg::Svg => PlotFormat::Svg,
                    FormatArg::Text => PlotFormat::Text,
                };
                explorer::emit_profile_plot(&solution, &params, path, format)?;
            }
            print_json(&serde_json::json!({
                "params": params,
                "rayleigh": solution.rayleigh,
                "parity": solution.parity,
                "provenance": solution.provenance,
                "max": solution.profile.max_abs(),
            }))?;
            if let Some(path) = out {
                let stored = Stored { params, solution };
                fs::write(&path, serde_json::to_string(&stored)?).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Spectrum { solution, k, matrix_only } => {
            let text = fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let stored: Stored = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", solution.display())))?;
            let options = SpectralOptions {
                matrix_only,
                ..SpectralOptions::default()
            };
            let report = spectral::linearized_spectrum(&stored.solution, &stored.params, k, &options)?;
            print_json(&report)?;
        }
        Command::PohozaevCheck { point, grid_n } => {
            let params = point.params()?;
            let crossing = pohozaev::appendix_b_monotonicity(params.lambda, params.p, grid_n).ok();
            print_json(&serde_json::json!({
                "params": params,
                "verdict": explorer::classify(&params),
                "even": pohozaev::sign_check_even(&params, grid_n),
                "general": pohozaev::sign_check_general(&params, grid_n),
                "crossing": crossing,
            }))?;
        }
        Command::Sweep {
            config,
            out,
            workers,
            epsilon,
            grid_nodes,
        } => {
            let text = fs::read_to_string(&config).map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let mut cfg = SweepConfig::from_json(&text)?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            if let Some(e) = epsilon {
                cfg.epsilon = Some(e);
            }
            if let Some(n) = grid_nodes {
                cfg.budget.grid_nodes = n;
            }
            let outcome = explorer::sweep(&cfg)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            match out {
                Some(path) => {
                    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    explorer::write_csv(&outcome.records, file)?;
                }
                None => explorer::write_csv(&outcome.records, io::stdout().lock())?,
            }
            let code = outcome.exit_code();
            if code == 3 {
                eprintln!("{} consistency violation(s)", outcome.violations());
            }
            return Ok(ExitCode::from(code as u8));
        }
        Command::Classify { point } => {
            let params = point.params()?;
            print_json(&explorer::classify(&params))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Domain(_) | Error::Io(_) | Error::UnsupportedRegime { .. } | Error::Regime(_)) => 2,
        Some(_) => 4,
        None => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::anyhow;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into()).into()), 2);
        assert_eq!(exit_code(&Error::StepLimit { max_steps: 1, t: 0.0 }.into()), 4);
        assert_eq!(exit_code(&anyhow!("plain")), 2);
    }
}
