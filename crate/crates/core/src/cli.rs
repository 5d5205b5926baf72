//! Command-line interface: instance generation, validation, solving,
//! Monte Carlo play, repetition reports, and the selftest harness.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid instance file, 3 solver
//! non-convergence (the partial report is still written).

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::channels::Channel;
use crate::error::Error;
use crate::games::{
    acceptance_probability, game_value, generate_instance, simulate_rounds, GameInstance,
    InstanceKind,
};
use crate::repetition::{repetition_report, RepetitionMode};
use crate::selftest;
use crate::separation::{solve_image_separation, SeparationConfig};
use crate::serialize::{read_json_file, to_json_string, write_json_file};

/// Environment fallback for `--seed`.
pub const SEED_ENV_VAR: &str = "REFGAME_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "refgame",
    about = "Referee-game toolkit: channel image separation, optimal discrimination, game values, parallel repetition",
    disable_help_subcommand = true
)]
struct Cli {
    /// Duality-gap tolerance for the separation solver.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Iteration cap for the separation solver.
    #[arg(long, global = true)]
    max_iters: Option<usize>,

    /// Seed for everything randomized (falls back to REFGAME_SEED, then 42).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of parallel copies for `repeat`.
    #[arg(long, global = true)]
    k: Option<usize>,

    /// Number of Monte Carlo rounds for `play`.
    #[arg(long, global = true)]
    rounds: Option<u64>,

    /// Vote rule for `repeat`.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a game instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Bias δ ∈ (0, 1/2) for no-diag-pair.
        #[arg(long)]
        delta: Option<f64>,
        /// Angle in radians for no-constant-pair.
        #[arg(long)]
        angle: Option<f64>,
        /// Input dimension for the yes kinds.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Check the invariants of an instance or channel file.
    Validate { file: PathBuf },
    /// Solve the image separation and report the certified bounds.
    Separate { file: PathBuf },
    /// Compute the game value and equilibrium strategies.
    Value { file: PathBuf },
    /// Monte Carlo rounds of the protocol at the computed equilibrium.
    Play { file: PathBuf },
    /// Parallel-repetition bounds with verification certificates.
    Repeat { file: PathBuf },
    /// Run the full property suite and print a pass/fail table.
    Selftest,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    YesIdentical,
    YesSharedImage,
    NoConstantPair,
    NoDiagPair,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Accept,
    Reject,
}

/// Defaults and flag resolution shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub k: usize,
    pub rounds: u64,
    pub mode: RepetitionMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iters: 200_000,
            seed: 42,
            k: 2,
            rounds: 100_000,
            mode: RepetitionMode::UnanimousAccept,
        }
    }
}

impl RunConfig {
    fn separation(&self) -> SeparationConfig {
        SeparationConfig {
            max_iters: self.max_iters,
            gap_tol: self.tol,
            step_scale: 1.0,
            seed: self.seed,
        }
    }
}

enum Failure {
    Usage(String),
    BadInstance(String),
    /// Solver stopped at the iteration cap; the partial report was written.
    NoConvergence(String),
}

/// Entry point used by `main` and by tests. Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes.
            if e.use_stderr() {
                eprint!("{e}");
                return 1;
            }
            print!("{e}");
            return 0;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::BadInstance(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::NoConvergence(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let mut run = RunConfig::default();
    if let Ok(env_seed) = std::env::var(SEED_ENV_VAR) {
        run.seed = env_seed
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV_VAR} must be an integer")))?;
    }
    if let Some(tol) = cli.tol {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
        run.tol = tol;
    }
    if let Some(iters) = cli.max_iters {
        if iters == 0 {
            return Err(Failure::Usage("--max-iters must be positive".into()));
        }
        run.max_iters = iters;
    }
    if let Some(seed) = cli.seed {
        run.seed = seed;
    }
    if let Some(k) = cli.k {
        if k == 0 {
            return Err(Failure::Usage("--k must be positive".into()));
        }
        run.k = k;
    }
    if let Some(rounds) = cli.rounds {
        if rounds == 0 {
            return Err(Failure::Usage("--rounds must be positive".into()));
        }
        run.rounds = rounds;
    }
    if let Some(mode) = cli.mode {
        run.mode = match mode {
            ModeArg::Accept => RepetitionMode::UnanimousAccept,
            ModeArg::Reject => RepetitionMode::UnanimousReject,
        };
    }
    let out = cli.out.as_deref();

    match cli.command {
        Command::Gen {
            kind,
            delta,
            angle,
            dim,
        } => {
            let kind = match kind {
                KindArg::YesIdentical => InstanceKind::YesIdentical {
                    dim: dim.unwrap_or(2),
                },
                KindArg::YesSharedImage => InstanceKind::YesSharedImage {
                    dim: dim.unwrap_or(2),
                },
                KindArg::NoConstantPair => InstanceKind::NoConstantPair {
                    angle: angle.unwrap_or(std::f64::consts::FRAC_PI_2),
                },
                KindArg::NoDiagPair => InstanceKind::NoDiagPair {
                    delta: delta.ok_or_else(|| {
                        Failure::Usage("no-diag-pair requires --delta".into())
                    })?,
                },
            };
            let instance = generate_instance(kind, run.seed)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            emit(out, &instance)
        }
        Command::Validate { file } => {
            let report = validate_file(&file)?;
            println!("{report}");
            Ok(())
        }
        Command::Separate { file } => {
            let g = load_instance(&file)?;
            match solve_image_separation(g.q0(), g.q1(), &run.separation()) {
                Ok(res) => emit(out, &res),
                Err(Error::NoConvergence(partial)) => {
                    emit(out, partial.as_ref())?;
                    Err(Failure::NoConvergence(format!(
                        "gap {:.3e} above tolerance {:.3e} after {} iterations",
                        partial.gap, run.tol, partial.iterations
                    )))
                }
                Err(e) => Err(Failure::BadInstance(e.to_string())),
            }
        }
        Command::Value { file } => {
            let g = load_instance(&file)?;
            match game_value(&g, &run.separation()) {
                Ok(report) => emit(out, &report),
                Err(Error::NoConvergence(partial)) => {
                    emit(out, partial.as_ref())?;
                    Err(Failure::NoConvergence(format!(
                        "gap {:.3e} above tolerance {:.3e} after {} iterations",
                        partial.gap, run.tol, partial.iterations
                    )))
                }
                Err(e) => Err(Failure::BadInstance(e.to_string())),
            }
        }
        Command::Play { file } => {
            let g = load_instance(&file)?;
            let report = game_value(&g, &run.separation()).map_err(|e| match e {
                Error::NoConvergence(_) => {
                    Failure::NoConvergence("equilibrium solve did not converge".into())
                }
                other => Failure::BadInstance(other.to_string()),
            })?;
            let exact = acceptance_probability(&g, &report.eq_yes, &report.eq_no)
                .map_err(|e| Failure::BadInstance(e.to_string()))?;
            let (accepts, frequency) = simulate_rounds(
                &g,
                &report.eq_yes,
                &report.eq_no,
                run.rounds,
                run.seed,
            )
            .map_err(|e| Failure::BadInstance(e.to_string()))?;
            let play = PlayReport {
                rounds: run.rounds,
                accepts,
                frequency,
                exact,
            };
            emit(out, &play)
        }
        Command::Repeat { file } => {
            let g = load_instance(&file)?;
            match repetition_report(&g, run.k, run.mode, &run.separation()) {
                Ok(report) => emit(out, &report),
                Err(Error::NoConvergence(partial)) => {
                    emit(out, partial.as_ref())?;
                    Err(Failure::NoConvergence(
                        "equilibrium solve did not converge".into(),
                    ))
                }
                Err(e) => Err(Failure::BadInstance(e.to_string())),
            }
        }
        Command::Selftest => {
            let report = selftest::run_all(run.seed);
            print!("{}", report.render());
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Usage("selftest failures listed above".into()))
            }
        }
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct PlayReport {
    rounds: u64,
    accepts: u64,
    frequency: f64,
    exact: f64,
}

fn load_instance(path: &Path) -> Result<GameInstance, Failure> {
    read_json_file::<GameInstance>(path).map_err(|e| Failure::BadInstance(e.to_string()))
}

fn validate_file(path: &Path) -> Result<String, Failure> {
    // Instance files carry a "q0" key; bare channel files carry "kraus".
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::BadInstance(format!("{}: {e}", path.display())))?;
    let probe: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::BadInstance(format!("not valid JSON: {e}")))?;
    if probe.get("q0").is_some() {
        let g: GameInstance = crate::serialize::from_json_str(&text)
            .map_err(|e| Failure::BadInstance(e.to_string()))?;
        Ok(format!(
            "valid instance: {}→{} channels, label {:?}, epsilon {:.6}",
            g.dim_in(),
            g.dim_out(),
            g.label(),
            g.epsilon()
        ))
    } else {
        let ch: Channel = crate::serialize::from_json_str(&text)
            .map_err(|e| Failure::BadInstance(e.to_string()))?;
        Ok(format!(
            "valid channel: {}→{}, {} Kraus operators",
            ch.dim_in(),
            ch.dim_out(),
            ch.kraus().len()
        ))
    }
}

fn emit<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    match out {
        Some(path) => {
            write_json_file(path, value).map_err(|e| Failure::BadInstance(e.to_string()))
        }
        None => {
            let text = to_json_string(value).map_err(|e| Failure::BadInstance(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}
