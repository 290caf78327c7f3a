//! Command-line front end: every run resolves its options into a [`Job`],
//! executes it and records a [`RunManifest`] that `replay` can repeat.

mod args;
mod job;
mod manifest;
mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use binsc_core::chimera::HardwareMask;
use binsc_core::data::SyntheticConfig;
use binsc_core::learn::SolverConfig;
use binsc_core::regress::{FitConfig, PretrainSource};
use binsc_core::{ErrorKind, SparsityPenalty};
use clap::Parser;
use serde::de::DeserializeOwned;

use args::{Cli, Command, LearnFlags, PretrainKind, SolverKind};
pub use job::{EvalConfig, Job, ScalingConfig, SplitConfig, SweepConfig};
pub use manifest::RunManifest;

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "BINSC_THREADS";

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(binsc_core::Error),
}

impl From<binsc_core::Error> for CliError {
    fn from(e: binsc_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            match e.kind() {
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            }
        }
    }
}

fn configure_threads(flag: Option<usize>) -> CliResult<()> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("thread count must be at least 1".into()));
        }
        // Fails only if a pool already exists in this process; keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    configure_threads(cli.threads)?;
    let job = match cli.command {
        Command::Replay(args) => {
            if cli.config.is_some() {
                return Err(CliError::Usage("replay takes no --config".into()));
            }
            RunManifest::read(&args.manifest)?.job
        }
        command => resolve(command, cli.config.as_deref())?,
    };
    let start = Instant::now();
    job.execute()?;
    RunManifest::new(job.clone(), start.elapsed().as_secs_f64()).write(&job.manifest_path())?;
    Ok(())
}

fn base<T: DeserializeOwned + Default>(config: Option<&Path>) -> CliResult<T> {
    match config {
        None => Ok(T::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| binsc_core::Error::Io {
                path: path.to_path_buf(),
                source: e,
            })?;
            Ok(serde_json::from_str(&text).map_err(binsc_core::Error::from)?)
        }
    }
}

/// Absolute form of a path, so a manifest replays from any directory.
fn abs(path: PathBuf) -> CliResult<PathBuf> {
    std::path::absolute(&path).map_err(|e| CliError::Core(binsc_core::Error::Io { path, source: e }))
}

fn no_config(config: Option<&Path>, command: &str) -> CliResult<()> {
    match config {
        Some(_) => Err(CliError::Usage(format!("{command} has no configurable options"))),
        None => Ok(()),
    }
}

fn resolve(command: Command, config: Option<&Path>) -> CliResult<Job> {
    Ok(match command {
        Command::GenData(a) => {
            let mut c: SyntheticConfig = base(config)?;
            set(&mut c.n_samples, a.n_samples);
            set(&mut c.d, a.d);
            set(&mut c.latent_dim, a.latent_dim);
            set(&mut c.noise_sigma, a.noise_sigma);
            set(&mut c.target_noise_sigma, a.target_noise_sigma);
            set(&mut c.seed, a.seed);
            Job::GenData {
                out: abs(a.out)?,
                config: c,
            }
        }
        Command::Split(a) => {
            let mut c: SplitConfig = base(config)?;
            set(&mut c.train_fraction, a.train_fraction);
            set(&mut c.seed, a.seed);
            Job::Split {
                input: abs(a.input)?,
                train_out: abs(a.train_out)?,
                test_out: abs(a.test_out)?,
                config: c,
            }
        }
        Command::Fit(a) => {
            let mut c: FitConfig = base(config)?;
            set(&mut c.n_q, a.nq);
            apply_learn_flags(&mut c, a.learn)?;
            Job::Fit {
                train: abs(a.train)?,
                test: abs(a.test)?,
                out: abs(a.out)?,
                config: c,
            }
        }
        Command::Predict(a) => {
            no_config(config, "predict")?;
            Job::Predict {
                model: abs(a.model)?,
                input: abs(a.input)?,
                out: abs(a.out)?,
            }
        }
        Command::Eval(a) => {
            let mut c: EvalConfig = base(config)?;
            set(&mut c.bins, a.bins);
            Job::Eval {
                predictions: abs(a.predictions)?,
                truth: abs(a.truth)?,
                out: abs(a.out)?,
                histogram: a.histogram.map(abs).transpose()?,
                config: c,
            }
        }
        Command::Sweep(a) => {
            let mut c: SweepConfig = base(config)?;
            set(&mut c.nq, a.nq);
            apply_learn_flags(&mut c.fit, a.learn)?;
            Job::Sweep {
                train: abs(a.train)?,
                test: abs(a.test)?,
                out: abs(a.out)?,
                config: c,
            }
        }
        Command::FitScaling(a) => {
            let mut c: ScalingConfig = base(config)?;
            set(&mut c.column, a.column);
            set(&mut c.exclude_nq, a.exclude_nq);
            Job::FitScaling {
                input: abs(a.input)?,
                out: abs(a.out)?,
                curve: a.curve.map(abs).transpose()?,
                config: c,
            }
        }
        Command::Replay(_) => unreachable!("handled by the caller"),
    })
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn apply_learn_flags(c: &mut FitConfig, f: LearnFlags) -> CliResult<()> {
    if let Some(kind) = f.solver {
        let same = matches!(
            (kind, &c.learn.solver),
            (SolverKind::Exhaustive, SolverConfig::Exhaustive)
                | (SolverKind::Sa, SolverConfig::Sa { .. })
                | (SolverKind::EmbeddedSa, SolverConfig::EmbeddedSa { .. })
        );
        if !same {
            c.learn.solver = match kind {
                SolverKind::Exhaustive => SolverConfig::Exhaustive,
                SolverKind::Sa => SolverConfig::sa(),
                SolverKind::EmbeddedSa => SolverConfig::embedded_sa(),
            };
        }
    }
    if let Some(p) = f.pretrain {
        c.pretrain_source = match p {
            PretrainKind::Test => PretrainSource::TestOnly,
            PretrainKind::Combined => PretrainSource::Combined,
            PretrainKind::Off => PretrainSource::Off,
        };
    }
    if let Some(t) = f.target_sparsity {
        c.target_sparsity = Some(t);
    }
    if let Some(l) = f.lambda {
        c.learn.lambda = SparsityPenalty::new(l)?;
        c.target_sparsity = None;
    }
    set(&mut c.learn.seed, f.seed);
    set(&mut c.learn.max_outer_iters, f.max_iters);
    set(&mut c.learn.batch_size, f.batch_size);
    set(&mut c.learn.eta_initial, f.eta);
    set(&mut c.probe_size, f.probe_size);
    match &mut c.learn.solver {
        SolverConfig::Exhaustive => {
            if f.sweeps.is_some() || f.reads.is_some() || f.mask.is_some() {
                return Err(CliError::Usage(
                    "--sweeps, --reads and --mask need an annealing solver".into(),
                ));
            }
        }
        SolverConfig::Sa { sweeps, reads, .. } => {
            if f.mask.is_some() {
                return Err(CliError::Usage("--mask needs --solver embedded-sa".into()));
            }
            set(sweeps, f.sweeps);
            set(reads, f.reads);
        }
        SolverConfig::EmbeddedSa {
            sweeps, reads, mask, ..
        } => {
            set(sweeps, f.sweeps);
            set(reads, f.reads);
            if let Some(path) = f.mask {
                *mask = HardwareMask::load(&path)?;
            }
        }
    }
    c.learn.validate()?;
    Ok(())
}
