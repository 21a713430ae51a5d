use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{CoverageConfig, EstimateConfig, ListSpec, MomentsConfig, Settings, SweepConfig, VerifyConfig};
use crate::{coverage, estimate, moments, sweep, verify};

#[derive(Debug, Parser)]
#[command(name = "sincd", version, about = "Discrete sinc state estimation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample rounds of shots over a grid of t and run the estimators on each.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the closed-form identities of the state over random t.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Random t values per qubit count.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, hide = true)]
        perturb_pmf: Option<f64>,
    },
    /// Compare theoretical and Monte Carlo moments of the ratio estimators.
    Moments {
        #[command(flatten)]
        common: CommonArgs,
        /// Monte Carlo rounds per t value.
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Empirical coverage of the delta-method and Beta credible intervals.
    Coverage {
        #[command(flatten)]
        common: CommonArgs,
        /// Repetitions per t value.
        #[arg(long)]
        reps: Option<usize>,
        /// Shot counts for the radius comparison table (comma list).
        #[arg(long)]
        radius_shots: Option<String>,
    },
    /// Run the estimators on a counts JSON file.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        /// Counts JSON file to estimate from.
        #[arg(long)]
        counts: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Qubit count (verify also takes ranges such as 1..8).
    #[arg(long)]
    pub n: Option<String>,
    /// Encoded values: comma list or start:stop:step.
    #[arg(long)]
    pub t: Option<String>,
    /// Total shots per t value.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Shots per estimation round.
    #[arg(long)]
    pub round_size: Option<u64>,
    /// Base seed for the shot sampler.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Readout noise level in [0, 1].
    #[arg(long)]
    pub noise: Option<f64>,
    /// Comma list of MLE, RBE, COIN, INTERP, IDENTITY.
    #[arg(long)]
    pub methods: Option<String>,
    /// Interval miscoverage level, e.g. 0.05 for 95% intervals.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML or JSON file with the same field names as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    fn settings(&self, extra: Settings) -> anyhow::Result<Settings> {
        let base = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            n: self.n.clone().map(ListSpec::Text),
            t: self.t.clone().map(ListSpec::Text),
            shots: self.shots,
            round_size: self.round_size,
            seed: self.seed,
            noise: self.noise,
            methods: self.methods.clone().map(ListSpec::Text),
            alpha: self.alpha,
            out: self.out.clone(),
            ..extra
        };
        Ok(base.overlay(flags))
    }
}

const DEFAULT_OUT: &str = "results";

fn out_dir(settings: &Settings) -> anyhow::Result<PathBuf> {
    let dir = settings.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sweep { common } => {
            let settings = common.settings(Settings::default())?;
            let config = SweepConfig::from_settings(&settings)?;
            let dir = out_dir(&settings)?;
            let output = sweep::run_sweep(&config)?;
            sweep::write_csv(&output.rows, create(&dir.join("sweep.csv"))?)?;
            write_json(&dir.join("sweep_summary.json"), &output.summary)?;
            for (method, s) in &output.summary.methods {
                println!(
                    "{method:<8} estimates={:<6} failures={:<4} mean_abs_err={}",
                    s.estimates,
                    s.failures,
                    s.mean_abs_err.map_or("-".into(), |e| format!("{e:.6}"))
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            common,
            samples,
            perturb_pmf,
        } => {
            let settings = common.settings(Settings {
                samples,
                ..Settings::default()
            })?;
            let config = VerifyConfig::from_settings(&settings)?;
            let dir = out_dir(&settings)?;
            let report = verify::run_verify(&config, perturb_pmf)?;
            write_json(&dir.join("verify.json"), &report)?;
            for row in &report.per_n {
                println!(
                    "n={:<2} samples={:<5} max_residual={:.3e} ({})",
                    row.n,
                    row.samples,
                    row.max_residual,
                    row.worst_identity.as_deref().unwrap_or("-")
                );
            }
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in report.failures.iter().take(20) {
                    eprintln!(
                        "identity {} failed: n={} t={} residual={:.3e}",
                        f.identity, f.n, f.t, f.residual
                    );
                }
                eprintln!(
                    "{} identity checks exceeded {:e}",
                    report.failures.len(),
                    report.threshold
                );
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Moments { common, rounds } => {
            let settings = common.settings(Settings {
                rounds,
                ..Settings::default()
            })?;
            let config = MomentsConfig::from_settings(&settings)?;
            let dir = out_dir(&settings)?;
            let rows = moments::run_moments(&config)?;
            moments::write_csv(&rows, create(&dir.join("moments.csv"))?)?;
            for r in &rows {
                println!(
                    "t={:<6} E[r] theory={:.5} mc={:.5}  Var[r] theory={:.3e} mc={:.3e}",
                    r.t, r.ratio_mean_theory, r.ratio_mean_mc, r.ratio_var_theory, r.ratio_var_mc
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Coverage {
            common,
            reps,
            radius_shots,
        } => {
            let settings = common.settings(Settings {
                reps,
                radius_shots: radius_shots.map(ListSpec::Text),
                ..Settings::default()
            })?;
            let config = CoverageConfig::from_settings(&settings)?;
            let dir = out_dir(&settings)?;
            let report = coverage::run_coverage(&config)?;
            write_json(&dir.join("coverage.json"), &report)?;
            for r in &report.coverage {
                println!(
                    "t={:<6} delta={:.3} beta={:.3} (reps={}, unresolved={})",
                    r.t, r.delta_coverage, r.beta_coverage, r.reps, r.unresolved
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Estimate { common, counts } => {
            let settings = common.settings(Settings {
                counts,
                ..Settings::default()
            })?;
            let config = EstimateConfig::from_settings(&settings)?;
            let output = estimate::run_estimate(&config)?;
            match &settings.out {
                Some(_) => write_json(&out_dir(&settings)?.join("estimate.json"), &output)?,
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    serde_json::to_writer_pretty(&mut lock, &output)?;
                    writeln!(lock)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
