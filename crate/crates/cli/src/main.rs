mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{ExperimentConfig, ExperimentKind, ModelKind, RunConfig};
use tsolr::simgen::Preset;
use tsolr::LagMode;

#[derive(Parser)]
#[command(name = "tsolr", version, about = "Seasonal ordinal time-series models for daily AQI categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Read a CSV, categorize it and store the series as JSON.
    Ingest {
        /// `date,aqi` or `date,category` CSV.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Frequencies, transition matrices, month-by-category intensity and rate evolution.
    Describe {
        #[arg(long)]
        series: Option<PathBuf>,
        /// Largest transition lag to export.
        #[arg(long, default_value_t = 1)]
        lags: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fit a model on the training window and save it.
    Fit {
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        train_start: Option<NaiveDate>,
        #[arg(long)]
        train_end: Option<NaiveDate>,
        #[command(flatten)]
        common: Common,
    },
    /// One-step forecasts over a test window, from a saved model or a fresh fit.
    Forecast {
        #[arg(long)]
        series: Option<PathBuf>,
        /// Saved model JSON; without it the model is fitted first.
        #[arg(long)]
        model_file: Option<PathBuf>,
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        train_start: Option<NaiveDate>,
        #[arg(long)]
        train_end: Option<NaiveDate>,
        #[arg(long)]
        test_start: Option<NaiveDate>,
        #[arg(long)]
        test_end: Option<NaiveDate>,
        #[arg(long, value_enum)]
        lag_mode: Option<LagModeArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Auto-association measures for lags 0..=max-lag.
    Assoc {
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        max_lag: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Simulation experiments: parameter recovery or forecast comparison.
    Experiment {
        #[arg(long, value_enum)]
        kind: Option<ExperimentKind>,
        #[arg(long, value_enum)]
        preset: Option<PresetArg>,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        replicates: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LagModeArg {
    Observed,
    Recursive,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    TrigThree,
    TrigFour,
    IndicatorThree,
    IndicatorFour,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::TrigThree => Preset::TrigThree,
            PresetArg::TrigFour => Preset::TrigFour,
            PresetArg::IndicatorThree => Preset::IndicatorThree,
            PresetArg::IndicatorFour => Preset::IndicatorFour,
        }
    }
}

fn merge_common(common: &Common) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    Ok(cfg)
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest { input, common } => {
            let mut cfg = merge_common(&common)?;
            cfg.series = Some(input);
            commands::ingest(&cfg, &common.out)
        }
        Command::Describe { series, lags, common } => {
            let mut cfg = merge_common(&common)?;
            set(&mut cfg.series, series);
            commands::describe(&cfg, lags, &common.out)
        }
        Command::Fit { series, model, order, train_start, train_end, common } => {
            let mut cfg = merge_common(&common)?;
            set(&mut cfg.series, series);
            set(&mut cfg.model, model);
            set(&mut cfg.order, order);
            set(&mut cfg.train_start, train_start);
            set(&mut cfg.train_end, train_end);
            commands::fit(&cfg, &common.out)
        }
        Command::Forecast {
            series,
            model_file,
            model,
            order,
            train_start,
            train_end,
            test_start,
            test_end,
            lag_mode,
            common,
        } => {
            let mut cfg = merge_common(&common)?;
            set(&mut cfg.series, series);
            set(&mut cfg.model_file, model_file);
            set(&mut cfg.model, model);
            set(&mut cfg.order, order);
            set(&mut cfg.train_start, train_start);
            set(&mut cfg.train_end, train_end);
            set(&mut cfg.test_start, test_start);
            set(&mut cfg.test_end, test_end);
            if let Some(mode) = lag_mode {
                cfg.lag_mode = match mode {
                    LagModeArg::Observed => LagMode::Observed,
                    LagModeArg::Recursive => LagMode::Recursive,
                };
            }
            commands::forecast(&cfg, &common.out)
        }
        Command::Assoc { series, max_lag, common } => {
            let mut cfg = merge_common(&common)?;
            set(&mut cfg.series, series);
            set(&mut cfg.max_lag, max_lag);
            commands::assoc(&cfg, &common.out)
        }
        Command::Experiment { kind, preset, sizes, replicates, common } => {
            let mut cfg = merge_common(&common)?;
            let mut exp = cfg.experiment.take();
            if exp.is_none() {
                let (Some(kind), Some(preset)) = (kind, preset) else {
                    anyhow::bail!("pass --kind and --preset, or an \"experiment\" section in the config");
                };
                exp = Some(ExperimentConfig {
                    kind,
                    preset: preset.into(),
                    sizes: vec![500, 1000, 10000],
                    replicates: 1000,
                    truth: None,
                });
            }
            let mut exp = exp.expect("set above");
            if let Some(k) = kind {
                exp.kind = k;
            }
            if let Some(p) = preset {
                exp.preset = p.into();
            }
            if let Some(s) = sizes {
                exp.sizes = s;
            }
            if let Some(r) = replicates {
                exp.replicates = r;
            }
            cfg.experiment = Some(exp);
            commands::experiment(&cfg, &common.out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
