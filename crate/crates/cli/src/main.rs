use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horoflow::suites::Suite;
use horoflow_cli::{cmd_build, cmd_plotdata, cmd_verify, PlotKind, RunConfig, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "horoflow", version, about = "Schottky construction and horocyclic return-time checks")]
struct Cli {
    #[command(flatten)]
    settings: Settings,

    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand; each overrides the config file.
#[derive(Args)]
struct Settings {
    /// Flat `key = value` config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Surface parameter δ > 1
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Number of sequence indices
    #[arg(long, global = true)]
    count: Option<String>,
    #[arg(long, global = true)]
    word_alphabet: Option<String>,
    #[arg(long, global = true)]
    word_max_length: Option<String>,
    #[arg(long, global = true)]
    fineness_alphabet: Option<String>,
    #[arg(long, global = true)]
    fineness_max_length: Option<String>,
    /// `start:stop:step` or a comma-separated list
    #[arg(long, global = true, allow_hyphen_values = true)]
    t_grid: Option<String>,
    /// Mantissa bits for the extended-precision paths
    #[arg(long, global = true)]
    precision_bits: Option<String>,
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    /// Tolerance override `name=value`; repeatable
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
    /// Enable the internal parallelism of each suite
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build generators and circles and write the construction table
    Build,
    /// Run verification suites and write certificates
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
    /// Write plot-ready CSV data
    Plotdata {
        #[arg(long, value_enum)]
        kind: KindArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Disjoint,
    Pingpong,
    Irregular,
    Fineness,
    Times,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Disjoint => vec![Suite::Disjoint],
            SuiteArg::Pingpong => vec![Suite::Pingpong],
            SuiteArg::Irregular => vec![Suite::Irregular],
            SuiteArg::Fineness => vec![Suite::Fineness],
            SuiteArg::Times => vec![Suite::Times],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Fineness,
    Busemann,
    Circles,
}

impl From<KindArg> for PlotKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Fineness => PlotKind::Fineness,
            KindArg::Busemann => PlotKind::Busemann,
            KindArg::Circles => PlotKind::Circles,
        }
    }
}

fn resolve(s: &Settings) -> horoflow::Result<RunConfig> {
    let mut config = RunConfig::from_env();
    if let Some(path) = &s.config {
        config.apply_file(path)?;
    }
    let pairs = [
        ("delta", &s.delta),
        ("generator_count", &s.count),
        ("word_alphabet", &s.word_alphabet),
        ("word_max_length", &s.word_max_length),
        ("fineness_alphabet", &s.fineness_alphabet),
        ("fineness_max_length", &s.fineness_max_length),
        ("t_grid", &s.t_grid),
        ("precision_bits", &s.precision_bits),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    for t in &s.tolerances {
        let (name, value) = t.split_once('=').ok_or_else(|| {
            horoflow::Error::InvalidParameter(format!("--tol expects NAME=VALUE, got {t:?}"))
        })?;
        config.set(&format!("tol.{name}"), value)?;
    }
    if let Some(dir) = &s.output_dir {
        config.output_dir = dir.clone();
    }
    config.parallel |= s.parallel;
    Ok(config)
}

fn run(cli: Cli) -> horoflow::Result<bool> {
    let config = resolve(&cli.settings)?;
    match cli.command {
        Command::Build => {
            let mut bundle = cmd_build(&config)?;
            let report = bundle.write(&config.output_dir)?;
            print!("{}", bundle.summary());
            println!("wrote {}", report.display());
            Ok(true)
        }
        Command::Verify { suite } => {
            let mut bundle = cmd_verify(&config, &suite.suites())?;
            let report = bundle.write(&config.output_dir)?;
            print!("{}", bundle.summary());
            println!("wrote {}", report.display());
            Ok(bundle.success())
        }
        Command::Plotdata { kind } => {
            let path = cmd_plotdata(&config, kind.into())?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
