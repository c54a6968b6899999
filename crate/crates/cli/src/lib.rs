//! Configuration, commands and report assembly behind the `horoflow` binary.
//!
//! Configuration is a flat `key = value` text format. The same parser reads
//! config files, command-line overrides and the echo written into every
//! report, so an echo always re-parses to the configuration that produced it.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use horoflow::orbit::fineness_scan;
use horoflow::report::{Cell, Table};
use horoflow::schottky::{circle_system, index_sequence, SurfaceParameter};
use horoflow::suites::{
    busemann_table, circles_table, construction_table, limit_sequence, run_suite,
    with_parallelism, Suite, SuiteConfig,
};
use horoflow::tolerances::Tolerances;
use horoflow::words::WordBudget;
use horoflow::{Error, Result};
use serde::Serialize;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "HOROFLOW_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "horoflow-out";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta: SurfaceParameter,
    pub generator_count: usize,
    pub word_alphabet: usize,
    pub word_max_length: usize,
    pub fineness_alphabet: usize,
    pub fineness_max_length: usize,
    pub t_grid: Vec<f64>,
    pub tolerances: Tolerances,
    pub precision_bits: Option<usize>,
    pub output_dir: PathBuf,
    pub parallel: bool,
}

impl RunConfig {
    /// Defaults for `δ = 3`, writing to `output_dir`.
    pub fn with_output_dir(output_dir: PathBuf) -> Self {
        let suite = SuiteConfig::new(SurfaceParameter::new(3.0).expect("3 > 1"));
        Self {
            delta: suite.delta,
            generator_count: suite.generator_count,
            word_alphabet: suite.word_alphabet,
            word_max_length: suite.word_max_length,
            fineness_alphabet: suite.fineness_alphabet,
            fineness_max_length: suite.fineness_max_length,
            t_grid: suite.t_grid,
            tolerances: suite.tolerances,
            precision_bits: None,
            output_dir,
            parallel: false,
        }
    }

    /// Defaults with the output directory taken from [`OUTPUT_DIR_ENV`].
    pub fn from_env() -> Self {
        let dir = std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR), PathBuf::from);
        Self::with_output_dir(dir)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "delta" => self.delta = value.parse()?,
            "generator_count" | "count" => self.generator_count = parse_positive(key, value)?,
            "word_alphabet" => self.word_alphabet = parse_positive(key, value)?,
            "word_max_length" => self.word_max_length = parse_positive(key, value)?,
            "fineness_alphabet" => self.fineness_alphabet = parse_positive(key, value)?,
            "fineness_max_length" => self.fineness_max_length = parse_positive(key, value)?,
            "t_grid" => self.t_grid = parse_grid(value)?,
            "precision_bits" => {
                self.precision_bits = match value {
                    "" | "none" => None,
                    v => Some(parse_positive(key, v)?),
                }
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "parallel" => {
                self.parallel = value
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("parallel must be true or false, got {value:?}")))?
            }
            k => match k.strip_prefix("tol.") {
                Some(name) => self.tolerances.set(name, parse_real(key, value)?)?,
                None => return Err(Error::InvalidParameter(format!("unknown config key {key:?}"))),
            },
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: expected key = value, got {raw:?}", lineno + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&fs::read_to_string(path)?)
    }

    /// Cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        if self.word_alphabet > self.generator_count {
            return Err(Error::InvalidParameter(format!(
                "word_alphabet {} exceeds generator_count {}",
                self.word_alphabet, self.generator_count
            )));
        }
        if self.t_grid.is_empty() || self.t_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("t_grid must be non-empty and sorted".into()));
        }
        Ok(())
    }

    /// Every setting as `key = value` lines in a fixed order.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let grid: Vec<String> = self.t_grid.iter().map(f64::to_string).collect();
        let bits = self.precision_bits.map_or_else(|| "none".to_owned(), |b| b.to_string());
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "generator_count = {}", self.generator_count);
        let _ = writeln!(s, "word_alphabet = {}", self.word_alphabet);
        let _ = writeln!(s, "word_max_length = {}", self.word_max_length);
        let _ = writeln!(s, "fineness_alphabet = {}", self.fineness_alphabet);
        let _ = writeln!(s, "fineness_max_length = {}", self.fineness_max_length);
        let _ = writeln!(s, "t_grid = {}", grid.join(","));
        let _ = writeln!(s, "precision_bits = {bits}");
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        let _ = writeln!(s, "parallel = {}", self.parallel);
        for (k, v) in self.tolerances.iter() {
            let _ = writeln!(s, "tol.{k} = {v}");
        }
        s
    }

    pub fn suite_config(&self) -> SuiteConfig {
        let mut c = SuiteConfig::new(self.delta);
        c.generator_count = self.generator_count;
        c.word_alphabet = self.word_alphabet;
        c.word_max_length = self.word_max_length;
        c.fineness_alphabet = self.fineness_alphabet;
        c.fineness_max_length = self.fineness_max_length;
        c.t_grid = self.t_grid.clone();
        c.tolerances = self.tolerances.clone();
        c.precision_bits = self.precision_bits;
        c.budget = WordBudget::default();
        c
    }
}

fn parse_positive(key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::InvalidParameter(format!("{key} must be a positive integer, got {value:?}"))),
    }
}

fn parse_real(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("{key} must be a real number, got {value:?}")))
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (parse_real("t_grid", a)?, parse_real("t_grid", b)?, parse_real("t_grid", step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::InvalidParameter(format!("bad range {text:?}: need start ≤ stop and step > 0")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|k| a + step * k as f64).collect()
        }
        [list] => list
            .split(',')
            .map(|v| parse_real("t_grid", v.trim()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::InvalidParameter(format!("cannot parse time grid {text:?}"))),
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(format!("time grid {text:?} must be sorted")));
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The suite stopped with an error before reaching a verdict.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub verdict: Verdict,
    pub certificate: Option<PathBuf>,
    pub tables: Vec<PathBuf>,
    pub failed_checks: usize,
    pub error: Option<String>,
    pub timing_ms: f64,
}

/// Everything one command produced.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub command: String,
    pub outcomes: Vec<SuiteOutcome>,
    pub artifacts: Vec<PathBuf>,
    pub config_echo: String,
    pub timing_ms: f64,
}

impl ReportBundle {
    fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_owned(),
            outcomes: Vec::new(),
            artifacts: Vec::new(),
            config_echo: config.echo(),
            timing_ms: 0.0,
        }
    }

    /// False when any suite failed or stopped with an error.
    pub fn success(&self) -> bool {
        self.outcomes.iter().all(|o| o.verdict == Verdict::Pass)
    }

    /// Writes `report.json` and the config echo next to the artifacts.
    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        let echo = dir.join(format!("{}.config", self.command));
        fs::write(&echo, &self.config_echo)?;
        self.artifacts.push(echo);
        let path = dir.join(format!("{}.report.json", self.command));
        fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }

    /// One line per suite plus the artifact list.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            let _ = write!(s, "{:<10} {:?}", o.suite, o.verdict);
            if o.failed_checks > 0 {
                let _ = write!(s, " ({} failed checks)", o.failed_checks);
            }
            if let Some(e) = &o.error {
                let _ = write!(s, " error: {e}");
            }
            let _ = writeln!(s, " [{:.0} ms]", o.timing_ms);
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "wrote {}", a.display());
        }
        s
    }
}

fn write_table(dir: &Path, prefix: &str, table: &Table) -> Result<PathBuf> {
    let path = dir.join(format!("{prefix}_{}.csv", table.name));
    table.write_csv(fs::File::create(&path)?)?;
    Ok(path)
}

fn prepare(config: &RunConfig) -> Result<()> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    Ok(())
}

/// Index sequence, generators and isometry circles for `generator_count` indices.
pub fn cmd_build(config: &RunConfig) -> Result<ReportBundle> {
    prepare(config)?;
    let start = Instant::now();
    let mut bundle = ReportBundle::new("build", config);
    let sequence = index_sequence(&config.delta, config.generator_count)?;
    let dir = &config.output_dir;
    bundle.artifacts.push(write_table(dir, "build", &construction_table(&sequence))?);
    bundle.artifacts.push(write_table(dir, "build", &circles_table(&circle_system(&sequence)))?);
    bundle.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(bundle)
}

/// Runs the selected suites in order, writing one certificate and the CSV
/// tables of each. Suite errors are recorded as inconclusive verdicts.
pub fn cmd_verify(config: &RunConfig, suites: &[Suite]) -> Result<ReportBundle> {
    prepare(config)?;
    let start = Instant::now();
    let mut bundle = ReportBundle::new("verify", config);
    let suite_config = config.suite_config();
    for &suite in suites {
        let result = with_parallelism(config.parallel, || run_suite(suite, &suite_config));
        let outcome = match result {
            Ok(report) => {
                let dir = &config.output_dir;
                let cert_path = dir.join(format!("{suite}.json"));
                fs::write(&cert_path, report.certificate.to_json()?)?;
                let tables = report
                    .tables
                    .iter()
                    .map(|t| write_table(dir, suite.name(), t))
                    .collect::<Result<Vec<_>>>()?;
                SuiteOutcome {
                    suite: suite.name().to_owned(),
                    verdict: if report.passed() { Verdict::Pass } else { Verdict::Fail },
                    certificate: Some(cert_path),
                    tables,
                    failed_checks: report.certificate.failures().count(),
                    error: None,
                    timing_ms: report.certificate.timing_ms,
                }
            }
            Err(e) => SuiteOutcome {
                suite: suite.name().to_owned(),
                verdict: Verdict::Inconclusive,
                certificate: None,
                tables: Vec::new(),
                failed_checks: 0,
                error: Some(e.to_string()),
                timing_ms: 0.0,
            },
        };
        bundle.outcomes.push(outcome);
    }
    bundle.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(bundle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Fineness,
    Busemann,
    Circles,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fineness" => Ok(PlotKind::Fineness),
            "busemann" => Ok(PlotKind::Busemann),
            "circles" => Ok(PlotKind::Circles),
            _ => Err(Error::InvalidParameter(format!("unknown plot kind {s:?}"))),
        }
    }
}

/// Writes one plot-ready CSV and returns its path.
pub fn cmd_plotdata(config: &RunConfig, kind: PlotKind) -> Result<PathBuf> {
    prepare(config)?;
    let delta = &config.delta;
    let table = match kind {
        PlotKind::Fineness => {
            let estimates = with_parallelism(config.parallel, || {
                fineness_scan(
                    &config.t_grid,
                    delta,
                    config.fineness_alphabet,
                    config.fineness_max_length,
                    &WordBudget::default(),
                )
            })?;
            let mut t = Table::new("fineness", &["t", "bound", "empirical"]);
            for e in estimates {
                t.push(vec![Cell::from(e.t), e.lower_bound.into(), e.empirical.into()]);
            }
            t
        }
        PlotKind::Busemann => busemann_table(&limit_sequence(delta, config.generator_count)?)?,
        PlotKind::Circles => circles_table(&circle_system(&index_sequence(delta, config.generator_count)?)),
    };
    write_table(&config.output_dir, "plot", &table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> RunConfig {
        RunConfig::with_output_dir(PathBuf::from("out"))
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0:10:0.5").unwrap().len(), 21);
        assert_eq!(parse_grid("0:10:1").unwrap(), (0..=10).map(f64::from).collect::<Vec<_>>());
        assert_eq!(parse_grid("1, 2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
        assert!(parse_grid("3,1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut c = config();
        c.apply_text("delta = 1.01\n# comment\nt_grid = 0:2:0.1\ntol.detect_time = 0.05\nprecision_bits = 256\nparallel = true")
            .unwrap();
        let mut back = config();
        back.apply_text(&c.echo()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.delta.ratio(), (101, 100));
        assert_eq!(back.tolerances.get("detect_time"), 0.05);
    }

    #[test]
    fn rejects_bad_settings() {
        let mut c = config();
        assert!(c.set("delta", "1").is_err());
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("tol.bogus", "1").is_err());
        assert!(c.set("tol.detect_time", "-1").is_err());
        assert!(c.set("generator_count", "0").is_err());
        assert!(c.apply_text("delta 3").is_err());
        c.set("word_alphabet", "30").unwrap();
        assert!(c.validate().is_err());
    }
}
