//! Flag and config-file parsing into an [`ExperimentSpec`].

use std::collections::HashMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use bcgc::optimizer::{RoundingConfig, SubgradientConfig};
use bcgc::simulator::{SchemeKind, SchemeSettings, SweepAxis};
use bcgc::{ShiftedExponential, SystemConfig};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, Origin};

#[derive(Debug, Parser)]
#[command(
    name = "bcgc",
    version,
    about = "Block-coordinate gradient coding: allocation solver and straggler simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize the block allocation and write `level,x_optimal,x_t,x_f`.
    #[command(allow_negative_numbers = true)]
    Solve(Flags),
    /// Expected runtime of each scheme over a range of N or mu.
    #[command(allow_negative_numbers = true)]
    Sweep(Flags),
    /// Coded gradient descent on synthetic least squares.
    #[command(allow_negative_numbers = true)]
    Train(Flags),
    /// Run the numerical cross-checks and report pass/fail.
    #[command(allow_negative_numbers = true)]
    Validate(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Number of workers N.
    #[arg(long)]
    pub workers: Option<i64>,
    /// Number of model coordinates L.
    #[arg(long = "model-size")]
    pub model_size: Option<i64>,
    /// Straggling rate of the shifted exponential.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Minimum cycle time of the shifted exponential.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Number of training samples M.
    #[arg(long = "samples-m")]
    pub samples_m: Option<i64>,
    /// Cycles per coordinate per sample b.
    #[arg(long = "cycles-b")]
    pub cycles_b: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo draws for runtime estimates.
    #[arg(long)]
    pub draws: Option<i64>,
    /// subgradient | closed-t | closed-f | single-block | uniform:<s> (repeatable).
    #[arg(long = "scheme")]
    pub scheme: Vec<String>,
    /// Sweep axis: N or mu.
    #[arg(long)]
    pub axis: Option<String>,
    /// Comma-separated sweep values; `10^x` is accepted.
    #[arg(long)]
    pub values: Option<String>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Subgradient iterations.
    #[arg(long = "solver-iters")]
    pub solver_iters: Option<i64>,
    /// Gradient-descent iterations for `train`.
    #[arg(long = "train-iters")]
    pub train_iters: Option<i64>,
    /// Gradient-descent step size for `train`.
    #[arg(long)]
    pub step: Option<f64>,
    /// Write the relaxed (unrounded) solution in `solve`.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Sweep,
    Train,
    Validate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: CommandKind,
    pub system: SystemConfig,
    pub distribution: ShiftedExponential,
    pub schemes: Vec<SchemeKind>,
    pub settings: SchemeSettings,
    pub seed: u64,
    pub draws: usize,
    pub sweep: Option<SweepSpec>,
    pub train_iters: usize,
    pub step: Option<f64>,
    pub relaxed: bool,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_DRAWS: usize = 10_000;
pub const DEFAULT_TRAIN_ITERS: usize = 50;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Values {
    List(Vec<Number>),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    workers: Option<Spanned<i64>>,
    model_size: Option<Spanned<i64>>,
    mu: Option<Spanned<f64>>,
    t0: Option<Spanned<f64>>,
    samples_m: Option<Spanned<i64>>,
    cycles_b: Option<Spanned<f64>>,
    seed: Option<Spanned<i64>>,
    draws: Option<Spanned<i64>>,
    scheme: Option<Spanned<OneOrMany>>,
    axis: Option<Spanned<String>>,
    values: Option<Spanned<Values>>,
    output: Option<Spanned<String>>,
    solver_iters: Option<Spanned<i64>>,
    train_iters: Option<Spanned<i64>>,
    step: Option<Spanned<f64>>,
    relaxed: Option<Spanned<bool>>,
}

/// A raw value and where it came from.
#[derive(Debug, Clone)]
struct Sourced<T> {
    value: T,
    origin: Origin,
}

struct Merger<'a> {
    path: Option<&'a Path>,
    text: &'a str,
    origins: HashMap<&'static str, Origin>,
}

impl Merger<'_> {
    fn line_of(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())]
            .matches('\n')
            .count()
            + 1
    }

    fn pick<T, U>(
        &mut self,
        name: &'static str,
        flag: Option<T>,
        file: Option<Spanned<U>>,
        convert: impl FnOnce(U) -> T,
    ) -> Option<Sourced<T>> {
        let picked = match (flag, file) {
            (Some(v), _) => Some(Sourced {
                value: v,
                origin: Origin::Flag,
            }),
            (None, Some(s)) => {
                let line = self.line_of(s.span().start);
                Some(Sourced {
                    value: convert(s.into_inner()),
                    origin: Origin::File {
                        path: self.path.map(Path::to_path_buf).unwrap_or_default(),
                        line,
                    },
                })
            }
            (None, None) => None,
        };
        if let Some(p) = &picked {
            self.origins.insert(name, p.origin.clone());
        }
        picked
    }

    fn origin(&self, name: &str) -> Origin {
        self.origins.get(name).cloned().unwrap_or(Origin::Default)
    }
}

fn bad(name: &str, origin: Origin, reason: impl Into<String>) -> CliError {
    CliError::InvalidValue {
        name: name.to_string(),
        reason: reason.into(),
        origin,
    }
}

fn positive(name: &'static str, v: &Sourced<i64>) -> Result<usize, CliError> {
    if v.value < 1 {
        return Err(bad(
            name,
            v.origin.clone(),
            format!("must be a positive integer, got {}", v.value),
        ));
    }
    Ok(v.value as usize)
}

/// Parses `1e-3`, `0.5` or `10^-3.4`.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    let v = match t.strip_prefix("10^") {
        Some(exp) => 10f64.powf(exp.trim().parse().ok()?),
        None => t.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

fn parse_value_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_number(s).ok_or_else(|| format!("`{}` is not a number", s.trim())))
        .collect()
}

fn clap_error(err: clap::Error) -> CliError {
    let rendered = err.render().to_string();
    let first = rendered
        .lines()
        .next()
        .unwrap_or("")
        .trim_start_matches("error: ")
        .to_string();
    match err.kind() {
        ErrorKind::UnknownArgument => CliError::UnknownFlag(first),
        ErrorKind::InvalidValue | ErrorKind::ValueValidation => {
            let name = err
                .get(clap::error::ContextKind::InvalidArg)
                .map(|a| a.to_string())
                .unwrap_or_default();
            CliError::InvalidValue {
                name,
                reason: first,
                origin: Origin::Flag,
            }
        }
        ErrorKind::MissingRequiredArgument => CliError::MissingParameter("argument"),
        _ => CliError::Usage(first),
    }
}

/// Outcome of argument parsing: either a spec or text to print (help, version).
#[derive(Debug)]
pub enum Parsed {
    Spec(Box<ExperimentSpec>),
    Info(String),
}

/// Parses the command line, reading `--config` when given.
pub fn parse_args<I, T>(args: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(Parsed::Info(e.render().to_string()));
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            return Err(CliError::Usage(
                "a subcommand is required (solve, sweep, train, validate)".into(),
            ));
        }
        Err(e) => return Err(clap_error(e)),
    };
    let (kind, flags) = match cli.command {
        Command::Solve(f) => (CommandKind::Solve, f),
        Command::Sweep(f) => (CommandKind::Sweep, f),
        Command::Train(f) => (CommandKind::Train, f),
        Command::Validate(f) => (CommandKind::Validate, f),
    };
    let text = match &flags.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::ConfigFile {
            path: path.clone(),
            message: e.to_string(),
        })?,
        None => String::new(),
    };
    build_spec(kind, flags.clone(), flags.config.as_deref(), &text)
        .map(|s| Parsed::Spec(Box::new(s)))
}

/// Merges flags over the config file `text` and validates the result.
pub fn build_spec(
    command: CommandKind,
    flags: Flags,
    path: Option<&Path>,
    text: &str,
) -> Result<ExperimentSpec, CliError> {
    let file: FileConfig = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        let message = e.message().trim().to_string();
        CliError::ConfigFile {
            path: path.map(Path::to_path_buf).unwrap_or_default(),
            message: match line {
                Some(l) => format!("line {l}: {message}"),
                None => message,
            },
        }
    })?;

    let mut m = Merger {
        path,
        text,
        origins: HashMap::new(),
    };
    let workers = m.pick("workers", flags.workers, file.workers, |v| v);
    let model_size = m.pick("model-size", flags.model_size, file.model_size, |v| v);
    let mu = m.pick("mu", flags.mu, file.mu, |v| v);
    let t0 = m.pick("t0", flags.t0, file.t0, |v| v);
    let samples = m.pick("samples-m", flags.samples_m, file.samples_m, |v| v);
    let cycles = m.pick("cycles-b", flags.cycles_b, file.cycles_b, |v| v);
    let seed = m.pick("seed", flags.seed.map(|s| s as i64), file.seed, |v| v);
    let draws = m.pick("draws", flags.draws, file.draws, |v| v);
    let scheme_flag = (!flags.scheme.is_empty()).then_some(flags.scheme);
    let schemes = m.pick("scheme", scheme_flag, file.scheme, |v| match v {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    });
    let axis = m.pick("axis", flags.axis, file.axis, |v| v);
    let values = m.pick("values", flags.values.map(Ok), file.values, |v| match v {
        Values::Text(s) => Ok(s),
        Values::List(items) => Err(items),
    });
    let output = m.pick("output", flags.output, file.output, PathBuf::from);
    let solver_iters = m.pick("solver-iters", flags.solver_iters, file.solver_iters, |v| v);
    let train_iters = m.pick("train-iters", flags.train_iters, file.train_iters, |v| v);
    let step = m.pick("step", flags.step, file.step, |v| v);
    let relaxed_file = m.pick(
        "relaxed",
        flags.relaxed.then_some(true),
        file.relaxed,
        |v| v,
    );

    let seed = match seed {
        Some(s) if s.value < 0 => return Err(bad("seed", s.origin, "must be >= 0")),
        Some(s) => s.value as u64,
        None => 0,
    };
    let draws = match &draws {
        Some(d) => {
            let n = positive("draws", d)?;
            if n < 2 {
                return Err(bad("draws", d.origin.clone(), "need at least two draws"));
            }
            n
        }
        None => DEFAULT_DRAWS,
    };

    let sweep = match command {
        CommandKind::Sweep => {
            let axis = axis.ok_or(CliError::MissingParameter("axis"))?;
            let parsed_axis: SweepAxis = axis
                .value
                .parse()
                .map_err(|e: bcgc::Error| bad("axis", axis.origin.clone(), strip_prefix(&e)))?;
            let values = values.ok_or(CliError::MissingParameter("values"))?;
            let list = match values.value {
                Ok(text) => parse_value_list(&text),
                Err(items) => items
                    .into_iter()
                    .map(|n| match n {
                        Number::Int(i) => Ok(i as f64),
                        Number::Float(f) => Ok(f),
                        Number::Text(s) => {
                            parse_number(&s).ok_or_else(|| format!("`{s}` is not a number"))
                        }
                    })
                    .collect(),
            }
            .map_err(|r| bad("values", values.origin.clone(), r))?;
            if list.is_empty() {
                return Err(bad("values", values.origin, "need at least one value"));
            }
            for &v in &list {
                let ok = match parsed_axis {
                    SweepAxis::Workers => v >= 1.0 && v.fract() == 0.0,
                    SweepAxis::Mu => v > 0.0,
                };
                if !ok {
                    let what = match parsed_axis {
                        SweepAxis::Workers => "worker counts must be positive integers",
                        SweepAxis::Mu => "mu values must be > 0",
                    };
                    return Err(bad("values", values.origin, format!("{what}, got {v}")));
                }
            }
            Some(SweepSpec {
                axis: parsed_axis,
                values: list,
            })
        }
        _ => None,
    };

    let needs_model = command != CommandKind::Validate;
    let axis_kind = sweep.as_ref().map(|s| s.axis);

    let workers = match (&workers, axis_kind) {
        (Some(w), _) => positive("workers", w)?,
        (None, Some(SweepAxis::Workers)) => sweep.as_ref().unwrap().values[0] as usize,
        (None, _) if needs_model => return Err(CliError::MissingParameter("workers")),
        (None, _) => 10,
    };
    let model_size = match &model_size {
        Some(l) => positive("model-size", l)?,
        None if needs_model => return Err(CliError::MissingParameter("model-size")),
        None => 100,
    };
    let samples = match &samples {
        Some(s) => positive("samples-m", s)?,
        None => workers,
    };
    let cycles = cycles.as_ref().map_or(1.0, |c| c.value);
    if !(cycles > 0.0) || !cycles.is_finite() {
        return Err(bad(
            "cycles-b",
            m.origin("cycles-b"),
            format!("must be finite and > 0, got {cycles}"),
        ));
    }
    let mu = match (&mu, axis_kind) {
        (Some(v), _) => v.value,
        (None, Some(SweepAxis::Mu)) => sweep.as_ref().unwrap().values[0],
        (None, _) if needs_model => return Err(CliError::MissingParameter("mu")),
        (None, _) => 1e-3,
    };
    let t0 = match &t0 {
        Some(v) => v.value,
        None if needs_model => return Err(CliError::MissingParameter("t0")),
        None => 50.0,
    };

    let system =
        SystemConfig::new(workers, model_size, samples, cycles).map_err(|e| model_error(e, &m))?;
    let distribution = ShiftedExponential::new(mu, t0).map_err(|e| model_error(e, &m))?;

    let schemes = match schemes {
        Some(list) => {
            let mut out = Vec::with_capacity(list.value.len());
            for s in &list.value {
                let kind: SchemeKind = s.trim().parse().map_err(|e: bcgc::Error| {
                    bad("scheme", list.origin.clone(), strip_prefix(&e))
                })?;
                if out.contains(&kind) {
                    return Err(bad(
                        "scheme",
                        list.origin.clone(),
                        format!("`{kind}` listed twice"),
                    ));
                }
                out.push(kind);
            }
            out
        }
        None => match command {
            CommandKind::Train => vec![SchemeKind::ClosedF],
            _ => vec![
                SchemeKind::Subgradient,
                SchemeKind::ClosedT,
                SchemeKind::ClosedF,
                SchemeKind::SingleBlock,
            ],
        },
    };
    let min_workers = match &sweep {
        Some(s) if s.axis == SweepAxis::Workers => {
            s.values.iter().fold(f64::INFINITY, |a, &b| a.min(b)) as usize
        }
        _ => workers,
    };
    for kind in &schemes {
        if let SchemeKind::Uniform(s) = kind {
            if *s >= min_workers {
                return Err(bad(
                    "scheme",
                    m.origin("scheme"),
                    format!("uniform:{s} needs s < N (N = {min_workers})"),
                ));
            }
        }
    }
    if needs_model && schemes.contains(&SchemeKind::ClosedF) && t0 == 0.0 {
        return Err(bad("t0", m.origin("t0"), "closed-f needs t0 > 0"));
    }

    let mut settings = SchemeSettings::default().with_seed(seed);
    settings.subgradient = SubgradientConfig {
        seed: settings.subgradient.seed,
        ..SubgradientConfig::default()
    };
    settings.rounding = RoundingConfig {
        seed: settings.rounding.seed,
        ..RoundingConfig::default()
    };
    if let Some(it) = &solver_iters {
        settings.subgradient.max_iters = positive("solver-iters", it)?;
    }
    let train_iters = match &train_iters {
        Some(it) => positive("train-iters", it)?,
        None => DEFAULT_TRAIN_ITERS,
    };
    let step = match step {
        Some(s) if !(s.value > 0.0) || !s.value.is_finite() => {
            return Err(bad(
                "step",
                s.origin,
                format!("must be finite and > 0, got {}", s.value),
            ));
        }
        Some(s) => Some(s.value),
        None => None,
    };
    if command == CommandKind::Train {
        system
            .subset_size()
            .map_err(|e| bad("samples-m", m.origin("samples-m"), e.to_string()))?;
    }

    Ok(ExperimentSpec {
        command,
        system,
        distribution,
        schemes,
        settings,
        seed,
        draws,
        sweep,
        train_iters,
        step,
        relaxed: relaxed_file.is_some_and(|r| r.value),
        output: output.map(|o| o.value),
    })
}

fn strip_prefix(e: &bcgc::Error) -> String {
    match e {
        bcgc::Error::InvalidParameter { reason, .. } => reason.clone(),
        other => other.to_string(),
    }
}

fn model_error(e: bcgc::Error, m: &Merger<'_>) -> CliError {
    match &e {
        bcgc::Error::InvalidParameter { name, reason } => bad(name, m.origin(name), reason.clone()),
        _ => CliError::Model(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentSpec, CliError> {
        let mut full = vec!["bcgc"];
        full.extend_from_slice(args);
        match parse_args(full)? {
            Parsed::Spec(s) => Ok(*s),
            Parsed::Info(i) => panic!("unexpected info: {i}"),
        }
    }

    fn flags(workers: Option<i64>) -> Flags {
        Flags {
            workers,
            model_size: Some(100),
            mu: Some(1e-3),
            t0: Some(50.0),
            ..Flags::default()
        }
    }

    #[test]
    fn reference_solve_command() {
        let spec = parse(&[
            "solve",
            "--workers",
            "20",
            "--model-size",
            "20000",
            "--mu",
            "1e-3",
            "--t0",
            "50",
            "--samples-m",
            "50",
            "--cycles-b",
            "1",
            "--seed",
            "7",
        ])
        .unwrap();
        assert_eq!(spec.command, CommandKind::Solve);
        assert_eq!(spec.system, SystemConfig::new(20, 20_000, 50, 1.0).unwrap());
        assert_eq!(spec.distribution.mu(), 1e-3);
        assert_eq!(spec.distribution.t0(), 50.0);
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.draws, DEFAULT_DRAWS);
        assert_eq!(spec.schemes.len(), 4);
    }

    #[test]
    fn zero_mu_is_rejected() {
        let err = parse(&[
            "solve",
            "--workers",
            "4",
            "--model-size",
            "8",
            "--mu",
            "0",
            "--t0",
            "1",
        ])
        .unwrap_err();
        assert_eq!(err.category(), "invalid-value");
        let msg = err.to_string();
        assert!(msg.contains("`mu`") && msg.contains("> 0"), "{msg}");
    }

    #[test]
    fn flag_overrides_file() {
        let text = "workers = 10\nmodel-size = 100\nmu = 0.001\nt0 = 50\n";
        let spec = build_spec(CommandKind::Solve, flags(Some(20)), None, text).unwrap();
        assert_eq!(spec.system.n_workers, 20);
        let spec = build_spec(CommandKind::Solve, Flags::default(), None, text).unwrap();
        assert_eq!(spec.system.n_workers, 10);
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let text = "workers = 10\nmodel-size = 100\n\nmu = -2.0\nt0 = 50\n";
        let err = build_spec(
            CommandKind::Solve,
            Flags::default(),
            Some(Path::new("exp.toml")),
            text,
        )
        .unwrap_err();
        assert!(err.to_string().contains("exp.toml:4"), "{err}");

        let err = build_spec(
            CommandKind::Solve,
            Flags::default(),
            None,
            "workers = 3\nbogus = 1\n",
        )
        .unwrap_err();
        assert_eq!(err.category(), "config");
        assert!(err.to_string().contains("line 2"), "{err}");

        let err = build_spec(
            CommandKind::Solve,
            Flags::default(),
            None,
            "workers = \"x\"\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn error_categories_are_distinct() {
        let unknown = parse(&["solve", "--wrokers", "3"]).unwrap_err();
        assert_eq!(unknown.category(), "unknown-flag");
        let invalid = parse(&["solve", "--workers", "three"]).unwrap_err();
        assert_eq!(invalid.category(), "invalid-value");
        let missing = parse(&["solve", "--workers", "3"]).unwrap_err();
        assert_eq!(missing.category(), "missing-parameter");
        assert!(missing.to_string().contains("--model-size"));
        let negative = parse(&[
            "solve",
            "--workers",
            "-3",
            "--model-size",
            "4",
            "--mu",
            "1",
            "--t0",
            "1",
        ])
        .unwrap_err();
        assert_eq!(negative.category(), "invalid-value");
    }

    #[test]
    fn sweep_values_and_schemes() {
        let spec = parse(&[
            "sweep",
            "--model-size",
            "200",
            "--mu",
            "1e-3",
            "--t0",
            "50",
            "--axis",
            "N",
            "--values",
            "10,20,30",
            "--scheme",
            "closed-t",
            "--scheme",
            "uniform:2",
        ])
        .unwrap();
        let sweep = spec.sweep.unwrap();
        assert_eq!(sweep.axis, SweepAxis::Workers);
        assert_eq!(sweep.values, vec![10.0, 20.0, 30.0]);
        assert_eq!(
            spec.schemes,
            vec![SchemeKind::ClosedT, SchemeKind::Uniform(2)]
        );
        assert_eq!(spec.system.n_workers, 10);

        let text = "model-size = 200\nworkers = 20\nt0 = 50\naxis = \"mu\"\nvalues = [\"10^-3\", 0.01]\nscheme = \"closed-f\"\n";
        let spec = build_spec(CommandKind::Sweep, Flags::default(), None, text).unwrap();
        let v = spec.sweep.unwrap().values;
        assert!((v[0] - 1e-3).abs() < 1e-18 && v[1] == 0.01);

        let err = parse(&[
            "sweep",
            "--workers",
            "4",
            "--model-size",
            "8",
            "--t0",
            "1",
            "--axis",
            "mu",
            "--values",
            "1,0",
        ])
        .unwrap_err();
        assert!(err.to_string().contains("values"), "{err}");
        let err = parse(&[
            "sweep",
            "--workers",
            "4",
            "--model-size",
            "8",
            "--mu",
            "1",
            "--t0",
            "1",
            "--axis",
            "q",
            "--values",
            "1",
        ])
        .unwrap_err();
        assert_eq!(err.category(), "invalid-value");
    }

    #[test]
    fn bad_schemes() {
        let base = [
            "solve",
            "--workers",
            "4",
            "--model-size",
            "8",
            "--mu",
            "1",
            "--t0",
            "1",
        ];
        let mut args = base.to_vec();
        args.extend(["--scheme", "tandon"]);
        assert_eq!(parse(&args).unwrap_err().category(), "invalid-value");
        let mut args = base.to_vec();
        args.extend(["--scheme", "uniform:4"]);
        assert_eq!(parse(&args).unwrap_err().category(), "invalid-value");
    }

    #[test]
    fn number_syntax() {
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number(" 10^2 "), Some(100.0));
        assert_eq!(parse_number("nan"), None);
        assert_eq!(parse_number("x"), None);
    }

    #[test]
    fn validate_needs_no_model() {
        let spec = parse(&["validate"]).unwrap();
        assert_eq!(spec.command, CommandKind::Validate);
    }
}
