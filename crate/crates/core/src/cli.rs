//! The `apf` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{self, Params};
use crate::error::{Error, Result};
use crate::plot;
use crate::pwl::PLFunction;
use crate::tower::{classify, theorem1_certify, Convention, RamificationReport, TowerSpec, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_UNWRITABLE: i32 = 4;

const DEFAULT_DEPTH: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "apf", version, about = "Ramification breaks and strict-APF certificates for towers of local fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the pipeline and print the ramification report.
    Analyze(RunArgs),
    /// Print the uniform lower bound on the strictness constant, if any.
    Certify(RunArgs),
    /// List catalog entries, or print the tower spec of one.
    Catalog(InputArgs),
    /// Write plot data for Phi and every step's transition function.
    Plot(RunArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// A tower spec file, or `catalog NAME`.
    #[arg(value_name = "INPUT")]
    input: Vec<String>,
    /// Catalog entry to use instead of a file.
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    e: Option<u64>,
    #[arg(long, value_name = "SEQ")]
    r: Option<String>,
    #[arg(long, value_name = "SEQ")]
    s: Option<String>,
    /// Number of tower steps to resolve.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write plot data (SVG when the path ends in `.svg`, else CSV).
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Convention::Lubin)]
    convention: Convention,
    /// Evenly spaced sample points per plotted series.
    #[arg(long, default_value_t = 0)]
    samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Certify,
    Catalog,
    Plot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Catalog { name: String, params: Params },
    /// `catalog` with no entry named.
    CatalogList,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: Source,
    pub depth: Option<usize>,
    pub format: Format,
    pub plot: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub convention: Convention,
    pub samples: usize,
}

/// Failures tagged with the exit code they map to.
#[derive(Debug)]
struct Failure {
    code: i32,
    error: Error,
}

impl Failure {
    fn input(error: Error) -> Self {
        let code = match &error {
            Error::Json(e) if e.is_syntax() || e.is_eof() => EXIT_MALFORMED,
            Error::Io(_) => EXIT_MALFORMED,
            _ => EXIT_VALIDATION,
        };
        Failure { code, error }
    }

    fn write(error: Error) -> Self {
        Failure {
            code: EXIT_UNWRITABLE,
            error,
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            error,
        }
    }
}

fn config_from(command: CommandKind, input: InputArgs, run: Option<OutputArgs>) -> Result<RunConfig> {
    let mut params = Params::parse(input.params.iter().map(String::as_str))?;
    for (key, value) in [
        ("p", input.p.map(|v| v.to_string())),
        ("e", input.e.map(|v| v.to_string())),
        ("r", input.r.clone()),
        ("s", input.s.clone()),
    ] {
        if let Some(v) = value {
            params.set(key, v);
        }
    }
    let positional: Vec<&str> = input.input.iter().map(String::as_str).collect();
    let source = match (input.catalog, positional.as_slice(), command) {
        (Some(name), [], _) => Source::Catalog { name, params },
        (None, ["catalog", name], _) | (None, [name], CommandKind::Catalog) => Source::Catalog {
            name: name.to_string(),
            params,
        },
        (None, [], CommandKind::Catalog) => Source::CatalogList,
        (None, [path], _) => Source::File(PathBuf::from(path)),
        _ => return Err(Error::Parse("expected a spec file, `catalog NAME` or --catalog NAME".into())),
    };
    if let Some(d) = input.depth {
        if d < 2 {
            return Err(Error::Precondition("--depth must be at least 2".into()));
        }
    }
    Ok(RunConfig {
        command,
        source,
        depth: input.depth,
        format: run.as_ref().map_or(Format::Json, |r| r.format),
        plot: run.as_ref().and_then(|r| r.plot.clone()),
        output: run.as_ref().and_then(|r| r.output.clone()),
        convention: run.as_ref().map_or(Convention::Lubin, |r| r.convention),
        samples: run.as_ref().map_or(0, |r| r.samples),
    })
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let config = match cli.command {
        Command::Analyze(r) => config_from(CommandKind::Analyze, r.input, Some(r.output)),
        Command::Certify(r) => config_from(CommandKind::Certify, r.input, Some(r.output)),
        Command::Plot(r) => config_from(CommandKind::Plot, r.input, Some(r.output)),
        Command::Catalog(i) => config_from(CommandKind::Catalog, i, None),
    };
    let outcome = config.map_err(Failure::from).and_then(|c| execute(&c, stdout));
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.error);
            f.code
        }
    }
}

fn load_spec(config: &RunConfig) -> std::result::Result<(TowerSpec, usize), Failure> {
    let spec = match &config.source {
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::input(e.into()))?;
            serde_json::from_str::<TowerSpec>(&text).map_err(|e| Failure::input(e.into()))?
        }
        Source::Catalog { name, params } => {
            catalog::build(name, params, config.depth.unwrap_or(DEFAULT_DEPTH))?.spec
        }
        Source::CatalogList => return Err(Error::Parse("no tower given".into()).into()),
    };
    let depth = config.depth.or(spec.step_count()).unwrap_or(DEFAULT_DEPTH);
    Ok((spec, depth))
}

fn emit(config: &RunConfig, stdout: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    match &config.output {
        Some(path) => plot::write_atomic(path, text).map_err(Failure::write),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::write(e.into())),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn execute(config: &RunConfig, stdout: &mut dyn Write) -> std::result::Result<i32, Failure> {
    match config.command {
        CommandKind::Catalog => catalog_command(config, stdout),
        CommandKind::Certify => {
            let (spec, _) = load_spec(config)?;
            let text = match theorem1_certify(&spec) {
                Ok(cert) => match config.format {
                    Format::Json => to_json(&cert),
                    Format::Text => match cert {
                        Some(c) => format!(
                            "epsilon_star = {}\nq_max = {}\nc_lower = {}\n",
                            c.epsilon_star, c.q_max, c.c_lower
                        ),
                        None => "certification refused: no positive uniform coefficient bound\n".into(),
                    },
                },
                Err(Error::CannotCertify(msg)) => match config.format {
                    Format::Json => to_json(&serde_json::json!({ "refused": msg })),
                    Format::Text => format!("certification refused: {msg}\n"),
                },
                Err(e) => return Err(e.into()),
            };
            emit(config, stdout, &text)?;
            Ok(EXIT_OK)
        }
        CommandKind::Analyze | CommandKind::Plot => {
            let (spec, depth) = load_spec(config)?;
            let report = classify(&spec, depth)?.in_convention(config.convention)?;
            if config.command == CommandKind::Plot && config.plot.is_none() {
                return Err(Error::Parse("plot needs --plot PATH".into()).into());
            }
            if let Some(path) = &config.plot {
                write_plot(&report, path, config.samples)?;
            }
            if config.command == CommandKind::Plot {
                return Ok(EXIT_OK);
            }
            let text = match config.format {
                Format::Json => to_json(&report),
                Format::Text => render_text(&report),
            };
            emit(config, stdout, &text)?;
            Ok(match report.verdict {
                Verdict::Indeterminate => EXIT_INDETERMINATE,
                _ => EXIT_OK,
            })
        }
    }
}

fn write_plot(report: &RamificationReport, path: &Path, samples: usize) -> std::result::Result<(), Failure> {
    let contents = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg")) {
        plot::svg(&report.phi, samples)
    } else {
        let mut series: Vec<(String, &PLFunction)> = vec![("Phi".into(), &report.phi)];
        series.extend(
            report
                .per_step
                .iter()
                .enumerate()
                .map(|(k, s)| (format!("phi_step_{}", k + 1), &s.phi_step)),
        );
        plot::csv(&series, samples)
    };
    plot::write_atomic(path, &contents).map_err(Failure::write)
}

fn catalog_command(config: &RunConfig, stdout: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let text = match &config.source {
        Source::CatalogList => catalog::NAMES.iter().map(|n| format!("{n}\n")).collect(),
        Source::Catalog { name, params } => {
            let entry = catalog::build(name, params, config.depth.unwrap_or(DEFAULT_DEPTH))?;
            match config.format {
                Format::Json => to_json(&entry.spec),
                Format::Text => {
                    let depth = entry.spec.step_count().unwrap_or(config.depth.unwrap_or(DEFAULT_DEPTH));
                    let mut s = format!("{}: {}\n", entry.name, entry.description);
                    for n in 1..=depth {
                        let _ = writeln!(s, "n = {n}: i_n = {}, b_n = {}", (entry.level)(n), (entry.brk)(n));
                    }
                    s
                }
            }
        }
        Source::File(_) => return Err(Error::Parse("catalog takes an entry name".into()).into()),
    };
    emit(config, stdout, &text)?;
    Ok(EXIT_OK)
}

pub fn render_text(report: &RamificationReport) -> String {
    let join = |xs: &[String]| xs.join(", ");
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", report.verdict);
    let _ = writeln!(s, "depth: {} ({:?} convention)", report.depth, report.convention);
    let degrees: Vec<String> = report.degrees().iter().map(u64::to_string).collect();
    let _ = writeln!(s, "degrees: {}", join(&degrees));
    let fmt = |xs: &[crate::numeric::Rational]| join(&xs.iter().map(ToString::to_string).collect::<Vec<_>>());
    if !report.levels.is_empty() {
        let _ = writeln!(s, "levels i_n: {}", fmt(&report.levels));
        let _ = writeln!(s, "breaks b_n: {}", fmt(&report.breaks));
    }
    let minima: Vec<String> = report.strictness_minima.iter().map(ToString::to_string).collect();
    let _ = writeln!(s, "strictness minima: {}", join(&minima));
    match &report.certificate {
        Some(c) => {
            let _ = writeln!(
                s,
                "certificate: epsilon_star = {}, q_max = {}, c_lower = {}",
                c.epsilon_star, c.q_max, c.c_lower
            );
        }
        None => s.push_str("certificate: none\n"),
    }
    let vertices: Vec<String> = report.phi.vertices().iter().map(|(x, y)| format!("({x}, {y})")).collect();
    let _ = writeln!(s, "Phi vertices: {}", join(&vertices));
    for note in &report.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}
