use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plankton_qso::dynamics::{fmt_sig17, HistoryMode, IterateOptions};
use plankton_qso::harness::{run_experiment, ExperimentSpec, IterateSettings, Target};
use plankton_qso::stability::{classify, classify_point, DEFAULT_UNIT_CIRCLE_TOL};
use plankton_qso::{enumerate_fixed_points, iterate, Error, Qso};
use serde::Serialize;
use serde_json::json;

mod config;

use config::ConfigFile;

#[derive(Parser)]
#[command(
    name = "plankton",
    version,
    about = "Plankton trophic-network operator: fixed points, stability, trajectories and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the rates against the model's validity conditions.
    Validate(Common),
    /// List the fixed points with their residuals and feasibility conditions.
    FixedPoints(Common),
    /// Classify fixed points (all enumerated ones, or the one given by --x0).
    Stability(Common),
    /// Iterate from --x0 and report the limit.
    Simulate(Common),
    /// Run a seeded Monte Carlo experiment for a target.
    Verify(Common),
    /// Same as verify, restricted to the conjecture targets.
    Conjecture(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    #[arg(long)]
    a3: Option<f64>,
    #[arg(long)]
    a4: Option<f64>,
    #[arg(long)]
    a5: Option<f64>,
    #[arg(long)]
    a6: Option<f64>,
    #[arg(long)]
    a7: Option<f64>,
    #[arg(long)]
    a8: Option<f64>,
    #[arg(long)]
    a9: Option<f64>,
    #[arg(long)]
    a10: Option<f64>,
    #[arg(long)]
    a11: Option<f64>,
    #[arg(long)]
    a12: Option<f64>,
    /// Initial point "x1,x2,x3,x4,x5,x6".
    #[arg(long, value_name = "V1,..,V6", allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, value_name = "N")]
    max_iter: Option<u64>,
    #[arg(long, value_name = "T")]
    step_tol: Option<f64>,
    /// Keep every N-th iterate in the history (default: adaptive thinning).
    #[arg(long, value_name = "N")]
    stride: Option<u64>,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Experiment target, e.g. no-dim, no-dom-balance, conjecture2.
    #[arg(long, value_name = "NAME")]
    target: Option<String>,
    /// Parameter draws.
    #[arg(long, value_name = "N")]
    draws: Option<usize>,
    /// Initial points per parameter draw.
    #[arg(long, value_name = "N")]
    points: Option<usize>,
    /// Values of λ at which the matter-only segment is listed.
    #[arg(long, value_name = "L1,L2,..", value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, hide = true)]
    inject_wrong_prediction: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Structured,
}

/// Exit 1 for domain failures, 2 for usage and parse errors.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidExperiment(_) | Error::NonFiniteRate { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(format!("write failed: {e}"))
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(c) => validate(&c),
        Command::FixedPoints(c) => fixed_points(&c),
        Command::Stability(c) => stability(&c),
        Command::Simulate(c) => simulate(&c),
        Command::Verify(c) => verify(&c, false),
        Command::Conjecture(c) => verify(&c, true),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

impl Common {
    fn file(&self) -> Result<ConfigFile, Failure> {
        self.config
            .as_deref()
            .map(ConfigFile::load)
            .transpose()
            .map(Option::unwrap_or_default)
    }

    fn rate_flags(&self) -> [Option<f64>; 12] {
        [
            self.a1, self.a2, self.a3, self.a4, self.a5, self.a6, self.a7, self.a8, self.a9,
            self.a10, self.a11, self.a12,
        ]
    }

    fn format(&self, file: &ConfigFile) -> Result<Format, Failure> {
        if let Some(f) = self.format {
            return Ok(f);
        }
        match file.format.as_deref() {
            None | Some("structured") => Ok(Format::Structured),
            Some("csv") => Ok(Format::Csv),
            Some(other) => Err(Failure::Usage(format!(
                "format: expected csv or structured, got {other:?}"
            ))),
        }
    }

    fn out(&self, file: &ConfigFile) -> Option<PathBuf> {
        self.out.clone().or_else(|| file.out.clone())
    }

    fn qso(&self, file: &ConfigFile) -> Result<Qso, Failure> {
        Ok(Qso::new(config::parameters(&self.rate_flags(), file)?)?)
    }

    fn settings(&self, file: &ConfigFile) -> IterateSettings {
        let mut s = IterateSettings::default();
        if let Some(n) = self.max_iter.or(file.max_iter) {
            s.max_iterations = n;
        }
        if let Some(t) = self.step_tol.or(file.step_tol) {
            s.step_tol = t;
        }
        s
    }
}

fn writer(out: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Failure::Usage(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), Failure> {
    let mut w = writer(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Domain(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn structured_only(format: Format, command: &str) -> Result<(), Failure> {
    match format {
        Format::Structured => Ok(()),
        Format::Csv => Err(Failure::Usage(format!(
            "{command}: csv output is not available"
        ))),
    }
}

fn validate(c: &Common) -> Outcome {
    let file = c.file()?;
    structured_only(c.format(&file)?, "validate")?;
    let params = config::parameters(&c.rate_flags(), &file)?;
    let report = params.validate();
    emit_json(&report, c.out(&file).as_ref())?;
    if !report.is_valid() {
        eprintln!("invalid parameters: {report}");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn fixed_points(c: &Common) -> Outcome {
    let file = c.file()?;
    let format = c.format(&file)?;
    let qso = c.qso(&file)?;
    let grid = c.grid.clone().or(file.grid.clone());
    let points = enumerate_fixed_points(&qso, grid.as_deref());
    let out = c.out(&file);
    match format {
        Format::Structured => emit_json(&points, out.as_ref())?,
        Format::Csv => {
            let mut w = writer(out.as_ref())?;
            writeln!(
                w,
                "family,free_parameter,x1,x2,x3,x4,x5,x6,residual,boundary"
            )?;
            for p in &points {
                let free = p.free_parameter.map(fmt_sig17).unwrap_or_default();
                let coords: Vec<String> = p.coordinates.iter().map(|v| fmt_sig17(*v)).collect();
                writeln!(
                    w,
                    "{},{free},{},{},{}",
                    p.family,
                    coords.join(","),
                    fmt_sig17(p.residual),
                    p.is_boundary()
                )?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn stability(c: &Common) -> Outcome {
    let file = c.file()?;
    structured_only(c.format(&file)?, "stability")?;
    let qso = c.qso(&file)?;
    let out = c.out(&file);
    if config::initial_coords(c.x0.as_deref(), &file)?.is_some() {
        let x = config::initial_point(c.x0.as_deref(), &file)?;
        emit_json(
            &classify_point(&qso, &x, DEFAULT_UNIT_CIRCLE_TOL)?,
            out.as_ref(),
        )?;
        return Ok(ExitCode::SUCCESS);
    }
    let grid = c.grid.clone().or(file.grid.clone());
    let reports = enumerate_fixed_points(&qso, grid.as_deref())
        .iter()
        .map(|fp| {
            let report = classify(&qso, fp, DEFAULT_UNIT_CIRCLE_TOL)?;
            Ok(json!({ "family": fp.family, "free_parameter": fp.free_parameter, "stability": report }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    emit_json(&reports, out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn simulate(c: &Common) -> Outcome {
    let file = c.file()?;
    let format = c.format(&file)?;
    let qso = c.qso(&file)?;
    let x0 = config::initial_point(c.x0.as_deref(), &file)?;
    let settings = c.settings(&file);
    let history = match c.stride.or(file.stride) {
        Some(0) => return Err(Failure::Usage("stride must be at least 1".into())),
        Some(k) => HistoryMode::Every(k),
        None => HistoryMode::Auto,
    };
    let opts = IterateOptions {
        max_iterations: settings.max_iterations,
        step_tol: settings.step_tol,
        consecutive: settings.consecutive,
        history,
    };
    let run = iterate(&qso, &x0, &opts)?;
    let out = c.out(&file);
    match format {
        Format::Structured => emit_json(&run, out.as_ref())?,
        Format::Csv => {
            let mut w = writer(out.as_ref())?;
            run.trajectory.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    // The verdict goes to stdout when the artifact went to a file, otherwise
    // to stderr so that stdout stays machine-readable.
    let verdict =
        serde_json::to_string(&run.verdict).map_err(|e| Failure::Domain(e.to_string()))?;
    if out.is_some() {
        println!("{verdict}");
    } else if format == Format::Csv {
        eprintln!("{verdict}");
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(c: &Common, conjectures_only: bool) -> Outcome {
    let file = c.file()?;
    structured_only(c.format(&file)?, "verify")?;
    let name = c
        .target
        .clone()
        .or(file.target.clone())
        .ok_or_else(|| Failure::Usage("missing key: target".into()))?;
    let target: Target = name.parse().map_err(Failure::Usage)?;
    if conjectures_only && !target.is_conjecture() {
        return Err(Failure::Usage(format!(
            "{target} is not a conjecture target; use verify"
        )));
    }
    let mut spec = ExperimentSpec::new(
        target,
        c.draws.or(file.draws).unwrap_or(100),
        c.points.or(file.points).unwrap_or(10),
        c.seed.or(file.seed).unwrap_or(0),
    );
    spec.iterate = c.settings(&file);
    spec.inject_wrong_prediction = c.inject_wrong_prediction;

    let report = run_experiment(&spec)?;
    emit_json(&report, c.out(&file).as_ref())?;
    eprintln!(
        "{target}: {}/{} matched ({} converged), match rate {:.4}, {} counterexample(s), {:.2?}",
        report.n_matched_prediction,
        report.n_runs,
        report.n_converged,
        report.match_rate,
        report.n_counterexamples,
        report.wall_time
    );
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
