//! The `compute` and `convert` commands, independent of argument parsing.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use dnorm_core::solver::FaultInjection;
use dnorm_core::{
    bruteforce_diamond, choi_from_stinespring, diamond_norm, natural_from_stinespring,
    stinespring_from_natural, unitary_diamond, BruteForceConfig, Error, SolverConfig, SolverMode,
};
use serde::{Deserialize, Serialize};

use crate::files::{ChannelFile, FormatError, MatrixFile, MatrixKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Convex,
    Bruteforce,
    UnitaryFormula,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Convex => "convex",
            Method::Bruteforce => "bruteforce",
            Method::UnitaryFormula => "unitary-formula",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    SeparationCuts,
    MembershipOnly,
}

impl From<Mode> for SolverMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::SeparationCuts => SolverMode::SeparationCuts,
            Mode::MembershipOnly => SolverMode::MembershipOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Representation {
    Stinespring,
    Natural,
    Choi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComputeOptions {
    pub epsilon: f64,
    pub method: Method,
    pub seed: u64,
    pub mode: Mode,
    pub max_iterations: Option<usize>,
    /// Include `wall_time_s` in the record. Off by default so that repeated
    /// runs produce identical output.
    pub timing: bool,
    pub fault: Option<FaultInjection>,
}

impl ComputeOptions {
    pub fn new(epsilon: f64, method: Method) -> Self {
        Self {
            epsilon,
            method,
            seed: 0,
            mode: Mode::SeparationCuts,
            max_iterations: None,
            timing: false,
            fault: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    #[serde(rename = "M")]
    pub m: f64,
    pub alpha: f64,
    pub eps_prime: f64,
}

/// One result, printed as a single JSON object with a fixed key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub value: f64,
    pub epsilon: f64,
    pub method: String,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_gap: Option<f64>,
    /// Set when the value carries no accuracy guarantee: a solver that
    /// stopped early, or a heuristic method.
    pub uncertified: bool,
    pub tool_version: String,
}

impl ResultRecord {
    fn new(value: f64, opts: &ComputeOptions) -> Self {
        Self {
            value: value.max(0.0),
            epsilon: opts.epsilon,
            method: opts.method.name().to_string(),
            iterations: 0,
            wall_time_s: None,
            constants: None,
            certified_gap: None,
            uncertified: false,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input.
    Invalid(String),
    /// The solver could not certify its answer; a best-so-far record is
    /// attached when one exists.
    Solver {
        message: String,
        record: Option<Box<ResultRecord>>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Solver { .. } => EXIT_SOLVER,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Solver { message: m, .. } => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Invalid(e.0)
    }
}

fn core_error(e: Error) -> CliError {
    match e {
        Error::InvalidInput(m) => CliError::Invalid(m),
        other => CliError::Solver {
            message: other.to_string(),
            record: None,
        },
    }
}

pub fn compute(file: &ChannelFile, opts: &ComputeOptions) -> Result<ResultRecord, CliError> {
    if !(opts.epsilon > 0.0) || !opts.epsilon.is_finite() {
        return Err(CliError::Invalid(format!(
            "epsilon must be a positive number, got {}",
            opts.epsilon
        )));
    }
    if opts.max_iterations == Some(0) {
        return Err(CliError::Invalid("max-iterations must be at least 1".into()));
    }
    let start = Instant::now();
    let mut record = match opts.method {
        Method::Convex => {
            let pair = file.to_pair()?;
            let cfg = SolverConfig {
                epsilon: opts.epsilon,
                max_iterations: opts.max_iterations,
                mode: opts.mode.into(),
                seed: opts.seed,
                fault: opts.fault,
            };
            match diamond_norm(&pair, &cfg) {
                Ok(r) => {
                    let mut rec = ResultRecord::new(r.value, opts);
                    rec.iterations = r.report.iterations;
                    rec.certified_gap = Some(r.report.certified_gap);
                    rec.constants = r.constants.map(|c| ConstantsRecord {
                        m: c.m,
                        alpha: c.alpha,
                        eps_prime: c.eps_prime,
                    });
                    rec
                }
                Err(Error::BudgetExceeded { budget, report }) => {
                    let mut rec = ResultRecord::new(-report.opt_value, opts);
                    rec.iterations = report.iterations;
                    rec.certified_gap = Some(report.certified_gap);
                    rec.uncertified = true;
                    if opts.timing {
                        rec.wall_time_s = Some(start.elapsed().as_secs_f64());
                    }
                    return Err(CliError::Solver {
                        message: format!(
                            "iteration budget of {budget} exhausted with certified gap {:.3e}",
                            report.certified_gap
                        ),
                        record: Some(Box::new(rec)),
                    });
                }
                Err(e) => return Err(core_error(e)),
            }
        }
        Method::Bruteforce => {
            let pair = file.to_pair()?;
            let cfg = BruteForceConfig {
                seed: opts.seed,
                tol: opts.epsilon,
                ..Default::default()
            };
            let value = bruteforce_diamond(&pair, &cfg).map_err(core_error)?;
            let mut rec = ResultRecord::new(value, opts);
            rec.iterations = cfg.restarts;
            rec.uncertified = true;
            rec
        }
        Method::UnitaryFormula => {
            let (u, v) = file.unitaries()?;
            ResultRecord::new(unitary_diamond(&u, &v).map_err(core_error)?, opts)
        }
    };
    if opts.timing {
        record.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(record)
}

pub fn render(record: &ResultRecord, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string(record).expect("records serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => {
            let mut s = format!(
                "value        {:.9}\nepsilon      {:e}\nmethod       {}\niterations   {}\n",
                record.value, record.epsilon, record.method, record.iterations
            );
            if let Some(c) = &record.constants {
                let _ = writeln!(
                    s,
                    "constants    M = {:.6e}, alpha = {:.6e}, eps_prime = {:.6e}",
                    c.m, c.alpha, c.eps_prime
                );
            }
            if let Some(g) = record.certified_gap {
                let _ = writeln!(s, "gap          {g:.3e}");
            }
            if let Some(t) = record.wall_time_s {
                let _ = writeln!(s, "wall time    {t:.3} s");
            }
            if record.uncertified {
                s.push_str("uncertified\n");
            }
            s
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// Runs `compute` on a file and reports through the given streams.
pub fn run_compute(
    input: &Path,
    opts: &ComputeOptions,
    format: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = read(input)
        .and_then(|text| Ok(ChannelFile::parse(&text)?))
        .and_then(|file| compute(&file, opts));
    match result {
        Ok(record) => {
            let _ = out.write_all(render(&record, format).as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            if let CliError::Solver {
                record: Some(rec), ..
            } = &e
            {
                let _ = out.write_all(render(rec, format).as_bytes());
            }
            e.exit_code()
        }
    }
}

pub fn convert(text: &str, from: Representation, to: Representation) -> Result<String, CliError> {
    let pair = match from {
        Representation::Stinespring => ChannelFile::parse(text)?.to_pair()?,
        Representation::Natural | Representation::Choi => {
            let mf = MatrixFile::parse(text)?;
            let want = if from == Representation::Natural {
                MatrixKind::Natural
            } else {
                MatrixKind::Choi
            };
            if mf.representation != want {
                return Err(CliError::Invalid(format!(
                    "input is a {:?} file, expected {want:?}",
                    mf.representation
                )));
            }
            stinespring_from_natural(&mf.to_natural()?)
        }
    };
    let json = match to {
        Representation::Stinespring => serde_json::to_string_pretty(&ChannelFile::from_pair(&pair)),
        Representation::Natural => {
            serde_json::to_string_pretty(&MatrixFile::from_natural(&natural_from_stinespring(&pair)))
        }
        Representation::Choi => {
            serde_json::to_string_pretty(&MatrixFile::from_choi(&choi_from_stinespring(&pair)))
        }
    };
    let mut json = json.expect("files serialize");
    json.push('\n');
    Ok(json)
}

pub fn run_convert(
    input: &Path,
    from: Representation,
    to: Representation,
    output: &Path,
    err: &mut dyn Write,
) -> i32 {
    let result = read(input).and_then(|text| convert(&text, from, to));
    match result {
        Ok(json) => match std::fs::write(output, json) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write {}: {e}", output.display());
                EXIT_INVALID
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}
