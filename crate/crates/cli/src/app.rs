//! Argument parsing and command execution.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use funcorr_core::{
    anti_correlation, co_correlation, compare_profiles, full_profile, mc_estimate, optimize_monotone, sup_correlation,
    weight_scheme, weighted_kappa, Direction, McOptions, SolverOptions, Step, StepValues, ValuationClass, WeightScheme,
};
use serde::Serialize;

use crate::io::{self, InputError, NamedMatrix};
use crate::report::{round, CompareReport, KappaEntry, KappaReport, McComponent, McReport, ProfileReport};

/// Allowed excess of a Monte Carlo estimate over the exact coefficient.
pub const MC_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "funcorr", version, about = "Functional correlation profiles and comparison of confusion matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute all seven coefficients and the kappa family.
    Coeffs {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Rank two matrices by CO, ANTI, II, ID.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Tie tolerance between coefficient values.
        #[arg(long, default_value_t = funcorr_core::comparator::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Comma-separated step order.
        #[arg(long, default_value = "CO,ANTI,II,ID")]
        order: String,
    },
    /// Check a coefficient against a Monte Carlo lower bound.
    McCheck {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Coefficient to check.
        #[arg(long, default_value = "SUP")]
        class: ValuationClass,
        /// Accepted samples.
        #[arg(long, default_value_t = McOptions::default().accepted_samples)]
        samples: u64,
        /// Cap on total draws.
        #[arg(long, default_value_t = McOptions::default().max_draws)]
        max_draws: u64,
    },
    /// Weighted kappa under the built-in weight schemes.
    Kappa {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum, default_value_t = Weights::All)]
        weights: Weights,
    },
    /// List the built-in fixtures.
    Fixtures,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Built-in matrix (repeatable).
    #[arg(long = "fixture", value_name = "NAME")]
    pub fixtures: Vec<String>,
    /// CSV or JSON matrix file.
    #[arg(value_name = "FILE")]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Decimal digits (default 6 for JSON, 4 for tables).
    #[arg(long)]
    pub digits: Option<u32>,
}

impl OutputArgs {
    fn digits(&self) -> u32 {
        self.digits.unwrap_or(match self.format {
            Format::Json => 6,
            Format::Table => 4,
        })
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Random starts per monotone solve.
    #[arg(long, default_value_t = SolverOptions::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = SolverOptions::default().seed)]
    pub seed: u64,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions { restarts: self.restarts, seed: self.seed, ..SolverOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    Indicator,
    Linear,
    Quadratic,
    All,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Core(#[from] funcorr_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 input error, 3 degenerate matrix, 4 invariant violation.
    pub fn exit_code(&self) -> u8 {
        let core = match self {
            CliError::Input(InputError::Matrix(e)) | CliError::Core(e) => Some(e),
            _ => None,
        };
        match core {
            Some(e) if e.is_degenerate() => 3,
            Some(funcorr_core::Error::InvariantViolation(_)) => 4,
            _ => 2,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, stderr: String::new(), code: 0 }
    }

    fn error(e: &CliError) -> Self {
        Self { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from_args<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { stdout: text, stderr: String::new(), code }
            } else {
                Output { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => return Output { stdout: String::new(), stderr: e.render().to_string(), code: 2 },
    };
    let sub = matches.subcommand().map(|(_, m)| m);
    match execute(&cli.command, sub) {
        Ok(out) => out,
        Err(e) => Output::error(&e),
    }
}

/// Fixtures and files in command-line order.
fn ordered_inputs(input: &InputArgs, matches: Option<&ArgMatches>) -> Result<Vec<NamedMatrix>, CliError> {
    let indices = |id: &str, n: usize| -> Vec<usize> {
        matches
            .and_then(|m| m.indices_of(id))
            .map(|it| it.collect())
            .unwrap_or_else(|| (0..n).collect())
    };
    let mut tagged: Vec<(usize, Result<NamedMatrix, InputError>)> = Vec::new();
    for (pos, name) in indices("fixtures", input.fixtures.len()).into_iter().zip(&input.fixtures) {
        tagged.push((pos, io::load_fixture(name)));
    }
    for (pos, path) in indices("files", input.files.len()).into_iter().zip(&input.files) {
        tagged.push((pos, io::read_file(path)));
    }
    tagged.sort_by_key(|(pos, _)| *pos);
    let inputs = tagged.into_iter().map(|(_, r)| r).collect::<Result<Vec<_>, _>>()?;
    if inputs.is_empty() {
        return Err(CliError::Usage("no input: give --fixture NAME or a matrix FILE".into()));
    }
    Ok(inputs)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// One document per input, or an array when there are several.
fn emit<T: Serialize>(docs: &[T], format: Format, table: impl Fn(&T) -> String) -> String {
    match format {
        Format::Json if docs.len() == 1 => to_json(&docs[0]),
        Format::Json => to_json(&docs),
        Format::Table => docs.iter().map(table).collect::<Vec<_>>().join("\n"),
    }
}

fn execute(command: &Command, matches: Option<&ArgMatches>) -> Result<Output, CliError> {
    match command {
        Command::Coeffs { input, output, solver } => {
            let opts = solver.options();
            let digits = output.digits();
            let docs = ordered_inputs(input, matches)?
                .iter()
                .map(|m| {
                    let p = full_profile(&m.matrix, &opts)?;
                    Ok(ProfileReport::new(m, &p, opts.seed, opts.restarts, digits))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Output::ok(emit(&docs, output.format, ProfileReport::table)))
        }
        Command::Compare { input, output, solver, epsilon, order } => {
            let opts = solver.options();
            let order = Step::parse_order(order)?;
            let inputs = ordered_inputs(input, matches)?;
            let [a, b] = inputs.as_slice() else {
                return Err(CliError::Usage(format!("compare needs exactly two matrices, got {}", inputs.len())));
            };
            let va = StepValues::compute(&a.matrix, &opts)?;
            let vb = StepValues::compute(&b.matrix, &opts)?;
            let verdict = compare_profiles(&va, &vb, *epsilon, &order)?;
            let doc = CompareReport::new(a, b, &verdict, &order, opts.seed, opts.restarts, output.digits());
            Ok(Output::ok(emit(&[doc], output.format, CompareReport::table)))
        }
        Command::McCheck { input, output, solver, class, samples, max_draws } => {
            let opts = solver.options();
            let mc = McOptions { accepted_samples: *samples, seed: opts.seed, max_draws: *max_draws };
            let mut docs = Vec::new();
            for m in ordered_inputs(input, matches)? {
                docs.push(mc_check(&m, *class, &opts, &mc, output.digits())?);
            }
            let code = if docs.iter().all(|d| d.within_bound) { 0 } else { 4 };
            let mut out = Output::ok(emit(&docs, output.format, McReport::table));
            if code != 0 {
                out.stderr = "error: Monte Carlo estimate exceeds the exact coefficient\n".into();
                out.code = code;
            }
            Ok(out)
        }
        Command::Kappa { input, output, weights } => {
            let schemes: &[WeightScheme] = match weights {
                Weights::Indicator => &[WeightScheme::Indicator],
                Weights::Linear => &[WeightScheme::Linear],
                Weights::Quadratic => &[WeightScheme::Quadratic],
                Weights::All => &[WeightScheme::Indicator, WeightScheme::Linear, WeightScheme::Quadratic],
            };
            let digits = output.digits();
            let docs = ordered_inputs(input, matches)?
                .iter()
                .map(|m| {
                    let d = m.matrix.dim();
                    let kappa = schemes
                        .iter()
                        .map(|s| {
                            let value = weighted_kappa(&m.matrix, &weight_scheme(s, d)?)?;
                            Ok(KappaEntry { scheme: s.name().to_string(), value: round(value, digits) })
                        })
                        .collect::<Result<Vec<_>, funcorr_core::Error>>()?;
                    Ok(KappaReport { matrix: m.name.clone(), d, mass_deficit: round(m.matrix.mass_deficit(), digits), kappa })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Output::ok(emit(&docs, output.format, |r| r.table(digits))))
        }
        Command::Fixtures => {
            let mut s = String::new();
            for f in crate::fixtures::FIXTURES {
                s.push_str(&format!("{:<10} d={}  {}\n", f.name, f.dim(), f.note));
            }
            Ok(Output::ok(s))
        }
    }
}

/// Exact coefficient for `class` by the primary route.
pub fn exact_value(m: &funcorr_core::ConfusionMatrix, class: ValuationClass, opts: &SolverOptions) -> funcorr_core::Result<f64> {
    Ok(match class {
        ValuationClass::Sup => sup_correlation(m)?.value,
        ValuationClass::Ii => optimize_monotone(m, Direction::Increasing, opts)?.value,
        ValuationClass::Id => optimize_monotone(m, Direction::Decreasing, opts)?.value,
        ValuationClass::Co => co_correlation(m, opts)?.value,
        ValuationClass::Anti => anti_correlation(m, opts)?.value,
        ValuationClass::Mon => exact_value(m, ValuationClass::Ii, opts)?.max(exact_value(m, ValuationClass::Id, opts)?),
        ValuationClass::Coanti => exact_value(m, ValuationClass::Co, opts)?.max(exact_value(m, ValuationClass::Anti, opts)?),
    })
}

/// Compound classes are estimated as the maximum of their component estimates.
fn mc_check(m: &NamedMatrix, class: ValuationClass, opts: &SolverOptions, mc: &McOptions, digits: u32) -> Result<McReport, CliError> {
    let components: &[ValuationClass] = match class {
        ValuationClass::Mon => &[ValuationClass::Ii, ValuationClass::Id],
        ValuationClass::Coanti => &[ValuationClass::Co, ValuationClass::Anti],
        _ => std::slice::from_ref(&class),
    };
    let mut parts = Vec::new();
    let mut estimate = f64::NEG_INFINITY;
    for &c in components {
        let e = mc_estimate(&m.matrix, c, mc)?;
        estimate = estimate.max(e.value);
        parts.push(McComponent { class: c.name().to_string(), estimate: round(e.value, digits), accepted: e.accepted, draws: e.draws });
    }
    let exact = exact_value(&m.matrix, class, opts)?;
    Ok(McReport {
        matrix: m.name.clone(),
        class: class.name().to_string(),
        samples: mc.accepted_samples,
        seed: mc.seed,
        estimate: round(estimate, digits),
        exact: round(exact, digits),
        gap: round(exact - estimate, digits),
        within_bound: estimate <= exact + MC_TOLERANCE,
        components: parts,
    })
}
