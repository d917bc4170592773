//! The `worstcase` command line: LPT decision trees, worst-case ratio searches
//! and a brute-force ratio checker for concrete job lists.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use worstcase_core::makespan::{
    brute_oracle, fmt_z, lpt_ratio, lpt_ratio_bisect, lpt_tree, OracleError, PipelineError,
};
use worstcase_core::rational::int;
use worstcase_core::search::{Alpha, HardExampleReport, SearchConfig, SearchError};
use worstcase_core::trace::{export_dot, export_json, export_text};
use worstcase_core::{format_rational, parse_rational, ExtRational, Rational, TraceConfig, TraceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "worstcase", version, about = "Exact worst-case ratios of traced approximation algorithms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build and print the decision tree of the algorithm.
    Tree(Common),
    /// Compute the worst-case ratio and a hard example.
    Ratio(RatioArgs),
    /// Exact ratio of LPT on one job list, by brute force.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Lpt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

impl Toggle {
    fn on(self) -> bool {
        self == Toggle::On
    }
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long, value_enum, default_value = "lpt")]
    pub problem: Problem,
    /// Number of jobs.
    #[arg(short = 'n', long = "jobs-count")]
    pub n: usize,
    /// Number of machines.
    #[arg(short = 'm', long = "machines")]
    pub m: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Drop branch sides whose region has empty interior.
    #[arg(long, value_enum, default_value = "on")]
    pub prune_interior: Toggle,
    /// Node budget for tree construction.
    #[arg(long, env = "WORSTCASE_MAX_NODES", default_value_t = 1_000_000)]
    pub max_nodes: usize,
    #[arg(long, env = "WORSTCASE_WORKERS", default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[command(flatten)]
    pub common: Common,
    /// Bisect to this bracket width instead of solving exactly.
    #[arg(long, value_parser = rational_arg)]
    pub tol: Option<Rational>,
    /// Upper end of the initial bisection bracket.
    #[arg(long, value_parser = rational_arg, default_value = "2")]
    pub hi: Rational,
    #[arg(long, value_enum, default_value = "on")]
    pub check1: Toggle,
    #[arg(long, value_enum, default_value = "on")]
    pub check2: Toggle,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value = "lpt")]
    pub problem: Problem,
    /// Number of machines.
    #[arg(short = 'm', long = "machines")]
    pub m: usize,
    /// Whitespace-separated job sizes, largest first.
    #[arg(long, conflicts_with = "jobs_file", required_unless_present = "jobs_file")]
    pub jobs: Option<String>,
    #[arg(long)]
    pub jobs_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Budget(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(s) | Failure::Budget(s) => f.write_str(s),
        }
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Trace(t) => t.into(),
            PipelineError::Search(s) => Failure::Config(s.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(Failure::Config(msg)) => Outcome { code: EXIT_CONFIG, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Budget(msg)) => Outcome { code: EXIT_BUDGET, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

fn dispatch(cmd: &Command) -> Result<String, Failure> {
    match cmd {
        Command::Tree(c) => run_tree(c),
        Command::Ratio(r) => run_ratio(r),
        Command::Oracle(o) => run_oracle(o),
    }
}

fn validate(c: &Common) -> Result<(), Failure> {
    if c.n == 0 || c.m == 0 {
        return Err(Failure::Config("n and m must be at least 1".into()));
    }
    if c.workers == 0 {
        return Err(Failure::Config("workers must be at least 1".into()));
    }
    if c.max_nodes == 0 {
        return Err(Failure::Config("max-nodes must be at least 1".into()));
    }
    Ok(())
}

fn trace_config(c: &Common) -> TraceConfig {
    TraceConfig {
        prune_empty_interior: c.prune_interior.on(),
        max_nodes: c.max_nodes,
        workers: c.workers,
        ..TraceConfig::default()
    }
}

fn run_tree(c: &Common) -> Result<String, Failure> {
    validate(c)?;
    let tree = lpt_tree(c.m, c.n, false, &trace_config(c))?;
    Ok(match c.format {
        Format::Dot => export_dot(&tree),
        Format::Text => export_text(&tree),
        Format::Json => pretty(&export_json(&tree)),
    })
}

fn run_ratio(r: &RatioArgs) -> Result<String, Failure> {
    let c = &r.common;
    validate(c)?;
    if c.format == Format::Dot {
        return Err(Failure::Config("dot output is only available for `tree`".into()));
    }
    let search = SearchConfig {
        check1: r.check1.on(),
        check2: r.check2.on(),
        workers: c.workers,
        ..SearchConfig::default()
    };
    let trace = trace_config(c);
    let report = match &r.tol {
        None => lpt_ratio(c.m, c.n, &trace, &search)?,
        Some(tol) => {
            if *tol <= int(0) {
                return Err(Failure::Config("tol must be positive".into()));
            }
            lpt_ratio_bisect(c.m, c.n, int(1), r.hi.clone(), tol.clone(), &trace, &search)?
        }
    };
    Ok(match c.format {
        Format::Json => pretty(&report_json(&report)),
        _ => report_text(&report),
    })
}

fn run_oracle(o: &OracleArgs) -> Result<String, Failure> {
    if o.format == Format::Dot {
        return Err(Failure::Config("dot output is only available for `tree`".into()));
    }
    let text = match (&o.jobs, &o.jobs_file) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?,
        (None, None) => return Err(Failure::Config("no jobs given".into())),
    };
    let jobs = text
        .split_whitespace()
        .map(|t| parse_rational(t).map_err(|e| Failure::Config(format!("job `{t}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let r = brute_oracle(&jobs, o.m)?;
    Ok(match o.format {
        Format::Json => pretty(&json!({
            "lpt": format_rational(&r.lpt_makespan),
            "opt": format_rational(&r.opt_makespan),
            "ratio": r.ratio.to_string(),
            "lpt_assignment": r.lpt_assignment,
            "opt_assignment": r.opt_assignment,
        })),
        _ => format!("{} {} {}\n", format_rational(&r.lpt_makespan), format_rational(&r.opt_makespan), r.ratio),
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn alpha_json(a: &Alpha) -> Value {
    match a {
        Alpha::Exact(ExtRational::Finite(r)) => json!({
            "num": r.numer().to_string(),
            "den": r.denom().to_string(),
        }),
        Alpha::Exact(inf) => json!({ "value": inf.to_string() }),
        Alpha::Interval { lo, hi } => json!({ "lo": format_rational(lo), "hi": format_rational(hi) }),
    }
}

/// The ratio report as JSON. Rationals are `"p/q"` strings.
pub fn report_json(r: &HardExampleReport<Vec<usize>>) -> Value {
    json!({
        "alpha": alpha_json(&r.alpha),
        "attained": r.attained,
        "witness": r.witness.iter().map(format_rational).collect::<Vec<_>>(),
        "witness_ratio": r.witness_ratio.to_string(),
        "lpt_assignment": r.algorithm_output,
        "opt_assignment": r.optimal_output,
        "leaf_id": r.leaf_id,
        "leaf_constraints": r.leaf_constraints.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "stats": {
            "leaves_total": r.stats.leaves_total,
            "leaves_after_check1": r.stats.leaves_after_check1(),
            "leaves_after_check2": r.stats.leaves_after_check2(),
            "lps_solved": r.stats.lps_solved,
            "wall_ms": r.stats.wall_ms,
        },
    })
}

fn report_text(r: &HardExampleReport<Vec<usize>>) -> String {
    let witness: Vec<String> = r.witness.iter().map(format_rational).collect();
    let mut out = format!("alpha = {}\n", r.alpha);
    out += &format!("witness = ({}) ratio {}{}\n", witness.join(", "), r.witness_ratio, if r.attained { "" } else { " (not attained)" });
    out += &format!("lpt = {}\nopt = {}\n", fmt_z(&r.algorithm_output), fmt_z(&r.optimal_output));
    out += &format!(
        "leaves: {} total, {} after check1, {} after check2; {} LPs; {} ms\n",
        r.stats.leaves_total,
        r.stats.leaves_after_check1(),
        r.stats.leaves_after_check2(),
        r.stats.lps_solved,
        r.stats.wall_ms
    );
    out
}
