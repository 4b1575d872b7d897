//! Command implementations behind the `safehorizon` binary.
//!
//! Every command renders into a [`Report`] so it can be driven from tests
//! without spawning a process.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use safehorizon::{
    atom_grid_worst_case, extension_coefficient, k_linear, monte_carlo_conditional_survival,
    scenario_trace, scenario_trace_for_constraint, worst_case_posterior,
    worst_case_posterior_pfd_zero, Anticipation, DeploymentSchedule, Extent, KnowledgeConstraint,
    OperationCount, PfdPrior, ScenarioTrace, SimulationConfig,
};

/// Prior fault-freeness probabilities tabulated by `table1`.
pub const TABLE1_PP: [f64; 5] = [0.92, 0.82, 0.72, 0.5, 0.1];

#[derive(Debug, Parser)]
#[command(
    name = "safehorizon",
    version,
    about = "Conservative confidence horizons from mishap-free operation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Worst-case probability of no mishap over future demands.
    Bound {
        #[command(flatten)]
        constraint: ConstraintArgs,
        /// Past mishap-free demands.
        #[arg(long)]
        tpast: f64,
        /// Future demands.
        #[arg(long)]
        tfut: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mishap probability against the future/past ratio for several P_p.
    Figure1 {
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.72, 0.82, 0.9, 0.92, 0.99])]
        pp: Vec<f64>,
        /// Ratio grid as start:end:step.
        #[arg(long, default_value = "0:10:0.1")]
        rho: GridSpec,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extension coefficients k and k_linear at a confidence level.
    Table1 {
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Confidence horizon over time for a deployment schedule.
    Scenario {
        /// Schedule JSON file.
        #[arg(
            long,
            conflicts_with = "schedule_json",
            required_unless_present = "schedule_json"
        )]
        schedule: Option<PathBuf>,
        /// Schedule JSON given inline.
        #[arg(long)]
        schedule_json: Option<String>,
        /// Fixed extension coefficient.
        #[arg(long, conflicts_with_all = ["pp", "pl", "confidence"])]
        k: Option<f64>,
        #[command(flatten)]
        constraint: ConstraintArgs,
        /// Required confidence when k is derived from a constraint.
        #[arg(long)]
        confidence: Option<f64>,
        /// Time grid as start:end:step.
        #[arg(long)]
        grid: GridSpec,
        /// Ignore production changes that have not happened yet.
        #[arg(long)]
        unaware: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-check the engine against the grid and Monte Carlo oracles.
    Validate {
        #[command(flatten)]
        constraint: ConstraintArgs,
        #[arg(long)]
        tpast: f64,
        #[arg(long)]
        tfut: f64,
        #[arg(long, default_value_t = 10_000)]
        grid_size: usize,
        /// Largest accepted gap between grid oracle and engine.
        #[arg(long, default_value_t = 1e-3)]
        gap_tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ConstraintArgs {
    /// Prior probability that the pfd is zero.
    #[arg(long, conflicts_with_all = ["pl", "ql"])]
    pub pp: Option<f64>,
    /// Prior probability that the pfd is at most --ql.
    #[arg(long, requires = "ql")]
    pub pl: Option<f64>,
    #[arg(long, requires = "pl")]
    pub ql: Option<f64>,
}

impl ConstraintArgs {
    fn resolve(&self) -> Result<Option<KnowledgeConstraint>> {
        Ok(match (self.pp, self.pl, self.ql) {
            (Some(p), None, None) => Some(KnowledgeConstraint::pfd_zero(p)?),
            (None, Some(p), Some(q)) => Some(KnowledgeConstraint::pfd_bounded(p, q)?),
            (None, None, None) => None,
            _ => bail!("give either --pp or both --pl and --ql"),
        })
    }

    fn required(&self) -> Result<KnowledgeConstraint> {
        self.resolve()?
            .ok_or_else(|| anyhow!("a constraint is required: --pp or --pl with --ql"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    /// Six significant digits.
    Human,
    /// Seventeen significant digits.
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = Precision::Human)]
    pub precision: Precision,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `start:end:step` grid with `start < end` and `step > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        Ok(safehorizon::uniform_grid(self.start, self.end, self.step)?)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, step] = parts.as_slice() else {
            return Err(format!("expected start:end:step, got `{s}`"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        let spec = GridSpec {
            start: num(start)?,
            end: num(end)?,
            step: num(step)?,
        };
        if spec.start.is_nan() || spec.end.is_nan() || spec.start >= spec.end {
            return Err("grid start must be below its end".into());
        }
        if spec.step.is_nan() || spec.step <= 0.0 {
            return Err("grid step must be positive".into());
        }
        Ok(spec)
    }
}

/// Rendered command output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    /// Diagnostics for stderr.
    pub warnings: Vec<String>,
    /// False when a validation check failed.
    pub passed: bool,
    pub out: Option<PathBuf>,
}

/// Formats `x` with `digits` significant digits, locale-independently.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if exp < -5 || exp >= digits as i32 {
        format!("{:.*e}", digits - 1, x)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    };
    trim_zeros(s)
}

fn trim_zeros(s: String) -> String {
    let (mantissa, exponent) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s.as_str(), ""),
    };
    if !mantissa.contains('.') {
        return s;
    }
    let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{trimmed}{exponent}")
}

struct Numbers(Precision);

impl Numbers {
    fn f(&self, x: f64) -> String {
        match self.0 {
            Precision::Human => format_sig(x, 6),
            Precision::Full => format_sig(x, 17),
        }
    }

    fn extent(&self, x: Extent) -> String {
        self.f(x.to_f64())
    }
}

fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_sig(x, 1))
    }
}

/// CSV with a header row, or a JSON array of objects keyed by the header.
fn table(header: &[&str], rows: &[Vec<f64>], output: &OutputArgs) -> String {
    match output.format {
        Format::Csv => {
            let n = Numbers(output.precision);
            let mut s = header.join(",");
            s.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&v| n.f(v)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, Value> = header
                        .iter()
                        .zip(row)
                        .map(|(h, &v)| (h.to_string(), json_num(v)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&items).expect("json");
            s.push('\n');
            s
        }
    }
}

fn ops(name: &str, t: f64) -> Result<OperationCount> {
    OperationCount::new(t).with_context(|| format!("--{name}"))
}

fn report(body: String, output: &OutputArgs) -> Report {
    Report {
        body,
        warnings: Vec::new(),
        passed: true,
        out: output.out.clone(),
    }
}

pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Bound {
            constraint,
            tpast,
            tfut,
            output,
        } => cmd_bound(&constraint.required()?, *tpast, *tfut, output),
        Command::Figure1 { pp, rho, output } => cmd_figure1(pp, &rho.points()?, output),
        Command::Table1 { confidence, output } => cmd_table1(*confidence, output),
        Command::Scenario {
            schedule,
            schedule_json,
            k,
            constraint,
            confidence,
            grid,
            unaware,
            output,
        } => {
            let schedule = load_schedule(schedule.as_ref(), schedule_json.as_deref())?;
            let source = match (k, constraint.resolve()?, confidence) {
                (Some(k), None, None) => KSource::Fixed(*k),
                (None, Some(c), Some(conf)) => KSource::Constraint(c, *conf),
                (None, Some(_), None) => bail!("--confidence is required with a constraint"),
                _ => bail!("give either --k or a constraint with --confidence"),
            };
            let mode = if *unaware {
                Anticipation::Unaware
            } else {
                Anticipation::Aware
            };
            cmd_scenario(&schedule, source, &grid.points()?, mode, output)
        }
        Command::Validate {
            constraint,
            tpast,
            tfut,
            grid_size,
            gap_tol,
            mc_samples,
            seed,
            output,
        } => cmd_validate(
            &constraint.required()?,
            *tpast,
            *tfut,
            &ValidateOptions {
                grid_size: *grid_size,
                gap_tol: *gap_tol,
                mc_samples: *mc_samples,
                seed: *seed,
            },
            output,
        ),
    }
}

pub fn cmd_bound(
    constraint: &KnowledgeConstraint,
    tpast: f64,
    tfut: f64,
    output: &OutputArgs,
) -> Result<Report> {
    let r = worst_case_posterior(constraint, ops("tpast", tpast)?, ops("tfut", tfut)?)?;
    let body = table(
        &["bound", "minimizer_q", "mishap_prob"],
        &[vec![r.bound, r.minimizer_q, 1.0 - r.bound]],
        output,
    );
    Ok(report(body, output))
}

pub fn cmd_figure1(pp: &[f64], ratios: &[f64], output: &OutputArgs) -> Result<Report> {
    let mut rows = Vec::with_capacity(pp.len() * ratios.len());
    for &p in pp {
        for &rho in ratios {
            let r = worst_case_posterior_pfd_zero(p, OperationCount::new(1.0)?, ops("rho", rho)?)?;
            rows.push(vec![p, rho, 1.0 - r.bound]);
        }
    }
    Ok(report(
        table(&["pp", "ratio", "mishap_prob"], &rows, output),
        output,
    ))
}

pub fn cmd_table1(confidence: f64, output: &OutputArgs) -> Result<Report> {
    let unit = OperationCount::new(1.0)?;
    let mut rows = Vec::new();
    for p in TABLE1_PP {
        let k = extension_coefficient(&KnowledgeConstraint::pfd_zero(p)?, confidence, unit)?;
        rows.push(vec![p, k.to_f64(), k.map(k_linear).to_f64()]);
    }
    Ok(report(
        table(&["pp", "k", "k_linear"], &rows, output),
        output,
    ))
}

/// Where a scenario's extension coefficient comes from.
#[derive(Debug, Clone, Copy)]
pub enum KSource {
    Fixed(f64),
    Constraint(KnowledgeConstraint, f64),
}

pub fn load_schedule(path: Option<&PathBuf>, inline: Option<&str>) -> Result<DeploymentSchedule> {
    match (path, inline) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading schedule {}", p.display()))?;
            DeploymentSchedule::from_json(&text)
                .with_context(|| format!("schedule {}", p.display()))
        }
        (None, Some(text)) => DeploymentSchedule::from_json(text).context("--schedule-json"),
        _ => bail!("give exactly one of --schedule or --schedule-json"),
    }
}

pub fn cmd_scenario(
    schedule: &DeploymentSchedule,
    source: KSource,
    times: &[f64],
    mode: Anticipation,
    output: &OutputArgs,
) -> Result<Report> {
    let trace: ScenarioTrace = match source {
        KSource::Fixed(k) => scenario_trace(schedule, k, times, mode)?,
        KSource::Constraint(c, conf) => {
            scenario_trace_for_constraint(schedule, &c, conf, times, mode)?
        }
    };
    let mut warnings = Vec::new();
    let rows: Vec<Vec<f64>> = trace
        .rows
        .iter()
        .map(|row| {
            if let Err(e) = &row.t_hor {
                warnings.push(format!("t = {}: {e}", row.t));
            }
            let t_hor = row.t_hor.as_ref().map_or(f64::NAN, |h| h.to_f64());
            let ratio = row.ratio().map_or(f64::NAN, Extent::to_f64);
            vec![row.t, row.fleet, row.t_past.demands(), t_hor, ratio]
        })
        .collect();
    let mut r = report(
        table(&["t", "fleet", "T_past", "t_hor", "ratio"], &rows, output),
        output,
    );
    r.warnings = warnings;
    Ok(r)
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub grid_size: usize,
    pub gap_tol: f64,
    pub mc_samples: u64,
    pub seed: u64,
}

fn whole_demands(name: &str, t: f64) -> Result<u64> {
    if t.fract() != 0.0 || t < 0.0 || t > u64::MAX as f64 {
        bail!("--{name} must be a whole number of demands for simulation, got {t}");
    }
    Ok(t as u64)
}

/// Engine bound against the grid oracle and a simulation of the engine's
/// own worst-case prior.
pub fn cmd_validate(
    constraint: &KnowledgeConstraint,
    tpast: f64,
    tfut: f64,
    opts: &ValidateOptions,
    output: &OutputArgs,
) -> Result<Report> {
    let (tp, tf) = (ops("tpast", tpast)?, ops("tfut", tfut)?);
    let engine = worst_case_posterior(constraint, tp, tf)?;
    let grid = atom_grid_worst_case(constraint, tp, tf, opts.grid_size)?;

    let mass = constraint.constrained_mass();
    let good_q = match *constraint {
        KnowledgeConstraint::PfdZero { .. } => 0.0,
        KnowledgeConstraint::PfdBounded { q_l, .. } => q_l,
    };
    let prior = PfdPrior::new([(good_q, mass), (engine.minimizer_q, 1.0 - mass)])?;
    let mc = monte_carlo_conditional_survival(&SimulationConfig {
        n_samples: opts.mc_samples,
        seed: opts.seed,
        t_past: whole_demands("tpast", tpast)?,
        t_fut: whole_demands("tfut", tfut)?,
        prior,
    })?;

    let gap = grid - engine.bound;
    let dominance = gap >= -1e-12 && gap < opts.gap_tol;
    let conservative = mc.estimate + 3.0 * mc.std_error >= engine.bound - 1e-12;
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };

    let body = match output.format {
        Format::Csv => {
            let n = Numbers(output.precision);
            let mut s = String::from("check,value\n");
            for (name, v) in [
                ("engine_bound", engine.bound),
                ("minimizer_q", engine.minimizer_q),
                ("grid_bound", grid),
                ("grid_gap", gap),
                ("mc_estimate", mc.estimate),
                ("mc_std_error", mc.std_error),
            ] {
                let _ = writeln!(s, "{name},{}", n.f(v));
            }
            let _ = writeln!(s, "oracle_dominance,{}", verdict(dominance));
            let _ = writeln!(s, "mc_conservatism,{}", verdict(conservative));
            let _ = writeln!(s, "result,{}", verdict(dominance && conservative));
            s
        }
        Format::Json => {
            let v = json!({
                "engine_bound": engine.bound,
                "minimizer_q": engine.minimizer_q,
                "grid_bound": grid,
                "grid_gap": gap,
                "mc_estimate": mc.estimate,
                "mc_std_error": mc.std_error,
                "oracle_dominance": verdict(dominance),
                "mc_conservatism": verdict(conservative),
                "result": verdict(dominance && conservative),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
    };
    let mut r = report(body, output);
    r.passed = dominance && conservative;
    Ok(r)
}

/// Exit status for a finished command: 0 success, 1 failed validation.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed {
        0
    } else {
        1
    }
}

/// Renders an [`Extent`] the way CSV output does.
pub fn render_extent(x: Extent, precision: Precision) -> String {
    Numbers(precision).extent(x)
}
