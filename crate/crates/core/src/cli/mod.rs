//! Command-line front end.
//!
//! Every subcommand builds a [`Document`] which is then rendered according to
//! `--format`. Exit codes: 0 on success, 2 for usage or domain errors, 1 for
//! anything else (I/O failures, internal errors).

pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::calibration::{self, CalibrationRow, Method};
use crate::error::Error;
use crate::inference::{self, Direction, EvidentialReport, PollSpec, TrialSpec};
use crate::montecarlo::{self, McConfig};
use crate::normal_math;
use crate::roc::{self, RocModel};
use crate::types::{Odds, Probability, ZScore};

use output::{Body, Document, OutputFormat, RecordBuilder, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "evidential",
    version,
    about = "One-sided p-values as likelihood ratios, posteriors and sign-error risk"
)]
pub struct Cli {
    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        env = "EVIDENTIAL_FORMAT",
        default_value = "text"
    )]
    pub format: OutputFormat,

    /// Significant digits for numeric fields.
    #[arg(long, global = true, default_value_t = 6,
          value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a one-sided p-value or z-statistic into likelihood ratios.
    Calibrate(CalibrateArgs),
    /// Full evidential report for a trial's summary statistics.
    Report(ReportArgs),
    /// The four-method comparison table.
    Table1(Table1Args),
    /// LR-versus-p curves for the four methods.
    Figure1(Figure1Args),
    /// Binormal ROC points, secant and tangent slopes, convexity check.
    Roc(RocArgs),
    /// Two-candidate poll report with an exact binomial annex.
    Poll(PollArgs),
    /// Seeded Monte Carlo checks.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Marsman,
    #[value(alias = "mle-lr", alias = "mle_lr")]
    Mle,
    Goodman,
    Sellke,
    All,
}

impl MethodArg {
    fn selects(self, m: Method) -> bool {
        match self {
            MethodArg::All => true,
            MethodArg::Marsman => m == Method::Marsman,
            MethodArg::Mle => m == Method::MleLr,
            MethodArg::Goodman => m == Method::Goodman,
            MethodArg::Sellke => m == Method::Sellke,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Greater,
    Less,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Greater => Direction::Greater,
            DirectionArg::Less => Direction::Less,
        }
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["p", "z"])))]
pub struct CalibrateArgs {
    /// One-sided p-value in (0, 1).
    #[arg(long)]
    pub p: Option<f64>,
    /// Standardized effect; p = Phi(-|z|).
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub prior_odds: f64,
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Observed effect estimate.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_obs: f64,
    /// Standard error of the estimate.
    #[arg(long)]
    pub se: f64,
    /// Dividing value of the effect.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Direction stated before seeing the data; defaults to the observed one.
    #[arg(long, value_enum)]
    pub favored: Option<DirectionArg>,
    /// Sample size, carried for reference only.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub prior_odds: f64,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub z: f64,
    #[arg(long, default_value_t = 1.0)]
    pub prior_odds: f64,
    /// Also show values computed from p rounded to two decimals, displayed
    /// as a printed table would show them.
    #[arg(long)]
    pub paper_rounding: bool,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long, default_value_t = 0.001)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p_max: f64,
    /// Number of grid points, evenly spaced and including both ends.
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Also write an SVG line plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    /// Separation of the two unit-variance normals.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Cutoff grid as start:stop:step.
    #[arg(long, default_value = "-4:4:0.1", allow_hyphen_values = true)]
    pub cutoffs: String,
}

#[derive(Debug, Args)]
pub struct PollArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, default_value_t = 0.5)]
    pub p0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub prior_odds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    /// Fraction of N(true-theta, se^2) draws at or above --cutoff.
    Exceedance,
    /// Empirical versus analytic secant-product LR at (--delta, --cutoff).
    SecantProduct,
    /// Fraction of draws on the far side of --delta from --true-theta.
    SignError,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = montecarlo::DEFAULT_N_SIMS)]
    pub n_sims: u64,
    #[arg(long, value_enum, default_value = "exceedance")]
    pub mode: SimMode,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub true_theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub se: f64,
    /// Threshold; accepts -inf / inf.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Worker threads; the result does not depend on this.
    #[arg(long)]
    pub workers: Option<NonZeroUsize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_INTERNAL,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let doc = match &cli.command {
        Command::Calibrate(a) => cmd_calibrate(a)?,
        Command::Report(a) => cmd_report(a)?,
        Command::Table1(a) => cmd_table1(a)?,
        Command::Figure1(a) => cmd_figure1(a)?,
        Command::Roc(a) => cmd_roc(a)?,
        Command::Poll(a) => cmd_poll(a)?,
        Command::Simulate(a) => cmd_simulate(a)?,
    };
    let rendered = doc.render(cli.format, cli.precision as usize);
    match &cli.out {
        Some(path) => fs::write(path, rendered)?,
        None => stdout.write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn prior(odds: f64) -> CliResult<Odds> {
    Ok(Odds::new(odds)?)
}

fn row_columns() -> Vec<String> {
    [
        "method",
        "formula",
        "prior",
        "lr",
        "orientation",
        "posterior",
        "valid",
    ]
    .map(String::from)
    .to_vec()
}

fn row_values(r: &CalibrationRow) -> Vec<Value> {
    vec![
        r.method.label().into(),
        r.method.formula().into(),
        r.prior_description.clone().into(),
        r.lr.value().into(),
        r.lr.orientation().as_str().into(),
        r.posterior.value().into(),
        r.valid.into(),
    ]
}

pub fn cmd_calibrate(a: &CalibrateArgs) -> CliResult<Document> {
    let prior = prior(a.prior_odds)?;
    let (p, z) = match (a.p, a.z) {
        (Some(p), None) => {
            let p = Probability::new(p)?;
            (p, calibration::z_from_one_sided_p(p)?)
        }
        (None, Some(z)) => {
            let z = ZScore::new(z)?;
            (calibration::one_sided_p_from_z(z)?, z)
        }
        _ => return Err(CliError::Usage("give exactly one of --p or --z".into())),
    };
    let mut columns = vec!["p".to_string(), "z".to_string()];
    columns.extend(row_columns());
    let rows = calibration::rows_for(p, z, prior)?
        .iter()
        .filter(|r| a.method.selects(r.method))
        .map(|r| {
            let mut v: Vec<Value> = vec![p.value().into(), z.value().into()];
            v.extend(row_values(r));
            v
        })
        .collect();
    Ok(Document::single(
        "calibration",
        Body::Table { columns, rows },
    ))
}

/// Flat view of a report: scalar fields by name, calibration rows as
/// `<method>_lr`, `<method>_posterior`, `<method>_orientation`, and the
/// Sellke validity flag.
pub fn push_report(r: &mut RecordBuilder, report: &EvidentialReport) {
    r.push("z", report.z.value())
        .push("p_one_sided", report.p_one_sided.value())
        .push("p_two_sided", report.p_two_sided.value())
        .push("observed_matches_favored", report.observed_matches_favored);
    for row in &report.rows {
        let key = row.method.key();
        r.push(format!("{key}_lr"), row.lr.value())
            .push(format!("{key}_posterior"), row.posterior.value())
            .push(format!("{key}_orientation"), row.lr.orientation().as_str());
    }
    r.push("sellke_valid", report.row(Method::Sellke).valid)
        .push("posterior_favored", report.posterior_favored.value())
        .push("sign_error_prob", report.sign_error_prob.value())
        .push("observed_power", report.observed_power.value());
}

pub fn cmd_report(a: &ReportArgs) -> CliResult<Document> {
    let mut trial = TrialSpec::new(a.theta_obs, a.se, a.delta)?;
    if let Some(d) = a.favored {
        trial = trial.favoring(d.into());
    }
    if let Some(n) = a.n {
        trial = trial.with_n(n);
    }
    let report = inference::evidential_report(&trial, prior(a.prior_odds)?)?;
    let mut r = RecordBuilder::new();
    push_report(&mut r, &report);
    let mut doc = Document::single("report", r.build());
    if a.favored.is_none() {
        let side = trial
            .observed_direction()
            .map_or("neither (z = 0)", Direction::as_str);
        doc = doc.with_note(format!(
            "no favored direction given; oriented to the observed direction: {side}"
        ));
    }
    Ok(doc)
}

/// Percentage as a printed table shows it: whole percent, truncated.
pub fn truncated_percent(p: f64) -> String {
    // guard against 0.84 * 100 landing just below 84
    format!("{}%", (p * 100.0 + 1e-9).floor())
}

pub fn cmd_table1(a: &Table1Args) -> CliResult<Document> {
    let prior = prior(a.prior_odds)?;
    let z = ZScore::new(a.z)?;
    let p = calibration::one_sided_p_from_z(z)?;
    let rows = calibration::rows_for(p, z, prior)?;
    let mut columns = row_columns();
    let mut values: Vec<Vec<Value>> = rows.iter().map(row_values).collect();

    let mut doc = Document::default();
    if a.paper_rounding {
        let rounded = calibration::table_with_rounded_p(z, prior)?;
        columns.extend(
            [
                "lr_rounded_p",
                "posterior_rounded_p",
                "lr_display",
                "posterior_display",
            ]
            .map(String::from),
        );
        for (v, r) in values.iter_mut().zip(&rounded) {
            v.push(r.lr.value().into());
            v.push(r.posterior.value().into());
            v.push(format!("{:.2}", r.lr.value()).into());
            v.push(truncated_percent(r.posterior.value()).into());
        }
        doc = doc.with_note(format!(
            "rounded columns use p = {:.2}; display posteriors are truncated to whole percent",
            (p.value() * 100.0).round() / 100.0
        ));
    }
    if rows.iter().any(|r| !r.valid) {
        doc = doc.with_note("sellke bound is only a valid minimum Bayes factor for p < 1/e");
    }
    doc.sections.push(output::Section {
        name: "table1".into(),
        body: Body::Table {
            columns,
            rows: values,
        },
    });
    Ok(doc)
}

pub fn cmd_figure1(a: &Figure1Args) -> CliResult<Document> {
    if !(a.p_min > 0.0 && a.p_min < a.p_max && a.p_max <= 0.5) {
        return Err(CliError::Usage(format!(
            "need 0 < p-min < p-max <= 0.5, got p-min = {}, p-max = {}",
            a.p_min, a.p_max
        )));
    }
    if a.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let columns = [
        "p",
        "z",
        "marsman",
        "mle",
        "goodman",
        "sellke_oriented",
        "sellke_valid",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::with_capacity(a.steps);
    let mut curves: [Vec<(f64, f64)>; 4] = Default::default();
    for p in roc::linspace(a.p_min, a.p_max, a.steps) {
        let prob = Probability::new(p)?;
        let z = calibration::z_from_one_sided_p(prob)?;
        let r = calibration::rows_for(prob, z, Odds::EVEN)?;
        let mut row: Vec<Value> = vec![p.into(), z.value().into()];
        for (curve, c) in curves.iter_mut().zip(&r) {
            curve.push((p, c.lr.value()));
            row.push(c.lr.value().into());
        }
        row.push(r[3].valid.into());
        rows.push(row);
    }
    if let Some(path) = &a.svg {
        let series: Vec<svg::Series<'_>> = Method::ALL
            .iter()
            .zip(curves)
            .map(|(m, points)| svg::Series {
                label: m.label(),
                points,
            })
            .collect();
        let plot = svg::log_y_plot(
            "Likelihood ratio by one-sided p-value",
            "one-sided p-value",
            "LR / Bayes factor (log scale)",
            &series,
        );
        fs::write(path, plot)?;
    }
    Ok(Document::single("figure1", Body::Table { columns, rows }))
}

/// Parses `start:stop:step` into an evenly spaced, inclusive grid.
pub fn parse_cutoffs(grid: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::Usage(format!("bad --cutoffs {grid:?}: {why}"));
    let parts: Vec<f64> = grid
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("expected start:stop:step"))?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("expected start:stop:step"));
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if step <= 0.0 || stop <= start {
        return Err(bad("need start < stop and step > 0"));
    }
    let intervals = ((stop - start) / step * (1.0 + 1e-12)).floor();
    if !(2.0..=1e6).contains(&intervals) {
        return Err(bad("grid must have between 3 and 1000001 points"));
    }
    let n = intervals as usize + 1;
    Ok(roc::linspace(start, start + intervals * step, n))
}

pub fn cmd_roc(a: &RocArgs) -> CliResult<Document> {
    let model = RocModel::new(a.delta)?;
    let cutoffs = parse_cutoffs(&a.cutoffs)?;
    let columns = [
        "cutoff",
        "fpr",
        "tpr",
        "lr_positive",
        "lr_negative",
        "lr_product",
        "lr_tangent",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &c in &cutoffs {
        let pt = roc::roc_point(&model, c)?;
        let slope = |r: crate::Result<crate::LikelihoodRatio>| -> Value {
            r.ok().map(|lr| lr.value()).into()
        };
        rows.push(vec![
            c.into(),
            pt.fpr.value().into(),
            pt.tpr.value().into(),
            slope(roc::positive_secant_lr(&pt)),
            slope(roc::negative_secant_lr(&pt)),
            slope(roc::secant_product_lr(&pt)),
            slope(roc::tangent_lr(&model, c)),
        ]);
    }
    let report = roc::convexity_check(&model, &cutoffs)?;
    let mut r = RecordBuilder::new();
    r.push("delta", a.delta)
        .push("n_points", report.n_points)
        .push("monotone_increasing", report.monotone_increasing)
        .push(
            "slopes_strictly_decreasing",
            report.slopes_strictly_decreasing,
        )
        .push("first_slope_violation", report.first_slope_violation)
        .push("max_tangent_gap", report.max_tangent_gap)
        .push("max_tangent_gap_cutoff", report.max_tangent_gap_cutoff)
        .push("tangent_diverges", report.tangent_diverges)
        .push("convexity_pass", report.passes());
    Ok(Document::single("points", Body::Table { columns, rows })
        .with_section("convexity", r.build()))
}

pub fn cmd_poll(a: &PollArgs) -> CliResult<Document> {
    let poll = PollSpec::new(a.n, a.k, a.p0)?;
    let pr = inference::poll_report(&poll, prior(a.prior_odds)?)?;
    let mut r = RecordBuilder::new();
    r.push("n", poll.n)
        .push("k", poll.k)
        .push("p0", poll.p0.value())
        .push("theta_obs", pr.trial.theta_obs)
        .push("se", pr.trial.se);
    push_report(&mut r, &pr.report);
    r.push("exact_tail", pr.exact_tail.value())
        .push("normal_tail", pr.normal_tail.value());
    Ok(Document::single("poll", r.build()))
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<Document> {
    let workers = a.workers.unwrap_or_else(montecarlo::default_workers);
    let mut r = RecordBuilder::new();
    r.push("seed", a.seed).push("n_sims", a.n_sims);
    match a.mode {
        SimMode::Exceedance => {
            let cfg = McConfig::new(a.seed, a.n_sims, a.true_theta, a.se, a.cutoff)?;
            let est = montecarlo::estimate_exceedance_with(&cfg, workers)?;
            let analytic = normal_math::upper_tail((a.cutoff - a.true_theta) / a.se);
            r.push("mode", "exceedance")
                .push("true_theta", a.true_theta)
                .push("se", a.se)
                .push("cutoff", a.cutoff)
                .push("hits", est.hits)
                .push("estimate", est.estimate.value())
                .push("std_error", est.std_error)
                .push("analytic", analytic)
                .push("z_distance", est.z_distance(analytic));
        }
        SimMode::SecantProduct => {
            let cmp = montecarlo::verify_secant_product_with(
                ZScore::new(a.delta)?,
                a.cutoff,
                a.n_sims,
                a.seed,
                workers,
            )?;
            r.push("mode", "secant-product")
                .push("delta", cmp.delta)
                .push("cutoff", cmp.cutoff)
                .push("fpr", cmp.fpr.estimate.value())
                .push("fpr_std_error", cmp.fpr.std_error)
                .push("tpr", cmp.tpr.estimate.value())
                .push("tpr_std_error", cmp.tpr.std_error)
                .push("empirical_lr", cmp.empirical_lr)
                .push("empirical_lr_se", cmp.empirical_lr_se)
                .push("analytic_lr", cmp.analytic_lr)
                .push("tangent_lr", cmp.tangent_lr)
                .push("tangent_differs", cmp.tangent_differs)
                .push("z_distance", cmp.z_distance());
        }
        SimMode::SignError => {
            let est = montecarlo::sign_error_frequency_with(
                a.true_theta,
                a.se,
                a.delta,
                a.n_sims,
                a.seed,
                workers,
            )?;
            let analytic = normal_math::cdf(-(a.true_theta - a.delta).abs() / a.se);
            r.push("mode", "sign-error")
                .push("true_theta", a.true_theta)
                .push("se", a.se)
                .push("delta", a.delta)
                .push("hits", est.hits)
                .push("estimate", est.estimate.value())
                .push("std_error", est.std_error)
                .push("analytic", analytic)
                .push("z_distance", est.z_distance(analytic));
        }
    }
    Ok(Document::single("simulation", r.build()))
}
