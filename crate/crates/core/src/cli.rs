//! The `isodist` command-line interface.
//!
//! Every command prints a table, as CSV (header row, LF line endings) or as
//! JSON lines (one flat object per row). Numbers carry 12 significant digits.
//! With `--out FILE` the table goes to `FILE` and a `FILE.manifest.json`
//! sidecar records the command, its parameters and the seed.
//!
//! Exit codes: 0 success, 1 a checked inequality failed (or a numerical
//! routine did not converge), 2 usage or domain error, 3 budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{domain, Error, Result};
use crate::family::{BodyFamily, ConstantsConfig, PExponent};
use crate::lattice::{scaled_max_distance, verify_extremal_pairs, Grid, DEFAULT_BUDGET};
use crate::montecarlo::{
    average_distance_experiment, estimate_fraction, sodin_suite, transfer_check, xlog_derivative_check, CheckLine,
};
use crate::sections::{convergence_report, psi_p_density_limit, section_curve, uniform_grid};
use crate::specfun::{phi_inv, phi_inv_asymptote, psi_p, psi_p_inv, psi_p_inv_asymptote, unit_volume_radius};
use crate::witness::{bound_report, family_witness, RegionKind, Side};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ISODIST_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(name = "isodist", version, about = "Distance bounds between small subsets of unit-volume convex bodies")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    /// Write the table to this file and a `.manifest.json` sidecar next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Lower and upper distance bounds for a body family.
    Bounds(BoundsArgs),
    /// Explicit witness pair of regions in dimension n.
    Witness(WitnessArgs),
    /// Discrete isoperimetry on the lattice [k]^n.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Convergence of section areas and cap volumes of lp balls.
    Sections(SectionsArgs),
    /// Randomized and finite-difference check suites.
    Check(CheckArgs),
    /// Ratio of exact inverses to their small-eps asymptotes.
    Asympt(AsymptArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub family: String,
    /// Single volume fraction in (0, 0.5).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "eps_range", required_unless_present = "eps_range")]
    pub eps: Option<f64>,
    /// Grid of volume fractions `start:stop:step`.
    #[arg(long)]
    pub eps_range: Option<String>,
    /// Dimension for the explicit witness column.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// File of `key = value` lines overriding the placeholder constants.
    #[arg(long)]
    pub constants: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: Option<f64>,
    /// Also estimate the region volume from this many uniform samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum LatticeCmd {
    /// Exhaustive check that simplicial segments are extremal pairs.
    Verify(VerifyArgs),
    /// Largest Manhattan distance on the m-refined cube lattice over sqrt(n).
    Scaling(ScalingArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    /// Size of the first set; all sizes when omitted.
    #[arg(long)]
    pub r: Option<usize>,
    /// Size of the second set; all sizes when omitted.
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Args, Serialize)]
pub struct SectionsArgs {
    #[arg(long)]
    pub p: f64,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Offsets `start:stop:step`.
    #[arg(long, default_value = "0:3:0.01")]
    pub grid: String,
    /// Print every grid point instead of the sup-gap summary.
    #[arg(long)]
    pub curves: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Sodin,
    Transfer,
    AverageDistance,
    XlogDerivative,
    All,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    PhiInv,
    PsiInv,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymptArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Exponent for `psi-inv` (default 2).
    #[arg(long)]
    pub p: Option<f64>,
    /// Single volume fraction; defaults to 1e-4, 1e-5, ..., 1e-12.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u128),
    Bool(bool),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u128)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as u128)
    }
}
impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

/// Rows with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let fields: Vec<String> = row.iter().map(csv_field).collect();
                    out.push_str(&fields.join(","));
                    out.push('\n');
                }
            }
            Format::Json => {
                for row in &self.rows {
                    let mut obj = Map::new();
                    for (name, cell) in self.columns.iter().zip(row) {
                        obj.insert((*name).to_string(), json_value(cell));
                    }
                    out.push_str(&Value::Object(obj).to_string());
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// `%.12g`-style formatting.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_g12(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Null => String::new(),
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Num(v) => {
            let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(*v);
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Cell::Int(v) => u64::try_from(*v).map_or_else(|_| Value::String(v.to_string()), Value::from),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Null => Value::Null,
    }
}

/// Sidecar written next to every `--out` file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub versions: Value,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub output_path: String,
}

/// Result of a command: a table and whether all its checks passed.
struct Outcome {
    table: Table,
    passed: bool,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, passed: true }
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad range '{text}', want start:stop:step"))))
        .collect::<Result<_>>()?;
    match nums.as_slice() {
        [start, stop, step] => uniform_grid(*start, *stop, *step),
        _ => Err(Error::Parse(format!("bad range '{text}', want start:stop:step"))),
    }
}

fn load_constants(path: &Option<PathBuf>) -> Result<ConstantsConfig> {
    match path {
        None => Ok(ConstantsConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            ConstantsConfig::parse(&text)
        }
    }
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Outcome> {
    let family = BodyFamily::from_parts(&a.family, a.p)?;
    let constants = load_constants(&a.constants)?;
    let eps_list = match (&a.eps, &a.eps_range) {
        (Some(e), _) => vec![*e],
        (None, Some(r)) => parse_range(r)?,
        (None, None) => return Err(domain("give --eps or --eps-range")),
    };
    let mut t = Table::new(&[
        "family",
        "p",
        "eps",
        "n",
        "lower",
        "upper",
        "upper_tight",
        "exact_limit",
        "exact",
        "parametric",
        "witness_distance",
        "manhattan_limit",
    ]);
    for eps in eps_list {
        let r = bound_report(family, eps, a.n, &constants)?;
        t.push(vec![
            r.family.name().into(),
            r.family.p().into(),
            eps.into(),
            r.n.into(),
            r.lower.into(),
            r.upper.into(),
            r.upper_tight.into(),
            r.exact_limit.into(),
            r.exact_limit.is_some().into(),
            r.parametric.into(),
            r.witness_distance.into(),
            r.manhattan_limit.into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

fn region_text(kind: &RegionKind) -> String {
    let side = |s: &Side| if *s == Side::Below { "<=" } else { ">=" };
    match kind {
        RegionKind::HalfspaceCap { axis, threshold, side: s } => {
            format!("x{} {} {}", axis + 1, side(s), format_g12(*threshold))
        }
        RegionKind::DiagonalSlab { sum_threshold, side: s } => {
            format!("sum {} {}", side(s), format_g12(*sum_threshold))
        }
        RegionKind::CornerHomothety { vertex_index, alpha } => {
            format!("corner {} alpha {}", vertex_index, format_g12(*alpha))
        }
    }
}

fn cmd_witness(a: &WitnessArgs) -> Result<Outcome> {
    let family = BodyFamily::from_parts(&a.family, a.p)?;
    let w = family_witness(family, a.n, a.eps)?;
    let certificate = serde_json::to_value(w.certificate).unwrap_or(Value::Null);
    let method = certificate.get("method").and_then(Value::as_str).unwrap_or("").to_string();
    let mut mc = None;
    if let Some(count) = a.samples {
        let centre = match w.a.family {
            BodyFamily::Cube => 0.5,
            _ => 0.0,
        };
        let est = match w.a.kind {
            RegionKind::HalfspaceCap { axis, threshold, .. } => {
                Some(estimate_fraction(w.a.family, a.n, count, a.seed, |x| x[axis] - centre <= threshold)?)
            }
            RegionKind::DiagonalSlab { sum_threshold, .. } => {
                Some(estimate_fraction(w.a.family, a.n, count, a.seed, |x| x.iter().sum::<f64>() <= sum_threshold)?)
            }
            // Corner volumes are exact.
            RegionKind::CornerHomothety { .. } => None,
        };
        mc = est;
    }
    let omega = unit_volume_radius(w.a.family, a.n)?.omega_n;
    let mut t = Table::new(&[
        "family",
        "n",
        "eps",
        "omega_n",
        "region_a",
        "region_b",
        "volume_each",
        "certificate",
        "distance",
        "mc_volume",
        "mc_half_width_95",
    ]);
    t.push(vec![
        w.a.family.to_string().into(),
        a.n.into(),
        a.eps.into(),
        omega.into(),
        region_text(&w.a.kind).into(),
        region_text(&w.b.kind).into(),
        w.volume_each.into(),
        method.into(),
        w.distance.into(),
        mc.map(|e| e.estimate).into(),
        mc.map(|e| e.half_width_95).into(),
    ]);
    Ok(Outcome::ok(t))
}

fn cmd_lattice(cmd: &LatticeCmd) -> Result<Outcome> {
    match cmd {
        LatticeCmd::Verify(a) => {
            let grid = Grid::new(a.k, a.n)?;
            let rs: Vec<usize> = a.r.map_or_else(|| (1..=grid.size()).collect(), |r| vec![r]);
            let ss: Vec<usize> = a.s.map_or_else(|| (1..=grid.size()).collect(), |s| vec![s]);
            let mut t =
                Table::new(&["k", "n", "r", "s", "brute_max", "segment_distance", "agree", "search_space", "work"]);
            let mut passed = true;
            for &r in &rs {
                for &s in &ss {
                    let v = verify_extremal_pairs(grid, r, s, a.budget)?;
                    passed &= v.agree;
                    t.push(vec![
                        v.k.into(),
                        v.n.into(),
                        r.into(),
                        s.into(),
                        v.brute_max.into(),
                        v.segment_distance.into(),
                        v.agree.into(),
                        v.search_space.into(),
                        v.work.into(),
                    ]);
                }
            }
            Ok(Outcome { table: t, passed })
        }
        LatticeCmd::Scaling(a) => {
            let r = scaled_max_distance(a.n, a.m, a.eps, a.budget)?;
            let mut t = Table::new(&["n", "m", "eps", "lower_sum", "ratio", "continuous_target"]);
            t.push(vec![
                r.n.into(),
                r.m.into(),
                r.eps.into(),
                r.lower_sum.into(),
                r.lattice_value.into(),
                r.continuous_target.into(),
            ]);
            Ok(Outcome::ok(t))
        }
    }
}

fn cmd_sections(a: &SectionsArgs) -> Result<Outcome> {
    let p = PExponent::new(a.p)?;
    let grid = parse_range(&a.grid)?;
    if a.curves {
        let mut t = Table::new(&["p", "n", "x", "s_n", "v_n", "psi_density", "psi_tail"]);
        for &n in &a.n {
            let c = section_curve(p, n, &grid)?;
            for (i, &x) in grid.iter().enumerate() {
                t.push(vec![
                    a.p.into(),
                    n.into(),
                    x.into(),
                    c.s_values[i].into(),
                    c.v_values[i].into(),
                    psi_p_density_limit(x, p)?.into(),
                    psi_p(-x, p)?.into(),
                ]);
            }
        }
        return Ok(Outcome::ok(t));
    }
    let mut t = Table::new(&["p", "n", "omega_n", "sup_v_gap", "sup_s_gap"]);
    for row in convergence_report(p, &a.n, &grid)? {
        t.push(vec![a.p.into(), row.n.into(), row.omega_n.into(), row.sup_v_gap.into(), row.sup_s_gap.into()]);
    }
    Ok(Outcome::ok(t))
}

fn cmd_check(a: &CheckArgs) -> Result<Outcome> {
    let mut lines: Vec<(&str, CheckLine)> = Vec::new();
    let all = a.suite == Suite::All;
    if all || a.suite == Suite::Sodin {
        lines.extend(sodin_suite(a.n, a.samples, a.seed)?.into_iter().map(|l| ("sodin", l)));
    }
    if all || a.suite == Suite::Transfer {
        let count = a.samples.clamp(2, 10_000);
        let r = transfer_check(a.n, count, a.seed)?;
        lines.push((
            "transfer",
            line("per-coordinate KS statistic / 1% critical value", r.ks_pass, r.ks_max / r.ks_critical),
        ));
        lines.push(("transfer", line("directional Lipschitz quotient", r.lipschitz_pass, r.lipschitz_max)));
    }
    if all || a.suite == Suite::AverageDistance {
        let r = average_distance_experiment(a.n, a.samples, a.seed)?;
        let ok = r.mean_distance.estimate >= r.lower_bound;
        lines.push((
            "average-distance",
            line("lower bound / mean distance", ok, r.lower_bound / r.mean_distance.estimate),
        ));
    }
    if all || a.suite == Suite::XlogDerivative {
        lines.extend(xlog_derivative_check(a.samples.min(10_000), a.seed)?.into_iter().map(|l| ("xlog-derivative", l)));
    }
    let mut t = Table::new(&["suite", "check", "checked", "skipped", "violations", "worst", "pass"]);
    let mut passed = true;
    for (suite, l) in lines {
        passed &= l.passed();
        t.push(vec![
            suite.into(),
            l.name.clone().into(),
            l.checked.into(),
            l.skipped.into(),
            l.violations.into(),
            l.worst.into(),
            l.passed().into(),
        ]);
    }
    Ok(Outcome { table: t, passed })
}

fn line(name: &str, ok: bool, value: f64) -> CheckLine {
    CheckLine { name: name.to_string(), checked: 1, skipped: 0, violations: u64::from(!ok), worst: value }
}

fn cmd_asympt(a: &AsymptArgs) -> Result<Outcome> {
    let eps_list: Vec<f64> = match a.eps {
        Some(e) => vec![e],
        None => (4..=12).map(|k| 10f64.powi(-k)).collect(),
    };
    let p = PExponent::new(a.p.unwrap_or(2.0))?;
    let mut t = Table::new(&["which", "p", "eps", "exact", "asymptote", "ratio"]);
    for eps in eps_list {
        let (name, exact, approx) = match a.which {
            Which::PhiInv => ("phi-inv", phi_inv(eps)?, phi_inv_asymptote(eps)?),
            Which::PsiInv => ("psi-inv", psi_p_inv(eps, p)?, psi_p_inv_asymptote(eps, p)?),
        };
        let p_cell: Cell = if a.which == Which::PsiInv { p.get().into() } else { Cell::Null };
        t.push(vec![name.into(), p_cell, eps.into(), exact.into(), approx.into(), (exact / approx).into()]);
    }
    Ok(Outcome::ok(t))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Lattice(c) => cmd_lattice(c),
        Command::Sections(a) => cmd_sections(a),
        Command::Check(a) => cmd_check(a),
        Command::Asympt(a) => cmd_asympt(a),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bounds(_) => "bounds",
        Command::Witness(_) => "witness",
        Command::Lattice(LatticeCmd::Verify(_)) => "lattice verify",
        Command::Lattice(LatticeCmd::Scaling(_)) => "lattice scaling",
        Command::Sections(_) => "sections",
        Command::Check(_) => "check",
        Command::Asympt(_) => "asympt",
    }
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Witness(a) if a.samples.is_some() => Some(a.seed),
        Command::Check(a) => Some(a.seed),
        _ => None,
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::NonConvergence(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

fn write_outputs(cli: &Cli, rendered: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &cli.out {
        None => stdout.write_all(rendered.as_bytes()),
        Some(path) => {
            fs::write(path, rendered)?;
            let manifest = RunManifest {
                command: command_name(&cli.command).to_string(),
                parameters: serde_json::to_value(cli).unwrap_or(Value::Null),
                seed: seed_of(&cli.command),
                versions: serde_json::json!({ "isodist": env!("CARGO_PKG_VERSION") }),
                timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
                output_path: path.display().to_string(),
            };
            let mut sidecar = path.clone().into_os_string();
            sidecar.push(".manifest.json");
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            fs::write(PathBuf::from(sidecar), text + "\n")
        }
    }
}

fn thread_count() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got '{v}'")),
        },
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let result = match threads {
        None => dispatch(&cli),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(domain(format!("cannot start {n} worker threads: {e}"))),
        },
    };
    match result {
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Ok(outcome) => {
            let rendered = outcome.table.render(cli.format);
            if let Err(e) = write_outputs(&cli, &rendered, stdout) {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            if outcome.passed {
                EXIT_OK
            } else {
                let _ = writeln!(stderr, "check failed");
                EXIT_CHECK_FAILED
            }
        }
    }
}
