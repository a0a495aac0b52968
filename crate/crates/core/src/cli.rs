//! Command-line front door.
//!
//! Four subcommands: `verify` runs catalog checks and writes a report
//! directory, `kernel` tabulates a truncated kernel (closed form next to
//! direct contour quadrature) as CSV, `probe` runs one convergence sweep
//! and prints its JSON report, and `report` re-renders the summary table
//! from a previously written results file.
//!
//! Exit codes: 0 on success, 1 when requested checks fail, 2 for usage or
//! configuration errors.  Report files are written atomically (temp file
//! plus rename) so a crashed run never leaves a half-written report.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contours::{edge_default_radius, inner_default_radius, ArcSign, DeformationSpec};
use crate::kernels::{self, KernelValue};
use crate::limits::{
    band_term_weak_limit, delta_probe, slow_growth_probe, smeared_biorthogonality,
    vanishing_probe, ConvergenceReport, DeltaFamily, GrowthModel, ProbeTolerances,
    VanishingFamily,
};
use crate::models::{EdgeModel, InnerModel};
use crate::testspace::{SupportSide, TestFunction};
use crate::verify::{self, CheckConfig};

/// Environment variable supplying the default report directory for
/// `verify` when neither `--out` nor the config file names one.
pub const OUTPUT_DIR_ENV: &str = "BIORTHO_OUT";

/// Config schema version accepted by this binary.
pub const SCHEMA_VERSION: u32 = 1;

// --- configuration file ----------------------------------------------------

/// On-disk run configuration: which checks to run, where to write, and the
/// numeric knobs forwarded to the check engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal [`SCHEMA_VERSION`]; bumped on incompatible layout changes.
    pub schema_version: u32,
    /// Check ids to run when the command line says `--suite all`; empty
    /// means the entire catalog.
    pub suite: Vec<String>,
    /// Report directory; `--out` and then `BIORTHO_OUT` take precedence
    /// when set.
    pub output_dir: Option<PathBuf>,
    pub formats: OutputFormats,
    /// Numeric configuration shared by every check (seeds, grids, model
    /// parameters, ceiling overrides).
    pub checks: CheckConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            suite: Vec::new(),
            output_dir: None,
            formats: OutputFormats::default(),
            checks: CheckConfig::default(),
        }
    }
}

/// Which artifacts `verify` emits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputFormats {
    /// Human-readable summary table on standard output.
    pub table: bool,
    /// `results.json` (full metrics and provenance) in the report directory.
    pub json: bool,
    /// `metrics.csv` (flat id/metric/value/ceiling rows) in the report
    /// directory, for spreadsheet or plotting tools.
    pub csv: bool,
}

impl Default for OutputFormats {
    fn default() -> Self {
        OutputFormats {
            table: true,
            json: true,
            csv: false,
        }
    }
}

// --- errors ----------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

/// Write to standard output, treating a closed pipe (e.g. `| head`) as a
/// normal end of output rather than an error.
fn emit(content: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(content.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(io_err("writing to standard output")(e)),
    }
}

// --- argument grammar ------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "biortho",
    version,
    about = "Numerical verification suite for spectral expansions with \
             singular points in the continuous spectrum"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run catalog checks and write a report.
    Verify(VerifyArgs),
    /// Tabulate a truncated kernel as CSV (closed form and direct
    /// quadrature side by side).
    Kernel(KernelArgs),
    /// Run a single convergence probe and emit its JSON report.
    Probe(ProbeArgs),
    /// Re-render the summary table from a written results file.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// `all`, an empty string for no checks, or a comma-separated list of
    /// check ids.
    #[arg(long, default_value = "all")]
    suite: String,
    /// JSON run configuration file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the configured random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report directory (falls back to the config file, then $BIORTHO_OUT;
    /// without any of those only the summary table is printed).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit without running
    /// anything.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Model: `edge(n,zre,zim)` or `inner(alpha,zre,zim)`.
    #[arg(long)]
    model: String,
    /// Truncation bandwidth for the band kernels.
    #[arg(long = "A", allow_negative_numbers = true)]
    a: Option<f64>,
    /// Excluded half-width for the punctured inner kernel.
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Single evaluation position (alternative to --grid).
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// Position sweep `lo:hi:count` (alternative to --x).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Second kernel argument.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    xp: f64,
    /// Absolute quadrature tolerance for the direct evaluation.
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Check id of a convergence-style check (for example T3.2, T3.3,
    /// L3.7, L4.3).
    #[arg(long)]
    check: String,
    /// Probe parameters as `name=value`, comma-separated or repeated.
    #[arg(long)]
    param: Vec<String>,
    /// JSON run configuration supplying grids and model parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Directory containing a `results.json` written by `verify`.
    #[arg(long)]
    dir: PathBuf,
}

// --- entry point -----------------------------------------------------------

/// Parse `argv` and execute; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; those print to
            // stdout and exit zero, true usage errors exit two.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Kernel(a) => cmd_kernel(a),
        Cmd::Probe(a) => cmd_probe(a),
        Cmd::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

// --- verify ----------------------------------------------------------------

fn load_run_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(io_err(format!("reading {}", path.display())))?;
    let rc: RunConfig = serde_json::from_str(&text)
        .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    if rc.schema_version != SCHEMA_VERSION {
        return Err(usage(format!(
            "config {}: schema version {} not supported (this binary speaks {})",
            path.display(),
            rc.schema_version,
            SCHEMA_VERSION
        )));
    }
    Ok(rc)
}

/// Resolve the `--suite` argument against the config file: `all` defers to
/// the config list (full catalog when that is empty), anything else is a
/// comma-separated id list, and an empty string runs nothing.
fn resolve_suite(arg: &str, rc: &RunConfig) -> Vec<String> {
    let arg = arg.trim();
    if arg == "all" {
        if rc.suite.is_empty() {
            verify::default_suite_ids()
        } else {
            rc.suite.clone()
        }
    } else {
        arg.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, CliError> {
    let mut rc = load_run_config(a.config.as_deref())?;
    if let Some(seed) = a.seed {
        rc.checks.seed = seed;
    }
    if let Some(out) = a.out {
        rc.output_dir = Some(out);
    } else if rc.output_dir.is_none() {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            rc.output_dir = Some(PathBuf::from(dir));
        }
    }
    let ids = resolve_suite(&a.suite, &rc);
    if a.dump_config {
        let mut effective = rc.clone();
        effective.suite = ids;
        let json =
            serde_json::to_string_pretty(&effective).expect("config serialization cannot fail");
        emit(&json)?;
        emit("\n")?;
        return Ok(0);
    }
    let results = verify::run_suite(&ids, &rc.checks).map_err(|e| usage(e.to_string()))?;
    if rc.formats.table {
        emit(&verify::summary_table(&results))?;
    }
    if let Some(dir) = &rc.output_dir {
        write_report_dir(dir, &rc, &results)?;
    }
    Ok(if verify::suite_failed(&results) { 1 } else { 0 })
}

fn write_report_dir(
    dir: &Path,
    rc: &RunConfig,
    results: &[verify::CheckResult],
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    write_atomic(
        &dir.join("config.json"),
        &serde_json::to_string_pretty(rc).expect("config serialization cannot fail"),
    )?;
    write_atomic(&dir.join("summary.txt"), &verify::summary_table(results))?;
    if rc.formats.json {
        write_atomic(&dir.join("results.json"), &verify::results_json(results))?;
    }
    if rc.formats.csv {
        write_atomic(&dir.join("metrics.csv"), &metrics_csv(results))?;
    }
    Ok(())
}

/// Flat per-metric CSV: one row per (check, metric), with the ceiling
/// column empty for informational metrics.
fn metrics_csv(results: &[verify::CheckResult]) -> String {
    let mut out = String::from("id,verdict,metric,value,ceiling\r\n");
    for r in results {
        let verdict = format!("{:?}", r.verdict).to_lowercase();
        for (name, value) in &r.metrics {
            let ceiling = r
                .ceilings
                .get(name)
                .map(|c| c.to_string())
                .unwrap_or_default();
            out.push_str(&csv_row(&[
                &r.id,
                &verdict,
                name,
                &value.to_string(),
                &ceiling,
            ]));
        }
    }
    out
}

/// Write through a temp file in the same directory and rename into place.
fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(io_err(format!("writing {}", path.display())))
}

// --- kernel ----------------------------------------------------------------

enum KernelModel {
    Edge(EdgeModel),
    Inner(InnerModel),
}

/// Parse `edge(n,zre,zim)` / `inner(alpha,zre,zim)`.
fn parse_model(spec: &str) -> Result<KernelModel, CliError> {
    let spec = spec.trim();
    let (kind, rest) = spec
        .split_once('(')
        .ok_or_else(|| usage(format!("model `{spec}`: expected kind(args)")))?;
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| usage(format!("model `{spec}`: missing closing parenthesis")))?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("model `{spec}`: `{s}` is not a number")))
        })
        .collect::<Result<_, _>>()?;
    match (kind.trim(), nums.as_slice()) {
        ("edge", [n, zre, zim]) => {
            if *n < 0.0 || n.fract() != 0.0 {
                return Err(usage(format!(
                    "model `{spec}`: order must be a non-negative integer"
                )));
            }
            EdgeModel::new(*n as usize, Complex64::new(*zre, *zim))
                .map(KernelModel::Edge)
                .map_err(|e| usage(format!("model `{spec}`: {e}")))
        }
        ("inner", [alpha, zre, zim]) => InnerModel::new(*alpha, Complex64::new(*zre, *zim))
            .map(KernelModel::Inner)
            .map_err(|e| usage(format!("model `{spec}`: {e}"))),
        ("edge" | "inner", _) => Err(usage(format!(
            "model `{spec}`: expected exactly three numeric arguments"
        ))),
        (other, _) => Err(usage(format!(
            "model `{spec}`: unknown kind `{other}` (use edge or inner)"
        ))),
    }
}

/// Parse a position sweep `lo:hi:count` into inclusive sample points.
fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(usage(format!("grid `{spec}`: expected lo:hi:count")));
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| usage(format!("grid `{spec}`: bad lower bound")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| usage(format!("grid `{spec}`: bad upper bound")))?;
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| usage(format!("grid `{spec}`: bad count")))?;
    if count == 0 {
        return Err(usage(format!("grid `{spec}`: count must be positive")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect())
}

struct KernelRow {
    x: f64,
    xp: f64,
    parameter: f64,
    closed: KernelValue,
    direct: Complex64,
}

impl KernelRow {
    fn csv(&self) -> String {
        let total = self.closed.total();
        let gap = (total - self.direct).norm();
        let cells: Vec<String> = [
            self.x,
            self.xp,
            self.parameter,
            self.closed.sinc.re,
            self.closed.sinc.im,
            self.closed.boundary.re,
            self.closed.boundary.im,
            self.closed.cos_band.re,
            self.closed.cos_band.im,
            self.closed.log_band.re,
            self.closed.log_band.im,
            total.re,
            total.im,
            self.direct.re,
            self.direct.im,
            gap,
        ]
        .iter()
        // Adding +0.0 folds negative zero into plain zero for display.
        .map(|v| (v + 0.0).to_string())
        .collect();
        let refs: Vec<&str> = cells.iter().map(String::as_str).collect();
        csv_row(&refs)
    }
}

const KERNEL_CSV_HEADER: &str = "x,xp,parameter,sinc_re,sinc_im,boundary_re,boundary_im,\
cos_band_re,cos_band_im,log_band_re,log_band_im,total_re,total_im,direct_re,direct_im,abs_gap";

fn kernel_rows(
    model: &KernelModel,
    a: Option<f64>,
    eps: Option<f64>,
    points: &[f64],
    xp: f64,
    quad_tol: f64,
) -> Result<Vec<KernelRow>, CliError> {
    let mut rows = Vec::with_capacity(points.len());
    for &x in points {
        let (parameter, closed, direct) = match (model, a, eps) {
            (KernelModel::Edge(m), Some(a), None) => {
                let closed = kernels::edge_kernel_closed(m, a, x, xp)
                    .map_err(|e| usage(e.to_string()))?;
                let spec = DeformationSpec::up(edge_default_radius(a));
                let direct = kernels::edge_kernel_direct(m, a, spec, x, xp, quad_tol)
                    .map_err(|e| usage(e.to_string()))?;
                (a, closed, direct)
            }
            (KernelModel::Inner(m), Some(a), None) => {
                let closed = kernels::inner_kernel_closed(m, a, x, xp)
                    .map_err(|e| usage(e.to_string()))?;
                let spec = DeformationSpec::up(inner_default_radius(a, m.alpha()));
                let direct = kernels::inner_kernel_direct(m, a, spec, x, xp, quad_tol)
                    .map_err(|e| usage(e.to_string()))?;
                (a, closed, direct)
            }
            (KernelModel::Inner(m), None, Some(eps)) => {
                let closed = kernels::inner_eps_kernel_closed(m, eps, x, xp)
                    .map_err(|e| usage(e.to_string()))?;
                let direct =
                    kernels::inner_eps_kernel_direct(m, eps, ArcSign::Plus, x, xp, quad_tol)
                        .map_err(|e| usage(e.to_string()))?;
                (eps, closed, direct)
            }
            (KernelModel::Edge(_), None, Some(_)) => {
                return Err(usage("--eps applies only to the inner model"));
            }
            (_, Some(_), Some(_)) => {
                return Err(usage("give exactly one of --A and --eps"));
            }
            (_, None, None) => {
                return Err(usage("give one of --A (band kernel) or --eps (punctured kernel)"));
            }
        };
        rows.push(KernelRow {
            x,
            xp,
            parameter,
            closed,
            direct,
        });
    }
    Ok(rows)
}

fn cmd_kernel(a: KernelArgs) -> Result<i32, CliError> {
    let model = parse_model(&a.model)?;
    let points = match (a.x, a.grid.as_deref()) {
        (Some(x), None) => vec![x],
        (None, Some(g)) => parse_grid(g)?,
        (Some(_), Some(_)) => return Err(usage("give exactly one of --x and --grid")),
        (None, None) => return Err(usage("give one of --x and --grid")),
    };
    let rows = kernel_rows(&model, a.a, a.eps, &points, a.xp, a.quad_tol)?;
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(KERNEL_CSV_HEADER);
    out.push_str("\r\n");
    for row in &rows {
        out.push_str(&row.csv());
    }
    match &a.out {
        Some(path) => write_atomic(path, &out)?,
        None => emit(&out)?,
    }
    Ok(0)
}

/// RFC-4180-style row: quote fields containing commas, quotes or line
/// breaks; CRLF terminator.
fn csv_row(fields: &[&str]) -> String {
    let mut out = String::new();
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if f.contains([',', '"', '\n', '\r']) {
            out.push('"');
            out.push_str(&f.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(f);
        }
    }
    out.push_str("\r\n");
    out
}

// --- probe -----------------------------------------------------------------

/// Typed view of `--param name=value` pairs that rejects unknown names.
struct Params {
    values: BTreeMap<String, f64>,
}

impl Params {
    fn parse(raw: &[String]) -> Result<Params, CliError> {
        let mut values = BTreeMap::new();
        for group in raw {
            for pair in group.split(',') {
                let pair = pair.trim();
                if pair.is_empty() {
                    continue;
                }
                let (name, value) = pair
                    .split_once('=')
                    .ok_or_else(|| usage(format!("parameter `{pair}`: expected name=value")))?;
                let value: f64 = value.trim().parse().map_err(|_| {
                    usage(format!("parameter `{pair}`: `{}` is not a number", value.trim()))
                })?;
                values.insert(name.trim().to_lowercase(), value);
            }
        }
        Ok(Params { values })
    }

    fn take(&mut self, name: &str, default: f64) -> f64 {
        self.values.remove(name).unwrap_or(default)
    }

    fn finish(self) -> Result<(), CliError> {
        if self.values.is_empty() {
            Ok(())
        } else {
            let names: Vec<&str> = self.values.keys().map(String::as_str).collect();
            Err(usage(format!(
                "unknown probe parameter(s): {}",
                names.join(", ")
            )))
        }
    }
}

/// Ids accepted by `probe`, i.e. the checks whose core is one convergence
/// sweep.
const PROBE_IDS: &[&str] = &[
    "L3.3", "L3.6", "L3.7", "L3.8", "L3.9", "L3.10", "L4.3", "L4.6", "L4.7", "L4.8", "T3.1",
    "T3.2", "T3.3", "T4.1", "T4.2",
];

fn probe_dispatch(
    id: &str,
    mut p: Params,
    cfg: &CheckConfig,
) -> Result<ConvergenceReport, CliError> {
    let tols = ProbeTolerances::default();
    let quad_tol = cfg.quad_tol;
    let edge_shift = Complex64::new(cfg.edge_shift[0], cfg.edge_shift[1]);
    let edge = |n: f64| -> Result<EdgeModel, CliError> {
        if !(n >= 0.0 && n.fract() == 0.0) {
            return Err(usage("n must be a non-negative integer"));
        }
        EdgeModel::new(n as usize, edge_shift).map_err(|e| usage(e.to_string()))
    };
    let inner = || -> Result<InnerModel, CliError> {
        InnerModel::new(
            cfg.inner_alpha,
            Complex64::new(cfg.inner_shift[0], cfg.inner_shift[1]),
        )
        .map_err(|e| usage(e.to_string()))
    };
    let growth_grid = || -> Vec<f64> {
        let mut g = cfg.a_grid.clone();
        while g.last().copied().unwrap_or(0.0) < 400.0 {
            g.push(2.0 * g.last().copied().unwrap_or(25.0));
        }
        g
    };
    let side_of = |v: f64| if v >= 0.0 { SupportSide::Plus } else { SupportSide::Minus };

    let report = match id {
        "T3.2" => {
            let m = edge(p.take("n", 0.0))?;
            let xp = p.take("xprime", 0.3);
            let phi = TestFunction::gaussian(p.take("center", 0.3), p.take("width", 0.35));
            p.finish()?;
            delta_probe(
                &DeltaFamily::EdgeBandLimited(&m),
                &phi,
                xp,
                &cfg.a_grid,
                &tols,
                quad_tol,
            )
        }
        "T4.1" => {
            let m = inner()?;
            let xp = p.take("xprime", 0.3);
            let phi = TestFunction::gaussian(p.take("center", 0.3), p.take("width", 0.35));
            p.finish()?;
            delta_probe(
                &DeltaFamily::InnerBandLimited(&m),
                &phi,
                xp,
                &cfg.a_grid,
                &tols,
                quad_tol,
            )
        }
        "L3.6" => {
            let order = p.take("order", 1.0);
            if order.fract() != 0.0 {
                return Err(usage("order must be an integer"));
            }
            let xp = p.take("xprime", 0.3);
            let phi = TestFunction::gaussian(p.take("center", 0.3), p.take("width", 0.35));
            p.finish()?;
            delta_probe(
                &DeltaFamily::PrefactoredSinc {
                    order: order as i32,
                    shift: edge_shift,
                },
                &phi,
                xp,
                &cfg.a_grid,
                &tols,
                quad_tol,
            )
        }
        "L3.3" => {
            let m = edge(p.take("n", 0.0))?;
            let weight = p.take("weight", 1.0);
            if !(weight >= 1.0 && weight.fract() == 0.0) {
                return Err(usage("weight must be a positive integer"));
            }
            let dual = p.take("kprime", 0.7);
            let phi = TestFunction::gaussian(p.take("center", 0.3), p.take("width", 0.35));
            p.finish()?;
            delta_probe(
                &DeltaFamily::WeightedWavenumberSinc {
                    model: &m,
                    weight: weight as i32,
                },
                &phi,
                dual,
                &cfg.r_grid,
                &tols,
                quad_tol,
            )
        }
        "T3.1" => {
            let m = edge(p.take("n", 1.0))?;
            let weight = p.take("weight", 1.0);
            if !(weight >= 1.0 && weight.fract() == 0.0) {
                return Err(usage("weight must be a positive integer"));
            }
            let dual = p.take("kprime", 0.7);
            let phi = TestFunction::gaussian(p.take("center", 0.3), p.take("width", 0.35));
            p.finish()?;
            smeared_biorthogonality(&m, weight as i32, dual, &cfg.r_grid, &phi, &tols, quad_tol)
        }
        "T3.3" => {
            let m = edge(p.take("n", 0.0))?;
            let kappa = p.take("kappa", 0.5);
            let k0 = p.take("k0", 2.0);
            let xp = p.take("xprime", 3.0);
            let side = side_of(p.take("side", 1.0));
            p.finish()?;
            slow_growth_probe(
                &GrowthModel::Edge(&m),
                &growth_grid(),
                kappa,
                k0,
                side,
                xp,
                &tols,
                quad_tol,
            )
        }
        "T4.2" => {
            let m = inner()?;
            let kappa = p.take("kappa", 0.3);
            let k0 = p.take("k0", 0.0);
            let xp = p.take("xprime", -2.5);
            let side = side_of(p.take("side", -1.0));
            p.finish()?;
            slow_growth_probe(
                &GrowthModel::Inner(&m),
                &growth_grid(),
                kappa,
                k0,
                side,
                xp,
                &tols,
                quad_tol,
            )
        }
        "L3.7" | "L3.8" | "L3.9" | "L3.10" | "L4.6" | "L4.7" | "L4.8" => {
            let threshold = match id {
                "L3.7" | "L4.6" | "L4.7" => -1.0,
                "L3.8" | "L4.8" => 1.0,
                _ => 3.0,
            };
            let gamma = p.take("gamma", threshold + 1.0);
            let xp = p.take("xprime", 0.3);
            let phi = TestFunction::gaussian(p.take("center", 0.3), p.take("width", 0.4));
            p.finish()?;
            let inner_model;
            let family = match id {
                "L3.7" => VanishingFamily::PlainSinc,
                "L3.8" => VanishingFamily::WeightedFejer { shift: edge_shift },
                "L3.9" => VanishingFamily::WeightedSincCube { shift: edge_shift },
                "L3.10" => VanishingFamily::WeightedSincDefect { shift: edge_shift },
                other => {
                    inner_model = inner()?;
                    match other {
                        "L4.6" => VanishingFamily::GroundCosineBand(&inner_model),
                        "L4.7" => VanishingFamily::SymmetrizedBand(&inner_model),
                        _ => VanishingFamily::GroundFejer(&inner_model),
                    }
                }
            };
            vanishing_probe(&family, &phi, gamma, xp, &cfg.eps_grid, &tols, quad_tol)
        }
        "L4.3" => {
            let m = inner()?;
            let xp = p.take("xprime", 0.25);
            let phi = TestFunction::gaussian(p.take("center", 0.3), p.take("width", 0.5));
            p.finish()?;
            band_term_weak_limit(&m, &phi, xp, &cfg.a_grid, &tols, quad_tol)
        }
        other => {
            return Err(usage(format!(
                "check `{other}` does not expose a single-sweep probe; available: {}",
                PROBE_IDS.join(", ")
            )));
        }
    };
    report.map_err(|e| usage(e.to_string()))
}

fn cmd_probe(a: ProbeArgs) -> Result<i32, CliError> {
    let rc = load_run_config(a.config.as_deref())?;
    let params = Params::parse(&a.param)?;
    let report = probe_dispatch(&a.check, params, &rc.checks)?;
    let json = report.to_json();
    match &a.out {
        Some(path) => write_atomic(path, &json)?,
        None => {
            emit(&json)?;
            emit("\n")?;
        }
    }
    Ok(0)
}

// --- report ----------------------------------------------------------------

fn cmd_report(a: ReportArgs) -> Result<i32, CliError> {
    let path = a.dir.join("results.json");
    let text = fs::read_to_string(&path).map_err(io_err(format!("reading {}", path.display())))?;
    let results: Vec<verify::CheckResult> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let table = verify::summary_table(&results);
    emit(&table)?;
    write_atomic(&a.dir.join("summary.txt"), &table)?;
    Ok(if verify::suite_failed(&results) { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn run_config_round_trips_through_json() {
        let mut rc = RunConfig::default();
        rc.suite = vec!["L3.1".to_string(), "L4.4".to_string()];
        rc.output_dir = Some(PathBuf::from("/tmp/somewhere"));
        rc.formats.csv = true;
        rc.checks.seed = 99;
        rc.checks
            .ceiling_overrides
            .entry("L4.4".to_string())
            .or_default()
            .insert("ground_envelope_violation".to_string(), 1e-9);
        let text = serde_json::to_string_pretty(&rc).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(rc, back);
    }

    #[test]
    fn config_rejects_unknown_fields_and_wrong_schema() {
        let bad: Result<RunConfig, _> = serde_json::from_str(r#"{"schema_versoin": 1}"#);
        assert!(bad.is_err());
        // Wrong schema version parses but is rejected at load time, which is
        // covered through the public entry point in the integration tests;
        // here we just pin that the field is honoured by the parser.
        let rc: RunConfig = serde_json::from_str(r#"{"schema_version": 7}"#).unwrap();
        assert_eq!(rc.schema_version, 7);
    }

    #[test]
    fn model_specs_parse_and_reject() {
        assert!(matches!(
            parse_model("edge(0,0,1)").unwrap(),
            KernelModel::Edge(_)
        ));
        assert!(matches!(
            parse_model(" inner( 1 , 0 , 1 ) ").unwrap(),
            KernelModel::Inner(_)
        ));
        for bad in [
            "edge",
            "edge(1,0)",
            "edge(1.5,0,1)",
            "edge(-1,0,1)",
            "sphere(1,0,1)",
            "inner(1,0,1",
            "inner(1,0,x)",
            // Interior shift on the real axis is a degenerate model.
            "inner(1,0,0)",
        ] {
            assert!(parse_model(bad).is_err(), "accepted {bad}");
        }
    }

    #[test]
    fn grids_parse_inclusively() {
        let g = parse_grid("-1:1:5").unwrap();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("2:9:1").unwrap(), vec![2.0]);
        for bad in ["1:2", "a:2:3", "1:2:0", "1:2:3:4"] {
            assert!(parse_grid(bad).is_err(), "accepted {bad}");
        }
    }

    #[test]
    fn probe_params_parse_and_flag_unknown_names() {
        let mut p =
            Params::parse(&["kappa=0.5,k0=2".to_string(), "XPrime=3".to_string()]).unwrap();
        assert_eq!(p.take("kappa", 0.0), 0.5);
        assert_eq!(p.take("k0", 0.0), 2.0);
        assert_eq!(p.take("xprime", 0.0), 3.0);
        p.finish().unwrap();

        let leftover = Params::parse(&["mystery=1".to_string()]).unwrap();
        assert!(leftover.finish().is_err());
        assert!(Params::parse(&["kappa".to_string()]).is_err());
        assert!(Params::parse(&["kappa=brown".to_string()]).is_err());
    }

    #[test]
    fn unknown_probe_id_is_a_usage_error() {
        let p = Params::parse(&[]).unwrap();
        let err = probe_dispatch("L3.1", p, &CheckConfig::default()).unwrap_err();
        assert!(err.to_string().contains("single-sweep probe"));
    }

    #[test]
    fn csv_rows_quote_awkward_fields() {
        assert_eq!(csv_row(&["a", "b"]), "a,b\r\n");
        assert_eq!(csv_row(&["a,b", "c\"d"]), "\"a,b\",\"c\"\"d\"\r\n");
    }

    #[test]
    fn band_kernel_row_carries_the_plain_sinc_value() {
        // Order-zero edge model: the closed form's sinc slot is
        // sin(A(x-x'))/(pi(x-x')) and the direct route must agree.
        let model = parse_model("edge(0,0,1)").unwrap();
        let rows = kernel_rows(&model, Some(10.0), None, &[0.4], -0.7, 1e-10).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        let w: f64 = 0.4 - (-0.7);
        let expect = (10.0 * w).sin() / (PI * w);
        assert!((row.closed.sinc.re - expect).abs() < 1e-12);
        assert!(row.closed.sinc.im.abs() < 1e-15);
        let gap = (row.closed.total() - row.direct).norm();
        assert!(gap < 1e-8, "gap {gap}");
        let line = row.csv();
        assert_eq!(line.matches(',').count(), 15, "{line}");
    }

    #[test]
    fn suite_resolution_honours_all_list_and_empty() {
        let mut rc = RunConfig::default();
        assert_eq!(resolve_suite("all", &rc).len(), verify::CATALOG.len());
        rc.suite = vec!["L3.7".to_string()];
        assert_eq!(resolve_suite("all", &rc), vec!["L3.7".to_string()]);
        assert_eq!(
            resolve_suite("L3.1, L4.4", &rc),
            vec!["L3.1".to_string(), "L4.4".to_string()]
        );
        assert!(resolve_suite("", &rc).is_empty());
    }
}
