//! Command-line front end. Every subcommand writes a JSON document (a
//! `records` array plus `schema_version`) or a CSV table with a header row.
//!
//! Exit codes: 0 on success, 2 for invalid flags or parameters, 3 when a
//! resource budget would be exceeded, 1 for numerical or I/O failures.

mod output;
mod points;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::asymptotics::{
    arm_system, counting_and_weyl, cross_limit_check, normalized_weyl, weyl_at_zero, weyl_special_values, ArmSeries,
};
use crate::eigenfunc::{build_eigenfunctions, GraphLadder};
use crate::error::{invalid, Result, VsError};
use crate::gaps::{cluster_demo, clustering_certificate, gap_containing, ratio_gaps};
use crate::green::{green_eval, green_field, green_verify, vertex_points, SkeletonPoint};
use crate::kernels::{
    center_kernels, fit_log_sinusoid, heat_trace, max_abs_projection, projection_kernel, KernelKind,
};
use crate::vsgraph::{GraphApprox, VicsekParams};
use crate::DecimationSystem;

pub use output::{
    ArmRow, ClusterRow, ConvergenceRow, Document, GapRow, GreenCheckRow, GreenRow, KernelRow, NormalizedWeylRow,
    ProjectionRow, Row, VertexValue, WeylZeroRow, SCHEMA_VERSION,
};
pub use points::{Address, PointSpec};

const ENV_HELP: &str = "Budgets can be raised with VICSEK_MAX_VERTICES, VICSEK_MAX_DENSE and VICSEK_MAX_RECORDS.\n\
Exit codes: 0 success, 1 numerical or I/O failure, 2 invalid input, 3 budget exceeded.";

fn columns<R: Row>() -> String {
    format!("CSV columns: {}", R::COLUMNS)
}

fn columns2<A: Row, B: Row>(a: &str, b: &str) -> String {
    format!("CSV columns ({a}): {}\nCSV columns ({b}): {}", A::COLUMNS, B::COLUMNS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArmSeriesArg {
    Zero,
    FourThirds,
    IntervalOdd,
    IntervalEven,
}

impl From<ArmSeriesArg> for ArmSeries {
    fn from(a: ArmSeriesArg) -> Self {
        match a {
            ArmSeriesArg::Zero => ArmSeries::Zero,
            ArmSeriesArg::FourThirds => ArmSeries::FourThirds,
            ArmSeriesArg::IntervalOdd => ArmSeries::IntervalOdd,
            ArmSeriesArg::IntervalEven => ArmSeries::IntervalEven,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "vicsek", version, about = "Spectral decimation on the Vicsek fractals", after_help = ENV_HELP)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distinct eigenvalues with multiplicities, ascending.
    #[command(after_help = columns::<crate::EigenvalueRecord>())]
    Spectrum(SpectrumArgs),
    /// Unit-norm eigenfunctions of one eigenvalue on V_m.
    #[command(after_help = format!("{}\nindex is the basis element.", columns::<VertexValue>()))]
    Eigenfunction(EigenfunctionArgs),
    /// Heat kernel h(t, q0, x) on V_m.
    #[command(after_help = columns::<KernelRow>())]
    Heat(KernelArgs),
    /// Heat trace t^alpha sum m(lambda) e^(-t lambda), or its log-periodic fit.
    #[command(after_help = columns2::<crate::kernels::TracePoint, crate::kernels::SinusoidFit>("trace", "--fit"))]
    Trace(TraceArgs),
    /// Wave propagator W(t, q0, x) on V_m.
    #[command(after_help = columns::<KernelRow>())]
    Wave(KernelArgs),
    /// Projection kernel onto the symmetric eigenfunctions of segment k.
    #[command(after_help = columns::<ProjectionRow>())]
    Project(ProjectArgs),
    /// Counting function samples, the special-value lemma, or its value at s = 0.
    #[command(after_help = format!(
        "{}\nCSV columns (--s): {}\nCSV columns (--lemma): {}\nCSV columns (--zero): {}",
        columns::<crate::asymptotics::WeylSample>(),
        NormalizedWeylRow::COLUMNS,
        <crate::asymptotics::WeylLemma as Row>::COLUMNS,
        WeylZeroRow::COLUMNS
    ))]
    Weyl(WeylArgs),
    /// Certified gaps in the ratios of eigenvalues, reduced to [1, rho].
    #[command(after_help = columns::<GapRow>())]
    Gaps(GapsArgs),
    /// Clustering certificate, or a cluster of distinct nearby eigenvalues.
    #[command(after_help = columns2::<crate::gaps::ClusteringCertificate, ClusterRow>("certificate", "--members"))]
    Cluster(ClusterArgs),
    /// Green's function of the Dirichlet problem at the four corners.
    #[command(after_help = format!(
        "{}\nCSV columns (--level): {}\nCSV columns (--s/--t): {}",
        columns::<GreenRow>(),
        VertexValue::COLUMNS,
        GreenCheckRow::COLUMNS
    ))]
    Green(GreenArgs),
    /// Level-one arm eigenvalue systems.
    #[command(after_help = columns::<ArmRow>())]
    Arm(ArmArgs),
    /// Convergence of eigenvalues to the crossed-lines limit as n grows.
    #[command(after_help = columns::<ConvergenceRow>())]
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: usize,
    /// Spectral depth k: all eigenvalues visible on level k.
    #[arg(long)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct EigenfunctionArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub level: usize,
    /// Index into the spectrum at depth `level`, 0 for the constant.
    #[arg(long)]
    pub record: usize,
    /// Restrict the output to one vertex, e.g. F:0233,q:3.
    #[arg(long)]
    pub at: Option<Address>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub level: usize,
    /// Spectral depth; defaults to the level.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long)]
    pub at: Option<Address>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tmin: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tmax: f64,
    /// Number of log-spaced times.
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Fit a + b sin(c log t + d) instead of listing the samples.
    #[arg(long)]
    pub fit: bool,
    #[arg(long, default_value_t = 1.5)]
    pub cmin: f64,
    #[arg(long, default_value_t = 3.5)]
    pub cmax: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["at", "max"])))]
pub struct ProjectArgs {
    #[arg(long)]
    pub n: usize,
    /// Segment k >= 1.
    #[arg(long)]
    pub segment: usize,
    #[arg(long)]
    pub level: usize,
    #[arg(long)]
    pub at: Option<Address>,
    /// Report the source maximizing the L1 norm of the kernel.
    #[arg(long)]
    pub max: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["x", "s", "lemma", "zero"])))]
pub struct WeylArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Sample N(x)/x^alpha at these points.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Sample the normalized counting function at these s.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Vec<f64>,
    /// Special values around the j-th level-one eigenvalue.
    #[arg(long)]
    pub lemma: Option<usize>,
    /// The normalized counting function at s = 0.
    #[arg(long)]
    pub zero: bool,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[arg(long)]
    pub n: usize,
    /// Word length of the covering intervals.
    #[arg(long)]
    pub ell: usize,
    /// Only report the gap containing this ratio, if any.
    #[arg(long)]
    pub point: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub n: usize,
    /// Build a cluster of this many distinct eigenvalues.
    #[arg(long)]
    pub members: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    /// Evaluation point, arm:A,s:S,off:T or a vertex address.
    #[arg(long)]
    pub x: Option<PointSpec>,
    /// Source point.
    #[arg(long, required_unless_present = "s")]
    pub y: Option<PointSpec>,
    /// Needed for vertex addresses and fields.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sample G(., y) on every vertex of V_m.
    #[arg(long, conflicts_with = "x")]
    pub level: Option<usize>,
    /// Check the defining relations for a source at distance t off the
    /// cross at s.
    #[arg(long, requires = "t", conflicts_with_all = ["x", "y", "level"])]
    pub s: Option<f64>,
    #[arg(long, requires = "s")]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ArmArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub series: ArmSeriesArg,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, value_enum, default_value_t = ArmSeriesArg::FourThirds)]
    pub series: ArmSeriesArg,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub ns: Vec<usize>,
}

enum Failure {
    Lib(VsError),
    Io(std::io::Error),
}

impl From<VsError> for Failure {
    fn from(e: VsError) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

pub fn exit_code(e: &VsError) -> i32 {
    match e {
        VsError::Budget { .. } => 3,
        VsError::NoConvergence(_) | VsError::Singular(_) => 1,
        VsError::InvalidParameter(_) | VsError::LevelMismatch { .. } | VsError::Forbidden { .. } => 2,
    }
}

/// Runs the CLI on `args` (program name first), writing to the process's
/// standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let mut buf = Vec::new();
    let result = dispatch(&cli, &mut buf).and_then(|_| match &cli.output {
        Some(path) => std::fs::write(path, &buf).map_err(Failure::from),
        None => out.write_all(&buf).map_err(Failure::from),
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn emit<R: Row>(cli: &Cli, name: &str, rows: &[R], buf: &mut Vec<u8>) -> std::result::Result<(), Failure> {
    match cli.format {
        Format::Csv => output::write_csv(rows, buf)?,
        Format::Json => output::write_json(name, rows, buf)?,
    }
    Ok(())
}

fn system(n: usize) -> Result<DecimationSystem> {
    Ok(DecimationSystem::new(VicsekParams::new(n)?))
}

fn vertices(g: &GraphApprox, at: &Option<Address>) -> Result<Vec<usize>> {
    match at {
        Some(a) => Ok(vec![g.vertex_at(&a.word, a.corner)?]),
        None => Ok((0..g.vertex_count()).collect()),
    }
}

/// Skeleton description of a point given either way.
fn skeleton(p: &PointSpec, n: Option<usize>) -> Result<SkeletonPoint> {
    match p {
        PointSpec::Skeleton(s) => Ok(s.clone()),
        PointSpec::Address(a) => {
            let n = n.ok_or_else(|| invalid("vertex addresses need --n"))?;
            let g = GraphApprox::build(VicsekParams::new(n)?, a.word.len())?;
            let v = g.vertex_at(&a.word, a.corner)?;
            Ok(vertex_points(&g).swap_remove(v))
        }
    }
}

fn dispatch(cli: &Cli, buf: &mut Vec<u8>) -> std::result::Result<(), Failure> {
    match &cli.command {
        Command::Spectrum(a) => {
            let table = system(a.n)?.enumerate_spectrum(a.depth)?;
            emit(cli, "spectrum", table.records(), buf)
        }
        Command::Eigenfunction(a) => {
            let sys = system(a.n)?;
            let table = sys.enumerate_spectrum(a.level)?;
            let rec = table
                .records()
                .get(a.record)
                .ok_or_else(|| invalid(format!("record {} out of range 0..{}", a.record, table.len())))?;
            let ladder = GraphLadder::new(sys.params(), a.level)?;
            let g = ladder.at(a.level);
            let verts = vertices(g, &a.at)?;
            let basis = build_eigenfunctions(&sys, &ladder, rec, a.level)?;
            let mut rows = Vec::new();
            for (index, f) in basis.functions.iter().enumerate() {
                for &v in &verts {
                    let (px, py) = g.point(v);
                    rows.push(VertexValue {
                        index,
                        vertex: v,
                        px,
                        py,
                        value: f.values.values[v],
                    });
                }
            }
            emit(cli, "eigenfunction", &rows, buf)
        }
        Command::Heat(a) | Command::Wave(a) => {
            let (kind, name) = match &cli.command {
                Command::Heat(_) => (KernelKind::Heat, "heat"),
                _ => (KernelKind::Wave, "wave"),
            };
            let sys = system(a.n)?;
            let ladder = GraphLadder::new(sys.params(), a.level)?;
            let g = ladder.at(a.level);
            let verts = vertices(g, &a.at)?;
            let fields = center_kernels(&sys, &ladder, kind, &a.t, a.level, a.depth.unwrap_or(a.level))?;
            let mut rows = Vec::new();
            for (f, &t) in fields.iter().zip(&a.t) {
                for &v in &verts {
                    let (px, py) = g.point(v);
                    let value = f.values[v];
                    rows.push(KernelRow {
                        t,
                        vertex: v,
                        px,
                        py,
                        value,
                        normalized: (f.source_value != 0.0).then(|| value / f.source_value),
                    });
                }
            }
            emit(cli, name, &rows, buf)
        }
        Command::Trace(a) => {
            if !(a.tmin > 0.0 && a.tmax > a.tmin && a.points >= 2) {
                return Err(invalid("need 0 < tmin < tmax and at least two points").into());
            }
            let sys = system(a.n)?;
            let table = sys.enumerate_spectrum(a.depth)?;
            let (l0, l1) = (a.tmin.ln(), a.tmax.ln());
            let ts: Vec<f64> = (0..a.points)
                .map(|i| (l0 + (l1 - l0) * i as f64 / (a.points - 1) as f64).exp())
                .collect();
            let pts = heat_trace(&table, sys.params().alpha(), &ts)?;
            if a.fit {
                let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.t, p.scaled)).collect();
                emit(cli, "trace", &[fit_log_sinusoid(&xy, a.cmin, a.cmax)?], buf)
            } else {
                emit(cli, "trace", &pts, buf)
            }
        }
        Command::Project(a) => {
            let sys = system(a.n)?;
            let ladder = GraphLadder::new(sys.params(), a.level)?;
            let g = ladder.at(a.level);
            let source = match &a.at {
                Some(at) => g.vertex_at(&at.word, at.corner)?,
                None => max_abs_projection(&sys, &ladder, a.segment, a.level)?.0,
            };
            let k = projection_kernel(&sys, &ladder, a.segment, source, a.level)?;
            let (px, py) = g.point(source);
            let row = ProjectionRow {
                segment: a.segment,
                level: a.level,
                source,
                px,
                py,
                integral: k.integral,
                abs_integral: k.abs_integral,
            };
            emit(cli, "project", &[row], buf)
        }
        Command::Weyl(a) => {
            let sys = system(a.n)?;
            if let Some(j) = a.lemma {
                emit(cli, "weyl", &[weyl_special_values(&sys, j)?], buf)
            } else if a.zero {
                let row = WeylZeroRow {
                    n: a.n,
                    value: weyl_at_zero(&sys)?,
                    limit: 3.0 * 3f64.sqrt() / std::f64::consts::PI,
                };
                emit(cli, "weyl", &[row], buf)
            } else if !a.s.is_empty() {
                let table = sys.enumerate_spectrum(a.depth)?;
                let (k, w) = normalized_weyl(&sys, &table, &a.s)?;
                let rows: Vec<NormalizedWeylRow> = w.into_iter().map(|(s, w)| NormalizedWeylRow { k, s, w }).collect();
                emit(cli, "weyl", &rows, buf)
            } else {
                let table = sys.enumerate_spectrum(a.depth)?;
                emit(cli, "weyl", &counting_and_weyl(&sys, &table, &a.x)?, buf)
            }
        }
        Command::Gaps(a) => {
            let sys = system(a.n)?;
            let rows: Vec<GapRow> = match a.point {
                Some(p) => gap_containing(&sys, a.ell, p)?
                    .map(|(lo, hi)| GapRow {
                        n: a.n,
                        ell: a.ell,
                        lo,
                        hi,
                    })
                    .into_iter()
                    .collect(),
                None => ratio_gaps(&sys, a.ell)?
                    .gaps
                    .iter()
                    .map(|g| GapRow {
                        n: a.n,
                        ell: a.ell,
                        lo: g.lo,
                        hi: g.hi,
                    })
                    .collect(),
            };
            emit(cli, "gaps", &rows, buf)
        }
        Command::Cluster(a) => {
            let sys = system(a.n)?;
            match a.members {
                None => emit(cli, "cluster", &[clustering_certificate(&sys)], buf),
                Some(count) => {
                    let d = cluster_demo(&sys, count, a.eps)?;
                    let nb = sys.num_branches() as u16;
                    let rows: Vec<ClusterRow> = d
                        .members
                        .iter()
                        .map(|m| ClusterRow {
                            word: m.word(nb),
                            exponent: d.exponent,
                            base: d.base,
                            offset: m.offset,
                        })
                        .collect();
                    emit(cli, "cluster", &rows, buf)
                }
            }
        }
        Command::Green(a) => {
            if let (Some(s), Some(t)) = (a.s, a.t) {
                let r = green_verify(s, t)?;
                let row = GreenCheckRow {
                    s,
                    t,
                    residual_center: r[0],
                    residual_attachment: r[1],
                    residual_source: r[2],
                };
                return emit(cli, "green", &[row], buf);
            }
            let yspec = a.y.as_ref().ok_or_else(|| invalid("--y is required"))?;
            let y = skeleton(yspec, a.n)?;
            match (&a.x, a.level) {
                (Some(xspec), _) => {
                    let row = GreenRow {
                        x: xspec.to_string(),
                        y: yspec.to_string(),
                        value: green_eval(&skeleton(xspec, a.n)?, &y)?,
                    };
                    emit(cli, "green", &[row], buf)
                }
                (None, Some(m)) => {
                    let n = a.n.ok_or_else(|| invalid("--level needs --n"))?;
                    let g = GraphApprox::build(VicsekParams::new(n)?, m)?;
                    let f = green_field(&g, &y)?;
                    let rows: Vec<VertexValue> = f
                        .values
                        .iter()
                        .enumerate()
                        .map(|(v, &value)| {
                            let (px, py) = g.point(v);
                            VertexValue {
                                index: 0,
                                vertex: v,
                                px,
                                py,
                                value,
                            }
                        })
                        .collect();
                    emit(cli, "green", &rows, buf)
                }
                (None, None) => Err(invalid("give --x for a value or --level for a field").into()),
            }
        }
        Command::Arm(a) => {
            let series = ArmSeries::from(a.series);
            let sys = arm_system(a.n, series)?;
            let rows: Vec<ArmRow> = sys
                .eigenpairs
                .iter()
                .enumerate()
                .map(|(index, p)| ArmRow {
                    series,
                    index,
                    lambda: p.lambda,
                    spurious: p.spurious,
                    vector: p.vector.clone(),
                })
                .collect();
            emit(cli, "arm", &rows, buf)
        }
        Command::Convergence(a) => {
            let c = cross_limit_check(a.j, a.series.into(), &a.ns)?;
            let rows: Vec<ConvergenceRow> = c
                .rows
                .iter()
                .map(|&row| ConvergenceRow {
                    j: c.j,
                    series: c.series,
                    row,
                    order: c.order.is_finite().then_some(c.order),
                    decreasing: c.decreasing,
                })
                .collect();
            emit(cli, "convergence", &rows, buf)
        }
    }
}
