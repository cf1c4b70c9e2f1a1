//! Row types and the CSV/JSON writers.
//!
//! JSON documents carry every float at full precision and parse back to the
//! same rows. CSV cells use 12 significant digits.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::asymptotics::{ArmSeries, CrossRow, WeylLemma, WeylSample};
use crate::decimation::{EigenvalueRecord, Series};
use crate::gaps::ClusteringCertificate;
use crate::kernels::{SinusoidFit, TracePoint};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub schema_version: u32,
    pub command: String,
    pub records: Vec<R>,
}

pub enum Cell {
    Int(u64),
    Signed(i64),
    Float(f64),
    MaybeFloat(Option<f64>),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Signed(v) => v.to_string(),
            Cell::Float(v) => float(*v),
            Cell::MaybeFloat(v) => v.map(float).unwrap_or_default(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        v.to_string()
    }
}

fn word(w: &[u16]) -> String {
    let s: Vec<String> = w.iter().map(|l| l.to_string()).collect();
    s.join(".")
}

pub trait Row: Serialize {
    /// Comma-separated CSV header.
    const COLUMNS: &'static str;
    fn cells(&self) -> Vec<Cell>;
}

pub fn write_csv<R: Row>(rows: &[R], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{}", R::COLUMNS)?;
    for r in rows {
        let line: Vec<String> = r.cells().iter().map(Cell::render).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_json<R: Row>(command: &str, rows: &[R], out: &mut dyn Write) -> io::Result<()> {
    #[derive(Serialize)]
    struct Borrowed<'a, R> {
        schema_version: u32,
        command: &'a str,
        records: &'a [R],
    }
    let doc = Borrowed {
        schema_version: SCHEMA_VERSION,
        command,
        records: rows,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

fn series_name(s: Series) -> &'static str {
    match s {
        Series::Zero => "zero",
        Series::FourThirds => "four-thirds",
    }
}

impl Row for EigenvalueRecord {
    const COLUMNS: &'static str = "series,birth_level,word,value,multiplicity";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(series_name(self.series).into()),
            Cell::Int(self.birth_level as u64),
            Cell::Text(word(&self.word)),
            Cell::Float(self.value),
            Cell::Int(self.multiplicity),
        ]
    }
}

/// One vertex value of a function on `V_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexValue {
    /// Index of the function in a basis, or of the time in a grid.
    pub index: usize,
    pub vertex: usize,
    pub px: f64,
    pub py: f64,
    pub value: f64,
}

impl Row for VertexValue {
    const COLUMNS: &'static str = "index,vertex,px,py,value";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.index as u64),
            Cell::Int(self.vertex as u64),
            Cell::Float(self.px),
            Cell::Float(self.py),
            Cell::Float(self.value),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub t: f64,
    pub vertex: usize,
    pub px: f64,
    pub py: f64,
    pub value: f64,
    /// Value divided by the value at `q₀`; absent when that is zero.
    pub normalized: Option<f64>,
}

impl Row for KernelRow {
    const COLUMNS: &'static str = "t,vertex,px,py,value,normalized";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Float(self.t),
            Cell::Int(self.vertex as u64),
            Cell::Float(self.px),
            Cell::Float(self.py),
            Cell::Float(self.value),
            Cell::MaybeFloat(self.normalized),
        ]
    }
}

impl Row for TracePoint {
    const COLUMNS: &'static str = "t,trace,scaled";
    fn cells(&self) -> Vec<Cell> {
        vec![Cell::Float(self.t), Cell::Float(self.trace), Cell::Float(self.scaled)]
    }
}

impl Row for SinusoidFit {
    const COLUMNS: &'static str = "a,b,c,d,rms";
    fn cells(&self) -> Vec<Cell> {
        [self.a, self.b, self.c, self.d, self.rms].map(Cell::Float).into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub segment: usize,
    pub level: usize,
    pub source: usize,
    pub px: f64,
    pub py: f64,
    pub integral: f64,
    pub abs_integral: f64,
}

impl Row for ProjectionRow {
    const COLUMNS: &'static str = "segment,level,source,px,py,integral,abs_integral";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.segment as u64),
            Cell::Int(self.level as u64),
            Cell::Int(self.source as u64),
            Cell::Float(self.px),
            Cell::Float(self.py),
            Cell::Float(self.integral),
            Cell::Float(self.abs_integral),
        ]
    }
}

impl Row for WeylSample {
    const COLUMNS: &'static str = "x,count,weyl,s";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Float(self.x),
            Cell::Int(self.count),
            Cell::Float(self.weyl),
            Cell::Float(self.s),
        ]
    }
}

impl Row for WeylLemma {
    const COLUMNS: &'static str =
        "j,lambda_odd,lambda_even,alpha,num_below,num_at,num_even,w_below,w_at,w_even,plateau_below_lo,plateau_above_hi";
    fn cells(&self) -> Vec<Cell> {
        let mut c = vec![
            Cell::Int(self.j as u64),
            Cell::Float(self.lambda_odd),
            Cell::Float(self.lambda_even),
            Cell::Float(self.alpha),
        ];
        c.extend(self.numerators.map(Cell::Int));
        c.extend(
            [self.w_below, self.w_at, self.w_even, self.plateau_below.0, self.plateau_above.1].map(Cell::Float),
        );
        c
    }
}

/// A sample of the normalized counting function `w̃(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedWeylRow {
    /// Power of `ρ` used to bring the samples into the enumerated range.
    pub k: i32,
    pub s: f64,
    pub w: f64,
}

impl Row for NormalizedWeylRow {
    const COLUMNS: &'static str = "k,s,w";
    fn cells(&self) -> Vec<Cell> {
        vec![Cell::Signed(self.k as i64), Cell::Float(self.s), Cell::Float(self.w)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylZeroRow {
    pub n: usize,
    pub value: f64,
    /// `3√3/π`, the value for the crossed lines.
    pub limit: f64,
}

impl Row for WeylZeroRow {
    const COLUMNS: &'static str = "n,value,limit";
    fn cells(&self) -> Vec<Cell> {
        vec![Cell::Int(self.n as u64), Cell::Float(self.value), Cell::Float(self.limit)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    pub ell: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Row for GapRow {
    const COLUMNS: &'static str = "n,ell,lo,hi";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.n as u64),
            Cell::Int(self.ell as u64),
            Cell::Float(self.lo),
            Cell::Float(self.hi),
        ]
    }
}

impl Row for ClusteringCertificate {
    const COLUMNS: &'static str = "n,t,rprime,rho,certified";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.n as u64),
            Cell::Float(self.t),
            Cell::Float(self.rprime),
            Cell::Float(self.rho),
            Cell::Bool(self.certified),
        ]
    }
}

/// A member of a clustering demonstration: the eigenvalue is
/// `ρ^exponent ψ(φ_word(0))`, which equals `base + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub word: Vec<u16>,
    pub exponent: usize,
    pub base: f64,
    pub offset: f64,
}

impl Row for ClusterRow {
    const COLUMNS: &'static str = "word,exponent,base,offset";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(word(&self.word)),
            Cell::Int(self.exponent as u64),
            Cell::Float(self.base),
            Cell::Float(self.offset),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenRow {
    pub x: String,
    pub y: String,
    pub value: f64,
}

impl Row for GreenRow {
    const COLUMNS: &'static str = "x,y,value";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.x.clone()),
            Cell::Text(self.y.clone()),
            Cell::Float(self.value),
        ]
    }
}

/// Residuals of the three defining relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenCheckRow {
    pub s: f64,
    pub t: f64,
    pub residual_center: f64,
    pub residual_attachment: f64,
    pub residual_source: f64,
}

impl Row for GreenCheckRow {
    const COLUMNS: &'static str = "s,t,residual_center,residual_attachment,residual_source";
    fn cells(&self) -> Vec<Cell> {
        [self.s, self.t, self.residual_center, self.residual_attachment, self.residual_source]
            .map(Cell::Float)
            .into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmRow {
    pub series: ArmSeries,
    pub index: usize,
    pub lambda: f64,
    pub spurious: bool,
    pub vector: Vec<f64>,
}

pub fn arm_series_name(s: ArmSeries) -> &'static str {
    match s {
        ArmSeries::Zero => "zero",
        ArmSeries::FourThirds => "four-thirds",
        ArmSeries::IntervalOdd => "interval-odd",
        ArmSeries::IntervalEven => "interval-even",
    }
}

impl Row for ArmRow {
    const COLUMNS: &'static str = "series,index,lambda,spurious,vector";
    fn cells(&self) -> Vec<Cell> {
        let v: Vec<String> = self.vector.iter().map(|&x| float(x)).collect();
        vec![
            Cell::Text(arm_series_name(self.series).into()),
            Cell::Int(self.index as u64),
            Cell::Float(self.lambda),
            Cell::Bool(self.spurious),
            Cell::Text(v.join(";")),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub j: usize,
    pub series: ArmSeries,
    #[serde(flatten)]
    pub row: CrossRow,
    /// Fitted order of the error over all rows; absent when the errors
    /// vanish.
    pub order: Option<f64>,
    pub decreasing: bool,
}

impl Row for ConvergenceRow {
    const COLUMNS: &'static str = "j,series,n,lambda,limit,error,order,decreasing";
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.j as u64),
            Cell::Text(arm_series_name(self.series).into()),
            Cell::Int(self.row.n as u64),
            Cell::Float(self.row.lambda),
            Cell::Float(self.row.limit),
            Cell::Float(self.row.error),
            Cell::MaybeFloat(self.order),
            Cell::Bool(self.decreasing),
        ]
    }
}
