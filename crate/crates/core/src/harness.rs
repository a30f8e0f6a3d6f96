//! Run configuration, machine-readable reports, and table reproduction.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instances::{oracle_solve, relative_gap, Family, InstanceSpec};
use crate::monomial::enumerate_basis;
use crate::projection::project_consistency_nonneg_in_place;
use crate::relax::{
    build_moment_sos, build_polyhedral_sdp, eliminate_inequalities, ConsistencyBlocks,
    InstanceFile, PolynomialProgram,
};
use crate::rng::standard_normal_matrix;
use crate::solver::{solve, solve_moment, SolveReport, SolverConfig, TerminationReason};
use crate::{Error, Result};

/// Version of the run and table report layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// Largest oracle budget spent automatically to attach `vstar` to a run report.
const AUTO_ORACLE_BUDGET: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relaxation {
    PolySdp,
    PolySdpRlt,
    MomSos,
    PolyMomSos,
}

impl Relaxation {
    pub const ALL: [Relaxation; 4] = [
        Relaxation::PolySdp,
        Relaxation::PolySdpRlt,
        Relaxation::MomSos,
        Relaxation::PolyMomSos,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Relaxation::PolySdp => "poly-sdp",
            Relaxation::PolySdpRlt => "poly-sdp-rlt",
            Relaxation::MomSos => "mom-sos",
            Relaxation::PolyMomSos => "poly-mom-sos",
        }
    }
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relaxation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Relaxation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown relaxation '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::Usage(format!("unknown output format '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Generator(InstanceSpec),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub relaxation: Relaxation,
    /// `None` takes the order stored in the instance file, else the smallest valid order.
    pub order: Option<u32>,
    pub solver: SolverConfig,
    pub source: InstanceSource,
    /// `None` writes to standard output.
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Result of one solve, serialized as the versioned run report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub relaxation: Relaxation,
    pub order: u32,
    /// Side length of the matrix variable.
    #[serde(rename = "N")]
    pub dim: usize,
    /// Scalar constraint count.
    pub m: usize,
    pub objective: f64,
    pub vstar: Option<f64>,
    /// Relative gap in percent against `vstar`.
    pub gap: Option<f64>,
    #[serde(rename = "Rp")]
    pub rp: f64,
    #[serde(rename = "Rd")]
    pub rd: f64,
    #[serde(rename = "Rc")]
    pub rc: f64,
    #[serde(rename = "Rmax")]
    pub rmax: f64,
    pub rank: usize,
    pub alm_iters: usize,
    pub pg_iters: usize,
    pub lift_iters: usize,
    pub time_s: f64,
    pub reason: TerminationReason,
    pub recession_value: Option<f64>,
    pub config: SolverConfig,
}

impl RunReport {
    pub fn converged(&self) -> bool {
        self.reason == TerminationReason::Converged
    }
}

/// Fixed CSV row layout.
#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    n: usize,
    #[serde(rename = "N")]
    dim: usize,
    m: usize,
    relaxation: &'a str,
    order: u32,
    objective: f64,
    #[serde(rename = "Rp")]
    rp: f64,
    #[serde(rename = "Rd")]
    rd: f64,
    #[serde(rename = "Rc")]
    rc: f64,
    rank: usize,
    alm_iters: usize,
    pg_iters: usize,
    lift_iters: usize,
    time_s: f64,
    reason: &'a str,
}

pub const CSV_COLUMNS: [&str; 16] = [
    "family",
    "n",
    "N",
    "m",
    "relaxation",
    "order",
    "objective",
    "Rp",
    "Rd",
    "Rc",
    "rank",
    "alm_iters",
    "pg_iters",
    "lift_iters",
    "time_s",
    "reason",
];

/// Build the requested relaxation of `pop` and solve it.
pub fn solve_relaxation(
    pop: &PolynomialProgram,
    relaxation: Relaxation,
    order: u32,
    config: &SolverConfig,
) -> Result<(SolveReport, usize, usize)> {
    match relaxation {
        Relaxation::PolySdp | Relaxation::PolySdpRlt => {
            let pop = eliminate_inequalities(pop)?;
            let p = build_polyhedral_sdp(&pop, order, relaxation == Relaxation::PolySdpRlt)?;
            let r = solve(&p, config)?;
            Ok((r.report, p.dim(), p.constraint_count()))
        }
        Relaxation::MomSos | Relaxation::PolyMomSos => {
            let p = build_moment_sos(pop, order, relaxation == Relaxation::PolyMomSos)?;
            let r = solve_moment(&p, config)?;
            Ok((r.report, p.relax.dim(), p.relax.constraint_count()))
        }
    }
}

fn load(
    source: &InstanceSource,
) -> Result<(PolynomialProgram, Option<u32>, String, u64, Option<f64>)> {
    match source {
        InstanceSource::File(path) => {
            let file = InstanceFile::read(path)?;
            let tau = file.tau;
            Ok((file.into_program()?, tau, "file".into(), 0, None))
        }
        InstanceSource::Generator(spec) => {
            let known = match spec.family {
                Family::Horn { .. } => Some(0.0),
                _ => None,
            };
            Ok((spec.generate()?, None, spec.tag().into(), spec.seed, known))
        }
    }
}

/// Load the instance, solve the configured relaxation, and return the report.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let (pop, file_tau, family, seed, known) = load(&config.source)?;
    let order = config.order.or(file_tau).unwrap_or_else(|| pop.min_order());
    if order < pop.min_order() {
        return Err(Error::Usage(format!(
            "order {order} is below the smallest valid order {} for this instance",
            pop.min_order()
        )));
    }
    let (rep, dim, m) = solve_relaxation(&pop, config.relaxation, order, &config.solver)?;
    let vstar = known.or_else(|| {
        oracle_solve(&pop, AUTO_ORACLE_BUDGET)
            .ok()
            .filter(|r| r.exact)
            .map(|r| r.vstar)
    });
    let gap = vstar
        .filter(|_| rep.reason != TerminationReason::Unbounded)
        .map(|v| relative_gap(v, rep.objective));
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        family,
        n: pop.n,
        seed,
        relaxation: config.relaxation,
        order,
        dim,
        m,
        objective: rep.objective,
        vstar,
        gap,
        rp: rep.residuals.rp,
        rd: rep.residuals.rd,
        rc: rep.residuals.rc,
        rmax: rep.residuals.rmax,
        rank: rep.rank,
        alm_iters: rep.alm_iters,
        pg_iters: rep.pg_iters,
        lift_iters: rep.lift_iters,
        time_s: rep.time_s,
        reason: rep.reason,
        recession_value: rep.recession_value,
        config: config.solver.clone(),
    })
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Serialize a run report in the given format.
pub fn render_report(report: &RunReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.into()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(CsvRow {
                family: &report.family,
                n: report.n,
                dim: report.dim,
                m: report.m,
                relaxation: report.relaxation.as_str(),
                order: report.order,
                objective: report.objective,
                rp: report.rp,
                rd: report.rd,
                rc: report.rc,
                rank: report.rank,
                alm_iters: report.alm_iters,
                pg_iters: report.pg_iters,
                lift_iters: report.lift_iters,
                time_s: report.time_s,
                reason: report.reason.as_str(),
            })
            .map_err(csv_error)?;
            let bytes = w
                .into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Write `text` to `out`, or to standard output when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableName {
    HornGaps,
    ProjectionScaling,
}

impl FromStr for TableName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horn-gaps" => Ok(TableName::HornGaps),
            "projection-scaling" => Ok(TableName::ProjectionScaling),
            _ => Err(Error::Usage(format!("unknown table '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TableConfig {
    pub solver: SolverConfig,
    /// Highest relaxation order run for `horn-gaps`.
    pub max_order: u32,
    /// Sizes used by `projection-scaling`.
    pub scaling_sizes: Vec<usize>,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            solver: SolverConfig::default(),
            max_order: 2,
            scaling_sizes: vec![20, 40, 80],
        }
    }
}

/// Reference gap in percent, `None` standing for an unbounded relaxation, with its tolerance.
pub fn horn_reference(relaxation: Relaxation, order: u32) -> Option<(Option<f64>, f64)> {
    let r = match (relaxation, order) {
        (Relaxation::PolySdp, 1 | 2) => (None, 0.0),
        (Relaxation::PolySdpRlt, 1) => (Some(0.562), 0.01),
        (Relaxation::PolySdpRlt, 2) => (Some(0.280), 0.01),
        (Relaxation::MomSos, 1) => (None, 0.0),
        (Relaxation::MomSos, 2) => (Some(1.049), 0.05),
        (Relaxation::PolyMomSos, 1) => (Some(0.562), 0.01),
        (Relaxation::PolyMomSos, 2) => (Some(0.0), 0.001),
        _ => return None,
    };
    Some(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    /// Reference value; `"inf"` marks an unbounded entry.
    pub reference: String,
    pub tolerance: f64,
    pub measured: Option<f64>,
    pub reason: Option<TerminationReason>,
    pub time_s: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub schema_version: u32,
    pub table: TableName,
    pub rows: Vec<TableRow>,
    /// Set when some run stopped on its time limit.
    pub partial: bool,
    pub pass: bool,
}

/// Run the named table and compare against the reference values.
pub fn reproduce_table(name: TableName, config: &TableConfig) -> Result<TableReport> {
    let rows = match name {
        TableName::HornGaps => horn_gaps(config)?,
        TableName::ProjectionScaling => projection_scaling(&config.scaling_sizes)?,
    };
    let partial = rows
        .iter()
        .any(|r| r.reason == Some(TerminationReason::TimeLimit));
    let pass = rows.iter().all(|r| r.pass);
    Ok(TableReport {
        schema_version: SCHEMA_VERSION,
        table: name,
        rows,
        partial,
        pass,
    })
}

fn horn_gaps(config: &TableConfig) -> Result<Vec<TableRow>> {
    let pop = InstanceSpec::new(Family::Horn { n: 21 }, 0).generate()?;
    let mut rows = Vec::new();
    for order in 1..=config.max_order.min(2) {
        for relaxation in Relaxation::ALL {
            let (reference, tolerance) =
                horn_reference(relaxation, order).expect("orders 1 and 2 are tabulated");
            let (rep, _, _) = solve_relaxation(&pop, relaxation, order, &config.solver)?;
            let unbounded = rep.reason == TerminationReason::Unbounded;
            let measured = (!unbounded).then(|| relative_gap(0.0, rep.objective));
            let pass = match reference {
                None => unbounded,
                Some(g) => {
                    rep.reason == TerminationReason::Converged
                        && measured.is_some_and(|m| (m - g).abs() <= tolerance)
                }
            };
            rows.push(TableRow {
                label: format!("{relaxation} order {order}"),
                reference: reference.map_or("inf".into(), |g| format!("{g:.3}")),
                tolerance,
                measured,
                reason: Some(rep.reason),
                time_s: rep.time_s,
                pass,
            });
        }
    }
    Ok(rows)
}

/// Mean wall time of the consistency projection on a random `N x N` matrix over the order-2 basis.
pub fn time_consistency_projection(n: usize, reps: usize) -> Result<(usize, f64)> {
    let basis = enumerate_basis(n, 2)?;
    let blocks = ConsistencyBlocks::new(&basis)?;
    let dim = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let g: DMatrix<f64> = standard_normal_matrix(&mut rng, dim, dim);
    let g = (&g + g.transpose()) * 0.5;
    let mut scratch = Vec::new();
    let mut x = g.clone();
    project_consistency_nonneg_in_place(&mut x, &blocks, true, true, &mut scratch);
    let start = Instant::now();
    for _ in 0..reps {
        x.copy_from(&g);
        project_consistency_nonneg_in_place(&mut x, &blocks, true, true, &mut scratch);
    }
    Ok((
        dim * dim,
        start.elapsed().as_secs_f64() / reps.max(1) as f64,
    ))
}

/// Projection time per size against a least-squares line through the origin in the entry count;
/// a row passes when its time is within a factor of 3 of the fit.
fn projection_scaling(sizes: &[usize]) -> Result<Vec<TableRow>> {
    let mut samples = Vec::new();
    for &n in sizes {
        let (entries, t) = time_consistency_projection(n, 5)?;
        samples.push((n, entries as f64, t));
    }
    let slope = samples.iter().map(|(_, e, t)| e * t).sum::<f64>()
        / samples.iter().map(|(_, e, _)| e * e).sum::<f64>();
    Ok(samples
        .into_iter()
        .map(|(n, e, t)| {
            let ratio = t / (slope * e);
            TableRow {
                label: format!("n={n} entries={e}"),
                reference: "linear".into(),
                tolerance: 3.0,
                measured: Some(ratio),
                reason: None,
                time_s: t,
                pass: (1.0 / 3.0..=3.0).contains(&ratio),
            }
        })
        .collect())
}

/// Serialize a table report; CSV emits one line per row.
pub fn render_table(report: &TableReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.into()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "label",
                "reference",
                "tolerance",
                "measured",
                "reason",
                "time_s",
                "pass",
            ])
            .map_err(csv_error)?;
            for r in &report.rows {
                w.write_record([
                    r.label.clone(),
                    r.reference.clone(),
                    r.tolerance.to_string(),
                    r.measured.map_or(String::new(), |m| m.to_string()),
                    r.reason.map_or(String::new(), |x| x.as_str().to_string()),
                    r.time_s.to_string(),
                    r.pass.to_string(),
                ])
                .map_err(csv_error)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}
