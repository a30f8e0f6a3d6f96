use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rpop::harness::{
    emit, render_report, render_table, reproduce_table, run, InstanceSource, OutputFormat,
    Relaxation, RunConfig, TableConfig, TableName,
};
use rpop::instances::{oracle_solve, CstKind, Family, InstanceSpec, DEFAULT_BUDGET};
use rpop::solver::SolverConfig;
use rpop::{Error, Result};

/// Build and solve polyhedral-SDP or moment-SOS relaxations of polynomial programs.
#[derive(Parser, Debug)]
#[command(name = "rpop", version)]
struct Cli {
    /// Instance JSON file.
    #[arg(long, env = "RPOP_INSTANCE", conflicts_with = "family")]
    instance: Option<PathBuf>,
    /// Generator family: stqp, horn, biq, mbp, mqkp, bqm, kmp, cst, ntf, nstf.
    #[arg(long, env = "RPOP_FAMILY")]
    family: Option<String>,
    #[arg(long, env = "RPOP_N")]
    n: Option<usize>,
    /// Edge probability (mbp).
    #[arg(long, env = "RPOP_P", default_value_t = 0.5)]
    p: f64,
    /// Knapsack constraint count (mqkp).
    #[arg(long, env = "RPOP_D", default_value_t = 1)]
    d: usize,
    /// Tensor order (cst, ntf, nstf).
    #[arg(long, env = "RPOP_T")]
    t: Option<u32>,
    /// Tensor kind: random or copositive (cst), 1, 2 or 3 (nstf).
    #[arg(long, env = "RPOP_KIND")]
    kind: Option<String>,

    #[arg(long, env = "RPOP_RELAXATION", default_value = "poly-sdp-rlt", value_parser = parse::<Relaxation>)]
    relaxation: Relaxation,
    #[arg(long, env = "RPOP_ORDER")]
    order: Option<u32>,
    #[arg(long, env = "RPOP_TOL")]
    tol: Option<f64>,
    /// Seconds.
    #[arg(long, env = "RPOP_TIME_LIMIT")]
    time_limit: Option<f64>,
    #[arg(long, env = "RPOP_SIGMA0")]
    sigma0: Option<f64>,
    #[arg(long, env = "RPOP_RANK0")]
    rank0: Option<usize>,
    /// Seed for the generator and the solver's initial factor.
    #[arg(long, env = "RPOP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "RPOP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "RPOP_FORMAT", default_value = "json", value_parser = parse::<OutputFormat>)]
    format: OutputFormat,

    /// Reproduce a table (horn-gaps, projection-scaling) instead of a single run.
    #[arg(long, env = "RPOP_TABLE", value_parser = parse::<TableName>)]
    table: Option<TableName>,
    /// Highest order run by horn-gaps.
    #[arg(long, env = "RPOP_MAX_ORDER", default_value_t = 2)]
    max_order: u32,
    /// Run the brute-force oracle on the instance instead of solving a relaxation.
    #[arg(long)]
    oracle: bool,
    /// Write the instance JSON to this path and exit.
    #[arg(long)]
    emit_instance: Option<PathBuf>,
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn family(cli: &Cli, name: &str) -> Result<Family> {
    let n = cli
        .n
        .ok_or_else(|| Error::Usage("--n is required with --family".into()))?;
    let t = || {
        cli.t
            .ok_or_else(|| Error::Usage(format!("--t is required for {name}")))
    };
    Ok(match name {
        "stqp" => Family::Stqp { n },
        "horn" => Family::Horn { n },
        "biq" => Family::Biq { n },
        "mbp" => Family::Mbp { n, p: cli.p },
        "mqkp" => Family::Mqkp { n, d: cli.d },
        "bqm" => Family::Bqm { n },
        "kmp" => Family::Kmp { n },
        "cst" => {
            let kind = match cli.kind.as_deref().unwrap_or("random") {
                "random" => CstKind::Random,
                "copositive" => CstKind::Copositive,
                k => return Err(Error::Usage(format!("unknown cst kind '{k}'"))),
            };
            Family::Cst { n, t: t()?, kind }
        }
        "ntf" => Family::Ntf { n, t: t()? },
        "nstf" => {
            let kind = cli.kind.as_deref().unwrap_or("1");
            let kind = kind
                .parse()
                .map_err(|_| Error::Usage(format!("nstf kind must be 1, 2 or 3, got '{kind}'")))?;
            Family::Nstf { n, t: t()?, kind }
        }
        _ => return Err(Error::Usage(format!("unknown family '{name}'"))),
    })
}

fn source(cli: &Cli) -> Result<InstanceSource> {
    match (&cli.instance, &cli.family) {
        (Some(path), None) => Ok(InstanceSource::File(path.clone())),
        (None, Some(name)) => Ok(InstanceSource::Generator(InstanceSpec::new(
            family(cli, name)?,
            cli.seed,
        ))),
        _ => Err(Error::Usage(
            "exactly one of --instance or --family is required".into(),
        )),
    }
}

fn solver_config(cli: &Cli) -> SolverConfig {
    let mut c = SolverConfig {
        seed: cli.seed,
        ..SolverConfig::default()
    };
    if let Some(v) = cli.tol {
        c.tol = v;
    }
    if let Some(v) = cli.time_limit {
        c.time_limit = v;
    }
    if let Some(v) = cli.sigma0 {
        c.sigma0 = v;
    }
    if cli.rank0.is_some() {
        c.rank0 = cli.rank0;
    }
    c
}

fn program(src: &InstanceSource) -> Result<rpop::relax::PolynomialProgram> {
    match src {
        InstanceSource::File(p) => rpop::relax::InstanceFile::read(p)?.into_program(),
        InstanceSource::Generator(spec) => spec.generate(),
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let solver = solver_config(cli);
    if let Some(name) = cli.table {
        let cfg = TableConfig {
            solver,
            max_order: cli.max_order,
            ..TableConfig::default()
        };
        let report = reproduce_table(name, &cfg)?;
        emit(&render_table(&report, cli.format)?, cli.out.as_deref())?;
        return Ok(report.pass);
    }
    let src = source(cli)?;
    if let Some(path) = &cli.emit_instance {
        let file = program(&src)?.to_instance(cli.order);
        let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.into()))?;
        emit(&(text + "\n"), Some(path))?;
        return Ok(true);
    }
    if cli.oracle {
        let r = oracle_solve(&program(&src)?, DEFAULT_BUDGET)?;
        let text = serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.into()))?;
        emit(&(text + "\n"), cli.out.as_deref())?;
        return Ok(true);
    }
    let cfg = RunConfig {
        relaxation: cli.relaxation,
        order: cli.order,
        solver,
        source: src,
        out: cli.out.clone(),
        format: cli.format,
    };
    let report = run(&cfg)?;
    emit(&render_report(&report, cfg.format)?, cfg.out.as_deref())?;
    Ok(report.converged())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("rpop: {e}");
            ExitCode::from(2)
        }
    }
}
