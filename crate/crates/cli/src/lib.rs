//! The `euq` command line: relation checks on sampled states, bound tables,
//! witness evaluation and game simulation, all with machine-readable output.
//!
//! Exit codes: 0 success or entanglement certified, 1 a relation was violated,
//! 2 usage or input error, 3 witness inconclusive.

pub mod config;
pub mod output;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use euq_core::designs::FamilyKind;
use euq_core::entropies::JointDistribution;
use euq_core::relations::{
    self, bound_curves, bound_sweep, monogamy_report, nbasis_profile, point_reports,
    prefix_average, two_to_full_bound, NBasisPoint, Regime, RelationReport, ReportMetadata,
    EQUALITY_TOL, MONOGAMY_TOL,
};
use euq_core::states::{random_density_with_dims, random_pure};
use euq_core::{simulate_game, SeedSpec};

pub use config::{Command, FamilySpec, Relation, RunConfig, StateSpec, TableFormat, VerdictFormat};
use output::{emit, to_csv, to_json};

/// Width of the acceptance band for game simulations, in standard errors.
pub const GAME_SIGMAS: f64 = 4.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] euq_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Violation = 1,
    Usage = 2,
    Inconclusive = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

pub(crate) fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Runs a parsed configuration, writing results to `stdout` or the requested file.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<Status, CliError> {
    match &config.command {
        Command::Verify(args) => cmd_verify(args, stdout),
        Command::Sweep(args) => cmd_sweep(args, stdout),
        Command::Witness(args) => cmd_witness(args, stdout),
        Command::Game(args) => cmd_game(args, stdout),
        Command::Family(args) => cmd_family(args, stdout),
    }
}

/// One CSV line per report.
#[derive(Debug, Serialize)]
struct ReportRow<'a> {
    sample: usize,
    relation: &'a str,
    lhs: f64,
    rhs: f64,
    defect: f64,
    tolerance: f64,
    verdict: relations::Verdict,
    family_kind: Option<&'a str>,
    d: usize,
    d_b: Option<usize>,
    nu: Option<f64>,
    n: Option<usize>,
    warnings: String,
}

#[derive(Debug, Serialize)]
struct SampledReport {
    sample: usize,
    #[serde(flatten)]
    report: RelationReport,
}

pub fn cmd_verify(args: &config::VerifyArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let d = args.d;
    let d_b = args.db.unwrap_or(d);
    let family = args.family.build(d)?;
    if d_b == 0 || args.samples == 0 {
        return Err(CliError::Usage("db and samples must be positive".into()));
    }
    let mut reports = Vec::new();
    match args.relation {
        Relation::Main => {
            let tol = args.tol.unwrap_or(EQUALITY_TOL);
            for i in 0..args.samples {
                let rank = 1 + i % (d * d_b);
                let rho = random_density_with_dims(
                    vec![d, d_b],
                    rank,
                    SeedSpec::new(args.seed, i as u64),
                )?;
                reports.push((
                    i,
                    relations::equality_report(&rho, &family, args.nu, args.rank_tol, tol)?,
                ));
            }
        }
        Relation::Monogamy => {
            require_mubs(&family)?;
            let d_e = args.de.unwrap_or(d);
            let tol = args.tol.unwrap_or(MONOGAMY_TOL);
            for i in 0..args.samples {
                let psi = random_pure(d * d_b * d_e, SeedSpec::new(args.seed, i as u64));
                reports.push((
                    i,
                    monogamy_report(&psi, [d, d_b, d_e], &family, args.rank_tol, tol)?,
                ));
            }
        }
        Relation::Bounds => {
            require_mubs(&family)?;
            let tol = args.tol.unwrap_or(EQUALITY_TOL);
            let ns: Vec<usize> = match args.n {
                Some(n) if (1..=d + 1).contains(&n) => vec![n],
                Some(n) => {
                    return Err(CliError::Usage(format!(
                        "n must lie in 1..={}, got {n}",
                        d + 1
                    )))
                }
                None => (1..=d + 1).collect(),
            };
            for i in 0..args.samples {
                let rank = 1 + i % (d * d_b);
                let rho = random_density_with_dims(
                    vec![d, d_b],
                    rank,
                    SeedSpec::new(args.seed, i as u64),
                )?;
                let (per_setting, f_pg) = nbasis_profile(&rho, &family, args.rank_tol)?;
                for &n in &ns {
                    let (lower, upper) = bound_curves(d, n, f_pg)?;
                    let point = NBasisPoint {
                        n,
                        f_pg,
                        p_n: prefix_average(&per_setting, n),
                        lower,
                        upper,
                        regime: Regime::of(f_pg, d),
                    };
                    let (lo, hi) = point_reports(&point, d, tol);
                    reports.push((i, lo));
                    reports.push((i, hi));
                }
                let bound = two_to_full_bound(prefix_average(&per_setting, 2), d)?;
                let meta = ReportMetadata {
                    family_kind: Some(family.kind().label()),
                    d,
                    d_b: Some(d_b),
                    nu: Some(0.0),
                    n: Some(d + 1),
                };
                let full = prefix_average(&per_setting, d + 1);
                reports.push((
                    i,
                    RelationReport::at_most("two-to-all", bound, full, tol, meta),
                ));
            }
        }
    }
    let all_hold = reports.iter().all(|(_, r)| r.holds());
    let text = match args.format {
        TableFormat::Json => {
            let items: Vec<SampledReport> = reports
                .into_iter()
                .map(|(sample, report)| SampledReport { sample, report })
                .collect();
            to_json(&items)?
        }
        TableFormat::Csv => {
            let rows: Vec<ReportRow> = reports
                .iter()
                .map(|(sample, r)| ReportRow {
                    sample: *sample,
                    relation: &r.relation,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    defect: r.defect,
                    tolerance: r.tolerance,
                    verdict: r.verdict,
                    family_kind: r.metadata.family_kind.as_deref(),
                    d: r.metadata.d,
                    d_b: r.metadata.d_b,
                    nu: r.metadata.nu,
                    n: r.metadata.n,
                    warnings: r.warnings.join("; "),
                })
                .collect();
            to_csv(&rows)?
        }
    };
    emit(&text, args.output.as_deref(), stdout)?;
    Ok(if all_hold {
        Status::Success
    } else {
        Status::Violation
    })
}

fn require_mubs(family: &euq_core::MeasurementFamily) -> Result<(), CliError> {
    if family.kind() != FamilyKind::MubComplete {
        return Err(CliError::Usage(format!(
            "this relation needs the complete MUB family, got {}",
            family.kind().label()
        )));
    }
    Ok(())
}

pub fn cmd_sweep(args: &config::SweepArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let rows = bound_sweep(args.d, args.grid)?;
    let text = match args.format {
        TableFormat::Csv => to_csv(&rows)?,
        TableFormat::Json => to_json(&rows)?,
    };
    emit(&text, args.output.as_deref(), stdout)?;
    Ok(Status::Success)
}

pub fn cmd_witness(args: &config::WitnessArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let joints = JointDistribution::from_json(&read_input(&args.input)?)?;
    let report = relations::witness(&joints, args.tol)?;
    let entangled = !report.holds();
    match args.format {
        VerdictFormat::Text => {
            let line = if entangled {
                format!("ENTANGLED ({:.3} > {:.3})\n", report.lhs, report.rhs)
            } else {
                format!("INCONCLUSIVE ({:.3} <= {:.3})\n", report.lhs, report.rhs)
            };
            stdout.write_all(line.as_bytes())?;
        }
        VerdictFormat::Json => stdout.write_all(to_json(&report)?.as_bytes())?,
    }
    Ok(if entangled {
        Status::Success
    } else {
        Status::Inconclusive
    })
}

pub fn cmd_game(args: &config::GameArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let d_b = args.db.unwrap_or(args.d);
    let rho = args.state.build(args.d, d_b, args.seed)?;
    let family = args.family.build(args.d)?;
    let result = simulate_game(
        &rho,
        &family,
        args.trials,
        SeedSpec::new(args.seed, 1),
        args.rank_tol,
    )?;
    emit(&to_json(&result)?, args.output.as_deref(), stdout)?;
    Ok(if result.within_band(GAME_SIGMAS) {
        Status::Success
    } else {
        Status::Violation
    })
}

pub fn cmd_family(args: &config::FamilyArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let family = args.family.build(args.d)?;
    emit(&to_json(&family.to_file())?, args.output.as_deref(), stdout)?;
    Ok(Status::Success)
}
