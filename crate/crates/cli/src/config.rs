//! Command-line configuration. The parsed [`RunConfig`] is also a serde type,
//! so a run can be recorded and replayed.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use euq_core::designs::{clifford_orbit_family, mub_family, sic_povm};
use euq_core::linops::max_entangled;
use euq_core::states::{random_density_with_dims, random_separable, DensityMatrixFile};
use euq_core::{DensityMatrix, MeasurementFamily, SeedSpec, DEFAULT_RANK_TOL};

use crate::CliError;

#[derive(Parser, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[command(
    name = "euq",
    version,
    about = "Verify entanglement–uncertainty relations for 2-design measurements"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check a relation on seeded random states.
    Verify(VerifyArgs),
    /// Tabulate the n-basis bounds over a grid of recovery fidelities.
    Sweep(SweepArgs),
    /// Evaluate the entanglement witness on measured joint statistics.
    Witness(WitnessArgs),
    /// Simulate the guessing game and compare with the analytic win rate.
    Game(GameArgs),
    /// Print a measurement family as JSON.
    Family(FamilyArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// Collision-entropy equality for a 2-design family.
    Main,
    /// Monogamy equation on tripartite pure states.
    Monogamy,
    /// n-basis bounds and the two-to-all bound.
    Bounds,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictFormat {
    Text,
    Json,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "main")]
    pub relation: Relation,
    /// Dimension of A.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Dimension of B (defaults to d).
    #[arg(long)]
    pub db: Option<usize>,
    /// Dimension of E for monogamy checks (defaults to d).
    #[arg(long)]
    pub de: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
    /// Number of bases for bound checks (defaults to every n).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "mub")]
    pub family: FamilySpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the relation's default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: TableFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    /// Number of evenly spaced F^pg points in [0, 1].
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessArgs {
    /// Joint-distribution JSON file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = euq_core::relations::EQUALITY_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: VerdictFormat,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameArgs {
    #[arg(long, default_value = "max-entangled")]
    pub state: StateSpec,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Dimension of B (defaults to d).
    #[arg(long)]
    pub db: Option<usize>,
    #[arg(long, default_value = "mub")]
    pub family: FamilySpec,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyArgs {
    #[arg(long, default_value = "mub")]
    pub family: FamilySpec,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// `mub`, `sic`, `clifford` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FamilySpec {
    Mub,
    Sic,
    Clifford,
    File(PathBuf),
}

impl FamilySpec {
    pub fn build(&self, d: usize) -> Result<MeasurementFamily, CliError> {
        let family = match self {
            FamilySpec::Mub => mub_family(d)?,
            FamilySpec::Sic => sic_povm(d)?,
            FamilySpec::Clifford => {
                if d != 2 {
                    return Err(euq_core::Error::UnsupportedDimension {
                        d,
                        reason: "the Clifford orbit family is a qubit family".into(),
                    }
                    .into());
                }
                clifford_orbit_family()?
            }
            FamilySpec::File(path) => MeasurementFamily::from_json(&crate::read_input(path)?)?,
        };
        if family.d() != d {
            return Err(CliError::Usage(format!(
                "family acts on dimension {}, but d = {d}",
                family.d()
            )));
        }
        Ok(family)
    }
}

impl FromStr for FamilySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mub" => Ok(FamilySpec::Mub),
            "sic" => Ok(FamilySpec::Sic),
            "clifford" => Ok(FamilySpec::Clifford),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(FamilySpec::File(path.into())),
                _ => Err(format!(
                    "unknown family '{s}' (expected mub, sic, clifford or file:<path>)"
                )),
            },
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Mub => f.write_str("mub"),
            FamilySpec::Sic => f.write_str("sic"),
            FamilySpec::Clifford => f.write_str("clifford"),
            FamilySpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl TryFrom<String> for FamilySpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<FamilySpec> for String {
    fn from(spec: FamilySpec) -> String {
        spec.to_string()
    }
}

/// `max-entangled`, `maximally-mixed`, `random`, `separable` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StateSpec {
    MaxEntangled,
    MaximallyMixed,
    Random,
    Separable,
    File(PathBuf),
}

impl StateSpec {
    /// Builds the state on `C^d ⊗ C^{d_b}`; random states use stream 0 of `seed`.
    pub fn build(&self, d: usize, d_b: usize, seed: u64) -> Result<DensityMatrix, CliError> {
        let seed = SeedSpec::new(seed, 0);
        Ok(match self {
            StateSpec::MaxEntangled => {
                if d_b != d {
                    return Err(CliError::Usage(format!(
                        "max-entangled needs db = d, got d = {d}, db = {d_b}"
                    )));
                }
                DensityMatrix::from_pure(&max_entangled(d), vec![d, d])?
            }
            StateSpec::MaximallyMixed => DensityMatrix::maximally_mixed(vec![d, d_b]),
            StateSpec::Random => random_density_with_dims(vec![d, d_b], d * d_b, seed)?,
            StateSpec::Separable => random_separable(d, d_b, d * d_b, seed)?,
            StateSpec::File(path) => {
                let rho =
                    DensityMatrixFile::from_json(&crate::read_input(path)?)?.into_density()?;
                let dims = rho.bipartite_dims()?;
                if dims != (d, d_b) {
                    return Err(CliError::Usage(format!(
                        "state file has dims {:?}, expected [{d}, {d_b}]",
                        rho.dims()
                    )));
                }
                rho
            }
        })
    }
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max-entangled" => Ok(StateSpec::MaxEntangled),
            "maximally-mixed" => Ok(StateSpec::MaximallyMixed),
            "random" => Ok(StateSpec::Random),
            "separable" => Ok(StateSpec::Separable),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(StateSpec::File(path.into())),
                _ => Err(format!(
                    "unknown state '{s}' (expected max-entangled, maximally-mixed, random, separable or file:<path>)"
                )),
            },
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::MaxEntangled => f.write_str("max-entangled"),
            StateSpec::MaximallyMixed => f.write_str("maximally-mixed"),
            StateSpec::Random => f.write_str("random"),
            StateSpec::Separable => f.write_str("separable"),
            StateSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl TryFrom<String> for StateSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<StateSpec> for String {
    fn from(spec: StateSpec) -> String {
        spec.to_string()
    }
}
