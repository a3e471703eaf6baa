//! Batch work over the beam database: ω validation, strength regression
//! against the printed calculations, and parametric sweeps.

mod database;
mod sweep;

pub use database::{
    geometry_path, load_database, load_strength_table, parse_database, write_database, BeamRecord, SectionType,
    Source, StrengthRow, HEADER,
};
pub use sweep::{sweep, Axis, SweepOptions, SweepRow};

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::design::{omega, FailureMode};
use crate::error::Result;
use crate::section::BeamFile;
use crate::sectional::{strength, BlockOptions, StrengthReport};

/// Environment variable overriding the bundled data directory.
pub const DATA_ENV: &str = "UHPCFLEX_DATA";

/// Bundled fixture directory, unless overridden.
pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

/// Mean and sample standard deviation of a ratio column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationStats {
    pub n_rows: usize,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    pub ratios: Vec<f64>,
}

impl ValidationStats {
    pub fn from_ratios(ratios: Vec<f64>) -> Self {
        let n = ratios.len();
        let mean = ratios.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        ValidationStats { n_rows: n, mean_ratio: mean, std_ratio: var.sqrt(), ratios }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaRow {
    pub name: String,
    pub omega: f64,
    pub omega_ref: Option<f64>,
    pub predicted: FailureMode,
    pub labeled: FailureMode,
    /// Prediction agrees with the label, Transition counting as CL.
    #[serde(rename = "match")]
    pub agrees: bool,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tally {
    pub agree: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaValidation {
    pub rows: Vec<OmegaRow>,
    pub numerical: Tally,
    pub all: Tally,
    /// Largest |ω − ω_ref| over rows that print ω.
    pub max_deviation: f64,
}

/// Recomputes ω for every row and tallies agreement with the labels.
pub fn validate_omega(records: &[BeamRecord], gamma: f64) -> Result<OmegaValidation> {
    let rows = records
        .par_iter()
        .map(|r| {
            let rep = omega(&r.omega_inputs(gamma))?;
            Ok(OmegaRow {
                name: r.name.clone(),
                omega: rep.omega,
                omega_ref: r.omega_ref,
                predicted: rep.predicted_mode,
                labeled: r.mode_ref,
                agrees: rep.predicted_mode == r.mode_ref.two_way(),
                source: r.source,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tally = |f: &dyn Fn(&OmegaRow) -> bool| Tally {
        agree: rows.iter().filter(|r| f(r) && r.agrees).count(),
        total: rows.iter().filter(|r| f(r)).count(),
    };
    let numerical = tally(&|r| r.source == Source::Numerical);
    let all = tally(&|_| true);
    let max_deviation = rows
        .iter()
        .filter_map(|r| r.omega_ref.map(|w| (r.omega - w).abs()))
        .fold(0.0, f64::max);
    Ok(OmegaValidation { rows, numerical, all, max_deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Computed,
    /// The geometry file is a stand-in, so the row cannot be checked.
    Blocked,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthCheck {
    pub name: String,
    pub status: RowStatus,
    pub report: Option<StrengthReport>,
    pub m_loc_ref: Option<f64>,
    pub m_u_ref: Option<f64>,
    pub message: Option<String>,
}

impl StrengthCheck {
    pub fn loc_error(&self) -> Option<f64> {
        Some(self.report?.m_loc / self.m_loc_ref? - 1.0)
    }

    pub fn u_error(&self) -> Option<f64> {
        Some(self.report?.m_u / self.m_u_ref? - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthValidation {
    pub rows: Vec<StrengthCheck>,
    /// The printed Cal/Num ratios re-aggregated.
    pub printed_loc: ValidationStats,
    pub printed_u: ValidationStats,
}

/// Runs both capacity calculations for every row with a geometry file and
/// lines them up with the printed calculated values. Rows fail
/// individually; the aggregate is always produced.
pub fn validate_strength(
    records: &[BeamRecord],
    table: &[StrengthRow],
    data_dir: &Path,
    opts: &BlockOptions,
) -> StrengthValidation {
    let rows = records
        .par_iter()
        .filter_map(|r| geometry_path(r, data_dir).map(|p| (r, p)))
        .map(|(r, path)| {
            let printed = table.iter().find(|t| t.name == r.name);
            let mut check = StrengthCheck {
                name: r.name.clone(),
                status: RowStatus::Computed,
                report: None,
                m_loc_ref: printed.map(|t| t.m_loc_cal),
                m_u_ref: printed.map(|t| t.m_u_cal),
                message: None,
            };
            let outcome = BeamFile::read(&path).and_then(|g| {
                if g.placeholder {
                    Ok(None)
                } else {
                    strength(&r.to_spec(&g)?, opts).map(Some)
                }
            });
            match outcome {
                Ok(Some(rep)) => check.report = Some(rep),
                Ok(None) => {
                    check.status = RowStatus::Blocked;
                    check.message = Some(format!("{} holds stand-in dimensions", path.display()));
                }
                Err(e) => {
                    check.status = RowStatus::Failed;
                    check.message = Some(e.to_string());
                }
            }
            check
        })
        .collect();
    StrengthValidation {
        rows,
        printed_loc: ValidationStats::from_ratios(table.iter().map(|t| t.loc_ratio).collect()),
        printed_u: ValidationStats::from_ratios(table.iter().map(|t| t.u_ratio).collect()),
    }
}
