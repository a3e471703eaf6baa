use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use uhpcflex::bench::{
    load_database, load_strength_table, sweep, validate_omega, validate_strength, Axis, BeamRecord, RowStatus,
    Source, StrengthValidation, SweepOptions,
};
use uhpcflex::design::{ductility, FailureMode, Intent, DEFAULT_GAMMA};
use uhpcflex::materials::{MaterialRecord, UhpcLaw};
use uhpcflex::section::{BeamFile, BeamSpec};
use uhpcflex::sectional::{moment_curvature, strength, BlockOptions, DEFAULT_ALPHA, DEFAULT_ZETA};
use uhpcflex::sim::{build_model, simulate, LoadDeflectionCurve, SimOptions, Termination};

use crate::output::{CliError, Report, Table};

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize")
}

fn read_beam(path: &Path) -> Result<BeamSpec, CliError> {
    Ok(BeamFile::read(path)?.to_spec()?)
}

fn database_path(db: &Option<PathBuf>, data: &Path) -> PathBuf {
    db.clone().unwrap_or_else(|| data.join("appendix_b.csv"))
}

#[derive(Debug, Args)]
pub struct MaterialArgs {
    /// Material record (JSON).
    pub file: PathBuf,
    /// Crack bandwidth H (mm), overriding the record.
    #[arg(long)]
    pub band_width: Option<f64>,
    /// Envelope samples on each side of zero strain.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
}

pub fn material(a: &MaterialArgs) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(&a.file).map_err(|e| CliError::input(format!("{}: {e}", a.file.display())))?;
    let record: MaterialRecord =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", a.file.display())))?;
    let mut law = UhpcLaw::derive(&record)?;
    if let Some(h) = a.band_width {
        law = law.with_band_width(h)?;
    }
    if a.points < 2 {
        return Err(CliError::input("--points must be at least 2"));
    }
    let mut table = Table::new(&["strain", "stress_MPa", "tangent_MPa"]);
    let n = a.points;
    let lo = law.compression_zero_strain();
    let strains = (0..n)
        .map(|i| lo * (1.0 - i as f64 / n as f64))
        .chain((0..=n).map(|i| law.eps_t_ult * i as f64 / n as f64));
    for e in strains {
        let (s, t) = law.envelope(e);
        table.push(vec![num(e), num(s), num(t)]);
    }
    let json = json!({
        "law": to_value(&law),
        "tension_energy": law.tension_energy(),
        "compression_energy": law.compression_energy(),
        "crushing_strain": law.crushing_strain(),
    });
    Ok(Report::new(json, table))
}

#[derive(Debug, Args)]
pub struct MkArgs {
    #[arg(long)]
    pub beam: PathBuf,
    /// Largest curvature (1/mm); defaults to a bottom-fiber strain of about 0.1.
    #[arg(long)]
    pub phi_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

pub fn mk(a: &MkArgs) -> Result<Report, CliError> {
    let spec = read_beam(&a.beam)?;
    let phi_max = a.phi_max.unwrap_or(0.1 / spec.section.h);
    let curve = moment_curvature(&spec, phi_max, a.steps)?;
    let mut table = Table::new(&["phi_per_mm", "M_kNm", "eps_top", "c_mm", "events"]);
    for p in &curve.points {
        let events: Vec<String> = p.events.iter().map(|e| to_value(e).as_str().unwrap_or_default().to_string()).collect();
        table.push(vec![num(p.phi), num(p.m * 1e-6), num(p.eps_top), opt(p.c), events.join(";")]);
    }
    Ok(Report::new(json!({ "name": spec.name, "curve": to_value(&curve) }), table))
}

#[derive(Debug, Args)]
pub struct StrengthArgs {
    #[arg(long)]
    pub beam: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_ZETA)]
    pub zeta: f64,
    /// Stress-block depth factor, bypassing the fiber-length rule.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Fiber length l_f (mm) when the beam file has none.
    #[arg(long)]
    pub fiber_length: Option<f64>,
}

pub fn strength_cmd(a: &StrengthArgs) -> Result<Report, CliError> {
    let spec = read_beam(&a.beam)?;
    let opts = BlockOptions { alpha: a.alpha, zeta: a.zeta, fiber_length: a.fiber_length, beta: a.beta };
    let r = strength(&spec, &opts)?;
    let mut table = Table::new(&["name", "M_loc_kNm", "M_u_kNm", "c_loc_mm", "c_u_mm", "alpha", "beta"]);
    table.push(vec![spec.name.clone(), num(r.m_loc), num(r.m_u), num(r.c_loc), num(r.c_u), num(r.alpha), num(r.beta)]);
    Ok(Report::new(to_value(&r), table))
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Beam database CSV; defaults to the bundled one.
    #[arg(long)]
    pub db: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
}

pub fn classify(a: &ClassifyArgs, data: &Path) -> Result<Report, CliError> {
    let records = load_database(database_path(&a.db, data))?;
    let v = validate_omega(&records, a.gamma)?;
    let mut table = Table::new(&["name", "omega", "predicted", "labeled", "match"]);
    let rows: Vec<Value> = v
        .rows
        .iter()
        .map(|r| {
            table.push(vec![
                r.name.clone(),
                num(r.omega),
                r.predicted.label().into(),
                r.labeled.label().into(),
                r.agrees.to_string(),
            ]);
            json!({ "name": r.name, "omega": r.omega, "predicted": r.predicted, "labeled": r.labeled, "match": r.agrees })
        })
        .collect();
    let json = json!({
        "rows": rows,
        "accuracy": { "numerical": to_value(&v.numerical), "all": to_value(&v.all) },
    });
    Ok(Report::new(json, table))
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub beam: PathBuf,
    /// Deflection increment (mm).
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    #[arg(long = "max-defl", default_value_t = 150.0)]
    pub max_defl: f64,
    /// Element length (mm), overriding the beam file.
    #[arg(long)]
    pub element_size: Option<f64>,
}

fn curve_table(curve: &LoadDeflectionCurve) -> Table {
    let mut table = Table::new(&["step", "P_kN", "defl_mm", "drift", "event"]);
    for (i, p) in curve.points.iter().enumerate() {
        let events: Vec<&str> = curve.events.iter().filter(|(_, j)| *j == i).map(|(e, _)| e.name()).collect();
        table.push(vec![i.to_string(), num(p.load), num(p.deflection), num(p.drift), events.join(";")]);
    }
    table
}

fn event_log(spec: &BeamSpec, curve: &LoadDeflectionCurve) -> Value {
    let events: Vec<Value> = curve
        .events
        .iter()
        .map(|&(e, i)| {
            let p = curve.points[i];
            json!({ "event": e.name(), "step": i, "P_kN": p.load, "defl_mm": p.deflection, "drift": p.drift })
        })
        .collect();
    json!({
        "name": spec.name,
        "events": events,
        "termination": to_value(&curve.termination),
        "mode": curve.mode,
        "peak_kN": curve.peak_load(),
        "energy_J": curve.dissipated_energy(),
        "ductility": ductility(curve).ok(),
    })
}

pub fn simulate_cmd(a: &SimulateArgs) -> Result<Report, CliError> {
    let mut file = BeamFile::read(&a.beam)?;
    if let Some(s) = a.element_size {
        file.element_size = Some(s);
    }
    let spec = file.to_spec()?;
    let curve = simulate(&build_model(&spec)?, &SimOptions::new(a.step, a.max_defl))?;
    let log = event_log(&spec, &curve);
    if let Termination::ConvergenceFailure(msg) = &curve.termination {
        let points: Vec<Value> = curve.points.iter().map(|p| json!([p.load, p.deflection])).collect();
        return Err(CliError {
            code: 2,
            kind: "ConvergenceFailure".into(),
            message: format!("solver did not converge: {msg}"),
            detail: Some(json!({ "log": log, "converged_points": points })),
        });
    }
    let json = json!({ "log": log.clone(), "points": to_value(&curve.points) });
    let mut report = Report::new(json, curve_table(&curve));
    report.sidecars.push((".events.json", log));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisName {
    /// Post-yield hardening f_su − f_y (MPa).
    Hardening,
    Fcon,
    Ft,
    /// UHPC localization strain.
    Loc,
    WebWidth,
    /// Steel split; levels are mild:<fraction>, ratio:<A_s/A_p>, all-mild,
    /// all-strand or strand:<A_p>.
    Split,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Database row used as the base.
    #[arg(long)]
    pub base: String,
    #[arg(long)]
    pub axis: AxisName,
    /// Comma-separated levels.
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<String>,
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Beam file for strength and simulation; defaults to the row's own.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Classify only, without strength or simulation.
    #[arg(long)]
    pub omega_only: bool,
    /// Also run the beam simulation at every level.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    #[arg(long = "max-defl", default_value_t = 150.0)]
    pub max_defl: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
}

fn parse_intent(s: &str) -> Result<Intent, CliError> {
    let value = |v: &str| v.parse::<f64>().map_err(|_| CliError::input(format!("bad split level '{s}'")));
    match s.split_once(':') {
        Some(("mild", v)) => Ok(Intent::MildForceFraction(value(v)?)),
        Some(("ratio", v)) => Ok(Intent::AreaRatio(value(v)?)),
        Some(("strand", v)) => Ok(Intent::FixedStrand(value(v)?)),
        None if s == "all-mild" => Ok(Intent::AllMild),
        None if s == "all-strand" => Ok(Intent::AllStrand),
        _ => Err(CliError::input(format!("bad split level '{s}'"))),
    }
}

fn parse_axis(name: AxisName, levels: &[String]) -> Result<Axis, CliError> {
    let numbers = || {
        levels
            .iter()
            .map(|l| l.trim().parse::<f64>().map_err(|_| CliError::input(format!("bad level '{l}'"))))
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(match name {
        AxisName::Hardening => Axis::Hardening(numbers()?),
        AxisName::Fcon => Axis::Fcon(numbers()?),
        AxisName::Ft => Axis::Ft(numbers()?),
        AxisName::Loc => Axis::LocStrain(numbers()?),
        AxisName::WebWidth => Axis::WebWidth(numbers()?),
        AxisName::Split => Axis::Split(levels.iter().map(|l| parse_intent(l.trim())).collect::<Result<_, _>>()?),
    })
}

pub fn sweep_cmd(a: &SweepArgs, data: &Path) -> Result<Report, CliError> {
    let records = load_database(database_path(&a.db, data))?;
    let base: &BeamRecord = records
        .iter()
        .find(|r| r.name == a.base)
        .ok_or_else(|| CliError::input(format!("no database row named '{}'", a.base)))?;
    let axis = parse_axis(a.axis, &a.levels)?;
    let geometry = if a.omega_only {
        None
    } else {
        let path = a.geometry.clone().or_else(|| uhpcflex::bench::geometry_path(base, data));
        path.map(|p| BeamFile::read(p)).transpose()?
    };
    let opts = SweepOptions {
        gamma: a.gamma,
        geometry,
        simulate: a.simulate.then(|| SimOptions::new(a.step, a.max_defl)),
        ..SweepOptions::default()
    };
    let rows = sweep(base, &axis, &opts)?;
    let mut table = Table::new(&[
        "name",
        "level",
        "omega",
        "predicted",
        "M_loc_kNm",
        "M_u_kNm",
        "simulated_mode",
        "mu",
        "stand_in_geometry",
        "error",
    ]);
    for r in &rows {
        table.push(vec![
            r.name.clone(),
            r.level.clone(),
            opt(r.omega),
            opt(r.predicted.map(FailureMode::label)),
            opt(r.strength.map(|s| s.m_loc)),
            opt(r.strength.map(|s| s.m_u)),
            opt(r.simulated_mode.map(FailureMode::label)),
            opt(r.mu),
            r.stand_in_geometry.to_string(),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    Ok(Report::new(json!({ "base": base.name, "axis": to_value(&axis), "rows": to_value(&rows) }), table))
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Printed strength comparison table; defaults to the bundled one.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
}

/// Thresholds checked by `validate`.
pub const OMEGA_TOLERANCE: f64 = 0.02;
pub const NUMERICAL_AGREEMENT: usize = 24;
pub const ALL_AGREEMENT: usize = 40;
pub const STRENGTH_TOLERANCE: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    Pass,
    Fail,
    Blocked,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn strength_checks(s: &StrengthValidation) -> Vec<(String, Verdict, String)> {
    let mut out = Vec::new();
    let agg = |label: &str, st: &uhpcflex::bench::ValidationStats, mean: f64, std: f64| {
        let ok = round2(st.mean_ratio) == mean && round2(st.std_ratio) == std;
        (
            format!("printed {label} ratios re-aggregate to {mean:.2}/{std:.2}"),
            if ok { Verdict::Pass } else { Verdict::Fail },
            format!("mean {:.4}, std {:.4} over {} rows", st.mean_ratio, st.std_ratio, st.n_rows),
        )
    };
    out.push(agg("localization", &s.printed_loc, 0.97, 0.10));
    out.push(agg("ultimate", &s.printed_u, 1.02, 0.11));
    for r in &s.rows {
        let name = format!("{} strength within 3%", r.name);
        let (verdict, detail) = match r.status {
            RowStatus::Blocked => (Verdict::Blocked, r.message.clone().unwrap_or_default()),
            RowStatus::Failed => (Verdict::Fail, r.message.clone().unwrap_or_default()),
            RowStatus::Computed => match (r.loc_error(), r.u_error()) {
                (Some(l), Some(u)) => {
                    let ok = l.abs() <= STRENGTH_TOLERANCE && u.abs() <= STRENGTH_TOLERANCE;
                    (
                        if ok { Verdict::Pass } else { Verdict::Fail },
                        format!("localization {:+.2}%, ultimate {:+.2}%", 100.0 * l, 100.0 * u),
                    )
                }
                _ => (Verdict::Blocked, "no printed values for this row".into()),
            },
        };
        out.push((name, verdict, detail));
    }
    out
}

pub fn validate(a: &ValidateArgs, data: &Path) -> Result<Report, CliError> {
    let records = load_database(database_path(&a.db, data))?;
    let table_path = a.table.clone().unwrap_or_else(|| data.join("table2.csv"));
    let printed = load_strength_table(&table_path)?;
    let w = validate_omega(&records, a.gamma)?;
    let dev = w
        .rows
        .iter()
        .filter(|r| r.source == Source::Numerical)
        .filter_map(|r| r.omega_ref.map(|x| (r.omega - x).abs()))
        .fold(0.0, f64::max);
    let mut checks = vec![
        (
            format!("numerical rows reproduce printed omega within {OMEGA_TOLERANCE}"),
            if dev <= OMEGA_TOLERANCE { Verdict::Pass } else { Verdict::Fail },
            format!("largest deviation {dev:.4}"),
        ),
        (
            format!("numerical rows classified correctly >= {NUMERICAL_AGREEMENT}"),
            if w.numerical.agree >= NUMERICAL_AGREEMENT { Verdict::Pass } else { Verdict::Fail },
            format!("{}/{}", w.numerical.agree, w.numerical.total),
        ),
        (
            format!("all rows classified correctly >= {ALL_AGREEMENT}"),
            if w.all.agree >= ALL_AGREEMENT { Verdict::Pass } else { Verdict::Fail },
            format!("{}/{}", w.all.agree, w.all.total),
        ),
    ];
    let s = validate_strength(&records, &printed, data, &BlockOptions::default());
    checks.extend(strength_checks(&s));

    let mut table = Table::new(&["check", "verdict", "detail"]);
    for (name, v, detail) in &checks {
        table.push(vec![name.clone(), to_value(v).as_str().unwrap_or_default().into(), detail.clone()]);
    }
    let failed = checks.iter().any(|(_, v, _)| *v == Verdict::Fail);
    let json = json!({
        "checks": checks.iter().map(|(n, v, d)| json!({ "check": n, "verdict": v, "detail": d })).collect::<Vec<_>>(),
        "omega": to_value(&w),
        "strength": to_value(&s),
        "passed": !failed,
    });
    let mut report = Report::new(json, table);
    if failed {
        report.code = 3;
    }
    Ok(report)
}
