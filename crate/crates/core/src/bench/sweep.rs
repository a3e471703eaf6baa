//! One-parameter sweeps around a database row, named the way the
//! parametric families are: a level equal to the base value is "-Re",
//! others get an axis tag such as "-SH50", "-fcon930", "-ft6", "-loc0.1%"
//! or "-b250".

use rayon::prelude::*;
use serde::Serialize;

use super::BeamRecord;
use crate::design::{ductility, omega, proportion_reinforcement, FailureMode, ForceBalance, Intent, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::materials::uhpc::DEFAULT_EPS_T_LOC;
use crate::materials::StrandLaw;
use crate::section::{BeamFile, BeamSpec};
use crate::sectional::{strand_stress_at_localization, strength, BlockOptions, StrengthReport};
use crate::sim::{build_model, simulate, SimOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axis", content = "levels", rename_all = "snake_case")]
pub enum Axis {
    /// Post-yield hardening f_su − f_y (MPa).
    Hardening(Vec<f64>),
    /// Jacking (effective) prestress (MPa).
    Fcon(Vec<f64>),
    /// UHPC tensile strength (MPa).
    Ft(Vec<f64>),
    /// UHPC localization strain.
    LocStrain(Vec<f64>),
    WebWidth(Vec<f64>),
    /// Steel split at constant localization tension force.
    Split(Vec<Intent>),
}

impl Axis {
    pub fn len(&self) -> usize {
        match self {
            Axis::Hardening(v) | Axis::Fcon(v) | Axis::Ft(v) | Axis::LocStrain(v) | Axis::WebWidth(v) => v.len(),
            Axis::Split(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub gamma: f64,
    /// Profile for strength and simulation; omitted means ω only.
    pub geometry: Option<BeamFile>,
    pub block: BlockOptions,
    pub simulate: Option<SimOptions>,
    /// Fixed strand stress at localization instead of recomputing it on the
    /// prestress and localization-strain axes.
    pub f_p_loc: Option<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { gamma: DEFAULT_GAMMA, geometry: None, block: BlockOptions::default(), simulate: None, f_p_loc: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub name: String,
    pub level: String,
    pub omega: Option<f64>,
    pub predicted: Option<FailureMode>,
    pub strength: Option<StrengthReport>,
    pub simulated_mode: Option<FailureMode>,
    pub mu: Option<f64>,
    /// Strength and simulation used stand-in dimensions.
    pub stand_in_geometry: bool,
    pub error: Option<String>,
}

fn trim(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    format!("{r}")
}

fn family(base: &str) -> &str {
    base.strip_suffix("-Re").unwrap_or(base)
}

struct Level {
    record: BeamRecord,
    eps_t_loc: Option<f64>,
    label: String,
    suffix: String,
}

fn strand_loc_stress(r: &BeamRecord, eps_t_loc: f64, opts: &SweepOptions) -> Result<f64> {
    if let Some(f) = opts.f_p_loc {
        return Ok(f);
    }
    if r.a_p == 0.0 {
        return Ok(0.0);
    }
    let strand = StrandLaw::grade_270(r.f_pu, None, None)?;
    strand_stress_at_localization(&strand, r.f_con, eps_t_loc, 0.0)
}

fn base_loc_strain(opts: &SweepOptions) -> f64 {
    opts.geometry.as_ref().and_then(|g| g.uhpc.eps_t_p).unwrap_or(DEFAULT_EPS_T_LOC)
}

fn levels(base: &BeamRecord, axis: &Axis, opts: &SweepOptions) -> Vec<Result<Level>> {
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    let suffix = |is_base: bool, tag: String| if is_base { "Re".to_string() } else { tag };
    let numeric = |values: &[f64], f: &dyn Fn(f64) -> Result<Level>| values.iter().map(|&v| f(v)).collect();
    match axis {
        Axis::Hardening(v) => numeric(v, &|dfu| {
            let mut r = base.clone();
            r.f_su = r.f_s_loc + dfu;
            let b = same(dfu, base.f_su - base.f_s_loc);
            Ok(Level { record: r, eps_t_loc: None, label: trim(dfu), suffix: suffix(b, format!("SH{}", trim(dfu))) })
        }),
        Axis::Fcon(v) => numeric(v, &|f| {
            let mut r = base.clone();
            r.f_con = f;
            let b = same(f, base.f_con);
            if !b {
                r.f_p_loc = strand_loc_stress(&r, base_loc_strain(opts), opts)?;
            }
            Ok(Level { record: r, eps_t_loc: None, label: trim(f), suffix: suffix(b, format!("fcon{}", trim(f))) })
        }),
        Axis::Ft(v) => numeric(v, &|f| {
            let mut r = base.clone();
            r.f_t = f;
            let b = same(f, base.f_t);
            Ok(Level { record: r, eps_t_loc: None, label: trim(f), suffix: suffix(b, format!("ft{}", trim(f))) })
        }),
        Axis::LocStrain(v) => numeric(v, &|e| {
            let mut r = base.clone();
            let b = same(e, base_loc_strain(opts));
            if !b {
                r.f_p_loc = strand_loc_stress(&r, e, opts)?;
            }
            Ok(Level {
                record: r,
                eps_t_loc: Some(e),
                label: trim(e),
                suffix: suffix(b, format!("loc{}%", trim(100.0 * e))),
            })
        }),
        Axis::WebWidth(v) => numeric(v, &|w| {
            let mut r = base.clone();
            r.b_w = w;
            let b = same(w, base.b_w);
            Ok(Level { record: r, eps_t_loc: None, label: trim(w), suffix: suffix(b, format!("b{}", trim(w))) })
        }),
        Axis::Split(intents) => {
            let balance = ForceBalance {
                bridging: opts.gamma * base.b_w * base.h * base.f_t,
                f_s_loc: base.f_s_loc,
                f_p_loc: base.f_p_loc,
                a_s: base.a_s,
                a_p: base.a_p,
            };
            intents
                .iter()
                .map(|i| {
                    let (a_s, a_p) = proportion_reinforcement(&balance, std::slice::from_ref(i))?[0];
                    let mut r = base.clone();
                    r.a_s = a_s;
                    r.a_p = a_p;
                    let b = same(a_s, base.a_s) && same(a_p, base.a_p);
                    let tag = format!("As{}-Ap{}", a_s.round(), a_p.round());
                    Ok(Level { record: r, eps_t_loc: None, label: format!("{i:?}"), suffix: suffix(b, tag) })
                })
                .collect()
        }
    }
}

fn level_spec(level: &Level, geometry: &BeamFile) -> Result<BeamSpec> {
    let mut g = geometry.clone();
    if let Some(e) = level.eps_t_loc {
        g.uhpc.eps_t_p = Some(e);
    }
    level.record.to_spec(&g)
}

fn run_level(level: Result<Level>, base_name: &str, opts: &SweepOptions) -> SweepRow {
    let mut row = SweepRow {
        name: String::new(),
        level: String::new(),
        omega: None,
        predicted: None,
        strength: None,
        simulated_mode: None,
        mu: None,
        stand_in_geometry: opts.geometry.as_ref().is_some_and(|g| g.placeholder),
        error: None,
    };
    let level = match level {
        Ok(l) => l,
        Err(e) => {
            row.name = base_name.to_string();
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.name = format!("{}-{}", family(base_name), level.suffix);
    row.level = level.label.clone();
    let result = (|| -> Result<()> {
        let w = omega(&level.record.omega_inputs(opts.gamma))?;
        row.omega = Some(w.omega);
        row.predicted = Some(w.predicted_mode);
        let Some(geometry) = &opts.geometry else { return Ok(()) };
        let mut spec = level_spec(&level, geometry)?;
        spec.name = row.name.clone();
        row.strength = Some(strength(&spec, &opts.block)?);
        if let Some(sim) = &opts.simulate {
            let curve = simulate(&build_model(&spec)?, sim)?;
            row.simulated_mode = curve.mode;
            row.mu = ductility(&curve).ok();
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

/// Evaluates every level of `axis` in parallel. Rows come back in level
/// order and a failing level does not affect the others.
pub fn sweep(base: &BeamRecord, axis: &Axis, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    if axis.is_empty() {
        return Err(Error::BadInput("sweep axis has no levels".into()));
    }
    let levels = levels(base, axis, opts);
    Ok(levels.into_par_iter().map(|l| run_level(l, &base.name, opts)).collect())
}
