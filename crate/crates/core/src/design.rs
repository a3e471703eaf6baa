//! Design checks: the ω hardening-to-bridging ratio and the failure path it
//! predicts, the threshold mild-steel ratio, reinforcement proportioning by
//! tension-force equivalence, and displacement ductility.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::RebarLaw;
use crate::section::BeamSpec;
use crate::sectional::strand_stress_at_localization;
use crate::sim::{CurveEvent, LoadDeflectionCurve};

pub const DEFAULT_GAMMA: f64 = 0.54;
/// Strand strength reduction for brittle fracture.
pub const STRAND_FRACTURE_FACTOR: f64 = 0.94;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureMode {
    #[serde(rename = "CL")]
    CrackLocalization,
    #[serde(rename = "T")]
    Transition,
    #[serde(rename = "GSH")]
    GradualStrainHardening,
}

impl FailureMode {
    pub fn label(self) -> &'static str {
        match self {
            FailureMode::CrackLocalization => "CL",
            FailureMode::Transition => "T",
            FailureMode::GradualStrainHardening => "GSH",
        }
    }

    /// Transition beams lose capacity after localization too, so they group
    /// with CL against the two-way ω split.
    pub fn two_way(self) -> FailureMode {
        match self {
            FailureMode::GradualStrainHardening => FailureMode::GradualStrainHardening,
            _ => FailureMode::CrackLocalization,
        }
    }
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FailureMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "CL" => Ok(FailureMode::CrackLocalization),
            "T" => Ok(FailureMode::Transition),
            "GSH" => Ok(FailureMode::GradualStrainHardening),
            other => Err(Error::BadInput(format!("unknown failure mode '{other}' (expected CL, T or GSH)"))),
        }
    }
}

/// Inputs to ω. Areas in mm², stresses in MPa, lengths in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaInputs {
    pub f_t: f64,
    /// Mild-steel stress at localization, normally f_y.
    pub f_s_loc: f64,
    pub f_su: f64,
    pub a_s: f64,
    pub f_pu: f64,
    pub f_p_loc: f64,
    pub a_p: f64,
    pub b_w: f64,
    pub d: f64,
    pub h: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaReport {
    pub omega: f64,
    pub mild_term: f64,
    pub strand_term: f64,
    pub denom: f64,
    pub d_over_h: f64,
    pub rho_s: f64,
    pub rho_p: f64,
    pub predicted_mode: FailureMode,
}

impl OmegaReport {
    pub fn recompute(&self) -> f64 {
        (self.mild_term + self.strand_term) / self.denom * self.d_over_h
    }
}

pub fn omega(inp: &OmegaInputs) -> Result<OmegaReport> {
    let denom = inp.gamma * inp.f_t;
    let area = inp.b_w * inp.d;
    if !(denom > 0.0 && area > 0.0 && inp.h > 0.0) {
        return Err(Error::BadInput(format!(
            "ω needs γ·f_t > 0, b_w·d > 0 and h > 0 (got {denom}, {area}, {})",
            inp.h
        )));
    }
    if inp.a_s < 0.0 || inp.a_p < 0.0 {
        return Err(Error::BadInput("reinforcement areas must be non-negative".into()));
    }
    let rho_s = inp.a_s / area;
    let rho_p = inp.a_p / area;
    let mild_term = (inp.f_su - inp.f_s_loc) * rho_s;
    let strand_term = (STRAND_FRACTURE_FACTOR * inp.f_pu - inp.f_p_loc) * rho_p;
    let d_over_h = inp.d / inp.h;
    let omega = (mild_term + strand_term) / denom * d_over_h;
    Ok(OmegaReport {
        omega,
        mild_term,
        strand_term,
        denom,
        d_over_h,
        rho_s,
        rho_p,
        predicted_mode: classify(omega),
    })
}

/// Two-way split: ω ≥ 1 predicts gradual strain hardening.
pub fn classify(omega: f64) -> FailureMode {
    if omega >= 1.0 {
        FailureMode::GradualStrainHardening
    } else {
        FailureMode::CrackLocalization
    }
}

/// Smallest mild-steel ratio predicted to give ω ≥ 1, with the hardening
/// margin taken as 0.25·f_sy and d as 0.8·h.
pub fn threshold_rho_s(f_t: f64, f_sy: f64, f_pu: f64, f_p_loc: f64, rho_p: f64) -> f64 {
    let num = 0.675 * f_t - (STRAND_FRACTURE_FACTOR * f_pu - f_p_loc) * rho_p;
    (num / (0.25 * f_sy)).max(0.0)
}

/// Tension-force balance at localization: T = γ·b·h·f_t + A_s·f_s,loc + A_p·f_p,loc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceBalance {
    pub bridging: f64,
    pub f_s_loc: f64,
    pub f_p_loc: f64,
    pub a_s: f64,
    pub a_p: f64,
}

impl ForceBalance {
    pub fn total(&self) -> f64 {
        self.bridging + self.steel()
    }

    pub fn steel(&self) -> f64 {
        self.a_s * self.f_s_loc + self.a_p * self.f_p_loc
    }

    /// Balance of a beam. `width` defaults to the web width; the tension
    /// flange width is the other reading of the bridging term.
    pub fn from_spec(spec: &BeamSpec, gamma: f64, width: Option<f64>) -> Result<Self> {
        let b = width.unwrap_or_else(|| spec.section.web_width());
        let bridging = gamma * b * spec.section.h * spec.uhpc.f_t_peak;
        let (mut a_s, mut fs_a, mut a_p, mut fp_a) = (0.0, 0.0, 0.0, 0.0);
        for l in &spec.layers {
            match l.law {
                RebarLaw::Mild(s) => {
                    a_s += l.area;
                    fs_a += l.area * s.f_y;
                }
                RebarLaw::Strand(p) => {
                    a_p += l.area;
                    fp_a += l.area * strand_stress_at_localization(&p, l.f_pe, spec.uhpc.eps_t_loc, 0.0)?;
                }
            }
        }
        let mild_default = spec
            .mild_layers()
            .next()
            .and_then(|l| if let RebarLaw::Mild(s) = l.law { Some(s.f_y) } else { None });
        Ok(ForceBalance {
            bridging,
            f_s_loc: if a_s > 0.0 { fs_a / a_s } else { mild_default.unwrap_or(0.0) },
            f_p_loc: if a_p > 0.0 { fp_a / a_p } else { 0.0 },
            a_s,
            a_p,
        })
    }
}

/// How a redesigned section splits the steel force between bar types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Intent {
    /// Share of the steel force carried by mild steel, in [0, 1].
    MildForceFraction(f64),
    /// A_s / A_p.
    AreaRatio(f64),
    AllMild,
    AllStrand,
    /// Keep this strand area and make up the rest with mild steel.
    FixedStrand(f64),
}

/// (A_s, A_p) pairs that keep the reference tension force T.
pub fn proportion_reinforcement(reference: &ForceBalance, intents: &[Intent]) -> Result<Vec<(f64, f64)>> {
    intents.iter().map(|i| proportion_one(reference, *i)).collect()
}

fn proportion_one(r: &ForceBalance, intent: Intent) -> Result<(f64, f64)> {
    let steel = r.steel();
    if !(steel > 0.0) {
        return Err(Error::BadInput("reference carries no steel force".into()));
    }
    let need = |f: f64, what: &str| -> Result<f64> {
        if f > 0.0 {
            Ok(f)
        } else {
            Err(Error::BadInput(format!("{what} stress at localization must be positive for {intent:?}")))
        }
    };
    let pair = match intent {
        Intent::MildForceFraction(x) => {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::BadInput(format!("mild force fraction {x} outside [0, 1]")));
            }
            let a_s = if x > 0.0 { x * steel / need(r.f_s_loc, "mild")? } else { 0.0 };
            let a_p = if x < 1.0 { (1.0 - x) * steel / need(r.f_p_loc, "strand")? } else { 0.0 };
            (a_s, a_p)
        }
        Intent::AreaRatio(k) => {
            if !(k >= 0.0) {
                return Err(Error::BadInput(format!("area ratio {k} must be non-negative")));
            }
            let a_p = steel / (k * r.f_s_loc + need(r.f_p_loc, "strand")?);
            (k * a_p, a_p)
        }
        Intent::AllMild => (steel / need(r.f_s_loc, "mild")?, 0.0),
        Intent::AllStrand => (0.0, steel / need(r.f_p_loc, "strand")?),
        Intent::FixedStrand(a_p) => {
            let rest = steel - a_p * r.f_p_loc;
            if a_p < 0.0 || rest < 0.0 {
                return Err(Error::BadInput(format!(
                    "strand area {a_p} alone exceeds the reference tension force"
                )));
            }
            let a_s = if rest > 0.0 { rest / need(r.f_s_loc, "mild")? } else { 0.0 };
            (a_s, a_p)
        }
    };
    Ok(pair)
}

/// μ = Δ_u / Δ_y from a simulated curve.
pub fn ductility(curve: &LoadDeflectionCurve) -> Result<f64> {
    let y = [CurveEvent::MildYield, CurveEvent::StrandYield]
        .iter()
        .filter_map(|e| curve.event_index(*e))
        .min();
    let u = curve.terminal_index();
    match (y, u) {
        (_, None) => Err(Error::NoUltimate),
        (None, Some(_)) => Err(Error::NoYield),
        (Some(y), Some(u)) if y > u => Err(Error::NoYield),
        (Some(y), Some(u)) => ductility_from(curve.points[y].deflection, curve.points[u].deflection),
    }
}

pub fn ductility_from(delta_y: f64, delta_u: f64) -> Result<f64> {
    if !(delta_y > 0.0) {
        return Err(Error::BadInput(format!("yield deflection must be positive, got {delta_y}")));
    }
    Ok(delta_u / delta_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(a_s: f64, f_s: f64, f_su: f64, a_p: f64) -> OmegaInputs {
        OmegaInputs {
            f_t: 9.0,
            f_s_loc: f_s,
            f_su,
            a_s,
            f_pu: 1942.0,
            f_p_loc: 1664.0,
            a_p,
            b_w: 130.0,
            d: 820.0,
            h: 900.0,
            gamma: DEFAULT_GAMMA,
        }
    }

    #[test]
    fn reference_rows() {
        let r = omega(&re(402.2, 485.0, 635.0, 1400.0)).unwrap();
        assert!((r.omega - 0.504).abs() < 0.001);
        assert_eq!(r.predicted_mode, FailureMode::CrackLocalization);
        assert!((r.recompute() - r.omega).abs() <= 1e-12 * r.omega);
    }

    #[test]
    fn boundary_is_gsh() {
        assert_eq!(classify(1.0), FailureMode::GradualStrainHardening);
        assert_eq!(classify(0.999_999), FailureMode::CrackLocalization);
    }

    #[test]
    fn no_strand_reduces_to_mild_form() {
        let r = omega(&re(800.0, 485.0, 635.0, 0.0)).unwrap();
        let direct = (635.0 - 485.0) * (800.0 / (130.0 * 820.0)) * 820.0 / (DEFAULT_GAMMA * 9.0 * 900.0);
        assert!((r.omega - direct).abs() < 1e-14);
    }

    #[test]
    fn threshold_for_re_family() {
        let rho = threshold_rho_s(9.0, 485.0, 1942.0, 1664.0, 1400.0 / (130.0 * 820.0));
        assert!((rho - 0.03261).abs() < 1e-4);
        assert_eq!(threshold_rho_s(9.0, 485.0, 1942.0, 1664.0, 1.0), 0.0);
    }

    #[test]
    fn proportioning_keeps_force() {
        let r = ForceBalance { bridging: 1e5, f_s_loc: 485.0, f_p_loc: 1664.0, a_s: 402.2, a_p: 1400.0 };
        let intents = [Intent::AllMild, Intent::FixedStrand(840.0), Intent::MildForceFraction(0.3), Intent::AreaRatio(2.0)];
        let pairs = proportion_reinforcement(&r, &intents).unwrap();
        for (a_s, a_p) in &pairs {
            let t = r.bridging + a_s * 485.0 + a_p * 1664.0;
            assert!((t - r.total()).abs() / r.total() < 1e-12);
        }
        let reversed: Vec<Intent> = intents.iter().rev().copied().collect();
        let mut back = proportion_reinforcement(&r, &reversed).unwrap();
        back.reverse();
        assert_eq!(pairs, back);
        assert!(proportion_one(&r, Intent::FixedStrand(1e5)).is_err());
    }

    #[test]
    fn ductility_ratio() {
        assert_eq!(ductility_from(10.0, 25.0).unwrap(), 2.5);
    }
}
