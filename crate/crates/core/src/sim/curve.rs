//! Load–deflection curve, its event timeline and failure-path detection.

use serde::Serialize;

use crate::design::FailureMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveEvent {
    Cracking,
    Localization,
    MildYield,
    StrandYield,
    Peak,
    Crushing,
    Rupture,
}

impl CurveEvent {
    pub fn name(self) -> &'static str {
        match self {
            CurveEvent::Cracking => "cracking",
            CurveEvent::Localization => "localization",
            CurveEvent::MildYield => "mild_yield",
            CurveEvent::StrandYield => "strand_yield",
            CurveEvent::Peak => "peak",
            CurveEvent::Crushing => "crushing",
            CurveEvent::Rupture => "rupture",
        }
    }
}

/// Why the analysis stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Termination {
    Crushing,
    Rupture,
    MaxDeflection,
    /// No load reaches the next deflection target: the curve turns back.
    SnapBack,
    ConvergenceFailure(String),
}

impl Termination {
    /// Whether the stop marks a structural failure usable as Δ_u.
    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::Crushing | Termination::Rupture | Termination::SnapBack)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Total applied load (kN).
    pub load: f64,
    /// Midspan deflection from the unloaded (prestressed) state (mm).
    pub deflection: f64,
    /// Deflection over shear span.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadDeflectionCurve {
    pub points: Vec<CurvePoint>,
    /// (event, point index), sorted by index.
    pub events: Vec<(CurveEvent, usize)>,
    pub termination: Termination,
    pub mode: Option<FailureMode>,
}

impl LoadDeflectionCurve {
    pub fn event_index(&self, e: CurveEvent) -> Option<usize> {
        self.events.iter().find(|(x, _)| *x == e).map(|&(_, i)| i)
    }

    /// Index of the failure point, when the analysis ended in one.
    pub fn terminal_index(&self) -> Option<usize> {
        (self.termination.is_failure() && !self.points.is_empty()).then(|| self.points.len() - 1)
    }

    pub fn peak_load(&self) -> f64 {
        self.points.iter().map(|p| p.load).fold(f64::NEG_INFINITY, f64::max)
    }

    /// ∫P dΔ by the trapezoid rule (kN·mm = J).
    pub fn dissipated_energy(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[0].load + w[1].load) * (w[1].deflection - w[0].deflection))
            .sum()
    }

    pub fn is_flagged(&self) -> bool {
        matches!(self.termination, Termination::ConvergenceFailure(_))
    }
}

/// Relative drop that ends the localization peak.
const PEAK_DROP: f64 = 0.99;

/// Failure path from the shape of the post-localization response.
///
/// The localization load is the running maximum from the localization event
/// until the load first falls 1% below it, or until the first reinforcement
/// yield after localization, whichever comes first. If no later point
/// re-attains that load the beam failed by crack localization; otherwise
/// crushing at the end means gradual strain hardening and a tension-driven
/// end means transition.
pub fn detect_failure_mode(curve: &LoadDeflectionCurve) -> Result<FailureMode> {
    let start = curve.event_index(CurveEvent::Localization).ok_or(Error::NoLocalization)?;
    let pts = &curve.points;
    let yield_at = curve
        .events
        .iter()
        .filter(|(e, i)| matches!(e, CurveEvent::MildYield | CurveEvent::StrandYield) && *i > start)
        .map(|&(_, i)| i)
        .min()
        .unwrap_or(usize::MAX);
    let mut peak = pts[start].load;
    let mut end = None;
    for (i, p) in pts.iter().enumerate().skip(start) {
        if p.load < PEAK_DROP * peak {
            end = Some(i);
            break;
        }
        peak = peak.max(p.load);
        if i >= yield_at {
            end = Some(i + 1);
            break;
        }
    }
    let recovered = match end {
        None => true,
        Some(i) => pts.iter().skip(i).any(|p| p.load >= peak),
    };
    Ok(if !recovered {
        FailureMode::CrackLocalization
    } else if curve.termination == Termination::Crushing {
        FailureMode::GradualStrainHardening
    } else {
        FailureMode::Transition
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(loads: &[f64], loc: usize, termination: Termination) -> LoadDeflectionCurve {
        LoadDeflectionCurve {
            points: loads
                .iter()
                .enumerate()
                .map(|(i, &p)| CurvePoint { load: p, deflection: i as f64, drift: 0.0 })
                .collect(),
            events: vec![(CurveEvent::Localization, loc)],
            termination,
            mode: None,
        }
    }

    #[test]
    fn rising_to_crushing_is_gsh() {
        let c = curve(&[0.0, 10.0, 20.0, 25.0, 30.0], 2, Termination::Crushing);
        assert_eq!(detect_failure_mode(&c).unwrap(), FailureMode::GradualStrainHardening);
    }

    #[test]
    fn drop_to_rupture_is_cl() {
        let c = curve(&[0.0, 10.0, 20.0, 15.0, 12.0], 2, Termination::Rupture);
        assert_eq!(detect_failure_mode(&c).unwrap(), FailureMode::CrackLocalization);
    }

    #[test]
    fn recovery_then_tension_decline_is_transition() {
        let c = curve(&[0.0, 10.0, 20.0, 19.0, 21.0, 18.0], 2, Termination::Rupture);
        assert_eq!(detect_failure_mode(&c).unwrap(), FailureMode::Transition);
    }

    #[test]
    fn yield_closes_the_localization_window() {
        let mut c = curve(&[0.0, 10.0, 20.0, 22.0, 24.0, 23.0, 20.0], 2, Termination::Rupture);
        c.events.push((CurveEvent::MildYield, 3));
        assert_eq!(detect_failure_mode(&c).unwrap(), FailureMode::Transition);
        c.events[1].1 = 6;
        c.termination = Termination::Crushing;
        assert_eq!(detect_failure_mode(&c).unwrap(), FailureMode::CrackLocalization);
    }

    #[test]
    fn missing_localization() {
        let c = LoadDeflectionCurve {
            points: vec![CurvePoint { load: 0.0, deflection: 0.0, drift: 0.0 }],
            events: vec![],
            termination: Termination::MaxDeflection,
            mode: None,
        };
        assert!(matches!(detect_failure_mode(&c), Err(Error::NoLocalization)));
    }
}
