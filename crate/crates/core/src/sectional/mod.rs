//! Fiber-section equilibrium: force resultants for a plane strain field,
//! axial solve at fixed curvature, moment–curvature sweeps and the
//! closed-form localization and ultimate moments.
//!
//! Strain convention: ε(y) = ε_top + φ·y with y measured down from the top,
//! tension positive, so sagging curvature is φ > 0.

mod strength;

pub use strength::{
    localization_moment, strand_stress_at_localization, strength, stress_block_beta, ultimate_moment,
    BlockOptions, CapacityState, StrengthReport, DEFAULT_ALPHA, DEFAULT_ZETA,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::materials::{RebarLaw, UhpcLaw};
use crate::section::{BeamSpec, Layer};

/// Reinforcement row reduced to what the fiber kernel needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub area: f64,
    pub depth: f64,
    pub law: RebarLaw,
    pub eps_pe: f64,
}

/// Discretized section: UHPC layers plus reinforcement, with moments taken
/// about the gross-section centroid `y_ref`.
#[derive(Debug, Clone)]
pub struct FiberSection {
    pub layers: Vec<Layer>,
    pub bars: Vec<Bar>,
    pub h: f64,
    pub y_ref: f64,
    pub gross_area: f64,
}

/// Force resultants and the consistent section tangent.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Resultants {
    pub n: f64,
    pub m: f64,
    /// ∂N/∂ε_top, ∂N/∂φ, ∂M/∂ε_top, ∂M/∂φ
    pub k_ne: f64,
    pub k_np: f64,
    pub k_me: f64,
    pub k_mp: f64,
}

impl FiberSection {
    pub fn new(spec: &BeamSpec) -> Self {
        FiberSection {
            layers: spec.section.layer_table(),
            bars: spec
                .layers
                .iter()
                .map(|l| Bar { area: l.area, depth: l.depth, law: l.law, eps_pe: l.eps_pe() })
                .collect(),
            h: spec.section.h,
            y_ref: spec.section.exact_centroid(),
            gross_area: spec.section.exact_area(),
        }
    }

    /// Integrates the section for a given strain plane. `uhpc(i, ε)` and
    /// `bar(j, ε)` return (stress, tangent) for layer `i` and bar `j`; bar
    /// strains already include the prestrain.
    pub fn integrate<U, B>(&self, eps_top: f64, phi: f64, mut uhpc: U, mut bar: B) -> Resultants
    where
        U: FnMut(usize, f64) -> (f64, f64),
        B: FnMut(usize, f64) -> (f64, f64),
    {
        let mut r = Resultants::default();
        let mut add = |area: f64, y: f64, s: f64, t: f64| {
            let z = y - self.y_ref;
            r.n += s * area;
            r.m += s * area * z;
            r.k_ne += t * area;
            r.k_np += t * area * y;
            r.k_me += t * area * z;
            r.k_mp += t * area * y * z;
        };
        for (i, l) in self.layers.iter().enumerate() {
            let (s, t) = uhpc(i, eps_top + phi * l.x);
            add(l.b * l.dh, l.x, s, t);
        }
        for (j, b) in self.bars.iter().enumerate() {
            let (s, t) = bar(j, eps_top + phi * b.depth + b.eps_pe);
            add(b.area, b.depth, s, t);
        }
        r
    }

    /// Envelope evaluation with a single UHPC law.
    pub fn envelope(&self, law: &UhpcLaw, eps_top: f64, phi: f64) -> Resultants {
        self.integrate(eps_top, phi, |_, e| law.envelope(e), |j, e| self.bars[j].law.envelope(e))
    }
}

/// Axial-force tolerance used by every equilibrium solve.
pub fn axial_tolerance(spec: &BeamSpec) -> f64 {
    1e-4 * spec.uhpc.f_c * spec.section.exact_area()
}

/// (N, M) for a strain plane using the monotonic envelopes. M is taken about
/// the gross centroid, which equals the neutral-axis moment whenever N = 0.
pub fn section_forces(spec: &BeamSpec, eps_top: f64, phi: f64) -> (f64, f64) {
    let r = FiberSection::new(spec).envelope(&spec.uhpc, eps_top, phi);
    (r.n, r.m)
}

/// Solved section state at one curvature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionState {
    pub eps_top: f64,
    pub phi: f64,
    /// Neutral-axis depth, defined for φ > 0.
    pub c: Option<f64>,
    pub n: f64,
    /// Moment in N·mm.
    pub m: f64,
    pub uhpc_stress: Vec<f64>,
    pub bar_strain: Vec<f64>,
    pub bar_stress: Vec<f64>,
}

impl SectionState {
    fn build(fs: &FiberSection, law: &UhpcLaw, eps_top: f64, phi: f64) -> Self {
        let r = fs.envelope(law, eps_top, phi);
        let bar_strain: Vec<f64> = fs.bars.iter().map(|b| eps_top + phi * b.depth + b.eps_pe).collect();
        SectionState {
            eps_top,
            phi,
            c: (phi > 0.0).then(|| -eps_top / phi),
            n: r.n,
            m: r.m,
            uhpc_stress: fs.layers.iter().map(|l| law.envelope(eps_top + phi * l.x).0).collect(),
            bar_stress: fs.bars.iter().zip(&bar_strain).map(|(b, &e)| b.law.envelope(e).0).collect(),
            bar_strain,
        }
    }
}

fn solve_axial_with(fs: &FiberSection, law: &UhpcLaw, phi: f64, tol_n: f64) -> Result<SectionState> {
    if !(phi >= 0.0) {
        return Err(Error::BadInput(format!("curvature must be non-negative, got {phi}")));
    }
    let n_of = |e: f64| fs.envelope(law, e, phi).n;
    let hi = law.eps_t_ult;
    let mut lo = -10.0 * law.f_c / law.e_c;
    // widen the compression side until the top fiber is past the zero-stress tail
    let floor = 2.0 * law.compression_zero_strain() - 1.0;
    loop {
        if let Some((upper, lower)) = positive_to_nonpositive(&n_of, hi, lo, 400) {
            let e = refine(&n_of, lower, upper);
            let state = SectionState::build(fs, law, e, phi);
            if state.n.abs() > tol_n {
                return Err(Error::NoEquilibrium(format!(
                    "axial residual {:.3e} N exceeds tolerance at φ = {phi:e} (force jump across ε_top = {e:e})",
                    state.n
                )));
            }
            return Ok(state);
        }
        if lo <= floor {
            return Err(Error::NoEquilibrium(format!(
                "no axial equilibrium at φ = {phi:e}: N = {:.3e} at ε_top = {hi:e}, {:.3e} at ε_top = {lo:e}",
                n_of(hi),
                n_of(lo)
            )));
        }
        lo *= 2.0;
    }
}

/// First interval, walking from `start` down to `end`, where N goes from
/// positive to non-positive. Zero-force plateaus before any tension (a
/// section strained past its tensile capacity) are skipped.
fn positive_to_nonpositive<F: Fn(f64) -> f64>(f: &F, start: f64, end: f64, steps: usize) -> Option<(f64, f64)> {
    let dx = (end - start) / steps as f64;
    let mut prev: Option<f64> = None;
    for i in 0..=steps {
        let e = if i == steps { end } else { start + dx * i as f64 };
        let v = f(e);
        if v > 0.0 {
            prev = Some(e);
        } else if let Some(p) = prev {
            return Some((p, e));
        }
    }
    None
}

/// Bisection keeping N > 0 at the upper end, run to round-off.
fn refine<F: Fn(f64) -> f64>(f: &F, mut lower: f64, mut upper: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (upper + lower);
        if mid <= lower || mid >= upper {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            upper = mid;
        } else {
            lower = mid;
        }
    }
    0.5 * (upper + lower)
}

/// Top strain giving N = 0 at curvature φ. Of several roots the one with the
/// largest ε_top (shallowest neutral axis) is returned.
pub fn solve_axial(spec: &BeamSpec, phi: f64) -> Result<SectionState> {
    solve_axial_with(&FiberSection::new(spec), &spec.uhpc, phi, axial_tolerance(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionEvent {
    Cracking,
    Localization,
    MildYield,
    StrandYield,
    Crushing,
    Rupture,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MkPoint {
    pub phi: f64,
    /// N·mm
    pub m: f64,
    pub eps_top: f64,
    pub c: Option<f64>,
    pub events: Vec<SectionEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCurvature {
    pub points: Vec<MkPoint>,
    /// Why the sweep stopped early, if it did.
    pub terminated: Option<String>,
}

impl MomentCurvature {
    pub fn first(&self, event: SectionEvent) -> Option<usize> {
        self.points.iter().position(|p| p.events.contains(&event))
    }
}

fn state_flags(law: &UhpcLaw, fs: &FiberSection, s: &SectionState) -> Vec<SectionEvent> {
    let mut flags = Vec::new();
    let eps_bottom = s.eps_top + s.phi * fs.h;
    if eps_bottom >= law.eps_t_crack {
        flags.push(SectionEvent::Cracking);
    }
    if eps_bottom >= law.eps_t_loc {
        flags.push(SectionEvent::Localization);
    }
    for (b, &e) in fs.bars.iter().zip(&s.bar_strain) {
        if e >= b.law.event_yield_strain() {
            flags.push(if b.law.is_strand() { SectionEvent::StrandYield } else { SectionEvent::MildYield });
        }
        if e > b.law.rupture_strain() {
            flags.push(SectionEvent::Rupture);
        }
    }
    if s.eps_top <= law.crushing_strain() {
        flags.push(SectionEvent::Crushing);
    }
    flags
}

/// Sweeps curvature over `steps` equal intervals up to `phi_max`. Each event
/// is recorded at the first point where its criterion holds. The sweep ends
/// early when equilibrium is lost.
pub fn moment_curvature(spec: &BeamSpec, phi_max: f64, steps: usize) -> Result<MomentCurvature> {
    if steps < 2 || !(phi_max > 0.0) {
        return Err(Error::BadInput(format!("need steps >= 2 and phi_max > 0, got {steps}, {phi_max}")));
    }
    let fs = FiberSection::new(spec);
    let tol = axial_tolerance(spec);
    let mut points = Vec::with_capacity(steps + 1);
    let mut seen = Vec::new();
    let mut terminated = None;
    for i in 0..=steps {
        let phi = phi_max * i as f64 / steps as f64;
        let state = match solve_axial_with(&fs, &spec.uhpc, phi, tol) {
            Ok(s) => s,
            Err(Error::NoEquilibrium(msg)) => {
                terminated = Some(msg);
                break;
            }
            Err(e) => return Err(e),
        };
        let mut events = Vec::new();
        for f in state_flags(&spec.uhpc, &fs, &state) {
            if !seen.contains(&f) && !events.contains(&f) {
                seen.push(f);
                events.push(f);
            }
        }
        points.push(MkPoint { phi, m: state.m, eps_top: state.eps_top, c: state.c, events });
    }
    Ok(MomentCurvature { points, terminated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{MaterialRecord, SteelLaw, StrandLaw};
    use crate::section::{CrossSection, ReinforcementLayer, WeakBand};

    fn law() -> UhpcLaw {
        UhpcLaw::derive(&MaterialRecord {
            e_c: Some(53_500.0),
            f_c: Some(185.8),
            f_t_p: Some(10.5),
            g_f: Some(11.2),
            g_c: Some(166.8),
            ..Default::default()
        })
        .unwrap()
    }

    fn beam(layers: Vec<ReinforcementLayer>) -> BeamSpec {
        BeamSpec {
            name: "t".into(),
            section: CrossSection::rectangle(150.0, 180.0).unwrap(),
            layers,
            uhpc: law(),
            span: 1800.0,
            shear_span: 650.0,
            weak_band: WeakBand::default(),
            element_size: 10.0,
        }
    }

    #[test]
    fn zero_state() {
        let b = beam(vec![]);
        assert_eq!(section_forces(&b, 0.0, 0.0), (0.0, 0.0));
        let s = solve_axial(&b, 0.0).unwrap();
        assert!(s.eps_top.abs() < 1e-12 && s.n.abs() <= axial_tolerance(&b));
    }

    #[test]
    fn elastic_rectangle_moment() {
        let b = beam(vec![]);
        let phi = 1e-7;
        let s = solve_axial(&b, phi).unwrap();
        let expected = b.uhpc.e_c * 150.0 * 180f64.powi(3) / 12.0 * phi;
        assert!((s.m - expected).abs() / expected < 5e-3);
        assert!(s.n.abs() <= axial_tolerance(&b));
    }

    #[test]
    fn prestress_gives_precompression() {
        let p = StrandLaw::grade_270(1860.0, None, None).unwrap();
        let b = beam(vec![ReinforcementLayer::strand(99.0, 150.0, p, 1100.0)]);
        let s = solve_axial(&b, 0.0).unwrap();
        assert!(s.eps_top < 0.0);
        let concrete: f64 = s.uhpc_stress.iter().sum::<f64>() * 150.0 * 1.8;
        assert!((concrete + s.bar_stress[0] * 99.0).abs() <= axial_tolerance(&b));
    }

    #[test]
    fn yield_precedes_crushing_for_heavy_mild_beam() {
        let m = SteelLaw::with_defaults(454.0, Some(778.0)).unwrap();
        let b = beam(vec![ReinforcementLayer::mild(573.0, 150.0, m)]);
        let mk = moment_curvature(&b, 4e-4, 400).unwrap();
        let y = mk.first(SectionEvent::MildYield).unwrap();
        match mk.first(SectionEvent::Crushing) {
            Some(c) => assert!(y < c),
            None => assert!(mk.terminated.is_some() || mk.points.len() == 401),
        }
    }
}
