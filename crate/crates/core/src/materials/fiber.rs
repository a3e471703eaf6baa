//! Path-dependent fiber response: envelope loading with damage tracking and
//! secant unloading towards a plastic offset.

use serde::{Deserialize, Serialize};

use super::steel::{SteelLaw, StrandLaw};
use super::uhpc::{DamageMode, UhpcLaw};

/// Loading history of one UHPC fiber.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FiberState {
    /// Largest tensile strain reached (>= 0).
    pub eps_max_t: f64,
    /// Most negative compressive strain reached (<= 0).
    pub eps_min_c: f64,
    pub d_t: f64,
    pub d_c: f64,
}

impl FiberState {
    pub fn virgin() -> Self {
        Self::default()
    }
}

/// Stress, tangent and the state that results from moving a fiber to `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberResponse {
    pub stress: f64,
    pub tangent: f64,
    pub state: FiberState,
}

fn inelastic(law: &UhpcLaw, eps: f64, stress: f64) -> f64 {
    // magnitude of ε - σ/E; clamp round-off on the elastic branch
    let v = (eps - stress / law.e_c).abs();
    if v < 1e-15 {
        0.0
    } else {
        v
    }
}

/// Plastic offsets (tension >= 0, compression <= 0) implied by a state.
pub fn plastic_offsets(law: &UhpcLaw, state: &FiberState) -> (f64, f64) {
    let (s_t, _) = law.tension(state.eps_max_t);
    let (s_c, _) = law.compression(state.eps_min_c);
    let pl_t = law.alpha_t * inelastic(law, state.eps_max_t, s_t);
    let pl_c = -law.alpha_c * inelastic(law, state.eps_min_c, s_c);
    (pl_t, pl_c)
}

/// Evaluates the fiber at total strain `eps` given its prior history.
pub fn fiber_response(law: &UhpcLaw, state: &FiberState, eps: f64) -> FiberResponse {
    let mut next = *state;
    if eps >= state.eps_max_t && eps >= 0.0 {
        let (stress, tangent) = law.tension(eps);
        next.eps_max_t = eps;
        next.d_t = state.d_t.max(law.damage(inelastic(law, eps, stress), DamageMode::Tension));
        return FiberResponse { stress, tangent, state: next };
    }
    if eps <= state.eps_min_c && eps <= 0.0 {
        let (stress, tangent) = law.compression(eps);
        next.eps_min_c = eps;
        next.d_c = state.d_c.max(law.damage(inelastic(law, eps, stress), DamageMode::Compression));
        return FiberResponse { stress, tangent, state: next };
    }
    let (pl_t, pl_c) = plastic_offsets(law, state);
    let (stress, tangent) = if eps > pl_t {
        let (s_max, _) = law.tension(state.eps_max_t);
        let k = s_max / (state.eps_max_t - pl_t);
        (k * (eps - pl_t), k)
    } else if eps < pl_c {
        let (s_min, _) = law.compression(state.eps_min_c);
        let k = s_min / (state.eps_min_c - pl_c);
        (k * (eps - pl_c), k)
    } else {
        (0.0, 0.0)
    };
    FiberResponse { stress, tangent, state: next }
}

/// Stress at `eps` and the updated history.
pub fn update_fiber(law: &UhpcLaw, state: &FiberState, eps: f64) -> (f64, FiberState) {
    let r = fiber_response(law, state, eps);
    (r.stress, r.state)
}

/// Reinforcement law as used inside a section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RebarLaw {
    Mild(SteelLaw),
    Strand(StrandLaw),
}

impl RebarLaw {
    /// Envelope stress and slope (no rupture check).
    pub fn envelope(&self, eps: f64) -> (f64, f64) {
        match self {
            RebarLaw::Mild(s) => s.response(eps),
            RebarLaw::Strand(p) => p.response(eps),
        }
    }

    pub fn modulus(&self) -> f64 {
        match self {
            RebarLaw::Mild(s) => s.e_s,
            RebarLaw::Strand(p) => p.e_ps,
        }
    }

    pub fn rupture_strain(&self) -> f64 {
        match self {
            RebarLaw::Mild(s) => s.eps_sf,
            RebarLaw::Strand(p) => p.eps_pu,
        }
    }

    /// Yield strain used for event detection: ε_y for rebar, 0.01 for strand.
    pub fn event_yield_strain(&self) -> f64 {
        match self {
            RebarLaw::Mild(s) => s.eps_y,
            RebarLaw::Strand(_) => super::steel::STRAND_YIELD_STRAIN,
        }
    }

    pub fn is_strand(&self) -> bool {
        matches!(self, RebarLaw::Strand(_))
    }
}

/// Largest tensile strain reached by a reinforcing bar.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RebarState {
    pub eps_max: f64,
}

/// Rebar response with elastic unloading from the largest strain reached.
pub fn rebar_response(law: &RebarLaw, state: &RebarState, eps: f64) -> (f64, f64, RebarState) {
    if eps >= state.eps_max {
        let (s, t) = law.envelope(eps);
        return (s, t, RebarState { eps_max: eps });
    }
    let (s_max, _) = law.envelope(state.eps_max);
    let e = law.modulus();
    let s = s_max - e * (state.eps_max - eps);
    let floor = match law {
        RebarLaw::Mild(m) => -m.f_y.max(s_max),
        RebarLaw::Strand(_) => 0.0,
    };
    if s < floor {
        (floor, 0.0, *state)
    } else {
        (s, e, *state)
    }
}
