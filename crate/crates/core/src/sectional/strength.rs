//! Closed-form capacities at crack localization and at ultimate.
//!
//! Both states fix the strain of the deepest tension reinforcement and search
//! the neutral-axis depth c for horizontal equilibrium, walking up from the
//! shallowest admissible depth so the first root (smallest c) wins.

use serde::Serialize;

use super::Bar;
use crate::error::{Error, Result};
use crate::materials::{RebarLaw, StrandLaw, UhpcLaw};
use crate::section::{BeamSpec, Layer};

/// Block intensity factor at localization.
pub const DEFAULT_ALPHA: f64 = 0.9;
/// Block depth coefficient for Grade 270 strand at f_pe ≥ 0.5·f_pu.
pub const DEFAULT_ZETA: f64 = 0.004;

const SCAN_STEPS: usize = 2000;

/// β = min(1.12 − ζ·h/l_f, 1).
pub fn stress_block_beta(h: f64, l_f: f64, zeta: f64) -> Result<f64> {
    if !(h > 0.0 && l_f > 0.0) {
        return Err(Error::BadInput(format!("h and l_f must be positive, got {h}, {l_f}")));
    }
    let beta = (1.12 - zeta * h / l_f).min(1.0);
    if beta <= 0.0 {
        return Err(Error::BadBlock { beta });
    }
    Ok(beta)
}

/// Strand stress when the tension face reaches the UHPC localization strain.
pub fn strand_stress_at_localization(strand: &StrandLaw, f_pe: f64, eps_t_loc: f64, eps_ce: f64) -> Result<f64> {
    if !(f_pe >= 0.0) {
        return Err(Error::BadInput(format!("f_pe must be non-negative, got {f_pe}")));
    }
    strand.stress(f_pe / strand.e_ps + eps_ce + eps_t_loc)
}

/// Neutral axis, extreme-fiber strain and moment (N·mm, about the neutral
/// axis) at one limit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityState {
    pub m: f64,
    pub c: f64,
    pub eps_cf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOptions {
    pub alpha: f64,
    pub zeta: f64,
    /// Fiber length for β; falls back to the UHPC record.
    pub fiber_length: Option<f64>,
    /// Uses this β directly instead of the h/l_f rule.
    pub beta: Option<f64>,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions { alpha: DEFAULT_ALPHA, zeta: DEFAULT_ZETA, fiber_length: None, beta: None }
    }
}

impl BlockOptions {
    pub fn resolve_beta(&self, spec: &BeamSpec) -> Result<f64> {
        if let Some(b) = self.beta {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::BadBlock { beta: b });
            }
            return Ok(b);
        }
        let l_f = self
            .fiber_length
            .or_else(|| spec.uhpc.fiber_length())
            .ok_or_else(|| Error::BadInput("fiber length l_f is required for the stress-block depth".into()))?;
        stress_block_beta(spec.section.h, l_f, self.zeta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrengthReport {
    #[serde(rename = "M_loc_kNm")]
    pub m_loc: f64,
    #[serde(rename = "M_u_kNm")]
    pub m_u: f64,
    #[serde(rename = "c_loc_mm")]
    pub c_loc: f64,
    #[serde(rename = "c_u_mm")]
    pub c_u: f64,
    pub eps_cf_loc: f64,
    pub eps_cf_u: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Both capacities, moments in kN·m.
pub fn strength(spec: &BeamSpec, opts: &BlockOptions) -> Result<StrengthReport> {
    let beta = opts.resolve_beta(spec)?;
    let loc = localization_moment(spec, opts.alpha, beta)?;
    let ult = ultimate_moment(spec)?;
    Ok(StrengthReport {
        m_loc: loc.m * 1e-6,
        m_u: ult.m * 1e-6,
        c_loc: loc.c,
        c_u: ult.c,
        eps_cf_loc: loc.eps_cf,
        eps_cf_u: ult.eps_cf,
        alpha: opts.alpha,
        beta,
    })
}

enum Limit {
    Localization { alpha: f64, beta: f64 },
    Ultimate,
}

struct Anchor {
    depth: f64,
    /// Strain increment beyond the prestrain that the anchor bar reaches.
    strain: f64,
}

fn bars(spec: &BeamSpec) -> Vec<Bar> {
    spec.layers
        .iter()
        .map(|l| Bar { area: l.area, depth: l.depth, law: l.law, eps_pe: l.eps_pe() })
        .collect()
}

/// Deepest strand, or the deepest mild bar when there is no strand.
fn anchor(bars: &[Bar], limit: &Limit) -> Result<Anchor> {
    let deepest = |strand: bool| {
        bars.iter()
            .filter(|b| b.law.is_strand() == strand)
            .max_by(|a, b| a.depth.total_cmp(&b.depth))
    };
    if let Some(b) = deepest(true) {
        let RebarLaw::Strand(p) = b.law else { unreachable!() };
        let target = match limit {
            Limit::Localization { .. } => p.yield_strain(),
            Limit::Ultimate => p.eps_pu,
        };
        return Ok(Anchor { depth: b.depth, strain: target - b.eps_pe });
    }
    if let Some(b) = deepest(false) {
        let RebarLaw::Mild(s) = b.law else { unreachable!() };
        let target = match limit {
            Limit::Localization { .. } => s.eps_y,
            Limit::Ultimate => s.eps_sf,
        };
        return Ok(Anchor { depth: b.depth, strain: target });
    }
    Err(Error::BadInput("section has no reinforcement to anchor the strain profile".into()))
}

/// Force a bar carries below the neutral axis at the limit state.
fn tension_force(b: &Bar, limit: &Limit) -> f64 {
    let f = match (limit, b.law) {
        (Limit::Localization { .. }, RebarLaw::Strand(p)) => p.f_py,
        (Limit::Localization { .. }, RebarLaw::Mild(s)) => s.f_y,
        (Limit::Ultimate, RebarLaw::Strand(p)) => p.f_pu,
        (Limit::Ultimate, RebarLaw::Mild(s)) => s.f_su,
    };
    b.area * f
}

struct Balance {
    n: f64,
    m: f64,
}

fn balance(
    law: &UhpcLaw,
    layers: &[Layer],
    bars: &[Bar],
    h: f64,
    b_geom: (f64, f64, f64),
    limit: &Limit,
    c: f64,
    eps_cf: f64,
) -> Balance {
    let mut n = 0.0;
    let mut m = 0.0;
    for l in layers {
        let eps = eps_cf * (c - l.x) / c;
        if eps < 0.0 {
            let f = law.compression_stress(eps) * l.b * l.dh;
            n += f;
            m += f * (l.x - c);
        }
    }
    for b in bars {
        let f = if b.depth > c {
            tension_force(b, limit)
        } else {
            let eps = eps_cf * (c - b.depth) / c + b.eps_pe;
            b.area * b.law.envelope(eps).0
        };
        n += f;
        m += f * (b.depth - c);
    }
    if let Limit::Localization { alpha, beta } = *limit {
        let (b, b_w, h_f) = b_geom;
        let f_t = law.f_t_peak;
        let depth = beta * (h - c);
        let web = alpha * f_t * b_w * depth;
        n += web;
        m += web * depth / 2.0;
        if b > b_w && h_f > 0.0 {
            let overlap = (h_f - (1.0 - beta) * (h - c)).clamp(0.0, depth);
            let flange = alpha * f_t * (b - b_w) * overlap;
            n += flange;
            m += flange * (h - c - overlap / 2.0);
        }
    }
    Balance { n, m }
}

fn solve(spec: &BeamSpec, limit: Limit) -> Result<CapacityState> {
    let layers = spec.section.layer_table();
    let bars = bars(spec);
    let h = spec.section.h;
    let dh = spec.section.layer_thickness();
    let g = spec.section.tension_geometry();
    let anchor = anchor(&bars, &limit)?;
    let law = &spec.uhpc;
    let eps_cf_at = |c: f64| -anchor.strain * c / (anchor.depth - c);
    let eval = |c: f64| balance(law, &layers, &bars, h, (g.b, g.b_w, g.h_f), &limit, c, eps_cf_at(c));
    let lo = dh;
    let hi = (h - dh).min(anchor.depth - 1e-6 * h);
    if !(hi > lo) {
        return Err(Error::NoEquilibrium(format!("anchor depth {} leaves no admissible neutral axis", anchor.depth)));
    }
    let residual = |c: f64| eval(c).n;
    let (a, b) = crate::roots::first_sign_change(&residual, lo, hi, SCAN_STEPS).ok_or_else(|| {
        Error::NoEquilibrium(format!(
            "net force does not change sign for c in [{lo:.3}, {hi:.3}]: {:.4e} N at c = {lo:.3}, {:.4e} N at c = {hi:.3}",
            residual(lo),
            residual(hi)
        ))
    })?;
    let c = if a == b { a } else { crate::roots::bisect(residual, a, b, 1e-10 * h, 200).unwrap_or(0.5 * (a + b)) };
    let eps_cf = eps_cf_at(c);
    if matches!(limit, Limit::Ultimate) {
        let limit = law.compression_zero_strain();
        if eps_cf < limit {
            return Err(Error::OverCrushed { eps_cf, limit });
        }
    }
    Ok(CapacityState { m: eval(c).m, c, eps_cf })
}

/// Capacity when the deepest strand reaches ultimate strain (mild steel at
/// f_su, strand at f_pu, UHPC tension ignored).
pub fn ultimate_moment(spec: &BeamSpec) -> Result<CapacityState> {
    solve(spec, Limit::Ultimate)
}

/// Capacity at crack localization with a rectangular tensile block of
/// intensity α·f_t,p over β(h − c).
pub fn localization_moment(spec: &BeamSpec, alpha: f64, beta: f64) -> Result<CapacityState> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::BadBlock { beta });
    }
    if !(alpha > 0.0) {
        return Err(Error::BadInput(format!("alpha must be positive, got {alpha}")));
    }
    solve(spec, Limit::Localization { alpha, beta })
}
