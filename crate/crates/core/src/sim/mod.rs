//! Four-point bending under midspan-deflection control.
//!
//! Half the span is modeled. Each station is a fiber section with its own
//! loading history; its moment is P times a fixed lever from the load
//! pattern, and the midspan deflection follows from the curvatures by the
//! unit-load method, Δ = Σ w·x·φ. Each step solves all station equilibria and
//! the deflection constraint together by Newton's method, with P bordered in.

mod curve;

pub use curve::{detect_failure_mode, CurveEvent, CurvePoint, LoadDeflectionCurve, Termination};

use crate::error::{Error, Result};
use crate::materials::{fiber_response, rebar_response, FiberState, RebarState, UhpcLaw};
use crate::section::BeamSpec;
use crate::sectional::FiberSection;

/// One longitudinal integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    /// Distance from the support (mm).
    pub x: f64,
    /// Tributary length on the half span (mm).
    pub weight: f64,
    /// Moment per unit total load: x/2 in the shear span, a/2 between loads.
    pub lever: f64,
    pub weak: bool,
}

impl Station {
    fn law<'a>(&self, model: &'a BeamModel) -> &'a UhpcLaw {
        if self.weak {
            &model.weak_law
        } else {
            &model.law
        }
    }

    /// Weight in the deflection sum.
    fn deflection_coeff(&self) -> f64 {
        self.weight * self.x
    }
}

#[derive(Debug, Clone)]
pub struct BeamModel {
    pub spec: BeamSpec,
    pub section: FiberSection,
    /// Nominal law regularized for the element size.
    pub law: UhpcLaw,
    /// Band law: nominal law weakened, same regularization.
    pub weak_law: UhpcLaw,
    /// Ordered from midspan towards the support.
    pub stations: Vec<Station>,
}

impl BeamModel {
    pub fn weak_stations(&self) -> impl Iterator<Item = &Station> {
        self.stations.iter().filter(|s| s.weak)
    }

    /// Weakened elements over the full span (a half-weight central station
    /// stands for one element straddling midspan).
    pub fn weak_element_count(&self) -> usize {
        let s = self.spec.element_size;
        let half: f64 = self.weak_stations().map(|st| st.weight).sum();
        (2.0 * half / s).round() as usize
    }
}

pub fn build_model(spec: &BeamSpec) -> Result<BeamModel> {
    spec.validate()?;
    let s = spec.element_size;
    let half = 0.5 * spec.span;
    let k = spec.weak_band.elements;
    let law = spec.uhpc.with_band_width(s)?;
    let weak_law = spec.uhpc.weaken(spec.weak_band.factor)?.with_band_width(s)?;

    // element bounds measured from midspan
    let mut bounds = vec![0.0];
    let mut u = if k % 2 == 1 { 0.5 * s } else { s };
    while u <= half + 1e-9 * half {
        bounds.push(u.min(half));
        u += s;
    }
    let last = *bounds.last().unwrap();
    if half - last > 1e-9 * half {
        if half - last >= 0.5 * s || bounds.len() == 1 {
            bounds.push(half);
        } else {
            *bounds.last_mut().unwrap() = half;
        }
    }
    if bounds.len() < 2 {
        return Err(Error::BadGeometry("span too short for one element".into()));
    }
    let weak_on_half = (k + 1) / 2;
    if weak_on_half >= bounds.len() - 1 {
        return Err(Error::BadGeometry(format!(
            "weak band of {k} elements does not fit in a half span of {} elements",
            bounds.len() - 1
        )));
    }
    let a = spec.shear_span;
    let stations = bounds
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let x = half - 0.5 * (w[0] + w[1]);
            Station { x, weight: w[1] - w[0], lever: 0.5 * x.min(a), weak: i < weak_on_half }
        })
        .collect();
    Ok(BeamModel { spec: spec.clone(), section: FiberSection::new(spec), law, weak_law, stations })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Nominal deflection increment (mm).
    pub step: f64,
    pub max_deflection: f64,
    /// Smallest increment tried before giving up on a step.
    pub min_step: f64,
    pub max_iterations: usize,
}

impl SimOptions {
    pub fn new(step: f64, max_deflection: f64) -> Self {
        SimOptions { step, max_deflection, min_step: step / 1024.0, max_iterations: 40 }
    }
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions::new(0.25, 150.0)
    }
}

/// Committed or trial history of every station.
#[derive(Debug, Clone)]
struct State {
    fibers: Vec<Vec<FiberState>>,
    bars: Vec<Vec<RebarState>>,
    eps0: Vec<f64>,
    phi: Vec<f64>,
    load: f64,
}

impl State {
    fn virgin(model: &BeamModel) -> Self {
        let n = model.stations.len();
        State {
            fibers: vec![vec![FiberState::virgin(); model.section.layers.len()]; n],
            bars: vec![vec![RebarState::default(); model.section.bars.len()]; n],
            eps0: vec![0.0; n],
            phi: vec![0.0; n],
            load: 0.0,
        }
    }

    fn deflection(&self, model: &BeamModel) -> f64 {
        model.stations.iter().zip(&self.phi).map(|(s, p)| s.deflection_coeff() * p).sum()
    }
}

struct Eval {
    n: f64,
    m: f64,
    k: [[f64; 2]; 2],
}

fn eval_station(
    model: &BeamModel,
    j: usize,
    committed: &State,
    eps0: f64,
    phi: f64,
    fibers_out: &mut [FiberState],
    bars_out: &mut [RebarState],
) -> Eval {
    let law = model.stations[j].law(model);
    let hist_f = &committed.fibers[j];
    let hist_b = &committed.bars[j];
    let sec = &model.section;
    let r = sec.integrate(
        eps0,
        phi,
        |i, e| {
            let r = fiber_response(law, &hist_f[i], e);
            fibers_out[i] = r.state;
            (r.stress, r.tangent)
        },
        |i, e| {
            let (s, t, st) = rebar_response(&sec.bars[i].law, &hist_b[i], e);
            bars_out[i] = st;
            (s, t)
        },
    );
    Eval { n: r.n, m: r.m, k: [[r.k_ne, r.k_np], [r.k_me, r.k_mp]] }
}

fn solve2(k: &[[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let scale = (k[0][0] * k[1][1]).abs() + (k[0][1] * k[1][0]).abs();
    if !(det.abs() > 1e-13 * scale) || !det.is_finite() {
        return None;
    }
    Some([(r[0] * k[1][1] - k[0][1] * r[1]) / det, (k[0][0] * r[1] - k[1][0] * r[0]) / det])
}

struct Solver<'a> {
    model: &'a BeamModel,
    tol_n: f64,
    tol_m: f64,
    max_iterations: usize,
}

impl Solver<'_> {
    /// Newton iterations from `guess`. With `target = Some(Δ)` the load is
    /// an unknown; otherwise the load in `guess` is held fixed.
    fn solve(&self, committed: &State, guess: &State, target: Option<f64>) -> Option<State> {
        let model = self.model;
        let ns = model.stations.len();
        let mut trial = guess.clone();
        let mut x = vec![[0.0; 2]; ns];
        let mut y = vec![[0.0; 2]; ns];
        for _ in 0..self.max_iterations {
            let mut worst_n: f64 = 0.0;
            let mut worst_m: f64 = 0.0;
            for j in 0..ns {
                let st = &model.stations[j];
                let (fo, bo) = (&mut trial.fibers[j], &mut trial.bars[j]);
                let e = eval_station(model, j, committed, trial.eps0[j], trial.phi[j], fo, bo);
                let rm = e.m - trial.load * st.lever;
                worst_n = worst_n.max(e.n.abs());
                worst_m = worst_m.max(rm.abs());
                x[j] = solve2(&e.k, [-e.n, -rm])?;
                y[j] = solve2(&e.k, [0.0, st.lever])?;
            }
            let gap = target.map(|t| t - trial.deflection(model));
            let converged = worst_n <= self.tol_n
                && worst_m <= self.tol_m
                && gap.map_or(true, |g| g.abs() <= 1e-9 * (1.0 + t_abs(target)));
            if converged {
                return Some(trial);
            }
            let d_load = match gap {
                Some(g) => {
                    let (mut sx, mut sy) = (0.0, 0.0);
                    for (j, st) in model.stations.iter().enumerate() {
                        sx += st.deflection_coeff() * x[j][1];
                        sy += st.deflection_coeff() * y[j][1];
                    }
                    if !(sy.abs() > 0.0) {
                        return None;
                    }
                    (g - sx) / sy
                }
                None => 0.0,
            };
            if !d_load.is_finite() {
                return None;
            }
            trial.load += d_load;
            for j in 0..ns {
                trial.eps0[j] += x[j][0] + y[j][0] * d_load;
                trial.phi[j] += x[j][1] + y[j][1] * d_load;
            }
        }
        None
    }
}

fn t_abs(t: Option<f64>) -> f64 {
    t.map_or(0.0, f64::abs)
}

/// Strain of each bar averaged over the weakened band.
fn band_bar_strains(model: &BeamModel, s: &State) -> Vec<f64> {
    let mut acc = vec![0.0; model.section.bars.len()];
    let mut w = 0.0;
    for (j, st) in model.stations.iter().enumerate().filter(|(_, st)| st.weak) {
        for (b, a) in model.section.bars.iter().zip(acc.iter_mut()) {
            *a += st.weight * (s.eps0[j] + s.phi[j] * b.depth + b.eps_pe);
        }
        w += st.weight;
    }
    acc.iter().map(|a| a / w).collect()
}

/// Criteria that hold at a converged state, in a fixed order.
fn flags(model: &BeamModel, s: &State) -> Vec<CurveEvent> {
    let h = model.section.h;
    let mut out = Vec::new();
    let bottom = |j: usize| s.eps0[j] + s.phi[j] * h;
    if model.stations.iter().enumerate().any(|(j, st)| bottom(j) >= st.law(model).eps_t_crack) {
        out.push(CurveEvent::Cracking);
    }
    if model.stations.iter().enumerate().any(|(j, st)| st.weak && bottom(j) >= st.law(model).eps_t_loc) {
        out.push(CurveEvent::Localization);
    }
    let avg = band_bar_strains(model, s);
    let bars = &model.section.bars;
    if bars.iter().zip(&avg).any(|(b, &e)| !b.law.is_strand() && e >= b.law.event_yield_strain()) {
        out.push(CurveEvent::MildYield);
    }
    if bars.iter().zip(&avg).any(|(b, &e)| b.law.is_strand() && e >= b.law.event_yield_strain()) {
        out.push(CurveEvent::StrandYield);
    }
    if model.stations.iter().enumerate().any(|(j, st)| s.eps0[j] <= st.law(model).crushing_strain()) {
        out.push(CurveEvent::Crushing);
    }
    if bars.iter().zip(&avg).any(|(b, &e)| e > b.law.rupture_strain()) {
        out.push(CurveEvent::Rupture);
    }
    out
}

/// Runs the displacement-controlled analysis. Nonconvergence ends the curve
/// with a flag rather than an error so the converged prefix is kept.
pub fn simulate(model: &BeamModel, opts: &SimOptions) -> Result<LoadDeflectionCurve> {
    if !(opts.step > 0.0 && opts.max_deflection > 0.0 && opts.min_step > 0.0) {
        return Err(Error::BadInput(format!("invalid simulation options {opts:?}")));
    }
    let area = model.section.gross_area;
    let f_c = model.spec.uhpc.f_c;
    let solver = Solver {
        model,
        tol_n: 1e-7 * f_c * area,
        tol_m: 1e-7 * f_c * area * model.section.h,
        max_iterations: opts.max_iterations,
    };

    // rest state under prestress alone
    let virgin = State::virgin(model);
    let mut committed = solver
        .solve(&virgin, &virgin, None)
        .ok_or_else(|| Error::ConvergenceFailure("no equilibrium under prestress alone".into()))?;
    let origin = committed.deflection(model);
    let a = model.spec.shear_span;

    let mut points = vec![CurvePoint { load: 0.0, deflection: 0.0, drift: 0.0 }];
    let mut events: Vec<(CurveEvent, usize)> = Vec::new();
    let record = |s: &State, points: &[CurvePoint], events: &mut Vec<(CurveEvent, usize)>| {
        for f in flags(model, s) {
            if !events.iter().any(|(e, _)| *e == f) {
                events.push((f, points.len() - 1));
            }
        }
    };
    record(&committed, &points, &mut events);

    let mut previous: Option<State> = None;
    let mut inc = opts.step;
    let mut delta = 0.0;
    let mut peak = 0.0f64;
    let termination = loop {
        if delta >= opts.max_deflection - 1e-12 {
            break Termination::MaxDeflection;
        }
        let h = inc.min(opts.max_deflection - delta);
        let target = origin + delta + h;
        // linear predictor from the last increment
        let guess = match &previous {
            Some(prev) => {
                let mut g = committed.clone();
                let last = delta - (prev.deflection(model) - origin);
                let r = if last > 0.0 { h / last } else { 0.0 };
                for j in 0..g.eps0.len() {
                    g.eps0[j] += r * (committed.eps0[j] - prev.eps0[j]);
                    g.phi[j] += r * (committed.phi[j] - prev.phi[j]);
                }
                g.load += r * (committed.load - prev.load);
                g
            }
            None => committed.clone(),
        };
        let solved = solver
            .solve(&committed, &guess, Some(target))
            .or_else(|| solver.solve(&committed, &committed, Some(target)));
        match solved {
            Some(next) => {
                delta += h;
                let load = next.load * 1e-3;
                peak = peak.max(load);
                points.push(CurvePoint { load, deflection: delta, drift: delta / a });
                record(&next, &points, &mut events);
                previous = Some(std::mem::replace(&mut committed, next));
                inc = (2.0 * inc).min(opts.step);
                let have = |e| events.iter().any(|(x, _)| *x == e);
                if have(CurveEvent::Crushing) {
                    break Termination::Crushing;
                }
                if have(CurveEvent::Rupture) {
                    break Termination::Rupture;
                }
            }
            None if inc * 0.5 >= opts.min_step => inc *= 0.5,
            None => {
                let post_peak = points.last().map_or(false, |p| p.load < peak);
                break if post_peak {
                    Termination::SnapBack
                } else {
                    Termination::ConvergenceFailure(format!(
                        "no equilibrium beyond Δ = {delta:.4} mm with increment {inc:.2e} mm"
                    ))
                };
            }
        }
    };

    if let Some(i) = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.load.total_cmp(&b.1.load))
        .map(|(i, _)| i)
    {
        events.push((CurveEvent::Peak, i));
    }
    events.sort_by_key(|&(e, i)| (i, e as u8));
    let mut curve = LoadDeflectionCurve { points, events, termination, mode: None };
    curve.mode = detect_failure_mode(&curve).ok();
    Ok(curve)
}
