//! Cross-section geometry, reinforcement rows and the beam definition shared
//! by every solver. Depths are measured down from the extreme compression
//! (top) fiber.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::steel::{self, SteelLaw, StrandLaw};
use crate::materials::{MaterialRecord, RebarLaw, UhpcLaw};

pub const DEFAULT_LAYERS: usize = 100;

/// A constant-width slice of the profile between two depths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub top: f64,
    pub bottom: f64,
    pub width: f64,
}

/// Shorthand description of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Rect { b: f64, h: f64 },
    /// Top flange over a web.
    Tee { b_f: f64, h_f: f64, b_w: f64, h: f64 },
    /// Top and bottom flanges joined by a web.
    I { b_top: f64, t_top: f64, b_w: f64, b_bot: f64, t_bot: f64, h: f64 },
    /// Single-cell box; `t_web` is the thickness of each of the two webs.
    Box { b: f64, h: f64, t_top: f64, t_bot: f64, t_web: f64 },
    Profile { h: f64, segments: Vec<Segment> },
}

impl Shape {
    fn segments(&self) -> Vec<Segment> {
        let seg = |top: f64, bottom: f64, width: f64| Segment { top, bottom, width };
        match *self {
            Shape::Rect { b, h } => vec![seg(0.0, h, b)],
            Shape::Tee { b_f, h_f, b_w, h } => vec![seg(0.0, h_f, b_f), seg(h_f, h, b_w)],
            Shape::I { b_top, t_top, b_w, b_bot, t_bot, h } => vec![
                seg(0.0, t_top, b_top),
                seg(t_top, h - t_bot, b_w),
                seg(h - t_bot, h, b_bot),
            ],
            Shape::Box { b, h, t_top, t_bot, t_web } => vec![
                seg(0.0, t_top, b),
                seg(t_top, h - t_bot, 2.0 * t_web),
                seg(h - t_bot, h, b),
            ],
            Shape::Profile { ref segments, .. } => segments.clone(),
        }
    }

    fn depth(&self) -> f64 {
        match *self {
            Shape::Rect { h, .. }
            | Shape::Tee { h, .. }
            | Shape::I { h, .. }
            | Shape::Box { h, .. }
            | Shape::Profile { h, .. } => h,
        }
    }
}

/// One row of the layer table: centroid depth, width and thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub x: f64,
    pub b: f64,
    pub dh: f64,
}

/// Bottom-flange data for the rectangular tensile stress block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionGeometry {
    /// Width at the tension edge.
    pub b: f64,
    pub b_w: f64,
    /// Depth of the bottom flange (0 for a plain web).
    pub h_f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub shape: Shape,
    pub h: f64,
    pub segments: Vec<Segment>,
    pub n_layers: usize,
}

impl CrossSection {
    pub fn new(shape: Shape, n_layers: usize) -> Result<Self> {
        let h = shape.depth();
        let segments = shape.segments();
        let section = CrossSection { shape, h, segments, n_layers };
        section.validate()?;
        Ok(section)
    }

    pub fn rectangle(b: f64, h: f64) -> Result<Self> {
        Self::new(Shape::Rect { b, h }, DEFAULT_LAYERS)
    }

    pub fn tee(b_f: f64, h_f: f64, b_w: f64, h: f64) -> Result<Self> {
        Self::new(Shape::Tee { b_f, h_f, b_w, h }, DEFAULT_LAYERS)
    }

    pub fn i_shape(b_top: f64, t_top: f64, b_w: f64, b_bot: f64, t_bot: f64, h: f64) -> Result<Self> {
        Self::new(Shape::I { b_top, t_top, b_w, b_bot, t_bot, h }, DEFAULT_LAYERS)
    }

    pub fn box_shape(b: f64, h: f64, t_top: f64, t_bot: f64, t_web: f64) -> Result<Self> {
        Self::new(Shape::Box { b, h, t_top, t_bot, t_web }, DEFAULT_LAYERS)
    }

    pub fn profile(h: f64, segments: Vec<Segment>) -> Result<Self> {
        Self::new(Shape::Profile { h, segments }, DEFAULT_LAYERS)
    }

    pub fn with_layers(&self, n_layers: usize) -> Result<Self> {
        Self::new(self.shape.clone(), n_layers)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadGeometry(m));
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad(format!("depth must be positive, got {}", self.h));
        }
        if self.n_layers == 0 {
            return bad("layer count must be at least 1".into());
        }
        if self.segments.is_empty() {
            return bad("profile has no segments".into());
        }
        let tol = 1e-9 * self.h;
        let mut cursor = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.width.is_finite() && s.width > 0.0) {
                return bad(format!("segment {i} has non-positive width {}", s.width));
            }
            if !(s.bottom > s.top) {
                return bad(format!("segment {i} is empty or inverted ({} to {})", s.top, s.bottom));
            }
            if (s.top - cursor).abs() > tol {
                let what = if s.top > cursor { "gap" } else { "overlap" };
                return bad(format!("{what} before segment {i}: expected top {cursor}, found {}", s.top));
            }
            cursor = s.bottom;
        }
        if (cursor - self.h).abs() > tol {
            return bad(format!("segments end at {cursor}, section depth is {}", self.h));
        }
        Ok(())
    }

    /// Width at depth `x`; the lower segment wins on a boundary.
    pub fn width_at(&self, x: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| x >= s.top && x < s.bottom)
            .or_else(|| self.segments.last())
            .map_or(0.0, |s| s.width)
    }

    pub fn exact_area(&self) -> f64 {
        self.segments.iter().map(|s| s.width * (s.bottom - s.top)).sum()
    }

    /// First moment of area about the top edge.
    pub fn exact_first_moment(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.width * 0.5 * (s.bottom * s.bottom - s.top * s.top))
            .sum()
    }

    pub fn exact_centroid(&self) -> f64 {
        self.exact_first_moment() / self.exact_area()
    }

    /// Second moment of area about the top edge.
    pub fn exact_second_moment_top(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.width * (s.bottom.powi(3) - s.top.powi(3)) / 3.0)
            .sum()
    }

    pub fn layer_thickness(&self) -> f64 {
        self.h / self.n_layers as f64
    }

    /// Midpoint-rule layer table with `n_layers` equal slices.
    pub fn layer_table(&self) -> Vec<Layer> {
        let dh = self.layer_thickness();
        (0..self.n_layers)
            .map(|i| {
                let x = (i as f64 + 0.5) * dh;
                Layer { x, b: self.width_at(x), dh }
            })
            .collect()
    }

    pub fn discrete_area(&self) -> f64 {
        self.layer_table().iter().map(|l| l.b * l.dh).sum()
    }

    /// Narrowest width over the section depth.
    pub fn web_width(&self) -> f64 {
        match self.shape {
            Shape::Rect { b, .. } => b,
            Shape::Tee { b_w, .. } | Shape::I { b_w, .. } => b_w,
            Shape::Box { t_web, .. } => 2.0 * t_web,
            Shape::Profile { .. } => self.segments.iter().map(|s| s.width).fold(f64::INFINITY, f64::min),
        }
    }

    /// Tension-edge width, web width and bottom-flange depth.
    pub fn tension_geometry(&self) -> TensionGeometry {
        let bottom = *self.segments.last().expect("validated profile");
        let b_w = self.web_width();
        if self.segments.len() >= 2 && bottom.width > b_w {
            TensionGeometry { b: bottom.width, b_w, h_f: bottom.bottom - bottom.top }
        } else {
            TensionGeometry { b: bottom.width, b_w: bottom.width, h_f: 0.0 }
        }
    }

    /// Same shape with a different web width, where the shape has one.
    pub fn with_web_width(&self, b_w: f64) -> Result<Self> {
        let shape = match self.shape.clone() {
            Shape::Rect { h, .. } => Shape::Rect { b: b_w, h },
            Shape::Tee { b_f, h_f, h, .. } => Shape::Tee { b_f, h_f, b_w, h },
            Shape::I { b_top, t_top, b_bot, t_bot, h, .. } => Shape::I { b_top, t_top, b_w, b_bot, t_bot, h },
            Shape::Box { b, h, t_top, t_bot, .. } => Shape::Box { b, h, t_top, t_bot, t_web: 0.5 * b_w },
            Shape::Profile { .. } => {
                return Err(Error::BadGeometry("a general profile has no web width parameter".into()))
            }
        };
        Self::new(shape, self.n_layers)
    }
}

/// Reinforcement row: total area at one depth with its law and prestress.
#[derive(Debug, Clone, PartialEq)]
pub struct ReinforcementLayer {
    pub area: f64,
    pub depth: f64,
    pub law: RebarLaw,
    /// Effective prestress (MPa); zero for mild steel.
    pub f_pe: f64,
}

impl ReinforcementLayer {
    pub fn mild(area: f64, depth: f64, law: SteelLaw) -> Self {
        ReinforcementLayer { area, depth, law: RebarLaw::Mild(law), f_pe: 0.0 }
    }

    pub fn strand(area: f64, depth: f64, law: StrandLaw, f_pe: f64) -> Self {
        ReinforcementLayer { area, depth, law: RebarLaw::Strand(law), f_pe }
    }

    /// Effective prestrain f_pe / E_ps.
    pub fn eps_pe(&self) -> f64 {
        match self.law {
            RebarLaw::Strand(p) => self.f_pe / p.e_ps,
            RebarLaw::Mild(_) => 0.0,
        }
    }

    pub fn is_strand(&self) -> bool {
        self.law.is_strand()
    }

    fn validate(&self, h: f64, index: usize) -> Result<()> {
        let bad = |m: String| Err(Error::BadGeometry(format!("reinforcement layer {index}: {m}")));
        if !(self.area > 0.0) {
            return bad(format!("area must be positive, got {}", self.area));
        }
        if !(self.depth > 0.0 && self.depth < h) {
            return bad(format!("depth {} must lie strictly inside (0, {h})", self.depth));
        }
        match self.law {
            RebarLaw::Strand(p) => {
                if !(self.f_pe >= 0.0 && self.f_pe <= p.f_py) {
                    return bad(format!("f_pe {} must lie in [0, f_py = {}]", self.f_pe, p.f_py));
                }
            }
            RebarLaw::Mild(_) => {
                if self.f_pe != 0.0 {
                    return bad("mild steel cannot carry prestress".into());
                }
            }
        }
        Ok(())
    }
}

/// Weakened midspan band: number of elements and strength reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakBand {
    pub elements: usize,
    pub factor: f64,
}

impl Default for WeakBand {
    fn default() -> Self {
        WeakBand { elements: 3, factor: 0.15 }
    }
}

/// The unit of analysis: section, reinforcement, UHPC law and four-point
/// bending geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpec {
    pub name: String,
    pub section: CrossSection,
    pub layers: Vec<ReinforcementLayer>,
    pub uhpc: UhpcLaw,
    /// Clear span L (mm).
    pub span: f64,
    /// Shear span a (mm), support to load point.
    pub shear_span: f64,
    pub weak_band: WeakBand,
    /// Longitudinal element length (mm).
    pub element_size: f64,
}

impl BeamSpec {
    pub fn validate(&self) -> Result<()> {
        for (i, l) in self.layers.iter().enumerate() {
            l.validate(self.section.h, i)?;
        }
        if !(self.span > 0.0 && self.shear_span > 0.0 && 2.0 * self.shear_span < self.span) {
            return Err(Error::BadGeometry(format!(
                "need 0 < 2·shear_span < span, got a = {}, L = {}",
                self.shear_span, self.span
            )));
        }
        if !(self.element_size > 0.0) {
            return Err(Error::BadGeometry(format!("element size must be positive, got {}", self.element_size)));
        }
        if self.weak_band.elements == 0 || !(0.0..1.0).contains(&self.weak_band.factor) {
            return Err(Error::BadGeometry(format!("invalid weak band {:?}", self.weak_band)));
        }
        Ok(())
    }

    pub fn gross_area(&self) -> f64 {
        self.section.exact_area()
    }

    pub fn strands(&self) -> impl Iterator<Item = &ReinforcementLayer> {
        self.layers.iter().filter(|l| l.is_strand())
    }

    pub fn mild_layers(&self) -> impl Iterator<Item = &ReinforcementLayer> {
        self.layers.iter().filter(|l| !l.is_strand())
    }

    /// Area-weighted depth of all reinforcement below mid-depth.
    pub fn effective_depth(&self) -> Option<f64> {
        let (a, m) = self
            .layers
            .iter()
            .filter(|l| l.depth > 0.5 * self.section.h)
            .fold((0.0, 0.0), |(a, m), l| (a + l.area, m + l.area * l.depth));
        (a > 0.0).then(|| m / a)
    }

    pub fn with_section(&self, section: CrossSection) -> Self {
        BeamSpec { section, ..self.clone() }
    }

    pub fn with_layer_count(&self, n: usize) -> Result<Self> {
        Ok(self.with_section(self.section.with_layers(n)?))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        BeamFile::read(path)?.to_spec()
    }
}

// ---------------------------------------------------------------------------
// Beam file (JSON)
// ---------------------------------------------------------------------------

/// Reinforcement material keys; interpretation depends on the layer kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RebarRecord {
    #[serde(rename = "E_s", default, skip_serializing_if = "Option::is_none")]
    pub e_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_su: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_sh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_su: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_sf: Option<f64>,
    #[serde(rename = "E_ps", default, skip_serializing_if = "Option::is_none")]
    pub e_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_py: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_pu: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_pu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RebarKind {
    Mild,
    Strand,
}

impl RebarRecord {
    pub fn to_law(&self, kind: RebarKind) -> Result<RebarLaw> {
        match kind {
            RebarKind::Mild => {
                let f_y = self
                    .f_y
                    .ok_or_else(|| Error::InvalidMaterial("mild steel needs f_y".into()))?;
                Ok(RebarLaw::Mild(SteelLaw::new(
                    self.e_s.unwrap_or(steel::DEFAULT_E_S),
                    f_y,
                    self.f_su.unwrap_or(steel::DEFAULT_ULTIMATE_RATIO * f_y),
                    self.eps_sh.unwrap_or(steel::DEFAULT_EPS_SH),
                    self.eps_su.unwrap_or(steel::DEFAULT_EPS_SU),
                    self.eps_sf.unwrap_or(steel::DEFAULT_EPS_SF),
                )?))
            }
            RebarKind::Strand => {
                let f_pu = self
                    .f_pu
                    .ok_or_else(|| Error::InvalidMaterial("strand needs f_pu".into()))?;
                Ok(RebarLaw::Strand(StrandLaw::new(
                    self.e_ps.unwrap_or(steel::DEFAULT_E_PS),
                    self.f_py.unwrap_or(0.90 * f_pu),
                    f_pu,
                    self.k.unwrap_or(steel::GRADE_270_K),
                    self.q.unwrap_or(steel::GRADE_270_Q),
                    self.n.unwrap_or(steel::GRADE_270_N),
                    self.eps_pu.unwrap_or(steel::DEFAULT_EPS_PU),
                )?))
            }
        }
    }

    pub fn from_law(law: &RebarLaw) -> Self {
        match *law {
            RebarLaw::Mild(s) => RebarRecord {
                e_s: Some(s.e_s),
                f_y: Some(s.f_y),
                f_su: Some(s.f_su),
                eps_sh: Some(s.eps_sh),
                eps_su: Some(s.eps_su),
                eps_sf: Some(s.eps_sf),
                ..Default::default()
            },
            RebarLaw::Strand(p) => RebarRecord {
                e_ps: Some(p.e_ps),
                f_py: Some(p.f_py),
                f_pu: Some(p.f_pu),
                k: Some(p.k),
                q: Some(p.q),
                n: Some(p.n),
                eps_pu: Some(p.eps_pu),
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerRecord {
    pub kind: RebarKind,
    pub area: f64,
    pub depth: f64,
    pub material: RebarRecord,
    #[serde(default)]
    pub f_pe: f64,
}

fn default_element_size() -> Option<f64> {
    None
}

/// On-disk beam description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamFile {
    #[serde(default)]
    pub name: String,
    pub section: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_layers: Option<usize>,
    pub uhpc: MaterialRecord,
    pub layers: Vec<LayerRecord>,
    pub span: f64,
    pub shear_span: f64,
    #[serde(default)]
    pub weak_band: WeakBand,
    #[serde(default = "default_element_size", skip_serializing_if = "Option::is_none")]
    pub element_size: Option<f64>,
    /// Marks stand-in geometry that must be replaced with measured data.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub placeholder: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl BeamFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                row: 0,
                column: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            row: e.line(),
            column: format!("col {}", e.column()),
            message: e.to_string(),
        })
    }

    pub fn to_spec(&self) -> Result<BeamSpec> {
        let section = CrossSection::new(self.section.clone(), self.n_layers.unwrap_or(DEFAULT_LAYERS))?;
        let uhpc = UhpcLaw::derive(&self.uhpc)?;
        let layers = self
            .layers
            .iter()
            .map(|l| {
                Ok(ReinforcementLayer {
                    area: l.area,
                    depth: l.depth,
                    law: l.material.to_law(l.kind)?,
                    f_pe: l.f_pe,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let element_size = self.element_size.unwrap_or(uhpc.band_width);
        let spec = BeamSpec {
            name: self.name.clone(),
            section,
            layers,
            uhpc,
            span: self.span,
            shear_span: self.shear_span,
            weak_band: self.weak_band,
            element_size,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &BeamSpec) -> Self {
        BeamFile {
            name: spec.name.clone(),
            section: spec.section.shape.clone(),
            n_layers: Some(spec.section.n_layers),
            uhpc: spec.uhpc.to_record(),
            layers: spec
                .layers
                .iter()
                .map(|l| LayerRecord {
                    kind: if l.is_strand() { RebarKind::Strand } else { RebarKind::Mild },
                    area: l.area,
                    depth: l.depth,
                    material: RebarRecord::from_law(&l.law),
                    f_pe: l.f_pe,
                })
                .collect(),
            span: spec.span,
            shear_span: spec.shear_span,
            weak_band: spec.weak_band,
            element_size: Some(spec.element_size),
            placeholder: false,
            notes: String::new(),
        }
    }
}
