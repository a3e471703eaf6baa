//! Uniaxial UHPC law: tri-linear tension, four-branch compression with a
//! fracture-energy-regularized linear descending branch, and the damage
//! scalars used for unloading.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default localization strain when a material test does not report one.
pub const DEFAULT_EPS_T_LOC: f64 = 0.0025;
/// Default crack bandwidth (mm), the side length of a 10 mm element.
pub const DEFAULT_BAND_WIDTH: f64 = 10.0;
/// Cracking strength as a fraction of the peak tensile strength.
pub const CRACK_TO_PEAK: f64 = 0.95;
/// Residual compressive strength as a fraction of f_c'.
pub const RESIDUAL_FRACTION: f64 = 0.2;
/// Fiber orientation factor in the fracture-energy regression.
pub const FIBER_ORIENTATION_FACTOR: f64 = 0.8;
/// Compressive fracture energy per MPa of strength (N/mm per MPa).
pub const G_C_PER_MPA: f64 = 0.9;
pub const DEFAULT_ALPHA_T: f64 = 0.70;
pub const DEFAULT_ALPHA_C: f64 = 0.50;
pub const DEFAULT_POISSON: f64 = 0.18;
/// Fraction of f_c' on the descending branch that defines crushing.
pub const CRUSHING_FRACTION: f64 = 0.85;

/// A partial material record as read from a material JSON file.
///
/// Every key is optional; [`UhpcLaw::derive`] fills the gaps with estimators.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRecord {
    #[serde(rename = "E_c", default, skip_serializing_if = "Option::is_none")]
    pub e_c: Option<f64>,
    #[serde(rename = "f_c", default, skip_serializing_if = "Option::is_none")]
    pub f_c: Option<f64>,
    #[serde(rename = "f_t_p", default, skip_serializing_if = "Option::is_none")]
    pub f_t_p: Option<f64>,
    #[serde(rename = "eps_t_p", default, skip_serializing_if = "Option::is_none")]
    pub eps_t_p: Option<f64>,
    #[serde(rename = "G_f", default, skip_serializing_if = "Option::is_none")]
    pub g_f: Option<f64>,
    #[serde(rename = "G_c", default, skip_serializing_if = "Option::is_none")]
    pub g_c: Option<f64>,
    #[serde(rename = "v_f", default, skip_serializing_if = "Option::is_none")]
    pub v_f: Option<f64>,
    #[serde(rename = "l_f", default, skip_serializing_if = "Option::is_none")]
    pub l_f: Option<f64>,
    #[serde(rename = "d_f", default, skip_serializing_if = "Option::is_none")]
    pub d_f: Option<f64>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(rename = "alpha_t", default, skip_serializing_if = "Option::is_none")]
    pub alpha_t: Option<f64>,
    #[serde(rename = "alpha_c", default, skip_serializing_if = "Option::is_none")]
    pub alpha_c: Option<f64>,
    #[serde(rename = "f_res", default, skip_serializing_if = "Option::is_none")]
    pub f_res: Option<f64>,
}

/// Steel fiber data carried as metadata (volume fraction, length and
/// diameter in mm). The length feeds the tensile stress-block depth factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberGeometry {
    pub v_f: Option<f64>,
    pub l_f: Option<f64>,
    pub d_f: Option<f64>,
}

/// Stress at which the damage evolution law starts counting inelastic strain.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum DamageOnset {
    /// Cracking strength in tension, f_c' in compression.
    #[default]
    Strengths,
    /// Explicit values (MPa) for tension and compression.
    Fixed { tension: f64, compression: f64 },
}

/// Complete uniaxial UHPC description. Strains are signed (tension positive),
/// strengths are positive magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UhpcLaw {
    pub e_c: f64,
    pub f_c: f64,
    pub f_t_peak: f64,
    pub f_t_crack: f64,
    pub eps_t_crack: f64,
    pub eps_t_loc: f64,
    pub eps_t_ult: f64,
    pub g_f: f64,
    pub g_c: f64,
    pub f_res: f64,
    pub eps_c_half: f64,
    pub eps_c_peak: f64,
    pub eps_c_ult: f64,
    /// Crack bandwidth H (mm).
    pub band_width: f64,
    pub alpha_t: f64,
    pub alpha_c: f64,
    pub poisson: f64,
    pub fiber: Option<FiberGeometry>,
    pub damage_onset: DamageOnset,
}

/// Tensile fracture energy estimate (N/mm) from fiber volume fraction and
/// aspect ratio.
pub fn fracture_energy_from_fibers(v_f: f64, aspect_ratio: f64) -> f64 {
    FIBER_ORIENTATION_FACTOR * (11.553 * aspect_ratio * v_f + 5.7859)
}

/// Elastic modulus estimate (MPa) from compressive strength.
pub fn modulus_from_strength(f_c: f64) -> f64 {
    3680.0 * f_c.sqrt()
}

/// Strain at peak compressive strength (negative).
pub fn peak_compressive_strain(f_c: f64, e_c: f64) -> f64 {
    -0.724 * f_c / e_c - 0.0016
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(Error::InvalidMaterial(format!(
            "{name} must be positive and finite, got {x}"
        ))),
        other => Ok(other),
    }
}

impl UhpcLaw {
    /// Builds a complete law from a partial record. Measured values always
    /// take precedence over the estimators.
    pub fn derive(record: &MaterialRecord) -> Result<Self> {
        let f_c = positive("f_c", record.f_c)?
            .ok_or_else(|| Error::InvalidMaterial("f_c is required".into()))?;
        let f_t_peak = positive("f_t_p", record.f_t_p)?
            .ok_or_else(|| Error::InvalidMaterial("f_t_p is required".into()))?;
        let e_c = positive("E_c", record.e_c)?.unwrap_or_else(|| modulus_from_strength(f_c));
        let eps_t_loc = positive("eps_t_p", record.eps_t_p)?.unwrap_or(DEFAULT_EPS_T_LOC);
        let band_width = positive("H", record.h)?.unwrap_or(DEFAULT_BAND_WIDTH);
        let v_f = positive("v_f", record.v_f)?;
        let l_f = positive("l_f", record.l_f)?;
        let d_f = positive("d_f", record.d_f)?;
        let g_f = match positive("G_f", record.g_f)? {
            Some(g) => g,
            None => match (v_f, l_f, d_f) {
                (Some(v), Some(l), Some(d)) => fracture_energy_from_fibers(v, l / d),
                _ => {
                    return Err(Error::InvalidMaterial(
                        "G_f is required when fiber data (v_f, l_f, d_f) is incomplete".into(),
                    ))
                }
            },
        };
        let g_c = positive("G_c", record.g_c)?.unwrap_or(G_C_PER_MPA * f_c);
        let f_res = match record.f_res {
            Some(r) if !(r.is_finite() && r >= 0.0) => {
                return Err(Error::InvalidMaterial(format!("f_res must be >= 0, got {r}")))
            }
            Some(r) => r,
            None => RESIDUAL_FRACTION * f_c,
        };
        let fiber = (v_f.is_some() || l_f.is_some() || d_f.is_some())
            .then_some(FiberGeometry { v_f, l_f, d_f });

        let f_t_crack = CRACK_TO_PEAK * f_t_peak;
        let mut law = UhpcLaw {
            e_c,
            f_c,
            f_t_peak,
            f_t_crack,
            eps_t_crack: 0.0,
            eps_t_loc,
            eps_t_ult: 0.0,
            g_f,
            g_c,
            f_res,
            eps_c_half: 0.0,
            eps_c_peak: 0.0,
            eps_c_ult: 0.0,
            band_width,
            alpha_t: record.alpha_t.unwrap_or(DEFAULT_ALPHA_T),
            alpha_c: record.alpha_c.unwrap_or(DEFAULT_ALPHA_C),
            poisson: DEFAULT_POISSON,
            fiber,
            damage_onset: DamageOnset::default(),
        };
        law.rederive();
        law.validate()?;
        Ok(law)
    }

    /// The record that reproduces this law through [`UhpcLaw::derive`].
    pub fn to_record(&self) -> MaterialRecord {
        MaterialRecord {
            e_c: Some(self.e_c),
            f_c: Some(self.f_c),
            f_t_p: Some(self.f_t_peak),
            eps_t_p: Some(self.eps_t_loc),
            g_f: Some(self.g_f),
            g_c: Some(self.g_c),
            v_f: self.fiber.and_then(|f| f.v_f),
            l_f: self.fiber.and_then(|f| f.l_f),
            d_f: self.fiber.and_then(|f| f.d_f),
            h: Some(self.band_width),
            alpha_t: Some(self.alpha_t),
            alpha_c: Some(self.alpha_c),
            f_res: Some(self.f_res),
        }
    }

    // Dependent strains follow from the primary quantities and H.
    fn rederive(&mut self) {
        let e = self.e_c;
        let h = self.band_width;
        self.eps_t_crack = self.f_t_crack / e;
        self.eps_t_ult = 2.0 * self.g_f / h / self.f_t_peak + self.eps_t_loc - self.f_t_peak / e;
        self.eps_c_half = -0.5 * self.f_c / e;
        self.eps_c_peak = peak_compressive_strain(self.f_c, e);
        self.eps_c_ult = -2.0 * self.g_c / ((self.f_c + self.f_res) * h)
            + self.eps_c_peak
            + (self.f_c - self.f_res) / e;
    }

    /// Checks the ordering and range invariants.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.f_t_crack > 0.0 && self.f_t_crack <= self.f_t_peak) {
            problems.push(format!(
                "need 0 < f_t_crack ({}) <= f_t_peak ({})",
                self.f_t_crack, self.f_t_peak
            ));
        }
        if !(self.eps_t_crack < self.eps_t_loc) {
            problems.push(format!(
                "cracking strain {:.6} must be below localization strain {:.6}",
                self.eps_t_crack, self.eps_t_loc
            ));
        }
        if !(self.eps_t_loc < self.eps_t_ult) {
            problems.push(format!(
                "ultimate tensile strain {:.6} <= localization strain {:.6} \
                 (G_f = {} N/mm too small for H = {} mm: crack-band snap-back)",
                self.eps_t_ult, self.eps_t_loc, self.g_f, self.band_width
            ));
        }
        if !(self.eps_c_ult < self.eps_c_peak && self.eps_c_peak < self.eps_c_half && self.eps_c_half < 0.0) {
            problems.push(format!(
                "compressive strains out of order: eps_c_ult {:.6}, eps_c_peak {:.6}, eps_c_half {:.6}",
                self.eps_c_ult, self.eps_c_peak, self.eps_c_half
            ));
        }
        if !(self.f_res < self.f_c) {
            problems.push(format!("f_res ({}) must be below f_c ({})", self.f_res, self.f_c));
        }
        if !(0.35..=0.70).contains(&self.alpha_c) {
            problems.push(format!("alpha_c = {} outside [0.35, 0.70]", self.alpha_c));
        }
        if !(0.50..=0.95).contains(&self.alpha_t) {
            problems.push(format!("alpha_t = {} outside [0.50, 0.95]", self.alpha_t));
        }
        if !(self.band_width > 0.0) {
            problems.push(format!("crack bandwidth must be positive, got {}", self.band_width));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMaterial(problems.join("; ")))
        }
    }

    /// A copy with tensile strength and both fracture energies reduced by
    /// `factor`; dependent strains are re-derived.
    pub fn weaken(&self, factor: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&factor) {
            return Err(Error::InvalidMaterial(format!(
                "weakening factor must lie in [0, 1), got {factor}"
            )));
        }
        let keep = 1.0 - factor;
        let mut law = self.clone();
        law.f_t_peak *= keep;
        law.f_t_crack *= keep;
        law.g_f *= keep;
        law.g_c *= keep;
        law.rederive();
        law.validate()?;
        Ok(law)
    }

    /// A copy regularized for crack bandwidth `h` (mm).
    pub fn with_band_width(&self, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidMaterial(format!("crack bandwidth must be positive, got {h}")));
        }
        let mut law = self.clone();
        law.band_width = h;
        law.rederive();
        law.validate()?;
        Ok(law)
    }

    /// Left side of the tensile energy identity, H times the area under the
    /// softening branch plus the elastic term. Equals G_f.
    pub fn tension_energy(&self) -> f64 {
        self.band_width
            * (0.5 * self.f_t_peak * (self.eps_t_ult - self.eps_t_loc)
                + self.f_t_peak * self.f_t_peak / (2.0 * self.e_c))
    }

    /// Left side of the compressive energy identity. Equals G_c.
    pub fn compression_energy(&self) -> f64 {
        self.band_width
            * (0.5 * (self.f_c + self.f_res) * (self.eps_c_peak - self.eps_c_ult)
                + (self.f_c * self.f_c - self.f_res * self.f_res) / (2.0 * self.e_c))
    }

    /// Tensile envelope stress for `eps >= 0` (negative input is treated as 0).
    pub fn tension_stress(&self, eps: f64) -> f64 {
        self.tension(eps).0
    }

    /// Tensile envelope stress and slope.
    pub fn tension(&self, eps: f64) -> (f64, f64) {
        if eps <= 0.0 {
            (0.0, self.e_c)
        } else if eps <= self.eps_t_crack {
            (self.e_c * eps, self.e_c)
        } else if eps <= self.eps_t_loc {
            let slope = (self.f_t_peak - self.f_t_crack) / (self.eps_t_loc - self.eps_t_crack);
            (self.f_t_crack + (eps - self.eps_t_crack) * slope, slope)
        } else if eps <= self.eps_t_ult {
            let span = self.eps_t_ult - self.eps_t_loc;
            ((self.eps_t_ult - eps) / span * self.f_t_peak, -self.f_t_peak / span)
        } else {
            (0.0, 0.0)
        }
    }

    /// Compressive envelope stress (<= 0) for `eps <= 0`.
    pub fn compression_stress(&self, eps: f64) -> f64 {
        self.compression(eps).0
    }

    /// Compressive envelope stress and slope dσ/dε.
    pub fn compression(&self, eps: f64) -> (f64, f64) {
        let (e_h, e_p, e_u) = (self.eps_c_half, self.eps_c_peak, self.eps_c_ult);
        if eps >= 0.0 {
            (0.0, self.e_c)
        } else if eps >= e_h {
            (self.e_c * eps, self.e_c)
        } else if eps >= e_p {
            let k1 = (e_p - e_h) / e_h;
            let k2 = (2.0 * e_h - e_p) / e_h;
            let span = e_p - e_h;
            let t = (eps - e_h) / span;
            let stress = -0.5 * self.f_c * (1.0 + k1 * t + k2 * t * t);
            let slope = -0.5 * self.f_c * (k1 + 2.0 * k2 * t) / span;
            (stress, slope)
        } else if eps >= e_u {
            let span = e_u - e_p;
            let stress = -self.f_res + (e_u - eps) / span * (self.f_res - self.f_c);
            (stress, (self.f_c - self.f_res) / span)
        } else if eps >= 51.0 * e_u {
            (-self.f_res * (51.0 * e_u - eps) / (50.0 * e_u), self.f_res / (50.0 * e_u))
        } else {
            (0.0, 0.0)
        }
    }

    /// Signed envelope: tension for positive strain, compression otherwise.
    pub fn envelope(&self, eps: f64) -> (f64, f64) {
        if eps >= 0.0 {
            self.tension(eps)
        } else {
            self.compression(eps)
        }
    }

    /// Strain beyond which the compressive tail carries no stress.
    pub fn compression_zero_strain(&self) -> f64 {
        51.0 * self.eps_c_ult
    }

    /// Compressive strain where the post-peak stress magnitude has dropped to
    /// 85% of f_c'.
    pub fn crushing_strain(&self) -> f64 {
        let target = CRUSHING_FRACTION * self.f_c;
        if self.f_res < target {
            let r = (target - self.f_res) / (self.f_c - self.f_res);
            let s = 1.0 - r;
            // descending branch runs from eps_c_peak (s = 0) to eps_c_ult (s = 1)
            self.eps_c_peak + s * (self.eps_c_ult - self.eps_c_peak)
        } else {
            // residual plateau already below 85%: crossing lies on the tail
            51.0 * self.eps_c_ult - 50.0 * self.eps_c_ult * target / self.f_res
        }
    }

    fn onset_stresses(&self) -> (f64, f64) {
        match self.damage_onset {
            DamageOnset::Strengths => (self.f_t_crack, self.f_c),
            DamageOnset::Fixed { tension, compression } => (tension, compression),
        }
    }

    /// Damage scalar for an inelastic strain magnitude.
    pub fn damage(&self, eps_in: f64, mode: DamageMode) -> f64 {
        let (sigma_t, sigma_c) = self.onset_stresses();
        let (alpha, sigma0) = match mode {
            DamageMode::Tension => (self.alpha_t, sigma_t),
            DamageMode::Compression => (self.alpha_c, sigma_c),
        };
        damage_parameter(alpha, self.e_c, sigma0, eps_in)
    }

    /// Steel fiber length (mm) when known.
    pub fn fiber_length(&self) -> Option<f64> {
        self.fiber.and_then(|f| f.l_f)
    }
}

/// Loading direction for the damage law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DamageMode {
    Tension,
    Compression,
}

/// d = (1-α)·ε_in·E / (σ0 + (1-α)·ε_in·E).
pub fn damage_parameter(alpha: f64, e_c: f64, sigma0: f64, eps_in: f64) -> f64 {
    let x = (1.0 - alpha) * eps_in.max(0.0) * e_c;
    if x == 0.0 {
        0.0
    } else {
        x / (sigma0 + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fang() -> UhpcLaw {
        UhpcLaw::derive(&MaterialRecord {
            e_c: Some(53_800.0),
            f_c: Some(140.6),
            f_t_p: Some(9.2),
            eps_t_p: Some(0.0025),
            g_f: Some(16.6),
            g_c: Some(126.5),
            ..Default::default()
        })
        .unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn tension_knots() {
        let law = fang();
        assert_eq!(law.tension_stress(0.0), 0.0);
        assert!(close(law.tension_stress(law.eps_t_loc), law.f_t_peak, 1e-12));
        let mid = 0.5 * (law.eps_t_loc + law.eps_t_ult);
        assert!(close(law.tension_stress(mid), 0.5 * law.f_t_peak, 1e-12));
        assert!(close(law.tension_stress(law.eps_t_crack), 8.74, 1e-12));
        assert_eq!(law.tension_stress(law.eps_t_ult * 1.5), 0.0);
    }

    #[test]
    fn compression_knots() {
        let law = fang();
        assert!(close(law.compression_stress(law.eps_c_half), -0.5 * law.f_c, 1e-12));
        assert!(close(law.compression_stress(law.eps_c_peak), -law.f_c, 1e-12));
        assert!(close(law.compression_stress(law.eps_c_ult), -law.f_res, 1e-12));
        assert!(close(law.compression_stress(2.0 * law.eps_c_ult), -0.98 * law.f_res, 1e-12));
        assert_eq!(law.compression_stress(52.0 * law.eps_c_ult), 0.0);
    }

    #[test]
    fn estimators() {
        let g = fracture_energy_from_fibers(0.02, 65.0);
        assert!(close(g, 16.64384, 1e-12));
        let law = UhpcLaw::derive(&MaterialRecord {
            f_c: Some(140.6),
            e_c: Some(53_800.0),
            f_t_p: Some(9.2),
            v_f: Some(0.02),
            l_f: Some(13.0),
            d_f: Some(0.2),
            ..Default::default()
        })
        .unwrap();
        assert!((law.g_c - 126.5).abs() < 0.05);
        assert!((law.eps_c_peak + 0.003492).abs() < 5e-7);
        assert!(close(law.g_f, 16.64384, 1e-12));
        let e = modulus_from_strength(173.0);
        assert!((e - 48_398.0).abs() / 48_398.0 < 1e-3);
    }

    #[test]
    fn measured_modulus_wins() {
        let law = UhpcLaw::derive(&MaterialRecord {
            e_c: Some(43_400.0),
            f_c: Some(173.0),
            f_t_p: Some(10.4),
            eps_t_p: Some(0.005),
            g_f: Some(16.6),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(law.e_c, 43_400.0);
    }

    #[test]
    fn snap_back_is_rejected() {
        let err = UhpcLaw::derive(&MaterialRecord {
            f_c: Some(150.0),
            f_t_p: Some(10.0),
            g_f: Some(0.05),
            h: Some(50.0),
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMaterial(ref m) if m.contains("snap-back")));
    }

    #[test]
    fn missing_strength_is_rejected() {
        assert!(UhpcLaw::derive(&MaterialRecord { f_t_p: Some(9.0), g_f: Some(10.0), ..Default::default() }).is_err());
        assert!(UhpcLaw::derive(&MaterialRecord { f_c: Some(150.0), f_t_p: Some(9.0), ..Default::default() }).is_err());
    }

    #[test]
    fn weakening() {
        let law = fang();
        assert_eq!(law.weaken(0.0).unwrap(), law);
        let weak = law.weaken(0.15).unwrap();
        assert!(close(weak.f_t_peak, 7.82, 1e-12));
        assert!(close(weak.g_f, 14.11, 1e-12));
        assert!(close(weak.tension_energy(), weak.g_f, 1e-10));
        assert!(close(weak.compression_energy(), weak.g_c, 1e-10));
        assert!(law.weaken(1.0).is_err());
    }

    #[test]
    fn damage_values() {
        assert_eq!(damage_parameter(0.7, 45_000.0, 9.0, 0.0), 0.0);
        assert!(close(damage_parameter(0.7, 45_000.0, 9.0, 0.002), 0.75, 1e-12));
        let law = fang();
        let d1 = law.damage(1e-4, DamageMode::Tension);
        let d2 = law.damage(2e-4, DamageMode::Tension);
        assert!(d2 > d1 && d2 < 1.0);
    }

    #[test]
    fn crushing_strain_on_descending_branch() {
        let law = fang();
        let eps = law.crushing_strain();
        assert!(eps < law.eps_c_peak && eps > law.eps_c_ult);
        assert!(close(law.compression_stress(eps), -0.85 * law.f_c, 1e-12));
    }

    #[test]
    fn derive_round_trips() {
        let law = fang();
        assert_eq!(UhpcLaw::derive(&law.to_record()).unwrap(), law);
    }
}
