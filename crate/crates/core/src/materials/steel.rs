//! Mild-steel rebar (elastic, plateau, exponential hardening) and
//! prestressing strand (power-law) laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;

pub const DEFAULT_E_S: f64 = 200_000.0;
pub const DEFAULT_EPS_SH: f64 = 0.01;
pub const DEFAULT_EPS_SU: f64 = 0.08;
pub const DEFAULT_EPS_SF: f64 = 0.12;
/// Ultimate-to-yield ratio used when the ultimate stress is not supplied.
pub const DEFAULT_ULTIMATE_RATIO: f64 = 1.25;

pub const DEFAULT_E_PS: f64 = 195_000.0;
pub const GRADE_270_K: f64 = 1.0852;
pub const GRADE_270_Q: f64 = 0.00772;
pub const GRADE_270_N: f64 = 7.39;
pub const DEFAULT_EPS_PU: f64 = 0.04;
/// Nominal strand yield strain used by the ductility rule.
pub const STRAND_YIELD_STRAIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteelLaw {
    pub e_s: f64,
    pub f_y: f64,
    pub eps_y: f64,
    pub eps_sh: f64,
    pub f_su: f64,
    pub eps_su: f64,
    pub eps_sf: f64,
}

impl SteelLaw {
    pub fn new(e_s: f64, f_y: f64, f_su: f64, eps_sh: f64, eps_su: f64, eps_sf: f64) -> Result<Self> {
        let law = SteelLaw {
            e_s,
            f_y,
            eps_y: f_y / e_s,
            eps_sh,
            f_su,
            eps_su,
            eps_sf,
        };
        law.validate()?;
        Ok(law)
    }

    /// Law with the default modulus and strain limits.
    pub fn with_defaults(f_y: f64, f_su: Option<f64>) -> Result<Self> {
        Self::new(
            DEFAULT_E_S,
            f_y,
            f_su.unwrap_or(DEFAULT_ULTIMATE_RATIO * f_y),
            DEFAULT_EPS_SH,
            DEFAULT_EPS_SU,
            DEFAULT_EPS_SF,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.e_s > 0.0
            && self.f_y > 0.0
            && self.eps_y < self.eps_sh
            && self.eps_sh < self.eps_su
            && self.eps_su <= self.eps_sf
            && self.f_y < self.f_su;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMaterial(format!(
                "mild steel needs eps_y < eps_sh < eps_su <= eps_sf and f_y < f_su: {self:?}"
            )))
        }
    }

    /// Envelope stress for tensile strain, checked against the rupture strain.
    pub fn stress(&self, eps: f64) -> Result<f64> {
        if eps > self.eps_sf {
            return Err(Error::Ruptured { strain: eps, limit: self.eps_sf });
        }
        Ok(self.response(eps).0)
    }

    /// Unchecked envelope stress and slope; compression mirrors tension.
    pub fn response(&self, eps: f64) -> (f64, f64) {
        let sign = if eps < 0.0 { -1.0 } else { 1.0 };
        let e = eps.abs();
        let (s, t) = if e <= self.eps_y {
            (self.e_s * e, self.e_s)
        } else if e <= self.eps_sh {
            (self.f_y, 0.0)
        } else {
            let span = self.eps_su - self.eps_sh;
            let x = (e - self.eps_sh) / span;
            let gain = self.f_su / self.f_y - 1.0;
            let ex = (1.0 - x).exp();
            (
                self.f_y * (1.0 + x * gain * ex),
                self.f_y * gain * (1.0 - x) * ex / span,
            )
        };
        (sign * s, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrandLaw {
    pub e_ps: f64,
    pub f_py: f64,
    pub f_pu: f64,
    pub k: f64,
    pub q: f64,
    pub n: f64,
    pub eps_pu: f64,
}

impl StrandLaw {
    pub fn new(e_ps: f64, f_py: f64, f_pu: f64, k: f64, q: f64, n: f64, eps_pu: f64) -> Result<Self> {
        let law = StrandLaw { e_ps, f_py, f_pu, k, q, n, eps_pu };
        law.validate()?;
        Ok(law)
    }

    /// Grade 270 fit coefficients. `f_py` defaults to 0.90·f_pu and the
    /// modulus to 195 GPa.
    pub fn grade_270(f_pu: f64, f_py: Option<f64>, e_ps: Option<f64>) -> Result<Self> {
        Self::new(
            e_ps.unwrap_or(DEFAULT_E_PS),
            f_py.unwrap_or(0.90 * f_pu),
            f_pu,
            GRADE_270_K,
            GRADE_270_Q,
            GRADE_270_N,
            DEFAULT_EPS_PU,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.e_ps > 0.0
            && self.f_py > 0.0
            && self.f_py < self.f_pu
            && self.k * self.f_py <= self.f_pu
            && self.n > 0.0
            && (0.0..1.0).contains(&self.q)
            && self.eps_pu > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMaterial(format!(
                "strand needs f_py < f_pu, K·f_py <= f_pu and positive coefficients: {self:?}"
            )))
        }
    }

    /// Stress for tensile strain, checked against the rupture strain.
    pub fn stress(&self, eps: f64) -> Result<f64> {
        if eps > self.eps_pu {
            return Err(Error::Ruptured { strain: eps, limit: self.eps_pu });
        }
        Ok(self.response(eps).0)
    }

    /// Unchecked stress and slope; strands carry no compression.
    pub fn response(&self, eps: f64) -> (f64, f64) {
        if eps <= 0.0 {
            return (0.0, 0.0);
        }
        let x = self.e_ps * eps / (self.k * self.f_py);
        let xn = x.powf(self.n);
        let base = 1.0 + xn;
        let s = self.e_ps * eps * (self.q + (1.0 - self.q) / base.powf(1.0 / self.n));
        if s >= self.f_pu {
            (self.f_pu, 0.0)
        } else {
            let t = self.e_ps * (self.q + (1.0 - self.q) * base.powf(-1.0 / self.n - 1.0));
            (s, t)
        }
    }

    /// Strain at which the curve first reaches f_py.
    pub fn yield_strain(&self) -> f64 {
        roots::bisect(|e| self.response(e).0 - self.f_py, 0.0, self.eps_pu, 1e-14, 200)
            .unwrap_or(STRAND_YIELD_STRAIN)
    }
}
