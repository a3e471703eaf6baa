//! Beam database rows: CSV ingestion, validation and conversion to beams.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::{FailureMode, OmegaInputs};
use crate::error::{Error, Result};
use crate::materials::RebarLaw;
use crate::section::{BeamFile, BeamSpec, RebarKind};

pub const HEADER: &str =
    "name,type,f_t,A_s,f_s_loc,f_su,A_p,f_con,f_p_loc,f_pu,d,h,b_w,omega_ref,mu_ref,mode_ref,source,geometry_file";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionType {
    I,
    T,
    R,
    Box,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Numerical,
    Experimental,
}

/// One database row. Areas in mm², stresses in MPa, lengths in mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamRecord {
    pub name: String,
    #[serde(rename = "type")]
    pub section_type: SectionType,
    pub f_t: f64,
    #[serde(rename = "A_s")]
    pub a_s: f64,
    pub f_s_loc: f64,
    pub f_su: f64,
    #[serde(rename = "A_p")]
    pub a_p: f64,
    pub f_con: f64,
    pub f_p_loc: f64,
    pub f_pu: f64,
    pub d: f64,
    pub h: f64,
    pub b_w: f64,
    pub omega_ref: Option<f64>,
    pub mu_ref: Option<f64>,
    pub mode_ref: FailureMode,
    pub source: Source,
    pub geometry_file: Option<String>,
}

impl BeamRecord {
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        let non_negative = [
            ("f_t", self.f_t),
            ("A_s", self.a_s),
            ("f_s_loc", self.f_s_loc),
            ("f_su", self.f_su),
            ("A_p", self.a_p),
            ("f_con", self.f_con),
            ("f_p_loc", self.f_p_loc),
            ("f_pu", self.f_pu),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                p.push(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        for (name, v) in [("d", self.d), ("h", self.h), ("b_w", self.b_w)] {
            if !(v.is_finite() && v > 0.0) {
                p.push(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.f_t > 0.0) {
            p.push("f_t must be positive".into());
        }
        if self.a_s > 0.0 && !(self.f_su > 0.0 && self.f_s_loc > 0.0) {
            p.push("rows with mild steel need f_s_loc and f_su".into());
        }
        if self.a_p > 0.0 && !(self.f_pu > 0.0) {
            p.push("rows with strand need f_pu".into());
        }
        if self.name.trim().is_empty() {
            p.push("name is empty".into());
        }
        p
    }

    pub fn omega_inputs(&self, gamma: f64) -> OmegaInputs {
        OmegaInputs {
            f_t: self.f_t,
            f_s_loc: self.f_s_loc,
            f_su: self.f_su,
            a_s: self.a_s,
            f_pu: self.f_pu,
            f_p_loc: self.f_p_loc,
            a_p: self.a_p,
            b_w: self.b_w,
            d: self.d,
            h: self.h,
            gamma,
        }
    }

    /// Beam built from a geometry file with this row's reinforcement,
    /// strengths and web width. The effective prestress is taken as f_con.
    pub fn to_spec(&self, geometry: &BeamFile) -> Result<BeamSpec> {
        let mut file = geometry.clone();
        file.name = self.name.clone();
        file.uhpc.f_t_p = Some(self.f_t);
        let mut layers = Vec::new();
        for mut l in file.layers.drain(..) {
            match l.kind {
                RebarKind::Mild if self.a_s > 0.0 => {
                    l.area = self.a_s;
                    l.material.f_y = Some(self.f_s_loc);
                    l.material.f_su = Some(self.f_su);
                    layers.push(l);
                }
                RebarKind::Strand if self.a_p > 0.0 => {
                    let ratio = match (l.material.f_py, l.material.f_pu) {
                        (Some(py), Some(pu)) => py / pu,
                        _ => 0.90,
                    };
                    l.area = self.a_p;
                    l.material.f_pu = Some(self.f_pu);
                    l.material.f_py = Some(ratio * self.f_pu);
                    l.f_pe = self.f_con;
                    layers.push(l);
                }
                _ => {}
            }
        }
        file.layers = layers;
        let spec = file.to_spec()?;
        if (spec.section.web_width() - self.b_w).abs() > 1e-9 {
            let section = spec.section.with_web_width(self.b_w)?;
            let spec = spec.with_section(section);
            spec.validate()?;
            return Ok(spec);
        }
        Ok(spec)
    }

    /// Row describing a beam, with the localization stresses supplied.
    pub fn from_spec(spec: &BeamSpec, f_s_loc: f64, f_p_loc: f64, mode_ref: FailureMode) -> Self {
        let mut r = BeamRecord {
            name: spec.name.clone(),
            section_type: SectionType::R,
            f_t: spec.uhpc.f_t_peak,
            a_s: 0.0,
            f_s_loc,
            f_su: 0.0,
            a_p: 0.0,
            f_con: 0.0,
            f_p_loc,
            f_pu: 0.0,
            d: spec.effective_depth().unwrap_or(spec.section.h),
            h: spec.section.h,
            b_w: spec.section.web_width(),
            omega_ref: None,
            mu_ref: None,
            mode_ref,
            source: Source::Numerical,
            geometry_file: None,
        };
        for l in &spec.layers {
            match l.law {
                RebarLaw::Mild(s) => {
                    r.a_s += l.area;
                    r.f_su = s.f_su;
                }
                RebarLaw::Strand(p) => {
                    r.a_p += l.area;
                    r.f_pu = p.f_pu;
                    r.f_con = l.f_pe;
                }
            }
        }
        r
    }
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    let column = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.field().map_or(String::new(), |f| {
            HEADER.split(',').nth(f as usize).unwrap_or_default().to_string()
        }),
        _ => String::new(),
    };
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => e.to_string(),
    };
    Error::Parse { row, column, message }
}

/// Parses and validates rows. Row numbers in errors are file line numbers.
pub fn parse_database<R: Read>(reader: R) -> Result<Vec<BeamRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() {
        return Err(Error::Parse { row: 1, column: String::new(), message: "empty file".into() });
    }
    let joined = header.iter().collect::<Vec<_>>().join(",");
    if joined != HEADER {
        return Err(Error::Parse {
            row: 1,
            column: String::new(),
            message: format!("header must be exactly '{HEADER}', found '{joined}'"),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize::<BeamRecord>() {
        let rec = rec.map_err(csv_error)?;
        let problems = rec.problems();
        if !problems.is_empty() {
            return Err(Error::Validation { row: out.len() + 2, name: rec.name, problems });
        }
        out.push(rec);
    }
    if out.is_empty() {
        return Err(Error::Parse { row: 2, column: String::new(), message: "no data rows".into() });
    }
    Ok(out)
}

pub fn load_database(path: impl AsRef<Path>) -> Result<Vec<BeamRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_database(file)
}

pub fn write_database<W: Write>(records: &[BeamRecord], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<writer>".into(), message: e.to_string() })
}

/// Resolves a row's geometry file against the data directory.
pub fn geometry_path(record: &BeamRecord, data_dir: &Path) -> Option<PathBuf> {
    record.geometry_file.as_ref().map(|g| {
        let p = Path::new(g);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            data_dir.join(p)
        }
    })
}

/// Printed strength comparison row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthRow {
    pub name: String,
    pub m_loc_cal: f64,
    pub m_loc_num: f64,
    pub loc_ratio: f64,
    pub m_u_cal: f64,
    pub m_u_num: f64,
    pub u_ratio: f64,
    pub m_u_fhwa: f64,
    pub fhwa_ratio: f64,
}

pub fn load_strength_table(path: impl AsRef<Path>) -> Result<Vec<StrengthRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    rdr.deserialize().map(|r| r.map_err(csv_error)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW: &str = "M2@16-P10@15.2-Re,I,9,402.2,485,635,1400,1395,1664.0,1942,820.0,900,130,0.50,1.26,CL,numerical,fang_i_girder.json";

    #[test]
    fn parses_one_row() {
        let text = format!("{HEADER}\n{ROW}\n");
        let rows = parse_database(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mode_ref, FailureMode::CrackLocalization);
        assert_eq!(rows[0].geometry_file.as_deref(), Some("fang_i_girder.json"));
    }

    #[test]
    fn empty_file_is_parse_error() {
        assert!(matches!(parse_database("".as_bytes()), Err(Error::Parse { .. })));
        assert!(matches!(parse_database(format!("{HEADER}\n").as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn negative_area_names_row() {
        let bad = ROW.replace(",402.2,", ",-402.2,");
        let err = parse_database(format!("{HEADER}\n{bad}\n").as_bytes()).unwrap_err();
        match err {
            Error::Validation { row, name, problems } => {
                assert_eq!(row, 2);
                assert_eq!(name, "M2@16-P10@15.2-Re");
                assert!(problems[0].contains("A_s"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_header_rejected() {
        let text = format!("{}\n{ROW}\n", HEADER.replace("f_t", "ft"));
        assert!(matches!(parse_database(text.as_bytes()), Err(Error::Parse { row: 1, .. })));
    }

    #[test]
    fn round_trip() {
        let rows = parse_database(format!("{HEADER}\n{ROW}\n").as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_database(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with(HEADER));
        assert_eq!(parse_database(buf.as_slice()).unwrap(), rows);
    }
}
