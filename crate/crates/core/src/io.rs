//! JSON and CSV forms of sampled curves, chains and frame dumps.
//!
//! Numbers are written in shortest round-trip decimal, so reading a file
//! back reproduces every sample bit for bit. CSV files carry the curve
//! metadata on a leading `# meta: {...}` comment line.

use crate::curve::{CurveMeta, SampledCurve};
use crate::error::{Error, Result};
use crate::frames::FrenetData;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

const META_PREFIX: &str = "# meta: ";

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
///
/// ```
/// use kslant::io::fmt_num;
/// assert_eq!(fmt_num(0.25), "0.25");
/// assert_eq!(fmt_num(1.5e-17), "1.5e-17");
/// assert_eq!(fmt_num(-0.0), "-0");
/// ```
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Output encodings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    /// Guesses the format from a file extension (JSON unless `.csv`).
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

pub fn curve_to_json(curve: &SampledCurve) -> Result<String> {
    Ok(serde_json::to_string_pretty(curve)? + "\n")
}

pub fn chain_to_json(levels: &[SampledCurve]) -> Result<String> {
    Ok(serde_json::to_string_pretty(levels)? + "\n")
}

/// Reads a single curve or a chain (array) of curves.
pub fn curves_from_json(text: &str) -> Result<Vec<SampledCurve>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let curves: Vec<SampledCurve> = if value.is_array() {
        serde_json::from_value(value)?
    } else {
        vec![serde_json::from_value(value)?]
    };
    if curves.is_empty() {
        return Err(Error::Format("empty chain".into()));
    }
    for c in &curves {
        c.validate()?;
    }
    Ok(curves)
}

fn parameter_name(meta: &CurveMeta) -> &str {
    if meta.parameter.is_empty() {
        "t"
    } else {
        &meta.parameter
    }
}

fn write_meta(out: &mut Vec<u8>, meta: &CurveMeta) -> Result<()> {
    writeln!(out, "{META_PREFIX}{}", serde_json::to_string(meta)?).map_err(Error::from)
}

/// CSV with header `t,x,y,z` (or `s,x,y,z` for arc-length parameters).
pub fn curve_to_csv(curve: &SampledCurve) -> Result<String> {
    let mut buf = Vec::new();
    write_meta(&mut buf, &curve.meta)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record([parameter_name(&curve.meta), "x", "y", "z"])?;
        for (t, p) in curve.grid.iter().zip(&curve.points) {
            w.write_record([fmt_num(*t), fmt_num(p[0]), fmt_num(p[1]), fmt_num(p[2])])?;
        }
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// CSV with the frame columns `T_x..B_z,kappa,tau` appended. N, B and τ
/// are left empty at inflection points, and every frame column is empty
/// where the frame is undefined (`None`, e.g. at a cusp).
pub fn frames_to_csv(curve: &SampledCurve, frames: &[Option<FrenetData>]) -> Result<String> {
    if frames.len() != curve.grid.len() {
        return Err(Error::Format(format!("{} frames for {} samples", frames.len(), curve.grid.len())));
    }
    let mut buf = Vec::new();
    write_meta(&mut buf, &curve.meta)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let mut header = vec![parameter_name(&curve.meta).to_string(), "x".into(), "y".into(), "z".into()];
        for v in ["T", "N", "B"] {
            for c in ["x", "y", "z"] {
                header.push(format!("{v}_{c}"));
            }
        }
        header.push("kappa".into());
        header.push("tau".into());
        w.write_record(&header)?;
        for ((t, p), f) in curve.grid.iter().zip(&curve.points).zip(frames) {
            let mut row = vec![fmt_num(*t), fmt_num(p[0]), fmt_num(p[1]), fmt_num(p[2])];
            let vec3 = |v: Option<nalgebra::Vector3<f64>>| -> Vec<String> {
                match v {
                    Some(v) => v.iter().map(|x| fmt_num(*x)).collect(),
                    None => vec![String::new(); 3],
                }
            };
            match f {
                Some(f) => {
                    row.extend(vec3(Some(f.tangent)));
                    row.extend(vec3(f.normal));
                    row.extend(vec3(f.binormal));
                    row.push(fmt_num(f.kappa));
                    row.push(f.tau.map(fmt_num).unwrap_or_default());
                }
                None => row.extend(vec![String::new(); 11]),
            }
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// Reads the first four columns of a curve CSV; extra columns are ignored.
pub fn curve_from_csv(text: &str) -> Result<SampledCurve> {
    let mut meta = CurveMeta::default();
    let mut body = text;
    if let Some(rest) = text.strip_prefix(META_PREFIX) {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        meta = serde_json::from_str(line.trim_end())?;
        body = tail;
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(body.as_bytes());
    let header = r.headers()?.clone();
    if header.len() < 4 || &header[1] != "x" || &header[2] != "y" || &header[3] != "z" {
        return Err(Error::Format(format!("expected header `t,x,y,z`, got `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    meta.parameter = header[0].to_string();
    let mut grid = Vec::new();
    let mut points = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64> {
            rec.get(j)
                .ok_or_else(|| Error::Format(format!("row {}: missing column {j}", i + 1)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {}: {e}", i + 1)))
        };
        grid.push(num(0)?);
        points.push([num(1)?, num(2)?, num(3)?]);
    }
    SampledCurve::new(meta, grid, points)
}

/// Reads a curve file (JSON object, JSON array or CSV by extension).
pub fn read_curves(path: &Path) -> Result<Vec<SampledCurve>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    match Format::from_path(path) {
        Format::Csv => Ok(vec![curve_from_csv(&text)?]),
        Format::Json => curves_from_json(&text),
    }
}

/// Writes `contents` atomically: a temporary file in the target directory
/// is renamed over `path`, so a failed run never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}
