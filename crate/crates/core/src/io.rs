//! Point-set text format.
//!
//! Layout: line 1 is `d N`; the next N lines carry d whitespace-separated
//! decimal floats each, printed with 17 significant digits. Antipodal files
//! store only the d representatives (N = d) and are marked by a leading
//! comment line `# antipodal-representatives`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use crate::error::{CrossError, Result};
use crate::geom::{normalize, AntipodalConfig, GenericConfig, UnitVector};

pub const ANTIPODAL_HEADER: &str = "# antipodal-representatives";

/// A parsed point file: either a full generic configuration or the
/// representatives of an antipodal one.
#[derive(Debug, Clone)]
pub enum PointFile {
    Generic(GenericConfig),
    Antipodal(AntipodalConfig),
}

impl PointFile {
    /// The file's points as a generic configuration (antipodal files are
    /// expanded to the full 2d-point set).
    pub fn as_generic(&self) -> GenericConfig {
        match self {
            PointFile::Generic(g) => g.clone(),
            PointFile::Antipodal(a) => a.into(),
        }
    }

    pub fn as_antipodal(&self) -> Option<&AntipodalConfig> {
        match self {
            PointFile::Antipodal(a) => Some(a),
            PointFile::Generic(_) => None,
        }
    }
}

pub fn parse_points(text: &str) -> Result<PointFile> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut first = lines
        .next()
        .ok_or_else(|| CrossError::Parse("empty file".into()))?;
    let antipodal = first.trim() == ANTIPODAL_HEADER;
    if antipodal {
        first = lines
            .next()
            .ok_or_else(|| CrossError::Parse("missing `d N` header".into()))?;
    } else if first.trim_start().starts_with('#') {
        return Err(CrossError::Parse(format!("unknown header comment: {first}")));
    }

    let header: Vec<&str> = first.split_whitespace().collect();
    if header.len() != 2 {
        return Err(CrossError::Parse(format!("expected `d N`, got: {first}")));
    }
    let d: usize = header[0]
        .parse()
        .map_err(|_| CrossError::Parse(format!("bad dimension: {}", header[0])))?;
    let n: usize = header[1]
        .parse()
        .map_err(|_| CrossError::Parse(format!("bad point count: {}", header[1])))?;
    if antipodal && n != d {
        return Err(CrossError::Parse(format!(
            "antipodal file must have N = d, got d = {d}, N = {n}"
        )));
    }

    let mut points = Vec::with_capacity(n);
    for (k, line) in lines.enumerate() {
        if k >= n {
            return Err(CrossError::Parse("more points than declared".into()));
        }
        let coords: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse).collect();
        let coords =
            coords.map_err(|e| CrossError::Parse(format!("line {}: {e}", k + 2)))?;
        if coords.len() != d {
            return Err(CrossError::Parse(format!(
                "line {}: expected {d} coordinates, got {}",
                k + 2,
                coords.len()
            )));
        }
        points.push(normalize(&DVector::from_vec(coords))?);
    }
    if points.len() != n {
        return Err(CrossError::Parse(format!(
            "declared {n} points, found {}",
            points.len()
        )));
    }

    if antipodal {
        Ok(PointFile::Antipodal(AntipodalConfig::new(points)?))
    } else {
        Ok(PointFile::Generic(GenericConfig::new(points)?))
    }
}

pub fn read_points(path: &Path) -> Result<PointFile> {
    parse_points(&std::fs::read_to_string(path)?)
}

fn format_rows(out: &mut String, d: usize, points: &[UnitVector], header: Option<&str>) {
    if let Some(h) = header {
        out.push_str(h);
        out.push('\n');
    }
    let _ = writeln!(out, "{d} {}", points.len());
    for p in points {
        let row: Vec<String> = p.coords().iter().map(|c| format!("{c:.16e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn format_generic(cfg: &GenericConfig) -> String {
    let mut out = String::new();
    format_rows(&mut out, cfg.dim(), cfg.points(), None);
    out
}

pub fn format_antipodal(cfg: &AntipodalConfig) -> String {
    let mut out = String::new();
    format_rows(
        &mut out,
        cfg.dim(),
        cfg.representatives(),
        Some(ANTIPODAL_HEADER),
    );
    out
}

pub fn write_generic(path: &Path, cfg: &GenericConfig) -> Result<()> {
    Ok(std::fs::write(path, format_generic(cfg))?)
}

pub fn write_antipodal(path: &Path, cfg: &AntipodalConfig) -> Result<()> {
    Ok(std::fs::write(path, format_antipodal(cfg))?)
}
