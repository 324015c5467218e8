//! On-disk formats: JSON coefficient files and comma-delimited sample files.
//!
//! Numbers are written with 17 significant digits so that a write/read
//! cycle reproduces every `f64` exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::decomposition::{ScalarExpansion, VshExpansion};
use crate::quadrature::{FieldSamples, SphereGrid};
use crate::sphharm::{HarmonicIndex, UnitVector};
use crate::vsh::VshFamily;
use crate::{Error, Result, Vec3};

/// Basis convention tag carried by every coefficient file.
pub const CONVENTION: &str = "real-orthonormal-4pi";

/// Coefficients below this fraction of the largest one are not written.
pub const DROP_RELATIVE: f64 = 1e-14;

/// Node norms must be within this of 1 in sample files.
pub const NODE_TOLERANCE: f64 = 1e-9;

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn format_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Vector,
    Scalar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record<V> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    l: usize,
    m: i32,
    value: V,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document<V> {
    band_limit: usize,
    convention: String,
    kind: Kind,
    coefficients: Vec<Record<V>>,
}

/// Contents of a coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Vector(VshExpansion),
    Scalar(ScalarExpansion),
}

impl Coefficients {
    pub fn kind(&self) -> Kind {
        match self {
            Coefficients::Vector(_) => Kind::Vector,
            Coefficients::Scalar(_) => Kind::Scalar,
        }
    }

    pub fn into_vector(self, path: &Path) -> Result<VshExpansion> {
        match self {
            Coefficients::Vector(v) => Ok(v),
            Coefficients::Scalar(_) => Err(format_error(path, "expected vector coefficients, found kind \"scalar\"")),
        }
    }
}

fn raw(v: f64) -> Box<RawValue> {
    RawValue::from_string(format_number(v)).expect("formatted float is valid JSON")
}

fn kept(values: impl Iterator<Item = f64>) -> impl Fn(f64) -> bool {
    let largest = values.map(f64::abs).fold(0.0, f64::max);
    move |a| a != 0.0 && a.abs() > DROP_RELATIVE * largest
}

/// Serialized document, with records ordered by `(family, l, m)`.
pub fn coefficients_to_string(c: &Coefficients) -> String {
    let (band_limit, records) = match c {
        Coefficients::Vector(e) => {
            let keep = kept(e.iter().map(|(_, _, a)| a));
            let mut records: Vec<_> = e.iter().filter(|(_, _, a)| keep(*a)).collect();
            records.sort_by_key(|(f, i, _)| (*f, i.degree(), i.order()));
            let records = records
                .into_iter()
                .map(|(f, i, a)| Record {
                    family: Some(f.symbol().to_string()),
                    l: i.degree(),
                    m: i.order(),
                    value: raw(a),
                })
                .collect();
            (e.band_limit(), records)
        }
        Coefficients::Scalar(e) => {
            let keep = kept(e.iter().map(|(_, a)| a));
            let records = e
                .iter()
                .filter(|(_, a)| keep(*a))
                .map(|(i, a)| Record {
                    family: None,
                    l: i.degree(),
                    m: i.order(),
                    value: raw(a),
                })
                .collect();
            (e.band_limit(), records)
        }
    };
    let doc = Document {
        band_limit,
        convention: CONVENTION.to_string(),
        kind: c.kind(),
        coefficients: records,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn parse_coefficients(text: &str, path: &Path) -> Result<Coefficients> {
    let doc: Document<f64> = serde_json::from_str(text).map_err(|e| format_error(path, e.to_string()))?;
    if doc.convention != CONVENTION {
        return Err(format_error(
            path,
            format!("basis convention {:?} is not {CONVENTION:?}", doc.convention),
        ));
    }
    let bad = |msg: String| format_error(path, msg);
    match doc.kind {
        Kind::Vector => {
            let mut e = VshExpansion::zeros(doc.band_limit);
            let mut seen = std::collections::HashSet::new();
            for r in &doc.coefficients {
                let family: VshFamily = r
                    .family
                    .as_deref()
                    .ok_or_else(|| bad(format!("record (l = {}, m = {}) has no family", r.l, r.m)))?
                    .parse()
                    .map_err(|e: Error| bad(e.to_string()))?;
                let idx = HarmonicIndex::new(r.l, r.m).map_err(|e| bad(e.to_string()))?;
                if !seen.insert((family, idx)) {
                    return Err(bad(format!("duplicate record {family} {idx}")));
                }
                check_value(r.value, path)?;
                e.set(family, idx, r.value).map_err(|e| bad(e.to_string()))?;
            }
            Ok(Coefficients::Vector(e))
        }
        Kind::Scalar => {
            let mut e = ScalarExpansion::zeros(doc.band_limit);
            let mut seen = std::collections::HashSet::new();
            for r in &doc.coefficients {
                if r.family.is_some() {
                    return Err(bad("scalar records carry no family".into()));
                }
                let idx = HarmonicIndex::new(r.l, r.m).map_err(|e| bad(e.to_string()))?;
                if !seen.insert(idx) {
                    return Err(bad(format!("duplicate record {idx}")));
                }
                check_value(r.value, path)?;
                e.set(idx, r.value).map_err(|e| bad(e.to_string()))?;
            }
            Ok(Coefficients::Scalar(e))
        }
    }
}

fn check_value(v: f64, path: &Path) -> Result<()> {
    if !v.is_finite() {
        return Err(format_error(path, format!("coefficient {v} is not finite")));
    }
    Ok(())
}

pub fn read_coefficients(path: &Path) -> Result<Coefficients> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_coefficients(&text, path)
}

pub fn write_coefficients(path: &Path, c: &Coefficients) -> Result<()> {
    fs::write(path, coefficients_to_string(c)).map_err(|e| io_error(path, e))
}

/// Quadrature grid with optional field values, as stored in a sample file.
#[derive(Debug, Clone)]
pub struct SampleTable {
    pub nodes: Vec<UnitVector>,
    pub weights: Vec<f64>,
    pub values: Option<Vec<Vec3>>,
}

impl SampleTable {
    pub fn from_grid(grid: &SphereGrid, values: Option<&FieldSamples>) -> Self {
        Self {
            nodes: grid.nodes().to_vec(),
            weights: grid.weights().to_vec(),
            values: values.map(|v| v.values().to_vec()),
        }
    }

    /// Builds the grid, measuring its exactness up to `probe_degree`.
    pub fn grid(&self, probe_degree: usize) -> Result<SphereGrid> {
        SphereGrid::from_parts(self.nodes.clone(), self.weights.clone(), probe_degree)
    }

    pub fn samples(&self, path: &Path) -> Result<FieldSamples> {
        self.values
            .clone()
            .map(FieldSamples::new)
            .ok_or_else(|| format_error(path, "sample file carries no field columns"))
    }
}

pub fn write_samples<W: Write>(out: W, table: &SampleTable) -> Result<()> {
    let to_err = |e: csv::Error| Error::Io {
        path: "<output>".into(),
        message: e.to_string(),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let header = ["# eta1", "eta2", "eta3", "weight", "f1", "f2", "f3"];
    let width = if table.values.is_some() { 7 } else { 4 };
    w.write_record(&header[..width]).map_err(to_err)?;
    for (k, (e, wt)) in table.nodes.iter().zip(&table.weights).enumerate() {
        let mut row: Vec<String> = e.iter().chain(std::iter::once(wt)).map(|v| format_number(*v)).collect();
        if let Some(vals) = &table.values {
            row.extend(vals[k].iter().map(|v| format_number(*v)));
        }
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<output>".into(),
        message: e.to_string(),
    })
}

pub fn parse_samples<R: std::io::Read>(input: R, path: &Path) -> Result<SampleTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut values = Vec::new();
    let mut width = None;
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format_error(path, e.to_string()))?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| format_error(path, format!("row {}: {e}", line + 1)))?;
        if row.len() != 4 && row.len() != 7 {
            return Err(format_error(
                path,
                format!("row {}: expected 4 or 7 columns, got {}", line + 1, row.len()),
            ));
        }
        if *width.get_or_insert(row.len()) != row.len() {
            return Err(format_error(path, format!("row {}: column count changes", line + 1)));
        }
        let v = Vec3::new(row[0], row[1], row[2]);
        if !((v.norm() - 1.0).abs() <= NODE_TOLERANCE) {
            return Err(format_error(
                path,
                format!("row {}: node norm {} is not 1 within {NODE_TOLERANCE:e}", line + 1, v.norm()),
            ));
        }
        if !(row[3] > 0.0) {
            return Err(format_error(path, format!("row {}: weight {} is not positive", line + 1, row[3])));
        }
        if row[4..].iter().any(|x| !x.is_finite()) {
            return Err(format_error(path, format!("row {}: non-finite value", line + 1)));
        }
        nodes.push(UnitVector::normalize(v)?);
        weights.push(row[3]);
        if row.len() == 7 {
            values.push(Vec3::new(row[4], row[5], row[6]));
        }
    }
    if nodes.is_empty() {
        return Err(format_error(path, "no sample rows"));
    }
    Ok(SampleTable {
        nodes,
        weights,
        values: (width == Some(7)).then_some(values),
    })
}

pub fn read_samples(path: &Path) -> Result<SampleTable> {
    let f = fs::File::open(path).map_err(|e| io_error(path, e))?;
    parse_samples(f, path)
}

/// Points, one `x,y,z` row each, `#` comments allowed.
pub fn read_points(path: &Path) -> Result<Vec<Vec3>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| parse_point(l).map_err(|e| format_error(path, format!("line {}: {e}", k + 1))))
        .collect()
}

/// `"x,y,z"`.
pub fn parse_point(s: &str) -> std::result::Result<Vec3, String> {
    let parts = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Vec3::new(x, y, z)),
        _ => Err(format!("expected three finite comma-separated numbers, got {s:?}")),
    }
}
