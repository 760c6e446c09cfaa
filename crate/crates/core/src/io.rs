//! JSON file formats: rings (with optional twists), mass matrices, based
//! algebras and induction certificates.
//!
//! Twists are always written as exact `"p/q"` strings so that the twist
//! support of a mass matrix survives a roundtrip.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion_ring::{FusionRing, StructureError};
use crate::induction::InductionCertificate;
use crate::modular::ModularData;
use crate::repdecomp::BasedAlgebra;
use crate::search::MassMatrix;
use crate::twist::TwistData;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error in field '{field}': {message}")]
    Schema { field: String, message: String },
    #[error("structure error: {0}")]
    Structure(#[from] StructureError),
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn json_error(e: serde_json::Error) -> IoError {
    IoError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn index(field: &str, value: i64, len: usize) -> Result<usize, IoError> {
    if value < 0 || value as usize >= len {
        return Err(schema(
            field,
            format!("index {value} out of range 0..{len}"),
        ));
    }
    Ok(value as usize)
}

/// Parses `"p/q"` (or a bare integer `"0"`) in lowest terms with
/// `0 ≤ p/q < 1`.
pub fn parse_rational(field: &str, s: &str) -> Result<Rational64, IoError> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: i64 = p
        .parse()
        .map_err(|_| schema(field, format!("'{s}' is not a rational p/q")))?;
    let q: i64 = q
        .parse()
        .map_err(|_| schema(field, format!("'{s}' is not a rational p/q")))?;
    if q <= 0 {
        return Err(schema(field, format!("'{s}' has non-positive denominator")));
    }
    let r = Rational64::new_raw(p, q);
    let reduced = Rational64::new(p, q);
    if *reduced.numer() != p || *reduced.denom() != q {
        return Err(schema(field, format!("'{s}' is not in lowest terms")));
    }
    if r < Rational64::zero() || r >= Rational64::one() {
        return Err(schema(field, format!("'{s}' is outside [0, 1)")));
    }
    Ok(reduced)
}

pub fn format_rational(r: Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingFile {
    pub labels: Vec<String>,
    pub unit: i64,
    pub dual: Vec<i64>,
    pub fusion: Vec<[i64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twists: Option<Vec<String>>,
}

impl RingFile {
    pub fn from_model(ring: &FusionRing, twists: Option<&TwistData>) -> Self {
        Self {
            labels: ring.labels().to_vec(),
            unit: ring.unit() as i64,
            dual: ring.dual_map().iter().map(|&d| d as i64).collect(),
            fusion: ring
                .entries()
                .map(|((a, b, c), m)| [a as i64, b as i64, c as i64, i64::from(m)])
                .collect(),
            twists: twists.map(|t| t.exponents().iter().map(|&h| format_rational(h)).collect()),
        }
    }

    pub fn into_model(self) -> Result<(FusionRing, Option<TwistData>), IoError> {
        let n = self.labels.len();
        if n == 0 {
            return Err(schema("labels", "must be non-empty"));
        }
        let unit = index("unit", self.unit, n)?;
        let dual = self
            .dual
            .iter()
            .enumerate()
            .map(|(i, &d)| index(&format!("dual[{i}]"), d, n))
            .collect::<Result<Vec<_>, _>>()?;
        if dual.len() != n {
            return Err(schema(
                "dual",
                format!("has {} entries, expected {n}", dual.len()),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut entries = Vec::with_capacity(self.fusion.len());
        for (i, e) in self.fusion.iter().enumerate() {
            let field = format!("fusion[{i}]");
            let a = index(&field, e[0], n)?;
            let b = index(&field, e[1], n)?;
            let c = index(&field, e[2], n)?;
            if e[3] <= 0 {
                return Err(schema(
                    &field,
                    format!("multiplicity {} must be positive", e[3]),
                ));
            }
            if !seen.insert((a, b, c)) {
                return Err(schema(
                    &field,
                    format!("duplicate fusion key [{a}, {b}, {c}]"),
                ));
            }
            entries.push((a, b, c, e[3]));
        }
        let ring = FusionRing::new(self.labels, unit, dual, entries)?;
        let twists = match self.twists {
            None => None,
            Some(t) => {
                if t.len() != n {
                    return Err(schema(
                        "twists",
                        format!("has {} entries, expected {n}", t.len()),
                    ));
                }
                let h = t
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse_rational(&format!("twists[{i}]"), s))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(TwistData::new(h))
            }
        };
        Ok((ring, twists))
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"labels\": {},", compact(&self.labels));
        let _ = writeln!(out, "  \"unit\": {},", self.unit);
        let _ = write!(out, "  \"dual\": {},\n  \"fusion\": ", compact(&self.dual));
        out.push_str(&rows(&self.fusion, "  "));
        if let Some(t) = &self.twists {
            let _ = write!(out, ",\n  \"twists\": {}", compact(t));
        }
        out.push_str("\n}\n");
        out
    }
}

fn compact<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// A JSON array with one element per line.
fn rows<T: Serialize>(items: &[T], indent: &str) -> String {
    if items.is_empty() {
        return "[]".into();
    }
    let body: Vec<String> = items
        .iter()
        .map(|x| format!("{indent}  {}", compact(x)))
        .collect();
    format!("[\n{}\n{indent}]", body.join(",\n"))
}

pub fn parse_ring_str(text: &str) -> Result<(FusionRing, Option<TwistData>), IoError> {
    let file: RingFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_model()
}

pub fn parse_ring(path: &Path) -> Result<(FusionRing, Option<TwistData>), IoError> {
    parse_ring_str(&read_text(path)?)
}

pub fn write_ring(ring: &FusionRing, twists: Option<&TwistData>) -> String {
    RingFile::from_model(ring, twists).to_json()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagsJson {
    pub is_identity: bool,
    pub is_permutation: bool,
    pub is_symmetric: bool,
    pub type_one: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub s: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsJson {
    #[serde(rename = "trZ")]
    pub tr_z: u64,
    #[serde(rename = "trZZt")]
    pub tr_zzt: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantFile {
    pub size: usize,
    pub entries: Vec<[u64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<FlagsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountsJson>,
}

impl InvariantFile {
    pub fn from_mass(m: &MassMatrix) -> Self {
        let n = m.size();
        let entries = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&c| m.z[c] != 0)
            .map(|(a, b)| [a as u64, b as u64, u64::from(m.z[(a, b)])])
            .collect();
        let (tr_z, tr_zzt) = m.counts();
        Self {
            size: n,
            entries,
            flags: Some(FlagsJson {
                is_identity: m.flags.is_identity,
                is_permutation: m.flags.is_permutation,
                is_symmetric: m.flags.is_symmetric,
                type_one: m.flags.type_one.as_str().into(),
            }),
            residuals: Some(ResidualsJson {
                s: m.residuals.s,
                t: m.residuals.t,
            }),
            counts: Some(CountsJson { tr_z, tr_zzt }),
        }
    }

    pub fn matrix(&self) -> Result<DMatrix<u32>, IoError> {
        let n = self.size;
        let mut z = DMatrix::<u32>::zeros(n, n);
        let mut seen = std::collections::BTreeSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            let field = format!("entries[{i}]");
            let (a, b) = (e[0] as usize, e[1] as usize);
            if a >= n || b >= n {
                return Err(schema(&field, format!("index out of range 0..{n}")));
            }
            if !seen.insert((a, b)) {
                return Err(schema(&field, format!("duplicate entry [{a}, {b}]")));
            }
            z[(a, b)] = u32::try_from(e[2]).map_err(|_| schema(&field, "value too large"))?;
        }
        if n > 0 && z[(0, 0)] != 1 {
            return Err(schema("entries", "(0, 0, 1) must be present"));
        }
        Ok(z)
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = write!(out, "  \"size\": {},\n  \"entries\": ", self.size);
        out.push_str(&rows(&self.entries, "  "));
        if let Some(f) = &self.flags {
            let _ = write!(out, ",\n  \"flags\": {}", compact(f));
        }
        if let Some(r) = &self.residuals {
            let _ = write!(out, ",\n  \"residuals\": {}", compact(r));
        }
        if let Some(c) = &self.counts {
            let _ = write!(out, ",\n  \"counts\": {}", compact(c));
        }
        out.push_str("\n}");
        out
    }
}

pub fn parse_invariant(path: &Path) -> Result<DMatrix<u32>, IoError> {
    let file: InvariantFile = serde_json::from_str(&read_text(path)?).map_err(json_error)?;
    file.matrix()
}

/// All invariants as a JSON document.
pub fn invariants_json(labels: &[String], list: &[MassMatrix]) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"labels\": {},", compact(labels));
    let _ = writeln!(out, "  \"count\": {},", list.len());
    out.push_str("  \"invariants\": [");
    let body: Vec<String> = list
        .iter()
        .map(|m| {
            InvariantFile::from_mass(m)
                .to_json()
                .lines()
                .map(|l| format!("    {l}"))
                .collect::<Vec<_>>()
                .join("\n")
        })
        .collect();
    if body.is_empty() {
        out.push_str("]\n}\n");
    } else {
        let _ = write!(out, "\n{}\n  ]\n}}\n", body.join(",\n"));
    }
    out
}

/// CSV with a header row of labels.
pub fn matrix_csv(labels: &[String], z: &DMatrix<u32>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, ",{}", labels.join(","));
    for (a, label) in labels.iter().enumerate().take(z.nrows()) {
        let row: Vec<String> = z.row(a).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{label},{}", row.join(","));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub labels: Vec<String>,
    #[serde(default)]
    pub unit: Option<i64>,
    pub involution: Vec<i64>,
    pub structure: Vec<[i64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<f64>>,
}

impl AlgebraFile {
    pub fn from_algebra(alg: &BasedAlgebra) -> Self {
        Self {
            labels: alg.labels().to_vec(),
            unit: alg.unit().map(|u| u as i64),
            involution: alg.involution_map().iter().map(|&x| x as i64).collect(),
            structure: alg
                .entries()
                .map(|((a, b, c), m)| [a as i64, b as i64, c as i64, i64::from(m)])
                .collect(),
            dims: alg.dims().map(|d| d.to_vec()),
        }
    }

    pub fn into_algebra(self) -> Result<BasedAlgebra, IoError> {
        let n = self.labels.len();
        if n == 0 {
            return Err(schema("labels", "must be non-empty"));
        }
        let unit = self.unit.map(|u| index("unit", u, n)).transpose()?;
        let involution = self
            .involution
            .iter()
            .enumerate()
            .map(|(i, &d)| index(&format!("involution[{i}]"), d, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut seen = std::collections::BTreeSet::new();
        let mut entries = Vec::new();
        for (i, e) in self.structure.iter().enumerate() {
            let field = format!("structure[{i}]");
            let a = index(&field, e[0], n)?;
            let b = index(&field, e[1], n)?;
            let c = index(&field, e[2], n)?;
            if e[3] <= 0 {
                return Err(schema(
                    &field,
                    format!("multiplicity {} must be positive", e[3]),
                ));
            }
            if !seen.insert((a, b, c)) {
                return Err(schema(
                    &field,
                    format!("duplicate structure key [{a}, {b}, {c}]"),
                ));
            }
            entries.push((a, b, c, e[3]));
        }
        if let Some(d) = &self.dims {
            if d.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(schema("dims", "dimensions must be positive"));
            }
        }
        Ok(BasedAlgebra::new(
            self.labels,
            unit,
            involution,
            entries,
            self.dims,
        )?)
    }
}

pub fn parse_algebra_str(text: &str) -> Result<BasedAlgebra, IoError> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_algebra()
}

pub fn parse_algebra(path: &Path) -> Result<BasedAlgebra, IoError> {
    parse_algebra_str(&read_text(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub nn: RingFile,
    pub mm: AlgebraFile,
    pub a_plus: Vec<Vec<u32>>,
    pub a_minus: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nm_count: Option<u64>,
}

fn dense(field: &str, rows: &[Vec<u32>]) -> Result<DMatrix<u32>, IoError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(schema(field, "rows have different lengths"));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn undense(m: &DMatrix<u32>) -> Vec<Vec<u32>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

impl CertificateFile {
    pub fn from_certificate(cert: &InductionCertificate) -> Self {
        Self {
            nn: RingFile::from_model(&cert.nn, Some(&cert.twists)),
            mm: AlgebraFile::from_algebra(&cert.mm),
            a_plus: undense(&cert.a_plus),
            a_minus: undense(&cert.a_minus),
            theta: cert.theta.clone(),
            nm_count: cert.nm_count,
        }
    }

    pub fn into_certificate(self) -> Result<InductionCertificate, IoError> {
        let (nn, twists) = self.nn.into_model()?;
        let twists = twists.ok_or_else(|| schema("nn.twists", "required in a certificate"))?;
        let mm = self.mm.into_algebra()?;
        Ok(InductionCertificate {
            nn,
            twists,
            mm,
            a_plus: dense("a_plus", &self.a_plus)?,
            a_minus: dense("a_minus", &self.a_minus)?,
            theta: self.theta,
            nm_count: self.nm_count,
        })
    }
}

pub fn parse_certificate_str(text: &str) -> Result<InductionCertificate, IoError> {
    let file: CertificateFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_certificate()
}

pub fn parse_certificate(path: &Path) -> Result<InductionCertificate, IoError> {
    parse_certificate_str(&read_text(path)?)
}

#[derive(Debug, Serialize)]
struct ModularJson<'a> {
    labels: &'a [String],
    c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_exact: Option<String>,
    z: [f64; 2],
    w: f64,
    #[serde(skip_serializing_if = "Option::is_none", rename = "Y")]
    y: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "S")]
    s: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "T")]
    t: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_exponents: Option<Vec<String>>,
}

fn complex_rows(m: &crate::linalg::CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Modular data as JSON; `parts` selects which of `Y`, `S`, `T` to include.
pub fn modular_json(labels: &[String], md: &ModularData, parts: &[&str]) -> String {
    let has = |p: &str| parts.iter().any(|q| q.eq_ignore_ascii_case(p));
    let doc = ModularJson {
        labels,
        c: md.c,
        c_exact: md.c_exact.map(format_rational),
        z: [md.z.re, md.z.im],
        w: md.w,
        y: has("Y").then(|| complex_rows(&md.y)),
        s: has("S").then(|| complex_rows(&md.s)),
        t: has("T").then(|| {
            (0..md.rank())
                .map(|i| [md.t[(i, i)].re, md.t[(i, i)].im])
                .collect()
        }),
        t_exponents: has("T")
            .then(|| {
                md.t_exponents
                    .as_ref()
                    .map(|e| e.iter().map(|&x| format_rational(x)).collect())
            })
            .flatten(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}
