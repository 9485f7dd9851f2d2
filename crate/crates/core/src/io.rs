//! File formats: density families, distance matrices, run manifests, config.
//!
//! A family file is JSON in one of two forms. The canonical form lists the
//! shared grid and 0-based half-open segment indices:
//!
//! ```json
//! {"degree": 1, "breakpoints": [0, 0.5, 1],
//!  "densities": [{"name": "ramp", "segments": [{"b": 0, "c": 2, "coeffs": [0, 2]}]}]}
//! ```
//!
//! The raw form gives every piece its own endpoints and is merged onto a common
//! grid on load:
//!
//! ```json
//! {"degree": 0, "densities": [{"name": "u", "pieces": [{"lo": 0, "hi": 1, "coeffs": [1]}]}]}
//! ```
//!
//! Doubles are written in shortest round-trip decimal form, so a canonicalized
//! family parses back to the identical structure.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::density::{merge_breakpoints, Breakpoints, DensityFamily, PiecewisePolyDensity, PolySegment, RawDensity, RawPiece};
use crate::error::{structure, Error, Result};
use crate::estimate::Estimator;
use crate::pipeline::{DistanceMatrix, Method, RunEcho};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    degree: usize,
    #[serde(default)]
    breakpoints: Option<Breakpoints>,
    densities: Vec<DensityEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityEntry {
    name: String,
    #[serde(default)]
    segments: Option<Vec<PolySegment>>,
    #[serde(default)]
    pieces: Option<Vec<RawPiece>>,
}

#[derive(Serialize)]
struct CanonicalFamily<'a> {
    degree: usize,
    breakpoints: &'a Breakpoints,
    densities: &'a [PiecewisePolyDensity],
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

/// Parses either JSON form and checks the family structure.
pub fn parse_family(text: &str) -> Result<DensityFamily> {
    let file: FamilyFile = serde_json::from_str(text).map_err(parse_error)?;
    match file.breakpoints {
        Some(bp) => {
            let mut densities = Vec::with_capacity(file.densities.len());
            for d in file.densities {
                if d.pieces.is_some() {
                    return structure(format!(
                        "density '{}' uses 'pieces' but the file has a 'breakpoints' grid; use 'segments'",
                        d.name
                    ));
                }
                let segments = d.segments.unwrap_or_default();
                densities.push(PiecewisePolyDensity { name: d.name, segments });
            }
            DensityFamily::new(bp, densities, file.degree)
        }
        None => {
            let mut raw = Vec::with_capacity(file.densities.len());
            for d in file.densities {
                if d.segments.is_some() {
                    return structure(format!(
                        "density '{}' uses 'segments' but the file has no 'breakpoints' grid",
                        d.name
                    ));
                }
                raw.push(RawDensity {
                    name: d.name,
                    pieces: d.pieces.unwrap_or_default(),
                });
            }
            merge_breakpoints(&raw, file.degree)
        }
    }
}

pub fn read_family(path: &std::path::Path) -> Result<(DensityFamily, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse(format!("input is not UTF-8: {e}")))?;
    Ok((parse_family(text)?, bytes))
}

/// The canonical JSON text of a family.
pub fn canonicalize(family: &DensityFamily) -> String {
    let canon = CanonicalFamily {
        degree: family.degree,
        breakpoints: &family.breakpoints,
        densities: &family.densities,
    };
    let mut text = serde_json::to_string_pretty(&canon).expect("family serializes");
    text.push('\n');
    text
}

/// Hex SHA-256 of the input bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance of one invocation. Everything except `wall_time_s` is a pure
/// function of the inputs, so the manifest embedded in output files leaves it
/// out and reruns stay byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_sha256: None,
            wall_time_s: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("parameter serializes");
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Manifest as `#` comment lines, a header of names, then one row per density.
pub fn distance_csv(matrix: &DistanceMatrix, manifest: &RunManifest) -> String {
    let mut out = String::new();
    out.push_str(&format!("# l1sketch {}\n", manifest.command));
    out.push_str(&format!("# manifest: {}\n", manifest.to_json()));
    out.push_str(&format!(
        "# config: {}\n",
        serde_json::to_string(matrix.echo()).expect("echo serializes")
    ));
    let header: Vec<String> = matrix.names().iter().map(|n| csv_field(n)).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct DistanceJson<'a> {
    manifest: &'a RunManifest,
    names: &'a [String],
    matrix: Vec<Vec<f64>>,
    method: Method,
    config: &'a RunEcho,
}

pub fn distance_json(matrix: &DistanceMatrix, manifest: &RunManifest) -> String {
    let doc = DistanceJson {
        manifest,
        names: matrix.names(),
        matrix: matrix.rows(),
        method: matrix.method(),
        config: matrix.echo(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("distance matrix serializes");
    text.push('\n');
    text
}

/// Optional TOML run configuration; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub estimator: Option<Estimator>,
    pub c_constant: Option<f64>,
}

pub fn parse_config(text: &str) -> Result<Config> {
    toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
}
