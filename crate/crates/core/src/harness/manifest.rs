//! Experiment manifests: what was run, on which inputs, and digests of the
//! outputs with timing fields projected away.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "vmv-manifest/1";

/// Relative tolerance for float fields when two projections differ bytewise.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    /// Arguments after the program name, exactly as given.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub set_specs: Vec<String>,
    pub primes: Vec<u64>,
    pub operations: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_clock_ms: f64,
}

impl Manifest {
    pub fn new(command: &str, argv: &[String]) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv: argv.to_vec(),
            seed: None,
            set_specs: Vec::new(),
            primes: Vec::new(),
            operations: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_clock_ms: 0.0,
        }
    }

    pub fn path_for(out: &Path) -> std::path::PathBuf {
        let mut s = out.as_os_str().to_os_string();
        s.push(".manifest.json");
        s.into()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if m.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported manifest schema {:?}", m.schema)));
        }
        Ok(m)
    }
}

fn is_timing_key(k: &str) -> bool {
    k.starts_with("elapsed") || k == "wall_clock_ms"
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !is_timing_key(k));
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

enum Format {
    JsonLines,
    Csv,
    Raw,
}

fn detect(path: &Path, bytes: &[u8]) -> Format {
    if path.extension().is_some_and(|e| e == "csv") {
        Format::Csv
    } else if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        Format::JsonLines
    } else {
        Format::Raw
    }
}

/// The output with every timing field removed; this is what digests cover.
pub fn projection(path: &Path, bytes: &[u8]) -> Result<Vec<u8>> {
    match detect(path, bytes) {
        Format::Raw => Ok(bytes.to_vec()),
        Format::JsonLines => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?;
            let mut out = String::new();
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let mut v: Value = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
                strip_timing(&mut v);
                out.push_str(&v.to_string());
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
        Format::Csv => {
            let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(bytes);
            let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let mut keep: Option<Vec<bool>> = None;
            for rec in rdr.records() {
                let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
                let mask = keep.get_or_insert_with(|| rec.iter().map(|h| !is_timing_key(h)).collect());
                let row: Vec<&str> = rec.iter().zip(mask.iter()).filter(|(_, &k)| k).map(|(c, _)| c).collect();
                wtr.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
            }
            wtr.into_inner().map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<FileDigest> {
    let bytes = std::fs::read(path)?;
    Ok(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&projection(path, &bytes)?) })
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= FLOAT_TOLERANCE * a.abs().max(b.abs())
}

fn values_match(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) if x.is_f64() || y.is_f64() => {
            close(x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN))
        }
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(u, v)| values_match(u, v)),
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, u)| y.get(k).is_some_and(|v| values_match(u, v)))
        }
        _ => a == b,
    }
}

fn is_float_text(s: &str) -> bool {
    s.contains(['.', 'e', 'E']) || s == "NaN" || s.ends_with("inf")
}

/// Compare two projections: exact integers and strings must be byte-identical,
/// floats may differ by [`FLOAT_TOLERANCE`] relative.
pub fn projections_match(path: &Path, a: &[u8], b: &[u8]) -> bool {
    if a == b {
        return true;
    }
    match detect(path, a) {
        Format::Raw => false,
        Format::JsonLines => {
            let (ta, tb) = (String::from_utf8_lossy(a), String::from_utf8_lossy(b));
            let (la, lb): (Vec<&str>, Vec<&str>) = (ta.lines().collect(), tb.lines().collect());
            la.len() == lb.len()
                && la.iter().zip(&lb).all(|(x, y)| {
                    match (serde_json::from_str::<Value>(x), serde_json::from_str::<Value>(y)) {
                        (Ok(u), Ok(v)) => values_match(&u, &v),
                        _ => false,
                    }
                })
        }
        Format::Csv => {
            let (ta, tb) = (String::from_utf8_lossy(a), String::from_utf8_lossy(b));
            let (la, lb): (Vec<&str>, Vec<&str>) = (ta.lines().collect(), tb.lines().collect());
            la.len() == lb.len()
                && la.iter().zip(&lb).all(|(x, y)| {
                    let (cx, cy): (Vec<&str>, Vec<&str>) = (x.split(',').collect(), y.split(',').collect());
                    cx.len() == cy.len()
                        && cx.iter().zip(&cy).all(|(u, v)| {
                            u == v
                                || (is_float_text(u)
                                    && is_float_text(v)
                                    && matches!((u.parse::<f64>(), v.parse::<f64>()), (Ok(p), Ok(q)) if close(p, q)))
                        })
                })
        }
    }
}
