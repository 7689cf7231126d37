//! Scan ingestion.
//!
//! Two input formats are accepted:
//!
//! - `vivid-json`, the canonical interchange document: one object with
//!   `app`, `scan_id` and a `vulnerabilities` array, each vulnerability
//!   carrying its ordered taint path (`flow`) from source to sink.
//! - `edge-csv`, a fallback edge list with header
//!   `vuln_id,from_file,to_file,severity`. Rows sharing a `vuln_id` are
//!   chained in file order to rebuild the path.
//!
//! Every record that comes out of here has normalized paths, a severity in
//! `0..=5` and a non-empty flow; ids are unique within the document.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Highest accepted severity ordinal.
pub const MAX_SEVERITY: u8 = 5;

/// Severity ordinal, 0 (informational) through 5 (very high).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Severity(u8);

impl Severity {
    pub fn new(level: i64) -> Result<Self> {
        if (0..=MAX_SEVERITY as i64).contains(&level) {
            Ok(Severity(level as u8))
        } else {
            Err(Error::validation(format!(
                "severity {level} outside 0..={MAX_SEVERITY}"
            )))
        }
    }

    pub fn level(self) -> u8 {
        self.0
    }

    /// Linear severity scale, 0 -> 0.0 up to 5 -> 1.0.
    pub fn scaled(self) -> f64 {
        f64::from(self.0) / f64::from(MAX_SEVERITY)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowStep {
    pub file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
}

impl FlowStep {
    pub fn new(file: &str) -> Result<Self> {
        Ok(FlowStep {
            file: normalize_path(file)?,
            function: None,
            line: None,
        })
    }
}

/// One vulnerability and its taint path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VdfRecord {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cwe: Option<String>,
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub flow: Vec<FlowStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanDocument {
    #[serde(rename = "app")]
    pub app_name: String,
    pub scan_id: String,
    #[serde(rename = "vulnerabilities")]
    pub records: Vec<VdfRecord>,
}

impl ScanDocument {
    /// Canonical `vivid-json` serialization.
    pub fn to_vivid_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan document serializes")
    }

    fn validate(&self) -> Result<()> {
        if self.app_name.trim().is_empty() {
            return Err(Error::validation("app name is empty"));
        }
        if self.scan_id.trim().is_empty() {
            return Err(Error::validation("scan_id is empty"));
        }
        if self.records.is_empty() {
            return Err(Error::validation("scan contains no vulnerabilities"));
        }
        let mut seen = HashSet::new();
        for r in &self.records {
            if r.id.is_empty() {
                return Err(Error::validation("vulnerability with empty id"));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::validation(format!(
                    "duplicate vulnerability id {:?}",
                    r.id
                )));
            }
            if r.flow.is_empty() {
                return Err(Error::validation(format!(
                    "vulnerability {:?} has an empty flow",
                    r.id
                )));
            }
        }
        Ok(())
    }
}

/// A parsed document plus ingestion diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScan {
    pub document: ScanDocument,
    /// Unknown per-record (and per-step) keys that were skipped.
    pub ignored_keys: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    VividJson,
    EdgeCsv,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vivid-json" | "json" => Ok(InputFormat::VividJson),
            "edge-csv" | "csv" => Ok(InputFormat::EdgeCsv),
            other => Err(Error::validation(format!("unknown input format {other:?}"))),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::VividJson => "vivid-json",
            InputFormat::EdgeCsv => "edge-csv",
        })
    }
}

/// Normalize a file path: forward slashes only, no repeated separators,
/// no `.` segments, no leading `./` and no trailing slash. Case is kept.
pub fn normalize_path(raw: &str) -> Result<String> {
    let unified = raw.trim().replace('\\', "/");
    let absolute = unified.starts_with('/');
    let parts: Vec<&str> = unified
        .split('/')
        .filter(|seg| !seg.is_empty() && *seg != ".")
        .collect();
    if parts.is_empty() {
        return Err(Error::validation(format!(
            "path {raw:?} is empty after normalization"
        )));
    }
    let joined = parts.join("/");
    Ok(if absolute { format!("/{joined}") } else { joined })
}

/// Parse a scan document in the given format.
pub fn parse_scan<R: Read>(mut input: R, format: InputFormat) -> Result<ParsedScan> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let parsed = match format {
        InputFormat::VividJson => parse_vivid_json(&bytes)?,
        InputFormat::EdgeCsv => parse_edge_csv(&bytes)?,
    };
    parsed.document.validate()?;
    Ok(parsed)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    app: String,
    scan_id: String,
    vulnerabilities: Vec<RawRecord>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    #[serde(default)]
    cwe: Option<String>,
    severity: i64,
    #[serde(default)]
    category: Option<String>,
    flow: Vec<RawStep>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct RawStep {
    file: String,
    #[serde(default)]
    function: Option<String>,
    #[serde(default)]
    line: Option<i64>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

fn parse_vivid_json(bytes: &[u8]) -> Result<ParsedScan> {
    let raw: RawDocument = serde_json::from_slice(bytes)?;
    let mut ignored_keys = 0;
    let mut records = Vec::with_capacity(raw.vulnerabilities.len());
    for r in raw.vulnerabilities {
        ignored_keys += r.extra.len();
        let severity = Severity::new(r.severity)
            .map_err(|e| Error::validation(format!("vulnerability {:?}: {e}", r.id)))?;
        let mut flow = Vec::with_capacity(r.flow.len());
        for step in r.flow {
            ignored_keys += step.extra.len();
            let file = normalize_path(&step.file)
                .map_err(|e| Error::validation(format!("vulnerability {:?}: {e}", r.id)))?;
            let line = match step.line {
                None => None,
                Some(l) if l >= 1 && l <= u32::MAX as i64 => Some(l as u32),
                Some(l) => {
                    return Err(Error::validation(format!(
                        "vulnerability {:?}: line {l} must be >= 1",
                        r.id
                    )))
                }
            };
            flow.push(FlowStep {
                file,
                function: step.function,
                line,
            });
        }
        records.push(VdfRecord {
            id: r.id,
            cwe: r.cwe,
            severity,
            category: r.category,
            flow,
        });
    }
    if ignored_keys > 0 {
        log::warn!("ignored {ignored_keys} unknown key(s) in vulnerability records");
    }
    Ok(ParsedScan {
        document: ScanDocument {
            app_name: raw.app,
            scan_id: raw.scan_id,
            records,
        },
        ignored_keys,
    })
}

pub const EDGE_CSV_HEADER: [&str; 4] = ["vuln_id", "from_file", "to_file", "severity"];

/// Application name given to documents read from `edge-csv`, which has no
/// header metadata of its own.
pub const EDGE_CSV_APP: &str = "unnamed";
pub const EDGE_CSV_SCAN_ID: &str = "edge-csv";

fn csv_parse_error(e: csv::Error) -> Error {
    let (line, message) = match e.position() {
        Some(pos) => (pos.line() as usize, e.to_string()),
        None => (0, e.to_string()),
    };
    Error::Parse {
        line,
        column: 0,
        message,
    }
}

fn parse_edge_csv(bytes: &[u8]) -> Result<ParsedScan> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = reader.headers().map_err(csv_parse_error)?.clone();
    if header.iter().ne(EDGE_CSV_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            column: 0,
            message: format!(
                "expected header {:?}, found {:?}",
                EDGE_CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut records: Vec<VdfRecord> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for row in reader.records() {
        let row = row.map_err(csv_parse_error)?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let id = &row[0];
        if id.is_empty() {
            return Err(Error::Parse {
                line,
                column: 1,
                message: "empty vuln_id".into(),
            });
        }
        let level: i64 = row[3].parse().map_err(|_| Error::Parse {
            line,
            column: 4,
            message: format!("severity {:?} is not an integer", &row[3]),
        })?;
        let severity = Severity::new(level)
            .map_err(|e| Error::validation(format!("line {line}, vulnerability {id:?}: {e}")))?;
        let from = normalize_path(&row[1])
            .map_err(|e| Error::validation(format!("line {line}: {e}")))?;
        let to = if row[2].is_empty() {
            None
        } else {
            Some(
                normalize_path(&row[2])
                    .map_err(|e| Error::validation(format!("line {line}: {e}")))?,
            )
        };

        match by_id.get(id) {
            None => {
                let mut flow = vec![FlowStep {
                    file: from,
                    function: None,
                    line: None,
                }];
                if let Some(to) = to {
                    flow.push(FlowStep {
                        file: to,
                        function: None,
                        line: None,
                    });
                }
                by_id.insert(id.to_string(), records.len());
                records.push(VdfRecord {
                    id: id.to_string(),
                    cwe: None,
                    severity,
                    category: None,
                    flow,
                });
            }
            Some(&idx) => {
                let record = &mut records[idx];
                if record.severity != severity {
                    return Err(Error::validation(format!(
                        "line {line}: vulnerability {id:?} has severity {} here but {} earlier",
                        severity.level(),
                        record.severity.level()
                    )));
                }
                let last = &record.flow.last().expect("flow is non-empty").file;
                if *last != from {
                    return Err(Error::validation(format!(
                        "line {line}: vulnerability {id:?} continues from {from:?} but its path ends at {last:?}"
                    )));
                }
                let Some(to) = to else {
                    return Err(Error::validation(format!(
                        "line {line}: vulnerability {id:?} continuation row has no to_file"
                    )));
                };
                record.flow.push(FlowStep {
                    file: to,
                    function: None,
                    line: None,
                });
            }
        }
    }

    Ok(ParsedScan {
        document: ScanDocument {
            app_name: EDGE_CSV_APP.into(),
            scan_id: EDGE_CSV_SCAN_ID.into(),
            records,
        },
        ignored_keys: 0,
    })
}
