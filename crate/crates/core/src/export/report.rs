//! The analysis report document.
//!
//! Serialized as JSON with object keys in sorted order and every float
//! rounded to 12 significant digits, so equal analyses give equal bytes.
//! The schema ships in `schema/report.schema.json`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::round_sig;
use crate::error::{Error, Result};
use crate::metrics::MetricVector;
use crate::prioritize::{CaptureResult, RankingTable};
use crate::structure::SegmentReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub filtered_count: usize,
    pub island_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityReport {
    pub communities: Vec<Vec<String>>,
    pub modularity_q: f64,
    pub walk_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSettings {
    pub weighting: String,
    pub noise_filter: bool,
    pub profile: String,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub app_name: String,
    pub scan_id: String,
    pub settings: ReportSettings,
    pub graph_summary: GraphSummary,
    pub metrics: Vec<MetricVector>,
    pub segments: Vec<SegmentReport>,
    pub communities: CommunityReport,
    pub rankings: Vec<RankingTable>,
    pub captures: Vec<CaptureResult>,
}

impl AnalysisReport {
    pub fn validate(&self) -> Result<()> {
        for t in &self.rankings {
            if !self.metrics.iter().any(|m| m.name == t.metric_name) {
                return Err(Error::validation(format!(
                    "ranking {:?} has no matching metric",
                    t.metric_name
                )));
            }
        }
        for c in &self.captures {
            if !self.rankings.iter().any(|t| t.metric_name == c.metric_name) {
                return Err(Error::validation(format!(
                    "capture result {:?} has no matching ranking",
                    c.metric_name
                )));
            }
        }
        let sizes: Vec<usize> = self.segments.iter().map(|s| s.files.len()).collect();
        if sizes != self.graph_summary.island_sizes {
            return Err(Error::validation(format!(
                "island sizes {:?} disagree with segments {:?}",
                self.graph_summary.island_sizes, sizes
            )));
        }
        Ok(())
    }
}

/// Round every float and re-insert object keys in sorted order.
fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = std::mem::take(map).into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, mut item) in entries {
                canonicalize(&mut item);
                map.insert(k, item);
            }
        }
        _ => {}
    }
}

pub fn export_report_json(report: &AnalysisReport) -> Result<Vec<u8>> {
    report.validate()?;
    let mut value = serde_json::to_value(report).expect("report serializes");
    canonicalize(&mut value);
    let mut out = serde_json::to_vec_pretty(&value).expect("value serializes");
    out.push(b'\n');
    Ok(out)
}

#[derive(Deserialize)]
struct RankingsOnly {
    rankings: Vec<RankingTable>,
}

/// Read the ranking tables back out of a report document.
pub fn load_rankings(bytes: &[u8]) -> Result<Vec<RankingTable>> {
    Ok(serde_json::from_slice::<RankingsOnly>(bytes)?.rankings)
}
