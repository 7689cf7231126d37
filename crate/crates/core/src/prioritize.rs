//! Rankings, capture-at-k evaluation and weighted priority scores.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::round_sig;
use crate::ingest::normalize_path;
use crate::metrics::{Metric, MetricVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub rank: usize,
    pub file: String,
    pub value: f64,
}

/// Rows by descending value. Equal values share a dense rank and are
/// listed by file name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub metric_name: String,
    pub rows: Vec<RankingRow>,
}

impl RankingTable {
    pub fn rank_of(&self, file: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.file == file).map(|r| r.rank)
    }
}

/// Dense ranking, highest value first, ties in file order.
///
/// Values are compared at the 12 significant digits the report carries, so
/// round-off between mathematically equal scores never splits a tie.
pub fn rank(metric: &MetricVector) -> RankingTable {
    let mut order: Vec<(&str, f64, f64)> = metric.iter().map(|(f, v)| (f, v, round_sig(v) + 0.0)).collect();
    order.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(b.0)));
    let mut rows = Vec::with_capacity(order.len());
    let mut current = 0;
    let mut last: Option<f64> = None;
    for (file, value, key) in order {
        if last != Some(key) {
            current += 1;
            last = Some(key);
        }
        rows.push(RankingRow {
            rank: current,
            file: file.to_string(),
            value,
        });
    }
    RankingTable {
        metric_name: metric.name.clone(),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaptureResult {
    pub metric_name: String,
    pub k: usize,
    pub files_of_interest: BTreeSet<String>,
    pub captured: BTreeSet<String>,
    pub capture_fraction: f64,
    /// Files of interest that are not nodes of the ranked graph.
    pub missing: Vec<String>,
}

/// Fraction of `foi` whose dense rank is at most `k`. Ties on the
/// boundary are all inside.
pub fn capture_at_k(table: &RankingTable, foi: &BTreeSet<String>, k: usize) -> Result<CaptureResult> {
    if k == 0 {
        return Err(Error::validation("k must be at least 1"));
    }
    if foi.is_empty() {
        return Err(Error::validation("files-of-interest list is empty"));
    }
    let mut captured = BTreeSet::new();
    let mut missing = Vec::new();
    for f in foi {
        match table.rank_of(f) {
            Some(r) if r <= k => {
                captured.insert(f.clone());
            }
            Some(_) => {}
            None => missing.push(f.clone()),
        }
    }
    for f in &missing {
        log::warn!("file of interest {f:?} is not in the graph");
    }
    Ok(CaptureResult {
        metric_name: table.metric_name.clone(),
        k,
        capture_fraction: captured.len() as f64 / foi.len() as f64,
        files_of_interest: foi.clone(),
        captured,
        missing,
    })
}

/// Parse a files-of-interest list: one path per line, `#` starts a
/// comment, blank lines are skipped. Paths are normalized like graph nodes.
pub fn parse_foi(text: &str) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let entry = line.split('#').next().unwrap_or("").trim();
        if entry.is_empty() {
            continue;
        }
        let path = normalize_path(entry)
            .map_err(|e| Error::validation(format!("files of interest, line {}: {e}", i + 1)))?;
        out.insert(path);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorityProfile {
    pub name: String,
    pub weights: BTreeMap<String, f64>,
}

impl PriorityProfile {
    /// Where to place input validation and sanitization.
    pub fn placement() -> Self {
        PriorityProfile {
            name: "placement".into(),
            weights: [
                Metric::OutDegree,
                Metric::Betweenness,
                Metric::InEigenvector,
                Metric::CrossClique,
            ]
            .into_iter()
            .map(|m| (m.as_str().to_string(), 0.25))
            .collect(),
        }
    }

    /// Common sinks and flow enablers, for post-operation checks.
    pub fn sink_audit() -> Self {
        PriorityProfile {
            name: "sink-audit".into(),
            weights: [Metric::InDegree, Metric::PageRank, Metric::OutEigenvector]
                .into_iter()
                .map(|m| (m.as_str().to_string(), 1.0 / 3.0))
                .collect(),
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "placement" => Some(Self::placement()),
            "sink-audit" => Some(Self::sink_audit()),
            _ => None,
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let profile: PriorityProfile = serde_json::from_slice(bytes)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        for (m, w) in &self.weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::validation(format!(
                    "profile {:?}: weight for {m:?} must be a non-negative number",
                    self.name
                )));
            }
        }
        if !self.weights.values().any(|w| *w > 0.0) {
            return Err(Error::validation(format!(
                "profile {:?} has no positive weight",
                self.name
            )));
        }
        Ok(())
    }

    /// Weights rescaled to sum to 1, zero weights dropped.
    pub fn normalized_weights(&self) -> Vec<(&str, f64)> {
        let total: f64 = self.weights.values().sum();
        self.weights
            .iter()
            .filter(|(_, w)| **w > 0.0)
            .map(|(m, w)| (m.as_str(), w / total))
            .collect()
    }

    pub fn score_name(&self) -> String {
        format!("priority_{}", self.name)
    }
}

/// Min-max scale into [0, 1]; a constant vector maps to all zeros.
pub fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo || hi.is_nan() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Convex combination of min-max normalized metrics.
pub fn priority_vector(metrics: &[MetricVector], profile: &PriorityProfile) -> Result<MetricVector> {
    profile.validate()?;
    let weights = profile.normalized_weights();
    let mut files: Option<&[String]> = None;
    let mut score: Vec<f64> = Vec::new();
    for (name, w) in weights {
        let metric = metrics.iter().find(|m| m.name == name).ok_or_else(|| {
            Error::validation(format!(
                "profile {:?} references metric {name:?}, which was not computed",
                profile.name
            ))
        })?;
        match files {
            None => {
                files = Some(&metric.files);
                score = vec![0.0; metric.len()];
            }
            Some(f) if f != metric.files.as_slice() => {
                return Err(Error::validation(format!(
                    "metric {name:?} covers a different node set"
                )))
            }
            Some(_) => {}
        }
        for (s, x) in score.iter_mut().zip(min_max(&metric.values)) {
            *s += w * x;
        }
    }
    Ok(MetricVector {
        name: profile.score_name(),
        files: files.unwrap_or_default().to_vec(),
        values: score,
        higher_is_hotter: true,
    })
}

pub fn priority_score(metrics: &[MetricVector], profile: &PriorityProfile) -> Result<RankingTable> {
    Ok(rank(&priority_vector(metrics, profile)?))
}
