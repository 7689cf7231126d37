//! Per-node metrics over a [`VdfGraph`](crate::graph::VdfGraph).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::graph::{NodeId, VdfGraph};

pub mod betweenness;
pub mod cliques;
pub mod eigenvector;
pub mod local;
pub mod pagerank;

pub use betweenness::betweenness;
pub use cliques::{cross_clique, maximal_cliques, DEFAULT_CLIQUE_CAP};
pub use eigenvector::{eigenvector, Direction, EigenConfig, EigenResult};
pub use local::{in_degree, out_degree};
pub use pagerank::{pagerank, PageRankConfig, PageRankResult};

/// The ranked node metrics, in canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    InDegree,
    OutDegree,
    Betweenness,
    InEigenvector,
    OutEigenvector,
    PageRank,
    CrossClique,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::InDegree,
        Metric::OutDegree,
        Metric::Betweenness,
        Metric::InEigenvector,
        Metric::OutEigenvector,
        Metric::PageRank,
        Metric::CrossClique,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::InDegree => "in_degree",
            Metric::OutDegree => "out_degree",
            Metric::Betweenness => "betweenness",
            Metric::InEigenvector => "in_eigenvector",
            Metric::OutEigenvector => "out_eigenvector",
            Metric::PageRank => "pagerank",
            Metric::CrossClique => "cross_clique",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown metric {s:?}")))
    }
}

/// One named value per node, aligned with the graph's node order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricVector {
    pub name: String,
    pub files: Vec<String>,
    pub values: Vec<f64>,
    pub higher_is_hotter: bool,
}

impl MetricVector {
    pub fn new(name: impl Into<String>, g: &VdfGraph, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), g.node_count());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        MetricVector {
            name: name.into(),
            files: g.files().to_vec(),
            values,
            higher_is_hotter: true,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, id: NodeId) -> f64 {
        self.values[id.index()]
    }

    pub fn value_of(&self, file: &str) -> Option<f64> {
        self.files
            .iter()
            .position(|f| f == file)
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.files.iter().map(String::as_str).zip(self.values.iter().copied())
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }
}
