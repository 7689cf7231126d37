//! The file-level vulnerability data-flow graph.
//!
//! Nodes are files; an edge `a -> b` exists when at least one
//! vulnerability's taint path steps from `a` straight to `b`. Parallel
//! flows over the same ordered pair are folded into a single edge that
//! remembers which vulnerabilities used it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::ingest::{ScanDocument, Severity};

/// Dense node index, contiguous from 0 in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// How edge weights are derived from the vulnerabilities on an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// One unit per distinct vulnerability.
    #[default]
    Count,
    /// Sum of scaled severities (0 -> 0.0 ... 5 -> 1.0).
    Severity,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "count" => Ok(Weighting::Count),
            "severity" => Ok(Weighting::Severity),
            other => Err(Error::validation(format!("unknown weighting {other:?}"))),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Count => "count",
            Weighting::Severity => "severity",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub from: NodeId,
    pub to: NodeId,
    /// Active weight under the graph's [`Weighting`].
    pub weight: f64,
    pub severity_weight: f64,
    pub vuln_ids: BTreeSet<String>,
}

impl EdgeRecord {
    pub fn is_self_loop(&self) -> bool {
        self.from == self.to
    }
}

/// Unweighted degree counts with self-loops left out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Degree {
    pub in_degree: usize,
    pub out_degree: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VdfGraph {
    files: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<EdgeRecord>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl VdfGraph {
    /// Assemble a graph from a node list and already-aggregated edges.
    ///
    /// Panics if an edge endpoint is out of range or an ordered pair
    /// repeats; callers inside the crate guarantee both.
    fn from_parts(files: Vec<String>, edges: Vec<EdgeRecord>) -> Self {
        let n = files.len();
        let index = files
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), NodeId(i)))
            .collect::<HashMap<_, _>>();
        assert_eq!(index.len(), n, "duplicate file in node list");
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            assert!(edge.from.0 < n && edge.to.0 < n, "edge endpoint out of range");
            out_edges[edge.from.0].push(e);
            in_edges[edge.to.0].push(e);
        }
        VdfGraph {
            files,
            index,
            edges,
            out_edges,
            in_edges,
        }
    }

    /// Build a graph from explicit weighted edges, without vulnerability
    /// provenance. Repeated ordered pairs have their weights summed.
    /// Extra isolated nodes may be listed in `nodes`.
    pub fn from_edge_list<'a>(
        nodes: impl IntoIterator<Item = &'a str>,
        edges: &[(&str, &str, f64)],
    ) -> Self {
        let mut files = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |f: &str, files: &mut Vec<String>| -> usize {
            *index.entry(f.to_string()).or_insert_with(|| {
                files.push(f.to_string());
                files.len() - 1
            })
        };
        for f in nodes {
            intern(f, &mut files);
        }
        let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out: Vec<EdgeRecord> = Vec::new();
        for &(a, b, w) in edges {
            let (a, b) = (intern(a, &mut files), intern(b, &mut files));
            match pairs.get(&(a, b)) {
                Some(&e) => out[e].weight += w,
                None => {
                    pairs.insert((a, b), out.len());
                    out.push(EdgeRecord {
                        from: NodeId(a),
                        to: NodeId(b),
                        weight: w,
                        severity_weight: 0.0,
                        vuln_ids: BTreeSet::new(),
                    });
                }
            }
        }
        VdfGraph::from_parts(files, out)
    }

    pub fn node_count(&self) -> usize {
        self.files.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.files.len()).map(NodeId)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn file(&self, id: NodeId) -> &str {
        &self.files[id.0]
    }

    pub fn node_id(&self, file: &str) -> Option<NodeId> {
        self.index.get(file).copied()
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn out_edges(&self, id: NodeId) -> impl Iterator<Item = &EdgeRecord> {
        self.out_edges[id.0].iter().map(move |&e| &self.edges[e])
    }

    pub fn in_edges(&self, id: NodeId) -> impl Iterator<Item = &EdgeRecord> {
        self.in_edges[id.0].iter().map(move |&e| &self.edges[e])
    }

    /// Copy of the graph with every edge weight multiplied by `factor`.
    pub fn with_scaled_weights(&self, factor: f64) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.weight *= factor;
        }
        g
    }

    /// Keep the nodes flagged in `keep`, and the edges between them.
    /// Relative node order is preserved.
    pub fn subgraph(&self, keep: &[bool]) -> Self {
        let mut remap = vec![usize::MAX; self.files.len()];
        let mut files = Vec::new();
        for (i, f) in self.files.iter().enumerate() {
            if keep[i] {
                remap[i] = files.len();
                files.push(f.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.from.0] && keep[e.to.0])
            .map(|e| EdgeRecord {
                from: NodeId(remap[e.from.0]),
                to: NodeId(remap[e.to.0]),
                ..e.clone()
            })
            .collect();
        VdfGraph::from_parts(files, edges)
    }

    /// Canonical JSON: nodes in index order, edges in graph order.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Node<'a> {
            id: usize,
            file: &'a str,
        }
        #[derive(Serialize)]
        struct Edge<'a> {
            from: usize,
            to: usize,
            weight: f64,
            severity_weight: f64,
            vuln_ids: &'a BTreeSet<String>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            nodes: Vec<Node<'a>>,
            edges: Vec<Edge<'a>>,
        }
        let doc = Doc {
            nodes: self
                .files
                .iter()
                .enumerate()
                .map(|(id, file)| Node { id, file })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    from: e.from.0,
                    to: e.to.0,
                    weight: e.weight,
                    severity_weight: e.severity_weight,
                    vuln_ids: &e.vuln_ids,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serializes")
    }
}

/// Aggregate every record's consecutive steps into file-to-file edges.
pub fn build_graph(doc: &ScanDocument, weighting: Weighting) -> VdfGraph {
    let mut files: Vec<String> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, BTreeSet<String>)> = Vec::new();
    let mut severity: HashMap<&str, Severity> = HashMap::new();

    for record in &doc.records {
        severity.insert(record.id.as_str(), record.severity);
        let mut prev: Option<usize> = None;
        for step in &record.flow {
            let next = files.len();
            let node = *index.entry(step.file.as_str()).or_insert_with(|| {
                files.push(step.file.clone());
                next
            });
            if let Some(p) = prev {
                let e = *pairs.entry((p, node)).or_insert_with(|| {
                    edges.push((p, node, BTreeSet::new()));
                    edges.len() - 1
                });
                edges[e].2.insert(record.id.clone());
            }
            prev = Some(node);
        }
    }

    let edges = edges
        .into_iter()
        .map(|(from, to, vuln_ids)| {
            let severity_weight: f64 = vuln_ids.iter().map(|id| severity[id.as_str()].scaled()).sum();
            let weight = match weighting {
                Weighting::Count => vuln_ids.len() as f64,
                Weighting::Severity => severity_weight,
            };
            EdgeRecord {
                from: NodeId(from),
                to: NodeId(to),
                weight,
                severity_weight,
                vuln_ids,
            }
        })
        .collect();
    VdfGraph::from_parts(files, edges)
}

/// Drop nodes with no edge to any other node (isolated, or carrying only
/// a self-loop). Returns the filtered graph and the removed files.
pub fn apply_noise_filter(g: &VdfGraph) -> (VdfGraph, BTreeSet<String>) {
    let mut keep = vec![false; g.node_count()];
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        keep[e.from.0] = true;
        keep[e.to.0] = true;
    }
    let removed = g
        .nodes()
        .filter(|v| !keep[v.0])
        .map(|v| g.file(v).to_string())
        .collect();
    (g.subgraph(&keep), removed)
}

/// Weakly connected components of a (usually filtered) graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IslandPartition {
    /// Each segment's members sorted by file name; segments sorted by
    /// descending size, then by smallest file.
    pub segments: Vec<Vec<NodeId>>,
    /// Files removed by the noise filter before partitioning.
    pub filtered_nodes: BTreeSet<String>,
}

impl IslandPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.segments.iter().map(Vec::len).collect()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn islands(g: &VdfGraph) -> IslandPartition {
    let n = g.node_count();
    let mut dsu = DisjointSet::new(n);
    for e in g.edges() {
        dsu.union(e.from.0, e.to.0);
    }
    let mut groups: HashMap<usize, Vec<NodeId>> = HashMap::new();
    for v in 0..n {
        groups.entry(dsu.find(v)).or_default().push(NodeId(v));
    }
    let mut segments: Vec<Vec<NodeId>> = groups.into_values().collect();
    for seg in &mut segments {
        seg.sort_by(|a, b| g.file(*a).cmp(g.file(*b)));
    }
    segments.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| g.file(a[0]).cmp(g.file(b[0])))
    });
    IslandPartition {
        segments,
        filtered_nodes: BTreeSet::new(),
    }
}

/// Per-node distinct in/out edge counts, excluding self-loops.
pub fn degree_profile(g: &VdfGraph) -> Vec<Degree> {
    let mut degrees = vec![Degree::default(); g.node_count()];
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        degrees[e.from.0].out_degree += 1;
        degrees[e.to.0].in_degree += 1;
    }
    for d in &mut degrees {
        d.total = d.in_degree + d.out_degree;
    }
    degrees
}
