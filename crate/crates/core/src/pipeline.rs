//! End-to-end analysis: scan document in, report out.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::export::{AnalysisReport, CommunityReport, GraphSummary, ReportSettings};
use crate::graph::{apply_noise_filter, build_graph, islands, IslandPartition, VdfGraph, Weighting};
use crate::ingest::ScanDocument;
use crate::metrics::{
    betweenness, cross_clique, eigenvector, in_degree, out_degree, pagerank, Direction, EigenConfig,
    Metric, MetricVector, PageRankConfig, DEFAULT_CLIQUE_CAP,
};
use crate::prioritize::{capture_at_k, priority_vector, rank, PriorityProfile};
use crate::structure::{segment_entropy, walktrap_communities, CommunityPartition, DEFAULT_WALK_LENGTH};

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub weighting: Weighting,
    pub noise_filter: bool,
    pub metrics: BTreeSet<Metric>,
    pub profile: PriorityProfile,
    pub foi: Option<BTreeSet<String>>,
    pub k: usize,
    pub walk_length: usize,
    pub clique_cap: usize,
    pub eigen: EigenConfig,
    pub pagerank: PageRankConfig,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            weighting: Weighting::Count,
            noise_filter: true,
            metrics: Metric::ALL.into_iter().collect(),
            profile: PriorityProfile::placement(),
            foi: None,
            k: 5,
            walk_length: DEFAULT_WALK_LENGTH,
            clique_cap: DEFAULT_CLIQUE_CAP,
            eigen: EigenConfig::default(),
            pagerank: PageRankConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    /// The analysed graph (after the noise filter, when enabled).
    pub graph: VdfGraph,
    pub islands: IslandPartition,
    pub communities: CommunityPartition,
    pub report: AnalysisReport,
}

impl Analysis {
    pub fn metric(&self, name: &str) -> Option<&MetricVector> {
        self.report.metrics.iter().find(|m| m.name == name)
    }
}

/// Graph construction plus the optional noise filter.
pub fn prepare_graph(doc: &ScanDocument, weighting: Weighting, noise_filter: bool) -> (VdfGraph, IslandPartition) {
    let full = build_graph(doc, weighting);
    let (graph, removed) = if noise_filter {
        apply_noise_filter(&full)
    } else {
        (full, BTreeSet::new())
    };
    let mut partition = islands(&graph);
    partition.filtered_nodes = removed;
    (graph, partition)
}

/// Compute the selected metrics in canonical order.
pub fn compute_metrics(g: &VdfGraph, options: &AnalysisOptions) -> Result<Vec<MetricVector>> {
    let mut out = Vec::new();
    for metric in &options.metrics {
        log::info!("computing {metric}");
        let vector = match metric {
            Metric::InDegree => in_degree(g, true),
            Metric::OutDegree => out_degree(g, true),
            Metric::Betweenness => betweenness(g),
            Metric::InEigenvector | Metric::OutEigenvector => {
                let direction = if *metric == Metric::InEigenvector {
                    Direction::In
                } else {
                    Direction::Out
                };
                let r = eigenvector(g, direction, &options.eigen);
                if r.degenerate {
                    log::warn!("{metric}: graph has no cycle, all values are 0");
                } else if !r.converged {
                    log::warn!(
                        "{metric}: no convergence after {} iterations (residual {:e})",
                        r.iterations,
                        r.residual
                    );
                }
                r.vector
            }
            Metric::PageRank => {
                let r = pagerank(g, &options.pagerank);
                if !r.converged {
                    log::warn!("pagerank: no convergence after {} iterations", r.iterations);
                }
                r.vector
            }
            Metric::CrossClique => cross_clique(g, options.clique_cap)?,
        };
        out.push(vector);
    }
    Ok(out)
}

pub fn analyze(doc: &ScanDocument, options: &AnalysisOptions) -> Result<Analysis> {
    let (graph, partition) = prepare_graph(doc, options.weighting, options.noise_filter);
    log::info!(
        "graph: {} nodes, {} edges, {} filtered, {} islands",
        graph.node_count(),
        graph.edge_count(),
        partition.filtered_nodes.len(),
        partition.segments.len()
    );

    let mut metrics = compute_metrics(&graph, options)?;
    let priority = priority_vector(&metrics, &options.profile)?;
    metrics.push(priority);

    log::info!("detecting communities");
    let communities = walktrap_communities(&graph, options.walk_length);
    let segments: Vec<_> = partition
        .segments
        .iter()
        .map(|s| segment_entropy(&graph, s))
        .collect();

    let rankings: Vec<_> = metrics.iter().map(rank).collect();
    let captures = match &options.foi {
        Some(foi) => rankings
            .iter()
            .map(|t| capture_at_k(t, foi, options.k))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };

    let report = AnalysisReport {
        app_name: doc.app_name.clone(),
        scan_id: doc.scan_id.clone(),
        settings: ReportSettings {
            weighting: options.weighting.to_string(),
            noise_filter: options.noise_filter,
            profile: options.profile.name.clone(),
            k: options.k,
        },
        graph_summary: GraphSummary {
            node_count: graph.node_count(),
            edge_count: graph.edge_count(),
            filtered_count: partition.filtered_nodes.len(),
            island_sizes: partition.sizes(),
        },
        metrics,
        segments,
        communities: CommunityReport {
            communities: communities
                .communities
                .iter()
                .map(|c| c.iter().map(|v| graph.file(*v).to_string()).collect())
                .collect(),
            modularity_q: communities.modularity_q,
            walk_length: communities.walk_length,
        },
        rankings,
        captures,
    };
    Ok(Analysis {
        graph,
        islands: partition,
        communities,
        report,
    })
}
