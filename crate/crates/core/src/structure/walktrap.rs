//! Walktrap community detection.
//!
//! Every node starts in its own community. Communities are described by
//! the distribution of a `t`-step random walk started uniformly inside
//! them; the walk follows weighted out-edges and jumps uniformly from files
//! with no outgoing flow. At each step the pair of adjacent communities
//! whose merge least increases the mean squared walk distance
//!
//! ```text
//! Δσ(C1, C2) = 1/n · |C1||C2| / (|C1| + |C2|) · Σ_k (P_C1k − P_C2k)² / d(k)
//! ```
//!
//! is merged. Of all partitions along the merge sequence the one with the
//! highest modularity is returned. Only communities joined by an edge are
//! ever merged, so separate islands stay separate.
//!
//! Ties are broken on the smallest member file, and all arithmetic runs in
//! file-sorted order, so the result depends on file names only and not on
//! node numbering.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;

use super::modularity::modularity_from_labels;
use crate::graph::{NodeId, VdfGraph};

pub const DEFAULT_WALK_LENGTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityPartition {
    /// Members sorted by file; communities by descending size, then
    /// smallest file.
    pub communities: Vec<Vec<NodeId>>,
    pub modularity_q: f64,
    pub walk_length: usize,
}

struct Community {
    size: usize,
    /// Walk distribution, indexed canonically.
    prob: Vec<f64>,
    /// Canonical index of the smallest member file.
    min_rank: usize,
    /// Adjacent community -> projected weight between the two.
    neighbors: BTreeMap<usize, f64>,
    total_degree: f64,
}

#[derive(PartialEq)]
struct Candidate {
    delta: f64,
    lo: usize,
    hi: usize,
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // Reversed so BinaryHeap pops the smallest delta first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .delta
            .total_cmp(&self.delta)
            .then_with(|| other.lo.cmp(&self.lo))
            .then_with(|| other.hi.cmp(&self.hi))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Walk {
    n: usize,
    transitions: Vec<Vec<(usize, f64)>>,
    dangling: Vec<usize>,
}

impl Walk {
    fn distribution(&self, start: usize, steps: usize) -> Vec<f64> {
        let n = self.n;
        let mut p = vec![0.0; n];
        p[start] = 1.0;
        let mut q = vec![0.0; n];
        for _ in 0..steps {
            let jump: f64 = self.dangling.iter().map(|&u| p[u]).sum::<f64>() / n as f64;
            q.fill(jump);
            for (u, row) in self.transitions.iter().enumerate() {
                let pu = p[u];
                if pu != 0.0 {
                    for &(v, w) in row {
                        q[v] += pu * w;
                    }
                }
            }
            std::mem::swap(&mut p, &mut q);
        }
        p
    }
}

fn delta_sigma(a: &Community, b: &Community, inv_degree: &[f64], n: usize) -> f64 {
    let dist: f64 = a
        .prob
        .iter()
        .zip(&b.prob)
        .zip(inv_degree)
        .map(|((x, y), w)| (x - y) * (x - y) * w)
        .sum();
    let (sa, sb) = (a.size as f64, b.size as f64);
    sa * sb / (sa + sb) * dist / n as f64
}

pub fn walktrap_communities(g: &VdfGraph, walk_length: usize) -> CommunityPartition {
    assert!(walk_length >= 1, "walk length must be at least 1");
    let n = g.node_count();
    if n == 0 {
        return CommunityPartition {
            communities: Vec::new(),
            modularity_q: 0.0,
            walk_length,
        };
    }

    // Canonical numbering: position in file-sorted order.
    let mut canon: Vec<usize> = (0..n).collect();
    canon.sort_by(|&a, &b| g.files()[a].cmp(&g.files()[b]));
    let mut rank = vec![0; n];
    for (r, &v) in canon.iter().enumerate() {
        rank[v] = r;
    }

    let mut out_weight = vec![0.0; n];
    let mut transitions: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut degree = vec![0.0; n];
    let mut adjacency: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        let (u, v) = (rank[e.from.index()], rank[e.to.index()]);
        *adjacency[u].entry(v).or_default() += e.weight;
        *adjacency[v].entry(u).or_default() += e.weight;
        degree[u] += e.weight;
        degree[v] += e.weight;
        if e.weight > 0.0 {
            out_weight[u] += e.weight;
            transitions[u].push((v, e.weight));
        }
    }
    for (u, row) in transitions.iter_mut().enumerate() {
        row.sort_by_key(|&(v, _)| v);
        for entry in row.iter_mut() {
            entry.1 /= out_weight[u];
        }
    }
    let walk = Walk {
        n,
        dangling: (0..n).filter(|&u| transitions[u].is_empty()).collect(),
        transitions,
    };
    let inv_degree: Vec<f64> = degree
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 })
        .collect();
    let two_m: f64 = degree.iter().sum();

    let mut communities: Vec<Option<Community>> = (0..n)
        .map(|u| {
            Some(Community {
                size: 1,
                prob: walk.distribution(u, walk_length),
                min_rank: u,
                neighbors: adjacency[u].clone(),
                total_degree: degree[u],
            })
        })
        .collect();

    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Candidate>, cs: &[Option<Community>], a: usize, b: usize| {
        let (ca, cb) = (cs[a].as_ref().unwrap(), cs[b].as_ref().unwrap());
        heap.push(Candidate {
            delta: delta_sigma(ca, cb, &inv_degree, n),
            lo: ca.min_rank.min(cb.min_rank),
            hi: ca.min_rank.max(cb.min_rank),
            a,
            b,
        });
    };
    for (u, row) in adjacency.iter().enumerate() {
        for &v in row.keys().filter(|&&v| v > u) {
            push(&mut heap, &communities, u, v);
        }
    }

    let mut q = if two_m > 0.0 {
        -degree.iter().map(|d| (d / two_m).powi(2)).sum::<f64>()
    } else {
        0.0
    };
    let mut best_q = q;
    let mut merges: Vec<(usize, usize)> = Vec::new();
    let mut best_len = 0;

    while let Some(Candidate { a, b, .. }) = heap.pop() {
        if communities[a].is_none() || communities[b].is_none() {
            continue;
        }
        let ca = communities[a].take().unwrap();
        let cb = communities[b].take().unwrap();
        let id = communities.len();
        let between = ca.neighbors.get(&b).copied().unwrap_or(0.0);
        if two_m > 0.0 {
            q += 2.0 * between / two_m - 2.0 * ca.total_degree * cb.total_degree / (two_m * two_m);
        }

        let size = ca.size + cb.size;
        let (wa, wb) = (ca.size as f64 / size as f64, cb.size as f64 / size as f64);
        let prob = ca
            .prob
            .iter()
            .zip(&cb.prob)
            .map(|(x, y)| wa * x + wb * y)
            .collect();
        let mut neighbors = ca.neighbors;
        for (k, w) in cb.neighbors {
            *neighbors.entry(k).or_default() += w;
        }
        neighbors.remove(&a);
        neighbors.remove(&b);
        for (&k, &w) in &neighbors {
            let other = communities[k].as_mut().expect("neighbour is alive");
            other.neighbors.remove(&a);
            other.neighbors.remove(&b);
            other.neighbors.insert(id, w);
        }
        let keys: Vec<usize> = neighbors.keys().copied().collect();
        communities.push(Some(Community {
            size,
            prob,
            min_rank: ca.min_rank.min(cb.min_rank),
            neighbors,
            total_degree: ca.total_degree + cb.total_degree,
        }));
        for k in keys {
            push(&mut heap, &communities, id, k);
        }

        merges.push((a, b));
        if q > best_q {
            best_q = q;
            best_len = merges.len();
        }
    }

    // Replay the best prefix of the merge sequence.
    let mut members: Vec<Vec<usize>> = (0..n).map(|u| vec![u]).collect();
    for &(a, b) in &merges[..best_len] {
        let mut joined = std::mem::take(&mut members[a]);
        joined.append(&mut members[b]);
        members.push(joined);
    }
    let mut groups: Vec<Vec<NodeId>> = members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|mut m| {
            m.sort_unstable();
            m.into_iter().map(|r| NodeId(canon[r])).collect()
        })
        .collect();
    groups.sort_by(|x, y| {
        y.len()
            .cmp(&x.len())
            .then_with(|| g.file(x[0]).cmp(g.file(y[0])))
    });

    let mut label = vec![0; n];
    for (c, m) in groups.iter().enumerate() {
        for v in m {
            label[v.index()] = c;
        }
    }
    CommunityPartition {
        modularity_q: modularity_from_labels(g, &label, groups.len()),
        communities: groups,
        walk_length,
    }
}
