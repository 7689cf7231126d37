//! Cross-clique connectivity: how many maximal cliques of the undirected
//! projection a file belongs to.
//!
//! The projection joins `u` and `v` when either flows into the other;
//! self-loops are dropped. Cliques are enumerated exhaustively with
//! Bron–Kerbosch (Tomita pivoting, degeneracy-ordered outer loop).
//! Single-node cliques are not counted, so isolated files score 0.

use super::{Metric, MetricVector};
use crate::error::{Error, Result};
use crate::graph::VdfGraph;

pub const DEFAULT_CLIQUE_CAP: usize = 1_000_000;

/// Sorted, de-duplicated neighbour lists of the undirected projection.
fn projection(g: &VdfGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        adj[e.from.index()].push(e.to.index());
        adj[e.to.index()].push(e.from.index());
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Smallest-last vertex order.
fn degeneracy_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
    for v in 0..n {
        buckets[degree[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut low = 0;
    while order.len() < n {
        low = low.min(max_deg);
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop().expect("non-empty bucket");
        if removed[v] || degree[v] != low {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !removed[w] {
                degree[w] -= 1;
                buckets[degree[w]].push(w);
                low = low.min(degree[w]);
            }
        }
    }
    order
}

struct Enumerator<'a> {
    adj: &'a [Vec<usize>],
    cap: usize,
    found: usize,
    sink: &'a mut dyn FnMut(&[usize]),
}

impl Enumerator<'_> {
    fn connected(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    fn expand(&mut self, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>) -> Result<()> {
        if p.is_empty() {
            if x.is_empty() {
                self.found += 1;
                if self.found > self.cap {
                    return Err(Error::Resource(format!(
                        "more than {} maximal cliques; raise the clique cap or drop cross_clique",
                        self.cap
                    )));
                }
                (self.sink)(r);
            }
            return Ok(());
        }
        // Pivot on the vertex of P ∪ X with the most neighbours in P.
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&w| self.connected(u, w)).count())
            .expect("P is non-empty");
        let candidates: Vec<usize> = p
            .iter()
            .copied()
            .filter(|&v| !self.connected(pivot, v))
            .collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            let np = p.iter().copied().filter(|&w| self.connected(v, w)).collect();
            let nx = x.iter().copied().filter(|&w| self.connected(v, w)).collect();
            r.push(v);
            self.expand(r, np, nx)?;
            r.pop();
            p.retain(|&w| w != v);
            x.push(v);
        }
        Ok(())
    }
}

/// Enumerate the maximal cliques (size ≥ 2) of the undirected
/// projection, each as sorted node indices. Fails with
/// [`Error::Resource`] once more than `cap` cliques are found.
pub fn maximal_cliques(g: &VdfGraph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut cliques = Vec::new();
    for_each_maximal_clique(g, cap, &mut |c| {
        let mut c = c.to_vec();
        c.sort_unstable();
        cliques.push(c);
    })?;
    cliques.sort();
    Ok(cliques)
}

fn for_each_maximal_clique(g: &VdfGraph, cap: usize, sink: &mut dyn FnMut(&[usize])) -> Result<()> {
    let adj = projection(g);
    let order = degeneracy_order(&adj);
    let mut position = vec![0; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut skip_singletons = |c: &[usize]| {
        if c.len() >= 2 {
            sink(c)
        }
    };
    let mut e = Enumerator {
        adj: &adj,
        cap,
        found: 0,
        sink: &mut skip_singletons,
    };
    for &v in &order {
        if adj[v].is_empty() {
            continue;
        }
        let (p, x): (Vec<usize>, Vec<usize>) =
            adj[v].iter().partition(|&&w| position[w] > position[v]);
        let mut r = vec![v];
        e.expand(&mut r, p, x)?;
    }
    Ok(())
}

pub fn cross_clique(g: &VdfGraph, cap: usize) -> Result<MetricVector> {
    let mut counts = vec![0.0; g.node_count()];
    for_each_maximal_clique(g, cap, &mut |c| {
        for &v in c {
            counts[v] += 1.0;
        }
    })?;
    Ok(MetricVector::new(Metric::CrossClique.as_str(), g, counts))
}
