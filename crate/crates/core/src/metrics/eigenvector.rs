//! Out- and in-eigenvector centrality by power iteration.
//!
//! Out-centrality solves `λ v = A v`, where `A[i][j]` is the weight of the
//! flow `i -> j`: a file scores high when it feeds high-scoring files.
//! In-centrality uses `Aᵀ` instead. Vectors are max-normalized, so the top
//! node always scores exactly 1.
//!
//! The iteration runs on `A + sI` with `s` the largest edge weight. The
//! shift leaves eigenvectors alone and moves every eigenvalue by `s`, which
//! breaks the tie between the Perron root and the other roots of the same
//! modulus that periodic graphs (a bipartite 2-cycle, say) would otherwise
//! oscillate between.
//!
//! On a graph without directed cycles `A` is nilpotent: the dominant
//! eigenvalue is 0 and the result is the all-zero vector, flagged
//! degenerate. Off the dominant strongly connected components, values may
//! legitimately converge to 0 as well.

use std::collections::VecDeque;

use super::{Metric, MetricVector};
use crate::graph::VdfGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig {
    /// Stop once successive iterates differ by less than this (max-norm).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub vector: MetricVector,
    pub lambda: f64,
    pub iterations: usize,
    /// `‖A v − λ v‖∞` for the returned vector.
    pub residual: f64,
    pub converged: bool,
    /// No positive-weight cycle: every value is 0.
    pub degenerate: bool,
}

/// Sparse rows of the iteration matrix: `(row, col, weight)` so that
/// `y[row] += weight * v[col]`.
fn iteration_entries(g: &VdfGraph, direction: Direction) -> Vec<(usize, usize, f64)> {
    g.edges()
        .iter()
        .filter(|e| !e.is_self_loop() && e.weight > 0.0)
        .map(|e| {
            let (i, j) = (e.from.index(), e.to.index());
            match direction {
                Direction::Out => (i, j, e.weight),
                Direction::In => (j, i, e.weight),
            }
        })
        .collect()
}

fn has_cycle(n: usize, entries: &[(usize, usize, f64)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(i, j, _) in entries {
        succ[i].push(j);
        indeg[j] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    seen < n
}

fn multiply(entries: &[(usize, usize, f64)], v: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for &(i, j, w) in entries {
        out[i] += w * v[j];
    }
}

pub fn eigenvector(g: &VdfGraph, direction: Direction, config: &EigenConfig) -> EigenResult {
    assert!(config.tol > 0.0, "tolerance must be positive");
    let name = match direction {
        Direction::Out => Metric::OutEigenvector,
        Direction::In => Metric::InEigenvector,
    };
    let n = g.node_count();
    let entries = iteration_entries(g, direction);

    if !has_cycle(n, &entries) {
        return EigenResult {
            vector: MetricVector::new(name.as_str(), g, vec![0.0; n]),
            lambda: 0.0,
            iterations: 0,
            residual: 0.0,
            converged: true,
            degenerate: true,
        };
    }

    let shift = entries.iter().map(|e| e.2).fold(0.0, f64::max);
    let mut v = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut lambda = 0.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iter {
        iterations += 1;
        multiply(&entries, &v, &mut next);
        for (y, x) in next.iter_mut().zip(&v) {
            *y += shift * x;
        }
        let peak = next.iter().copied().fold(0.0, f64::max);
        let mut change = 0.0_f64;
        for (y, x) in next.iter_mut().zip(&v) {
            *y /= peak;
            change = change.max((*y - x).abs());
        }
        std::mem::swap(&mut v, &mut next);
        lambda = peak - shift;
        if change < config.tol {
            converged = true;
            break;
        }
    }

    // Entries decaying towards zero stop at roughly the tolerance.
    let floor = 100.0 * config.tol;
    for x in v.iter_mut() {
        if *x <= floor {
            *x = 0.0;
        }
    }

    multiply(&entries, &v, &mut next);
    let residual = next
        .iter()
        .zip(&v)
        .map(|(av, x)| (av - lambda * x).abs())
        .fold(0.0, f64::max);

    EigenResult {
        vector: MetricVector::new(name.as_str(), g, v),
        lambda,
        iterations,
        residual,
        converged,
        degenerate: false,
    }
}
