//! Independent oracles and helpers shared by the integration tests.
//!
//! Every oracle here works from a dense adjacency matrix or brute-force
//! enumeration, never from the library's own algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use vdfrank::graph::VdfGraph;
use vdfrank::ingest::{parse_scan, InputFormat, ScanDocument};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn hub_scan() -> ScanDocument {
    let bytes = std::fs::read(fixture_path("hub_scan.json")).unwrap();
    parse_scan(bytes.as_slice(), InputFormat::VividJson).unwrap().document
}

pub fn hub_foi() -> BTreeSet<String> {
    let text = std::fs::read_to_string(fixture_path("hub_foi.txt")).unwrap();
    vdfrank::prioritize::parse_foi(&text).unwrap()
}

pub const HUB: &str = "src/main/java/org/owasp/webgoat/container/users/WebGoatUser.java";

pub fn node_name(i: usize) -> String {
    format!("n{i:02}")
}

/// Random digraph on `n` nodes: each ordered pair `(i, j)`, `i != j`, is an
/// edge with probability `p` and a weight drawn from `weights`.
pub fn random_digraph(rng: &mut StdRng, n: usize, p: f64, weights: &[f64]) -> VdfGraph {
    let names: Vec<String> = (0..n).map(node_name).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                let w = weights[rng.gen_range(0..weights.len())];
                edges.push((i, j, w));
            }
        }
    }
    let list: Vec<(&str, &str, f64)> = edges
        .iter()
        .map(|&(i, j, w)| (names[i].as_str(), names[j].as_str(), w))
        .collect();
    VdfGraph::from_edge_list(names.iter().map(String::as_str), &list)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Dense `A[i][j] = weight(i -> j)`, self-loops dropped.
pub fn dense_adjacency(g: &VdfGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for e in g.edges() {
        if !e.is_self_loop() {
            a[(e.from.index(), e.to.index())] += e.weight;
        }
    }
    a
}

/// True when every node reaches every other along positive-weight edges.
pub fn strongly_connected(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    let reach = |transpose: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let x = if transpose { a[(w, v)] } else { a[(v, w)] };
                if x > 0.0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    n > 0 && reach(false) && reach(true)
}

/// Betweenness by explicit enumeration of every shortest path.
///
/// Hop distances come from Floyd–Warshall; paths are then listed one by one
/// with a depth-first search pruned to the known distance.
pub fn brute_force_betweenness(g: &VdfGraph) -> Vec<f64> {
    let n = g.node_count();
    let inf = usize::MAX / 4;
    let mut adj = vec![vec![false; n]; n];
    for e in g.edges() {
        if !e.is_self_loop() {
            adj[e.from.index()][e.to.index()] = true;
        }
    }
    let mut dist = vec![vec![inf; n]; n];
    for i in 0..n {
        dist[i][i] = 0;
        for j in 0..n {
            if adj[i][j] {
                dist[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }

    fn walk(
        v: usize,
        t: usize,
        left: usize,
        adj: &[Vec<bool>],
        dist: &[Vec<usize>],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for w in 0..adj.len() {
            if adj[v][w] && left >= 1 && dist[w][t] == left - 1 {
                path.push(w);
                walk(w, t, left - 1, adj, dist, path, out);
                path.pop();
            }
        }
    }

    let mut cb = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] >= inf {
                continue;
            }
            let mut paths = Vec::new();
            walk(s, t, dist[s][t], &adj, &dist, &mut vec![s], &mut paths);
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    cb[v] += 1.0 / total;
                }
            }
        }
    }
    cb
}

/// Dominant eigenpair of `m` from a dense eigen-solver: the eigenvalue with
/// the largest real part, and the null vector of `m − λI` (smallest singular
/// value), max-normalized with non-negative sign.
pub fn dense_dominant_eigenvector(m: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eigs = m.complex_eigenvalues();
    let lambda = eigs.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    let n = m.nrows();
    let shifted = m - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let row: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let sign = if row.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let row: Vec<f64> = row.iter().map(|x| x * sign).collect();
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lambda, row.iter().map(|x| x / max).collect())
}

/// PageRank as the solution of the linear system `(I − G) x = 0`,
/// `Σ x = 1`, where `G` is the dense Google matrix with uniform dangling
/// redistribution.
pub fn dense_pagerank(g: &VdfGraph, d: f64) -> Vec<f64> {
    let n = g.node_count();
    let a = dense_adjacency(g);
    let nf = n as f64;
    let mut google = DMatrix::zeros(n, n);
    for j in 0..n {
        let out: f64 = (0..n).map(|k| a[(j, k)]).sum();
        for i in 0..n {
            let walk = if out > 0.0 { a[(j, i)] / out } else { 1.0 / nf };
            google[(i, j)] = d * walk + (1.0 - d) / nf;
        }
    }
    let mut system = DMatrix::identity(n, n) - google;
    for j in 0..n {
        system[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let x = system.lu().solve(&rhs).expect("nonsingular PageRank system");
    x.iter().copied().collect()
}

/// Reference power method on the dense Google matrix, run to a fixed
/// iteration count.
pub fn dense_pagerank_power(g: &VdfGraph, d: f64, iterations: usize) -> Vec<f64> {
    let n = g.node_count();
    let a = dense_adjacency(g);
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    for _ in 0..iterations {
        let mut next = vec![(1.0 - d) / nf; n];
        for j in 0..n {
            let out: f64 = (0..n).map(|k| a[(j, k)]).sum();
            for i in 0..n {
                let walk = if out > 0.0 { a[(j, i)] / out } else { 1.0 / nf };
                next[i] += d * walk * x[j];
            }
        }
        x = next;
    }
    x
}

/// Maximal cliques (size ≥ 2) of the undirected projection, by testing
/// every vertex subset.
pub fn exhaustive_maximal_cliques(g: &VdfGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    assert!(n <= 16, "subset enumeration is exponential");
    let mut adj = vec![0u32; n];
    for e in g.edges() {
        let (a, b) = (e.from.index(), e.to.index());
        if a != b {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    let is_clique = |s: u32| (0..n).all(|v| s & (1 << v) == 0 || (s & !(1 << v)) & !adj[v] == 0);
    let mut out = Vec::new();
    for s in 1u32..(1 << n) {
        if s.count_ones() < 2 || !is_clique(s) {
            continue;
        }
        let extendable = (0..n).any(|v| s & (1 << v) == 0 && s & !adj[v] == 0);
        if !extendable {
            out.push((0..n).filter(|&v| s & (1 << v) != 0).collect());
        }
    }
    out.sort();
    out
}

pub fn clique_membership(n: usize, cliques: &[Vec<usize>]) -> Vec<f64> {
    let mut count = vec![0.0; n];
    for c in cliques {
        for &v in c {
            count[v] += 1.0;
        }
    }
    count
}

/// Minimal GraphML reader: just enough XML to recover keys, nodes, edges
/// and their `<data>` payloads.
#[derive(Debug, Default)]
pub struct ParsedGraphMl {
    pub directed: bool,
    /// key id -> (for, attr.name, attr.type)
    pub keys: BTreeMap<String, (String, String, String)>,
    pub nodes: Vec<(String, BTreeMap<String, String>)>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

fn xml_unescape(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&amp;", "&")
}

fn xml_attrs(tag: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut rest = tag;
    while let Some(eq) = rest.find("=\"") {
        let name = rest[..eq].rsplit(|c: char| c.is_whitespace()).next().unwrap().to_string();
        let after = &rest[eq + 2..];
        let end = after.find('"').expect("unterminated attribute");
        out.insert(name, xml_unescape(&after[..end]));
        rest = &after[end + 1..];
    }
    out
}

pub fn parse_graphml(text: &str) -> Result<ParsedGraphMl, String> {
    let mut doc = ParsedGraphMl::default();
    let mut pos = 0;
    let mut stack: Vec<String> = Vec::new();
    let mut current_data: Option<(String, usize)> = None;
    let mut current_target: Option<BTreeMap<String, String>> = None;
    let mut current_kind = String::new();
    let mut current_ids: (String, String) = Default::default();
    let mut saw_root = false;
    while let Some(open) = text[pos..].find('<') {
        let start = pos + open;
        let close = text[start..].find('>').ok_or("unterminated tag")? + start;
        let tag = &text[start + 1..close];
        pos = close + 1;
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let name = name.trim();
            let top = stack.pop().ok_or("unbalanced close tag")?;
            if top != name {
                return Err(format!("expected </{top}>, found </{name}>"));
            }
            match name {
                "data" => {
                    let (key, body_start) = current_data.take().ok_or("stray </data>")?;
                    let body = xml_unescape(&text[body_start..start]);
                    current_target
                        .as_mut()
                        .ok_or("<data> outside node/edge")?
                        .insert(key, body);
                }
                "node" => {
                    let data = current_target.take().unwrap();
                    doc.nodes.push((current_ids.0.clone(), data));
                }
                "edge" => {
                    let data = current_target.take().unwrap();
                    doc.edges.push((current_ids.0.clone(), current_ids.1.clone(), data));
                }
                _ => {}
            }
            continue;
        }
        let self_closing = tag.ends_with('/');
        let body = tag.trim_end_matches('/');
        let name = body.split_whitespace().next().ok_or("empty tag")?.to_string();
        let attrs = xml_attrs(body);
        match name.as_str() {
            "graphml" => saw_root = true,
            "key" => {
                let get = |k: &str| attrs.get(k).cloned().ok_or(format!("key without {k}"));
                doc.keys.insert(get("id")?, (get("for")?, get("attr.name")?, get("attr.type")?));
            }
            "graph" => doc.directed = attrs.get("edgedefault").map(String::as_str) == Some("directed"),
            "node" => {
                current_kind = name.clone();
                current_ids = (attrs.get("id").cloned().ok_or("node without id")?, String::new());
                current_target = Some(BTreeMap::new());
            }
            "edge" => {
                current_kind = name.clone();
                current_ids = (
                    attrs.get("source").cloned().ok_or("edge without source")?,
                    attrs.get("target").cloned().ok_or("edge without target")?,
                );
                current_target = Some(BTreeMap::new());
            }
            "data" => {
                let key = attrs.get("key").cloned().ok_or("data without key")?;
                if !doc.keys.contains_key(&key) {
                    return Err(format!("data refers to undeclared key {key}"));
                }
                current_data = Some((key, pos));
            }
            other => return Err(format!("unexpected element <{other}> in {current_kind}")),
        }
        if self_closing {
            if name == "node" || name == "edge" {
                return Err("self-closing node/edge not expected".into());
            }
        } else {
            stack.push(name);
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed elements {stack:?}"));
    }
    if !saw_root {
        return Err("missing <graphml> root".into());
    }
    Ok(doc)
}

/// Minimal DOT reader for one `digraph` with quoted identifiers.
#[derive(Debug, Default)]
pub struct ParsedDot {
    pub nodes: Vec<(String, BTreeMap<String, String>)>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

#[derive(Debug, Clone, PartialEq)]
enum DotToken {
    Id(String),
    Sym(char),
    Arrow,
}

fn dot_tokens(text: &str) -> Result<Vec<DotToken>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next().ok_or("unterminated string")? {
                    '\\' => s.push(chars.next().ok_or("dangling escape")?),
                    '"' => break,
                    ch => s.push(ch),
                }
            }
            out.push(DotToken::Id(s));
        } else if c == '-' {
            chars.next();
            if chars.next() != Some('>') {
                return Err("expected ->".into());
            }
            out.push(DotToken::Arrow);
        } else if "{}[];,=".contains(c) {
            chars.next();
            out.push(DotToken::Sym(c));
        } else if c.is_alphanumeric() || c == '_' || c == '.' {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_alphanumeric() || ch == '_' || ch == '.' {
                    s.push(ch);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(DotToken::Id(s));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

pub fn parse_dot(text: &str) -> Result<ParsedDot, String> {
    let toks = dot_tokens(text)?;
    let mut i = 0;
    let expect = |i: &mut usize, t: DotToken| -> Result<(), String> {
        if toks.get(*i) == Some(&t) {
            *i += 1;
            Ok(())
        } else {
            Err(format!("expected {t:?} at token {i}, found {:?}", toks.get(*i)))
        }
    };
    expect(&mut i, DotToken::Id("digraph".into()))?;
    if matches!(toks.get(i), Some(DotToken::Id(_))) {
        i += 1;
    }
    expect(&mut i, DotToken::Sym('{'))?;
    let mut doc = ParsedDot::default();
    let attr_list = |i: &mut usize| -> Result<BTreeMap<String, String>, String> {
        let mut attrs = BTreeMap::new();
        if toks.get(*i) != Some(&DotToken::Sym('[')) {
            return Ok(attrs);
        }
        *i += 1;
        loop {
            match toks.get(*i) {
                Some(DotToken::Sym(']')) => {
                    *i += 1;
                    return Ok(attrs);
                }
                Some(DotToken::Sym(',')) => *i += 1,
                Some(DotToken::Id(k)) => {
                    let k = k.clone();
                    if toks.get(*i + 1) != Some(&DotToken::Sym('=')) {
                        return Err(format!("attribute {k} without value"));
                    }
                    match toks.get(*i + 2) {
                        Some(DotToken::Id(v)) => {
                            attrs.insert(k, v.clone());
                            *i += 3;
                        }
                        other => return Err(format!("bad attribute value {other:?}")),
                    }
                }
                other => return Err(format!("bad attribute list near {other:?}")),
            }
        }
    };
    loop {
        match toks.get(i).cloned() {
            Some(DotToken::Sym('}')) => {
                i += 1;
                break;
            }
            Some(DotToken::Id(a)) => {
                i += 1;
                if a == "node" || a == "edge" || a == "graph" {
                    attr_list(&mut i)?;
                } else if toks.get(i) == Some(&DotToken::Arrow) {
                    i += 1;
                    let b = match toks.get(i) {
                        Some(DotToken::Id(b)) => b.clone(),
                        other => return Err(format!("edge target expected, found {other:?}")),
                    };
                    i += 1;
                    let attrs = attr_list(&mut i)?;
                    doc.edges.push((a, b, attrs));
                } else {
                    let attrs = attr_list(&mut i)?;
                    doc.nodes.push((a, attrs));
                }
                expect(&mut i, DotToken::Sym(';'))?;
            }
            other => return Err(format!("unexpected token {other:?}")),
        }
    }
    if i != toks.len() {
        return Err("trailing tokens after graph".into());
    }
    Ok(doc)
}
