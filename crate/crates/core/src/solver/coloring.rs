use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::verify::{Hypergraph, SupportGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportColoring {
    pub colors: BTreeMap<String, usize>,
    pub color_count: usize,
    pub degeneracy: usize,
    /// Smallest-last elimination order.
    pub order: Vec<String>,
}

/// Greedy coloring of the support along a smallest-last order. Ground
/// elements of `hg` missing from the support are colored as isolated
/// vertices.
///
/// A proper coloring of a support leaves no hyperedge of size two or more
/// monochromatic, since each one induces a connected subgraph with an edge.
pub fn support_coloring(support: &SupportGraph, hg: &Hypergraph) -> SupportColoring {
    let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for v in support.vertices().chain(hg.ground.iter()) {
        adj.entry(v.as_str()).or_default();
    }
    for a in support.vertices() {
        adj.entry(a.as_str()).or_default().extend(support.neighbors(a).map(String::as_str));
    }

    // smallest-last: repeatedly remove a vertex of minimum remaining degree
    let mut degree: BTreeMap<&str, usize> = adj.iter().map(|(v, n)| (*v, n.len())).collect();
    let mut buckets: BTreeSet<(usize, &str)> = degree.iter().map(|(v, d)| (*d, *v)).collect();
    let mut removed = BTreeSet::new();
    let mut elimination = Vec::with_capacity(adj.len());
    let mut degeneracy = 0;
    while let Some((d, v)) = buckets.pop_first() {
        degeneracy = degeneracy.max(d);
        removed.insert(v);
        elimination.push(v);
        for &u in &adj[v] {
            if !removed.contains(u) {
                let du = degree.get_mut(u).unwrap();
                buckets.remove(&(*du, u));
                *du -= 1;
                buckets.insert((*du, u));
            }
        }
    }

    let mut colors: BTreeMap<String, usize> = BTreeMap::new();
    for &v in elimination.iter().rev() {
        let used: BTreeSet<usize> = adj[v].iter().filter_map(|u| colors.get(*u).copied()).collect();
        let c = (0..).find(|c| !used.contains(c)).unwrap();
        colors.insert(v.to_string(), c);
    }
    let color_count = colors.values().max().map_or(0, |m| m + 1);
    SupportColoring { colors, color_count, degeneracy, order: elimination.iter().map(|v| v.to_string()).collect() }
}
