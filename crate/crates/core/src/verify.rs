//! Independent checkers. Nothing here reuses the traversal code of the
//! constructions: supports are read back as plain labelled graphs.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::embedding::{EmbeddedGraph, VertexId};
use crate::error::{Error, Result};
use crate::supports::SupportResult;
use crate::system::{Color, GraphSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("hyperedge {edge:?} mentions {element:?}, which is not a candidate vertex")]
    UnknownElement { edge: String, element: String },
    #[error("element {0:?} has no color")]
    Uncolored(String),
    #[error("primal mode needs a coloring")]
    MissingColoring,
    #[error("intersection mode needs a K family")]
    MissingK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypergraphMode {
    Primal,
    Dual,
    Intersection,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Hypergraph {
    pub ground: BTreeSet<String>,
    pub edges: BTreeMap<String, BTreeSet<String>>,
}

/// `Ok(())`, or the name of the first hyperedge that fails.
pub type Verdict = std::result::Result<(), String>;

pub fn extract_hypergraph(sys: &GraphSystem, mode: HypergraphMode) -> Result<Hypergraph> {
    let host = sys.host();
    let mut hg = Hypergraph::default();
    match mode {
        HypergraphMode::Primal => {
            if sys.coloring().is_none() {
                return Err(VerifyError::MissingColoring.into());
            }
            let blue = |v: &VertexId| sys.color(*v) == Some(Color::Blue);
            hg.ground = host.vertices().filter(blue).map(|v| sys.name(v)).collect();
            for (name, set) in sys.h() {
                hg.edges.insert(name.clone(), set.iter().filter(|v| blue(v)).map(|&v| sys.name(v)).collect());
            }
        }
        HypergraphMode::Dual => {
            hg.ground = sys.h().keys().cloned().collect();
            for v in host.vertices() {
                let at = sys.h().iter().filter(|(_, s)| s.contains(&v)).map(|(n, _)| n.clone()).collect();
                hg.edges.insert(sys.name(v), at);
            }
        }
        HypergraphMode::Intersection => {
            let k = sys.k().ok_or(VerifyError::MissingK)?;
            hg.ground = sys.h().keys().cloned().collect();
            for (kname, kset) in k {
                let meet = sys.h().iter().filter(|(_, s)| !s.is_disjoint(kset)).map(|(n, _)| n.clone()).collect();
                hg.edges.insert(kname.clone(), meet);
            }
        }
    }
    Ok(hg)
}

/// A candidate support as an undirected labelled graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportGraph {
    adj: BTreeMap<String, BTreeSet<String>>,
}

impl SupportGraph {
    pub fn new<I, S>(vertices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SupportGraph { adj: vertices.into_iter().map(|v| (v.into(), BTreeSet::new())).collect() }
    }

    pub fn from_edges<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Self {
        let mut g = SupportGraph::new(vertices.iter().map(|v| v.as_ref().to_string()));
        for (a, b) in edges {
            g.add_edge(a.as_ref(), b.as_ref());
        }
        g
    }

    pub fn complete<'a>(ground: impl IntoIterator<Item = &'a String>) -> Self {
        let vs: Vec<String> = ground.into_iter().cloned().collect();
        let mut g = SupportGraph::new(vs.iter().cloned());
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                g.add_edge(&vs[i], &vs[j]);
            }
        }
        g
    }

    pub fn from_embedded(graph: &EmbeddedGraph, label: impl Fn(VertexId) -> String) -> Self {
        let mut g = SupportGraph::new(graph.vertices().map(&label));
        for (_, u, w) in graph.edges() {
            g.add_edge(&label(u), &label(w));
        }
        g
    }

    pub fn from_result(r: &SupportResult) -> Self {
        Self::from_embedded(&r.support, |v| r.vertex_meaning[&v].clone())
    }

    /// Adds an edge, creating missing endpoints. Loops are ignored.
    pub fn add_edge(&mut self, a: &str, b: &str) {
        if a == b {
            self.adj.entry(a.to_string()).or_default();
            return;
        }
        self.adj.entry(a.to_string()).or_default().insert(b.to_string());
        self.adj.entry(b.to_string()).or_default().insert(a.to_string());
    }

    pub fn vertices(&self) -> impl Iterator<Item = &String> {
        self.adj.keys()
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        self.adj
            .iter()
            .flat_map(|(a, ns)| ns.iter().filter(move |b| a < *b).map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    pub fn neighbors(&self, a: &str) -> impl Iterator<Item = &String> {
        self.adj.get(a).into_iter().flatten()
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.adj.get(a).is_some_and(|n| n.contains(b))
    }

    fn check_elements(&self, hg: &Hypergraph) -> Result<()> {
        for (name, e) in &hg.edges {
            if let Some(x) = e.iter().find(|x| !self.adj.contains_key(*x)) {
                return Err(VerifyError::UnknownElement { edge: name.clone(), element: x.clone() }.into());
            }
        }
        Ok(())
    }

    fn induced_connected(&self, set: &BTreeSet<String>) -> bool {
        let Some(start) = set.iter().next() else { return true };
        let mut seen: BTreeSet<&String> = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for y in &self.adj[x] {
                if set.contains(y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.len() == set.len()
    }

    fn has_edge_between(&self, xs: &BTreeSet<String>, ys: &BTreeSet<String>) -> bool {
        xs.iter().any(|x| self.adj[x].iter().any(|y| ys.contains(y)))
    }
}

/// Every hyperedge induces a connected subgraph.
pub fn is_support(candidate: &SupportGraph, hg: &Hypergraph) -> Result<Verdict> {
    candidate.check_elements(hg)?;
    Ok(match hg.edges.iter().find(|(_, e)| !candidate.induced_connected(e)) {
        Some((name, _)) => Err(name.clone()),
        None => Ok(()),
    })
}

/// Every hyperedge with at least two elements induces at least one edge.
pub fn is_weak_support(candidate: &SupportGraph, hg: &Hypergraph) -> Result<Verdict> {
    candidate.check_elements(hg)?;
    Ok(match hg.edges.iter().find(|(_, e)| e.len() >= 2 && !candidate.has_edge_between(e, e)) {
        Some((name, _)) => Err(name.clone()),
        None => Ok(()),
    })
}

/// Every hyperedge with both colors induces an edge joining the two colors.
pub fn is_weak_bipartite_support(candidate: &SupportGraph, hg: &Hypergraph, coloring: &BTreeMap<String, Color>) -> Result<Verdict> {
    candidate.check_elements(hg)?;
    for (name, e) in &hg.edges {
        let mut blue = BTreeSet::new();
        let mut red = BTreeSet::new();
        for x in e {
            match coloring.get(x) {
                Some(Color::Blue) => blue.insert(x.clone()),
                Some(Color::Red) => red.insert(x.clone()),
                None => return Err(VerifyError::Uncolored(x.clone()).into()),
            };
        }
        if !blue.is_empty() && !red.is_empty() && !candidate.has_edge_between(&blue, &red) {
            return Ok(Err(name.clone()));
        }
    }
    Ok(Ok(()))
}

/// Every hyperedge with at least two elements sees two colors.
pub fn check_no_monochromatic(hg: &Hypergraph, coloring: &BTreeMap<String, usize>) -> Result<Verdict> {
    for (name, e) in &hg.edges {
        let mut colors = BTreeSet::new();
        for x in e {
            colors.insert(*coloring.get(x).ok_or_else(|| VerifyError::Uncolored(x.clone()))?);
        }
        if e.len() >= 2 && colors.len() < 2 {
            return Ok(Err(name.clone()));
        }
    }
    Ok(Ok(()))
}

/// Genus of the embedding carried by `g`, summed over components, by
/// tracing faces directly from the rotations.
pub fn certify_genus(g: &EmbeddedGraph) -> u32 {
    let mut seen = HashSet::new();
    let mut faces = 0i64;
    for v in g.vertices() {
        for &d in g.rotation(v) {
            if !seen.insert(d) {
                continue;
            }
            faces += 1;
            let mut x = d;
            loop {
                // next dart on the face: the successor of the twin at its owner
                let t = x.twin();
                let at = g.head(x);
                let rot = g.rotation(at);
                let i = rot.iter().position(|&y| y == t).expect("twin in rotation");
                x = rot[(i + 1) % rot.len()];
                if !seen.insert(x) {
                    break;
                }
            }
        }
    }
    // isolated vertices bound one face each
    let mut comps = 0i64;
    let mut done = BTreeSet::new();
    for v in g.vertices() {
        if !done.insert(v) {
            continue;
        }
        comps += 1;
        if g.degree(v) == 0 {
            faces += 1;
        }
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &d in g.rotation(x) {
                let y = g.head(d);
                if done.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    let (n, m) = (g.vertex_count() as i64, g.edge_count() as i64);
    // sum over components of (2 - V_i + E_i - F_i) / 2
    ((2 * comps - n + m - faces) / 2) as u32
}

pub const BRUTE_FORCE_SUPPORT_LIMIT: usize = 8;
const ROTATION_LIMIT: u128 = 20_000_000;

/// Whether some support of genus at most `genus_budget` exists, by
/// enumerating inclusion-minimal supports and, for each, the rotation
/// systems of each component.
pub fn brute_force_support_exists(hg: &Hypergraph, genus_budget: u32) -> Result<bool> {
    let ground: Vec<&String> = hg.ground.iter().collect();
    let n = ground.len();
    if n > BRUTE_FORCE_SUPPORT_LIMIT {
        return Err(Error::SizeGuard { what: "ground set", got: n, limit: BRUTE_FORCE_SUPPORT_LIMIT });
    }
    let idx: BTreeMap<&String, usize> = ground.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for (name, e) in &hg.edges {
        let mut ids = Vec::new();
        for x in e {
            ids.push(*idx.get(x).ok_or_else(|| VerifyError::UnknownElement { edge: name.clone(), element: x.clone() })?);
        }
        if ids.len() >= 2 {
            edges.push(ids);
        }
    }
    let pair = |a: usize, b: usize| {
        let (a, b) = (a.min(b), a.max(b));
        a * n + b
    };
    let mut seen = HashSet::new();
    let mut stack: Vec<u64> = vec![0];
    while let Some(mask) = stack.pop() {
        if !seen.insert(mask) {
            continue;
        }
        let has = |a: usize, b: usize| mask >> pair(a, b) & 1 == 1;
        let broken = edges.iter().find_map(|e| {
            let comp = components_within(e, &has);
            (comp.iter().collect::<BTreeSet<_>>().len() > 1).then_some((e, comp))
        });
        match broken {
            None => {
                if min_genus_at_most(n, mask, genus_budget)? {
                    return Ok(true);
                }
            }
            Some((e, comp)) => {
                if !euler_allows(n, mask, genus_budget) {
                    continue;
                }
                for i in 0..e.len() {
                    for j in i + 1..e.len() {
                        if comp[i] != comp[j] {
                            stack.push(mask | 1 << pair(e[i], e[j]));
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}

/// Component label of each element of `e` in the subgraph it induces.
fn components_within(e: &[usize], has: &impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut label: Vec<usize> = (0..e.len()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..e.len() {
            for j in 0..e.len() {
                if i != j && has(e[i], e[j]) && label[j] < label[i] {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
    }
    label
}

fn mask_adjacency(n: usize, mask: u64) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if mask >> (a * n + b) & 1 == 1 {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    adj
}

/// Simple-graph Euler bound: a component with V ≥ 3 and genus g has at most
/// 3(V - 2 + 2g) edges.
fn euler_allows(n: usize, mask: u64, budget: u32) -> bool {
    let adj = mask_adjacency(n, mask);
    let need: u32 = split_components(&adj)
        .iter()
        .map(|c| {
            let v = c.len() as i64;
            let e = c.iter().map(|&x| adj[x].len()).sum::<usize>() as i64 / 2;
            if v < 3 || e <= 3 * (v - 2) {
                0
            } else {
                ((e - 3 * (v - 2)) as u32).div_ceil(6)
            }
        })
        .sum();
    need <= budget
}

fn split_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &y in &adj[comp[i]] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

fn min_genus_at_most(n: usize, mask: u64, budget: u32) -> Result<bool> {
    if !euler_allows(n, mask, budget) {
        return Ok(false);
    }
    let adj = mask_adjacency(n, mask);
    let mut total = 0u32;
    for comp in split_components(&adj) {
        total += component_min_genus(&adj, &comp, budget - total.min(budget))?;
        if total > budget {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum genus of one component, or `cap + 1` if it exceeds `cap`.
fn component_min_genus(adj: &[Vec<usize>], comp: &[usize], cap: u32) -> Result<u32> {
    let v = comp.len() as i64;
    let e = comp.iter().map(|&x| adj[x].len()).sum::<usize>() as i64 / 2;
    if e == 0 {
        return Ok(0);
    }
    let combos: u128 = comp.iter().map(|&x| (1..adj[x].len().max(1) as u128).product::<u128>()).product();
    if combos > ROTATION_LIMIT {
        return Err(Error::SizeGuard { what: "rotation systems", got: combos.min(usize::MAX as u128) as usize, limit: ROTATION_LIMIT as usize });
    }
    // rotation at x: adj[x][0] first, then a permutation of the rest
    let mut perms: Vec<Vec<Vec<usize>>> = Vec::new();
    for &x in comp {
        let rest: Vec<usize> = adj[x][1..].to_vec();
        let mut all = Vec::new();
        permutations(&rest, &mut Vec::new(), &mut vec![false; rest.len()], &mut all);
        perms.push(all.into_iter().map(|mut p| {
            p.insert(0, adj[x][0]);
            p
        }).collect());
    }
    let pos: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut best_faces = 0i64;
    let mut choice = vec![0usize; comp.len()];
    loop {
        let rot: Vec<&Vec<usize>> = choice.iter().enumerate().map(|(i, &c)| &perms[i][c]).collect();
        best_faces = best_faces.max(count_faces(comp, &pos, &rot));
        if (2 - v + e - best_faces) / 2 == 0 {
            return Ok(0);
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                let g = ((2 - v + e - best_faces) / 2) as u32;
                return Ok(g.min(cap + 1));
            }
            choice[i] += 1;
            if choice[i] < perms[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn permutations(items: &[usize], cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == items.len() {
        out.push(cur.clone());
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            cur.push(items[i]);
            permutations(items, cur, used, out);
            cur.pop();
            used[i] = false;
        }
    }
}

fn count_faces(comp: &[usize], pos: &BTreeMap<usize, usize>, rot: &[&Vec<usize>]) -> i64 {
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut faces = 0;
    for &x in comp {
        for &y in rot[pos[&x]] {
            if seen.contains(&(x, y)) {
                continue;
            }
            faces += 1;
            let (mut a, mut b) = (x, y);
            while seen.insert((a, b)) {
                let r = rot[pos[&b]];
                let i = r.iter().position(|&z| z == a).expect("simple graph");
                let c = r[(i + 1) % r.len()];
                (a, b) = (b, c);
            }
        }
    }
    faces
}
