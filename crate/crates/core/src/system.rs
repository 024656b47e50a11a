//! Graph systems: an embedded host plus named families of connected,
//! induced subgraphs stored as vertex sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{DartId, EdgeId, EmbeddedGraph, EmbeddingError, VertexId};
use crate::par::{self, Execution};

pub type Family = BTreeMap<String, BTreeSet<VertexId>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    H,
    K,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::H => "H",
            FamilyKind::K => "K",
        })
    }
}

/// Which families an operation looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    H,
    K,
    Both,
}

impl Scope {
    pub fn includes(self, kind: FamilyKind) -> bool {
        matches!(
            (self, kind),
            (Scope::Both, _) | (Scope::H, FamilyKind::H) | (Scope::K, FamilyKind::K)
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("host graph is disconnected ({0} components)")]
    HostDisconnected(usize),
    #[error("{kind} member {name:?} is empty")]
    EmptyMember { kind: FamilyKind, name: String },
    #[error("{kind} member {name:?} mentions unknown vertex {vertex}")]
    UnknownVertex { kind: FamilyKind, name: String, vertex: String },
    #[error("{kind} member {name:?} is disconnected: {components:?}")]
    DisconnectedMember { kind: FamilyKind, name: String, components: Vec<Vec<String>> },
    #[error("vertex name {0:?} is used twice")]
    DuplicateName(String),
    #[error("unknown vertex name {0:?}")]
    UnknownName(String),
    #[error("coloring does not cover vertex {0}")]
    IncompleteColoring(String),
    #[error("no {kind} member named {name:?}")]
    UnknownMember { kind: FamilyKind, name: String },
}

/// A pair of members that cross at a vertex, with four darts around the
/// contracted vertex alternating between the two exclusive sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingWitness {
    pub kind: FamilyKind,
    pub first: String,
    pub second: String,
    pub vertex: VertexId,
    pub darts: [DartId; 4],
}

impl fmt::Display for CrossingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} members {:?} and {:?} cross at {} (darts {}, {}, {}, {})",
            self.kind, self.first, self.second, self.vertex, self.darts[0], self.darts[1], self.darts[2], self.darts[3]
        )
    }
}

/// An ordered pair `(first, second)` where `first \ second` is disconnected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiercingWitness {
    pub kind: FamilyKind,
    pub first: String,
    pub second: String,
    pub components: Vec<Vec<VertexId>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepthProfile {
    pub vertex_depth: BTreeMap<VertexId, usize>,
    pub edge_depth: BTreeMap<EdgeId, usize>,
}

/// Sorted indices of the members containing a vertex (see
/// [`GraphSystem::member_list`] for the index order).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilySet(pub Vec<u32>);

impl FamilySet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn intersection_len(&self, other: &FamilySet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn is_subset(&self, other: &FamilySet) -> bool {
        self.intersection_len(other) == self.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSystem {
    pub(crate) host: EmbeddedGraph,
    pub(crate) names: BTreeMap<VertexId, String>,
    pub(crate) h: Family,
    pub(crate) k: Option<Family>,
    pub(crate) coloring: Option<BTreeMap<VertexId, Color>>,
}

impl GraphSystem {
    /// Builds and validates a system. Vertex names default to `v<id>`.
    pub fn new(host: EmbeddedGraph, h: Family) -> Result<Self, SystemError> {
        let names = host.vertices().map(|v| (v, v.0.to_string())).collect();
        let sys = GraphSystem { host, names, h, k: None, coloring: None };
        sys.validate()?;
        Ok(sys)
    }

    /// Builds a system from named rotations and named member vertex lists.
    pub fn from_names<S: AsRef<str>>(
        rotations: &[(S, Vec<S>)],
        h: &[(S, Vec<S>)],
    ) -> Result<Self, SystemError> {
        let mut ids: BTreeMap<String, VertexId> = BTreeMap::new();
        let mut names = BTreeMap::new();
        for (i, (name, _)) in rotations.iter().enumerate() {
            let name = name.as_ref().to_string();
            let v = VertexId(i as u32);
            if ids.insert(name.clone(), v).is_some() {
                return Err(SystemError::DuplicateName(name));
            }
            names.insert(v, name);
        }
        let lookup = |n: &str| ids.get(n).copied().ok_or_else(|| SystemError::UnknownName(n.to_string()));
        let mut rot = Vec::new();
        for (name, nbrs) in rotations {
            let v = lookup(name.as_ref())?;
            let ns = nbrs.iter().map(|n| lookup(n.as_ref())).collect::<Result<Vec<_>, _>>()?;
            rot.push((v, ns));
        }
        let host = EmbeddedGraph::from_neighbor_rotations(&rot)?;
        let h = family_from_names(FamilyKind::H, h, &ids)?;
        let sys = GraphSystem { host, names, h, k: None, coloring: None };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_names(mut self, names: BTreeMap<VertexId, String>) -> Result<Self, SystemError> {
        let mut seen = BTreeSet::new();
        for v in self.host.vertices() {
            let n = names.get(&v).cloned().unwrap_or_else(|| v.0.to_string());
            if !seen.insert(n.clone()) {
                return Err(SystemError::DuplicateName(n));
            }
            self.names.insert(v, n);
        }
        Ok(self)
    }

    pub fn with_k(mut self, k: Family) -> Result<Self, SystemError> {
        self.k = Some(k);
        self.validate()?;
        Ok(self)
    }

    pub fn with_k_names<S: AsRef<str>>(self, k: &[(S, Vec<S>)]) -> Result<Self, SystemError> {
        let ids = self.name_index();
        let k = family_from_names(FamilyKind::K, k, &ids)?;
        self.with_k(k)
    }

    pub fn with_coloring(mut self, coloring: BTreeMap<VertexId, Color>) -> Result<Self, SystemError> {
        for v in self.host.vertices() {
            if !coloring.contains_key(&v) {
                return Err(SystemError::IncompleteColoring(self.name(v)));
            }
        }
        self.coloring = Some(coloring);
        Ok(self)
    }

    /// Colors every vertex blue except the named ones.
    pub fn with_red_names<S: AsRef<str>>(self, red: &[S]) -> Result<Self, SystemError> {
        let ids = self.name_index();
        let mut col: BTreeMap<VertexId, Color> = self.host.vertices().map(|v| (v, Color::Blue)).collect();
        for r in red {
            let v = ids.get(r.as_ref()).ok_or_else(|| SystemError::UnknownName(r.as_ref().to_string()))?;
            col.insert(*v, Color::Red);
        }
        self.with_coloring(col)
    }

    /// Checks host connectivity and that every member is a non-empty,
    /// connected set of existing vertices.
    pub fn validate(&self) -> Result<(), SystemError> {
        self.host.validate()?;
        let comps = self.host.components().len();
        if comps > 1 {
            return Err(SystemError::HostDisconnected(comps));
        }
        for (kind, name, set) in self.members(Scope::Both) {
            if set.is_empty() {
                return Err(SystemError::EmptyMember { kind, name: name.to_string() });
            }
            self.check_member(kind, name, set)?;
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate) but tolerates empty members, which
    /// occur transiently inside the pipelines.
    pub fn validate_working(&self) -> Result<(), SystemError> {
        self.host.validate()?;
        for (kind, name, set) in self.members(Scope::Both) {
            self.check_member(kind, name, set)?;
        }
        Ok(())
    }

    fn check_member(&self, kind: FamilyKind, name: &str, set: &BTreeSet<VertexId>) -> Result<(), SystemError> {
        for &v in set {
            if !self.host.contains_vertex(v) {
                return Err(SystemError::UnknownVertex { kind, name: name.to_string(), vertex: v.to_string() });
            }
        }
        let comps = induced_components(&self.host, set);
        if comps.len() > 1 {
            return Err(SystemError::DisconnectedMember {
                kind,
                name: name.to_string(),
                components: comps.iter().map(|c| c.iter().map(|&v| self.name(v)).collect()).collect(),
            });
        }
        Ok(())
    }

    pub fn host(&self) -> &EmbeddedGraph {
        &self.host
    }

    pub fn h(&self) -> &Family {
        &self.h
    }

    pub fn k(&self) -> Option<&Family> {
        self.k.as_ref()
    }

    pub fn coloring(&self) -> Option<&BTreeMap<VertexId, Color>> {
        self.coloring.as_ref()
    }

    pub fn color(&self, v: VertexId) -> Option<Color> {
        self.coloring.as_ref().and_then(|c| c.get(&v).copied())
    }

    pub fn name(&self, v: VertexId) -> String {
        self.names.get(&v).cloned().unwrap_or_else(|| format!("_{}", v.0))
    }

    pub fn names(&self) -> &BTreeMap<VertexId, String> {
        &self.names
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.names.iter().find(|(_, n)| n.as_str() == name).map(|(v, _)| *v)
    }

    fn name_index(&self) -> BTreeMap<String, VertexId> {
        self.names.iter().map(|(v, n)| (n.clone(), *v)).collect()
    }

    pub fn family(&self, kind: FamilyKind) -> Option<&Family> {
        match kind {
            FamilyKind::H => Some(&self.h),
            FamilyKind::K => self.k.as_ref(),
        }
    }

    pub fn member(&self, kind: FamilyKind, name: &str) -> Option<&BTreeSet<VertexId>> {
        self.family(kind).and_then(|f| f.get(name))
    }

    /// All members in scope: H members by name, then K members by name.
    pub fn members(&self, scope: Scope) -> impl Iterator<Item = (FamilyKind, &str, &BTreeSet<VertexId>)> {
        let h = scope.includes(FamilyKind::H).then_some(&self.h);
        let k = if scope.includes(FamilyKind::K) { self.k.as_ref() } else { None };
        h.into_iter()
            .flat_map(|f| f.iter().map(|(n, s)| (FamilyKind::H, n.as_str(), s)))
            .chain(k.into_iter().flat_map(|f| f.iter().map(|(n, s)| (FamilyKind::K, n.as_str(), s))))
    }

    /// The members in scope in index order, as used by [`FamilySet`].
    pub fn member_list(&self, scope: Scope) -> Vec<(FamilyKind, String)> {
        self.members(scope).map(|(k, n, _)| (k, n.to_string())).collect()
    }

    /// Family set of every host vertex (vertices in no member map to the
    /// empty set).
    pub fn memberships(&self, scope: Scope) -> BTreeMap<VertexId, FamilySet> {
        let mut out: BTreeMap<VertexId, FamilySet> = self.host.vertices().map(|v| (v, FamilySet::default())).collect();
        for (i, (_, _, set)) in self.members(scope).enumerate() {
            for v in set {
                if let Some(fs) = out.get_mut(v) {
                    fs.0.push(i as u32);
                }
            }
        }
        out
    }

    pub fn depth_profile(&self, scope: Scope) -> DepthProfile {
        let ms = self.memberships(scope);
        depth_profile_from(&self.host, &ms)
    }

    /// Vertices whose depth strictly exceeds the depth of every incident
    /// non-loop edge, optionally restricted to one color.
    pub fn maximal_vertices(&self, scope: Scope, color: Option<Color>) -> Vec<VertexId> {
        let ms = self.memberships(scope);
        self.host
            .vertices()
            .filter(|&v| color.is_none() || self.color(v) == color)
            .filter(|&v| is_maximal(&self.host, &ms, v))
            .collect()
    }

    /// Groups of two or more vertices with identical family sets.
    pub fn twins(&self, scope: Scope) -> Vec<Vec<VertexId>> {
        let mut groups: BTreeMap<FamilySet, Vec<VertexId>> = BTreeMap::new();
        for (v, fs) in self.memberships(scope) {
            groups.entry(fs).or_default().push(v);
        }
        groups.into_values().filter(|g| g.len() > 1).collect()
    }

    /// Non-loop edges whose endpoints are twins.
    pub fn adjacent_twins(&self, scope: Scope) -> Vec<(EdgeId, VertexId, VertexId)> {
        let ms = self.memberships(scope);
        self.host.edges().filter(|&(_, u, w)| u != w && ms[&u] == ms[&w]).collect()
    }

    /// First crossing pair (H against H, K against K) in scan order, or
    /// `None` when the system is cross-free.
    pub fn first_crossing(&self, exec: Execution) -> Option<CrossingWitness> {
        let mut tasks: Vec<(FamilyKind, &str, &str, &BTreeSet<VertexId>, &BTreeSet<VertexId>, VertexId)> = Vec::new();
        for kind in [FamilyKind::H, FamilyKind::K] {
            let Some(fam) = self.family(kind) else { continue };
            let list: Vec<(&String, &BTreeSet<VertexId>)> = fam.iter().collect();
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    let (a, b) = (list[i].1, list[j].1);
                    let common: BTreeSet<VertexId> = a.intersection(b).copied().collect();
                    if common.is_empty() || common.len() == a.len() || common.len() == b.len() {
                        // nested members have an empty exclusive side
                        continue;
                    }
                    for comp in induced_components(&self.host, &common) {
                        tasks.push((kind, list[i].0, list[j].0, a, b, comp[0]));
                    }
                }
            }
        }
        par::find_first(exec, &tasks, |&(kind, n1, n2, a, b, v)| {
            crossing_at(&self.host, a, b, v).map(|darts| CrossingWitness {
                kind,
                first: n1.to_string(),
                second: n2.to_string(),
                vertex: v,
                darts,
            })
        })
    }

    pub fn is_cross_free(&self) -> bool {
        self.first_crossing(Execution::Parallel).is_none()
    }

    /// Cross-freeness of one pair at `v`.
    pub fn is_cross_free_at(&self, kind: FamilyKind, first: &str, second: &str, v: VertexId) -> Result<Option<[DartId; 4]>, SystemError> {
        let a = self.member(kind, first).ok_or_else(|| SystemError::UnknownMember { kind, name: first.into() })?;
        let b = self.member(kind, second).ok_or_else(|| SystemError::UnknownMember { kind, name: second.into() })?;
        Ok(crossing_at(&self.host, a, b, v))
    }

    /// First ordered pair within one family whose difference is
    /// disconnected.
    pub fn first_piercing(&self, exec: Execution) -> Option<PiercingWitness> {
        let mut tasks = Vec::new();
        for kind in [FamilyKind::H, FamilyKind::K] {
            let Some(fam) = self.family(kind) else { continue };
            for (n1, a) in fam {
                for (n2, b) in fam {
                    if n1 != n2 {
                        tasks.push((kind, n1, n2, a, b));
                    }
                }
            }
        }
        par::find_first(exec, &tasks, |&(kind, n1, n2, a, b)| {
            let diff: BTreeSet<VertexId> = a.difference(b).copied().collect();
            let comps = induced_components(&self.host, &diff);
            (comps.len() > 1).then(|| PiercingWitness {
                kind,
                first: n1.clone(),
                second: n2.clone(),
                components: comps,
            })
        })
    }

    pub fn is_non_piercing(&self) -> bool {
        self.first_piercing(Execution::Parallel).is_none()
    }

    /// Contracts a host edge into `survivor`, merging memberships: every
    /// member that contained the removed endpoint now contains the survivor.
    pub(crate) fn contract_into(&mut self, e: EdgeId, survivor: VertexId) -> Result<(), EmbeddingError> {
        let (u, w) = self.host.endpoints(e)?;
        let gone = if survivor == u { w } else { u };
        self.host.contract_edge_into(e, survivor)?;
        for fam in std::iter::once(&mut self.h).chain(self.k.iter_mut()) {
            for set in fam.values_mut() {
                if set.remove(&gone) {
                    set.insert(survivor);
                }
            }
        }
        if let Some(c) = self.coloring.as_mut() {
            c.remove(&gone);
        }
        self.names.remove(&gone);
        Ok(())
    }

    pub(crate) fn family_mut(&mut self, kind: FamilyKind) -> Option<&mut Family> {
        match kind {
            FamilyKind::H => Some(&mut self.h),
            FamilyKind::K => self.k.as_mut(),
        }
    }
}

fn family_from_names<S: AsRef<str>>(
    kind: FamilyKind,
    members: &[(S, Vec<S>)],
    ids: &BTreeMap<String, VertexId>,
) -> Result<Family, SystemError> {
    let mut fam = Family::new();
    for (name, verts) in members {
        let mut set = BTreeSet::new();
        for v in verts {
            let id = ids.get(v.as_ref()).ok_or_else(|| SystemError::UnknownVertex {
                kind,
                name: name.as_ref().to_string(),
                vertex: v.as_ref().to_string(),
            })?;
            set.insert(*id);
        }
        if fam.insert(name.as_ref().to_string(), set).is_some() {
            return Err(SystemError::DuplicateName(name.as_ref().to_string()));
        }
    }
    Ok(fam)
}

pub(crate) fn depth_profile_from(host: &EmbeddedGraph, ms: &BTreeMap<VertexId, FamilySet>) -> DepthProfile {
    let vertex_depth = ms.iter().map(|(v, fs)| (*v, fs.len())).collect();
    let edge_depth = host.edges().map(|(e, u, w)| (e, ms[&u].intersection_len(&ms[&w]))).collect();
    DepthProfile { vertex_depth, edge_depth }
}

pub(crate) fn is_maximal(host: &EmbeddedGraph, ms: &BTreeMap<VertexId, FamilySet>, v: VertexId) -> bool {
    let fv = &ms[&v];
    !fv.is_empty()
        && host.rotation(v).iter().all(|&d| {
            let w = host.head(d);
            w == v || ms[&w].intersection_len(fv) < fv.len()
        })
}

/// Connected components of the subgraph induced by `set`, each sorted, in
/// order of their smallest vertex.
pub fn induced_components(host: &EmbeddedGraph, set: &BTreeSet<VertexId>) -> Vec<Vec<VertexId>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in set {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for y in host.neighbors(x) {
                if set.contains(&y) && seen.insert(y) {
                    comp.push(y);
                    queue.push_back(y);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    A,
    B,
}

/// Darts around the vertex obtained by contracting the component of
/// `a ∩ b` that contains `v`, in rotation order, with their exclusive side.
/// Darts leading to vertices in both or neither set are skipped, as are
/// darts that become loops.
fn contracted_sides(host: &EmbeddedGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>, v: VertexId) -> Vec<(DartId, Side)> {
    let in_both = |x: VertexId| a.contains(&x) && b.contains(&x);
    // BFS spanning tree of the component
    let mut comp = BTreeSet::from([v]);
    let mut tree = BTreeSet::new();
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for &d in host.rotation(x) {
            let y = host.head(d);
            if in_both(y) && comp.insert(y) {
                tree.insert(d.edge());
                queue.push_back(y);
            }
        }
    }
    let Some(&start) = host.rotation(v).first() else { return Vec::new() };
    // Euler tour of the tree: crossing a tree edge continues after its twin
    // at the far end, which is exactly the spliced rotation after contraction.
    let mut out = Vec::new();
    let mut d = start;
    loop {
        if tree.contains(&d.edge()) {
            d = host.next_in_rotation(d.twin());
        } else {
            let y = host.head(d);
            if !comp.contains(&y) {
                match (a.contains(&y), b.contains(&y)) {
                    (true, false) => out.push((d, Side::A)),
                    (false, true) => out.push((d, Side::B)),
                    _ => {}
                }
            }
            d = host.next_in_rotation(d);
        }
        if d == start {
            break;
        }
    }
    out
}

/// Four darts alternating A, B, A, B if the cyclic side sequence has at
/// least four blocks.
fn alternation_witness(seq: &[(DartId, Side)]) -> Option<[DartId; 4]> {
    let n = seq.len();
    let boundary = (0..n).find(|&i| seq[i].1 != seq[(i + n - 1) % n].1)?;
    let mut firsts = Vec::with_capacity(4);
    for off in 0..n {
        let i = (boundary + off) % n;
        if off == 0 || seq[i].1 != seq[(i + n - 1) % n].1 {
            firsts.push(seq[i].0);
            if firsts.len() == 4 {
                return Some([firsts[0], firsts[1], firsts[2], firsts[3]]);
            }
        }
    }
    None
}

/// `None` if `a` and `b` are cross-free at `v`, otherwise four witness
/// darts. Vacuously cross-free when `v` is not in both sets.
pub fn crossing_at(host: &EmbeddedGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>, v: VertexId) -> Option<[DartId; 4]> {
    if !(a.contains(&v) && b.contains(&v)) {
        return None;
    }
    alternation_witness(&contracted_sides(host, a, b, v))
}

/// Host with every edge inside `a ∩ b` contracted and loops removed,
/// together with the map from original to reduced vertices.
#[derive(Clone, Debug)]
pub struct ReducedGraph {
    pub graph: EmbeddedGraph,
    pub origin: BTreeMap<VertexId, VertexId>,
}

pub fn reduced_graph(host: &EmbeddedGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> ReducedGraph {
    let mut g = host.clone();
    let mut origin: BTreeMap<VertexId, VertexId> = host.vertices().map(|v| (v, v)).collect();
    let inner: Vec<EdgeId> = host
        .edges()
        .filter(|&(_, u, w)| a.contains(&u) && b.contains(&u) && a.contains(&w) && b.contains(&w))
        .map(|(e, _, _)| e)
        .collect();
    for e in inner {
        let (u, w) = g.endpoints(e).expect("edge survives until contracted or looped");
        if u == w {
            continue;
        }
        let (keep, gone) = if u < w { (u, w) } else { (w, u) };
        g.contract_edge_into(e, keep).expect("non-loop");
        for o in origin.values_mut() {
            if *o == gone {
                *o = keep;
            }
        }
    }
    g.remove_loops();
    ReducedGraph { graph: g, origin }
}

/// Cross-freeness at `v` computed on the explicitly contracted graph. This
/// is slower than [`crossing_at`] and exists as an independent route.
pub fn crossing_at_reduced(host: &EmbeddedGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>, v: VertexId) -> Option<[DartId; 4]> {
    if !(a.contains(&v) && b.contains(&v)) {
        return None;
    }
    let r = reduced_graph(host, a, b);
    let tv = r.origin[&v];
    let side = |x: VertexId| -> Option<Side> {
        // a reduced vertex is on a side if its preimage is
        let pre: Vec<VertexId> = r.origin.iter().filter(|(_, &t)| t == x).map(|(o, _)| *o).collect();
        let in_a = pre.iter().any(|o| a.contains(o));
        let in_b = pre.iter().any(|o| b.contains(o));
        match (in_a, in_b) {
            (true, false) => Some(Side::A),
            (false, true) => Some(Side::B),
            _ => None,
        }
    };
    let seq: Vec<(DartId, Side)> = r
        .graph
        .rotation(tv)
        .iter()
        .filter_map(|&d| side(r.graph.head(d)).map(|s| (d, s)))
        .collect();
    alternation_witness(&seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(order: [&str; 4]) -> GraphSystem {
        let leaves: Vec<&str> = order.to_vec();
        let mut rot: Vec<(&str, Vec<&str>)> = vec![("v", leaves.clone())];
        for l in ["a", "b", "c", "d"] {
            rot.push((l, vec!["v"]));
        }
        GraphSystem::from_names(&rot, &[("H1", vec!["v", "a", "b"]), ("H2", vec!["v", "c", "d"])]).unwrap()
    }

    /// T_{3,3} with rotation (up, right, down, left) and all row and column
    /// cycles.
    fn torus_cycles() -> GraphSystem {
        let n = 3;
        let id = |r: usize, c: usize| format!("{r}{c}");
        let mut rot = Vec::new();
        for r in 0..n {
            for c in 0..n {
                rot.push((
                    id(r, c),
                    vec![id((r + n - 1) % n, c), id(r, (c + 1) % n), id((r + 1) % n, c), id(r, (c + n - 1) % n)],
                ));
            }
        }
        let mut h = Vec::new();
        for r in 0..n {
            h.push((format!("row{r}"), (0..n).map(|c| id(r, c)).collect()));
        }
        for c in 0..n {
            h.push((format!("col{c}"), (0..n).map(|r| id(r, c)).collect()));
        }
        GraphSystem::from_names(&rot, &h).unwrap()
    }

    #[test]
    fn star_in_order_is_cross_free_but_piercing() {
        let s = star(["a", "b", "c", "d"]);
        assert!(s.is_cross_free());
        let w = s.first_piercing(Execution::Sequential).unwrap();
        assert_eq!(w.components.len(), 2);
    }

    #[test]
    fn star_interleaved_crosses() {
        let s = star(["a", "c", "b", "d"]);
        let w = s.first_crossing(Execution::Sequential).unwrap();
        assert_eq!(w.vertex, s.vertex_by_name("v").unwrap());
        let heads: Vec<String> = w.darts.iter().map(|&d| s.name(s.host.head(d))).collect();
        assert_eq!(heads, ["a", "c", "b", "d"]);
    }

    #[test]
    fn torus_cycles_pierce_nothing_but_cross() {
        let t = torus_cycles();
        assert!(t.is_non_piercing());
        let w = t.first_crossing(Execution::Sequential).unwrap();
        assert_eq!(w.darts.len(), 4);
        assert_eq!(t.host.genus().unwrap(), 1);
    }

    #[test]
    fn torus_every_vertex_is_maximal() {
        let t = torus_cycles();
        let p = t.depth_profile(Scope::H);
        assert!(p.vertex_depth.values().all(|&d| d == 2));
        assert!(p.edge_depth.values().all(|&d| d == 1));
        assert_eq!(t.maximal_vertices(Scope::H, None).len(), 9);
    }

    #[test]
    fn reduced_graph_with_singleton_intersection_is_host() {
        let t = torus_cycles();
        let r = reduced_graph(&t.host, &t.h["row0"], &t.h["col0"]);
        assert_eq!(r.graph.vertex_count(), 9);
        assert_eq!(r.graph.edge_count(), 18);
    }

    #[test]
    fn reduced_graph_of_tree_collapses() {
        let sys = GraphSystem::from_names(
            &[("a", vec!["b"]), ("b", vec!["a", "c"]), ("c", vec!["b"])],
            &[("H", vec!["a", "b", "c"])],
        )
        .unwrap();
        let all = &sys.h["H"];
        let r = reduced_graph(&sys.host, all, all);
        assert_eq!(r.graph.vertex_count(), 1);
        assert_eq!(r.graph.edge_count(), 0);
    }

    #[test]
    fn single_edge_member() {
        let sys = GraphSystem::from_names(&[("u", vec!["w"]), ("w", vec!["u"])], &[("H", vec!["u", "w"])]).unwrap();
        assert!(sys.maximal_vertices(Scope::H, None).is_empty());
        assert_eq!(sys.twins(Scope::H).len(), 1);
        assert_eq!(sys.adjacent_twins(Scope::H).len(), 1);
    }

    #[test]
    fn depth_zero_is_never_maximal() {
        let sys = GraphSystem::from_names(&[("u", vec!["w"]), ("w", vec!["u"])], &[("H", vec!["u"])]).unwrap();
        assert_eq!(sys.maximal_vertices(Scope::H, None), vec![sys.vertex_by_name("u").unwrap()]);
    }

    #[test]
    fn disconnected_member_is_rejected() {
        let r = GraphSystem::from_names(
            &[("a", vec!["b"]), ("b", vec!["a", "c"]), ("c", vec!["b"])],
            &[("H", vec!["a", "c"])],
        );
        assert!(matches!(r, Err(SystemError::DisconnectedMember { .. })));
    }

    #[test]
    fn empty_member_is_rejected() {
        let r = GraphSystem::from_names(&[("a", vec![])], &[("H", vec![])]);
        assert!(matches!(r, Err(SystemError::EmptyMember { .. })));
    }

    #[test]
    fn both_routes_agree_on_small_cases() {
        for order in [["a", "b", "c", "d"], ["a", "c", "b", "d"], ["a", "d", "b", "c"]] {
            let s = star(order);
            let v = s.vertex_by_name("v").unwrap();
            let (a, b) = (&s.h["H1"], &s.h["H2"]);
            assert_eq!(crossing_at(&s.host, a, b, v).is_some(), crossing_at_reduced(&s.host, a, b, v).is_some());
        }
    }
}
