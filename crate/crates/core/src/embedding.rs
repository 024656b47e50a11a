//! Combinatorial embeddings of multigraphs on oriented surfaces.
//!
//! An [`EmbeddedGraph`] is a rotation system: every vertex owns a cyclic,
//! counterclockwise sequence of darts (half-edges). Darts come in pairs
//! `2e` / `2e + 1` that together form edge `e`, so `twin(d) = d ^ 1`.
//! Faces are the orbits of `d -> next(twin(d))`, and for a connected graph
//! the genus of the surface the rotation system lives on follows from
//! Euler's formula `V - E + F = 2 - 2g`.
//!
//! Loops and parallel edges are first-class: contraction creates them and
//! only [`EmbeddedGraph::simplify`] removes them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DartId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for DartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl DartId {
    #[inline]
    pub fn twin(self) -> DartId {
        DartId(self.0 ^ 1)
    }

    #[inline]
    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 >> 1)
    }
}

impl EdgeId {
    #[inline]
    pub fn darts(self) -> (DartId, DartId) {
        (DartId(self.0 << 1), DartId((self.0 << 1) | 1))
    }
}

/// A dart together with the vertex whose rotation holds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dart {
    pub id: DartId,
    pub owner: VertexId,
    pub twin: DartId,
}

/// A face as the cyclic sequence of darts met while walking its boundary.
pub type Face = Vec<DartId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("vertex {0} does not exist")]
    MissingVertex(VertexId),
    #[error("edge {0} does not exist")]
    MissingEdge(EdgeId),
    #[error("malformed rotation system at {dart}: {reason}")]
    Structural { dart: DartId, reason: String },
    #[error("edge {0} is a loop and cannot be contracted")]
    LoopContraction(EdgeId),
    #[error("graph is disconnected ({0} components); operate per component")]
    Disconnected(usize),
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {0} has degree 0")]
    IsolatedVertex(VertexId),
    #[error("expected one attach flag per incident dart of {vertex} ({expected}), got {got}")]
    AttachLength { vertex: VertexId, expected: usize, got: usize },
    #[error("{0}")]
    InvalidRotation(String),
}

pub type Result<T> = std::result::Result<T, EmbeddingError>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmbeddedGraph {
    /// Owner of every dart slot; `None` once the edge has been deleted.
    owner: Vec<Option<VertexId>>,
    rotation: BTreeMap<VertexId, Vec<DartId>>,
    next_vertex: u32,
    edge_labels: BTreeMap<EdgeId, String>,
}

impl EmbeddedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from explicit per-vertex neighbor rotations.
    ///
    /// Only simple graphs can be described this way: each neighbor must appear
    /// once in a rotation and adjacency must be symmetric. Vertex ids are kept.
    pub fn from_neighbor_rotations(rotations: &[(VertexId, Vec<VertexId>)]) -> Result<Self> {
        let mut g = EmbeddedGraph::new();
        for (v, _) in rotations {
            if g.rotation.insert(*v, Vec::new()).is_some() {
                return Err(EmbeddingError::InvalidRotation(format!("vertex {v} listed twice")));
            }
            g.next_vertex = g.next_vertex.max(v.0 + 1);
        }
        // dart (u -> w) for every rotation entry
        let mut dart_of: BTreeMap<(VertexId, VertexId), DartId> = BTreeMap::new();
        for (u, nbrs) in rotations {
            let mut seen = BTreeSet::new();
            for w in nbrs {
                if !g.rotation.contains_key(w) {
                    return Err(EmbeddingError::InvalidRotation(format!(
                        "rotation of {u} mentions unknown vertex {w}"
                    )));
                }
                if w == u {
                    return Err(EmbeddingError::InvalidRotation(format!("loop at {u} in simple input")));
                }
                if !seen.insert(*w) {
                    return Err(EmbeddingError::InvalidRotation(format!(
                        "rotation of {u} mentions {w} more than once"
                    )));
                }
                let d = if let Some(&twin) = dart_of.get(&(*w, *u)) {
                    twin.twin()
                } else {
                    let e = g.new_edge_slot();
                    e.darts().0
                };
                g.owner[d.0 as usize] = Some(*u);
                dart_of.insert((*u, *w), d);
            }
        }
        for (u, nbrs) in rotations {
            let rot: Vec<DartId> = nbrs.iter().map(|w| dart_of[&(*u, *w)]).collect();
            g.rotation.insert(*u, rot);
        }
        for (&(u, w), &d) in &dart_of {
            if !dart_of.contains_key(&(w, u)) {
                return Err(EmbeddingError::Structural {
                    dart: d,
                    reason: format!("{w} does not list {u} although {u} lists {w}"),
                });
            }
        }
        Ok(g)
    }

    fn new_edge_slot(&mut self) -> EdgeId {
        let e = EdgeId((self.owner.len() / 2) as u32);
        self.owner.push(None);
        self.owner.push(None);
        e
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.rotation.insert(v, Vec::new());
        v
    }

    /// Adds a vertex with a caller-chosen id. Fails if the id is taken.
    pub fn add_vertex_with_id(&mut self, v: VertexId) -> Result<()> {
        if self.rotation.contains_key(&v) {
            return Err(EmbeddingError::InvalidRotation(format!("vertex {v} already exists")));
        }
        self.rotation.insert(v, Vec::new());
        self.next_vertex = self.next_vertex.max(v.0 + 1);
        Ok(())
    }

    /// Inserts an edge `u - w`, placing its darts at rotation index `pos_u`
    /// (resp. `pos_w`) around each endpoint. Indices are clamped to the
    /// rotation length. For a loop both darts go into `u`'s rotation.
    pub fn insert_edge(&mut self, u: VertexId, pos_u: usize, w: VertexId, pos_w: usize) -> Result<EdgeId> {
        self.check_vertex(u)?;
        self.check_vertex(w)?;
        let e = self.new_edge_slot();
        let (du, dw) = e.darts();
        self.owner[du.0 as usize] = Some(u);
        self.owner[dw.0 as usize] = Some(w);
        let ru = self.rotation.get_mut(&u).unwrap();
        let pu = pos_u.min(ru.len());
        ru.insert(pu, du);
        let rw = self.rotation.get_mut(&w).unwrap();
        let pw = pos_w.min(rw.len());
        rw.insert(pw, dw);
        Ok(e)
    }

    /// Appends an edge at the end of both rotations.
    pub fn add_edge(&mut self, u: VertexId, w: VertexId) -> Result<EdgeId> {
        self.insert_edge(u, usize::MAX, w, usize::MAX)
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.rotation.contains_key(&v) {
            Ok(())
        } else {
            Err(EmbeddingError::MissingVertex(v))
        }
    }

    fn check_edge(&self, e: EdgeId) -> Result<()> {
        let (a, _) = e.darts();
        match self.owner.get(a.0 as usize) {
            Some(Some(_)) => Ok(()),
            _ => Err(EmbeddingError::MissingEdge(e)),
        }
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.rotation.contains_key(&v)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.check_edge(e).is_ok()
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.owner.iter().filter(|o| o.is_some()).count() / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.rotation.keys().copied()
    }

    pub fn rotation(&self, v: VertexId) -> &[DartId] {
        self.rotation.get(&v).map(|r| r.as_slice()).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation(v).len()
    }

    /// Owner of a live dart. Panics on a deleted dart.
    #[inline]
    pub fn owner(&self, d: DartId) -> VertexId {
        self.owner[d.0 as usize].expect("dart is live")
    }

    /// The vertex a dart points to.
    #[inline]
    pub fn head(&self, d: DartId) -> VertexId {
        self.owner(d.twin())
    }

    pub fn dart(&self, d: DartId) -> Option<Dart> {
        self.owner
            .get(d.0 as usize)
            .copied()
            .flatten()
            .map(|owner| Dart { id: d, owner, twin: d.twin() })
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        self.owner.iter().enumerate().filter_map(|(i, o)| {
            o.map(|owner| {
                let id = DartId(i as u32);
                Dart { id, owner, twin: id.twin() }
            })
        })
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId)> {
        self.check_edge(e)?;
        let (a, b) = e.darts();
        Ok((self.owner(a), self.owner(b)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.owner.chunks(2).enumerate().filter_map(|(i, pair)| match (pair[0], pair[1]) {
            (Some(u), Some(w)) => Some((EdgeId(i as u32), u, w)),
            _ => None,
        })
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        matches!(self.endpoints(e), Ok((u, w)) if u == w)
    }

    /// Neighbors in rotation order (with repetition for parallel edges).
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.rotation(v).iter().map(move |&d| self.head(d))
    }

    pub fn are_adjacent(&self, u: VertexId, w: VertexId) -> bool {
        self.rotation(u).iter().any(|&d| self.head(d) == w)
    }

    /// First edge joining `u` and `w`, in `u`'s rotation order.
    pub fn edge_between(&self, u: VertexId, w: VertexId) -> Option<EdgeId> {
        self.rotation(u).iter().find(|&&d| self.head(d) == w).map(|d| d.edge())
    }

    pub fn set_edge_label(&mut self, e: EdgeId, label: impl Into<String>) -> Result<()> {
        self.check_edge(e)?;
        self.edge_labels.insert(e, label.into());
        Ok(())
    }

    pub fn edge_label(&self, e: EdgeId) -> Option<&str> {
        self.edge_labels.get(&e).map(|s| s.as_str())
    }

    fn position(&self, d: DartId) -> usize {
        let v = self.owner(d);
        self.rotation[&v].iter().position(|&x| x == d).expect("dart in its owner's rotation")
    }

    /// Successor of `d` in the counterclockwise rotation at its owner.
    pub fn next_in_rotation(&self, d: DartId) -> DartId {
        let rot = &self.rotation[&self.owner(d)];
        let i = self.position(d);
        rot[(i + 1) % rot.len()]
    }

    pub fn prev_in_rotation(&self, d: DartId) -> DartId {
        let rot = &self.rotation[&self.owner(d)];
        let i = self.position(d);
        rot[(i + rot.len() - 1) % rot.len()]
    }

    /// Checks that every live dart has a live twin and sits in exactly one
    /// rotation (the one of its owner).
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.owner.len()];
        for (&v, rot) in &self.rotation {
            for &d in rot {
                let slot = d.0 as usize;
                match self.owner.get(slot).copied().flatten() {
                    None => {
                        return Err(EmbeddingError::Structural { dart: d, reason: "dart is not live".into() })
                    }
                    Some(o) if o != v => {
                        return Err(EmbeddingError::Structural {
                            dart: d,
                            reason: format!("listed at {v} but owned by {o}"),
                        })
                    }
                    _ => {}
                }
                if seen[slot] {
                    return Err(EmbeddingError::Structural { dart: d, reason: "dart appears twice".into() });
                }
                seen[slot] = true;
            }
        }
        for (i, o) in self.owner.iter().enumerate() {
            let d = DartId(i as u32);
            if let Some(v) = o {
                if self.owner[d.twin().0 as usize].is_none() {
                    return Err(EmbeddingError::Structural { dart: d, reason: "missing twin".into() });
                }
                if !seen[i] {
                    return Err(EmbeddingError::Structural {
                        dart: d,
                        reason: format!("owned by {v} but absent from every rotation"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Dense position index for all live darts.
    fn position_table(&self) -> Vec<u32> {
        let mut pos = vec![u32::MAX; self.owner.len()];
        for rot in self.rotation.values() {
            for (i, d) in rot.iter().enumerate() {
                pos[d.0 as usize] = i as u32;
            }
        }
        pos
    }

    /// Traces all faces. Every live dart appears in exactly one face, once.
    pub fn face_trace(&self) -> Result<Vec<Face>> {
        if self.rotation.is_empty() {
            return Err(EmbeddingError::Empty);
        }
        self.validate()?;
        let pos = self.position_table();
        let next = |d: DartId| -> DartId {
            let t = d.twin();
            let rot = &self.rotation[&self.owner(t)];
            rot[(pos[t.0 as usize] as usize + 1) % rot.len()]
        };
        let mut visited = vec![false; self.owner.len()];
        let mut faces = Vec::new();
        for rot in self.rotation.values() {
            for &start in rot {
                if visited[start.0 as usize] {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = start;
                loop {
                    visited[d.0 as usize] = true;
                    face.push(d);
                    d = next(d);
                    if d == start {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        Ok(faces)
    }

    /// Vertex sets of the connected components, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([v]);
            seen.insert(v);
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for y in self.neighbors(x) {
                    if seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Genus of the surface defined by this rotation system (not minimized
    /// over embeddings). Requires a connected graph.
    pub fn genus(&self) -> Result<u32> {
        let comps = self.components().len();
        if comps == 0 {
            return Err(EmbeddingError::Empty);
        }
        if comps > 1 {
            return Err(EmbeddingError::Disconnected(comps));
        }
        self.total_genus()
    }

    /// Sum of the genera of all components. An isolated vertex counts as a
    /// sphere with one face.
    pub fn total_genus(&self) -> Result<u32> {
        if self.rotation.is_empty() {
            return Ok(0);
        }
        let c = self.components().len() as i64;
        let v = self.vertex_count() as i64;
        let e = self.edge_count() as i64;
        let isolated = self.rotation.values().filter(|r| r.is_empty()).count() as i64;
        let f = self.face_trace()?.len() as i64 + isolated;
        let twice = 2 * c - v + e - f;
        if twice < 0 || twice % 2 != 0 {
            return Err(EmbeddingError::InvalidRotation(format!(
                "Euler characteristic gives non-integral genus ({twice}/2)"
            )));
        }
        Ok((twice / 2) as u32)
    }

    /// Contracts a non-loop edge; the merged vertex keeps the id of the
    /// edge's first endpoint. Returns the new graph and the merged vertex.
    pub fn contract_edge(&self, e: EdgeId) -> Result<(Self, VertexId)> {
        let (u, _) = self.endpoints(e)?;
        let mut g = self.clone();
        g.contract_edge_into(e, u)?;
        Ok((g, u))
    }

    /// In-place contraction; `survivor` must be an endpoint of `e`.
    ///
    /// With rotations `(a, x1..xp)` at the survivor and `(b, y1..yq)` at the
    /// other endpoint, where `a`/`b` are the darts of `e`, the merged rotation
    /// is `(x1..xp, y1..yq)`. Faces are preserved apart from losing `a`, `b`.
    pub fn contract_edge_into(&mut self, e: EdgeId, survivor: VertexId) -> Result<()> {
        let (u, w) = self.endpoints(e)?;
        if u == w {
            return Err(EmbeddingError::LoopContraction(e));
        }
        let (a, b) = if survivor == u {
            e.darts()
        } else if survivor == w {
            let (x, y) = e.darts();
            (y, x)
        } else {
            return Err(EmbeddingError::InvalidRotation(format!("{survivor} is not an endpoint of {e}")));
        };
        let keep = self.owner(a);
        let gone = self.owner(b);
        let ra = self.rotation.remove(&keep).unwrap();
        let rb = self.rotation.remove(&gone).unwrap();
        let ia = ra.iter().position(|&d| d == a).unwrap();
        let ib = rb.iter().position(|&d| d == b).unwrap();
        let mut merged = Vec::with_capacity(ra.len() + rb.len() - 2);
        merged.extend(ra[ia + 1..].iter().chain(ra[..ia].iter()).copied());
        merged.extend(rb[ib + 1..].iter().chain(rb[..ib].iter()).copied());
        for &d in &merged {
            self.owner[d.0 as usize] = Some(keep);
        }
        self.owner[a.0 as usize] = None;
        self.owner[b.0 as usize] = None;
        self.edge_labels.remove(&e);
        self.rotation.insert(keep, merged);
        Ok(())
    }

    /// Subdivides `e` with a new degree-2 vertex. Returns the new graph and
    /// the new vertex.
    pub fn subdivide_edge(&self, e: EdgeId) -> Result<(Self, VertexId)> {
        self.check_edge(e)?;
        let mut g = self.clone();
        let w = g.subdivide_at(e.darts().0);
        Ok((g, w))
    }

    /// Subdivides the edge of `d` so that `d` keeps its owner and now points
    /// to the new vertex. The new vertex's rotation is `(twin(d), d')` where
    /// `d'` continues toward the old head. Faces and genus are unchanged.
    pub fn subdivide_at(&mut self, d: DartId) -> VertexId {
        let old_twin = d.twin();
        let far = self.owner(old_twin);
        let w = self.add_vertex();
        let e2 = self.new_edge_slot();
        let (c, c_twin) = e2.darts();
        // twin(d) moves to w; the far end gets c_twin in twin(d)'s old slot
        let far_rot = self.rotation.get_mut(&far).unwrap();
        let i = far_rot.iter().position(|&x| x == old_twin).unwrap();
        far_rot[i] = c_twin;
        self.owner[old_twin.0 as usize] = Some(w);
        self.owner[c.0 as usize] = Some(w);
        self.owner[c_twin.0 as usize] = Some(far);
        self.rotation.insert(w, vec![old_twin, c]);
        w
    }

    /// Removes `v` and joins the far endpoints of its incident edges into a
    /// cycle, in rotation order, drawn in a small disk around `v`.
    ///
    /// `attach[i]` says whether the far endpoint of the `i`-th dart of `v`
    /// joins the cycle; edges with `attach = false` are deleted together with
    /// `v`. The caller is expected to have subdivided the incident edges so
    /// the far endpoints are distinct. One attached vertex yields no cycle
    /// edge, two yield a single edge. Returns the cycle in order.
    pub fn replace_vertex_with_cycle(&self, v: VertexId, attach: &[bool]) -> Result<(Self, Vec<VertexId>)> {
        let mut g = self.clone();
        let cycle = g.replace_vertex_with_cycle_in_place(v, attach)?;
        Ok((g, cycle))
    }

    pub fn replace_vertex_with_cycle_in_place(&mut self, v: VertexId, attach: &[bool]) -> Result<Vec<VertexId>> {
        self.check_vertex(v)?;
        let rot = self.rotation[&v].clone();
        if rot.is_empty() {
            return Err(EmbeddingError::IsolatedVertex(v));
        }
        if attach.len() != rot.len() {
            return Err(EmbeddingError::AttachLength { vertex: v, expected: rot.len(), got: attach.len() });
        }
        for &d in &rot {
            if self.head(d) == v {
                return Err(EmbeddingError::InvalidRotation(format!(
                    "loop at {v}; subdivide incident edges before replacing the vertex"
                )));
            }
        }
        // (cycle vertex, the dart of its edge toward v)
        let mut ring: Vec<(VertexId, DartId)> = Vec::new();
        for (&d, &keep) in rot.iter().zip(attach) {
            if keep {
                ring.push((self.head(d), d.twin()));
            }
        }
        let distinct: BTreeSet<VertexId> = ring.iter().map(|r| r.0).collect();
        if distinct.len() != ring.len() {
            return Err(EmbeddingError::InvalidRotation(format!(
                "attached neighbors of {v} are not distinct; subdivide first"
            )));
        }
        // drop unattached edges, then v itself; attached darts stay in place
        // at the far end until they are replaced below
        for (&d, &keep) in rot.iter().zip(attach) {
            if !keep {
                self.remove_edge(d.edge())?;
            }
        }
        for &(_, t) in &ring {
            self.owner[t.0 as usize] = None;
            self.owner[t.twin().0 as usize] = None;
            self.edge_labels.remove(&t.edge());
        }
        self.rotation.remove(&v);
        let k = ring.len();
        if k == 1 {
            let (x, dx) = ring[0];
            self.rotation.get_mut(&x).unwrap().retain(|&d| d != dx);
        } else if k == 2 {
            let (x, dx) = ring[0];
            let (y, dy) = ring[1];
            let e = self.new_edge_slot();
            let (a, b) = e.darts();
            self.owner[a.0 as usize] = Some(x);
            self.owner[b.0 as usize] = Some(y);
            self.splice_replace(x, dx, &[a]);
            self.splice_replace(y, dy, &[b]);
        } else {
            // edge i joins ring[i] and ring[i+1]
            let mut fwd = Vec::with_capacity(k);
            for i in 0..k {
                let e = self.new_edge_slot();
                let (a, b) = e.darts();
                self.owner[a.0 as usize] = Some(ring[i].0);
                self.owner[b.0 as usize] = Some(ring[(i + 1) % k].0);
                fwd.push((a, b));
            }
            for i in 0..k {
                let (x, dx) = ring[i];
                // going around x counterclockwise from the old dart toward v,
                // the neighbor before v's slot is the next ring vertex
                self.splice_replace(x, dx, &[fwd[i].0, fwd[(i + k - 1) % k].1]);
            }
        }
        Ok(ring.into_iter().map(|r| r.0).collect())
    }

    /// Replaces dart `old` in `x`'s rotation by the sequence `new`.
    fn splice_replace(&mut self, x: VertexId, old: DartId, new: &[DartId]) {
        let rot = self.rotation.get_mut(&x).unwrap();
        let i = rot.iter().position(|&d| d == old).expect("dart present");
        rot.splice(i..=i, new.iter().copied());
    }

    /// Reorders the rotation at `v`; `rot` must be a permutation of it.
    pub(crate) fn reorder_rotation(&mut self, v: VertexId, rot: Vec<DartId>) {
        let cur = self.rotation.get_mut(&v).expect("vertex exists");
        debug_assert_eq!(
            cur.iter().copied().collect::<BTreeSet<_>>(),
            rot.iter().copied().collect::<BTreeSet<_>>()
        );
        *cur = rot;
    }

    /// Deletes an edge.
    pub fn remove_edge(&mut self, e: EdgeId) -> Result<()> {
        self.check_edge(e)?;
        let (a, b) = e.darts();
        for d in [a, b] {
            let v = self.owner(d);
            let rot = self.rotation.get_mut(&v).unwrap();
            rot.retain(|&x| x != d);
        }
        self.owner[a.0 as usize] = None;
        self.owner[b.0 as usize] = None;
        self.edge_labels.remove(&e);
        Ok(())
    }

    /// Deletes a vertex with its incident edges.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<()> {
        self.check_vertex(v)?;
        let rot = self.rotation[&v].clone();
        for d in rot {
            if self.owner[d.0 as usize].is_none() {
                continue;
            }
            let t = d.twin();
            let far = self.owner(t);
            if far != v {
                self.rotation.get_mut(&far).unwrap().retain(|&x| x != t);
            }
            self.owner[d.0 as usize] = None;
            self.owner[t.0 as usize] = None;
            self.edge_labels.remove(&d.edge());
        }
        self.rotation.remove(&v);
        Ok(())
    }

    /// Removes every loop.
    pub fn remove_loops(&mut self) {
        let loops: Vec<EdgeId> = self.edges().filter(|(_, u, w)| u == w).map(|(e, _, _)| e).collect();
        for e in loops {
            self.remove_edge(e).expect("live edge");
        }
    }

    /// Removes loops and collapses parallel edges. For each vertex in id
    /// order the first dart toward each neighbor in rotation order is kept.
    pub fn simplify(&self) -> Self {
        let mut g = self.clone();
        g.simplify_in_place();
        g
    }

    pub fn simplify_in_place(&mut self) {
        self.remove_loops();
        let verts: Vec<VertexId> = self.vertices().collect();
        for v in verts {
            let mut seen = BTreeSet::new();
            let rot = self.rotation[&v].clone();
            for d in rot {
                if !seen.insert(self.head(d)) {
                    self.remove_edge(d.edge()).expect("live edge");
                }
            }
        }
    }

    pub fn is_simple(&self) -> bool {
        self.vertices().all(|v| {
            let mut seen = BTreeSet::new();
            self.neighbors(v).all(|w| w != v && seen.insert(w))
        })
    }

    /// Attaches a new degree-1 vertex to `v`, its dart appended to `v`'s rotation.
    pub fn add_pendant(&mut self, v: VertexId) -> Result<VertexId> {
        self.check_vertex(v)?;
        let w = self.add_vertex();
        self.add_edge(v, w)?;
        Ok(w)
    }

    /// Random connected multigraph with a random rotation system: a random
    /// spanning tree on `n` vertices plus `extra` further edges, each dart
    /// inserted at a uniformly random rotation position.
    pub fn random_connected<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, extra: usize, allow_loops: bool) -> Self {
        let mut g = EmbeddedGraph::new();
        let vs: Vec<VertexId> = (0..n.max(1)).map(|_| g.add_vertex()).collect();
        let place = |g: &mut EmbeddedGraph, rng: &mut R, u: VertexId, w: VertexId| {
            let pu = rng.gen_range(0..=g.degree(u));
            let pw = rng.gen_range(0..=g.degree(w));
            g.insert_edge(u, pu, w, pw).expect("vertices exist");
        };
        for i in 1..vs.len() {
            let j = rng.gen_range(0..i);
            place(&mut g, rng, vs[i], vs[j]);
        }
        let mut added = 0;
        while added < extra {
            let u = vs[rng.gen_range(0..vs.len())];
            let w = vs[rng.gen_range(0..vs.len())];
            if u == w && !allow_loops {
                if vs.len() == 1 {
                    break;
                }
                continue;
            }
            place(&mut g, rng, u, w);
            added += 1;
        }
        g
    }
}

/// Serialized as neighbor rotations and an edge list.
impl Serialize for EmbeddedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EmbeddedGraph", 2)?;
        let rotations: BTreeMap<u32, Vec<u32>> =
            self.vertices().map(|v| (v.0, self.neighbors(v).map(|w| w.0).collect())).collect();
        let edges: Vec<(u32, u32)> = self.edges().map(|(_, u, w)| (u.0, w.0)).collect();
        st.serialize_field("rotations", &rotations)?;
        st.serialize_field("edges", &edges)?;
        st.end()
    }
}

/// Rotation-invariant equality of cyclic sequences.
pub fn cyclic_eq<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..b.len()).any(|shift| (0..a.len()).all(|i| a[i] == b[(i + shift) % b.len()]))
}

/// Rotates a cyclic sequence so that its minimum comes first.
pub fn canonical_cycle<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    match seq.iter().enumerate().min_by(|x, y| x.1.cmp(y.1)) {
        None => Vec::new(),
        Some((i, _)) => seq[i..].iter().chain(seq[..i].iter()).cloned().collect(),
    }
}

/// Faces as a sorted set of canonical dart cycles, for comparisons.
pub fn canonical_faces(faces: &[Face]) -> Vec<Face> {
    let mut out: Vec<Face> = faces.iter().map(|f| canonical_cycle(f)).collect();
    out.sort();
    out
}
