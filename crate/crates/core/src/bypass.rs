//! Vertex bypassing: subdivide the edges at `v`, replace `v` by a cycle on
//! the subdividing vertices, and add non-crossing chords inside that cycle
//! so every affected member stays connected.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::chords::{chord_set, ChordSet, CycleSystem};
use crate::embedding::{EmbeddingError, VertexId};
use crate::error::{ContractViolation, Error, Result};
use crate::system::{crossing_at, Color, CrossingWitness, DepthProfile, FamilyKind, GraphSystem, Scope};
use crate::Execution;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BypassRecord {
    pub bypassed_vertex: VertexId,
    /// The new cycle, in the rotation order of the removed vertex.
    pub subdividing_vertices: Vec<VertexId>,
    /// For each subdividing vertex, the vertex at the far end of its edge.
    pub far_endpoints: Vec<VertexId>,
    pub chords: ChordSet,
    /// New vertex set of every member that contained the bypassed vertex.
    pub family_rewrites: BTreeMap<(FamilyKind, String), BTreeSet<VertexId>>,
}

fn member_key(kind: FamilyKind, name: &str) -> String {
    format!("{kind}:{name}")
}

/// Checks that the scoped members through `v` pairwise do not cross at `v`.
fn check_cross_free_at(sys: &GraphSystem, v: VertexId, scope: Scope) -> Result<()> {
    for kind in [FamilyKind::H, FamilyKind::K] {
        if !scope.includes(kind) {
            continue;
        }
        let Some(fam) = sys.family(kind) else { continue };
        let through: Vec<(&String, &BTreeSet<VertexId>)> = fam.iter().filter(|(_, s)| s.contains(&v)).collect();
        for i in 0..through.len() {
            for j in i + 1..through.len() {
                if let Some(darts) = crossing_at(sys.host(), through[i].1, through[j].1, v) {
                    return Err(ContractViolation::Crossing(CrossingWitness {
                        kind,
                        first: through[i].0.clone(),
                        second: through[j].0.clone(),
                        vertex: v,
                        darts,
                    })
                    .into());
                }
            }
        }
    }
    Ok(())
}

/// Bypasses `v` on a copy of the system and re-verifies the result:
/// scoped members connected, genus unchanged, whole system cross-free.
pub fn vertex_bypass(sys: &GraphSystem, v: VertexId, scope: Scope) -> Result<(GraphSystem, BypassRecord)> {
    let genus_before = sys.host().genus()?;
    let mut out = sys.clone();
    let record = bypass_in_place(&mut out, v, scope)?;
    out.validate_working()?;
    let genus_after = out.host().genus()?;
    if genus_after != genus_before {
        return Err(Error::internal(format!("bypass of {v} changed genus {genus_before} -> {genus_after}")));
    }
    if let Some(w) = out.first_crossing(Execution::Parallel) {
        return Err(Error::internal(format!("bypass of {v} produced a crossing: {w}")));
    }
    Ok((out, record))
}

/// The bypass itself, without the post-verification. Only the pairs through
/// `v` are checked beforehand.
pub(crate) fn bypass_in_place(sys: &mut GraphSystem, v: VertexId, scope: Scope) -> Result<BypassRecord> {
    if !sys.host.contains_vertex(v) {
        return Err(EmbeddingError::MissingVertex(v).into());
    }
    if sys.host.degree(v) == 0 {
        return Err(EmbeddingError::IsolatedVertex(v).into());
    }
    for (kind, name, set) in sys.members(Scope::Both) {
        if !scope.includes(kind) && set.contains(&v) {
            return Err(ContractViolation::Other(format!(
                "{kind} member {name:?} contains {v} but is outside the bypass scope"
            ))
            .into());
        }
    }
    check_cross_free_at(sys, v, scope)?;

    // original far endpoint of each rotation slot (v itself for loops)
    let far: Vec<VertexId> = sys.host.rotation(v).iter().map(|&d| sys.host.head(d)).collect();
    let mut subdividers = Vec::with_capacity(far.len());
    for i in 0..far.len() {
        let d = sys.host.rotation(v)[i];
        subdividers.push(sys.host.subdivide_at(d));
    }
    let attach = vec![true; far.len()];
    let ring = sys.host.replace_vertex_with_cycle_in_place(v, &attach)?;
    debug_assert_eq!(ring, subdividers);
    let k = ring.len();

    // new vertex sets: u_i joins every member holding both v and v_i
    let mut rewrites = BTreeMap::new();
    let mut on_cycle: BTreeMap<String, BTreeSet<VertexId>> = BTreeMap::new();
    for kind in [FamilyKind::H, FamilyKind::K] {
        if !scope.includes(kind) {
            continue;
        }
        let Some(fam) = sys.family_mut(kind) else { continue };
        for (name, set) in fam.iter_mut() {
            if !set.remove(&v) {
                continue;
            }
            let mut here = BTreeSet::new();
            for (i, &x) in far.iter().enumerate() {
                if x == v || set.contains(&x) {
                    here.insert(ring[i]);
                }
            }
            set.extend(here.iter().copied());
            if !here.is_empty() {
                on_cycle.insert(member_key(kind, name), here);
            }
            rewrites.insert((kind, name.clone()), set.clone());
        }
    }
    if let Some(col) = sys.coloring.as_mut() {
        col.remove(&v);
        for &u in &ring {
            col.insert(u, Color::Red);
        }
    }
    sys.names.remove(&v);

    let chords = chord_set(&CycleSystem::new(ring.clone(), on_cycle))?;
    if k >= 3 {
        place_chords(sys, &ring, &chords)?;
    }
    Ok(BypassRecord {
        bypassed_vertex: v,
        subdividing_vertices: ring,
        far_endpoints: far,
        chords,
        family_rewrites: rewrites,
    })
}

/// Adds chord edges and fixes the rotation at every cycle vertex to
/// (out edge, next on cycle, chords by increasing cyclic offset, previous
/// on cycle), which draws all chords inside the disk left by `v`.
fn place_chords(sys: &mut GraphSystem, ring: &[VertexId], chords: &ChordSet) -> Result<()> {
    let k = ring.len();
    let pos: BTreeMap<VertexId, usize> = ring.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    // right after the cycle replacement each rotation is (next, prev, out)
    let base: Vec<Vec<_>> = ring.iter().map(|&u| sys.host.rotation(u).to_vec()).collect();
    if base.iter().any(|r| r.len() != 3) {
        return Err(Error::internal("cycle vertex without degree 3 before chords"));
    }
    for c in &chords.chords {
        sys.host.add_edge(c.a, c.b)?;
    }
    for (i, &u) in ring.iter().enumerate() {
        let rot = sys.host.rotation(u).to_vec();
        let mut inner = rot[3..].to_vec();
        inner.sort_by_key(|&d| (pos[&sys.host.head(d)] + k - i) % k);
        let mut new_rot = vec![base[i][2], base[i][0]];
        new_rot.extend(inner);
        new_rot.push(base[i][1]);
        sys.host.reorder_rotation(u, new_rot);
    }
    Ok(())
}

/// Checks that every subdividing vertex is shallower than the bypassed
/// vertex was and is not maximal. Returns the subdividing vertices' depths.
pub fn depth_after_bypass(record: &BypassRecord, before: &DepthProfile, after: &GraphSystem, scope: Scope) -> Result<Vec<usize>> {
    let dv = *before
        .vertex_depth
        .get(&record.bypassed_vertex)
        .ok_or_else(|| Error::internal("bypassed vertex missing from depth profile"))?;
    let ms = after.memberships(scope);
    let mut depths = Vec::with_capacity(record.subdividing_vertices.len());
    for &u in &record.subdividing_vertices {
        let du = ms[&u].len();
        if du >= dv && dv > 0 {
            return Err(Error::internal(format!("subdividing vertex {u} has depth {du}, bypassed vertex had {dv}")));
        }
        if crate::system::is_maximal(after.host(), &ms, u) {
            return Err(Error::internal(format!("subdividing vertex {u} is maximal")));
        }
        depths.push(du);
    }
    Ok(depths)
}
