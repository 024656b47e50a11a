use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{require_cross_free, PipelineOptions, RewriteStep, SupportResult, Work};
use crate::embedding::{EdgeId, VertexId};
use crate::error::{Error, Result};
use crate::system::{Family, GraphSystem, Scope};

/// A host edge whose endpoints lie in members but share none, with the
/// support edge that joins a member at one end to a member at the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialEdge {
    pub host_edge: EdgeId,
    pub endpoints: (VertexId, VertexId),
    pub support_edge: (String, String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpecialEdgeCertificate {
    pub edges: Vec<SpecialEdge>,
}

impl SpecialEdgeCertificate {
    /// Checks that every recorded support edge is present in `result`.
    pub fn validate(&self, result: &SupportResult) -> std::result::Result<(), String> {
        for s in &self.edges {
            let (a, b) = &s.support_edge;
            let (Some(x), Some(y)) = (result.vertex_named(a), result.vertex_named(b)) else {
                return Err(format!("special edge {}: unknown support vertex", s.host_edge));
            };
            if !result.support.are_adjacent(x, y) {
                return Err(format!("special edge {}: {a} and {b} not adjacent in the support", s.host_edge));
            }
        }
        Ok(())
    }
}

/// Host special edges with the member names on each side.
fn special_edges(sys: &GraphSystem) -> Vec<(EdgeId, VertexId, VertexId, Vec<String>, Vec<String>)> {
    let names: Vec<&String> = sys.h.keys().collect();
    let ms = sys.memberships(Scope::H);
    let side = |v: VertexId| ms[&v].0.iter().map(|&i| names[i as usize].clone()).collect::<Vec<_>>();
    sys.host
        .edges()
        .filter(|&(_, u, w)| u != w && !ms[&u].is_empty() && !ms[&w].is_empty() && ms[&u].intersection_len(&ms[&w]) == 0)
        .map(|(e, u, w)| (e, u, w, side(u), side(w)))
        .collect()
}

/// Removes contained members until none is contained in another. Returns
/// (member, successor) pairs in removal order.
fn strip_containments(h: &mut Family) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut kept: BTreeMap<&BTreeSet<VertexId>, String> = BTreeMap::new();
    for (name, set) in h.iter() {
        match kept.get(set) {
            Some(first) => out.push((name.clone(), first.clone())),
            None => {
                kept.insert(set, name.clone());
            }
        }
    }
    for (dup, _) in &out {
        h.remove(dup);
    }
    loop {
        let names: Vec<&String> = h.keys().collect();
        let sets: Vec<&BTreeSet<VertexId>> = h.values().collect();
        let m = names.len();
        let above: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..m).filter(|&j| j != i && sets[i].len() < sets[j].len() && sets[i].is_subset(sets[j])).collect())
            .collect();
        // longest chain starting at i, going up; larger sets first
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(sets[i].len()));
        let mut height = vec![1usize; m];
        for &i in &order {
            height[i] = 1 + above[i].iter().map(|&j| height[j]).max().unwrap_or(0);
        }
        let Some(best) = (0..m).filter(|&i| height[i] > 1).max_by_key(|&i| (height[i], std::cmp::Reverse(i))) else {
            return out;
        };
        let succ = *above[best].iter().min_by_key(|&&j| (sets[j].len(), names[j])).expect("height > 1");
        let pair = (names[best].clone(), names[succ].clone());
        h.remove(&pair.0);
        out.push(pair);
    }
}

fn max_depth(sys: &GraphSystem) -> (usize, usize, Option<VertexId>) {
    let ms = sys.memberships(Scope::H);
    let d = ms.values().map(|f| f.len()).max().unwrap_or(0);
    let at: Vec<VertexId> = ms.iter().filter(|(_, f)| f.len() == d).map(|(v, _)| *v).collect();
    (d, at.len(), at.first().copied())
}

/// Dual support on the H members with the special edge property: for every
/// host vertex, the members containing it induce a connected subgraph, and
/// the two sides of every special edge are joined. K and the coloring are
/// ignored.
pub fn dual_support(sys: &GraphSystem, opts: PipelineOptions) -> Result<(SupportResult, SpecialEdgeCertificate)> {
    let mut input = sys.clone();
    input.k = None;
    input.coloring = None;
    require_cross_free(&input, opts.exec)?;
    let genus_before = input.host.genus()?;

    let stripped = strip_containments(&mut input.h);
    let mut w = Work::new(input.clone(), opts, "dual");
    for (member, successor) in &stripped {
        w.log.push(RewriteStep::Strip { member: member.clone(), successor: successor.clone() });
    }
    if w.sys.h.is_empty() {
        let support = Default::default();
        let result = SupportResult {
            support,
            vertex_meaning: BTreeMap::new(),
            log: w.log,
            certified_genus: 0,
            warnings: vec!["no members: the support is empty".into()],
        };
        return Ok((result, SpecialEdgeCertificate::default()));
    }
    let specials = special_edges(&input);

    // reduce to depth at most one
    while let (d, n, Some(v)) = max_depth(&w.sys) {
        if d <= 1 {
            break;
        }
        let ms = w.sys.memberships(Scope::H);
        let full = w.sys.host.rotation(v).iter().map(|&x| (x.edge(), w.sys.host.head(x))).find(|&(_, x)| x != v && ms[&x] == ms[&v]);
        match full {
            Some((e, x)) => w.contract(e, v.min(x), "full edge at deepest vertex")?,
            None => {
                let rec = w.bypass(v, Scope::H)?;
                contract_empty_ring(&mut w, &rec.subdividing_vertices)?;
            }
        }
        let (d2, n2, _) = max_depth(&w.sys);
        if (d2, n2) >= (d, n) {
            return Err(Error::internal(format!("dual: depth profile went from ({d},{n}) to ({d2},{n2})")));
        }
    }

    // depth <= 1: contract toward supersets until vertices match members
    loop {
        let ms = w.sys.memberships(Scope::H);
        let pick = w.sys.host.edges().find_map(|(e, u, x)| {
            if u == x {
                None
            } else if ms[&u].is_subset(&ms[&x]) {
                Some((e, if ms[&u] == ms[&x] { u.min(x) } else { x }))
            } else if ms[&x].is_subset(&ms[&u]) {
                Some((e, u))
            } else {
                None
            }
        });
        let Some((e, into)) = pick else { break };
        w.contract(e, into, "subset edge at depth one")?;
    }
    w.simplify();

    let names: Vec<String> = w.sys.h.keys().cloned().collect();
    let ms = w.sys.memberships(Scope::H);
    let mut vertex_meaning = BTreeMap::new();
    for (v, f) in &ms {
        if f.len() != 1 {
            return Err(Error::internal(format!("dual: support vertex {v} stands for {} members", f.len())));
        }
        vertex_meaning.insert(*v, names[f.0[0] as usize].clone());
    }
    let mut support = w.sys.host.clone();
    let by_name: BTreeMap<String, VertexId> = vertex_meaning.iter().map(|(v, n)| (n.clone(), *v)).collect();

    // singleton members on non-adjacent host vertices need no support edge
    let in_depth = input.memberships(Scope::H);
    let singles: Vec<(VertexId, &String)> = input
        .h
        .iter()
        .filter_map(|(n, s)| {
            let x = *s.iter().next()?;
            (s.len() == 1 && in_depth[&x].len() == 1).then_some((x, n))
        })
        .collect();
    for i in 0..singles.len() {
        for j in i + 1..singles.len() {
            let (x, a) = singles[i];
            let (y, b) = singles[j];
            if input.host.are_adjacent(x, y) {
                continue;
            }
            if let Some(e) = support.edge_between(by_name[a], by_name[b]) {
                support.remove_edge(e)?;
                w.log.push(RewriteStep::RemoveEdge { between: (a.clone(), b.clone()), reason: "singletons not adjacent in host" });
            }
        }
    }

    let mut cert = SpecialEdgeCertificate::default();
    for (e, u, x, left, right) in specials {
        let joined = left.iter().find_map(|a| {
            right.iter().find(|b| support.are_adjacent(by_name[a], by_name[*b])).map(|b| (a.clone(), b.clone()))
        });
        let Some(support_edge) = joined else {
            return Err(Error::internal(format!("dual: special edge {e} has no support edge")));
        };
        cert.edges.push(SpecialEdge { host_edge: e, endpoints: (u, x), support_edge });
    }

    for (member, successor) in stripped.iter().rev() {
        let at = *vertex_meaning
            .iter()
            .find(|(_, n)| *n == successor)
            .map(|(v, _)| v)
            .ok_or_else(|| Error::internal(format!("dual: successor {successor} missing")))?;
        let p = support.add_pendant(at)?;
        vertex_meaning.insert(p, member.clone());
        w.log.push(RewriteStep::Pendant { member: member.clone(), attached_to: successor.clone() });
    }

    let certified_genus = support.total_genus()?;
    if certified_genus > genus_before {
        return Err(Error::internal(format!("dual: support genus {certified_genus} exceeds host genus {genus_before}")));
    }
    let result = SupportResult { support, vertex_meaning, log: w.log, certified_genus, warnings: Vec::new() };
    Ok((result, cert))
}

/// After a bypass, merges every cycle vertex that lies in no member into
/// its successor on the cycle.
fn contract_empty_ring(w: &mut Work, ring: &[VertexId]) -> Result<()> {
    let k = ring.len();
    let mut alias: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let resolve = |alias: &BTreeMap<VertexId, VertexId>, mut v: VertexId| {
        while let Some(&n) = alias.get(&v) {
            v = n;
        }
        v
    };
    for i in 0..k {
        let u = ring[i];
        if w.sys.h.values().any(|s| s.contains(&u)) {
            continue;
        }
        let target = if k >= 2 { resolve(&alias, ring[(i + 1) % k]) } else { u };
        let e = match w.sys.host.edge_between(u, target).filter(|_| target != u) {
            Some(e) => e,
            None => match w.sys.host.rotation(u).iter().find(|&&d| w.sys.host.head(d) != u) {
                Some(&d) => d.edge(),
                None => continue,
            },
        };
        let (a, b) = w.sys.host.endpoints(e)?;
        let into = if a == u { b } else { a };
        w.contract(e, into, "empty cycle vertex")?;
        alias.insert(u, into);
    }
    Ok(())
}
