use std::collections::{BTreeMap, BTreeSet};

use super::dual::dual_support;
use super::{deepest_maximal, require_cross_free, PipelineOptions, RewriteStep, SupportResult, Work};
use crate::embedding::VertexId;
use crate::error::{ContractViolation, Error, Result};
use crate::system::{Color, Family, GraphSystem, Scope};

/// Prefix of the dummy members added at K-vertices. Member names starting
/// with it are rejected.
const DUMMY_PREFIX: &str = "#F";

fn is_k_vertex(sys: &GraphSystem, v: VertexId) -> bool {
    !sys.h.values().any(|s| s.contains(&v)) && sys.k.as_ref().is_some_and(|k| k.values().any(|s| s.contains(&v)))
}

/// Intersection support on the H members: for every K member, the H
/// members meeting it induce a connected subgraph.
pub fn intersection_support(sys: &GraphSystem, opts: PipelineOptions) -> Result<SupportResult> {
    if sys.k.is_none() {
        return Err(ContractViolation::MissingK.into());
    }
    let mut input = sys.clone();
    input.coloring = None;
    require_cross_free(&input, opts.exec)?;
    if let Some(bad) = input.h.keys().find(|n| n.starts_with(DUMMY_PREFIX)) {
        return Err(ContractViolation::Other(format!("member name {bad:?} uses the reserved prefix {DUMMY_PREFIX:?}")).into());
    }
    let genus_before = input.host.genus()?;

    let mut w = Work::new(input, opts, "intersection");
    let k = w.sys.k.as_mut().expect("checked above");
    let h = &w.sys.h;
    let unconstrained: Vec<String> =
        k.iter().filter(|(_, s)| !h.values().any(|hs| !hs.is_disjoint(s))).map(|(n, _)| n.clone()).collect();
    for name in unconstrained {
        k.remove(&name);
        w.log.push(RewriteStep::DropMember { name, reason: "meets no H member".into() });
    }

    // no K-vertex may stay maximal
    w.contract_adjacent_twins(Scope::K, is_k_vertex)?;
    let mut last_depth = usize::MAX;
    loop {
        let sys = &w.sys;
        let Some((d, round)) = deepest_maximal(sys, Scope::K, |v| is_k_vertex(sys, v)) else { break };
        if d >= last_depth {
            return Err(Error::internal(format!("intersection: maximal K-vertex depth went from {last_depth} to {d}")));
        }
        last_depth = d;
        for v in round {
            w.bypass(v, Scope::K)?;
        }
        w.contract_adjacent_twins(Scope::K, is_k_vertex)?;
    }

    let k_vertices: Vec<VertexId> = w.sys.host.vertices().filter(|&v| is_k_vertex(&w.sys, v)).collect();
    let mut with_dummies = w.sys.clone();
    with_dummies.k = None;
    let mut dummies = BTreeSet::new();
    for &v in &k_vertices {
        let name = format!("{DUMMY_PREFIX}{}", v.0);
        with_dummies.h.insert(name.clone(), BTreeSet::from([v]));
        w.log.push(RewriteStep::AddDummy { member: name.clone(), vertex: v });
        dummies.insert(name);
    }

    let (q, _) = dual_support(&with_dummies, opts)?;
    w.log.extend(q.log.iter().cloned());
    let warnings = q.warnings.clone();

    if dummies.is_empty() {
        let certified_genus = check_genus(&q, genus_before)?;
        return Ok(SupportResult { support: q.support, vertex_meaning: q.vertex_meaning, log: w.log, certified_genus, warnings });
    }

    // lift K onto the support and contract the dummies away
    let by_name: BTreeMap<&str, VertexId> = q.vertex_meaning.iter().map(|(v, n)| (n.as_str(), *v)).collect();
    let mut lifted = Family::new();
    for (kname, kset) in w.sys.k.as_ref().expect("checked above") {
        let touched: BTreeSet<VertexId> = with_dummies
            .h
            .iter()
            .filter(|(_, s)| !s.is_disjoint(kset))
            .map(|(n, _)| by_name[n.as_str()])
            .collect();
        lifted.insert(kname.clone(), touched);
    }
    let coloring = q
        .vertex_meaning
        .iter()
        .map(|(v, n)| (*v, if dummies.contains(n) { Color::Red } else { Color::Blue }))
        .collect();
    let lifted_sys = GraphSystem {
        host: q.support.clone(),
        names: q.vertex_meaning.clone(),
        h: lifted,
        k: None,
        coloring: Some(coloring),
    };
    let mut lw = Work::new(lifted_sys, PipelineOptions { audit: false, ..opts }, "intersection");
    lw.steps = w.steps;
    lw.assert_red_forest_ready(Scope::H)?;
    lw.contract_red_forest(Scope::H)?;
    lw.simplify();
    w.log.extend(lw.log);

    let support = lw.sys.host;
    let vertex_meaning: BTreeMap<VertexId, String> = support.vertices().map(|v| (v, lw.sys.names[&v].clone())).collect();
    if vertex_meaning.values().any(|n| dummies.contains(n)) {
        return Err(Error::internal("intersection: a dummy member survived"));
    }
    let r = SupportResult { support, vertex_meaning, log: w.log, certified_genus: 0, warnings };
    let certified_genus = check_genus(&r, genus_before)?;
    Ok(SupportResult { certified_genus, ..r })
}

fn check_genus(r: &SupportResult, bound: u32) -> Result<u32> {
    let g = r.support.total_genus()?;
    if g > bound {
        return Err(Error::internal(format!("intersection: support genus {g} exceeds host genus {bound}")));
    }
    Ok(g)
}
