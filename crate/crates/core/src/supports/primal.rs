use std::collections::BTreeMap;

use super::{deepest_maximal, require_cross_free, PipelineOptions, RewriteStep, SupportResult, Work};
use crate::error::{ContractViolation, Error, Result};
use crate::system::{Color, GraphSystem, Scope};

/// Support on the blue vertices: for every H member, its blue vertices
/// induce a connected subgraph. K members, if any, are ignored.
pub fn primal_support(sys: &GraphSystem, opts: PipelineOptions) -> Result<SupportResult> {
    let coloring = sys.coloring().ok_or(ContractViolation::MissingColoring)?;
    let mut input = sys.clone();
    input.k = None;
    require_cross_free(&input, opts.exec)?;
    let genus_before = input.host().genus()?;

    let mut w = Work::new(input, opts, "primal");
    let blue = |v| coloring.get(&v) == Some(&Color::Blue);
    // members without terminals constrain nothing
    let all_red: Vec<String> = w.sys.h.iter().filter(|(_, s)| !s.iter().any(|&v| blue(v))).map(|(n, _)| n.clone()).collect();
    for name in all_red {
        w.sys.h.remove(&name);
        w.log.push(RewriteStep::DropMember { name, reason: "no blue vertex".into() });
    }
    let mut warnings = Vec::new();
    if !w.sys.host.vertices().any(blue) {
        warnings.push("no blue vertices: the support is empty".to_string());
        return Ok(SupportResult {
            support: Default::default(),
            vertex_meaning: BTreeMap::new(),
            log: w.log,
            certified_genus: 0,
            warnings,
        });
    }

    let is_red = |s: &GraphSystem, v| s.color(v) == Some(Color::Red);
    w.contract_adjacent_twins(Scope::H, is_red)?;
    let mut last_depth = usize::MAX;
    loop {
        let sys = &w.sys;
        let Some((d, round)) = deepest_maximal(sys, Scope::H, |v| is_red(sys, v)) else { break };
        if d >= last_depth {
            return Err(Error::internal(format!("primal: maximal red depth went from {last_depth} to {d}")));
        }
        last_depth = d;
        for v in round {
            w.bypass(v, Scope::H)?;
        }
        w.contract_adjacent_twins(Scope::H, is_red)?;
    }
    w.assert_red_forest_ready(Scope::H)?;
    w.contract_red_forest(Scope::H)?;
    w.simplify();

    let support = w.sys.host.clone();
    let certified_genus = support.total_genus()?;
    if certified_genus > genus_before {
        return Err(Error::internal(format!("primal: support genus {certified_genus} exceeds host genus {genus_before}")));
    }
    let vertex_meaning = support.vertices().map(|v| (v, w.sys.name(v))).collect();
    Ok(SupportResult { support, vertex_meaning, log: w.log, certified_genus, warnings })
}
