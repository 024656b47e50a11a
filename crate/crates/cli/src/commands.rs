use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crossfree::regions::{random_coloring, random_rectangle_intersection_system, random_rectangle_system, random_torus_system, GridSpec};
use crossfree::solver::{
    check_local_optimality, local_search, support_coloring, LocalSearchConfig, ProblemInstance, ProblemKind, LOCAL_OPTIMALITY_CHECK_LIMIT,
};
use crossfree::supports::{dual_support, intersection_support, primal_support, PipelineOptions, SupportResult};
use crossfree::verify::{certify_genus, extract_hypergraph, check_no_monochromatic, is_support, SupportGraph};
use crossfree::{EmbeddedGraph, Execution, GraphSystem, VertexId};
use serde::Deserialize;

use crate::format::{self, SystemFile};
use crate::report::*;
use crate::{CliError, Mode};

fn display(p: &Path) -> String {
    p.display().to_string()
}

pub fn check(files: &[PathBuf]) -> Result<Report, CliError> {
    let mut results = Vec::new();
    for path in files {
        let sys = format::load(path)?;
        let crossing = sys.first_crossing(Execution::Parallel).map(|w| CrossingReport {
            family: w.kind.to_string(),
            first: w.first,
            second: w.second,
            vertex: sys.name(w.vertex),
            darts: w.darts.map(|d| d.0),
        });
        let piercing = sys.first_piercing(Execution::Parallel).map(|w| PiercingReport {
            family: w.kind.to_string(),
            first: w.first,
            second: w.second,
            components: w.components.iter().map(|c| c.iter().map(|&v| sys.name(v)).collect()).collect(),
        });
        results.push(CheckReport {
            file: display(path),
            vertices: sys.host().vertex_count(),
            edges: sys.host().edge_count(),
            host_genus: sys.host().genus()?,
            cross_free: crossing.is_none(),
            crossing,
            non_piercing: piercing.is_none(),
            piercing,
        });
    }
    Ok(Report::Check { results })
}

fn named_graph(g: &EmbeddedGraph, name: impl Fn(VertexId) -> String) -> NamedGraph {
    NamedGraph {
        vertices: g.vertices().map(&name).collect(),
        edges: g.edges().map(|(_, u, w)| [name(u), name(w)]).collect(),
        rotations: g.vertices().map(|v| (name(v), g.neighbors(v).map(&name).collect())).collect(),
    }
}

fn run_pipeline(sys: &GraphSystem, mode: Mode, opts: PipelineOptions) -> Result<(SupportResult, Option<Vec<SpecialEdgeReport>>), CliError> {
    Ok(match mode {
        Mode::Primal => (primal_support(sys, opts)?, None),
        Mode::Intersection => (intersection_support(sys, opts)?, None),
        Mode::Dual => {
            let (r, cert) = dual_support(sys, opts)?;
            let special = cert
                .edges
                .iter()
                .map(|e| SpecialEdgeReport {
                    host_edge: [sys.name(e.endpoints.0), sys.name(e.endpoints.1)],
                    support_edge: [e.support_edge.0.clone(), e.support_edge.1.clone()],
                })
                .collect();
            (r, Some(special))
        }
    })
}

pub fn support(path: &Path, mode: Mode, opts: PipelineOptions, dot: Option<&Path>) -> Result<Report, CliError> {
    let sys = format::load(path)?;
    let (r, special_edges) = run_pipeline(&sys, mode, opts)?;
    let hg = extract_hypergraph(&sys, mode.into())?;
    let verified = is_support(&SupportGraph::from_result(&r), &hg)?.is_ok();
    let mut rewrites = BTreeMap::new();
    for step in &r.log {
        let op = serde_json::to_value(step).ok().and_then(|v| v["op"].as_str().map(String::from)).unwrap_or_default();
        *rewrites.entry(op).or_insert(0) += 1;
    }
    let meaning = |v: VertexId| r.vertex_meaning[&v].clone();
    if let Some(out) = dot {
        std::fs::write(out, format::dot("support", &r.support, meaning)).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    }
    let report = SupportReport {
        file: display(path),
        mode: mode.name().into(),
        host_genus: sys.host().genus()?,
        certified_genus: r.certified_genus,
        verified,
        support: named_graph(&r.support, meaning),
        vertex_meaning: r.vertex_meaning.iter().map(|(v, n)| (v.0, n.clone())).collect(),
        special_edges,
        rewrites,
        warnings: r.warnings.clone(),
    };
    Ok(match mode {
        Mode::Primal => Report::Primal(report),
        Mode::Dual => Report::Dual(report),
        Mode::Intersection => Report::Intersection(report),
    })
}

/// The parts of a support report that `verify` reads.
#[derive(Deserialize)]
struct SupportInput {
    mode: Option<String>,
    support: NamedGraph,
}

pub fn verify(path: &Path, support_path: &Path, mode: Option<Mode>) -> Result<Report, CliError> {
    let sys = format::load(path)?;
    let text = std::fs::read_to_string(support_path).map_err(|e| CliError::Input(format!("{}: {e}", support_path.display())))?;
    let input: SupportInput = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", support_path.display())))?;
    let mode = match (mode, input.mode.as_deref()) {
        (Some(m), _) => m,
        (None, Some(m)) => m.parse().map_err(CliError::Input)?,
        (None, None) => return Err(CliError::Input(format!("{}: no mode given and none recorded", support_path.display()))),
    };
    let g = input.support;
    let ids: BTreeMap<&String, VertexId> = g.vertices.iter().enumerate().map(|(i, n)| (n, VertexId(i as u32))).collect();
    let id = |n: &String| ids.get(n).copied().ok_or_else(|| CliError::Input(format!("{}: unknown support vertex {n:?}", support_path.display())));
    let mut rot = Vec::new();
    for n in &g.vertices {
        let nbrs = g.rotations.get(n).map(|ns| ns.iter().map(id).collect::<Result<Vec<_>, _>>()).transpose()?.unwrap_or_default();
        rot.push((id(n)?, nbrs));
    }
    let embedded = EmbeddedGraph::from_neighbor_rotations(&rot).map_err(|e| CliError::Input(format!("{}: {e}", support_path.display())))?;
    let mut listed: BTreeSet<(&String, &String)> = BTreeSet::new();
    for [a, b] in &g.edges {
        listed.insert((a.min(b), a.max(b)));
    }
    let mut embedded_edges = BTreeSet::new();
    for (_, u, w) in embedded.edges() {
        let (a, b) = (&g.vertices[u.0 as usize], &g.vertices[w.0 as usize]);
        embedded_edges.insert((a.min(b), a.max(b)));
    }
    if listed != embedded_edges {
        return Err(CliError::Input(format!("{}: edge list and rotations disagree", support_path.display())));
    }
    let candidate = SupportGraph::from_embedded(&embedded, |v| g.vertices[v.0 as usize].clone());
    let hg = extract_hypergraph(&sys, mode.into())?;
    let verdict = is_support(&candidate, &hg)?;
    let traced_genus = certify_genus(&embedded);
    let host_genus = sys.host().genus()?;
    let simple = embedded.is_simple();
    Ok(Report::Verify(VerifyReport {
        file: display(path),
        support_file: display(support_path),
        mode: mode.name().into(),
        is_support: verdict.is_ok(),
        failing_hyperedge: verdict.clone().err(),
        simple,
        traced_genus,
        host_genus,
        pass: verdict.is_ok() && simple && traced_genus <= host_genus,
    }))
}

pub fn color(path: &Path, mode: Mode, opts: PipelineOptions) -> Result<Report, CliError> {
    let sys = format::load(path)?;
    let (r, _) = run_pipeline(&sys, mode, opts)?;
    let hg = extract_hypergraph(&sys, mode.into())?;
    let c = support_coloring(&SupportGraph::from_result(&r), &hg);
    let proper = check_no_monochromatic(&hg, &c.colors)?.is_ok();
    Ok(Report::Color(ColorReport {
        file: display(path),
        mode: mode.name().into(),
        colors: c.colors,
        color_count: c.color_count,
        degeneracy: c.degeneracy,
        proper,
        certified_genus: r.certified_genus,
    }))
}

pub struct SolveArgs {
    pub kind: ProblemKind,
    pub mode: Option<Mode>,
    pub k: usize,
    pub seed: u64,
    pub capacity: Option<usize>,
    pub max_iterations: usize,
    pub exec: Execution,
}

/// The hypergraph each problem is usually posed on.
fn default_mode(kind: ProblemKind) -> Mode {
    match kind {
        ProblemKind::SetCover => Mode::Dual,
        ProblemKind::HittingSet | ProblemKind::DominatingSet | ProblemKind::IndependentSet => Mode::Primal,
        ProblemKind::GeneralizedCover | ProblemKind::CapacitatedPacking => Mode::Intersection,
    }
}

pub fn solve(path: &Path, a: &SolveArgs) -> Result<Report, CliError> {
    let sys = format::load(path)?;
    let mode = a.mode.unwrap_or(default_mode(a.kind));
    let hg = extract_hypergraph(&sys, mode.into())?;
    let inst = match (a.kind, a.capacity) {
        (ProblemKind::CapacitatedPacking, Some(cap)) => {
            let caps = hg.edges.keys().map(|e| (e.clone(), cap)).collect();
            ProblemInstance::capacitated(hg, caps, cap)?
        }
        (ProblemKind::CapacitatedPacking, None) => return Err(CliError::Input("capacitated_packing needs --capacity".into())),
        (_, Some(_)) => return Err(CliError::Input("--capacity applies to capacitated_packing only".into())),
        (kind, None) => ProblemInstance::new(hg, kind)?,
    };
    let cfg = LocalSearchConfig { k: a.k, seed: a.seed, max_iterations: a.max_iterations, exec: a.exec };
    let solution = local_search(&inst, &cfg)?;
    let variables = inst.variables().len();
    let feasible = inst.is_feasible(&solution.chosen)?.is_ok();
    let locally_optimal =
        if variables <= LOCAL_OPTIMALITY_CHECK_LIMIT { Some(check_local_optimality(&inst, &solution.chosen, a.k)?.is_ok()) } else { None };
    Ok(Report::Solve(SolveReport {
        file: display(path),
        mode: mode.name().into(),
        kind: a.kind,
        seed: a.seed,
        variables,
        solution,
        feasible,
        locally_optimal,
    }))
}

pub struct GenArgs {
    pub rows: usize,
    pub cols: usize,
    pub torus: bool,
    pub count: usize,
    pub k_count: usize,
    pub red: Option<f64>,
    pub seed: u64,
}

fn written(sys: &GraphSystem, out: &Path) -> Result<Report, CliError> {
    format::save(sys, out)?;
    Ok(Report::Gen(WrittenReport {
        out: display(out),
        vertices: sys.host().vertex_count(),
        edges: sys.host().edge_count(),
        members: sys.h().len() + sys.k().map_or(0, |k| k.len()),
    }))
}

pub fn gen(a: &GenArgs, out: &Path) -> Result<Report, CliError> {
    let mut sys = if a.torus {
        random_torus_system(&GridSpec::torus(a.rows, a.cols), a.count, a.k_count, a.seed)?
    } else if a.k_count > 0 {
        random_rectangle_intersection_system(&GridSpec::plane(a.rows, a.cols), a.count, a.k_count, a.seed)?
    } else {
        random_rectangle_system(&GridSpec::plane(a.rows, a.cols), a.count, a.seed)?
    };
    if let Some(p) = a.red {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Input(format!("--red must lie in [0, 1], got {p}")));
        }
        sys = random_coloring(sys, p, a.seed)?;
    }
    written(&sys, out)
}

pub fn from_grid(path: &Path, out: &Path) -> Result<Report, CliError> {
    let file: SystemFile = format::read_file(path)?;
    if file.grid.is_none() {
        return Err(CliError::Input(format!("{}: no grid shorthand to expand", path.display())));
    }
    let sys = file.to_system().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    match written(&sys, out)? {
        Report::Gen(w) => Ok(Report::FromGrid(w)),
        other => Ok(other),
    }
}
