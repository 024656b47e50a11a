//! Local-search packing and covering over (intersection) hypergraphs, and
//! coloring along a support.

mod coloring;
mod local_search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::verify::{Hypergraph, Verdict};

pub use coloring::{support_coloring, SupportColoring};
pub use local_search::{
    check_local_optimality, local_search, AppliedMove, LocalSearchCertificate, LocalSearchConfig, ScanClass, Solution,
    LOCAL_OPTIMALITY_CHECK_LIMIT,
};

/// Largest variable count `brute_force_optimum` accepts.
pub const BRUTE_FORCE_OPTIMUM_LIMIT: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("capacitated packing needs capacities")]
    CapacitiesRequired,
    #[error("hyperedge {0:?} has no capacity")]
    MissingCapacity(String),
    #[error("capacity of {edge:?} is {cap}, outside 1..={delta}")]
    CapacityOutOfRange { edge: String, cap: usize, delta: usize },
    #[error("capacity given for unknown hyperedge {0:?}")]
    UnknownCapacity(String),
    #[error("instance is infeasible: constraint {0:?} cannot be met")]
    Infeasible(String),
    #[error("swap radius k must be at least 1")]
    ZeroRadius,
    #[error("{0:?} is not a variable of this instance")]
    UnknownVariable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Fewest hyperedges whose union is the ground set.
    SetCover,
    /// Fewest ground elements meeting every hyperedge.
    HittingSet,
    /// Fewest ground elements meeting every non-empty hyperedge. On an
    /// intersection hypergraph: fewest H members such that every K member
    /// that meets H meets a chosen one.
    GeneralizedCover,
    /// Most ground elements with at most `cap(E)` chosen in each hyperedge E.
    CapacitatedPacking,
    /// Fewest hyperedges dominating the intersection graph of the hyperedges.
    DominatingSet,
    /// Most pairwise disjoint hyperedges.
    IndependentSet,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::SetCover,
        ProblemKind::HittingSet,
        ProblemKind::GeneralizedCover,
        ProblemKind::CapacitatedPacking,
        ProblemKind::DominatingSet,
        ProblemKind::IndependentSet,
    ];

    pub fn is_maximization(self) -> bool {
        matches!(self, ProblemKind::CapacitatedPacking | ProblemKind::IndependentSet)
    }

    /// Whether the decision variables are hyperedges rather than ground
    /// elements.
    pub fn picks_edges(self) -> bool {
        matches!(self, ProblemKind::SetCover | ProblemKind::DominatingSet | ProblemKind::IndependentSet)
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "set_cover" => ProblemKind::SetCover,
            "hitting_set" => ProblemKind::HittingSet,
            "generalized_cover" => ProblemKind::GeneralizedCover,
            "capacitated_packing" => ProblemKind::CapacitatedPacking,
            "dominating_set" => ProblemKind::DominatingSet,
            "independent_set" => ProblemKind::IndependentSet,
            _ => return Err(format!("unknown problem kind {s:?}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProblemInstance {
    pub hg: Hypergraph,
    pub kind: ProblemKind,
    /// Present exactly for capacitated packing.
    pub capacities: Option<BTreeMap<String, usize>>,
    /// Declared upper bound on the capacities.
    pub delta: Option<usize>,
}

impl ProblemInstance {
    pub fn new(hg: Hypergraph, kind: ProblemKind) -> Result<Self> {
        if kind == ProblemKind::CapacitatedPacking {
            return Err(SolverError::CapacitiesRequired.into());
        }
        Ok(ProblemInstance { hg, kind, capacities: None, delta: None })
    }

    pub fn capacitated(hg: Hypergraph, capacities: BTreeMap<String, usize>, delta: usize) -> Result<Self> {
        if let Some(e) = capacities.keys().find(|e| !hg.edges.contains_key(*e)) {
            return Err(SolverError::UnknownCapacity(e.clone()).into());
        }
        for e in hg.edges.keys() {
            let cap = *capacities.get(e).ok_or_else(|| SolverError::MissingCapacity(e.clone()))?;
            if cap == 0 || cap > delta {
                return Err(SolverError::CapacityOutOfRange { edge: e.clone(), cap, delta }.into());
            }
        }
        Ok(ProblemInstance { hg, kind: ProblemKind::CapacitatedPacking, capacities: Some(capacities), delta: Some(delta) })
    }

    /// Decision variables in id order.
    pub fn variables(&self) -> Vec<String> {
        if self.kind.picks_edges() {
            self.hg.edges.keys().cloned().collect()
        } else {
            self.hg.ground.iter().cloned().collect()
        }
    }

    /// Checks a selection against the problem definition directly.
    pub fn is_feasible(&self, chosen: &BTreeSet<String>) -> Result<Verdict> {
        let vars: BTreeSet<String> = self.variables().into_iter().collect();
        if let Some(x) = chosen.iter().find(|x| !vars.contains(*x)) {
            return Err(SolverError::UnknownVariable(x.clone()).into());
        }
        let hg = &self.hg;
        let fail = |what: String| Ok(Err(what));
        match self.kind {
            ProblemKind::SetCover => {
                for x in &hg.ground {
                    if !chosen.iter().any(|e| hg.edges[e].contains(x)) {
                        return fail(format!("element {x} uncovered"));
                    }
                }
            }
            ProblemKind::HittingSet | ProblemKind::GeneralizedCover => {
                for (name, e) in &hg.edges {
                    if e.is_empty() && self.kind == ProblemKind::GeneralizedCover {
                        continue;
                    }
                    if e.is_disjoint(chosen) {
                        return fail(format!("hyperedge {name} not hit"));
                    }
                }
            }
            ProblemKind::CapacitatedPacking => {
                let caps = self.capacities.as_ref().expect("set by constructor");
                for (name, e) in &hg.edges {
                    if e.intersection(chosen).count() > caps[name] {
                        return fail(format!("hyperedge {name} over capacity"));
                    }
                }
            }
            ProblemKind::DominatingSet => {
                for (name, e) in &hg.edges {
                    if !chosen.contains(name) && !chosen.iter().any(|d| !hg.edges[d].is_disjoint(e)) {
                        return fail(format!("hyperedge {name} not dominated"));
                    }
                }
            }
            ProblemKind::IndependentSet => {
                let picked: Vec<&String> = chosen.iter().collect();
                for (i, a) in picked.iter().enumerate() {
                    for b in &picked[i + 1..] {
                        if !hg.edges[*a].is_disjoint(&hg.edges[*b]) {
                            return fail(format!("hyperedges {a} and {b} intersect"));
                        }
                    }
                }
            }
        }
        Ok(Ok(()))
    }

    /// Capacitated packing with `fixed` already chosen: the remaining
    /// instance on the other elements, with every capacity replaced by its
    /// residual and hyperedges of residual zero removed together with the
    /// elements they contain.
    pub fn residual(&self, fixed: &BTreeSet<String>) -> Result<ProblemInstance> {
        let caps = self.capacities.as_ref().ok_or(SolverError::CapacitiesRequired)?;
        let mut closed = BTreeSet::new();
        let mut residual = BTreeMap::new();
        for (name, e) in &self.hg.edges {
            let used = e.intersection(fixed).count();
            if used > caps[name] {
                return Err(SolverError::Infeasible(name.clone()).into());
            }
            if used == caps[name] {
                closed.extend(e.iter().cloned());
            } else {
                residual.insert(name.clone(), caps[name] - used);
            }
        }
        let ground: BTreeSet<String> = self.hg.ground.iter().filter(|x| !fixed.contains(*x) && !closed.contains(*x)).cloned().collect();
        let edges: BTreeMap<String, BTreeSet<String>> = residual
            .keys()
            .map(|n| (n.clone(), self.hg.edges[n].intersection(&ground).cloned().collect()))
            .collect();
        ProblemInstance::capacitated(Hypergraph { ground, edges }, residual, self.delta.unwrap_or(1))
    }
}

/// Indexed form used by the search: variables are `0..n` in name order.
#[derive(Clone, Debug)]
pub(crate) struct Model {
    pub names: Vec<String>,
    pub maximize: bool,
    /// Each list needs at least one chosen variable.
    pub at_least_one: Vec<(String, Vec<usize>)>,
    /// Each list allows at most the given number of chosen variables.
    pub at_most: Vec<(Vec<usize>, usize)>,
}

impl Model {
    pub fn build(inst: &ProblemInstance) -> Model {
        let names = inst.variables();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let idx = |set: &BTreeSet<String>| -> Vec<usize> { set.iter().filter_map(|x| index.get(x.as_str()).copied()).collect() };
        let hg = &inst.hg;
        let mut m = Model { names: names.clone(), maximize: inst.kind.is_maximization(), at_least_one: vec![], at_most: vec![] };
        match inst.kind {
            ProblemKind::SetCover => {
                for x in &hg.ground {
                    let covering = hg.edges.iter().filter(|(_, e)| e.contains(x)).map(|(n, _)| index[n.as_str()]).collect();
                    m.at_least_one.push((format!("element {x}"), covering));
                }
            }
            ProblemKind::HittingSet | ProblemKind::GeneralizedCover => {
                for (name, e) in &hg.edges {
                    if !(e.is_empty() && inst.kind == ProblemKind::GeneralizedCover) {
                        m.at_least_one.push((format!("hyperedge {name}"), idx(e)));
                    }
                }
            }
            ProblemKind::DominatingSet => {
                for (name, e) in &hg.edges {
                    let closed = hg
                        .edges
                        .iter()
                        .filter(|(n, f)| *n == name || !f.is_disjoint(e))
                        .map(|(n, _)| index[n.as_str()])
                        .collect();
                    m.at_least_one.push((format!("hyperedge {name}"), closed));
                }
            }
            ProblemKind::CapacitatedPacking => {
                let caps = inst.capacities.as_ref().expect("set by constructor");
                for (name, e) in &hg.edges {
                    if e.len() > caps[name] {
                        m.at_most.push((idx(e), caps[name]));
                    }
                }
            }
            ProblemKind::IndependentSet => {
                for x in &hg.ground {
                    let through: Vec<usize> = hg.edges.iter().filter(|(_, e)| e.contains(x)).map(|(n, _)| index[n.as_str()]).collect();
                    if through.len() > 1 {
                        m.at_most.push((through, 1));
                    }
                }
            }
        }
        m
    }

    pub fn feasible(&self, chosen: &[bool]) -> bool {
        self.at_least_one.iter().all(|(_, l)| l.iter().any(|&i| chosen[i]))
            && self.at_most.iter().all(|(l, c)| l.iter().filter(|&&i| chosen[i]).count() <= *c)
    }

    /// Error if even the loosest selection is infeasible.
    pub fn check_feasible_instance(&self) -> Result<()> {
        if let Some((what, _)) = self.at_least_one.iter().find(|(_, l)| l.is_empty()) {
            return Err(SolverError::Infeasible(what.clone()).into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Optimum {
    pub value: usize,
    pub witness: BTreeSet<String>,
}

/// Exact optimum by enumerating selections in order of size. Among optimal
/// selections of the same size, the first in index-mask order is returned.
pub fn brute_force_optimum(inst: &ProblemInstance, max_size: usize) -> Result<Optimum> {
    let limit = max_size.min(BRUTE_FORCE_OPTIMUM_LIMIT);
    let m = Model::build(inst);
    let n = m.names.len();
    if n > limit {
        return Err(Error::SizeGuard { what: "brute-force variable count", got: n, limit });
    }
    m.check_feasible_instance()?;
    let sizes: Vec<usize> = if m.maximize { (0..=n).rev().collect() } else { (0..=n).collect() };
    for size in sizes {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let chosen: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            if m.feasible(&chosen) {
                let witness = (0..n).filter(|&i| chosen[i]).map(|i| m.names[i].clone()).collect();
                return Ok(Optimum { value: size, witness });
            }
        }
    }
    Err(Error::internal("brute force found no feasible selection"))
}
