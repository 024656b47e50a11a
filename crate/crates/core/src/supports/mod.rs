//! Primal, dual and intersection supports built by rewriting the embedded
//! host: vertex bypasses and edge contractions only, so the support inherits
//! an embedding on the host's surface.

mod dual;
mod intersection;
mod primal;

use std::collections::BTreeMap;

use serde::Serialize;

pub use dual::{dual_support, SpecialEdge, SpecialEdgeCertificate};
pub use intersection::intersection_support;
pub use primal::primal_support;

use crate::bypass::{bypass_in_place, BypassRecord};
use crate::embedding::{EdgeId, EmbeddedGraph, VertexId};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::system::{is_maximal, Color, GraphSystem, Scope};

pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Maximum number of bypasses plus contractions before giving up.
    pub budget: usize,
    /// Re-verify member connectivity and cross-freeness after every step.
    pub audit: bool,
    pub exec: Execution,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { budget: DEFAULT_STEP_BUDGET, audit: false, exec: Execution::Parallel }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RewriteStep {
    DropMember { name: String, reason: String },
    Bypass { vertex: VertexId, degree: usize, chords: usize },
    Contract { edge: EdgeId, into: VertexId, removed: VertexId, reason: &'static str },
    Strip { member: String, successor: String },
    Pendant { member: String, attached_to: String },
    AddDummy { member: String, vertex: VertexId },
    RemoveEdge { between: (String, String), reason: &'static str },
    Simplify { removed_edges: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportResult {
    pub support: EmbeddedGraph,
    /// Terminal name (primal) or member name (dual, intersection) of every
    /// support vertex.
    pub vertex_meaning: BTreeMap<VertexId, String>,
    pub log: Vec<RewriteStep>,
    pub certified_genus: u32,
    pub warnings: Vec<String>,
}

impl SupportResult {
    /// Support edges as pairs of vertex meanings.
    pub fn named_edges(&self) -> Vec<(String, String)> {
        self.support
            .edges()
            .map(|(_, u, w)| (self.vertex_meaning[&u].clone(), self.vertex_meaning[&w].clone()))
            .collect()
    }

    pub fn vertex_named(&self, name: &str) -> Option<VertexId> {
        self.vertex_meaning.iter().find(|(_, n)| n.as_str() == name).map(|(v, _)| *v)
    }

    pub fn bypass_count(&self) -> usize {
        self.log.iter().filter(|s| matches!(s, RewriteStep::Bypass { .. })).count()
    }
}

/// Shared mutable state of a pipeline run.
pub(crate) struct Work {
    pub sys: GraphSystem,
    pub log: Vec<RewriteStep>,
    pub steps: usize,
    pub opts: PipelineOptions,
    pub stage: &'static str,
    /// Off during the final red-forest contraction, which only needs
    /// connected members.
    pub check_crossings: bool,
}

impl Work {
    pub fn new(sys: GraphSystem, opts: PipelineOptions, stage: &'static str) -> Self {
        Work { sys, log: Vec::new(), steps: 0, opts, stage, check_crossings: true }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.opts.budget {
            return Err(Error::BudgetExhausted { budget: self.opts.budget, stage: self.stage });
        }
        Ok(())
    }

    fn audit(&self) -> Result<()> {
        if !self.opts.audit {
            return Ok(());
        }
        self.sys.validate_working()?;
        if !self.check_crossings {
            return Ok(());
        }
        if let Some(w) = self.sys.first_crossing(self.opts.exec) {
            return Err(Error::internal(format!("{}: rewrite produced a crossing: {w}", self.stage)));
        }
        Ok(())
    }

    pub fn contract(&mut self, e: EdgeId, into: VertexId, reason: &'static str) -> Result<()> {
        self.tick()?;
        let (u, w) = self.sys.host.endpoints(e)?;
        let removed = if into == u { w } else { u };
        self.sys.contract_into(e, into)?;
        self.sys.host.remove_loops();
        self.log.push(RewriteStep::Contract { edge: e, into, removed, reason });
        self.audit()
    }

    pub fn bypass(&mut self, v: VertexId, scope: Scope) -> Result<BypassRecord> {
        self.tick()?;
        let degree = self.sys.host.degree(v);
        let rec = bypass_in_place(&mut self.sys, v, scope)?;
        self.log.push(RewriteStep::Bypass { vertex: v, degree, chords: rec.chords.len() });
        self.audit()?;
        Ok(rec)
    }

    /// Contracts adjacent twins among vertices accepted by `eligible` until
    /// none are left. The lower id survives.
    pub fn contract_adjacent_twins(&mut self, scope: Scope, eligible: impl Fn(&GraphSystem, VertexId) -> bool) -> Result<()> {
        loop {
            let ms = self.sys.memberships(scope);
            let found = self
                .sys
                .host
                .edges()
                .find(|&(_, u, w)| u != w && ms[&u] == ms[&w] && eligible(&self.sys, u) && eligible(&self.sys, w));
            let Some((e, u, w)) = found else { return Ok(()) };
            self.contract(e, u.min(w), "adjacent twins")?;
        }
    }

    /// Contracts every red vertex into a blue root along edges that carry
    /// all of the red vertex's members. Requires that no red vertex is
    /// maximal and no two red vertices are adjacent twins.
    pub fn contract_red_forest(&mut self, scope: Scope) -> Result<()> {
        self.check_crossings = false;
        loop {
            let reds: Vec<VertexId> = self.sys.host.vertices().filter(|&v| self.sys.color(v) == Some(Color::Red)).collect();
            if reds.is_empty() {
                return Ok(());
            }
            let ms = self.sys.memberships(scope);
            let mut pick = None;
            'outer: for &r in &reds {
                for &d in self.sys.host.rotation(r) {
                    let b = self.sys.host.head(d);
                    if b != r && self.sys.color(b) == Some(Color::Blue) && ms[&r].is_subset(&ms[&b]) {
                        pick = Some((d.edge(), b));
                        break 'outer;
                    }
                }
            }
            let Some((e, b)) = pick else {
                return Err(Error::internal(format!(
                    "{}: {} red vertices left but none has a full edge to a blue vertex",
                    self.stage,
                    reds.len()
                )));
            };
            self.contract(e, b, "red into blue root")?;
        }
    }

    /// Fails if some red vertex is maximal or two red vertices are adjacent
    /// twins.
    pub fn assert_red_forest_ready(&self, scope: Scope) -> Result<()> {
        let ms = self.sys.memberships(scope);
        for v in self.sys.host.vertices() {
            if self.sys.color(v) == Some(Color::Red) && is_maximal(&self.sys.host, &ms, v) {
                return Err(Error::internal(format!("{}: red vertex {v} is maximal", self.stage)));
            }
        }
        for (_, u, w) in self.sys.host.edges() {
            if u != w
                && self.sys.color(u) == Some(Color::Red)
                && self.sys.color(w) == Some(Color::Red)
                && ms[&u] == ms[&w]
            {
                return Err(Error::internal(format!("{}: red vertices {u} and {w} are adjacent twins", self.stage)));
            }
        }
        Ok(())
    }

    pub fn simplify(&mut self) {
        let before = self.sys.host.edge_count();
        self.sys.host.simplify_in_place();
        let removed = before - self.sys.host.edge_count();
        if removed > 0 {
            self.log.push(RewriteStep::Simplify { removed_edges: removed });
        }
    }
}

/// Rejects systems that cross (H against H, K against K).
pub(crate) fn require_cross_free(sys: &GraphSystem, exec: Execution) -> Result<()> {
    match sys.first_crossing(exec) {
        Some(w) => Err(crate::error::ContractViolation::Crossing(w).into()),
        None => Ok(()),
    }
}

/// Largest depth among maximal vertices accepted by `eligible`, with those
/// vertices in id order.
pub(crate) fn deepest_maximal(
    sys: &GraphSystem,
    scope: Scope,
    eligible: impl Fn(VertexId) -> bool,
) -> Option<(usize, Vec<VertexId>)> {
    let ms = sys.memberships(scope);
    let maximal: Vec<(usize, VertexId)> = sys
        .host
        .vertices()
        .filter(|&v| eligible(v) && is_maximal(&sys.host, &ms, v))
        .map(|v| (ms[&v].len(), v))
        .collect();
    let d = maximal.iter().map(|x| x.0).max()?;
    Some((d, maximal.into_iter().filter(|x| x.0 == d).map(|x| x.1).collect()))
}
