//! Machine-readable reports. The shape is pinned by `schemas/report.schema.json`.

use std::collections::BTreeMap;

use crossfree::solver::{ProblemKind, Solution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Check { results: Vec<CheckReport> },
    Primal(SupportReport),
    Dual(SupportReport),
    Intersection(SupportReport),
    Verify(VerifyReport),
    Color(ColorReport),
    Solve(SolveReport),
    Gen(WrittenReport),
    FromGrid(WrittenReport),
}

impl Report {
    /// 0 unless a verification came out negative.
    pub fn exit_code(&self) -> u8 {
        match self {
            Report::Verify(v) if !v.pass => 2,
            Report::Color(c) if !c.proper => 2,
            _ => 0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub file: String,
    pub vertices: usize,
    pub edges: usize,
    pub host_genus: u32,
    pub cross_free: bool,
    pub crossing: Option<CrossingReport>,
    pub non_piercing: bool,
    pub piercing: Option<PiercingReport>,
}

#[derive(Debug, Serialize)]
pub struct CrossingReport {
    pub family: String,
    pub first: String,
    pub second: String,
    pub vertex: String,
    pub darts: [u32; 4],
}

#[derive(Debug, Serialize)]
pub struct PiercingReport {
    pub family: String,
    pub first: String,
    pub second: String,
    pub components: Vec<Vec<String>>,
}

/// A support graph by vertex names. Also the input format of `verify`.
#[derive(Debug, Serialize, Deserialize)]
pub struct NamedGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub rotations: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct SpecialEdgeReport {
    pub host_edge: [String; 2],
    pub support_edge: [String; 2],
}

#[derive(Debug, Serialize)]
pub struct SupportReport {
    pub file: String,
    pub mode: String,
    pub host_genus: u32,
    pub certified_genus: u32,
    /// Result of re-checking the support against the extracted hypergraph.
    pub verified: bool,
    pub support: NamedGraph,
    /// Support vertex id to terminal or member name.
    pub vertex_meaning: BTreeMap<u32, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special_edges: Option<Vec<SpecialEdgeReport>>,
    /// Rewrite steps by kind.
    pub rewrites: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub file: String,
    pub support_file: String,
    pub mode: String,
    pub is_support: bool,
    pub failing_hyperedge: Option<String>,
    pub simple: bool,
    pub traced_genus: u32,
    pub host_genus: u32,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ColorReport {
    pub file: String,
    pub mode: String,
    pub colors: BTreeMap<String, usize>,
    pub color_count: usize,
    pub degeneracy: usize,
    /// No hyperedge with two or more elements is monochromatic.
    pub proper: bool,
    pub certified_genus: u32,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub file: String,
    pub mode: String,
    pub kind: ProblemKind,
    pub seed: u64,
    pub variables: usize,
    pub solution: Solution,
    pub feasible: bool,
    /// `None` when the instance is too large for the exhaustive check.
    pub locally_optimal: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct WrittenReport {
    pub out: String,
    pub vertices: usize,
    pub edges: usize,
    pub members: usize,
}
