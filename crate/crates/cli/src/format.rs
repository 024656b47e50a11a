//! The system file format, its canonical form and DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crossfree::embedding::canonical_cycle;
use crossfree::regions::{build_system, GridSpec, Region};
use crossfree::system::Color;
use crossfree::{EmbeddedGraph, GraphSystem, VertexId};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// A host graph with named rotations and its families, or a grid shorthand
/// that expands to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub format_version: u32,
    /// Vertex order; defaults to the order of `rotations`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<String>,
    /// Neighbor names around each vertex, counterclockwise.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rotations: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<BTreeMap<String, Color>>,
    #[serde(rename = "H", default, skip_serializing_if = "BTreeMap::is_empty")]
    pub h: BTreeMap<String, Vec<String>>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridShorthand>,
}

/// Regions as cell lists on a grid host. Cell `(r, c)` becomes vertex `r<r>c<c>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridShorthand {
    #[serde(flatten)]
    pub spec: GridSpec,
    #[serde(rename = "H")]
    pub h: Vec<Region>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<Region>>,
}

fn semantic(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {msg}", path.display()))
}

pub fn read_file(path: &Path) -> Result<SystemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let file: SystemFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if file.format_version != FORMAT_VERSION {
        return Err(semantic(path, format!("format_version {} is not supported (expected {FORMAT_VERSION})", file.format_version)));
    }
    Ok(file)
}

pub fn load(path: &Path) -> Result<GraphSystem, CliError> {
    let file = read_file(path)?;
    file.to_system().map_err(|e| semantic(path, e))
}

pub fn save(sys: &GraphSystem, path: &Path) -> Result<(), CliError> {
    let text = to_json(&SystemFile::from_system(sys))?;
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn named_family(f: &BTreeMap<String, Vec<String>>) -> Vec<(&str, Vec<&str>)> {
    f.iter().map(|(n, vs)| (n.as_str(), vs.iter().map(String::as_str).collect())).collect()
}

impl SystemFile {
    /// Resolves names and validates the system. Errors name the failed invariant.
    pub fn to_system(&self) -> Result<GraphSystem, String> {
        let sys = match &self.grid {
            Some(g) => {
                if !self.vertices.is_empty() || !self.rotations.is_empty() || !self.h.is_empty() || self.k.is_some() {
                    return Err("grid shorthand excludes vertices, rotations, H and K".into());
                }
                build_system(&g.spec, &g.h, g.k.as_deref()).map_err(|e| e.to_string())?.system
            }
            None => self.explicit_system()?,
        };
        match &self.coloring {
            None => Ok(sys),
            Some(c) => {
                let mut col = BTreeMap::new();
                for (name, color) in c {
                    let v = sys.vertex_by_name(name).ok_or_else(|| format!("coloring names unknown vertex {name:?}"))?;
                    col.insert(v, *color);
                }
                sys.with_coloring(col).map_err(|e| e.to_string())
            }
        }
    }

    fn explicit_system(&self) -> Result<GraphSystem, String> {
        let order: Vec<&String> = if self.vertices.is_empty() { self.rotations.keys().collect() } else { self.vertices.iter().collect() };
        let known: BTreeSet<&String> = order.iter().copied().collect();
        if known.len() != order.len() {
            return Err("vertices lists a name twice".into());
        }
        if let Some(extra) = self.rotations.keys().find(|n| !known.contains(n)) {
            return Err(format!("rotation given for undeclared vertex {extra:?}"));
        }
        let empty = Vec::new();
        let mut rotations = Vec::new();
        for v in &order {
            let nbrs = self.rotations.get(*v).unwrap_or(&empty);
            let mut seen = BTreeSet::new();
            for w in nbrs {
                if !known.contains(w) {
                    return Err(format!("rotation of {v:?} mentions unknown vertex {w:?}"));
                }
                if w == *v {
                    return Err(format!("rotation of {v:?} has a loop; only simple hosts are accepted"));
                }
                if !seen.insert(w) {
                    return Err(format!("rotation of {v:?} mentions {w:?} twice"));
                }
                if !self.rotations.get(w).is_some_and(|back| back.contains(v)) {
                    return Err(format!("{w:?} is in the rotation of {v:?} but not the other way round"));
                }
            }
            rotations.push((v.as_str(), nbrs.iter().map(String::as_str).collect::<Vec<_>>()));
        }
        let mut sys = GraphSystem::from_names(&rotations, &named_family(&self.h)).map_err(|e| e.to_string())?;
        if let Some(k) = &self.k {
            sys = sys.with_k_names(&named_family(k)).map_err(|e| e.to_string())?;
        }
        Ok(sys)
    }

    /// Canonical explicit form: vertices in id order, each rotation starting
    /// at its smallest neighbor name, member lists sorted.
    pub fn from_system(sys: &GraphSystem) -> SystemFile {
        let host = sys.host();
        let vertices: Vec<String> = host.vertices().map(|v| sys.name(v)).collect();
        let rotations = host
            .vertices()
            .map(|v| {
                let names: Vec<String> = host.neighbors(v).map(|w| sys.name(w)).collect();
                (sys.name(v), canonical_cycle(&names))
            })
            .collect();
        let family = |f: &BTreeMap<String, BTreeSet<VertexId>>| -> BTreeMap<String, Vec<String>> {
            f.iter()
                .map(|(n, set)| {
                    let mut names: Vec<String> = set.iter().map(|&v| sys.name(v)).collect();
                    names.sort();
                    (n.clone(), names)
                })
                .collect()
        };
        SystemFile {
            format_version: FORMAT_VERSION,
            vertices,
            rotations,
            coloring: sys.coloring().map(|c| c.iter().map(|(v, col)| (sys.name(*v), *col)).collect()),
            h: family(sys.h()),
            k: sys.k().map(family),
            grid: None,
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT text for a simple embedded graph.
pub fn dot(name: &str, g: &EmbeddedGraph, label: impl Fn(VertexId) -> String) -> String {
    let mut out = format!("graph {} {{\n", quote(name));
    for v in g.vertices() {
        let _ = writeln!(out, "  {};", quote(&label(v)));
    }
    for (_, u, w) in g.edges() {
        let _ = writeln!(out, "  {} -- {};", quote(&label(u)), quote(&label(w)));
    }
    out.push_str("}\n");
    out
}
