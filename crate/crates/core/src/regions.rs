//! Graph systems from cell regions on grid and torus-grid hosts.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{EmbeddedGraph, VertexId};
use crate::error::Result;
use crate::par::Execution;
use crate::system::{induced_components, Color, CrossingWitness, Family, GraphSystem};

pub type Cell = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Plane,
    Torus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub topology: Topology,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub cells: BTreeSet<Cell>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
    #[error("a torus grid needs at least 3 rows and 3 columns, got {rows}x{cols}")]
    TorusTooSmall { rows: usize, cols: usize },
    #[error("region {region:?} has cell {cell:?} outside the grid")]
    CellOutOfRange { region: String, cell: Cell },
    #[error("region {0:?} is empty")]
    Empty(String),
    #[error("region {0:?} is not connected on the grid")]
    Disconnected(String),
    #[error("region name {0:?} is used twice")]
    DuplicateName(String),
    #[error("this generator only supports plane grids")]
    PlaneOnly,
}

impl GridSpec {
    pub fn plane(rows: usize, cols: usize) -> Self {
        GridSpec { rows, cols, topology: Topology::Plane }
    }

    pub fn torus(rows: usize, cols: usize) -> Self {
        GridSpec { rows, cols, topology: Topology::Torus }
    }

    pub fn check(&self) -> std::result::Result<(), RegionError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(RegionError::EmptyGrid);
        }
        if self.topology == Topology::Torus && (self.rows < 3 || self.cols < 3) {
            return Err(RegionError::TorusTooSmall { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    pub fn vertex(&self, (r, c): Cell) -> VertexId {
        VertexId((r * self.cols + c) as u32)
    }

    pub fn cell(&self, v: VertexId) -> Cell {
        let i = v.0 as usize;
        (i / self.cols, i % self.cols)
    }

    pub fn cell_name((r, c): Cell) -> String {
        format!("r{r}c{c}")
    }

    /// Grid neighbors in the order up, right, down, left.
    pub fn neighbors(&self, (r, c): Cell) -> Vec<Cell> {
        let (rows, cols) = (self.rows, self.cols);
        match self.topology {
            Topology::Torus => vec![
                ((r + rows - 1) % rows, c),
                (r, (c + 1) % cols),
                ((r + 1) % rows, c),
                (r, (c + cols - 1) % cols),
            ],
            Topology::Plane => {
                let mut out = Vec::with_capacity(4);
                if r > 0 {
                    out.push((r - 1, c));
                }
                if c + 1 < cols {
                    out.push((r, c + 1));
                }
                if r + 1 < rows {
                    out.push((r + 1, c));
                }
                if c > 0 {
                    out.push((r, c - 1));
                }
                out
            }
        }
    }

    pub fn host(&self) -> Result<EmbeddedGraph> {
        self.check()?;
        let mut rot = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                rot.push((self.vertex((r, c)), self.neighbors((r, c)).into_iter().map(|x| self.vertex(x)).collect()));
            }
        }
        Ok(EmbeddedGraph::from_neighbor_rotations(&rot)?)
    }

    fn contains(&self, (r, c): Cell) -> bool {
        r < self.rows && c < self.cols
    }

    fn is_connected(&self, cells: &BTreeSet<Cell>) -> bool {
        let Some(&start) = cells.iter().next() else { return false };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if cells.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == cells.len()
    }
}

impl Region {
    pub fn new(name: impl Into<String>, cells: impl IntoIterator<Item = Cell>) -> Self {
        Region { name: name.into(), cells: cells.into_iter().collect() }
    }

    /// Rows `r0..r0+h` and columns `c0..c0+w`, wrapping on a torus.
    pub fn rectangle(name: impl Into<String>, grid: &GridSpec, (r0, c0): Cell, h: usize, w: usize) -> Self {
        let cells = (0..h).flat_map(|i| (0..w).map(move |j| ((r0 + i) % grid.rows, (c0 + j) % grid.cols)));
        Region::new(name, cells)
    }
}

/// A grid system with its cross-freeness verdict. Construction does not
/// make regions cross-free; it reports whether they are.
#[derive(Clone, Debug)]
pub struct RegionSystem {
    pub system: GraphSystem,
    pub crossing: Option<CrossingWitness>,
}

impl RegionSystem {
    pub fn is_cross_free(&self) -> bool {
        self.crossing.is_none()
    }
}

fn family(grid: &GridSpec, regions: &[Region], seen: &mut BTreeSet<String>) -> std::result::Result<Family, RegionError> {
    let mut fam = Family::new();
    for reg in regions {
        if !seen.insert(reg.name.clone()) {
            return Err(RegionError::DuplicateName(reg.name.clone()));
        }
        if reg.cells.is_empty() {
            return Err(RegionError::Empty(reg.name.clone()));
        }
        if let Some(&cell) = reg.cells.iter().find(|&&x| !grid.contains(x)) {
            return Err(RegionError::CellOutOfRange { region: reg.name.clone(), cell });
        }
        if !grid.is_connected(&reg.cells) {
            return Err(RegionError::Disconnected(reg.name.clone()));
        }
        fam.insert(reg.name.clone(), reg.cells.iter().map(|&x| grid.vertex(x)).collect());
    }
    Ok(fam)
}

pub fn build_system(grid: &GridSpec, h: &[Region], k: Option<&[Region]>) -> Result<RegionSystem> {
    let host = grid.host()?;
    let mut seen = BTreeSet::new();
    let hf = family(grid, h, &mut seen)?;
    let names = host.vertices().map(|v| (v, GridSpec::cell_name(grid.cell(v)))).collect();
    let mut system = GraphSystem::new(host, hf)?.with_names(names)?;
    if let Some(k) = k {
        // H and K live in separate namespaces
        let kf = family(grid, k, &mut BTreeSet::new())?;
        system = system.with_k(kf)?;
    }
    let crossing = system.first_crossing(Execution::Parallel);
    Ok(RegionSystem { system, crossing })
}

fn pierces(host: &EmbeddedGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> bool {
    let d1: BTreeSet<VertexId> = a.difference(b).copied().collect();
    let d2: BTreeSet<VertexId> = b.difference(a).copied().collect();
    induced_components(host, &d1).len() > 1 || induced_components(host, &d2).len() > 1
}

fn random_rect(grid: &GridSpec, rng: &mut impl Rng, name: String) -> Region {
    match grid.topology {
        Topology::Plane => {
            let (r0, r1) = ordered(rng.gen_range(0..grid.rows), rng.gen_range(0..grid.rows));
            let (c0, c1) = ordered(rng.gen_range(0..grid.cols), rng.gen_range(0..grid.cols));
            Region::rectangle(name, grid, (r0, c0), r1 - r0 + 1, c1 - c0 + 1)
        }
        Topology::Torus => {
            let start = (rng.gen_range(0..grid.rows), rng.gen_range(0..grid.cols));
            let h = rng.gen_range(1..grid.rows);
            let w = rng.gen_range(1..grid.cols);
            Region::rectangle(name, grid, start, h, w)
        }
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Draws regions one at a time, keeping a candidate only if `accept`
/// allows it next to the regions kept so far.
fn rejection_sample(
    count: usize,
    rng: &mut ChaCha8Rng,
    mut draw: impl FnMut(&mut ChaCha8Rng, usize) -> Region,
    mut accept: impl FnMut(&[Region], &Region) -> bool,
) -> Vec<Region> {
    let mut out: Vec<Region> = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let cand = draw(rng, out.len());
        if out.iter().all(|r| r.cells != cand.cells) && accept(&out, &cand) {
            out.push(cand);
        }
    }
    out
}

fn non_piercing_rects(grid: &GridSpec, count: usize, prefix: &str, rng: &mut ChaCha8Rng) -> Result<Vec<Region>> {
    let host = grid.host()?;
    let ids = |r: &Region| r.cells.iter().map(|&x| grid.vertex(x)).collect::<BTreeSet<_>>();
    Ok(rejection_sample(
        count,
        rng,
        |rng, i| random_rect(grid, rng, format!("{prefix}{i}")),
        |kept, cand| kept.iter().all(|r| !pierces(&host, &ids(r), &ids(cand))),
    ))
}

/// Up to `count` distinct axis-aligned rectangles on a plane grid, pairwise
/// non-piercing. Two rectangles can pierce (a thin horizontal bar across a
/// thin vertical one), so such draws are rejected.
pub fn random_rectangle_system(grid: &GridSpec, count: usize, seed: u64) -> Result<GraphSystem> {
    if grid.topology != Topology::Plane {
        return Err(RegionError::PlaneOnly.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = non_piercing_rects(grid, count, "R", &mut rng)?;
    Ok(build_system(grid, &h, None)?.system)
}

/// As [`random_rectangle_system`], with a second independent rectangle
/// family as K. H and K may pierce each other.
pub fn random_rectangle_intersection_system(grid: &GridSpec, h_count: usize, k_count: usize, seed: u64) -> Result<GraphSystem> {
    if grid.topology != Topology::Plane {
        return Err(RegionError::PlaneOnly.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = non_piercing_rects(grid, h_count, "R", &mut rng)?;
    let k = non_piercing_rects(grid, k_count, "K", &mut rng)?;
    Ok(build_system(grid, &h, Some(&k))?.system)
}

/// Wrapping rectangles on a torus grid, keeping only candidates that leave
/// every family cross-free.
pub fn random_torus_system(grid: &GridSpec, h_count: usize, k_count: usize, seed: u64) -> Result<GraphSystem> {
    let grid = GridSpec { topology: Topology::Torus, ..*grid };
    grid.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |prefix: &str, count: usize, rng: &mut ChaCha8Rng| {
        rejection_sample(
            count,
            rng,
            |rng, i| random_rect(&grid, rng, format!("{prefix}{i}")),
            |kept, cand| {
                let mut all = kept.to_vec();
                all.push(cand.clone());
                build_system(&grid, &all, None).is_ok_and(|s| s.is_cross_free())
            },
        )
    };
    let h = pick("R", h_count, &mut rng);
    let k = pick("K", k_count, &mut rng);
    let k = (k_count > 0).then_some(k.as_slice());
    Ok(build_system(&grid, &h, k)?.system)
}

/// Random connected cell sets of at most `max_cells` cells, pairwise
/// non-piercing.
pub fn random_blob_system(grid: &GridSpec, count: usize, max_cells: usize, seed: u64) -> Result<GraphSystem> {
    let host = grid.host()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = |r: &Region| r.cells.iter().map(|&x| grid.vertex(x)).collect::<BTreeSet<_>>();
    let regions = rejection_sample(
        count,
        &mut rng,
        |rng, i| {
            let size = rng.gen_range(1..=max_cells.max(1));
            let start = (rng.gen_range(0..grid.rows), rng.gen_range(0..grid.cols));
            let mut cells = BTreeSet::from([start]);
            while cells.len() < size {
                let frontier: Vec<Cell> = cells
                    .iter()
                    .flat_map(|&x| grid.neighbors(x))
                    .filter(|x| !cells.contains(x))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let Some(&next) = frontier.choose(rng) else { break };
                cells.insert(next);
            }
            Region::new(format!("B{i}"), cells)
        },
        |kept, cand| kept.iter().all(|r| !pierces(&host, &ids(r), &ids(cand))),
    );
    Ok(build_system(grid, &regions, None)?.system)
}

/// Colors each host vertex red with probability `red`, keeping at least one
/// blue vertex.
pub fn random_coloring(sys: GraphSystem, red: f64, seed: u64) -> Result<GraphSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut col: BTreeMap<VertexId, Color> =
        sys.host().vertices().map(|v| (v, if rng.gen_bool(red) { Color::Red } else { Color::Blue })).collect();
    if !col.values().any(|&c| c == Color::Blue) {
        if let Some(c) = col.values_mut().next() {
            *c = Color::Blue;
        }
    }
    Ok(sys.with_coloring(col)?)
}

/// Rows and columns of the 3x3 torus grid as six cycle regions.
pub fn torus_row_column_regions() -> (GridSpec, Vec<Region>) {
    let grid = GridSpec::torus(3, 3);
    let mut regions = Vec::new();
    for i in 0..3 {
        regions.push(Region::new(format!("row{i}"), (0..3).map(|c| (i, c))));
    }
    for j in 0..3 {
        regions.push(Region::new(format!("col{j}"), (0..3).map(|r| (r, j))));
    }
    (grid, regions)
}
