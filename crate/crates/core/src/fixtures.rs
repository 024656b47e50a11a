//! Small named systems used by tests, benches and the CLI.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::regions::{build_system, torus_row_column_regions, RegionSystem};
use crate::system::GraphSystem;
use crate::verify::Hypergraph;

/// Planar host on a..f shared by the example primal and dual systems.
pub fn example_rotations() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("a", vec!["b"]),
        ("b", vec!["c", "a", "e"]),
        ("c", vec!["b", "e", "d"]),
        ("d", vec!["c", "e"]),
        ("e", vec!["d", "c", "b", "f"]),
        ("f", vec!["e"]),
    ]
}

/// Four overlapping members on the example host.
pub fn example_system() -> GraphSystem {
    GraphSystem::from_names(
        &example_rotations(),
        &[
            ("H1", vec!["a", "b", "c", "d"]),
            ("H2", vec!["c", "d", "e"]),
            ("H3", vec!["a", "b", "f", "e"]),
            ("H4", vec!["a", "b", "c", "e"]),
        ],
    )
    .expect("example system is valid")
}

/// The example system with every vertex blue.
pub fn example_primal_system() -> GraphSystem {
    example_system().with_red_names::<&str>(&[]).expect("coloring covers the host")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntersectionVariant {
    /// `H2 = {a, b, c, e}`.
    Standard,
    /// `H2 = {a, b, e}`.
    Narrow,
}

/// Planar host on a..f for the example intersection system.
pub fn example_intersection_rotations() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("a", vec!["b"]),
        ("b", vec!["a", "c", "e", "f"]),
        ("c", vec!["b", "e", "d"]),
        ("d", vec!["c", "e"]),
        ("e", vec!["b", "d", "c", "f"]),
        ("f", vec!["b", "e"]),
    ]
}

pub fn example_intersection_system(variant: IntersectionVariant) -> GraphSystem {
    let h2 = match variant {
        IntersectionVariant::Standard => vec!["a", "b", "c", "e"],
        IntersectionVariant::Narrow => vec!["a", "b", "e"],
    };
    GraphSystem::from_names(
        &example_intersection_rotations(),
        &[("H1", vec!["a", "b", "c"]), ("H2", h2), ("H3", vec!["c", "e", "f"]), ("H4", vec!["b", "e", "d"])],
    )
    .and_then(|s| s.with_k_names(&[("K1", vec!["c", "d"]), ("K2", vec!["b", "f"]), ("K3", vec!["e", "d"])]))
    .expect("example intersection system is valid")
}

/// The three rows and three columns of the 3x3 torus grid: pairwise
/// non-piercing, but a row and a column cross.
pub fn torus_rows_and_columns() -> Result<RegionSystem> {
    let (grid, regions) = torus_row_column_regions();
    build_system(&grid, &regions, None)
}

/// Every pair of `n` elements `x0..` as a hyperedge.
pub fn all_pairs_hypergraph(n: usize) -> Hypergraph {
    let ground: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut edges = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.insert(format!("{}-{}", ground[i], ground[j]), BTreeSet::from([ground[i].clone(), ground[j].clone()]));
        }
    }
    Hypergraph { ground: ground.into_iter().collect(), edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Execution;

    #[test]
    fn examples_are_planar_and_cross_free() {
        let systems = [
            example_system(),
            example_intersection_system(IntersectionVariant::Standard),
            example_intersection_system(IntersectionVariant::Narrow),
        ];
        for s in systems {
            assert_eq!(s.host().genus().unwrap(), 0);
            assert!(s.first_crossing(Execution::Sequential).is_none());
        }
    }

    #[test]
    fn rows_and_columns_cross() {
        let rs = torus_rows_and_columns().unwrap();
        assert_eq!(rs.system.host().genus().unwrap(), 1);
        assert!(rs.system.is_non_piercing());
        assert!(!rs.is_cross_free());
    }

    #[test]
    fn all_pairs() {
        assert_eq!(all_pairs_hypergraph(5).edges.len(), 10);
    }
}
