//! Families of vertex sets on a cycle: runs, the abab pattern, and
//! non-crossing chord sets that make every family connected.
//!
//! Positions are cycle indices. A chord is stored by its two endpoint
//! vertices; the cycle edges themselves are never chords.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::embedding::VertexId;
use crate::error::{ContractViolation, Error, Result};

/// A cycle together with named subsets of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSystem {
    pub cycle: Vec<VertexId>,
    pub families: BTreeMap<String, BTreeSet<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbabWitness {
    pub first: String,
    pub second: String,
    pub vertices: [VertexId; 4],
}

impl fmt::Display for AbabWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.vertices;
        write!(f, "{:?} and {:?} interleave at {a}, {b}, {c}, {d}", self.first, self.second)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chord {
    pub a: VertexId,
    pub b: VertexId,
    /// The family whose runs this chord joins.
    pub family: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChordSet {
    pub chords: Vec<Chord>,
}

impl ChordSet {
    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.chords.iter().map(|c| (c.a, c.b)).collect()
    }
}

impl CycleSystem {
    pub fn new(cycle: Vec<VertexId>, families: BTreeMap<String, BTreeSet<VertexId>>) -> Self {
        CycleSystem { cycle, families }
    }

    /// First pair of families forming an abab pattern, by name order.
    pub fn first_abab(&self) -> Option<AbabWitness> {
        let fams: Vec<(&String, &BTreeSet<VertexId>)> = self.families.iter().collect();
        for i in 0..fams.len() {
            for j in i + 1..fams.len() {
                if let Some(vertices) = abab_witness(&self.cycle, fams[i].1, fams[j].1) {
                    return Some(AbabWitness { first: fams[i].0.clone(), second: fams[j].0.clone(), vertices });
                }
            }
        }
        None
    }

    pub fn is_abab_free(&self) -> bool {
        self.first_abab().is_none()
    }

    /// Sum over families of (number of runs - 1).
    pub fn cost(&self) -> usize {
        self.families.values().map(|f| runs(&self.cycle, f).len().saturating_sub(1)).sum()
    }
}

/// Maximal arcs of consecutive cycle vertices in `family`, each in cycle
/// order, ordered by their smallest position (so a run wrapping past the
/// anchor comes first).
pub fn runs(cycle: &[VertexId], family: &BTreeSet<VertexId>) -> Vec<Vec<VertexId>> {
    let n = cycle.len();
    let inside: Vec<bool> = cycle.iter().map(|v| family.contains(v)).collect();
    if inside.iter().all(|&b| b) {
        return if n == 0 { Vec::new() } else { vec![cycle.to_vec()] };
    }
    // start scanning just after a non-member so no run is cut in two
    let gap = inside.iter().position(|&b| !b).expect("some vertex is outside");
    let mut out: Vec<(usize, Vec<VertexId>)> = Vec::new();
    let mut current: Option<(usize, Vec<VertexId>)> = None;
    for off in 1..=n {
        let i = (gap + off) % n;
        if inside[i] {
            let entry = current.get_or_insert_with(|| (i, Vec::new()));
            entry.0 = entry.0.min(i);
            entry.1.push(cycle[i]);
        } else if let Some(run) = current.take() {
            out.push(run);
        }
    }
    if let Some(run) = current.take() {
        out.push(run);
    }
    out.sort_by_key(|r| r.0);
    out.into_iter().map(|r| r.1).collect()
}

/// Four vertices `x1, x2, x3, x4` in cyclic order with `x1, x3` only in
/// `f1` and `x2, x4` only in `f2`, if such exist.
pub fn abab_witness(cycle: &[VertexId], f1: &BTreeSet<VertexId>, f2: &BTreeSet<VertexId>) -> Option<[VertexId; 4]> {
    let seq: Vec<(VertexId, bool)> = cycle
        .iter()
        .filter_map(|v| match (f1.contains(v), f2.contains(v)) {
            (true, false) => Some((*v, true)),
            (false, true) => Some((*v, false)),
            _ => None,
        })
        .collect();
    let n = seq.len();
    let boundary = (0..n).find(|&i| seq[i].1 != seq[(i + n - 1) % n].1)?;
    let mut firsts = Vec::with_capacity(4);
    for off in 0..n {
        let i = (boundary + off) % n;
        if off == 0 || seq[i].1 != seq[(i + n - 1) % n].1 {
            firsts.push(seq[i].0);
        }
    }
    if firsts.len() < 4 {
        return None;
    }
    let w = [firsts[0], firsts[1], firsts[2], firsts[3]];
    // report starting from the f1 side
    Some(if seq[boundary].1 { w } else { [w[1], w[2], w[3], w[0]] })
}

pub fn is_abab_free(cycle: &[VertexId], f1: &BTreeSet<VertexId>, f2: &BTreeSet<VertexId>) -> bool {
    abab_witness(cycle, f1, f2).is_none()
}

fn positions(cycle: &[VertexId]) -> BTreeMap<VertexId, usize> {
    cycle.iter().enumerate().map(|(i, v)| (*v, i)).collect()
}

/// Whether chord `{x, y}` blocks `family`: neither endpoint is in it and
/// both open arcs contain one of its vertices.
pub fn blocks(cycle: &[VertexId], x: VertexId, y: VertexId, family: &BTreeSet<VertexId>) -> bool {
    if family.contains(&x) || family.contains(&y) {
        return false;
    }
    let pos = positions(cycle);
    let (i, j) = (pos[&x].min(pos[&y]), pos[&x].max(pos[&y]));
    let inner = cycle[i + 1..j].iter().any(|v| family.contains(v));
    let outer = cycle[j + 1..].iter().chain(cycle[..i].iter()).any(|v| family.contains(v));
    inner && outer
}

/// Distinct vertex sets with the smallest name kept for each.
fn dedup(families: &BTreeMap<String, BTreeSet<VertexId>>) -> BTreeMap<String, BTreeSet<VertexId>> {
    let mut seen = BTreeSet::new();
    let mut out = BTreeMap::new();
    for (name, set) in families {
        if seen.insert(set.clone()) {
            out.insert(name.clone(), set.clone());
        }
    }
    out
}

/// A chord joining two runs of some disconnected family that blocks no
/// family, or `None` when every family is already a single run.
///
/// Candidate families are tried from the fewest vertices up (ties by name);
/// a smallest disconnected family is minimal under inclusion, which is what
/// guarantees success.
pub fn find_non_blocking_chord(cs: &CycleSystem) -> Result<Option<Chord>> {
    if let Some(w) = cs.first_abab() {
        return Err(ContractViolation::NotAbabFree(w).into());
    }
    let fams = dedup(&cs.families);
    let mut disconnected: Vec<(&String, &BTreeSet<VertexId>, Vec<Vec<VertexId>>)> = fams
        .iter()
        .filter_map(|(n, f)| {
            let r = runs(&cs.cycle, f);
            (r.len() > 1).then_some((n, f, r))
        })
        .collect();
    if disconnected.is_empty() {
        return Ok(None);
    }
    disconnected.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.0.cmp(b.0)));
    for (name, _, rs) in &disconnected {
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                for &x in &rs[i] {
                    for &y in &rs[j] {
                        if fams.values().all(|f| !blocks(&cs.cycle, x, y, f)) {
                            return Ok(Some(Chord { a: x, b: y, family: (*name).clone() }));
                        }
                    }
                }
            }
        }
    }
    Err(Error::internal("abab-free cycle system without a non-blocking chord"))
}

/// The arc from `x` to `y` inclusive, walking forward along `cycle`.
fn arc(cycle: &[VertexId], x: VertexId, y: VertexId) -> Vec<VertexId> {
    let n = cycle.len();
    let start = cycle.iter().position(|&v| v == x).expect("x on cycle");
    let mut out = Vec::new();
    for off in 0..n {
        let v = cycle[(start + off) % n];
        out.push(v);
        if v == y {
            break;
        }
    }
    out
}

fn restrict(families: &BTreeMap<String, BTreeSet<VertexId>>, part: &[VertexId]) -> BTreeMap<String, BTreeSet<VertexId>> {
    let keep: BTreeSet<VertexId> = part.iter().copied().collect();
    families
        .iter()
        .filter_map(|(n, f)| {
            let r: BTreeSet<VertexId> = f.intersection(&keep).copied().collect();
            (!r.is_empty()).then(|| (n.clone(), r))
        })
        .collect()
}

/// Non-crossing chords making every family connected in the cycle plus
/// chords. Splits along a non-blocking chord and recurses on both sides,
/// using an explicit worklist.
pub fn chord_set(cs: &CycleSystem) -> Result<ChordSet> {
    if let Some(w) = cs.first_abab() {
        return Err(ContractViolation::NotAbabFree(w).into());
    }
    let mut out = ChordSet::default();
    let mut work = vec![CycleSystem::new(cs.cycle.clone(), dedup(&cs.families))];
    while let Some(sub) = work.pop() {
        if sub.cycle.len() < 4 {
            continue;
        }
        let Some(chord) = find_non_blocking_chord(&sub)? else { continue };
        let (left, right) = arc_split(&sub, chord.a, chord.b);
        out.chords.push(chord);
        work.push(right);
        work.push(left);
    }
    Ok(out)
}

/// The two cycles closed by chord `{a, b}`: the arc from `b` to `a` and the
/// arc from `a` to `b`, each with the families restricted to it.
pub fn arc_split(cs: &CycleSystem, a: VertexId, b: VertexId) -> (CycleSystem, CycleSystem) {
    let left = arc(&cs.cycle, b, a);
    let right = arc(&cs.cycle, a, b);
    let lf = dedup(&restrict(&cs.families, &left));
    let rf = dedup(&restrict(&cs.families, &right));
    (CycleSystem::new(left, lf), CycleSystem::new(right, rf))
}

/// Whether chords `{a, b}` and `{c, d}` cross inside the cycle disk.
pub fn chords_cross(cycle: &[VertexId], (a, b): (VertexId, VertexId), (c, d): (VertexId, VertexId)) -> bool {
    let pos = positions(cycle);
    let (i, j) = (pos[&a].min(pos[&b]), pos[&a].max(pos[&b]));
    let strictly_inside = |v: VertexId| {
        let p = pos[&v];
        p > i && p < j
    };
    let shared = [a, b].contains(&c) || [a, b].contains(&d);
    !shared && strictly_inside(c) != strictly_inside(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: u32) -> Vec<VertexId> {
        (0..n).map(VertexId).collect()
    }

    fn set(xs: &[u32]) -> BTreeSet<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    fn system(n: u32, fams: &[(&str, &[u32])]) -> CycleSystem {
        CycleSystem::new(cyc(n), fams.iter().map(|(k, xs)| (k.to_string(), set(xs))).collect())
    }

    /// Connectivity of each family in cycle + chords, by union-find.
    fn all_connected(cs: &CycleSystem, d: &ChordSet) -> bool {
        let n = cs.cycle.len();
        let mut edges: Vec<(VertexId, VertexId)> = (0..n).map(|i| (cs.cycle[i], cs.cycle[(i + 1) % n])).collect();
        edges.extend(d.pairs());
        cs.families.values().all(|f| {
            let mut parent: BTreeMap<VertexId, VertexId> = f.iter().map(|&v| (v, v)).collect();
            fn find(p: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
                let q = p[&v];
                if q == v {
                    v
                } else {
                    let r = find(p, q);
                    p.insert(v, r);
                    r
                }
            }
            for &(a, b) in &edges {
                if f.contains(&a) && f.contains(&b) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent.insert(ra, rb);
                }
            }
            let roots: BTreeSet<VertexId> = f.iter().map(|&v| find(&mut parent, v)).collect();
            roots.len() <= 1
        })
    }

    #[test]
    fn runs_examples() {
        assert_eq!(runs(&cyc(6), &set(&[0, 1, 2, 3, 4, 5])).len(), 1);
        assert_eq!(runs(&cyc(6), &set(&[0, 2])), vec![vec![VertexId(0)], vec![VertexId(2)]]);
        assert_eq!(
            runs(&cyc(6), &set(&[5, 0, 1, 3])),
            vec![vec![VertexId(5), VertexId(0), VertexId(1)], vec![VertexId(3)]]
        );
        assert!(runs(&cyc(6), &set(&[])).is_empty());
    }

    #[test]
    fn abab_examples() {
        assert!(is_abab_free(&cyc(6), &set(&[0, 1]), &set(&[3, 4])));
        assert_eq!(
            abab_witness(&cyc(6), &set(&[0, 2]), &set(&[1, 3])),
            Some([VertexId(0), VertexId(1), VertexId(2), VertexId(3)])
        );
        assert!(is_abab_free(&cyc(6), &set(&[0, 1, 3]), &set(&[1, 2])));
    }

    #[test]
    fn blocking_predicate() {
        let c = cyc(8);
        assert!(blocks(&c, VertexId(0), VertexId(4), &set(&[2, 6])));
        assert!(!blocks(&c, VertexId(0), VertexId(4), &set(&[0, 6])));
        assert!(!blocks(&c, VertexId(0), VertexId(4), &set(&[1, 2])));
    }

    #[test]
    fn non_blocking_chord_example() {
        let cs = system(6, &[("K0", &[0, 3]), ("K1", &[1, 2])]);
        let ch = find_non_blocking_chord(&cs).unwrap().unwrap();
        assert_eq!((ch.a, ch.b), (VertexId(0), VertexId(3)));
        assert_eq!(ch.family, "K0");
    }

    #[test]
    fn single_runs_need_nothing() {
        let cs = system(6, &[("A", &[0, 1]), ("B", &[3])]);
        assert_eq!(find_non_blocking_chord(&cs).unwrap(), None);
        assert!(chord_set(&cs).unwrap().is_empty());
    }

    #[test]
    fn interleaved_input_is_a_contract_violation() {
        let cs = system(8, &[("K0", &[0, 4]), ("K1", &[2, 6])]);
        assert!(matches!(
            find_non_blocking_chord(&cs),
            Err(Error::Contract(ContractViolation::NotAbabFree(_)))
        ));
    }

    #[test]
    fn chord_set_examples() {
        let cs = system(6, &[("K0", &[0, 3]), ("K1", &[1, 2])]);
        let d = chord_set(&cs).unwrap();
        assert_eq!(d.pairs(), vec![(VertexId(0), VertexId(3))]);

        let cs = system(8, &[("K", &[0, 2, 4]), ("s1", &[1]), ("s5", &[5])]);
        let d = chord_set(&cs).unwrap();
        assert_eq!(d.len(), 2);
        assert!(all_connected(&cs, &d));
    }

    #[test]
    fn duplicate_families_are_merged() {
        let cs = system(6, &[("A", &[0, 3]), ("B", &[0, 3])]);
        let d = chord_set(&cs).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.chords[0].family, "A");
    }

    #[test]
    fn crossing_test() {
        let c = cyc(6);
        let v = VertexId;
        assert!(chords_cross(&c, (v(0), v(3)), (v(1), v(4))));
        assert!(!chords_cross(&c, (v(0), v(3)), (v(3), v(5))));
        assert!(!chords_cross(&c, (v(0), v(2)), (v(3), v(5))));
    }
}
