#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crossfree::chords::{blocks, runs, CycleSystem};
use crossfree::supports::{PipelineOptions, SupportResult};
use crossfree::verify::{certify_genus, extract_hypergraph, is_support, HypergraphMode, SupportGraph};
use crossfree::{EmbeddedGraph, GraphSystem, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn audited() -> PipelineOptions {
    PipelineOptions { audit: true, ..Default::default() }
}

/// Support check, simplicity, genus certificate and the genus bound.
pub fn support_problem(sys: &GraphSystem, r: &SupportResult, mode: HypergraphMode) -> Option<String> {
    let hg = extract_hypergraph(sys, mode).ok()?;
    match is_support(&SupportGraph::from_result(r), &hg) {
        Ok(Ok(())) => {}
        Ok(Err(e)) => return Some(format!("hyperedge {e} disconnected")),
        Err(e) => return Some(e.to_string()),
    }
    if !r.support.is_simple() {
        return Some("support not simple".into());
    }
    let g = certify_genus(&r.support);
    if g != r.certified_genus {
        return Some(format!("certified genus {} but traced {g}", r.certified_genus));
    }
    let host = sys.host().genus().unwrap();
    (g > host).then(|| format!("support genus {g} above host genus {host}"))
}

pub fn assert_support(sys: &GraphSystem, r: &SupportResult, mode: HypergraphMode, what: &str) {
    if let Some(p) = support_problem(sys, r, mode) {
        panic!("{what}: {p}");
    }
}

/// Random connected member of up to `size` vertices grown from a random seed vertex.
fn grow(rng: &mut ChaCha8Rng, g: &EmbeddedGraph, size: usize) -> BTreeSet<VertexId> {
    let vs: Vec<VertexId> = g.vertices().collect();
    let mut set = BTreeSet::from([*vs.choose(rng).unwrap()]);
    while set.len() < size {
        let frontier: Vec<VertexId> = set.iter().flat_map(|&v| g.neighbors(v)).filter(|x| !set.contains(x)).collect();
        let Some(&x) = frontier.choose(rng) else { break };
        set.insert(x);
    }
    set
}

/// Whether the intersection of two members induces a cycle, in which case
/// the reduced graph depends on the contraction order.
pub fn has_ambiguous_pair(g: &EmbeddedGraph, members: &[&BTreeSet<VertexId>]) -> bool {
    members.iter().enumerate().any(|(i, a)| {
        members[i + 1..].iter().any(|b| {
            let meet: BTreeSet<VertexId> = a.intersection(b).copied().collect();
            let inner = g.edges().filter(|(_, u, w)| meet.contains(u) && meet.contains(w)).count();
            !meet.is_empty() && inner >= meet.len()
        })
    })
}

/// A cross-free system on a random embedded host of any genus, or `None`
/// when the draw crosses or has an ambiguous pair.
pub fn random_host_system(seed: u64, with_k: bool) -> Option<GraphSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..16);
    let extra = rng.gen_range(0..20);
    let g = EmbeddedGraph::random_connected(&mut rng, n, extra, false).simplify();
    let mut h = BTreeMap::new();
    for i in 0..rng.gen_range(1..8) {
        let size = rng.gen_range(1..=n.min(8));
        h.insert(format!("H{i}"), grow(&mut rng, &g, size));
    }
    let mut sys = GraphSystem::new(g.clone(), h).ok()?;
    if with_k {
        let mut k = BTreeMap::new();
        for i in 0..rng.gen_range(1..5) {
            let size = rng.gen_range(1..=n.min(5));
            k.insert(format!("K{i}"), grow(&mut rng, &g, size));
        }
        sys = sys.with_k(k).ok()?;
    }
    let mut members: Vec<&BTreeSet<VertexId>> = sys.h().values().collect();
    if let Some(k) = sys.k() {
        members.extend(k.values());
    }
    if has_ambiguous_pair(&g, &members) || !sys.is_cross_free() {
        return None;
    }
    Some(sys)
}

/// Random abab-free cycle system with `n` vertices and up to `m` families,
/// drawn by rejection.
pub fn random_cycle_system(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CycleSystem {
    let cycle: Vec<VertexId> = (0..n as u32).map(VertexId).collect();
    loop {
        let mut families = BTreeMap::new();
        for i in 0..rng.gen_range(1..=m) {
            // a few random arcs make multi-run families likely
            let mut f = BTreeSet::new();
            for _ in 0..rng.gen_range(1..=3) {
                let start = rng.gen_range(0..n);
                let len = rng.gen_range(1..=n.div_ceil(2));
                f.extend((0..len).map(|o| cycle[(start + o) % n]));
            }
            families.insert(format!("F{i}"), f);
        }
        let cs = CycleSystem::new(cycle.clone(), families);
        if cs.is_abab_free() {
            return cs;
        }
    }
}

/// Vertices of `family` connected through cycle edges and chords inside it.
pub fn connected_with_chords(cycle: &[VertexId], chords: &[(VertexId, VertexId)], family: &BTreeSet<VertexId>) -> bool {
    let n = cycle.len();
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for i in 0..n {
        let (a, b) = (cycle[i], cycle[(i + 1) % n]);
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for &(a, b) in chords {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let Some(&start) = family.iter().next() else { return true };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in &adj[&x] {
            if family.contains(y) && seen.insert(*y) {
                queue.push_back(*y);
            }
        }
    }
    seen.len() == family.len()
}

/// Whether two chords strictly interleave, by brute force over the four
/// endpoint positions.
pub fn interleave(cycle: &[VertexId], (a, b): (VertexId, VertexId), (c, d): (VertexId, VertexId)) -> bool {
    let pos = |v| cycle.iter().position(|&x| x == v).unwrap();
    let (a, b, c, d) = (pos(a), pos(b), pos(c), pos(d));
    if [a, b].iter().any(|x| *x == c || *x == d) {
        return false;
    }
    let inside = |x: usize| (a.min(b) < x) && (x < a.max(b));
    inside(c) != inside(d)
}

/// The constructive chord sequence d0, d1, ... from run A to the other runs
/// of an inclusion-minimal disconnected family. Returns the final chord and
/// the number of moves, or `None` if every family is a single run.
pub fn chord_walk(cs: &CycleSystem) -> Option<((VertexId, VertexId), usize)> {
    let cycle = &cs.cycle;
    let n = cycle.len();
    let mut distinct: Vec<&BTreeSet<VertexId>> = Vec::new();
    for f in cs.families.values() {
        if !distinct.contains(&f) {
            distinct.push(f);
        }
    }
    let multi: Vec<&BTreeSet<VertexId>> = distinct.into_iter().filter(|f| runs(cycle, f).len() > 1).collect();
    let k0 = *multi.iter().find(|f| !multi.iter().any(|g| g.len() < f.len() && g.is_subset(f)))?;
    let k0_runs = runs(cycle, k0);
    // A in clockwise (forward) order; B counter-clockwise starting next to a0
    let a: Vec<VertexId> = k0_runs[0].clone();
    let pos = |v: VertexId| cycle.iter().position(|&x| x == v).unwrap();
    let a0 = pos(a[0]);
    let b: Vec<VertexId> = (1..n).map(|o| cycle[(a0 + n - o) % n]).filter(|v| k0.contains(v) && !a.contains(v)).collect();
    let blocked = |x: VertexId, y: VertexId| -> Vec<&BTreeSet<VertexId>> { multi.iter().copied().filter(|f| blocks(cycle, x, y, f)).collect() };
    let (mut l, mut j) = (0, 0);
    for moves in 0.. {
        let hit = blocked(a[l], b[j]);
        if hit.is_empty() {
            return Some(((a[l], b[j]), moves));
        }
        // scan both sides alternately, B first
        let mut step = 1;
        loop {
            if j + step < b.len() && hit.iter().any(|f| f.contains(&b[j + step])) {
                j += step;
                break;
            }
            if l + step < a.len() && hit.iter().any(|f| f.contains(&a[l + step])) {
                l += step;
                break;
            }
            step += 1;
            assert!(step <= n, "chord walk found no blocked vertex to move to");
        }
    }
    unreachable!()
}

/// A small solver instance of the given kind built from a random rectangle
/// system, with at most 14 variables.
pub fn random_instance(kind: crossfree::solver::ProblemKind, seed: u64) -> crossfree::solver::ProblemInstance {
    use crossfree::regions::{random_rectangle_intersection_system, random_rectangle_system, GridSpec};
    use crossfree::solver::{ProblemInstance, ProblemKind};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = GridSpec::plane(rng.gen_range(2..=3), rng.gen_range(2..=4));
    match kind {
        ProblemKind::SetCover => {
            let sys = random_rectangle_system(&grid, rng.gen_range(2..=8), seed).unwrap();
            ProblemInstance::new(extract_hypergraph(&sys, HypergraphMode::Dual).unwrap(), kind).unwrap()
        }
        ProblemKind::HittingSet | ProblemKind::DominatingSet | ProblemKind::IndependentSet => {
            let sys = random_rectangle_system(&grid, rng.gen_range(2..=12), seed).unwrap().with_red_names::<&str>(&[]).unwrap();
            ProblemInstance::new(extract_hypergraph(&sys, HypergraphMode::Primal).unwrap(), kind).unwrap()
        }
        ProblemKind::GeneralizedCover | ProblemKind::CapacitatedPacking => {
            let sys = random_rectangle_intersection_system(&grid, rng.gen_range(2..=12), rng.gen_range(1..=6), seed).unwrap();
            let hg = extract_hypergraph(&sys, HypergraphMode::Intersection).unwrap();
            if kind == ProblemKind::GeneralizedCover {
                return ProblemInstance::new(hg, kind).unwrap();
            }
            let caps = hg.edges.keys().map(|e| (e.clone(), rng.gen_range(1..=3))).collect();
            ProblemInstance::capacitated(hg, caps, 3).unwrap()
        }
    }
}
