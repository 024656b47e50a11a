//! One line per acceptance criterion. Every criterion runs to completion and
//! reports; the test fails at the end if any criterion failed.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use common::{connected_with_chords, interleave, random_cycle_system, random_instance, support_problem};
use crossfree::bypass::{depth_after_bypass, vertex_bypass};
use crossfree::chords::{blocks, chord_set, find_non_blocking_chord};
use crossfree::fixtures::{
    all_pairs_hypergraph, example_intersection_system, example_primal_system, example_system, torus_rows_and_columns, IntersectionVariant,
};
use crossfree::regions::{
    build_system, random_coloring, random_rectangle_intersection_system, random_rectangle_system, random_torus_system, Cell, GridSpec, Region,
};
use crossfree::solver::{brute_force_optimum, check_local_optimality, local_search, support_coloring, LocalSearchConfig, ProblemKind};
use crossfree::supports::{dual_support, intersection_support, primal_support, PipelineOptions, SupportResult};
use crossfree::system::induced_components;
use crossfree::verify::{brute_force_support_exists, check_no_monochromatic, extract_hypergraph, HypergraphMode, SupportGraph};
use crossfree::{Execution, GraphSystem, Scope, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PLANE_SYSTEMS: u64 = 500;
const TORUS_SYSTEMS: u64 = 100;
const MAX_GRID_SIDE: usize = 8;
const MAX_REGIONS: usize = 10;
const NON_PIERCING_CASES: usize = 500;
const CHORD_CASES: usize = 2000;
const CHORD_MAX_N: usize = 10;
const CHORD_MAX_FAMILIES: usize = 4;
const BYPASS_CASES: usize = 200;
const COLORING_CASES: u64 = 200;
const PLANE_COLOR_BOUND: usize = 6;
const TORUS_COLOR_BOUND: usize = 7;
const SOLVER_INSTANCES: u64 = 100;
const SOLVER_MAX_VARIABLES: usize = 14;
const ORACLE_MAX_GROUND: usize = 8;

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, failures: &[String], detail: String, started: Instant) {
        let status = if failures.is_empty() { "PASS" } else { "FAIL" };
        println!("[{status}] {id}. {name}: {detail} ({:.1}s)", started.elapsed().as_secs_f64());
        for f in failures.iter().take(5) {
            println!("       {f}");
        }
        if !failures.is_empty() {
            self.failed.push(format!("{id}. {name}"));
        }
    }
}

fn plane_grid(seed: u64) -> GridSpec {
    let side = MAX_GRID_SIDE - 1;
    GridSpec::plane(2 + seed as usize % side, 2 + (seed as usize / side) % side)
}

fn check(sys: &GraphSystem, r: &SupportResult, mode: HypergraphMode, what: String, failures: &mut Vec<String>) {
    if let Some(p) = support_problem(sys, r, mode) {
        failures.push(format!("{what}: {p}"));
    }
}

/// Special edges of the input, checked directly against the support: some
/// member on one side must be adjacent to some member on the other.
fn special_edge_problem(sys: &GraphSystem, r: &SupportResult) -> Option<String> {
    let support = SupportGraph::from_result(r);
    let at = |v: VertexId| -> BTreeSet<&String> { sys.h().iter().filter(|(_, s)| s.contains(&v)).map(|(n, _)| n).collect() };
    for (e, u, w) in sys.host().edges() {
        let (hu, hw) = (at(u), at(w));
        if hu.is_empty() || hw.is_empty() || !hu.is_disjoint(&hw) {
            continue;
        }
        if !hu.iter().any(|a| hw.iter().any(|b| support.has_edge(a, b))) {
            return Some(format!("special edge {e} between {hu:?} and {hw:?} not joined"));
        }
    }
    None
}

fn special_edge_count(sys: &GraphSystem) -> usize {
    let at = |v: VertexId| -> BTreeSet<&String> { sys.h().iter().filter(|(_, s)| s.contains(&v)).map(|(n, _)| n).collect() };
    sys.host()
        .edges()
        .filter(|(_, u, w)| {
            let (hu, hw) = (at(*u), at(*w));
            !hu.is_empty() && !hw.is_empty() && hu.is_disjoint(&hw)
        })
        .count()
}

struct DualRun {
    sys: GraphSystem,
    result: SupportResult,
    certificate: crossfree::supports::SpecialEdgeCertificate,
}

fn criterion_1(report: &mut Report, duals: &mut Vec<DualRun>) {
    let started = Instant::now();
    let opts = common::audited();
    let mut failures = Vec::new();
    let mut runs = 0;
    for seed in 0..PLANE_SYSTEMS {
        let grid = plane_grid(seed);
        let sys = random_rectangle_system(&grid, MAX_REGIONS, seed).unwrap();
        match dual_support(&sys, opts) {
            Ok((r, cert)) => {
                check(&sys, &r, HypergraphMode::Dual, format!("plane dual {seed}"), &mut failures);
                duals.push(DualRun { sys: sys.clone(), result: r, certificate: cert });
            }
            Err(e) => failures.push(format!("plane dual {seed}: {e}")),
        }
        let colored = random_coloring(sys, 0.5, seed).unwrap();
        match primal_support(&colored, opts) {
            Ok(r) => check(&colored, &r, HypergraphMode::Primal, format!("plane primal {seed}"), &mut failures),
            Err(e) => failures.push(format!("plane primal {seed}: {e}")),
        }
        let isys = random_rectangle_intersection_system(&grid, 6, 4, seed).unwrap();
        match intersection_support(&isys, opts) {
            Ok(r) => check(&isys, &r, HypergraphMode::Intersection, format!("plane intersection {seed}"), &mut failures),
            Err(e) => failures.push(format!("plane intersection {seed}: {e}")),
        }
        runs += 3;
    }
    for seed in 0..TORUS_SYSTEMS {
        let grid = GridSpec::torus(3 + seed as usize % 4, 3 + (seed as usize / 4) % 4);
        let sys = random_torus_system(&grid, 6, 4, seed).unwrap();
        match dual_support(&sys, opts) {
            Ok((r, cert)) => {
                check(&sys, &r, HypergraphMode::Dual, format!("torus dual {seed}"), &mut failures);
                duals.push(DualRun { sys: sys.clone(), result: r, certificate: cert });
            }
            Err(e) => failures.push(format!("torus dual {seed}: {e}")),
        }
        match intersection_support(&sys, opts) {
            Ok(r) => check(&sys, &r, HypergraphMode::Intersection, format!("torus intersection {seed}"), &mut failures),
            Err(e) => failures.push(format!("torus intersection {seed}: {e}")),
        }
        let colored = random_coloring(sys, 0.5, seed).unwrap();
        match primal_support(&colored, opts) {
            Ok(r) => check(&colored, &r, HypergraphMode::Primal, format!("torus primal {seed}"), &mut failures),
            Err(e) => failures.push(format!("torus primal {seed}: {e}")),
        }
        runs += 3;
    }
    let detail = format!("{runs} pipeline runs on {PLANE_SYSTEMS} plane and {TORUS_SYSTEMS} torus systems, {} failures", failures.len());
    report.line(1, "support correctness sweep", &failures, detail, started);
}

fn criterion_2(report: &mut Report) {
    let started = Instant::now();
    let opts = PipelineOptions { audit: true, ..Default::default() };
    let mut failures = Vec::new();
    let primal = example_primal_system();
    match primal_support(&primal, opts) {
        Ok(r) if r.certified_genus == 0 => check(&primal, &r, HypergraphMode::Primal, "example primal".into(), &mut failures),
        Ok(r) => failures.push(format!("example primal: genus {}", r.certified_genus)),
        Err(e) => failures.push(format!("example primal: {e}")),
    }
    let dual = example_system();
    match dual_support(&dual, opts) {
        Ok((r, _)) if r.certified_genus == 0 => check(&dual, &r, HypergraphMode::Dual, "example dual".into(), &mut failures),
        Ok((r, _)) => failures.push(format!("example dual: genus {}", r.certified_genus)),
        Err(e) => failures.push(format!("example dual: {e}")),
    }
    for v in [IntersectionVariant::Standard, IntersectionVariant::Narrow] {
        let sys = example_intersection_system(v);
        match intersection_support(&sys, opts) {
            Ok(r) if r.certified_genus == 0 => check(&sys, &r, HypergraphMode::Intersection, format!("example intersection {v:?}"), &mut failures),
            Ok(r) => failures.push(format!("example intersection {v:?}: genus {}", r.certified_genus)),
            Err(e) => failures.push(format!("example intersection {v:?}: {e}")),
        }
    }
    let rs = torus_rows_and_columns().unwrap();
    let non_piercing = rs.system.is_non_piercing();
    let witness_darts = rs.crossing.as_ref().map(|w| w.darts.len());
    if !non_piercing {
        failures.push("rows and columns: reported piercing".into());
    }
    if witness_darts != Some(4) {
        failures.push(format!("rows and columns: expected a 4-dart crossing witness, got {witness_darts:?}"));
    }
    let detail = format!("4 example supports at genus 0; rows/columns non-piercing={non_piercing}, cross-free={}", rs.is_cross_free());
    report.line(2, "example fixtures", &failures, detail, started);
}

/// Up to `count` random connected cell sets, with no piercing filter.
fn unfiltered_blobs(grid: &GridSpec, count: usize, max_cells: usize, rng: &mut ChaCha8Rng) -> Vec<Region> {
    let mut out = Vec::new();
    for i in 0..count {
        let size = rng.gen_range(1..=max_cells);
        let start = (rng.gen_range(0..grid.rows), rng.gen_range(0..grid.cols));
        let mut cells: BTreeSet<Cell> = BTreeSet::from([start]);
        while cells.len() < size {
            let frontier: Vec<Cell> = cells.iter().flat_map(|&x| grid.neighbors(x)).filter(|x| !cells.contains(x)).collect();
            let Some(&next) = frontier.choose(rng) else { break };
            cells.insert(next);
        }
        if out.iter().all(|r: &Region| r.cells != cells) {
            out.push(Region::new(format!("B{i}"), cells));
        }
    }
    out
}

fn criterion_3(report: &mut Report) {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut non_piercing, mut piercing, mut piercing_crossing) = (0, 0, 0);
    let mut draws = 0;
    while non_piercing < NON_PIERCING_CASES && draws < 50 * NON_PIERCING_CASES {
        draws += 1;
        let grid = GridSpec::plane(rng.gen_range(3..=7), rng.gen_range(3..=7));
        let count = rng.gen_range(2..=5);
        let regions = unfiltered_blobs(&grid, count, 8, &mut rng);
        let rs = build_system(&grid, &regions, None).unwrap();
        if rs.system.is_non_piercing() {
            non_piercing += 1;
            if let Some(w) = &rs.crossing {
                failures.push(format!("draw {draws}: non-piercing but crossing: {w}"));
            }
        } else {
            piercing += 1;
            piercing_crossing += usize::from(!rs.is_cross_free());
        }
    }
    if non_piercing < NON_PIERCING_CASES {
        failures.push(format!("only {non_piercing} non-piercing draws"));
    }
    let detail = format!(
        "{non_piercing} non-piercing systems, {} counterexamples; {piercing} piercing draws, {piercing_crossing} of them crossing",
        failures.len()
    );
    report.line(3, "non-piercing implies cross-free", &failures, detail, started);
}

fn criterion_4(report: &mut Report) {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut chords_total = 0;
    for case in 0..CHORD_CASES {
        let n = rng.gen_range(3..=CHORD_MAX_N);
        let cs = random_cycle_system(&mut rng, n, CHORD_MAX_FAMILIES);
        match find_non_blocking_chord(&cs) {
            Ok(Some(c)) => {
                if let Some((name, _)) = cs.families.iter().find(|(_, f)| blocks(&cs.cycle, c.a, c.b, f)) {
                    failures.push(format!("case {case}: chord {}-{} blocks {name}", c.a, c.b));
                }
            }
            Ok(None) => {}
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
        let d = match chord_set(&cs) {
            Ok(d) => d.pairs(),
            Err(e) => {
                failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        chords_total += d.len();
        if d.len() > n.saturating_sub(3) {
            failures.push(format!("case {case}: {} chords on a {n}-cycle", d.len()));
        }
        for (i, p) in d.iter().enumerate() {
            if d[i + 1..].iter().any(|q| interleave(&cs.cycle, *p, *q)) {
                failures.push(format!("case {case}: crossing chords"));
            }
        }
        if let Some((name, _)) = cs.families.iter().find(|(_, f)| !connected_with_chords(&cs.cycle, &d, f)) {
            failures.push(format!("case {case}: {name} disconnected"));
        }
    }
    let detail = format!("{CHORD_CASES} abab-free cycle systems (n <= {CHORD_MAX_N}, <= {CHORD_MAX_FAMILIES} families), {chords_total} chords");
    report.line(4, "chord engine", &failures, detail, started);
}

fn criterion_5(report: &mut Report) {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut done = 0;
    let mut seed = 0u64;
    while done < BYPASS_CASES && seed < 20 * BYPASS_CASES as u64 {
        seed += 1;
        let sys = if seed.is_multiple_of(3) {
            random_torus_system(&GridSpec::torus(4, 4), 5, 0, seed).unwrap()
        } else {
            random_rectangle_system(&plane_grid(seed), 6, seed).unwrap()
        };
        let maximal = sys.maximal_vertices(Scope::H, None);
        let Some(&v) = maximal.get(seed as usize % maximal.len().max(1)) else { continue };
        done += 1;
        let before = sys.depth_profile(Scope::H);
        let (out, rec) = match vertex_bypass(&sys, v, Scope::H) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        if let Err(e) = depth_after_bypass(&rec, &before, &out, Scope::H) {
            failures.push(format!("seed {seed}: {e}"));
        }
        for (name, set) in out.h() {
            let expected = usize::from(sys.h()[name] != BTreeSet::from([v]));
            if induced_components(out.host(), set).len() != expected {
                failures.push(format!("seed {seed}: {name} disconnected after bypass"));
            }
        }
        if out.first_crossing(Execution::Parallel).is_some() {
            failures.push(format!("seed {seed}: crossing after bypass"));
        }
        if out.host().genus().unwrap() != sys.host().genus().unwrap() {
            failures.push(format!("seed {seed}: genus changed"));
        }
    }
    if done < BYPASS_CASES {
        failures.push(format!("only {done} bypasses"));
    }
    report.line(5, "bypass invariants", &failures, format!("{done} bypasses of maximal vertices"), started);
}

fn criterion_6(report: &mut Report, duals: &[DualRun]) {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut special = 0;
    for (i, run) in duals.iter().enumerate() {
        if let Err(e) = run.certificate.validate(&run.result) {
            failures.push(format!("run {i}: certificate: {e}"));
        }
        if let Some(p) = special_edge_problem(&run.sys, &run.result) {
            failures.push(format!("run {i}: {p}"));
        }
        special += special_edge_count(&run.sys);
    }
    let detail = format!("{} dual runs, {special} special edges checked", duals.len());
    report.line(6, "dual special-edge property", &failures, detail, started);
}

fn coloring_check(sys: &GraphSystem, r: &SupportResult, mode: HypergraphMode, bound: usize, what: String, failures: &mut Vec<String>) -> usize {
    let hg = extract_hypergraph(sys, mode).unwrap();
    let c = support_coloring(&SupportGraph::from_result(r), &hg);
    if check_no_monochromatic(&hg, &c.colors).unwrap().is_err() {
        failures.push(format!("{what}: monochromatic hyperedge"));
    }
    if c.color_count > bound {
        failures.push(format!("{what}: {} colors", c.color_count));
    }
    c.color_count
}

fn criterion_7(report: &mut Report) {
    let started = Instant::now();
    let opts = PipelineOptions::default();
    let mut failures = Vec::new();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for seed in 0..COLORING_CASES {
        let sys = random_rectangle_system(&plane_grid(seed), MAX_REGIONS, seed).unwrap();
        let (r, _) = dual_support(&sys, opts).unwrap();
        let c = coloring_check(&sys, &r, HypergraphMode::Dual, PLANE_COLOR_BOUND, format!("plane dual {seed}"), &mut failures);
        *hist.entry(c).or_default() += 1;
        let isys = random_rectangle_intersection_system(&plane_grid(seed), 8, 5, seed).unwrap();
        let r = intersection_support(&isys, opts).unwrap();
        let c = coloring_check(&isys, &r, HypergraphMode::Intersection, PLANE_COLOR_BOUND, format!("plane intersection {seed}"), &mut failures);
        *hist.entry(c).or_default() += 1;
    }
    let mut torus_max = 0;
    for seed in 0..COLORING_CASES / 4 {
        let sys = random_torus_system(&GridSpec::torus(4, 5), 8, 0, seed).unwrap();
        let (r, _) = dual_support(&sys, opts).unwrap();
        let c = coloring_check(&sys, &r, HypergraphMode::Dual, TORUS_COLOR_BOUND, format!("torus dual {seed}"), &mut failures);
        torus_max = torus_max.max(c);
    }
    let detail = format!(
        "{} plane colorings (colors used: {hist:?}, bound {PLANE_COLOR_BOUND}); {} torus colorings (max {torus_max}, bound {TORUS_COLOR_BOUND})",
        2 * COLORING_CASES,
        COLORING_CASES / 4
    );
    report.line(7, "support coloring", &failures, detail, started);
}

fn criterion_8(report: &mut Report) {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut ratios: BTreeMap<(ProblemKind, usize), (f64, f64, usize)> = BTreeMap::new();
    let mut instances = 0;
    for seed in 0..SOLVER_INSTANCES {
        let kind = ProblemKind::ALL[seed as usize % ProblemKind::ALL.len()];
        let inst = random_instance(kind, seed);
        if inst.variables().len() > SOLVER_MAX_VARIABLES {
            failures.push(format!("seed {seed}: {} variables", inst.variables().len()));
            continue;
        }
        instances += 1;
        let opt = brute_force_optimum(&inst, SOLVER_MAX_VARIABLES).unwrap().value;
        for k in 1..=3 {
            let s = match local_search(&inst, &LocalSearchConfig { k, seed, ..Default::default() }) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("{kind:?} seed {seed} k {k}: {e}"));
                    continue;
                }
            };
            if let Err(why) = check_local_optimality(&inst, &s.chosen, k).unwrap() {
                failures.push(format!("{kind:?} seed {seed} k {k}: {why}"));
            }
            let ratio = match (s.value, opt) {
                (0, 0) => 1.0,
                (v, o) if kind.is_maximization() => o as f64 / v.max(1) as f64,
                (v, o) => v as f64 / o.max(1) as f64,
            };
            let e = ratios.entry((kind, k)).or_insert((0.0, 0.0, 0));
            e.0 += ratio;
            e.1 = e.1.max(ratio);
            e.2 += 1;
        }
    }
    println!("       ratios (optimal/achieved for packing, achieved/optimal for covering): mean / worst");
    for ((kind, k), (sum, worst, n)) in &ratios {
        println!("       {kind:?} k={k}: {:.3} / {:.3} over {n}", sum / *n as f64, worst);
    }
    let detail = format!("{instances} instances x k in 1..=3, certificates checked by exhaustive enumeration");
    report.line(8, "local-search solver", &failures, detail, started);
}

fn criterion_9(report: &mut Report, duals: &[DualRun]) {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut fixtures = vec![
        ("example primal", extract_hypergraph(&example_primal_system(), HypergraphMode::Primal).unwrap(), 0),
        ("example dual", extract_hypergraph(&example_system(), HypergraphMode::Dual).unwrap(), 0),
    ];
    for v in [IntersectionVariant::Standard, IntersectionVariant::Narrow] {
        fixtures.push(("example intersection", extract_hypergraph(&example_intersection_system(v), HypergraphMode::Intersection).unwrap(), 0));
    }
    for (name, hg, genus) in &fixtures {
        checked += 1;
        if !brute_force_support_exists(hg, *genus).unwrap() {
            failures.push(format!("{name}: oracle finds no support at genus {genus}"));
        }
    }
    // constructive supports exist for every pipeline run; the oracle must agree
    for (i, run) in duals.iter().enumerate() {
        let hg = extract_hypergraph(&run.sys, HypergraphMode::Dual).unwrap();
        if hg.ground.len() > ORACLE_MAX_GROUND.min(6) || checked >= 60 {
            continue;
        }
        checked += 1;
        let genus = run.result.certified_genus;
        if !brute_force_support_exists(&hg, genus).unwrap() {
            failures.push(format!("dual run {i}: oracle finds no support at genus {genus}"));
        }
    }
    let k5 = all_pairs_hypergraph(5);
    let (at0, at1) = (brute_force_support_exists(&k5, 0).unwrap(), brute_force_support_exists(&k5, 1).unwrap());
    if at0 || !at1 {
        failures.push(format!("all pairs on 5 elements: genus 0 {at0}, genus 1 {at1}"));
    }
    let detail = format!("{checked} constructive supports confirmed; all pairs on 5 elements: genus 0 {at0}, genus 1 {at1}");
    report.line(9, "oracle cross-check", &failures, detail, started);
}

#[test]
fn acceptance() {
    let mut report = Report { failed: Vec::new() };
    let mut duals = Vec::new();
    criterion_1(&mut report, &mut duals);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report, &duals);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report, &duals);
    assert!(report.failed.is_empty(), "failed criteria: {:?}", report.failed);
}
