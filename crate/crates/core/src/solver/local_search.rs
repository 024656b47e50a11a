use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Model, ProblemInstance, ProblemKind, SolverError};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::verify::Verdict;

/// Largest variable count `check_local_optimality` enumerates.
pub const LOCAL_OPTIMALITY_CHECK_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalSearchConfig {
    /// Swap radius.
    pub k: usize,
    /// Improving moves allowed before giving up.
    pub max_iterations: usize,
    /// Orders the greedy pass that builds the starting solution.
    pub seed: u64,
    pub exec: Execution,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig { k: 2, max_iterations: 100_000, seed: 0, exec: Execution::Parallel }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppliedMove {
    pub removed: Vec<String>,
    pub added: Vec<String>,
}

/// One class of the final scan: every exchange removing `removed` and
/// adding `added` variables, `checked` of them in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanClass {
    pub removed: usize,
    pub added: usize,
    pub checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSearchCertificate {
    pub k: usize,
    /// Capacitated packing only: elements fixed up front because no
    /// capacity can bind them.
    pub fixed: Vec<String>,
    pub initial: Vec<String>,
    pub moves: Vec<AppliedMove>,
    /// Exhaustive scan of the k-neighborhood of the returned solution, none
    /// of which improved it.
    pub final_scan: Vec<ScanClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub kind: ProblemKind,
    pub chosen: BTreeSet<String>,
    pub value: usize,
    pub certificate: LocalSearchCertificate,
}

/// First-improvement local search with swap radius `k`.
///
/// Minimization removes up to k variables and adds fewer; maximization adds
/// up to k and removes fewer. Exchange classes are scanned by size, and
/// within a class in lexicographic order of variable index.
pub fn local_search(inst: &ProblemInstance, cfg: &LocalSearchConfig) -> Result<Solution> {
    if cfg.k == 0 {
        return Err(SolverError::ZeroRadius.into());
    }
    let model = Model::build(inst);
    model.check_feasible_instance()?;

    let mut moves = Vec::new();
    let mut fixed = BTreeSet::new();
    let mut initial: Vec<String>;
    let chosen = if inst.kind == ProblemKind::CapacitatedPacking {
        // fix the elements no capacity can bind and search the residual instance
        let caps = inst.capacities.as_ref().expect("set by constructor");
        fixed = inst
            .hg
            .ground
            .iter()
            .filter(|x| inst.hg.edges.iter().all(|(n, e)| !e.contains(*x) || e.len() <= caps[n]))
            .cloned()
            .collect();
        let residual = inst.residual(&fixed)?;
        let rmodel = Model::build(&residual);
        let start = greedy_start(&rmodel, cfg.seed);
        initial = names_of(&rmodel, &start);
        initial.extend(fixed.iter().cloned());
        initial.sort();
        let (found, _) = improve(&rmodel, start, cfg, &mut moves)?;
        let mut picked: BTreeSet<String> = names_of(&rmodel, &found).into_iter().collect();
        picked.extend(fixed.iter().cloned());
        model.names.iter().map(|n| picked.contains(n)).collect()
    } else {
        let start = greedy_start(&model, cfg.seed);
        initial = names_of(&model, &start);
        start
    };
    let (done, final_scan) = improve(&model, chosen, cfg, &mut moves)?;
    let chosen: BTreeSet<String> = names_of(&model, &done).into_iter().collect();
    Ok(Solution {
        kind: inst.kind,
        value: chosen.len(),
        chosen,
        certificate: LocalSearchCertificate { k: cfg.k, fixed: fixed.into_iter().collect(), initial, moves, final_scan },
    })
}

fn names_of(model: &Model, chosen: &[bool]) -> Vec<String> {
    (0..chosen.len()).filter(|&i| chosen[i]).map(|i| model.names[i].clone()).collect()
}

/// A minimal (covering) or maximal (packing) solution, built greedily in a
/// seeded order.
fn greedy_start(model: &Model, seed: u64) -> Vec<bool> {
    let n = model.names.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut chosen = vec![!model.maximize; n];
    for i in order {
        chosen[i] = !chosen[i];
        if !model.feasible(&chosen) {
            chosen[i] = !chosen[i];
        }
    }
    chosen
}

fn improve(model: &Model, mut chosen: Vec<bool>, cfg: &LocalSearchConfig, moves: &mut Vec<AppliedMove>) -> Result<(Vec<bool>, Vec<ScanClass>)> {
    loop {
        match scan(model, &chosen, cfg.k, cfg.exec) {
            Ok(classes) => return Ok((chosen, classes)),
            Err((out, inn)) => {
                if moves.len() >= cfg.max_iterations {
                    return Err(Error::BudgetExhausted { budget: cfg.max_iterations, stage: "local search" });
                }
                for &i in &out {
                    chosen[i] = false;
                }
                for &i in &inn {
                    chosen[i] = true;
                }
                moves.push(AppliedMove {
                    removed: out.iter().map(|&i| model.names[i].clone()).collect(),
                    added: inn.iter().map(|&i| model.names[i].clone()).collect(),
                });
            }
        }
    }
}

type Move = (Vec<usize>, Vec<usize>);

/// Scans the k-neighborhood. `Err` carries the first improving move,
/// `Ok` the per-class counts of an exhausted scan.
fn scan(model: &Model, chosen: &[bool], k: usize, exec: Execution) -> std::result::Result<Vec<ScanClass>, Move> {
    let inside: Vec<usize> = (0..chosen.len()).filter(|&i| chosen[i]).collect();
    let outside: Vec<usize> = (0..chosen.len()).filter(|&i| !chosen[i]).collect();
    let mut classes = Vec::new();
    for big in 1..=k {
        for small in 0..big {
            let (removed, added) = if model.maximize { (small, big) } else { (big, small) };
            // the larger side drives the parallel fan-out
            let (lead_pool, lead_size, tail_pool, tail_size) =
                if model.maximize { (&outside, added, &inside, removed) } else { (&inside, removed, &outside, added) };
            let leads: Vec<Vec<usize>> = lead_pool.iter().copied().combinations(lead_size).collect();
            let checked = AtomicUsize::new(0);
            let found = par::find_first(exec, &leads, |lead| {
                let mut cand = chosen.to_vec();
                for tail in tail_pool.iter().copied().combinations(tail_size) {
                    checked.fetch_add(1, Ordering::Relaxed);
                    for &i in lead {
                        cand[i] = !cand[i];
                    }
                    for &i in &tail {
                        cand[i] = !cand[i];
                    }
                    let ok = model.feasible(&cand);
                    cand.copy_from_slice(chosen);
                    if ok {
                        return Some(if model.maximize { (tail, lead.clone()) } else { (lead.clone(), tail) });
                    }
                }
                None
            });
            if let Some(m) = found {
                return Err(m);
            }
            classes.push(ScanClass { removed, added, checked: checked.into_inner() });
        }
    }
    Ok(classes)
}

/// Independent check that `chosen` is feasible and that no exchange within
/// radius `k` improves it, by enumerating all selections as bit masks and
/// testing candidates against the problem definition.
pub fn check_local_optimality(inst: &ProblemInstance, chosen: &BTreeSet<String>, k: usize) -> Result<Verdict> {
    if let Err(why) = inst.is_feasible(chosen)? {
        return Ok(Err(format!("infeasible: {why}")));
    }
    let vars = inst.variables();
    let n = vars.len();
    if n > LOCAL_OPTIMALITY_CHECK_LIMIT {
        return Err(Error::SizeGuard { what: "local-optimality check variable count", got: n, limit: LOCAL_OPTIMALITY_CHECK_LIMIT });
    }
    let current: u64 = (0..n).filter(|&i| chosen.contains(&vars[i])).fold(0, |m, i| m | 1 << i);
    let maximize = inst.kind.is_maximization();
    for mask in 0u64..(1 << n) {
        let out = (current & !mask).count_ones() as usize;
        let inn = (mask & !current).count_ones() as usize;
        let neighbor = if maximize { inn <= k && out < inn } else { out <= k && inn < out };
        if !neighbor {
            continue;
        }
        let cand: BTreeSet<String> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| vars[i].clone()).collect();
        if inst.is_feasible(&cand)?.is_ok() {
            return Ok(Err(format!("improving exchange to {cand:?}")));
        }
    }
    Ok(Ok(()))
}
