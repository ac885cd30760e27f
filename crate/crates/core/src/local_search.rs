//! Coordinate-descent local search and its multi-restart wrapper (MRLS).

use crate::model::{Assignment, CopInstance};
use crate::rng::{derive_seed, SplitMix64};
use crate::timing::timed;

#[derive(Debug, Clone, PartialEq)]
pub struct LsReport {
    pub solution: Assignment,
    pub cost: f64,
    /// Full sweeps performed, including the final one that changed nothing.
    pub sweeps: usize,
    pub wall_seconds: f64,
    pub restarts_used: usize,
    /// Total cost of the start point followed by the cost after every sweep
    /// that changed at least one variable. Single runs only.
    pub sweep_costs: Vec<f64>,
    /// Final cost of each restart, in restart order. MRLS only.
    pub restart_costs: Option<Vec<f64>>,
}

/// Best value for `var` with everything else fixed. Keeps the current value
/// whenever it is among the minimizers, else takes the smallest minimizer.
fn best_value(inst: &CopInstance, var: usize, values: &[usize]) -> usize {
    let current = values[var];
    let current_cost = inst.local_cost_at(var, current, values);
    let mut best = current;
    let mut best_cost = current_cost;
    for x in 0..inst.domain_size(var) {
        let c = inst.local_cost_at(var, x, values);
        if c < best_cost {
            best = x;
            best_cost = c;
        }
    }
    best
}

fn descend(inst: &CopInstance, mut values: Vec<usize>) -> (Vec<usize>, usize, Vec<f64>) {
    let mut sweep_costs = vec![inst.total_cost_unchecked(&values)];
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut changed = false;
        for var in 0..inst.num_vars() {
            let x = best_value(inst, var, &values);
            if x != values[var] {
                values[var] = x;
                changed = true;
            }
        }
        if !changed {
            return (values, sweeps, sweep_costs);
        }
        sweep_costs.push(inst.total_cost_unchecked(&values));
    }
}

/// Uniformly random start (one draw per variable, ascending), then sweeps of
/// single-variable improvements until a sweep changes nothing.
pub fn local_search_run(inst: &CopInstance, seed: u64) -> LsReport {
    let ((values, sweeps, sweep_costs), wall_seconds) = timed(|| {
        let mut rng = SplitMix64::new(seed);
        let start = inst.domain_sizes().iter().map(|&d| rng.below(d)).collect();
        descend(inst, start)
    });
    let cost = *sweep_costs.last().unwrap();
    LsReport {
        solution: Assignment::new(values),
        cost,
        sweeps,
        wall_seconds,
        restarts_used: 1,
        sweep_costs,
        restart_costs: None,
    }
}

/// Local search from a given start point.
pub fn local_search_from(inst: &CopInstance, start: &Assignment) -> LsReport {
    let ((values, sweeps, sweep_costs), wall_seconds) = timed(|| descend(inst, start.values.clone()));
    LsReport {
        cost: *sweep_costs.last().unwrap(),
        solution: Assignment::new(values),
        sweeps,
        wall_seconds,
        restarts_used: 1,
        sweep_costs,
        restart_costs: None,
    }
}

/// True iff no single-variable change strictly lowers the total cost.
pub fn check_local_optimum(inst: &CopInstance, a: &Assignment) -> bool {
    let base = inst.total_cost_unchecked(&a.values);
    let mut probe = a.values.clone();
    for var in 0..inst.num_vars() {
        let keep = probe[var];
        for x in 0..inst.domain_size(var) {
            if x == keep {
                continue;
            }
            probe[var] = x;
            if inst.total_cost_unchecked(&probe) < base {
                return false;
            }
        }
        probe[var] = keep;
    }
    true
}

/// Best of `restarts` independent local searches. Restart `r` uses
/// `derive_seed(seed, r)`; ties go to the lowest restart index.
///
/// # Panics
///
/// If `restarts` is zero.
pub fn mrls_run(inst: &CopInstance, restarts: usize, seed: u64) -> LsReport {
    assert!(restarts >= 1, "mrls needs at least one restart");
    let (best, wall_seconds) = timed(|| {
        let mut best: Option<LsReport> = None;
        let mut costs = Vec::with_capacity(restarts);
        let mut sweeps = 0;
        for r in 0..restarts {
            let run = local_search_run(inst, derive_seed(seed, r as u64));
            costs.push(run.cost);
            sweeps += run.sweeps;
            if best.as_ref().map_or(true, |b| run.cost < b.cost) {
                best = Some(run);
            }
        }
        let mut best = best.unwrap();
        best.sweeps = sweeps;
        best.restart_costs = Some(costs);
        best
    });
    LsReport {
        wall_seconds,
        restarts_used: restarts,
        sweep_costs: Vec::new(),
        ..best
    }
}
