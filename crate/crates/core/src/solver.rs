//! Cooperative soft-decision optimization.
//!
//! Every variable is an agent holding a non-negative state table `Ψ_i` over
//! its values. One sweep recomputes each table from the peers' assignment
//! probabilities `p_j = Ψ_j^α / Σ Ψ_j^α`:
//!
//! ```text
//! Ψ_i(x_i) = Σ_{x_-i} exp(-E_i(x) / ħ) Π_{j≠i} p_j(x_j)
//! ```
//!
//! where `E_i` is the agent's local objective (its unary cost plus incident
//! binary costs). Because `E_i` only touches neighbours, the sum factorizes
//! into one message per incident edge and non-neighbours marginalize to one.
//! Each table is renormalized to unit L2 norm right after its update and the
//! returned solution is the per-agent argmax.
//!
//! The module also carries the continuous-time counterpart restricted to real,
//! diagonal local-energy operators: an explicit Euler integrator of
//! `ħ dψ_i/dt = -ψ_i · h_i` with renormalization, its frozen-field closed form
//! and a stationarity (eigenvector) residual.

use crate::error::{Error, Result};
use crate::model::{Assignment, CopInstance};
use crate::rng::SplitMix64;
use crate::timing::timed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Agents later in a sweep see the tables already updated in that sweep.
    #[default]
    GaussSeidel,
    /// Every agent in a sweep reads the previous sweep's state.
    Jacobi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub hbar: f64,
    pub alpha: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub schedule: Schedule,
    pub track_best: bool,
    /// Stop once the fixed-point residual drops below this value. Off by
    /// default: the full iteration budget always runs.
    pub early_stop: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            alpha: 2.0,
            max_iterations: 20,
            seed: 0,
            schedule: Schedule::GaussSeidel,
            track_best: false,
            early_stop: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Contract(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Contract(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Contract("max_iterations must be at least 1".into()));
        }
        if let Some(tol) = self.early_stop {
            if !(tol >= 0.0) {
                return Err(Error::Contract(format!("invalid early-stop tolerance {tol}")));
            }
        }
        Ok(())
    }
}

/// Per-agent state tables `Ψ_i` and the derived probabilities `p_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub psi: Vec<Vec<f64>>,
    pub prob: Vec<Vec<f64>>,
    pub iteration: usize,
}

impl AgentState {
    /// Wraps already-normalized state tables, deriving the probabilities.
    pub fn from_psi(psi: Vec<Vec<f64>>, alpha: f64) -> Result<Self> {
        let prob = psi
            .iter()
            .map(|t| to_probability(t, alpha))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { psi, prob, iteration: 0 })
    }

    /// Uniform `Ψ_i = 1/√d_i` for every agent.
    pub fn uniform(inst: &CopInstance, alpha: f64) -> Self {
        let psi = inst
            .domain_sizes()
            .iter()
            .map(|&d| vec![1.0 / (d as f64).sqrt(); d])
            .collect();
        Self::from_psi(psi, alpha).expect("uniform tables are non-zero")
    }

    /// Argmax of each `Ψ_i`, ties to the smallest value index.
    pub fn argmax(&self) -> Assignment {
        Assignment::new(self.psi.iter().map(|t| argmax(t)).collect())
    }

    /// Largest `|Σ_x Ψ_i(x)² − 1|` over all agents.
    pub fn normalization_error(&self) -> f64 {
        self.psi
            .iter()
            .map(|t| (t.iter().map(|v| v * v).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn set_agent(&mut self, var: usize, psi: Vec<f64>, alpha: f64) -> Result<()> {
        self.prob[var] = to_probability(&psi, alpha)?;
        self.psi[var] = psi;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub solution: Assignment,
    pub cost: f64,
    /// Cost of the argmax assignment after each sweep.
    pub cost_trajectory: Vec<f64>,
    /// Fixed-point residual of each sweep against the state before it.
    pub residual_trajectory: Vec<f64>,
    pub best_solution: Option<Assignment>,
    pub best_cost: Option<f64>,
    pub iterations: usize,
    pub wall_seconds: f64,
}

fn argmax(table: &[f64]) -> usize {
    let mut best = 0;
    for (x, &v) in table.iter().enumerate().skip(1) {
        if v > table[best] {
            best = x;
        }
    }
    best
}

#[inline]
fn pow_alpha(v: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        v * v
    } else {
        v.powf(alpha)
    }
}

/// `p(x) = Ψ(x)^α / Σ_y Ψ(y)^α`.
pub fn to_probability(psi: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if psi.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Numeric("state table has negative or non-finite entries".into()));
    }
    let powered: Vec<f64> = psi.iter().map(|&v| pow_alpha(v, alpha)).collect();
    let total: f64 = powered.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numeric("cannot derive probabilities from an all-zero state table".into()));
    }
    Ok(powered.into_iter().map(|v| v / total).collect())
}

fn l2_normalize(var: usize, mut table: Vec<f64>, advice: &str) -> Result<Vec<f64>> {
    let norm = table.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Numeric(format!(
            "state table of variable {} is {}; {advice}",
            var + 1,
            if norm == 0.0 { "all zero" } else { "not finite" }
        )));
    }
    for v in &mut table {
        *v /= norm;
    }
    Ok(table)
}

const UNDERFLOW_ADVICE: &str = "increase hbar";

/// Random non-negative tables from the configured seed, each normalized to
/// unit L2 norm.
pub fn init_state(inst: &CopInstance, cfg: &SolverConfig) -> AgentState {
    let mut rng = SplitMix64::new(cfg.seed);
    let psi = inst
        .domain_sizes()
        .iter()
        .map(|&d| loop {
            let draw: Vec<f64> = (0..d).map(|_| rng.next_f64()).collect();
            if draw.iter().any(|&v| v > 0.0) {
                break l2_normalize(0, draw, "").expect("non-zero draw");
            }
        })
        .collect();
    AgentState::from_psi(psi, cfg.alpha).expect("normalized draws are non-zero")
}

/// `exp(-cost / ħ)` for every unary and binary table entry.
struct Weights {
    unary: Vec<Vec<f64>>,
    edges: Vec<Vec<f64>>,
}

impl Weights {
    fn new(inst: &CopInstance, hbar: f64) -> Self {
        let boltz = |t: &[f64]| t.iter().map(|c| (-c / hbar).exp()).collect::<Vec<_>>();
        Self {
            unary: (0..inst.num_vars()).map(|v| boltz(inst.unary(v))).collect(),
            edges: inst.edges().iter().map(|e| boltz(&e.costs)).collect(),
        }
    }
}

/// Unnormalized factorized update of agent `var` given per-edge weight tables.
fn factorized_update<'w>(
    inst: &CopInstance,
    prob: &[Vec<f64>],
    var: usize,
    unary_w: &[f64],
    edge_w: impl Fn(usize) -> &'w [f64],
) -> Vec<f64> {
    let d = inst.domain_size(var);
    let mut psi = unary_w.to_vec();
    for inc in inst.adjacency(var) {
        let w = edge_w(inc.edge);
        let p = &prob[inc.other];
        let d_other = p.len();
        for (x, slot) in psi.iter_mut().enumerate() {
            let mut msg = 0.0;
            if inc.is_row {
                let row = &w[x * d_other..(x + 1) * d_other];
                for (wy, py) in row.iter().zip(p) {
                    msg += wy * py;
                }
            } else {
                for (y, py) in p.iter().enumerate() {
                    msg += w[y * d + x] * py;
                }
            }
            *slot *= msg;
        }
    }
    psi
}

/// The update of agent `var` before normalization, evaluated in factorized
/// form.
pub fn update_agent_unnormalized(
    inst: &CopInstance,
    state: &AgentState,
    var: usize,
    cfg: &SolverConfig,
) -> Vec<f64> {
    let boltz = |t: &[f64]| t.iter().map(|c| (-c / cfg.hbar).exp()).collect::<Vec<_>>();
    let unary_w = boltz(inst.unary(var));
    let adjacency = inst.adjacency(var);
    let local: Vec<Vec<f64>> = adjacency.iter().map(|inc| boltz(&inst.edges()[inc.edge].costs)).collect();
    factorized_update(inst, &state.prob, var, &unary_w, |edge| {
        let pos = adjacency.iter().position(|inc| inc.edge == edge).unwrap();
        &local[pos]
    })
}

/// The update of agent `var`, normalized to unit L2 norm.
pub fn update_agent(inst: &CopInstance, state: &AgentState, var: usize, cfg: &SolverConfig) -> Result<Vec<f64>> {
    l2_normalize(var, update_agent_unnormalized(inst, state, var, cfg), UNDERFLOW_ADVICE)
}

/// Literal evaluation of the update by summing over the joint space of every
/// other variable. Ground truth for [`update_agent`]; exponential cost.
pub fn naive_update_oracle(
    inst: &CopInstance,
    state: &AgentState,
    var: usize,
    cfg: &SolverConfig,
    state_space_cap: u128,
) -> Result<Vec<f64>> {
    let n = inst.num_vars();
    let others: Vec<usize> = (0..n).filter(|&j| j != var).collect();
    let space = others
        .iter()
        .fold(1u128, |acc, &j| acc.saturating_mul(inst.domain_size(j) as u128));
    if space > state_space_cap {
        return Err(Error::Guard(format!(
            "joint space of the other variables is {space}, cap is {state_space_cap}"
        )));
    }
    let mut values = vec![0usize; n];
    let mut psi = vec![0.0; inst.domain_size(var)];
    'outer: loop {
        let weight: f64 = others.iter().map(|&j| state.prob[j][values[j]]).product();
        for (x, slot) in psi.iter_mut().enumerate() {
            values[var] = x;
            let e = inst.local_cost_at(var, x, &values);
            *slot += (-e / cfg.hbar).exp() * weight;
        }
        for &j in others.iter().rev() {
            values[j] += 1;
            if values[j] < inst.domain_size(j) {
                continue 'outer;
            }
            values[j] = 0;
        }
        break;
    }
    l2_normalize(var, psi, UNDERFLOW_ADVICE)
}

/// Largest change of any assignment probability between two states.
pub fn fixed_point_residual(prev: &AgentState, next: &AgentState) -> Result<f64> {
    if prev.prob.len() != next.prob.len()
        || prev.prob.iter().zip(&next.prob).any(|(a, b)| a.len() != b.len())
    {
        return Err(Error::Contract("states describe different instances".into()));
    }
    Ok(prev
        .prob
        .iter()
        .zip(&next.prob)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max))
}

/// Runs the full iteration budget and returns the final argmax assignment.
pub fn run_qoa(inst: &CopInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    run_qoa_observed(inst, cfg, |_| {})
}

/// As [`run_qoa`], calling `observer` with the state after every sweep.
pub fn run_qoa_observed(
    inst: &CopInstance,
    cfg: &SolverConfig,
    mut observer: impl FnMut(&AgentState),
) -> Result<SolverReport> {
    cfg.validate()?;
    let (result, wall_seconds) = timed(|| -> Result<SolverReport> {
        let weights = Weights::new(inst, cfg.hbar);
        let mut state = init_state(inst, cfg);
        let mut cost_trajectory = Vec::with_capacity(cfg.max_iterations);
        let mut residual_trajectory = Vec::with_capacity(cfg.max_iterations);
        let mut best: Option<(Assignment, f64)> = None;

        for k in 1..=cfg.max_iterations {
            let prev = state.clone();
            let update = |state: &AgentState, var: usize| {
                let raw = factorized_update(inst, &state.prob, var, &weights.unary[var], |e| &weights.edges[e]);
                l2_normalize(var, raw, UNDERFLOW_ADVICE)
            };
            match cfg.schedule {
                Schedule::GaussSeidel => {
                    for var in 0..inst.num_vars() {
                        let psi = update(&state, var)?;
                        state.set_agent(var, psi, cfg.alpha)?;
                    }
                }
                Schedule::Jacobi => {
                    let fresh = (0..inst.num_vars())
                        .map(|var| update(&prev, var))
                        .collect::<Result<Vec<_>>>()?;
                    for (var, psi) in fresh.into_iter().enumerate() {
                        state.set_agent(var, psi, cfg.alpha)?;
                    }
                }
            }
            state.iteration = k;
            observer(&state);

            let current = state.argmax();
            let cost = inst.total_cost_unchecked(&current.values);
            cost_trajectory.push(cost);
            let residual = fixed_point_residual(&prev, &state)?;
            residual_trajectory.push(residual);
            if cfg.track_best && best.as_ref().map_or(true, |(_, c)| cost < *c) {
                best = Some((current, cost));
            }
            if cfg.early_stop.is_some_and(|tol| residual < tol) {
                break;
            }
        }

        let solution = state.argmax();
        let cost = inst.total_cost_unchecked(&solution.values);
        let (best_solution, best_cost) = match best {
            Some((a, c)) => (Some(a), Some(c)),
            None => (None, None),
        };
        Ok(SolverReport {
            solution,
            cost,
            iterations: state.iteration,
            cost_trajectory,
            residual_trajectory,
            best_solution,
            best_cost,
            wall_seconds: 0.0,
        })
    });
    let mut report = result?;
    report.wall_seconds = wall_seconds;
    Ok(report)
}

/// Diagonal of agent `var`'s effective local-energy operator: its local cost
/// averaged over the peers' `|ψ_j|²`.
pub fn effective_field(inst: &CopInstance, state: &AgentState, var: usize) -> Vec<f64> {
    let mut h = inst.unary(var).to_vec();
    for inc in inst.adjacency(var) {
        let psi = &state.psi[inc.other];
        for (x, slot) in h.iter_mut().enumerate() {
            let mut avg = 0.0;
            for (y, v) in psi.iter().enumerate() {
                avg += inst.pair_cost(inc, x, y) * v * v;
            }
            *slot += avg;
        }
    }
    h
}

fn euler_step(var: usize, psi: &[f64], h: &[f64], dt: f64, hbar: f64) -> Result<Vec<f64>> {
    let stepped: Vec<f64> = psi.iter().zip(h).map(|(p, e)| p - dt / hbar * p * e).collect();
    if stepped.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Numeric(format!(
            "flow step for variable {} left the non-negative finite range; use a smaller dt",
            var + 1
        )));
    }
    l2_normalize(var, stepped, "use a smaller dt")
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Contract(format!("dt must be positive, got {dt}")));
    }
    Ok(())
}

/// One explicit Euler step of the continuous-time flow for all agents at once,
/// each followed by renormalization.
pub fn flow_step(inst: &CopInstance, state: &AgentState, dt: f64, cfg: &SolverConfig) -> Result<AgentState> {
    check_dt(dt)?;
    let psi = (0..inst.num_vars())
        .map(|var| euler_step(var, &state.psi[var], &effective_field(inst, state, var), dt, cfg.hbar))
        .collect::<Result<Vec<_>>>()?;
    let mut next = AgentState::from_psi(psi, cfg.alpha)?;
    next.iteration = state.iteration + 1;
    Ok(next)
}

/// One Euler step for agent `var` only; every other agent stays frozen.
pub fn flow_step_agent(
    inst: &CopInstance,
    state: &AgentState,
    var: usize,
    dt: f64,
    cfg: &SolverConfig,
) -> Result<AgentState> {
    check_dt(dt)?;
    let h = effective_field(inst, state, var);
    let psi = euler_step(var, &state.psi[var], &h, dt, cfg.hbar)?;
    let mut next = state.clone();
    next.set_agent(var, psi, cfg.alpha)?;
    next.iteration += 1;
    Ok(next)
}

/// `ψ(x, t) ∝ ψ(x, 0) · exp(-h(x) t / ħ)`, renormalized to unit L2 norm.
///
/// Shifting `h` by its minimum over the support of `ψ(0)` leaves the
/// normalized result unchanged and keeps the dominant component from
/// underflowing at large `t`.
pub fn closed_form_evolution(h: &[f64], psi0: &[f64], t: f64, hbar: f64) -> Result<Vec<f64>> {
    if h.len() != psi0.len() {
        return Err(Error::Contract("field and state tables differ in length".into()));
    }
    if h.iter().chain(psi0).any(|v| !v.is_finite()) || !t.is_finite() || !(hbar > 0.0) {
        return Err(Error::Numeric("non-finite input to closed-form evolution".into()));
    }
    let shift = h
        .iter()
        .zip(psi0)
        .filter(|(_, p)| **p != 0.0)
        .map(|(e, _)| *e)
        .fold(f64::INFINITY, f64::min);
    if shift == f64::INFINITY {
        return Err(Error::Numeric("initial state is zero".into()));
    }
    let evolved: Vec<f64> = h
        .iter()
        .zip(psi0)
        .map(|(e, &p)| if p == 0.0 { 0.0 } else { p * (-(e - shift) * t / hbar).exp() })
        .collect();
    l2_normalize(0, evolved, "initial state is zero")
}

/// `min_e ‖h∘ψ − eψ‖₂`, attained at `e* = Σ h|ψ|²`. Zero exactly when `ψ` is
/// an eigenvector of `diag(h)`.
pub fn stationary_residual(h: &[f64], psi: &[f64]) -> f64 {
    let energy: f64 = h.iter().zip(psi).map(|(e, p)| e * p * p).sum();
    h.iter()
        .zip(psi)
        .map(|(e, p)| {
            let r = (e - energy) * p;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}
