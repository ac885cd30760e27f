//! wasm-bindgen bindings for the static demo page in `www/`.

use coopt::solver::flow_step_agent;
use coopt::{
    closed_form_evolution, generate_instance, mrls_run, run_qoa, to_probability, AgentState, CopInstance, GenSpec,
    SolverConfig,
};
use wasm_bindgen::prelude::*;

fn js_err(e: coopt::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// QOA against MRLS on one generated instance.
#[wasm_bindgen]
pub struct Comparison {
    qoa_trajectory: Vec<f64>,
    residuals: Vec<f64>,
    restart_costs: Vec<f64>,
    qoa_cost: f64,
    mrls_cost: f64,
    qoa_seconds: f64,
    mrls_seconds: f64,
}

#[wasm_bindgen]
impl Comparison {
    /// Argmax cost after every QOA sweep.
    #[wasm_bindgen(getter)]
    pub fn qoa_trajectory(&self) -> Vec<f64> {
        self.qoa_trajectory.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn residuals(&self) -> Vec<f64> {
        self.residuals.clone()
    }

    /// Final cost of every local-search restart, in restart order.
    #[wasm_bindgen(getter)]
    pub fn restart_costs(&self) -> Vec<f64> {
        self.restart_costs.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn qoa_cost(&self) -> f64 {
        self.qoa_cost
    }

    #[wasm_bindgen(getter)]
    pub fn mrls_cost(&self) -> f64 {
        self.mrls_cost
    }

    #[wasm_bindgen(getter)]
    pub fn qoa_seconds(&self) -> f64 {
        self.qoa_seconds
    }

    #[wasm_bindgen(getter)]
    pub fn mrls_seconds(&self) -> f64 {
        self.mrls_seconds
    }
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn compare(
    vars: usize,
    vals: usize,
    avg_degree: f64,
    seed: u64,
    hbar: f64,
    iters: usize,
    restarts: usize,
) -> Result<Comparison, JsError> {
    if restarts == 0 {
        return Err(JsError::new("restarts must be at least 1"));
    }
    let inst = generate_instance(&GenSpec::new(vars, vals, avg_degree, seed)).map_err(js_err)?;
    let cfg = SolverConfig { hbar, max_iterations: iters, seed, ..SolverConfig::default() };
    let qoa = run_qoa(&inst, &cfg).map_err(js_err)?;
    let ls = mrls_run(&inst, restarts, seed);
    Ok(Comparison {
        qoa_trajectory: qoa.cost_trajectory,
        residuals: qoa.residual_trajectory,
        restart_costs: ls.restart_costs.unwrap_or_default(),
        qoa_cost: qoa.cost,
        mrls_cost: ls.cost,
        qoa_seconds: qoa.wall_seconds,
        mrls_seconds: ls.wall_seconds,
    })
}

/// Frozen-field evolution of a single agent with local energies `h`, started
/// from the uniform state. Returns `|ψ(x, t)|²` row-major over `samples + 1`
/// time points in `[0, t_max]`: the closed form first, then an explicit Euler
/// integration with `steps_per_sample` steps between samples.
#[wasm_bindgen]
pub fn evolution(h: Vec<f64>, hbar: f64, t_max: f64, samples: usize, steps_per_sample: usize) -> Result<Vec<f64>, JsError> {
    if h.is_empty() || samples == 0 || steps_per_sample == 0 {
        return Err(JsError::new("need at least one value, one sample and one step"));
    }
    let d = h.len();
    let inst = CopInstance::new(vec![d], vec![h.clone()], vec![]).map_err(js_err)?;
    let cfg = SolverConfig { hbar, ..SolverConfig::default() };
    let psi0 = vec![1.0 / (d as f64).sqrt(); d];
    let dt = t_max / (samples * steps_per_sample) as f64;

    let mut closed = Vec::with_capacity((samples + 1) * d);
    let mut euler = Vec::with_capacity((samples + 1) * d);
    let mut state = AgentState::uniform(&inst, 2.0);
    for k in 0..=samples {
        let t = t_max * k as f64 / samples as f64;
        let psi = closed_form_evolution(&h, &psi0, t, hbar).map_err(js_err)?;
        closed.extend(psi.iter().map(|v| v * v));
        euler.extend(state.psi[0].iter().map(|v| v * v));
        if k < samples {
            for _ in 0..steps_per_sample {
                state = flow_step_agent(&inst, &state, 0, dt, &cfg).map_err(js_err)?;
            }
        }
    }
    closed.extend(euler);
    Ok(closed)
}

/// Assignment probabilities `Ψ^α / Σ Ψ^α` for each `α` in `alphas`,
/// concatenated.
#[wasm_bindgen]
pub fn sharpen(psi: Vec<f64>, alphas: Vec<f64>) -> Result<Vec<f64>, JsError> {
    let mut out = Vec::with_capacity(psi.len() * alphas.len());
    for alpha in alphas {
        out.extend(to_probability(&psi, alpha).map_err(js_err)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_runs() {
        let c = compare(20, 4, 3.0, 1, 1.0, 10, 5).ok().unwrap();
        assert_eq!(c.qoa_trajectory().len(), 10);
        assert_eq!(c.restart_costs().len(), 5);
        assert_eq!(c.qoa_cost(), *c.qoa_trajectory().last().unwrap());
        assert!(c.restart_costs().iter().all(|&x| x >= c.mrls_cost()));
    }

    #[test]
    fn euler_tracks_closed_form() {
        let out = evolution(vec![0.35, 1.1], 1.0, 1.0, 4, 2000).ok().unwrap();
        let (closed, euler) = out.split_at(out.len() / 2);
        assert_eq!(closed.len(), 10);
        assert!((closed[0] - 0.5).abs() < 1e-15);
        for (a, b) in closed.iter().zip(euler) {
            assert!((a - b).abs() < 1e-3);
        }
        let last = &closed[8..];
        assert!((last[0] - 1.0 / (1.0 + (-1.5f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn sharpen_rows_sum_to_one() {
        let out = sharpen(vec![0.71263, 0.33454], vec![1.0, 2.0, 8.0]).ok().unwrap();
        assert_eq!(out.len(), 6);
        for row in out.chunks(2) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!((out[2] - 0.8194).abs() < 5e-5);
        assert!(out[4] > out[2]);
    }
}
