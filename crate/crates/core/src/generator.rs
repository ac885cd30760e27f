//! Seeded random instances: a uniform random graph with a target mean degree
//! and uniform [0, 1) cost tables.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{CopInstance, Edge};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub d: usize,
    pub avg_degree: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, d: usize, avg_degree: f64, seed: u64) -> Self {
        Self { n, d, avg_degree, seed }
    }

    /// `round(n · avg_degree / 2)`.
    pub fn edge_count(&self) -> usize {
        (self.n as f64 * self.avg_degree / 2.0).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::Contract("n and d must both be at least 1".into()));
        }
        if !(self.avg_degree.is_finite() && self.avg_degree >= 0.0) {
            return Err(Error::Contract(format!("invalid average degree {}", self.avg_degree)));
        }
        let max_edges = self.n * (self.n - 1) / 2;
        let m = self.edge_count();
        if m > max_edges {
            return Err(Error::Guard(format!(
                "{m} edges requested but only {max_edges} distinct pairs exist for n={}",
                self.n
            )));
        }
        Ok(())
    }
}

/// Draws an instance. The random stream is consumed in a fixed order: edge
/// endpoints (rejection sampling), then unary costs, then binary costs in
/// sorted edge order, so a spec maps to exactly one instance.
pub fn generate_instance(spec: &GenSpec) -> Result<CopInstance> {
    spec.validate()?;
    let GenSpec { n, d, .. } = *spec;
    let m = spec.edge_count();
    let mut rng = SplitMix64::new(spec.seed);

    let mut seen = HashSet::with_capacity(m);
    let mut pairs = Vec::with_capacity(m);
    while pairs.len() < m {
        let a = rng.below(n);
        let b = rng.below(n);
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if seen.insert(pair) {
            pairs.push(pair);
        }
    }
    pairs.sort_unstable();

    let unary: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.next_f64()).collect())
        .collect();
    let edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(i, j)| Edge::new(i, j, (0..d * d).map(|_| rng.next_f64()).collect()))
        .collect();

    CopInstance::new(vec![d; n], unary, edges)
}
