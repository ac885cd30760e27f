#![allow(dead_code)]

use coopt::{CopInstance, Edge, SplitMix64};

/// Random instance with per-variable domain sizes in 1..=max_d and each pair
/// connected with probability `density`.
pub fn random_instance(seed: u64, n: usize, max_d: usize, density: f64) -> CopInstance {
    let mut rng = SplitMix64::new(seed);
    let domain_sizes: Vec<usize> = (0..n).map(|_| 1 + rng.below(max_d)).collect();
    let unary = domain_sizes.iter().map(|&d| (0..d).map(|_| rng.next_f64()).collect()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < density {
                let costs = (0..domain_sizes[i] * domain_sizes[j]).map(|_| rng.next_f64()).collect();
                edges.push(Edge::new(i, j, costs));
            }
        }
    }
    CopInstance::new(domain_sizes, unary, edges).unwrap()
}

/// Total cost straight from the tables, without going through the library.
pub fn table_cost(inst: &CopInstance, values: &[usize]) -> f64 {
    let mut sum = 0.0;
    for (v, &x) in values.iter().enumerate() {
        sum += inst.unary(v)[x];
    }
    for e in inst.edges() {
        sum += e.costs[values[e.i] * inst.domain_size(e.j) + values[e.j]];
    }
    sum
}

/// Recursive exhaustive search; first minimum in lexicographic order.
pub fn enumerate_min(inst: &CopInstance) -> (Vec<usize>, f64) {
    fn rec(inst: &CopInstance, prefix: &mut Vec<usize>, best: &mut Option<(Vec<usize>, f64)>) {
        if prefix.len() == inst.num_vars() {
            let c = table_cost(inst, prefix);
            if best.as_ref().map_or(true, |(_, b)| c < *b) {
                *best = Some((prefix.clone(), c));
            }
            return;
        }
        for x in 0..inst.domain_size(prefix.len()) {
            prefix.push(x);
            rec(inst, prefix, best);
            prefix.pop();
        }
    }
    let mut best = None;
    rec(inst, &mut Vec::new(), &mut best);
    best.unwrap()
}

/// Two variables, two values each, one edge.
pub fn t2() -> CopInstance {
    CopInstance::new(
        vec![2, 2],
        vec![vec![0.2, 0.8], vec![0.5, 0.1]],
        vec![Edge::new(0, 1, vec![0.0, 0.3, 0.4, 0.2])],
    )
    .unwrap()
}

pub fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
