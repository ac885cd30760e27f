//! Binary constraint optimization problems: a sum of unary cost tables over
//! discrete variables plus binary cost tables on an undirected edge set.

use std::collections::HashMap;

use crate::error::{Error, Result, Violation};

/// A binary cost table on the unordered pair `(i, j)`, `i < j`, stored as a
/// `d_i × d_j` row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub costs: Vec<f64>,
}

impl Edge {
    pub fn new(i: usize, j: usize, costs: Vec<f64>) -> Self {
        Self { i, j, costs }
    }
}

/// One entry of a variable's adjacency list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: usize,
    pub other: usize,
    /// True when the owning variable is the edge's row endpoint `i`.
    pub is_row: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopInstance {
    domain_sizes: Vec<usize>,
    unary: Vec<Vec<f64>>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Incidence>>,
}

/// Checks every structural invariant of the given parts. Variable indices are
/// 0-based here; violations refer to positions in the supplied `edges` order.
pub fn validate_instance(
    domain_sizes: &[usize],
    unary: &[Vec<f64>],
    edges: &[Edge],
) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let n = domain_sizes.len();
    if n == 0 {
        violations.push(Violation::EmptyInstance);
    }
    for (var, &d) in domain_sizes.iter().enumerate() {
        if d == 0 {
            violations.push(Violation::EmptyDomain { var });
        }
    }
    if unary.len() != n {
        violations.push(Violation::UnaryCount { expected: n, found: unary.len() });
    }
    for (var, (table, &d)) in unary.iter().zip(domain_sizes).enumerate() {
        if table.len() != d {
            violations.push(Violation::UnaryLength { var, expected: d, found: table.len() });
        }
        if table.iter().any(|c| !c.is_finite()) {
            violations.push(Violation::NonFiniteCost { var: Some(var), edge: None });
        }
    }

    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (idx, e) in edges.iter().enumerate() {
        if e.i == e.j {
            violations.push(Violation::SelfLoop { edge: idx });
            continue;
        }
        let mut in_range = true;
        for var in [e.i, e.j] {
            if var >= n {
                violations.push(Violation::EndpointOutOfRange { edge: idx, var });
                in_range = false;
            }
        }
        if e.i > e.j {
            violations.push(Violation::EndpointOrder { edge: idx });
        }
        let key = (e.i.min(e.j), e.i.max(e.j));
        if let Some(&first) = seen.get(&key) {
            violations.push(Violation::DuplicateEdge { edge: idx, first });
        } else {
            seen.insert(key, idx);
        }
        if in_range {
            let expected = domain_sizes[e.i] * domain_sizes[e.j];
            if e.costs.len() != expected {
                violations.push(Violation::TableLength {
                    edge: idx,
                    expected,
                    found: e.costs.len(),
                });
            }
        }
        if e.costs.iter().any(|c| !c.is_finite()) {
            violations.push(Violation::NonFiniteCost { var: None, edge: Some(idx) });
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn build_adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<Incidence>> {
    let mut adjacency = vec![Vec::new(); n];
    for (idx, e) in edges.iter().enumerate() {
        adjacency[e.i].push(Incidence { edge: idx, other: e.j, is_row: true });
        adjacency[e.j].push(Incidence { edge: idx, other: e.i, is_row: false });
    }
    adjacency
}

impl CopInstance {
    /// Builds a validated instance. Edges are stored sorted by `(i, j)`, which
    /// fixes the summation order of every cost evaluation independently of the
    /// order they were supplied in.
    pub fn new(domain_sizes: Vec<usize>, unary: Vec<Vec<f64>>, mut edges: Vec<Edge>) -> Result<Self> {
        validate_instance(&domain_sizes, &unary, &edges).map_err(Error::InvalidInstance)?;
        edges.sort_by_key(|e| (e.i, e.j));
        let adjacency = build_adjacency(domain_sizes.len(), &edges);
        Ok(Self { domain_sizes, unary, edges, adjacency })
    }

    pub fn num_vars(&self) -> usize {
        self.domain_sizes.len()
    }

    pub fn domain_sizes(&self) -> &[usize] {
        &self.domain_sizes
    }

    pub fn domain_size(&self, var: usize) -> usize {
        self.domain_sizes[var]
    }

    pub fn unary(&self, var: usize) -> &[f64] {
        &self.unary[var]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn adjacency(&self, var: usize) -> &[Incidence] {
        &self.adjacency[var]
    }

    /// Re-runs the structural checks and verifies the cached adjacency index.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        validate_instance(&self.domain_sizes, &self.unary, &self.edges)?;
        debug_assert_eq!(build_adjacency(self.num_vars(), &self.edges), self.adjacency);
        Ok(())
    }

    /// Product of all domain sizes, saturating at `u128::MAX`.
    pub fn state_space(&self) -> u128 {
        self.domain_sizes
            .iter()
            .fold(1u128, |acc, &d| acc.saturating_mul(d as u128))
    }

    /// Binary cost of `edge` looked up from the perspective of `inc`'s owner.
    #[inline]
    pub(crate) fn pair_cost(&self, inc: &Incidence, own_value: usize, other_value: usize) -> f64 {
        let e = &self.edges[inc.edge];
        if inc.is_row {
            e.costs[own_value * self.domain_sizes[e.j] + other_value]
        } else {
            e.costs[other_value * self.domain_sizes[e.j] + own_value]
        }
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.values.len() != self.num_vars() {
            return Err(Error::Contract(format!(
                "assignment has {} values for {} variables",
                a.values.len(),
                self.num_vars()
            )));
        }
        for (var, (&v, &d)) in a.values.iter().zip(&self.domain_sizes).enumerate() {
            if v >= d {
                return Err(Error::Contract(format!(
                    "value {v} out of domain for variable {var} (size {d})"
                )));
            }
        }
        Ok(())
    }

    /// `Σ_i f_i(a_i) + Σ_(i,j) f_ij(a_i, a_j)`, variables ascending then edges in
    /// sorted order.
    pub fn total_cost(&self, a: &Assignment) -> Result<f64> {
        self.check_assignment(a)?;
        Ok(self.total_cost_unchecked(&a.values))
    }

    pub(crate) fn total_cost_unchecked(&self, values: &[usize]) -> f64 {
        let mut sum = 0.0;
        for (table, &v) in self.unary.iter().zip(values) {
            sum += table[v];
        }
        for e in &self.edges {
            sum += e.costs[values[e.i] * self.domain_sizes[e.j] + values[e.j]];
        }
        sum
    }

    /// Agent `var`'s local objective: its unary cost plus every incident binary
    /// cost.
    pub fn local_cost(&self, var: usize, a: &Assignment) -> Result<f64> {
        if var >= self.num_vars() {
            return Err(Error::Contract(format!("variable {var} out of range")));
        }
        self.check_assignment(a)?;
        Ok(self.local_cost_at(var, a.values[var], &a.values))
    }

    /// Local objective of `var` with its value replaced by `value`.
    #[inline]
    pub(crate) fn local_cost_at(&self, var: usize, value: usize, values: &[usize]) -> f64 {
        let mut sum = self.unary[var][value];
        for inc in &self.adjacency[var] {
            sum += self.pair_cost(inc, value, values[inc.other]);
        }
        sum
    }

    /// Exhaustive minimum over the joint state space. Ties resolve to the
    /// lexicographically smallest assignment.
    pub fn brute_force_optimum(&self, state_space_cap: u128) -> Result<(Assignment, f64)> {
        let space = self.state_space();
        if space > state_space_cap {
            return Err(Error::Guard(format!(
                "state space {} exceeds cap {state_space_cap}",
                describe_space(&self.domain_sizes, space)
            )));
        }
        let n = self.num_vars();
        let mut values = vec![0usize; n];
        let mut best_values = values.clone();
        let mut best = self.total_cost_unchecked(&values);
        // Odometer with the last variable fastest yields lexicographic order.
        loop {
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok((Assignment::new(best_values), best));
                }
                k -= 1;
                values[k] += 1;
                if values[k] < self.domain_sizes[k] {
                    break;
                }
                values[k] = 0;
            }
            let cost = self.total_cost_unchecked(&values);
            if cost < best {
                best = cost;
                best_values.copy_from_slice(&values);
            }
        }
    }
}

fn describe_space(domain_sizes: &[usize], space: u128) -> String {
    if space == u128::MAX {
        let uniform = domain_sizes.iter().all(|&d| d == domain_sizes[0]);
        if uniform {
            format!("{}^{}", domain_sizes[0], domain_sizes.len())
        } else {
            "product of domain sizes (overflows u128)".to_string()
        }
    } else {
        space.to_string()
    }
}

/// One 0-based value index per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub values: Vec<usize>,
}

impl Assignment {
    pub fn new(values: Vec<usize>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<usize>> for Assignment {
    fn from(values: Vec<usize>) -> Self {
        Self::new(values)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Two variables, two values each, one edge.
    pub(crate) fn t2() -> CopInstance {
        CopInstance::new(
            vec![2, 2],
            vec![vec![0.2, 0.8], vec![0.5, 0.1]],
            vec![Edge::new(0, 1, vec![0.0, 0.3, 0.4, 0.2])],
        )
        .unwrap()
    }

    #[test]
    fn t2_is_valid() {
        assert!(t2().validate().is_ok());
    }

    #[test]
    fn self_loop_reported_with_edge_index() {
        let v = validate_instance(
            &[2, 2, 2],
            &[vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]],
            &[Edge::new(2, 2, vec![0.0; 4])],
        )
        .unwrap_err();
        assert_eq!(v, vec![Violation::SelfLoop { edge: 0 }]);
        assert_eq!(v[0].to_string(), "self-loop at edge 0");
    }

    #[test]
    fn duplicate_edge_reported() {
        let v = validate_instance(
            &[2, 2],
            &[vec![0.0; 2], vec![0.0; 2]],
            &[Edge::new(0, 1, vec![0.0; 4]), Edge::new(0, 1, vec![0.0; 4])],
        )
        .unwrap_err();
        assert_eq!(v, vec![Violation::DuplicateEdge { edge: 1, first: 0 }]);
        assert!(v[0].to_string().contains("duplicate edge"));
    }

    #[test]
    fn table_dimension_mismatch_reported() {
        let v = validate_instance(
            &[2, 3],
            &[vec![0.0; 2], vec![0.0; 3]],
            &[Edge::new(0, 1, vec![0.0; 5])],
        )
        .unwrap_err();
        assert_eq!(v, vec![Violation::TableLength { edge: 0, expected: 6, found: 5 }]);
    }

    #[test]
    fn reversed_and_out_of_range_endpoints() {
        let v = validate_instance(
            &[2, 2],
            &[vec![0.0; 2], vec![0.0; 2]],
            &[Edge::new(1, 0, vec![0.0; 4]), Edge::new(0, 5, vec![])],
        )
        .unwrap_err();
        assert!(v.contains(&Violation::EndpointOrder { edge: 0 }));
        assert!(v.contains(&Violation::EndpointOutOfRange { edge: 1, var: 5 }));
    }

    #[test]
    fn adjacency_lists_incident_edges() {
        let inst = CopInstance::new(
            vec![2, 2, 2],
            vec![vec![0.0; 2]; 3],
            vec![Edge::new(1, 2, vec![0.0; 4]), Edge::new(0, 1, vec![0.0; 4])],
        )
        .unwrap();
        // Sorted storage: (0,1) then (1,2).
        assert_eq!(inst.edges()[0].i, 0);
        let others: Vec<_> = inst.adjacency(1).iter().map(|inc| inc.other).collect();
        assert_eq!(others, vec![0, 2]);
        assert_eq!(inst.adjacency(0).len(), 1);
        assert_eq!(inst.adjacency(2).len(), 1);
        assert_eq!(build_adjacency(3, inst.edges()), inst.adjacency);
    }

    #[test]
    fn total_cost_of_t2() {
        let inst = t2();
        assert_eq!(inst.total_cost(&vec![0, 1].into()).unwrap(), 0.2 + 0.1 + 0.3);
        assert_eq!(inst.total_cost(&vec![1, 0].into()).unwrap(), 0.8 + 0.5 + 0.4);
        assert!((inst.total_cost(&vec![0, 1].into()).unwrap() - 0.6).abs() < 1e-15);
        assert!((inst.total_cost(&vec![1, 0].into()).unwrap() - 1.7).abs() < 1e-15);
    }

    #[test]
    fn zero_instance_costs_nothing() {
        let inst = CopInstance::new(
            vec![3, 3],
            vec![vec![0.0; 3]; 2],
            vec![Edge::new(0, 1, vec![0.0; 9])],
        )
        .unwrap();
        assert_eq!(inst.total_cost(&vec![2, 1].into()).unwrap(), 0.0);
        let (a, c) = inst.brute_force_optimum(100).unwrap();
        assert_eq!(a.values, vec![0, 0]);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn local_cost_of_t2() {
        let inst = t2();
        let a: Assignment = vec![0, 1].into();
        assert_eq!(inst.local_cost(0, &a).unwrap(), 0.2 + 0.3);
        assert_eq!(inst.local_cost(1, &a).unwrap(), 0.1 + 0.3);
    }

    #[test]
    fn isolated_variable_local_cost_is_unary() {
        let inst = CopInstance::new(vec![2, 3], vec![vec![0.1, 0.2], vec![0.3, 0.4, 0.5]], vec![]).unwrap();
        assert_eq!(inst.local_cost(1, &vec![0, 2].into()).unwrap(), 0.5);
    }

    #[test]
    fn out_of_domain_assignment_is_a_contract_fault() {
        let inst = t2();
        assert!(matches!(inst.total_cost(&vec![2, 0].into()), Err(Error::Contract(_))));
        assert!(matches!(inst.total_cost(&vec![0].into()), Err(Error::Contract(_))));
        assert!(matches!(inst.local_cost(5, &vec![0, 0].into()), Err(Error::Contract(_))));
    }

    #[test]
    fn brute_force_t2() {
        let (a, c) = t2().brute_force_optimum(4).unwrap();
        assert_eq!(a.values, vec![0, 1]);
        assert!((c - 0.6).abs() < 1e-15);
    }

    #[test]
    fn brute_force_guard_names_state_space() {
        let inst = CopInstance::new(vec![4; 20], vec![vec![0.0; 4]; 20], vec![]).unwrap();
        let err = inst.brute_force_optimum(1_000_000).unwrap_err();
        match err {
            Error::Guard(msg) => assert!(msg.contains("1099511627776"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
