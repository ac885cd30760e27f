//! Cooperative soft-decision optimization for binary constraint optimization
//! problems, with a multi-restart local search baseline, a seeded instance
//! generator, an exhaustive oracle and a comparison harness.
//!
//! ```
//! use coopt::{generate_instance, mrls_run, run_qoa, GenSpec, SolverConfig};
//!
//! let inst = generate_instance(&GenSpec::new(30, 5, 4.0, 1)).unwrap();
//! let qoa = run_qoa(&inst, &SolverConfig::default()).unwrap();
//! let mrls = mrls_run(&inst, 10, 1);
//! assert_eq!(qoa.solution.len(), 30);
//! assert!(mrls.cost > 0.0);
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod format;
pub mod generator;
pub mod local_search;
pub mod model;
pub mod rng;
pub mod solver;
mod timing;

pub use bench::{improvement_pct, run_comparison, write_report, Algorithm, BatchItem, BenchRecord};
pub use error::{Error, Result, Violation};
pub use format::{parse_instance, parse_solution, write_instance, write_solution};
pub use generator::{generate_instance, GenSpec};
pub use local_search::{check_local_optimum, local_search_run, mrls_run, LsReport};
pub use model::{validate_instance, Assignment, CopInstance, Edge};
pub use rng::SplitMix64;
pub use solver::{
    closed_form_evolution, fixed_point_residual, flow_step, init_state, naive_update_oracle, run_qoa,
    stationary_residual, to_probability, update_agent, AgentState, Schedule, SolverConfig, SolverReport,
};
