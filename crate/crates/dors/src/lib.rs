//! A ground answer-set solver that learns domain-specific choice-point
//! heuristics from its own solved instances.
//!
//! The solver is a DPLL-style search over partial answer sets:
//! deterministic propagation (`expand`) grows the set, a heuristic
//! picks the next choice point, and complete sets are checked for
//! stability. A tracking run records the decision sequence that led
//! directly to a model; an offline learner aggregates such sequences
//! from many instances of one problem domain into a policy of
//! per-level occurrence counts; a guided run consults that policy
//! before falling back to the standard lookahead heuristic.
//!
//! Because grounders assign run-local identifiers to the auxiliary
//! atoms they introduce, learned policies would not transfer between
//! runs. The [`postp`] module implements the renaming pipeline that
//! fixes this: rules are augmented with reserved name atoms, a mock
//! grounder reproduces the unstable translation, and a post-processing
//! pass rebinds every auxiliary atom to a deterministic indexed name.
//!
//! Start with the runnable examples: each one demonstrates a major
//! capability end to end.
//!
//! ```bash
//! cargo run -p dors --example solve_program
//! cargo run -p dors --example lookahead_vs_naive
//! cargo run -p dors --example track_and_replay
//! cargo run -p dors --example stable_renaming
//! cargo run -p dors --example learn_and_compare
//! cargo run -p dors --example puzzle_plans
//! cargo run -p dors --example enumerate_models
//! ```
//!
//! The `dors` binary wires the same calls into a batch CLI (`solve`,
//! `learn`, `eval`, `postp`, `mockground`, `gen`).

pub mod bench;
pub mod core;
pub mod policy;
pub mod postp;
mod propagate;
pub mod search;
pub mod textio;

pub use propagate::{
    enumerate_stable_models, expand, verify_stable, EnumerationLimit, ExpandResult,
    DEFAULT_ATOM_LIMIT,
};
