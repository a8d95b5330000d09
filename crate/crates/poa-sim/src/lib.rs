//! Discrete-event simulator for the Aura and Clique proof-of-authority
//! consensus protocols, the key-cloning double-spend attack against them
//! under controlled network partitions, and the safety/liveness analysis of
//! the decision threshold that defends against it.
//!
//! The crate is organized around:
//!
//! * [`chain`] — blocks, chain views, fork-choice scores, finality rules
//! * [`aura`] / [`clique`] — the two per-sealer protocol state machines
//! * [`sim`] — the deterministic event loop, partitions, and clone bindings
//! * [`attack`] — attack planning and the three-condition double-spend verdict
//! * [`analysis`] — closed-form safety/liveness classification
//! * [`config`] / [`sweep`] / [`report`] — scenario files, seeded experiment
//!   sweeps, and CSV/SVG emission
//!
//! Sweeps run their independent seeded runs through rayon when the default
//! `parallel` feature is enabled; disabling it falls back to a sequential
//! executor with identical output.

pub mod analysis;
pub mod attack;
pub mod aura;
pub mod chain;
pub mod clique;
pub mod config;
pub mod report;
pub mod sim;
pub mod sweep;

pub use chain::{
    aura_score, clique_total_weight, distinct_sealers_since, is_decided, Block, BlockId,
    ChainView, DecisionRule, SealerId, Transaction,
};
pub use sim::{run_scenario, Protocol, Scenario, SimReport};
