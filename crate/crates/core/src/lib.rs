//! Desk-scale simulator for decentralized multi-agent ergodic coverage of
//! unknown, time-varying information maps.
//!
//! A team of agents explores a grid-induced region graph. Each agent senses
//! noisy values of an exogenous information map, exchanges observations with
//! nearby teammates, maintains a Gaussian-process belief with a UCB
//! exploration bonus, and follows a Markov-chain policy whose stationary
//! distribution matches its normalized belief, so that long-run visitation
//! frequency tracks the evolving target distribution.
//!
//! The modules mirror the moving parts:
//!
//! - [`world`]: region graph, no-fly zones, information map, event schedule
//! - [`belief`]: GP regression, UCB map, belief target distribution
//! - [`policy`]: Metropolis and fast-mixing chain synthesis, SLEM, sampling
//! - [`engine`]: the synchronous sense/share/update/move loop
//! - [`baselines`]: greedy UCB and uniform-walk comparison planners
//! - [`metrics`]: regret, belief/empirical errors, KL alignment, coverage
//! - [`config`]: declarative experiment files
//! - [`runner`]: run/sweep/compare execution and CSV/JSON artifacts
//! - [`plot`]: static SVG charts and heatmaps from artifacts
//!
//! See the crate `examples/` directory for one runnable walkthrough per
//! capability, and the `ergoswarm` binary for the config-driven front end.

pub mod baselines;
pub mod belief;
pub mod config;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod plot;
pub mod policy;
pub mod runner;
pub mod world;

pub use baselines::PlannerKind;
pub use belief::{BeliefMap, Dataset, GpPosterior, KernelParams, Observation};
pub use config::ExperimentConfig;
pub use engine::{AgentState, BeliefConfig, StepRecord, SwarmConfig, SwarmEngine};
pub use error::{Error, Result};
pub use metrics::{DriftSummary, RunSummary};
pub use policy::{ChainMode, PolicyConfig, TransitionMatrix};
pub use world::{EnvironmentGraph, InfoMap, MapEvent, MapEventKind, MapSchedule, RegionId};
