//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by world construction, belief fitting, policy synthesis,
/// the simulation engine, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// The accessible subgraph of the grid is not connected.
    #[error("accessible subgraph is disconnected ({accessible} accessible cells, {reached} reachable from the first)")]
    DisconnectedWorld {
        /// Number of accessible cells.
        accessible: usize,
        /// Number of cells reachable from the first accessible cell.
        reached: usize,
    },

    /// Every cell of the grid is a no-fly cell.
    #[error("every cell is a no-fly cell; no accessible region remains")]
    AllBlocked,

    /// All accessible weights are zero, so no target distribution exists.
    #[error("information map has zero total weight over accessible regions")]
    ZeroMass,

    /// A map event is malformed (e.g. a relocation destination is a no-fly cell).
    #[error("invalid map event at step {time}: {reason}")]
    InvalidEvent {
        /// Scheduled step of the offending event.
        time: u64,
        /// What is wrong with it.
        reason: String,
    },

    /// The Gram matrix of the GP fit is numerically singular.
    #[error("GP Gram matrix is numerically singular; use a positive noise variance or jitter")]
    SingularGram,

    /// A belief target distribution has zero mass on an accessible region.
    #[error("belief target has non-positive mass on accessible region {region}")]
    ZeroBeliefMass {
        /// Offending region index.
        region: usize,
    },

    /// A transition matrix is not reversible with respect to the given distribution.
    #[error("transition matrix violates detailed balance by {violation:.3e} (tolerance {tolerance:.3e})")]
    NotReversible {
        /// Largest detailed-balance residual found.
        violation: f64,
        /// Tolerance it was checked against.
        tolerance: f64,
    },

    /// Power iteration failed to converge within the iteration cap.
    #[error(
        "power iteration did not converge within {max_iters} iterations (chain may be periodic)"
    )]
    NoConvergence {
        /// Iteration cap that was exhausted.
        max_iters: usize,
    },

    /// A configuration field failed validation.
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig {
        /// Dotted path of the offending field, e.g. `swarm.tau_gp`.
        field: &'static str,
        /// Why it is invalid.
        reason: String,
    },

    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// An error raised while executing a simulation step.
    #[error("step {k} failed: {source}")]
    AtStep {
        /// Step index at which the engine halted.
        k: u64,
        /// Underlying module error.
        #[source]
        source: Box<Error>,
    },

    /// Filesystem or serialization failure while writing artifacts.
    #[error("artifact i/o: {0}")]
    Io(#[from] std::io::Error),

    /// CSV serialization failure.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// JSON serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wraps an error with the step index at which the engine halted.
    pub(crate) fn at_step(self, k: u64) -> Self {
        Error::AtStep {
            k,
            source: Box::new(self),
        }
    }

    /// Exit code classification for the CLI: 1 for config errors, 2 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. } | Error::ConfigParse(_) => 1,
            _ => 2,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
