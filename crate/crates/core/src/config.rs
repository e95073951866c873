//! Declarative experiment configuration.
//!
//! One TOML file describes an experiment in five sections: `world`, `swarm`,
//! `belief`, `policy`, and `run`. Unknown keys are rejected. The world
//! section builds per-cell weights from an optional base weight plus named
//! ROI blobs (`rect`, `cells`, `gaussian`), and lists scheduled map events.

use std::path::Path;

use serde::Deserialize;

use crate::baselines::PlannerKind;
use crate::belief::KernelParams;
use crate::engine::{BeliefConfig, SwarmConfig};
use crate::error::{Error, Result};
use crate::metrics::roi_cells_by_threshold;
use crate::policy::{ChainMode, PolicyConfig};
use crate::world::{EnvironmentGraph, InfoMap, MapEvent, MapEventKind, MapSchedule, RegionId};

/// A communication or sensing radius: a number of cells or `"global"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusSpec {
    /// Euclidean radius in cell units.
    Cells(f64),
    /// Reaches the whole grid.
    Global,
}

impl<'de> Deserialize<'de> for RadiusSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(RadiusSpec::Cells(v)),
            Raw::Text(s) if s == "global" => Ok(RadiusSpec::Global),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"global\", got \"{s}\""
            ))),
        }
    }
}

impl RadiusSpec {
    /// Concrete radius; `"global"` maps to infinity.
    pub fn resolve(&self) -> f64 {
        match self {
            RadiusSpec::Cells(v) => *v,
            RadiusSpec::Global => f64::INFINITY,
        }
    }
}

/// `[x, y]` cell reference used throughout the config file.
pub type Cell = [usize; 2];

/// One ROI blob compiled into per-cell weights.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RoiSpec {
    /// Constant weight over an axis-aligned rectangle.
    Rect {
        /// Weight added to every covered cell.
        weight: f64,
        /// Left column.
        x: usize,
        /// Top row.
        y: usize,
        /// Width in cells.
        w: usize,
        /// Height in cells.
        h: usize,
    },
    /// Constant weight over listed cells.
    Cells {
        /// Weight added to each listed cell.
        weight: f64,
        /// The cells.
        cells: Vec<Cell>,
    },
    /// Gaussian bump centered on a (possibly fractional) cell position.
    Gaussian {
        /// Peak weight at the center.
        weight: f64,
        /// Center column.
        cx: f64,
        /// Center row.
        cy: f64,
        /// Spatial standard deviation in cells.
        sigma: f64,
    },
}

/// One scheduled map event.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EventSpec {
    /// Move the source cells' weight onto the destination cells.
    Relocate {
        /// Step at which the event fires.
        time: u64,
        /// Cells whose weight is removed.
        sources: Vec<Cell>,
        /// Cells receiving equal shares of the moved mass.
        dests: Vec<Cell>,
    },
    /// Spread a fraction of each source cell's weight onto its neighbors.
    Expand {
        /// Step at which the event fires.
        time: u64,
        /// Cells the hazard grows from.
        sources: Vec<Cell>,
        /// Fraction in (0, 1].
        spread: f64,
    },
    /// Replace the full weight vector (row-major).
    Replace {
        /// Step at which the event fires.
        time: u64,
        /// New per-cell weights.
        weights: Vec<f64>,
    },
}

/// `[world]` section.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSection {
    /// Grid width in cells.
    pub width: usize,
    /// Grid height in cells.
    pub height: usize,
    /// No-fly cells.
    #[serde(default)]
    pub nofly: Vec<Cell>,
    /// Background weight applied to every cell before ROI blobs.
    #[serde(default)]
    pub base_weight: f64,
    /// Explicit per-cell weights (row-major); replaces `base_weight`.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// ROI blobs added on top of the background.
    #[serde(default, rename = "roi")]
    pub rois: Vec<RoiSpec>,
    /// Weight quantile defining ROI membership when no blobs are listed.
    #[serde(default = "default_roi_threshold")]
    pub roi_threshold: f64,
    /// Scheduled map events.
    #[serde(default, rename = "event")]
    pub events: Vec<EventSpec>,
}

fn default_roi_threshold() -> f64 {
    0.9
}

/// `[swarm]` section.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwarmSection {
    /// Team size M.
    pub agents: usize,
    /// Sensing radius.
    #[serde(default = "default_zero_radius")]
    pub r_sense: RadiusSpec,
    /// Communication radius.
    #[serde(default = "default_zero_radius")]
    pub r_comm: RadiusSpec,
    /// Belief refit period.
    pub tau_gp: u64,
    /// Policy rebuild period.
    pub tau_p: u64,
    /// Horizon.
    pub t_final: u64,
    /// UCB exploration weight.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Transition rule.
    #[serde(default = "default_planner")]
    pub planner: PlannerKind,
    /// Fixed starting cells (otherwise sampled distinct per seed).
    #[serde(default)]
    pub initial_positions: Option<Vec<Cell>>,
}

fn default_zero_radius() -> RadiusSpec {
    RadiusSpec::Cells(0.0)
}

fn default_beta() -> f64 {
    1.0
}

fn default_planner() -> PlannerKind {
    PlannerKind::Ergodic
}

/// `[belief]` section.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefSection {
    /// Kernel lengthscale in cells.
    pub lengthscale: f64,
    /// Kernel signal variance.
    pub signal_variance: f64,
    /// GP noise variance.
    pub noise_variance: f64,
    /// Constant prior mean.
    #[serde(default)]
    pub prior_mean: f64,
    /// Positivity floor applied before normalizing the UCB map.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Dataset cap (0 disables).
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Simulated sensor noise standard deviation.
    #[serde(default)]
    pub noise_std: f64,
}

fn default_eps() -> f64 {
    1e-6
}

fn default_n_max() -> usize {
    2000
}

/// `[policy]` section.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    /// Chain construction mode.
    #[serde(default = "default_mode")]
    pub mode: ChainMode,
    /// SLEM contract slack.
    #[serde(default = "default_slem_tol")]
    pub slem_tol: f64,
    /// Subgradient iterations for fast mixing.
    #[serde(default = "default_slem_iters")]
    pub slem_max_iters: usize,
}

fn default_mode() -> ChainMode {
    ChainMode::Metropolis
}

fn default_slem_tol() -> f64 {
    1e-9
}

fn default_slem_iters() -> usize {
    30
}

impl Default for PolicySection {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            slem_tol: default_slem_tol(),
            slem_max_iters: default_slem_iters(),
        }
    }
}

/// `[run]` section.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Seeds to run; one artifact directory per seed.
    pub seeds: Vec<u64>,
    /// Output directory, joined under `ERGOSWARM_OUT` when that is set.
    pub output_dir: String,
    /// Also write per-step `trajectory.csv`.
    #[serde(default)]
    pub trajectory: bool,
    /// Dump each agent's final posterior mean/std as CSV.
    #[serde(default)]
    pub posterior_dump: bool,
    /// Dump each agent's final transition matrix as dense CSV.
    #[serde(default)]
    pub policy_dump: bool,
}

/// Parsed experiment file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// World geometry, weights, events.
    pub world: WorldSection,
    /// Team parameters.
    pub swarm: SwarmSection,
    /// Belief parameters.
    pub belief: BeliefSection,
    /// Policy parameters.
    #[serde(default)]
    pub policy: PolicySection,
    /// Execution parameters.
    pub run: RunSection,
}

/// World artifacts compiled from the config.
#[derive(Debug, Clone)]
pub struct CompiledWorld {
    /// Region graph.
    pub graph: EnvironmentGraph,
    /// Initial information map.
    pub initial_map: InfoMap,
    /// Event schedule.
    pub schedule: MapSchedule,
    /// ROI cell sets used by discovery metrics.
    pub rois: Vec<Vec<RegionId>>,
}

impl ExperimentConfig {
    /// Parses a config from TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Static validation of everything that does not need a run.
    pub fn validate(&self) -> Result<()> {
        let w = &self.world;
        if w.width < 1 || w.height < 1 {
            return Err(Error::InvalidConfig {
                field: "world.width",
                reason: "grid must be at least 1x1".into(),
            });
        }
        let in_grid = |c: &Cell| c[0] < w.width && c[1] < w.height;
        if let Some(bad) = w.nofly.iter().find(|c| !in_grid(c)) {
            return Err(Error::InvalidConfig {
                field: "world.nofly",
                reason: format!("cell [{}, {}] outside the grid", bad[0], bad[1]),
            });
        }
        if let Some(weights) = &w.weights {
            if weights.len() != w.width * w.height {
                return Err(Error::InvalidConfig {
                    field: "world.weights",
                    reason: format!(
                        "expected {} entries, got {}",
                        w.width * w.height,
                        weights.len()
                    ),
                });
            }
            if weights.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidConfig {
                    field: "world.weights",
                    reason: "weights must be finite and nonnegative".into(),
                });
            }
        }
        if !(w.base_weight >= 0.0 && w.base_weight.is_finite()) {
            return Err(Error::InvalidConfig {
                field: "world.base_weight",
                reason: "base weight must be finite and nonnegative".into(),
            });
        }
        if !(0.0..=1.0).contains(&w.roi_threshold) {
            return Err(Error::InvalidConfig {
                field: "world.roi_threshold",
                reason: format!("quantile {} outside [0, 1]", w.roi_threshold),
            });
        }
        for roi in &w.rois {
            match roi {
                RoiSpec::Rect {
                    x,
                    y,
                    w: rw,
                    h: rh,
                    weight,
                } => {
                    if *weight < 0.0 {
                        return Err(Error::InvalidConfig {
                            field: "world.roi",
                            reason: "rect weight must be nonnegative".into(),
                        });
                    }
                    if x + rw > w.width || y + rh > w.height || *rw == 0 || *rh == 0 {
                        return Err(Error::InvalidConfig {
                            field: "world.roi",
                            reason: format!("rect {x},{y} {rw}x{rh} outside the grid"),
                        });
                    }
                }
                RoiSpec::Cells { cells, weight } => {
                    if *weight < 0.0 {
                        return Err(Error::InvalidConfig {
                            field: "world.roi",
                            reason: "cells weight must be nonnegative".into(),
                        });
                    }
                    if let Some(bad) = cells.iter().find(|c| !in_grid(c)) {
                        return Err(Error::InvalidConfig {
                            field: "world.roi",
                            reason: format!("cell [{}, {}] outside the grid", bad[0], bad[1]),
                        });
                    }
                }
                RoiSpec::Gaussian { sigma, weight, .. } => {
                    if !sigma.is_finite() || *sigma <= 0.0 {
                        return Err(Error::InvalidConfig {
                            field: "world.roi",
                            reason: format!("gaussian sigma must be positive, got {sigma}"),
                        });
                    }
                    if *weight < 0.0 {
                        return Err(Error::InvalidConfig {
                            field: "world.roi",
                            reason: "gaussian weight must be nonnegative".into(),
                        });
                    }
                }
            }
        }
        for e in &w.events {
            let cells = match e {
                EventSpec::Relocate { sources, dests, .. } => {
                    sources.iter().chain(dests.iter()).collect::<Vec<_>>()
                }
                EventSpec::Expand { sources, .. } => sources.iter().collect(),
                EventSpec::Replace { .. } => Vec::new(),
            };
            if let Some(bad) = cells.into_iter().find(|c| !in_grid(c)) {
                return Err(Error::InvalidConfig {
                    field: "world.event",
                    reason: format!("cell [{}, {}] outside the grid", bad[0], bad[1]),
                });
            }
        }
        if let Some(positions) = &self.swarm.initial_positions {
            if let Some(bad) = positions.iter().find(|c| !in_grid(c)) {
                return Err(Error::InvalidConfig {
                    field: "swarm.initial_positions",
                    reason: format!("cell [{}, {}] outside the grid", bad[0], bad[1]),
                });
            }
        }
        if self.run.seeds.is_empty() {
            return Err(Error::InvalidConfig {
                field: "run.seeds",
                reason: "at least one seed is required".into(),
            });
        }
        if self.run.output_dir.is_empty() {
            return Err(Error::InvalidConfig {
                field: "run.output_dir",
                reason: "output directory must not be empty".into(),
            });
        }
        if self.policy.slem_tol.is_nan() || self.policy.slem_tol <= 0.0 {
            return Err(Error::InvalidConfig {
                field: "policy.slem_tol",
                reason: format!("slem_tol must be positive, got {}", self.policy.slem_tol),
            });
        }
        Ok(())
    }

    fn cell_id(&self, c: &Cell) -> RegionId {
        RegionId(c[1] * self.world.width + c[0])
    }

    /// Builds the graph, initial map, schedule, and ROI sets.
    pub fn compile_world(&self) -> Result<CompiledWorld> {
        let w = &self.world;
        let nofly: Vec<RegionId> = w.nofly.iter().map(|c| self.cell_id(c)).collect();
        let graph = EnvironmentGraph::build_grid(w.width, w.height, &nofly)?;

        let n = w.width * w.height;
        let mut weights = match &w.weights {
            Some(explicit) => explicit.clone(),
            None => vec![w.base_weight; n],
        };
        let mut explicit_rois: Vec<Vec<RegionId>> = Vec::new();
        for roi in &w.rois {
            let mut members = Vec::new();
            match roi {
                RoiSpec::Rect {
                    weight,
                    x,
                    y,
                    w: rw,
                    h: rh,
                } => {
                    for yy in *y..y + rh {
                        for xx in *x..x + rw {
                            let r = RegionId(yy * w.width + xx);
                            weights[r.0] += weight;
                            members.push(r);
                        }
                    }
                }
                RoiSpec::Cells { weight, cells } => {
                    for c in cells {
                        let r = self.cell_id(c);
                        weights[r.0] += weight;
                        members.push(r);
                    }
                }
                RoiSpec::Gaussian {
                    weight,
                    cx,
                    cy,
                    sigma,
                } => {
                    // Membership for discovery metrics: cells within the
                    // half-peak contour of the bump.
                    let half_peak_radius = sigma * (2.0 * 2.0f64.ln()).sqrt();
                    for (r, wv) in weights.iter_mut().enumerate() {
                        let (x, y) = ((r % w.width) as f64, (r / w.width) as f64);
                        let d2 = (x - cx).powi(2) + (y - cy).powi(2);
                        *wv += weight * (-d2 / (2.0 * sigma * sigma)).exp();
                        if d2.sqrt() <= half_peak_radius {
                            members.push(RegionId(r));
                        }
                    }
                }
            }
            members.retain(|r| graph.is_accessible(*r));
            members.sort_unstable();
            members.dedup();
            if !members.is_empty() {
                explicit_rois.push(members);
            }
        }
        let initial_map = InfoMap::new(weights, &graph);
        let _ = initial_map.target_distribution(&graph)?;

        let events: Vec<MapEvent> = w
            .events
            .iter()
            .map(|e| match e {
                EventSpec::Relocate {
                    time,
                    sources,
                    dests,
                } => MapEvent {
                    time: *time,
                    kind: MapEventKind::Relocate {
                        sources: sources.iter().map(|c| self.cell_id(c)).collect(),
                        dests: dests.iter().map(|c| self.cell_id(c)).collect(),
                    },
                },
                EventSpec::Expand {
                    time,
                    sources,
                    spread,
                } => MapEvent {
                    time: *time,
                    kind: MapEventKind::Expand {
                        sources: sources.iter().map(|c| self.cell_id(c)).collect(),
                        spread: *spread,
                    },
                },
                EventSpec::Replace { time, weights } => MapEvent {
                    time: *time,
                    kind: MapEventKind::Replace {
                        weights: weights.clone(),
                    },
                },
            })
            .collect();
        let schedule = MapSchedule::new(events)?;
        for e in schedule.events() {
            if let MapEventKind::Relocate { dests, .. } = &e.kind {
                if let Some(bad) = dests.iter().find(|&&d| graph.is_nofly(d)) {
                    return Err(Error::InvalidConfig {
                        field: "world.event",
                        reason: format!("relocation destination {bad} is a no-fly cell"),
                    });
                }
            }
        }

        let rois = if explicit_rois.is_empty() {
            roi_cells_by_threshold(&initial_map, &graph, w.roi_threshold)
        } else {
            explicit_rois
        };
        Ok(CompiledWorld {
            graph,
            initial_map,
            schedule,
            rois,
        })
    }

    /// Engine swarm config for one seed.
    pub fn swarm_config(&self, seed: u64) -> SwarmConfig {
        SwarmConfig {
            agents: self.swarm.agents,
            r_sense: self.swarm.r_sense.resolve(),
            r_comm: self.swarm.r_comm.resolve(),
            tau_gp: self.swarm.tau_gp,
            tau_p: self.swarm.tau_p,
            t_final: self.swarm.t_final,
            beta: self.swarm.beta,
            planner: self.swarm.planner,
            initial_positions: self
                .swarm
                .initial_positions
                .as_ref()
                .map(|cells| cells.iter().map(|c| self.cell_id(c)).collect()),
            seed,
        }
    }

    /// Engine belief config.
    pub fn belief_config(&self) -> BeliefConfig {
        BeliefConfig {
            kernel: KernelParams {
                lengthscale: self.belief.lengthscale,
                signal_variance: self.belief.signal_variance,
                noise_variance: self.belief.noise_variance,
                prior_mean: self.belief.prior_mean,
            },
            eps: self.belief.eps,
            n_max: self.belief.n_max,
            noise_std: self.belief.noise_std,
        }
    }

    /// Engine policy config.
    pub fn policy_config(&self) -> PolicyConfig {
        PolicyConfig {
            mode: self.policy.mode,
            slem_tol: self.policy.slem_tol,
            slem_max_iters: self.policy.slem_max_iters,
        }
    }
}

/// A sweepable parameter axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Belief refit period.
    TauGp,
    /// Policy rebuild period.
    TauP,
    /// Both periods jointly.
    Tau,
    /// Communication radius.
    RComm,
    /// Sensing radius.
    RSense,
    /// Team size.
    Agents,
    /// UCB exploration weight.
    Beta,
}

impl SweepAxis {
    /// Parses an axis name as written on the command line.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "tau_gp" => Ok(Self::TauGp),
            "tau_p" => Ok(Self::TauP),
            "tau" => Ok(Self::Tau),
            "r_comm" => Ok(Self::RComm),
            "r_sense" => Ok(Self::RSense),
            "agents" => Ok(Self::Agents),
            "beta" => Ok(Self::Beta),
            other => Err(Error::InvalidConfig {
                field: "sweep.axis",
                reason: format!(
                    "unknown axis \"{other}\"; expected one of tau_gp, tau_p, tau, r_comm, r_sense, agents, beta"
                ),
            }),
        }
    }

    /// Axis name used in artifact paths and CSV columns.
    pub fn name(&self) -> &'static str {
        match self {
            Self::TauGp => "tau_gp",
            Self::TauP => "tau_p",
            Self::Tau => "tau",
            Self::RComm => "r_comm",
            Self::RSense => "r_sense",
            Self::Agents => "agents",
            Self::Beta => "beta",
        }
    }

    /// Applies one swept value (as written on the command line) to a config.
    pub fn apply(&self, cfg: &mut ExperimentConfig, value: &str) -> Result<()> {
        let bad_value = |reason: String| Error::InvalidConfig {
            field: "sweep.values",
            reason,
        };
        let parse_u64 = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| bad_value(format!("\"{v}\" is not an integer")))
        };
        let parse_radius = |v: &str| -> Result<RadiusSpec> {
            if v == "global" {
                return Ok(RadiusSpec::Global);
            }
            v.parse::<f64>()
                .map(RadiusSpec::Cells)
                .map_err(|_| bad_value(format!("\"{v}\" is not a radius or \"global\"")))
        };
        match self {
            Self::TauGp => cfg.swarm.tau_gp = parse_u64(value)?,
            Self::TauP => cfg.swarm.tau_p = parse_u64(value)?,
            Self::Tau => {
                let v = parse_u64(value)?;
                cfg.swarm.tau_gp = v;
                cfg.swarm.tau_p = v;
            }
            Self::RComm => cfg.swarm.r_comm = parse_radius(value)?,
            Self::RSense => cfg.swarm.r_sense = parse_radius(value)?,
            Self::Agents => {
                cfg.swarm.agents = parse_u64(value)? as usize;
                // A fixed placement list rarely matches a swept team size;
                // fall back to random distinct placement.
                cfg.swarm.initial_positions = None;
            }
            Self::Beta => {
                cfg.swarm.beta = value
                    .parse::<f64>()
                    .map_err(|_| bad_value(format!("\"{value}\" is not a number")))?
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [world]
        width = 2
        height = 2
        base_weight = 1.0

        [swarm]
        agents = 1
        tau_gp = 5
        tau_p = 5
        t_final = 10

        [belief]
        lengthscale = 1.5
        signal_variance = 1.0
        noise_variance = 0.01

        [run]
        seeds = [0]
        output_dir = "out/minimal"
    "#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.swarm.agents, 1);
        assert_eq!(cfg.swarm.beta, 1.0);
        assert_eq!(cfg.policy.mode, ChainMode::Metropolis);
        assert_eq!(cfg.belief.eps, 1e-6);
        let world = cfg.compile_world().unwrap();
        assert_eq!(world.graph.num_regions(), 4);
        assert!(world.schedule.events().is_empty());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("base_weight = 1.0", "base_weight = 1.0\nbogus = 3");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert!(matches!(err, Error::ConfigParse(_)));
    }

    #[test]
    fn roi_blobs_compile_to_weights_and_sets() {
        let text = r#"
            [world]
            width = 4
            height = 4
            base_weight = 0.1

            [[world.roi]]
            kind = "rect"
            weight = 2.0
            x = 0
            y = 0
            w = 2
            h = 1

            [[world.roi]]
            kind = "cells"
            weight = 5.0
            cells = [[3, 3]]

            [swarm]
            agents = 1
            tau_gp = 5
            tau_p = 5
            t_final = 10

            [belief]
            lengthscale = 1.5
            signal_variance = 1.0
            noise_variance = 0.01

            [run]
            seeds = [0]
            output_dir = "out/t"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let world = cfg.compile_world().unwrap();
        assert_eq!(world.initial_map.weight(RegionId(0)), 2.1);
        assert_eq!(world.initial_map.weight(RegionId(1)), 2.1);
        assert_eq!(world.initial_map.weight(RegionId(15)), 5.1);
        assert_eq!(world.initial_map.weight(RegionId(5)), 0.1);
        assert_eq!(world.rois.len(), 2);
        assert_eq!(world.rois[0], vec![RegionId(0), RegionId(1)]);
        assert_eq!(world.rois[1], vec![RegionId(15)]);
    }

    #[test]
    fn gaussian_blob_adds_peaked_weight() {
        let text = r#"
            [world]
            width = 5
            height = 5
            base_weight = 0.0

            [[world.roi]]
            kind = "gaussian"
            weight = 4.0
            cx = 2.0
            cy = 2.0
            sigma = 1.0

            [swarm]
            agents = 1
            tau_gp = 5
            tau_p = 5
            t_final = 10

            [belief]
            lengthscale = 1.5
            signal_variance = 1.0
            noise_variance = 0.01

            [run]
            seeds = [0]
            output_dir = "out/t"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let world = cfg.compile_world().unwrap();
        let center = RegionId(2 * 5 + 2);
        assert!((world.initial_map.weight(center) - 4.0).abs() < 1e-12);
        assert!(world.initial_map.weight(RegionId(0)) < 0.1);
        assert!(world.rois[0].contains(&center));
    }

    #[test]
    fn global_radius_keyword() {
        let text = MINIMAL.replace("agents = 1", "agents = 1\nr_comm = \"global\"");
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.swarm.r_comm.resolve(), f64::INFINITY);
    }

    #[test]
    fn events_compile_in_order() {
        let text = r#"
            [world]
            width = 3
            height = 1
            base_weight = 1.0

            [[world.event]]
            time = 3
            kind = "relocate"
            sources = [[0, 0]]
            dests = [[2, 0]]

            [[world.event]]
            time = 7
            kind = "expand"
            sources = [[2, 0]]
            spread = 0.25

            [swarm]
            agents = 1
            tau_gp = 5
            tau_p = 5
            t_final = 10

            [belief]
            lengthscale = 1.5
            signal_variance = 1.0
            noise_variance = 0.01

            [run]
            seeds = [0]
            output_dir = "out/t"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let world = cfg.compile_world().unwrap();
        assert_eq!(world.schedule.events().len(), 2);
        assert!(world.schedule.event_at(3).is_some());
        assert!(world.schedule.event_at(4).is_none());
    }

    #[test]
    fn relocation_into_nofly_region_rejected_statically() {
        let text = r#"
            [world]
            width = 3
            height = 1
            base_weight = 1.0
            nofly = [[2, 0]]

            [[world.event]]
            time = 3
            kind = "relocate"
            sources = [[0, 0]]
            dests = [[2, 0]]

            [swarm]
            agents = 1
            tau_gp = 5
            tau_p = 5
            t_final = 10

            [belief]
            lengthscale = 1.5
            signal_variance = 1.0
            noise_variance = 0.01

            [run]
            seeds = [0]
            output_dir = "out/t"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let err = cfg.compile_world().unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidConfig {
                field: "world.event",
                ..
            }
        ));
    }

    #[test]
    fn sweep_axis_parse_and_apply() {
        let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let axis = SweepAxis::parse("tau").unwrap();
        axis.apply(&mut cfg, "42").unwrap();
        assert_eq!(cfg.swarm.tau_gp, 42);
        assert_eq!(cfg.swarm.tau_p, 42);
        let axis = SweepAxis::parse("r_comm").unwrap();
        axis.apply(&mut cfg, "global").unwrap();
        assert_eq!(cfg.swarm.r_comm.resolve(), f64::INFINITY);
        assert!(SweepAxis::parse("nope").is_err());
    }

    #[test]
    fn empty_seeds_named_in_error() {
        let text = MINIMAL.replace("seeds = [0]", "seeds = []");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        match err {
            Error::InvalidConfig { field, .. } => assert_eq!(field, "run.seeds"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
