//! Synchronous multi-agent simulation loop.
//!
//! Each step runs, for all agents at once: sense, exchange with communication
//! neighbors, scheduled belief refit, scheduled policy rebuild, sampled
//! transition, map evolution, visitation bookkeeping. Step `k` of a run is
//! the state after `k` transitions; record 0 is the freshly initialized swarm
//! with its uniform prior belief. Observations taken while processing step
//! `k+1` are made at the step-`k` positions and read the step-`k` map, so a
//! map event at time `t` changes the target of record `t` and is first seen
//! by sensors in the following step.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::baselines::{greedy_step, uniform_step, PlannerKind};
use crate::belief::{gp_ucb, BeliefMap, Dataset, KernelParams, Observation};
use crate::error::{Error, Result};
use crate::metrics::kl_alignment;
use crate::policy::{build_chain, PolicyConfig, TransitionMatrix};
use crate::world::{EnvironmentGraph, InfoMap, MapSchedule, RegionId};

/// Swarm-level run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    /// Number of agents M.
    pub agents: usize,
    /// Sensing radius in cell units.
    pub r_sense: f64,
    /// Communication radius in cell units (`f64::INFINITY` for global).
    pub r_comm: f64,
    /// Steps between belief refits.
    pub tau_gp: u64,
    /// Steps between policy rebuilds.
    pub tau_p: u64,
    /// Horizon: a run produces records `0..t_final`.
    pub t_final: u64,
    /// UCB exploration weight.
    pub beta: f64,
    /// Transition rule shared by all agents.
    pub planner: PlannerKind,
    /// Starting cells; sampled distinct at random when absent.
    pub initial_positions: Option<Vec<RegionId>>,
    /// Master seed; every agent derives an independent stream from it.
    pub seed: u64,
}

/// Belief-side parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefConfig {
    /// GP kernel hyperparameters.
    pub kernel: KernelParams,
    /// Floor applied before normalizing the UCB map.
    pub eps: f64,
    /// Dataset growth cap (0 disables).
    pub n_max: usize,
    /// Standard deviation of simulated sensor noise.
    pub noise_std: f64,
}

/// Per-agent simulation state.
#[derive(Debug, Clone)]
pub struct AgentState {
    /// Agent id in `0..M`.
    pub id: usize,
    /// Current region.
    pub position: RegionId,
    /// Accumulated observations (own and received).
    pub dataset: Dataset,
    /// Current belief map.
    pub belief: BeliefMap,
    /// Current transition policy.
    pub policy: TransitionMatrix,
    /// Visits per region, including the initial placement.
    pub visit_counts: Vec<u64>,
}

impl AgentState {
    /// Empirical visitation distribution after `k` steps: counts over `k+1`.
    pub fn empirical(&self, k: u64) -> Vec<f64> {
        let denom = (k + 1) as f64;
        self.visit_counts
            .iter()
            .map(|&c| c as f64 / denom)
            .collect()
    }
}

/// Snapshot of the swarm at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Step index.
    pub k: u64,
    /// Per-agent positions at this step.
    pub positions: Vec<RegionId>,
    /// Team empirical visitation distribution.
    pub team_empirical: Vec<f64>,
    /// Team mean belief target distribution.
    pub team_belief: Vec<f64>,
    /// True target distribution at this step.
    pub true_target: Vec<f64>,
    /// Mean KL divergence of each agent's belief from the team mean.
    pub kl_alignment: f64,
}

/// Noisy observations of every region within the sensing ball of the agent.
pub fn sense<R: rand::Rng + ?Sized>(
    graph: &EnvironmentGraph,
    map: &InfoMap,
    agent: &AgentState,
    k: u64,
    r_sense: f64,
    noise_std: f64,
    rng: &mut R,
) -> Vec<Observation> {
    let noise = Normal::new(0.0, noise_std).expect("noise_std must be finite and nonnegative");
    graph
        .ball(agent.position, r_sense)
        .into_iter()
        .map(|r| Observation {
            region: r,
            value: map.weight(r) + noise.sample(rng),
            time: k,
            source: agent.id,
        })
        .collect()
}

/// Ids of agents within communication range of agent `m` (excluding `m`).
pub fn comm_neighbors(
    agents: &[AgentState],
    m: usize,
    r_comm: f64,
    graph: &EnvironmentGraph,
) -> Vec<usize> {
    agents
        .iter()
        .filter(|a| a.id != m && graph.distance(agents[m].position, a.position) <= r_comm)
        .map(|a| a.id)
        .collect()
}

/// Single-hop exchange: each agent appends its own staged observations and
/// the staged observations of every direct neighbor, then enforces the cap.
/// Nothing is relayed further within a step.
pub fn exchange(
    agents: &mut [AgentState],
    staged: &[Vec<Observation>],
    r_comm: f64,
    graph: &EnvironmentGraph,
    n_max: usize,
) {
    let neighbor_sets: Vec<Vec<usize>> = (0..agents.len())
        .map(|m| comm_neighbors(agents, m, r_comm, graph))
        .collect();
    for (m, agent) in agents.iter_mut().enumerate() {
        agent.dataset.extend_from(&staged[m]);
        for &l in &neighbor_sets[m] {
            agent.dataset.extend_from(&staged[l]);
        }
        agent.dataset.cap_to_recent(n_max);
    }
}

/// The simulation engine: world, schedule, team, and clocks.
#[derive(Debug, Clone)]
pub struct SwarmEngine {
    graph: EnvironmentGraph,
    map: InfoMap,
    schedule: MapSchedule,
    swarm: SwarmConfig,
    belief_cfg: BeliefConfig,
    policy_cfg: PolicyConfig,
    agents: Vec<AgentState>,
    rngs: Vec<ChaCha8Rng>,
    k: u64,
}

impl SwarmEngine {
    /// Validates the configuration and initializes the swarm: uniform prior
    /// beliefs, a shared initial policy built from them, and either the
    /// configured or randomly sampled distinct starting cells.
    pub fn new(
        graph: EnvironmentGraph,
        initial_map: InfoMap,
        schedule: MapSchedule,
        swarm: SwarmConfig,
        belief_cfg: BeliefConfig,
        policy_cfg: PolicyConfig,
    ) -> Result<Self> {
        validate_configs(&graph, &swarm, &belief_cfg)?;
        // Fail early if the initial map has no accessible mass.
        let _ = initial_map.target_distribution(&graph)?;

        // Stream 0 belongs to the engine (initial placement); agent m uses
        // stream m + 1 so trajectories do not depend on iteration order.
        let mut placement_rng = ChaCha8Rng::seed_from_u64(swarm.seed);
        placement_rng.set_stream(0);
        let positions = match &swarm.initial_positions {
            Some(p) => p.clone(),
            None => {
                let mut pool = graph.accessible().to_vec();
                (0..swarm.agents)
                    .map(|_| {
                        let i = rand::Rng::gen_range(&mut placement_rng, 0..pool.len());
                        pool.swap_remove(i)
                    })
                    .collect()
            }
        };

        let belief = BeliefMap::uniform(&graph);
        let policy = build_chain(&graph, &belief.rho, &policy_cfg)?;
        let n = graph.num_regions();
        let agents: Vec<AgentState> = positions
            .iter()
            .enumerate()
            .map(|(id, &position)| {
                let mut visit_counts = vec![0u64; n];
                visit_counts[position.0] = 1;
                AgentState {
                    id,
                    position,
                    dataset: Dataset::new(),
                    belief: belief.clone(),
                    policy: policy.clone(),
                    visit_counts,
                }
            })
            .collect();
        let rngs = (0..swarm.agents)
            .map(|m| {
                let mut rng = ChaCha8Rng::seed_from_u64(swarm.seed);
                rng.set_stream(m as u64 + 1);
                rng
            })
            .collect();

        Ok(Self {
            graph,
            map: initial_map,
            schedule,
            swarm,
            belief_cfg,
            policy_cfg,
            agents,
            rngs,
            k: 0,
        })
    }

    /// Environment graph.
    pub fn graph(&self) -> &EnvironmentGraph {
        &self.graph
    }

    /// Current information map.
    pub fn map(&self) -> &InfoMap {
        &self.map
    }

    /// Current step index (number of completed transitions).
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Agent states.
    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    /// Belief configuration in effect.
    pub fn belief_config(&self) -> &BeliefConfig {
        &self.belief_cfg
    }

    /// Record of the current state; record 0 is the initialized swarm.
    pub fn record(&self) -> Result<StepRecord> {
        let n = self.graph.num_regions();
        let m = self.agents.len() as f64;
        let mut team_empirical = vec![0.0; n];
        let mut team_belief = vec![0.0; n];
        for a in &self.agents {
            let emp = a.empirical(self.k);
            for r in 0..n {
                team_empirical[r] += emp[r] / m;
                team_belief[r] += a.belief.rho[r] / m;
            }
        }
        let beliefs: Vec<&[f64]> = self
            .agents
            .iter()
            .map(|a| a.belief.rho.as_slice())
            .collect();
        Ok(StepRecord {
            k: self.k,
            positions: self.agents.iter().map(|a| a.position).collect(),
            team_empirical,
            team_belief,
            true_target: self.map.target_distribution(&self.graph)?,
            kl_alignment: kl_alignment(&beliefs),
        })
    }

    /// Advances the simulation by one step and returns the new record.
    ///
    /// Panics if called past the horizon; `run_with_sink` never does.
    pub fn step(&mut self) -> Result<StepRecord> {
        let k_new = self.k + 1;
        assert!(k_new < self.swarm.t_final, "stepped past the horizon");
        self.step_inner(k_new).map_err(|e| e.at_step(k_new))
    }

    fn step_inner(&mut self, k_new: u64) -> Result<StepRecord> {
        // Sense at the current positions, reading the current map.
        let staged: Vec<Vec<Observation>> = self
            .agents
            .iter()
            .enumerate()
            .map(|(m, agent)| {
                sense(
                    &self.graph,
                    &self.map,
                    agent,
                    self.k,
                    self.swarm.r_sense,
                    self.belief_cfg.noise_std,
                    &mut self.rngs[m],
                )
            })
            .collect();
        exchange(
            &mut self.agents,
            &staged,
            self.swarm.r_comm,
            &self.graph,
            self.belief_cfg.n_max,
        );

        if k_new.is_multiple_of(self.swarm.tau_gp) {
            for agent in &mut self.agents {
                let (_, belief) = gp_ucb(
                    &agent.dataset,
                    &self.belief_cfg.kernel,
                    self.swarm.beta,
                    self.belief_cfg.eps,
                    &self.graph,
                )?;
                agent.belief = belief;
            }
        }
        if k_new.is_multiple_of(self.swarm.tau_p) && self.swarm.planner == PlannerKind::Ergodic {
            for agent in &mut self.agents {
                agent.policy = build_chain(&self.graph, &agent.belief.rho, &self.policy_cfg)?;
            }
        }

        for (m, agent) in self.agents.iter_mut().enumerate() {
            let next = match self.swarm.planner {
                PlannerKind::Ergodic => agent.policy.sample_next(agent.position, &mut self.rngs[m]),
                PlannerKind::GreedyUcb => greedy_step(agent, &self.graph),
                PlannerKind::UniformWalk => uniform_step(agent, &self.graph, &mut self.rngs[m]),
            };
            agent.position = next;
            agent.visit_counts[next.0] += 1;
        }

        self.map = self.map.step(&self.schedule, k_new, &self.graph)?;
        self.k = k_new;
        self.record()
    }

    /// Runs to the horizon, streaming every record (including record 0).
    pub fn run_with_sink(&mut self, mut sink: impl FnMut(&StepRecord)) -> Result<()> {
        assert_eq!(self.k, 0, "run_with_sink must start from a fresh engine");
        let first = self.record()?;
        sink(&first);
        while self.k + 1 < self.swarm.t_final {
            let rec = self.step()?;
            sink(&rec);
        }
        Ok(())
    }

    /// Runs to the horizon, collecting all records.
    pub fn run_collect(&mut self) -> Result<Vec<StepRecord>> {
        let mut out = Vec::with_capacity(self.swarm.t_final as usize);
        self.run_with_sink(|r| out.push(r.clone()))?;
        Ok(out)
    }
}

fn validate_configs(
    graph: &EnvironmentGraph,
    swarm: &SwarmConfig,
    belief: &BeliefConfig,
) -> Result<()> {
    if swarm.agents < 1 {
        return Err(Error::InvalidConfig {
            field: "swarm.agents",
            reason: "at least one agent is required".into(),
        });
    }
    if swarm.tau_gp < 1 {
        return Err(Error::InvalidConfig {
            field: "swarm.tau_gp",
            reason: "belief update period must be >= 1".into(),
        });
    }
    if swarm.tau_p < 1 {
        return Err(Error::InvalidConfig {
            field: "swarm.tau_p",
            reason: "policy update period must be >= 1".into(),
        });
    }
    if swarm.t_final < 1 {
        return Err(Error::InvalidConfig {
            field: "swarm.t_final",
            reason: "horizon must be >= 1".into(),
        });
    }
    if swarm.r_sense.is_nan() || swarm.r_sense < 0.0 {
        return Err(Error::InvalidConfig {
            field: "swarm.r_sense",
            reason: format!("sensing radius must be nonnegative, got {}", swarm.r_sense),
        });
    }
    if swarm.r_comm.is_nan() || swarm.r_comm < 0.0 {
        return Err(Error::InvalidConfig {
            field: "swarm.r_comm",
            reason: format!(
                "communication radius must be nonnegative, got {}",
                swarm.r_comm
            ),
        });
    }
    if !swarm.beta.is_finite() || swarm.beta < 0.0 {
        return Err(Error::InvalidConfig {
            field: "swarm.beta",
            reason: format!("beta must be finite and nonnegative, got {}", swarm.beta),
        });
    }
    if let Some(positions) = &swarm.initial_positions {
        if positions.len() != swarm.agents {
            return Err(Error::InvalidConfig {
                field: "swarm.initial_positions",
                reason: format!(
                    "{} positions given for {} agents",
                    positions.len(),
                    swarm.agents
                ),
            });
        }
        if let Some(bad) = positions
            .iter()
            .find(|&&p| p.0 >= graph.num_regions() || !graph.is_accessible(p))
        {
            return Err(Error::InvalidConfig {
                field: "swarm.initial_positions",
                reason: format!("position {} is outside the accessible world", bad),
            });
        }
    } else if swarm.agents > graph.accessible().len() {
        return Err(Error::InvalidConfig {
            field: "swarm.agents",
            reason: format!(
                "{} agents cannot occupy distinct cells among {} accessible",
                swarm.agents,
                graph.accessible().len()
            ),
        });
    }
    belief.kernel.validate("belief.kernel")?;
    if belief.eps.is_nan() || belief.eps <= 0.0 {
        return Err(Error::InvalidConfig {
            field: "belief.eps",
            reason: format!("epsilon floor must be positive, got {}", belief.eps),
        });
    }
    if !belief.noise_std.is_finite() || belief.noise_std < 0.0 {
        return Err(Error::InvalidConfig {
            field: "belief.noise_std",
            reason: format!(
                "sensor noise std must be finite and nonnegative, got {}",
                belief.noise_std
            ),
        });
    }
    Ok(())
}
