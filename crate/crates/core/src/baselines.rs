//! Comparison planners sharing the engine's sensing and communication
//! pipeline; only the transition rule differs between them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::AgentState;
use crate::world::{EnvironmentGraph, RegionId};

/// Transition rule used by every agent of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    /// Sample from the Markov-chain policy tracking the belief target.
    Ergodic,
    /// Move to the neighboring cell with the highest UCB value.
    GreedyUcb,
    /// Move uniformly among the current cell and its neighbors.
    UniformWalk,
}

/// One-step greedy ascent on the agent's UCB map over `N(x) + {x}`.
/// Ties break toward the lowest region index.
pub fn greedy_step(agent: &AgentState, graph: &EnvironmentGraph) -> RegionId {
    let mut candidates: Vec<RegionId> = graph.neighbors(agent.position).to_vec();
    candidates.push(agent.position);
    candidates.sort_unstable();
    let mut best = candidates[0];
    let mut best_val = agent.belief.phi_ucb[best.0];
    for &c in &candidates[1..] {
        let v = agent.belief.phi_ucb[c.0];
        if v > best_val {
            best = c;
            best_val = v;
        }
    }
    best
}

/// Uniform draw over the current cell and its neighbors.
pub fn uniform_step<R: Rng + ?Sized>(
    agent: &AgentState,
    graph: &EnvironmentGraph,
    rng: &mut R,
) -> RegionId {
    let mut candidates: Vec<RegionId> = graph.neighbors(agent.position).to_vec();
    candidates.push(agent.position);
    candidates.sort_unstable();
    candidates[rng.gen_range(0..candidates.len())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{BeliefMap, Dataset};
    use crate::policy::{build_chain, stationary, PolicyConfig, TransitionMatrix};
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(w: usize, h: usize) -> EnvironmentGraph {
        EnvironmentGraph::build_grid(w, h, &[]).unwrap()
    }

    fn agent_with_phi(graph: &EnvironmentGraph, position: RegionId, phi: Vec<f64>) -> AgentState {
        let mut belief = BeliefMap::uniform(graph);
        belief.phi_ucb = phi;
        let policy = build_chain(graph, &belief.rho, &PolicyConfig::default()).unwrap();
        let mut visit_counts = vec![0; graph.num_regions()];
        visit_counts[position.0] = 1;
        AgentState {
            id: 0,
            position,
            dataset: Dataset::new(),
            belief,
            policy,
            visit_counts,
        }
    }

    #[test]
    fn greedy_breaks_ties_toward_lowest_index() {
        let g = grid(3, 3);
        let agent = agent_with_phi(&g, RegionId(4), vec![1.0; 9]);
        assert_eq!(greedy_step(&agent, &g), RegionId(1));
    }

    #[test]
    fn greedy_takes_the_strict_maximum() {
        let g = grid(3, 3);
        let mut phi = vec![1.0; 9];
        phi[7] = 3.0;
        let agent = agent_with_phi(&g, RegionId(4), phi);
        assert_eq!(greedy_step(&agent, &g), RegionId(7));
    }

    #[test]
    fn greedy_on_known_unimodal_map_is_absorbing() {
        // UCB equal to a single-peak map: the greedy walker climbs to the
        // peak and then never leaves it.
        let g = grid(4, 4);
        let peak = 10usize;
        let phi: Vec<f64> = (0..16)
            .map(|r| {
                let (x, y) = (r % 4, r / 4);
                let (px, py) = (peak % 4, peak / 4);
                10.0 - ((x as f64 - px as f64).abs() + (y as f64 - py as f64).abs())
            })
            .collect();
        let mut agent = agent_with_phi(&g, RegionId(0), phi);
        for _ in 0..12 {
            agent.position = greedy_step(&agent, &g);
        }
        assert_eq!(agent.position, RegionId(peak));
        assert_eq!(greedy_step(&agent, &g), RegionId(peak));
    }

    #[test]
    fn uniform_step_degree_one_is_a_coin_flip() {
        let g = grid(2, 1);
        let agent = agent_with_phi(&g, RegionId(0), vec![1.0; 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let stays = (0..n)
            .filter(|_| uniform_step(&agent, &g, &mut rng) == RegionId(0))
            .count();
        let freq = stays as f64 / n as f64;
        let sigma = (0.25f64 / n as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn uniform_step_frequencies_match_uniform() {
        let g = grid(3, 3);
        let agent = agent_with_phi(&g, RegionId(4), vec![1.0; 9]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000usize;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..n {
            *counts
                .entry(uniform_step(&agent, &g, &mut rng))
                .or_insert(0usize) += 1;
        }
        let p = 0.2;
        for (_, c) in counts {
            let freq = c as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 3.0 * sigma, "freq {freq}");
        }
    }

    #[test]
    fn lazy_uniform_walk_visits_degree_proportionally() {
        // On a path graph the stationary distribution of the uniform
        // stay-or-move walk weights each cell by degree + 1, not uniformly.
        let g = grid(3, 1);
        let mut p = DMatrix::zeros(3, 3);
        for i in 0..3 {
            let mut cands: Vec<usize> = g.neighbors(RegionId(i)).iter().map(|r| r.0).collect();
            cands.push(i);
            for j in cands.iter() {
                p[(*j, i)] = 1.0 / cands.len() as f64;
            }
        }
        let pi = stationary(&TransitionMatrix::from_dense(p).unwrap()).unwrap();
        let expect = [2.0 / 7.0, 3.0 / 7.0, 2.0 / 7.0];
        for (a, b) in pi.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10);
        }

        let agent = agent_with_phi(&g, RegionId(0), vec![1.0; 3]);
        let mut walker = agent;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut counts = [0u64; 3];
        let steps = 200_000;
        for _ in 0..steps {
            walker.position = uniform_step(&walker, &g, &mut rng);
            counts[walker.position.0] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / steps as f64;
            assert!((freq - expect[i]).abs() < 0.01, "cell {i}: {freq}");
        }
    }
}
