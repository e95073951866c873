//! Evaluation metrics: regret, belief and empirical errors, KL belief
//! alignment, ROI discovery and coverage times, and map drift.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::engine::StepRecord;
use crate::world::{EnvironmentGraph, InfoMap, RegionId};

/// Floor applied inside logarithms; the epsilon clamp upstream makes it
/// unreachable in practice.
const KL_FLOOR: f64 = 1e-12;

/// L1 distance between two distributions.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Time-averaged regret over steps `1..=k_max`: the running mean of the L1
/// distance between team empirical visitation and the true target.
pub fn regret(records: &[StepRecord], k_max: u64) -> f64 {
    assert!(
        records.iter().any(|r| r.k == k_max),
        "records do not reach step {k_max}"
    );
    let sum: f64 = records
        .iter()
        .filter(|r| r.k >= 1 && r.k <= k_max)
        .map(|r| l1_distance(&r.team_empirical, &r.true_target))
        .sum();
    sum / k_max as f64
}

/// Mismatch between the team's mean belief and the true target.
pub fn belief_error(team_belief: &[f64], true_target: &[f64]) -> f64 {
    l1_distance(team_belief, true_target)
}

/// Deviation of the team empirical visitation from the true target.
pub fn empirical_error(team_empirical: &[f64], true_target: &[f64]) -> f64 {
    l1_distance(team_empirical, true_target)
}

/// Mean KL divergence (natural log) of each agent's belief from the team's
/// arithmetic-mean belief.
pub fn kl_alignment(beliefs: &[&[f64]]) -> f64 {
    let m = beliefs.len();
    assert!(m >= 1, "kl_alignment needs at least one belief");
    let n = beliefs[0].len();
    let mut mean = vec![0.0; n];
    for b in beliefs {
        for (acc, v) in mean.iter_mut().zip(*b) {
            *acc += v / m as f64;
        }
    }
    let mut total = 0.0;
    for b in beliefs {
        let mut kl = 0.0;
        for (p, q) in b.iter().zip(&mean) {
            if *p > 0.0 {
                kl += p * (p / q.max(KL_FLOOR)).ln();
            }
        }
        total += kl.max(0.0);
    }
    total / m as f64
}

/// First step at which any agent stands inside each ROI; `None` if never.
pub fn time_to_roi(records: &[StepRecord], rois: &[Vec<RegionId>]) -> Vec<Option<u64>> {
    let sets: Vec<HashSet<usize>> = rois
        .iter()
        .map(|cells| cells.iter().map(|r| r.0).collect())
        .collect();
    let mut found: Vec<Option<u64>> = vec![None; rois.len()];
    for rec in records {
        for (i, set) in sets.iter().enumerate() {
            if found[i].is_none() && rec.positions.iter().any(|p| set.contains(&p.0)) {
                found[i] = Some(rec.k);
            }
        }
        if found.iter().all(Option::is_some) {
            break;
        }
    }
    found
}

/// First step at which every accessible region has been visited by some
/// agent; `None` if coverage is not reached within the records.
pub fn coverage_time(records: &[StepRecord], graph: &EnvironmentGraph) -> Option<u64> {
    let mut visited = vec![false; graph.num_regions()];
    let mut remaining = graph.accessible().len();
    for rec in records {
        for p in &rec.positions {
            if !visited[p.0] {
                visited[p.0] = true;
                remaining -= 1;
            }
        }
        if remaining == 0 {
            return Some(rec.k);
        }
    }
    None
}

/// Long-run average per-step L1 change of the true target distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSummary {
    /// `(1/K) * sum_k ||rho*_k - rho*_{k-1}||_1`.
    pub v_hat: f64,
}

/// Map drift over a sequence of per-step true targets.
pub fn map_drift(true_targets: &[Vec<f64>]) -> DriftSummary {
    if true_targets.len() <= 1 {
        return DriftSummary { v_hat: 0.0 };
    }
    let k = (true_targets.len() - 1) as f64;
    let sum: f64 = true_targets
        .windows(2)
        .map(|w| l1_distance(&w[1], &w[0]))
        .sum();
    DriftSummary { v_hat: sum / k }
}

/// ROI cell sets derived from a weight threshold on the initial map: cells at
/// or above the given quantile of accessible weights, grouped into 4-connected
/// components.
pub fn roi_cells_by_threshold(
    map: &InfoMap,
    graph: &EnvironmentGraph,
    quantile: f64,
) -> Vec<Vec<RegionId>> {
    assert!((0.0..=1.0).contains(&quantile), "quantile outside [0, 1]");
    let mut weights: Vec<f64> = graph.accessible().iter().map(|&r| map.weight(r)).collect();
    weights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((weights.len() - 1) as f64 * quantile).floor() as usize;
    let threshold = weights[idx];
    let in_roi: Vec<bool> = (0..graph.num_regions())
        .map(|r| {
            let r = RegionId(r);
            graph.is_accessible(r) && map.weight(r) >= threshold && map.weight(r) > 0.0
        })
        .collect();

    let mut seen = vec![false; graph.num_regions()];
    let mut rois = Vec::new();
    for start in 0..graph.num_regions() {
        if !in_roi[start] || seen[start] {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = std::collections::VecDeque::from([RegionId(start)]);
        seen[start] = true;
        while let Some(r) = queue.pop_front() {
            component.push(r);
            for &j in graph.neighbors(r) {
                if in_roi[j.0] && !seen[j.0] {
                    seen[j.0] = true;
                    queue.push_back(j);
                }
            }
        }
        component.sort_unstable();
        rois.push(component);
    }
    rois
}

/// One row of the per-step metrics CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRow {
    /// Step index.
    pub k: u64,
    /// Running time-averaged regret (0 at step 0).
    pub regret_running: f64,
    /// Team empirical L1 error at this step.
    pub empirical_error: f64,
    /// Team belief L1 error at this step.
    pub belief_error: f64,
    /// Mean KL divergence of agent beliefs from the team mean.
    pub kl_alignment: f64,
}

/// End-of-run scalars, embedded into `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// First step of full accessible coverage, if reached.
    pub coverage_time: Option<u64>,
    /// First step each ROI was reached, aligned with the ROI list.
    pub roi_discovery: Vec<Option<u64>>,
    /// Empirical map drift over the run.
    pub map_drift: f64,
    /// Time-averaged regret at the final step.
    pub final_regret: f64,
    /// Team empirical L1 error at the final step.
    pub final_empirical_error: f64,
    /// Team belief L1 error at the final step.
    pub final_belief_error: f64,
    /// Time-averaged KL alignment over the whole run.
    pub mean_kl_alignment: f64,
    /// True target at the final step (for heatmaps).
    pub final_true_target: Vec<f64>,
    /// Team mean belief at the final step.
    pub final_team_belief: Vec<f64>,
    /// Team empirical distribution at the final step.
    pub final_team_empirical: Vec<f64>,
}

/// Streaming consumer of step records producing rows and a summary.
pub struct MetricsAccumulator {
    rois: Vec<Vec<RegionId>>,
    roi_sets: Vec<HashSet<usize>>,
    roi_found: Vec<Option<u64>>,
    visited: Vec<bool>,
    unvisited: usize,
    coverage: Option<u64>,
    regret_sum: f64,
    kl_sum: f64,
    steps: u64,
    prev_target: Option<Vec<f64>>,
    drift_sum: f64,
    rows: Vec<MetricsRow>,
    last: Option<StepRecord>,
}

impl MetricsAccumulator {
    /// New accumulator for a world and its ROI cell sets.
    pub fn new(graph: &EnvironmentGraph, rois: Vec<Vec<RegionId>>) -> Self {
        Self {
            roi_sets: rois
                .iter()
                .map(|cells| cells.iter().map(|r| r.0).collect())
                .collect(),
            roi_found: vec![None; rois.len()],
            rois,
            visited: vec![false; graph.num_regions()],
            unvisited: graph.accessible().len(),
            coverage: None,
            regret_sum: 0.0,
            kl_sum: 0.0,
            steps: 0,
            prev_target: None,
            drift_sum: 0.0,
            rows: Vec::new(),
            last: None,
        }
    }

    /// ROI cell sets this accumulator tracks.
    pub fn rois(&self) -> &[Vec<RegionId>] {
        &self.rois
    }

    /// Consumes one record (records must arrive in step order).
    pub fn push(&mut self, rec: &StepRecord) {
        let emp_err = empirical_error(&rec.team_empirical, &rec.true_target);
        let bel_err = belief_error(&rec.team_belief, &rec.true_target);
        if rec.k >= 1 {
            self.regret_sum += emp_err;
        }
        let regret_running = if rec.k >= 1 {
            self.regret_sum / rec.k as f64
        } else {
            0.0
        };
        self.kl_sum += rec.kl_alignment;
        self.steps += 1;

        for p in &rec.positions {
            if !self.visited[p.0] {
                self.visited[p.0] = true;
                self.unvisited -= 1;
            }
        }
        if self.coverage.is_none() && self.unvisited == 0 {
            self.coverage = Some(rec.k);
        }
        for (i, set) in self.roi_sets.iter().enumerate() {
            if self.roi_found[i].is_none() && rec.positions.iter().any(|p| set.contains(&p.0)) {
                self.roi_found[i] = Some(rec.k);
            }
        }
        if let Some(prev) = &self.prev_target {
            self.drift_sum += l1_distance(&rec.true_target, prev);
        }
        self.prev_target = Some(rec.true_target.clone());

        self.rows.push(MetricsRow {
            k: rec.k,
            regret_running,
            empirical_error: emp_err,
            belief_error: bel_err,
            kl_alignment: rec.kl_alignment,
        });
        self.last = Some(rec.clone());
    }

    /// Finalizes rows and summary. Panics if no record was pushed.
    pub fn finish(self) -> (Vec<MetricsRow>, RunSummary) {
        let last = self.last.expect("no records were pushed");
        let last_row = *self.rows.last().unwrap();
        let drift = if self.steps > 1 {
            self.drift_sum / (self.steps - 1) as f64
        } else {
            0.0
        };
        let summary = RunSummary {
            coverage_time: self.coverage,
            roi_discovery: self.roi_found,
            map_drift: drift,
            final_regret: last_row.regret_running,
            final_empirical_error: last_row.empirical_error,
            final_belief_error: last_row.belief_error,
            mean_kl_alignment: self.kl_sum / self.steps as f64,
            final_true_target: last.true_target,
            final_team_belief: last.team_belief,
            final_team_empirical: last.team_empirical,
        };
        (self.rows, summary)
    }
}
