//! Discretized environment: grid-induced region graph with no-fly exclusions
//! and the exogenous, time-varying information map.
//!
//! Regions are grid cells indexed row-major. No-fly cells stay in the index
//! space but have every incident edge removed, so an agent can never enter or
//! leave them. The information map assigns each region a nonnegative weight;
//! normalizing the weights over accessible regions yields the true target
//! spatial distribution the swarm is asked to track.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a region (grid cell), row-major: `index = y * width + x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(pub usize);

impl RegionId {
    /// Raw index.
    pub fn index(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for RegionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// Undirected region graph induced by a rectangular grid with no-fly cells.
///
/// Edges connect orthogonally adjacent accessible cells (4-connectivity).
/// The accessible subgraph is guaranteed connected by construction.
#[derive(Debug, Clone)]
pub struct EnvironmentGraph {
    width: usize,
    height: usize,
    coords: Vec<[f64; 2]>,
    neighbors: Vec<Vec<RegionId>>,
    nofly: Vec<bool>,
    accessible: Vec<RegionId>,
}

impl EnvironmentGraph {
    /// Builds the graph for a `width` x `height` grid, isolating `nofly` cells.
    ///
    /// Fails with [`Error::AllBlocked`] if no cell remains accessible and with
    /// [`Error::DisconnectedWorld`] if the accessible cells do not form a
    /// single 4-connected component.
    pub fn build_grid(width: usize, height: usize, nofly: &[RegionId]) -> Result<Self> {
        assert!(width >= 1 && height >= 1, "grid must be at least 1x1");
        let n = width * height;
        let mut nofly_mask = vec![false; n];
        for r in nofly {
            assert!(r.0 < n, "no-fly region {} outside grid", r);
            nofly_mask[r.0] = true;
        }

        // Cell centers in cell units; orthogonal neighbors are distance 1 apart.
        let coords: Vec<[f64; 2]> = (0..n)
            .map(|r| {
                let x = (r % width) as f64 + 0.5;
                let y = (r / width) as f64 + 0.5;
                [x, y]
            })
            .collect();

        let mut neighbors: Vec<Vec<RegionId>> = vec![Vec::new(); n];
        for r in 0..n {
            if nofly_mask[r] {
                continue;
            }
            let (x, y) = (r % width, r / width);
            let push = |nx: usize, ny: usize, out: &mut Vec<RegionId>| {
                let j = ny * width + nx;
                if !nofly_mask[j] {
                    out.push(RegionId(j));
                }
            };
            if x > 0 {
                push(x - 1, y, &mut neighbors[r]);
            }
            if x + 1 < width {
                push(x + 1, y, &mut neighbors[r]);
            }
            if y > 0 {
                push(x, y - 1, &mut neighbors[r]);
            }
            if y + 1 < height {
                push(x, y + 1, &mut neighbors[r]);
            }
            neighbors[r].sort_unstable();
        }

        let accessible: Vec<RegionId> = (0..n).filter(|&r| !nofly_mask[r]).map(RegionId).collect();
        if accessible.is_empty() {
            return Err(Error::AllBlocked);
        }

        // BFS connectivity check over the accessible subgraph.
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[accessible[0].0] = true;
        queue.push_back(accessible[0]);
        let mut reached = 0usize;
        while let Some(r) = queue.pop_front() {
            reached += 1;
            for &j in &neighbors[r.0] {
                if !seen[j.0] {
                    seen[j.0] = true;
                    queue.push_back(j);
                }
            }
        }
        if reached != accessible.len() {
            return Err(Error::DisconnectedWorld {
                accessible: accessible.len(),
                reached,
            });
        }

        Ok(Self {
            width,
            height,
            coords,
            neighbors,
            nofly: nofly_mask,
            accessible,
        })
    }

    /// Grid width in cells.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Grid height in cells.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Total number of regions including no-fly cells.
    pub fn num_regions(&self) -> usize {
        self.coords.len()
    }

    /// Cell-center coordinates of a region, in cell units.
    pub fn coords(&self, r: RegionId) -> [f64; 2] {
        self.coords[r.0]
    }

    /// Euclidean distance between two region centers.
    pub fn distance(&self, a: RegionId, b: RegionId) -> f64 {
        let pa = self.coords[a.0];
        let pb = self.coords[b.0];
        ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt()
    }

    /// Accessible graph neighbors of `r` (empty for no-fly cells).
    pub fn neighbors(&self, r: RegionId) -> &[RegionId] {
        &self.neighbors[r.0]
    }

    /// Degree of `r` in the accessible subgraph.
    pub fn degree(&self, r: RegionId) -> usize {
        self.neighbors[r.0].len()
    }

    /// Maximum degree over accessible regions.
    pub fn max_degree(&self) -> usize {
        self.accessible
            .iter()
            .map(|&r| self.degree(r))
            .max()
            .unwrap_or(0)
    }

    /// Whether `r` is a no-fly cell.
    pub fn is_nofly(&self, r: RegionId) -> bool {
        self.nofly[r.0]
    }

    /// Whether `r` is accessible.
    pub fn is_accessible(&self, r: RegionId) -> bool {
        !self.nofly[r.0]
    }

    /// Accessible regions in index order.
    pub fn accessible(&self) -> &[RegionId] {
        &self.accessible
    }

    /// Number of undirected edges in the accessible subgraph.
    pub fn num_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Length of the grid diagonal in cell units; any radius at least this
    /// large makes sensing or communication global.
    pub fn diagonal(&self) -> f64 {
        ((self.width as f64).powi(2) + (self.height as f64).powi(2)).sqrt()
    }

    /// Accessible regions within Euclidean distance `delta` of `center`
    /// (always contains `center` itself).
    pub fn ball(&self, center: RegionId, delta: f64) -> Vec<RegionId> {
        debug_assert!(self.is_accessible(center), "ball center must be accessible");
        self.accessible
            .iter()
            .copied()
            .filter(|&r| self.distance(center, r) <= delta)
            .collect()
    }
}

/// Per-region nonnegative information weights.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoMap {
    weights: Vec<f64>,
}

impl InfoMap {
    /// Wraps a weight vector. Panics on negative or non-finite entries or a
    /// length mismatch; those are programming errors, not runtime conditions.
    pub fn new(weights: Vec<f64>, graph: &EnvironmentGraph) -> Self {
        assert_eq!(weights.len(), graph.num_regions(), "weight length mismatch");
        assert!(
            weights.iter().all(|w| w.is_finite() && *w >= 0.0),
            "weights must be finite and nonnegative"
        );
        Self { weights }
    }

    /// Uniform weight 1 on every region.
    pub fn uniform(graph: &EnvironmentGraph) -> Self {
        Self {
            weights: vec![1.0; graph.num_regions()],
        }
    }

    /// Weight of one region.
    pub fn weight(&self, r: RegionId) -> f64 {
        self.weights[r.0]
    }

    /// All weights, indexed by region.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True target spatial distribution: weights normalized over accessible
    /// regions, zero mass on no-fly cells.
    pub fn target_distribution(&self, graph: &EnvironmentGraph) -> Result<Vec<f64>> {
        let total: f64 = graph.accessible().iter().map(|&r| self.weights[r.0]).sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let mut rho = vec![0.0; self.weights.len()];
        for &r in graph.accessible() {
            rho[r.0] = self.weights[r.0] / total;
        }
        Ok(rho)
    }

    /// Applies the scheduled event at step `k`, if any, returning the new map.
    /// Steps without a scheduled event return the map unchanged.
    pub fn step(
        &self,
        schedule: &MapSchedule,
        k: u64,
        graph: &EnvironmentGraph,
    ) -> Result<InfoMap> {
        let Some(event) = schedule.event_at(k) else {
            return Ok(self.clone());
        };
        let mut w = self.weights.clone();
        match &event.kind {
            MapEventKind::Relocate { sources, dests } => {
                if dests.is_empty() {
                    return Err(Error::InvalidEvent {
                        time: event.time,
                        reason: "relocation has no destination cells".into(),
                    });
                }
                if let Some(bad) = dests.iter().find(|&&d| graph.is_nofly(d)) {
                    return Err(Error::InvalidEvent {
                        time: event.time,
                        reason: format!("relocation destination {} is a no-fly cell", bad),
                    });
                }
                // Move the full source mass, split equally over destinations.
                // Overlapping source/destination cells are resolved against the
                // pre-event snapshot: zero first, then deposit.
                let mass: f64 = sources.iter().map(|&s| self.weights[s.0]).sum();
                for &s in sources {
                    w[s.0] = 0.0;
                }
                let share = mass / dests.len() as f64;
                for &d in dests {
                    w[d.0] += share;
                }
            }
            MapEventKind::Expand { sources, spread } => {
                // Growth, not diffusion: each accessible neighbor of a source
                // gains spread * w(source); the source keeps its weight.
                for &s in sources {
                    let gain = spread * self.weights[s.0];
                    for &j in graph.neighbors(s) {
                        w[j.0] += gain;
                    }
                }
            }
            MapEventKind::Replace { weights } => {
                if weights.len() != w.len() {
                    return Err(Error::InvalidEvent {
                        time: event.time,
                        reason: format!(
                            "replacement weight vector has length {}, expected {}",
                            weights.len(),
                            w.len()
                        ),
                    });
                }
                if weights.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidEvent {
                        time: event.time,
                        reason: "replacement weights must be finite and nonnegative".into(),
                    });
                }
                let acc_sum: f64 = graph.accessible().iter().map(|&r| weights[r.0]).sum();
                if acc_sum <= 0.0 {
                    return Err(Error::InvalidEvent {
                        time: event.time,
                        reason: "replacement weights are all zero on accessible regions".into(),
                    });
                }
                w.copy_from_slice(weights);
            }
        }
        Ok(InfoMap { weights: w })
    }
}

/// One exogenous change to the information map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEvent {
    /// Step index at which the event fires.
    pub time: u64,
    /// What the event does.
    pub kind: MapEventKind,
}

/// Supported map transformations.
#[derive(Debug, Clone, PartialEq)]
pub enum MapEventKind {
    /// Move the total weight of `sources` onto `dests`, split equally.
    Relocate {
        /// Cells whose weight is removed.
        sources: Vec<RegionId>,
        /// Cells that receive the moved mass (must be accessible).
        dests: Vec<RegionId>,
    },
    /// Add `spread * w(s)` to every accessible neighbor of each source cell,
    /// leaving the source weight unchanged. `spread` lies in (0, 1].
    Expand {
        /// Cells the hazard grows from.
        sources: Vec<RegionId>,
        /// Fraction of the source weight deposited on each neighbor.
        spread: f64,
    },
    /// Substitute a full weight vector.
    Replace {
        /// New per-region weights.
        weights: Vec<f64>,
    },
}

/// Ordered schedule of map events with strictly increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MapSchedule {
    events: Vec<MapEvent>,
}

impl MapSchedule {
    /// Empty schedule: the map never changes.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a schedule, validating event times and parameters.
    pub fn new(events: Vec<MapEvent>) -> Result<Self> {
        for pair in events.windows(2) {
            if pair[1].time <= pair[0].time {
                return Err(Error::InvalidEvent {
                    time: pair[1].time,
                    reason: "event times must be strictly increasing".into(),
                });
            }
        }
        for e in &events {
            if e.time < 1 {
                return Err(Error::InvalidEvent {
                    time: e.time,
                    reason: "event times start at step 1".into(),
                });
            }
            if let MapEventKind::Expand { spread, .. } = e.kind {
                if !(spread > 0.0 && spread <= 1.0) {
                    return Err(Error::InvalidEvent {
                        time: e.time,
                        reason: format!("spread fraction {spread} outside (0, 1]"),
                    });
                }
            }
        }
        Ok(Self { events })
    }

    /// Event scheduled at step `k`, if any.
    pub fn event_at(&self, k: u64) -> Option<&MapEvent> {
        self.events
            .binary_search_by_key(&k, |e| e.time)
            .ok()
            .map(|i| &self.events[i])
    }

    /// All events in time order.
    pub fn events(&self) -> &[MapEvent] {
        &self.events
    }
}
