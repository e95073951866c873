//! Gaussian-process belief over the information map and its UCB summary.
//!
//! Each agent fits a GP with a squared-exponential kernel on cell-center
//! coordinates to its observation dataset, forms the upper-confidence-bound
//! map `mu + beta * sigma`, and normalizes it (with an epsilon floor) into the
//! strictly positive belief target distribution that drives its policy.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::world::{EnvironmentGraph, RegionId};

/// One noisy sample of a region's information weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// Region the sample was taken in.
    pub region: RegionId,
    /// Sampled (noisy) weight value.
    pub value: f64,
    /// Step at which it was sensed.
    pub time: u64,
    /// Agent that sensed it.
    pub source: usize,
}

/// Append-only multiset of observations; duplicates are retained.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    obs: Vec<Observation>,
}

impl Dataset {
    /// Empty dataset.
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of stored observations.
    pub fn len(&self) -> usize {
        self.obs.len()
    }

    /// Whether the dataset is empty.
    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    /// Appends one observation.
    pub fn push(&mut self, o: Observation) {
        self.obs.push(o);
    }

    /// Appends a batch of observations, preserving order.
    pub fn extend_from(&mut self, batch: &[Observation]) {
        self.obs.extend_from_slice(batch);
    }

    /// Iterates over observations in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Observation> {
        self.obs.iter()
    }

    /// Enforces the growth cap: keeps the most recent observations per region.
    ///
    /// Each observed region keeps up to `n_max / distinct_regions` of its most
    /// recent samples (at least one); if the floor still leaves more than
    /// `n_max` in total, the globally oldest are dropped. `n_max == 0`
    /// disables the cap.
    pub fn cap_to_recent(&mut self, n_max: usize) {
        if n_max == 0 || self.obs.len() <= n_max {
            return;
        }
        let mut distinct: HashMap<usize, usize> = HashMap::new();
        for o in &self.obs {
            *distinct.entry(o.region.0).or_insert(0) += 1;
        }
        let quota = (n_max / distinct.len()).max(1);
        let mut taken: HashMap<usize, usize> = HashMap::with_capacity(distinct.len());
        let mut keep = vec![false; self.obs.len()];
        let mut total = 0usize;
        for i in (0..self.obs.len()).rev() {
            let slot = taken.entry(self.obs[i].region.0).or_insert(0);
            if *slot < quota {
                *slot += 1;
                keep[i] = true;
                total += 1;
            }
        }
        // The at-least-one floor can overshoot when there are more observed
        // regions than budget; shed the globally oldest survivors.
        if total > n_max {
            let mut excess = total - n_max;
            for flag in keep.iter_mut() {
                if excess == 0 {
                    break;
                }
                if *flag {
                    *flag = false;
                    excess -= 1;
                }
            }
        }
        let mut idx = 0;
        self.obs.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
    }
}

/// Hyperparameters of the squared-exponential GP prior.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelParams {
    /// Lengthscale in cell units.
    pub lengthscale: f64,
    /// Prior (signal) variance.
    pub signal_variance: f64,
    /// Observation noise variance assumed by the GP.
    pub noise_variance: f64,
    /// Constant prior mean.
    pub prior_mean: f64,
}

impl KernelParams {
    /// Checks positivity constraints; `field` prefixes error messages.
    pub fn validate(&self, field: &'static str) -> Result<()> {
        if !self.lengthscale.is_finite() || self.lengthscale <= 0.0 {
            return Err(Error::InvalidConfig {
                field,
                reason: format!("lengthscale must be positive, got {}", self.lengthscale),
            });
        }
        if !self.signal_variance.is_finite() || self.signal_variance <= 0.0 {
            return Err(Error::InvalidConfig {
                field,
                reason: format!(
                    "signal_variance must be positive, got {}",
                    self.signal_variance
                ),
            });
        }
        if !self.noise_variance.is_finite() || self.noise_variance < 0.0 {
            return Err(Error::InvalidConfig {
                field,
                reason: format!(
                    "noise_variance must be nonnegative, got {}",
                    self.noise_variance
                ),
            });
        }
        Ok(())
    }

    fn kernel(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        self.signal_variance * (-d2 / (2.0 * self.lengthscale * self.lengthscale)).exp()
    }

    /// Effective per-observation noise: jitter is added when the configured
    /// noise variance is too small to keep the Gram matrix well conditioned
    /// under duplicated inputs.
    pub fn effective_noise(&self) -> f64 {
        if self.noise_variance < 1e-8 {
            self.noise_variance + 1e-8 * self.signal_variance
        } else {
            self.noise_variance
        }
    }
}

/// GP posterior mean and standard deviation, indexed by region.
#[derive(Debug, Clone, PartialEq)]
pub struct GpPosterior {
    /// Posterior mean per region.
    pub mean: Vec<f64>,
    /// Posterior standard deviation per region (clamped at zero).
    pub std: Vec<f64>,
}

/// UCB information map and the normalized belief target distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefMap {
    /// Epsilon-clamped UCB weights (zero on no-fly cells).
    pub phi_ucb: Vec<f64>,
    /// Belief target distribution: strictly positive on accessible regions.
    pub rho: Vec<f64>,
}

impl BeliefMap {
    /// Uninformed belief: uniform over accessible regions.
    pub fn uniform(graph: &EnvironmentGraph) -> Self {
        let n = graph.num_regions();
        let share = 1.0 / graph.accessible().len() as f64;
        let mut phi = vec![0.0; n];
        let mut rho = vec![0.0; n];
        for &r in graph.accessible() {
            phi[r.0] = 1.0;
            rho[r.0] = share;
        }
        Self { phi_ucb: phi, rho }
    }
}

/// Fits the GP posterior to `data`, evaluated at every region center.
///
/// Observations sharing a region are collapsed onto that region's site with
/// their mean value and noise variance scaled by the sample count; this is
/// algebraically the same posterior as the full Gram over all observations,
/// at `O(sites^3)` instead of `O(n^3)`. Within a site, values are accumulated
/// in a canonical order so that reordering a dataset cannot change the result
/// bitwise.
pub fn fit_posterior(
    data: &Dataset,
    kernel: &KernelParams,
    graph: &EnvironmentGraph,
) -> Result<GpPosterior> {
    let n_regions = graph.num_regions();
    let prior_std = kernel.signal_variance.sqrt();
    if data.is_empty() {
        return Ok(GpPosterior {
            mean: vec![kernel.prior_mean; n_regions],
            std: vec![prior_std; n_regions],
        });
    }

    let mut sites: BTreeMap<usize, Vec<&Observation>> = BTreeMap::new();
    for o in data.iter() {
        debug_assert!(
            graph.is_accessible(o.region),
            "observation references a no-fly region"
        );
        sites.entry(o.region.0).or_default().push(o);
    }
    let s = sites.len();
    let mut site_coords = Vec::with_capacity(s);
    let mut site_mean = DVector::zeros(s);
    let mut site_count = Vec::with_capacity(s);
    for (i, (&region, obs)) in sites.iter_mut().enumerate() {
        obs.sort_by_key(|o| (o.time, o.source, o.value.to_bits()));
        let sum: f64 = obs.iter().map(|o| o.value).sum();
        site_mean[i] = sum / obs.len() as f64;
        site_coords.push(graph.coords(RegionId(region)));
        site_count.push(obs.len() as f64);
    }

    let noise = kernel.effective_noise();
    let gram = DMatrix::from_fn(s, s, |i, j| {
        let k = kernel.kernel(site_coords[i], site_coords[j]);
        if i == j {
            k + noise / site_count[i]
        } else {
            k
        }
    });
    let chol = gram.cholesky().ok_or(Error::SingularGram)?;

    let centered = site_mean.map(|y| y - kernel.prior_mean);
    let alpha = chol.solve(&centered);

    let mut mean = vec![0.0; n_regions];
    let mut std = vec![0.0; n_regions];
    for r in 0..n_regions {
        let c = graph.coords(RegionId(r));
        let k_r = DVector::from_fn(s, |i, _| kernel.kernel(c, site_coords[i]));
        mean[r] = kernel.prior_mean + k_r.dot(&alpha);
        let v = chol.solve(&k_r);
        let var = (kernel.signal_variance - k_r.dot(&v)).max(0.0);
        std[r] = var.sqrt();
    }
    Ok(GpPosterior { mean, std })
}

/// Upper-confidence-bound map `mu + beta * sigma`, per region.
pub fn ucb_map(post: &GpPosterior, beta: f64) -> Vec<f64> {
    post.mean
        .iter()
        .zip(&post.std)
        .map(|(m, s)| m + beta * s)
        .collect()
}

/// Clamps `phi` at `eps` from below on accessible regions and normalizes it
/// into a strictly positive belief target distribution.
pub fn normalize_belief(phi: &[f64], graph: &EnvironmentGraph, eps: f64) -> BeliefMap {
    assert!(eps > 0.0, "epsilon floor must be positive");
    assert_eq!(phi.len(), graph.num_regions());
    let mut clamped = vec![0.0; phi.len()];
    let mut total = 0.0;
    for &r in graph.accessible() {
        let v = phi[r.0].max(eps);
        clamped[r.0] = v;
        total += v;
    }
    let mut rho = vec![0.0; phi.len()];
    for &r in graph.accessible() {
        rho[r.0] = clamped[r.0] / total;
    }
    BeliefMap {
        phi_ucb: clamped,
        rho,
    }
}

/// Full belief update: fit posterior, form the UCB map, normalize.
///
/// Returns the raw UCB map alongside the clamped-and-normalized belief.
pub fn gp_ucb(
    data: &Dataset,
    kernel: &KernelParams,
    beta: f64,
    eps: f64,
    graph: &EnvironmentGraph,
) -> Result<(Vec<f64>, BeliefMap)> {
    let post = fit_posterior(data, kernel, graph)?;
    let phi = ucb_map(&post, beta);
    let belief = normalize_belief(&phi, graph, eps);
    Ok((phi, belief))
}
