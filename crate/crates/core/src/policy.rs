//! Markov-chain policy synthesis on the region graph.
//!
//! Given a strictly positive belief target distribution, builds a
//! column-stochastic transition matrix on the graph's sparsity pattern whose
//! stationary distribution is exactly that target. The Metropolis-Hastings
//! construction guarantees this through detailed balance; the fast-mixing
//! variant additionally runs a projected subgradient pass that shrinks the
//! second-largest eigenvalue magnitude (SLEM) of the chain, falling back to
//! the Metropolis chain when no improvement is found.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::{EnvironmentGraph, RegionId};

/// Detailed-balance tolerance accepted by [`slem`].
const REVERSIBILITY_TOL: f64 = 1e-9;

/// Stationarity tolerance enforced on fast-mixing output.
const STATIONARITY_TOL: f64 = 1e-9;

/// Chain construction mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainMode {
    /// Metropolis-Hastings with a uniform proposal.
    Metropolis,
    /// Metropolis base plus a SLEM-reducing subgradient pass.
    FastMixing,
}

/// Knobs for policy synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    /// Which construction to use.
    pub mode: ChainMode,
    /// Slack allowed on the SLEM improvement contract.
    pub slem_tol: f64,
    /// Subgradient iterations for the fast-mixing pass.
    pub slem_max_iters: usize,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            mode: ChainMode::Metropolis,
            slem_tol: 1e-9,
            slem_max_iters: 30,
        }
    }
}

/// Column-stochastic transition matrix: `entry(j, i)` is the probability of
/// moving from region `i` to region `j` in one step.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    p: DMatrix<f64>,
}

impl TransitionMatrix {
    /// Wraps a dense matrix, validating shape, nonnegativity, and that every
    /// column sums to 1 (active region) or 0 (isolated/no-fly region).
    pub fn from_dense(p: DMatrix<f64>) -> Result<Self> {
        if p.nrows() != p.ncols() {
            return Err(Error::InvalidConfig {
                field: "transition_matrix",
                reason: format!("matrix must be square, got {}x{}", p.nrows(), p.ncols()),
            });
        }
        for i in 0..p.ncols() {
            let col = p.column(i);
            if col.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(Error::InvalidConfig {
                    field: "transition_matrix",
                    reason: format!("column {i} has a negative or non-finite entry"),
                });
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > 1e-9 && sum.abs() > 1e-9 {
                return Err(Error::InvalidConfig {
                    field: "transition_matrix",
                    reason: format!("column {i} sums to {sum}, expected 0 or 1"),
                });
            }
        }
        Ok(Self { p })
    }

    /// Number of regions.
    pub fn num_regions(&self) -> usize {
        self.p.ncols()
    }

    /// Probability of the transition `from -> to`.
    pub fn prob(&self, to: RegionId, from: RegionId) -> f64 {
        self.p[(to.0, from.0)]
    }

    /// Dense view, row index = destination, column index = source.
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Samples the next region from the column of `from`.
    pub fn sample_next<R: Rng + ?Sized>(&self, from: RegionId, rng: &mut R) -> RegionId {
        let u: f64 = rng.gen();
        let col = self.p.column(from.0);
        let mut cum = 0.0;
        let mut last = from.0;
        for (j, &v) in col.iter().enumerate() {
            if v > 0.0 {
                last = j;
                cum += v;
                if u < cum {
                    return RegionId(j);
                }
            }
        }
        // Rounding left the column sum a hair under u: take the last support cell.
        RegionId(last)
    }

    /// L1 residual of `rho` as a stationary candidate: `||P rho - rho||_1`.
    pub fn stationarity_residual(&self, rho: &[f64]) -> f64 {
        let v = DVector::from_column_slice(rho);
        let w = &self.p * &v;
        (w - v).abs().sum()
    }
}

fn normalize_over_accessible(graph: &EnvironmentGraph, rho: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(rho.len(), graph.num_regions());
    let mut total = 0.0;
    for &r in graph.accessible() {
        if rho[r.0].is_nan() || rho[r.0] <= 0.0 {
            return Err(Error::ZeroBeliefMass { region: r.0 });
        }
        total += rho[r.0];
    }
    let mut out = vec![0.0; rho.len()];
    for &r in graph.accessible() {
        out[r.0] = rho[r.0] / total;
    }
    Ok(out)
}

/// Metropolis-Hastings chain with uniform proposal `1/d_max` and acceptance
/// `min(1, rho_j / rho_i)`; residual mass stays on the self-loop.
///
/// Detailed balance w.r.t. `rho` holds by construction, so `rho` is the
/// stationary distribution. `rho` is renormalized over accessible regions
/// internally; scaling it by a power of two leaves the output bit-identical.
pub fn metropolis_chain(graph: &EnvironmentGraph, rho: &[f64]) -> Result<TransitionMatrix> {
    let rho = normalize_over_accessible(graph, rho)?;
    let n = graph.num_regions();
    let mut p = DMatrix::zeros(n, n);
    let d_max = graph.max_degree();
    for &i in graph.accessible() {
        if d_max == 0 {
            // Single accessible cell: the only policy is to stay.
            p[(i.0, i.0)] = 1.0;
            continue;
        }
        let q = 1.0 / d_max as f64;
        let mut out_mass = 0.0;
        for &j in graph.neighbors(i) {
            let accept = (rho[j.0] / rho[i.0]).min(1.0);
            let prob = q * accept;
            p[(j.0, i.0)] = prob;
            out_mass += prob;
        }
        p[(i.0, i.0)] = (1.0 - out_mass).max(0.0);
    }
    Ok(TransitionMatrix { p })
}

/// Second-largest eigenvalue magnitude of the chain, computed on the
/// `rho`-symmetrized matrix restricted to the support of `rho`.
///
/// Requires `P` to satisfy detailed balance w.r.t. `rho` within `1e-9`.
pub fn slem(p: &TransitionMatrix, rho: &[f64]) -> Result<f64> {
    assert_eq!(rho.len(), p.num_regions());
    let support: Vec<usize> = (0..rho.len()).filter(|&r| rho[r] > 0.0).collect();
    let mut worst = 0.0f64;
    for (a, &i) in support.iter().enumerate() {
        for &j in &support[a + 1..] {
            let flow = rho[i] * p.p[(j, i)] - rho[j] * p.p[(i, j)];
            worst = worst.max(flow.abs());
        }
    }
    if worst > REVERSIBILITY_TOL {
        return Err(Error::NotReversible {
            violation: worst,
            tolerance: REVERSIBILITY_TOL,
        });
    }
    Ok(slem_of_support(&p.p, rho, &support))
}

/// SLEM on a validated support; shared by `slem` and the fast-mixing pass.
fn slem_of_support(p: &DMatrix<f64>, rho: &[f64], support: &[usize]) -> f64 {
    let a = support.len();
    if a <= 1 {
        return 0.0;
    }
    let mut s = DMatrix::zeros(a, a);
    for (ci, &i) in support.iter().enumerate() {
        for (rj, &j) in support.iter().enumerate() {
            s[(rj, ci)] = p[(j, i)] * (rho[i] / rho[j]).sqrt();
        }
    }
    let sym = (&s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let mut vals: Vec<f64> = eig.iter().copied().collect();
    // Drop one copy of the Perron eigenvalue (the algebraically largest).
    let (imax, _) =
        vals.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| {
                if v > acc.1 {
                    (i, v)
                } else {
                    acc
                }
            },
        );
    vals.swap_remove(imax);
    vals.iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .clamp(0.0, 1.0)
}

/// Metropolis chain refined by projected subgradient descent on the SLEM.
///
/// The iterate lives in the space of symmetric edge flows
/// `Q[i][j] = rho_i * P[j][i]`, the natural coordinates of reversible chains:
/// any nonnegative symmetric flow assignment with row sums at most `rho`
/// (self-loops absorb the residual) is a feasible chain, so projection is
/// just clipping plus a symmetric row cap. Descent steps follow the SLEM
/// subgradient reduced to these coordinates. Returns the best iterate found;
/// if none beats the Metropolis chain, returns the Metropolis chain
/// unchanged.
pub fn fast_mixing_chain(
    graph: &EnvironmentGraph,
    rho: &[f64],
    config: &PolicyConfig,
) -> Result<TransitionMatrix> {
    let base = metropolis_chain(graph, rho)?;
    if config.slem_max_iters == 0 {
        return Ok(base);
    }
    let rho_n = normalize_over_accessible(graph, rho)?;
    let support: Vec<usize> = graph.accessible().iter().map(|r| r.0).collect();
    let a = support.len();
    if a <= 2 {
        // A reversible 2-state chain has one eigen degree of freedom; the
        // Metropolis construction is already as good as the pattern allows.
        return Ok(base);
    }
    let pos: std::collections::HashMap<usize, usize> =
        support.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let adj: Vec<Vec<usize>> = support
        .iter()
        .map(|&r| {
            graph
                .neighbors(RegionId(r))
                .iter()
                .map(|j| pos[&j.0])
                .collect()
        })
        .collect();
    let rho_a: Vec<f64> = support.iter().map(|&r| rho_n[r]).collect();
    let edges: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
        .collect();

    let base_slem = slem_of_support(base.as_matrix(), &rho_n, &support);
    let mut cur: Vec<f64> = edges
        .iter()
        .map(|&(i, j)| rho_a[i] * base.p[(support[j], support[i])])
        .collect();
    let mut best = cur.clone();
    let mut best_slem = base_slem;

    // Flow entries live on the scale of rho/d_max; steps start there and decay.
    let d_max = adj.iter().map(Vec::len).max().unwrap_or(1) as f64;
    let flow_scale = rho_a.iter().cloned().fold(f64::INFINITY, f64::min) / d_max;
    for t in 0..config.slem_max_iters {
        let p_cur = flows_to_chain(&cur, &edges, &rho_a, &adj);
        let grad = slem_flow_subgradient(&p_cur, &rho_a, &edges);
        let g_max = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if g_max < 1e-14 {
            break;
        }
        let step = flow_scale / ((t + 1) as f64).sqrt() / g_max;
        for (q, g) in cur.iter_mut().zip(&grad) {
            *q = (*q - step * g).max(0.0);
        }
        cap_flow_rows(&mut cur, &edges, &rho_a, a);
        let p_next = flows_to_chain(&cur, &edges, &rho_a, &adj);
        let s = slem_of_sub(&p_next, &rho_a);
        if s < best_slem {
            best_slem = s;
            best = cur.clone();
        } else if s > 0.999 {
            // The step disconnected the chain; resume from the best iterate
            // with the now-smaller step.
            cur = best.clone();
        }
    }

    if best_slem < base_slem {
        let sub = flows_to_chain(&best, &edges, &rho_a, &adj);
        let n = graph.num_regions();
        let mut full = DMatrix::zeros(n, n);
        for (ci, &i) in support.iter().enumerate() {
            for (rj, &j) in support.iter().enumerate() {
                full[(j, i)] = sub[(rj, ci)];
            }
        }
        let refined = TransitionMatrix { p: full };
        if refined.stationarity_residual(&rho_n) <= STATIONARITY_TOL {
            return Ok(refined);
        }
    }
    Ok(base)
}

/// SLEM of an accessible submatrix w.r.t. a full-support target.
fn slem_of_sub(p: &DMatrix<f64>, rho: &[f64]) -> f64 {
    let support: Vec<usize> = (0..rho.len()).collect();
    slem_of_support(p, rho, &support)
}

/// Rebuilds the transition submatrix from symmetric edge flows: off-diagonal
/// `P[j][i] = Q_ij / rho_i`, self-loops take the residual column mass.
fn flows_to_chain(
    flows: &[f64],
    edges: &[(usize, usize)],
    rho: &[f64],
    adj: &[Vec<usize>],
) -> DMatrix<f64> {
    let a = rho.len();
    let mut p = DMatrix::zeros(a, a);
    for (&(i, j), &q) in edges.iter().zip(flows) {
        p[(j, i)] = q / rho[i];
        p[(i, j)] = q / rho[j];
    }
    for (i, _) in adj.iter().enumerate() {
        let out: f64 = p.column(i).iter().sum();
        p[(i, i)] = (1.0 - out).max(0.0);
    }
    p
}

/// Caps off-diagonal flow row sums at `rho` with a symmetric scale so the
/// self-loop flow stays nonnegative on every row.
fn cap_flow_rows(flows: &mut [f64], edges: &[(usize, usize)], rho: &[f64], a: usize) {
    let mut row_sum = vec![0.0f64; a];
    for (&(i, j), &q) in edges.iter().zip(flows.iter()) {
        row_sum[i] += q;
        row_sum[j] += q;
    }
    let scale: Vec<f64> = (0..a)
        .map(|i| {
            if row_sum[i] > rho[i] {
                rho[i] / row_sum[i]
            } else {
                1.0
            }
        })
        .collect();
    for (&(i, j), q) in edges.iter().zip(flows.iter_mut()) {
        *q *= scale[i].min(scale[j]);
    }
}

/// Subgradient of the SLEM in symmetric-flow coordinates.
///
/// For an eigenpair `(lambda, u)` of the symmetrized chain, raising the flow
/// on edge `(i, j)` moves `lambda` by `2 u_i u_j / sqrt(rho_i rho_j)` through
/// the off-diagonal entries and by `-u_i^2/rho_i - u_j^2/rho_j` through the
/// self-loops that give the flow up. The SLEM is `max |lambda_k|` over the
/// non-Perron spectrum; at a tie (bipartite-like chains carry symmetric
/// spectra) all directions within a small window of the maximum are averaged,
/// since a single eigendirection makes no first-order progress there.
fn slem_flow_subgradient(p: &DMatrix<f64>, rho: &[f64], edges: &[(usize, usize)]) -> Vec<f64> {
    const TIE_WINDOW: f64 = 1e-3;
    let a = rho.len();
    let mut s = DMatrix::zeros(a, a);
    for i in 0..a {
        for j in 0..a {
            s[(j, i)] = p[(j, i)] * (rho[i] / rho[j]).sqrt();
        }
    }
    let sym = (&s + s.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let perron = (0..a)
        .max_by(|&x, &y| eig.eigenvalues[x].partial_cmp(&eig.eigenvalues[y]).unwrap())
        .unwrap();
    let slem_val = (0..a)
        .filter(|&k| k != perron)
        .map(|k| eig.eigenvalues[k].abs())
        .fold(0.0f64, f64::max);
    let mut g = vec![0.0; edges.len()];
    let mut tied = 0.0;
    for k in 0..a {
        if k == perron || eig.eigenvalues[k].abs() < slem_val - TIE_WINDOW {
            continue;
        }
        let sgn = if eig.eigenvalues[k] >= 0.0 { 1.0 } else { -1.0 };
        let u = eig.eigenvectors.column(k);
        for (e, &(i, j)) in edges.iter().enumerate() {
            let coupling = 2.0 * u[i] * u[j] / (rho[i] * rho[j]).sqrt();
            let laziness = u[i] * u[i] / rho[i] + u[j] * u[j] / rho[j];
            g[e] += sgn * (coupling - laziness);
        }
        tied += 1.0;
    }
    if tied > 0.0 {
        for v in &mut g {
            *v /= tied;
        }
    }
    g
}

/// Builds a chain in the configured mode.
pub fn build_chain(
    graph: &EnvironmentGraph,
    rho: &[f64],
    config: &PolicyConfig,
) -> Result<TransitionMatrix> {
    match config.mode {
        ChainMode::Metropolis => metropolis_chain(graph, rho),
        ChainMode::FastMixing => fast_mixing_chain(graph, rho, config),
    }
}

/// Stationary distribution by power iteration from uniform.
///
/// Iterates until the L1 step change drops below `1e-13`, then returns the
/// fixed point; fails with [`Error::NoConvergence`] after `1e6` iterations,
/// which a periodic chain can trigger.
pub fn stationary(p: &TransitionMatrix) -> Result<Vec<f64>> {
    const MAX_ITERS: usize = 1_000_000;
    let n = p.num_regions();
    let active: Vec<usize> = (0..n)
        .filter(|&i| p.p.column(i).iter().sum::<f64>() > 0.5)
        .collect();
    assert!(
        !active.is_empty(),
        "transition matrix has no active columns"
    );
    let mut pi = DVector::zeros(n);
    for &i in &active {
        pi[i] = 1.0 / active.len() as f64;
    }
    for _ in 0..MAX_ITERS {
        let mut next = &p.p * &pi;
        let mass = next.abs().sum();
        next /= mass;
        let delta = (&next - &pi).abs().sum();
        pi = next;
        if delta < 1e-13 {
            return Ok(pi.iter().copied().collect());
        }
    }
    Err(Error::NoConvergence {
        max_iters: MAX_ITERS,
    })
}
