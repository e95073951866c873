//! Shared oracles for integration tests: a direct-inversion GP oracle and a
//! random connected-world generator. These deliberately avoid the library's
//! own solution paths so the tests compare two independent routes.

#![allow(dead_code)]

use ergoswarm::belief::{Dataset, KernelParams};
use ergoswarm::world::{EnvironmentGraph, RegionId};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// GP posterior by explicit dense inversion over every observation (no site
/// collapsing, no Cholesky): the independent oracle for `fit_posterior`.
pub fn gp_oracle(
    data: &Dataset,
    kernel: &KernelParams,
    graph: &EnvironmentGraph,
) -> (Vec<f64>, Vec<f64>) {
    let obs: Vec<_> = data.iter().collect();
    let n = obs.len();
    let n_regions = graph.num_regions();
    if n == 0 {
        return (
            vec![kernel.prior_mean; n_regions],
            vec![kernel.signal_variance.sqrt(); n_regions],
        );
    }
    let k = |a: [f64; 2], b: [f64; 2]| {
        let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        kernel.signal_variance * (-d2 / (2.0 * kernel.lengthscale * kernel.lengthscale)).exp()
    };
    let noise = kernel.effective_noise();
    let coords: Vec<[f64; 2]> = obs.iter().map(|o| graph.coords(o.region)).collect();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        k(coords[i], coords[j]) + if i == j { noise } else { 0.0 }
    });
    let inv = gram.try_inverse().expect("oracle gram not invertible");
    let centered = DVector::from_fn(n, |i, _| obs[i].value - kernel.prior_mean);
    let alpha = &inv * &centered;

    let mut mean = vec![0.0; n_regions];
    let mut std = vec![0.0; n_regions];
    for r in 0..n_regions {
        let c = graph.coords(RegionId(r));
        let k_r = DVector::from_fn(n, |i, _| k(c, coords[i]));
        mean[r] = kernel.prior_mean + k_r.dot(&alpha);
        let var = (kernel.signal_variance - k_r.dot(&(&inv * &k_r))).max(0.0);
        std[r] = var.sqrt();
    }
    (mean, std)
}

/// A random connected world of at most 25 accessible cells with a strictly
/// positive normalized target on those cells.
pub fn random_world(rng: &mut ChaCha8Rng) -> (EnvironmentGraph, Vec<f64>) {
    loop {
        let w = rng.gen_range(1..=5usize);
        let h = rng.gen_range(1..=5usize);
        let nofly: Vec<RegionId> = (0..w * h)
            .filter(|_| rng.gen_bool(0.2))
            .map(RegionId)
            .collect();
        let Ok(graph) = EnvironmentGraph::build_grid(w, h, &nofly) else {
            continue;
        };
        let mut rho = vec![0.0; w * h];
        let mut total = 0.0;
        for &r in graph.accessible() {
            let v = rng.gen_range(0.05..1.0);
            rho[r.0] = v;
            total += v;
        }
        for &r in graph.accessible() {
            rho[r.0] /= total;
        }
        return (graph, rho);
    }
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Prints the acceptance verdict line for a criterion and panics on failure.
pub fn gate(id: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id:02} ({name}): {verdict} [{detail}]");
    assert!(ok, "acceptance criterion {id} failed: {name}: {detail}");
}
