//! Build Metropolis and fast-mixing chains for a lopsided target, verify the
//! stationary distribution, compare SLEMs, and race the two chains' empirical
//! convergence.
//!
//! ```bash
//! cargo run --release -p ergoswarm --example markov_policy
//! ```

use ergoswarm::policy::{
    fast_mixing_chain, metropolis_chain, slem, stationary, ChainMode, PolicyConfig,
    TransitionMatrix,
};
use ergoswarm::world::{EnvironmentGraph, RegionId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn empirical_l1(p: &TransitionMatrix, rho: &[f64], steps: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = RegionId(0);
    let mut counts = vec![0u64; rho.len()];
    counts[0] = 1;
    for _ in 0..steps - 1 {
        x = p.sample_next(x, &mut rng);
        counts[x.0] += 1;
    }
    counts
        .iter()
        .zip(rho)
        .map(|(&c, r)| (c as f64 / steps as f64 - r).abs())
        .sum()
}

fn main() -> ergoswarm::Result<()> {
    let graph = EnvironmentGraph::build_grid(4, 4, &[])?;
    // Three quarters of the mass in one corner block.
    let mut rho = vec![0.25 / 12.0; 16];
    for r in [10, 11, 14, 15] {
        rho[r] = 0.75 / 4.0;
    }

    let met = metropolis_chain(&graph, &rho)?;
    let cfg = PolicyConfig {
        mode: ChainMode::FastMixing,
        slem_tol: 1e-9,
        slem_max_iters: 60,
    };
    let fast = fast_mixing_chain(&graph, &rho, &cfg)?;

    let pi_met = stationary(&met)?;
    let pi_fast = stationary(&fast)?;
    let drift = |pi: &[f64]| -> f64 { pi.iter().zip(&rho).map(|(a, b)| (a - b).abs()).sum() };
    println!(
        "stationary L1 error: metropolis {:.2e}, fast {:.2e}",
        drift(&pi_met),
        drift(&pi_fast)
    );
    println!(
        "SLEM: metropolis {:.4}, fast-mixing {:.4}",
        slem(&met, &rho)?,
        slem(&fast, &rho)?
    );

    println!("\nempirical L1 to target after a fixed number of steps (seed 1):");
    for steps in [500u64, 2_000, 10_000, 50_000] {
        println!(
            "  {steps:6} steps: metropolis {:.4}, fast-mixing {:.4}",
            empirical_l1(&met, &rho, steps, 1),
            empirical_l1(&fast, &rho, steps, 1)
        );
    }
    Ok(())
}
