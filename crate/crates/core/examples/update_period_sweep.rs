//! Sweep the belief/policy update period against a map that relocates its
//! hotspot every 500 steps: updating a small factor faster than the
//! environment changes is what keeps regret down.
//!
//! ```bash
//! cargo run --release -p ergoswarm --example update_period_sweep
//! ```

use std::path::Path;

use ergoswarm::config::ExperimentConfig;
use ergoswarm::engine::SwarmEngine;
use ergoswarm::metrics::MetricsAccumulator;

fn main() -> ergoswarm::Result<()> {
    let base = ExperimentConfig::from_path(Path::new("configs/dynamic_relocation.toml"))?;
    let world = base.compile_world()?;
    println!(
        "hotspot relocates at k = {:?}; horizon {}",
        world
            .schedule
            .events()
            .iter()
            .map(|e| e.time)
            .collect::<Vec<_>>(),
        base.swarm.t_final
    );
    println!(
        "{:>6} {:>14} {:>14}",
        "tau", "mean regret", "mean belief err"
    );
    for tau in [10u64, 50, 100, 250, 500, 1000] {
        let mut cfg = base.clone();
        cfg.swarm.tau_gp = tau;
        cfg.swarm.tau_p = tau;
        let mut regrets = Vec::new();
        let mut berrs = Vec::new();
        for &seed in &cfg.run.seeds {
            let mut engine = SwarmEngine::new(
                world.graph.clone(),
                world.initial_map.clone(),
                world.schedule.clone(),
                cfg.swarm_config(seed),
                cfg.belief_config(),
                cfg.policy_config(),
            )?;
            let mut acc = MetricsAccumulator::new(&world.graph, world.rois.clone());
            engine.run_with_sink(|rec| acc.push(rec))?;
            let (_, s) = acc.finish();
            regrets.push(s.final_regret);
            berrs.push(s.final_belief_error);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        println!("{:>6} {:>14.4} {:>14.4}", tau, mean(&regrets), mean(&berrs));
    }
    Ok(())
}
