//! Run the full decentralized loop on the shipped 5x5 benchmark for one seed
//! and print how the team's errors shrink as beliefs converge to the truth.
//!
//! ```bash
//! cargo run --release -p ergoswarm --example single_run
//! ```

use std::path::Path;

use ergoswarm::config::ExperimentConfig;
use ergoswarm::engine::SwarmEngine;
use ergoswarm::metrics::{belief_error, empirical_error, MetricsAccumulator};

fn main() -> ergoswarm::Result<()> {
    let cfg = ExperimentConfig::from_path(Path::new("configs/benchmark_5x5.toml"))?;
    let world = cfg.compile_world()?;
    println!(
        "world: {}x{} with {} ROIs; horizon {}",
        world.graph.width(),
        world.graph.height(),
        world.rois.len(),
        cfg.swarm.t_final
    );

    let mut engine = SwarmEngine::new(
        world.graph.clone(),
        world.initial_map.clone(),
        world.schedule.clone(),
        cfg.swarm_config(0),
        cfg.belief_config(),
        cfg.policy_config(),
    )?;
    let mut acc = MetricsAccumulator::new(&world.graph, world.rois.clone());
    engine.run_with_sink(|rec| {
        if rec.k % 500 == 0 {
            println!(
                "k={:5}  empirical L1 {:.3}  belief L1 {:.3}",
                rec.k,
                empirical_error(&rec.team_empirical, &rec.true_target),
                belief_error(&rec.team_belief, &rec.true_target),
            );
        }
        acc.push(rec);
    })?;
    let (_, summary) = acc.finish();
    println!("\ncoverage time: {:?}", summary.coverage_time);
    println!("roi discovery: {:?}", summary.roi_discovery);
    println!("final time-averaged regret: {:.4}", summary.final_regret);
    println!("final belief error: {:.4}", summary.final_belief_error);
    Ok(())
}
