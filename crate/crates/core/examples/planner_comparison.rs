//! Race the ergodic planner against the greedy-UCB and uniform-walk baselines
//! on one world and seed; the greedy walker camps on the first hotspot it
//! finds while the ergodic walker keeps covering.
//!
//! ```bash
//! cargo run --release -p ergoswarm --example planner_comparison
//! ```

use std::path::Path;

use ergoswarm::baselines::PlannerKind;
use ergoswarm::config::ExperimentConfig;
use ergoswarm::engine::SwarmEngine;
use ergoswarm::metrics::MetricsAccumulator;

fn main() -> ergoswarm::Result<()> {
    let base = ExperimentConfig::from_path(Path::new("configs/compare_5x5.toml"))?;
    let world = base.compile_world()?;
    println!(
        "{:<12} {:>8} {:>10} {:>12} {:>14}",
        "planner", "regret", "coverage", "belief err", "roi discovery"
    );
    for planner in [
        PlannerKind::Ergodic,
        PlannerKind::GreedyUcb,
        PlannerKind::UniformWalk,
    ] {
        let mut cfg = base.clone();
        cfg.swarm.planner = planner;
        let mut engine = SwarmEngine::new(
            world.graph.clone(),
            world.initial_map.clone(),
            world.schedule.clone(),
            cfg.swarm_config(0),
            cfg.belief_config(),
            cfg.policy_config(),
        )?;
        let mut acc = MetricsAccumulator::new(&world.graph, world.rois.clone());
        engine.run_with_sink(|rec| acc.push(rec))?;
        let (_, s) = acc.finish();
        println!(
            "{:<12} {:>8.3} {:>10} {:>12.3} {:>14}",
            format!("{planner:?}"),
            s.final_regret,
            s.coverage_time.map_or("never".into(), |t| t.to_string()),
            s.final_belief_error,
            format!("{:?}", s.roi_discovery),
        );
    }
    Ok(())
}
