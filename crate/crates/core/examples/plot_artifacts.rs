//! Run one seed of the 5x5 benchmark through the artifact pipeline and render
//! its SVG charts: metric curves plus the true/belief/empirical heatmap
//! triptych.
//!
//! ```bash
//! cargo run --release -p ergoswarm --example plot_artifacts
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use ergoswarm::config::ExperimentConfig;
use ergoswarm::plot::cmd_plot;
use ergoswarm::runner::run_one;

fn main() -> ergoswarm::Result<()> {
    let text = std::fs::read_to_string("configs/benchmark_5x5.toml")?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    let dir = Path::new("out/plot_example/seed0000");
    let overrides = BTreeMap::new();
    let (summary, rows) = run_one(&cfg, 0, &overrides, dir, &text)?;
    println!(
        "ran {} steps; coverage at {:?}; final regret {:.4}",
        rows.len(),
        summary.coverage_time,
        summary.final_regret
    );
    for file in cmd_plot(dir)? {
        println!("wrote {}", file.display());
    }
    Ok(())
}
