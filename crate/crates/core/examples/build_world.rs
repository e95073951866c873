//! Build a grid world with no-fly cells, query sensing balls, and walk the
//! information map through a relocation and an expansion event.
//!
//! ```bash
//! cargo run -p ergoswarm --example build_world
//! ```

use ergoswarm::world::{EnvironmentGraph, InfoMap, MapEvent, MapEventKind, MapSchedule, RegionId};

fn print_map(map: &InfoMap, graph: &EnvironmentGraph, label: &str) {
    println!("{label}:");
    for y in 0..graph.height() {
        let row: Vec<String> = (0..graph.width())
            .map(|x| {
                let r = RegionId(y * graph.width() + x);
                if graph.is_nofly(r) {
                    "  xx ".to_string()
                } else {
                    format!("{:5.1}", map.weight(r))
                }
            })
            .collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> ergoswarm::Result<()> {
    // A 5x5 grid with two no-fly cells in the middle column.
    let nofly = [RegionId(2 + 5), RegionId(2 + 5 * 3)];
    let graph = EnvironmentGraph::build_grid(5, 5, &nofly)?;
    println!(
        "world: {}x{}, {} accessible regions, {} edges, max degree {}",
        graph.width(),
        graph.height(),
        graph.accessible().len(),
        graph.num_edges(),
        graph.max_degree()
    );

    let center = RegionId(12);
    for delta in [0.0, 1.0, 1.5, 2.0] {
        println!(
            "ball(center, {delta:.1}) has {} cells",
            graph.ball(center, delta).len()
        );
    }

    // A hazard at the top-right corner over a faint background.
    let mut weights = vec![0.2; 25];
    weights[4] = 8.0;
    let map = InfoMap::new(weights, &graph);
    print_map(&map, &graph, "initial map");
    let rho = map.target_distribution(&graph)?;
    println!("target mass at the hazard: {:.3}", rho[4]);

    // The hazard first spreads to its neighbors, then relocates.
    let schedule = MapSchedule::new(vec![
        MapEvent {
            time: 1,
            kind: MapEventKind::Expand {
                sources: vec![RegionId(4)],
                spread: 0.5,
            },
        },
        MapEvent {
            time: 2,
            kind: MapEventKind::Relocate {
                sources: vec![RegionId(4)],
                dests: vec![RegionId(20)],
            },
        },
    ])?;
    let map = map.step(&schedule, 1, &graph)?;
    print_map(&map, &graph, "after expansion (k=1)");
    let map = map.step(&schedule, 2, &graph)?;
    print_map(&map, &graph, "after relocation (k=2)");
    Ok(())
}
