//! Exact cover times by dynamic programming over visited sets, next to
//! simulation.

use covertime::graph::named::{complete, cycle, path};
use covertime::{simulate, ExactCover, MultiGraph, Quantity, SimConfig, StartPolicy};

fn main() -> covertime::Result<()> {
    let graphs: Vec<(&str, MultiGraph)> = vec![
        ("P5", path(5)),
        ("C7", cycle(7)),
        ("K6", complete(6)),
        ("P3 + loop", path(3).add_edge(1, 1)?),
    ];
    for (name, g) in graphs {
        let exact = ExactCover::new(&g)?;
        let (worst, start) = exact.worst();
        let est = simulate(&g, &SimConfig::new(Quantity::Cover, StartPolicy::Fixed(start), 50_000, 3))?;
        println!(
            "{name:<10} starts {:?}  worst {worst:.4} at {start}  simulated {:.4} +- {:.4}",
            exact.all_starts().iter().map(|t| (t * 1e4).round() / 1e4).collect::<Vec<_>>(),
            est.mean,
            est.std_err
        );
    }
    Ok(())
}
