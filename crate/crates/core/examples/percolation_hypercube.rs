//! Bond percolation on the hypercube and bounds for its largest cluster.

use covertime::bounds::{analyze, BoundOptions};
use covertime::generators::{percolate, BaseGraphSpec, BaseKind};
use covertime::{simulate, Quantity, SimConfig, StartPolicy};

fn main() -> covertime::Result<()> {
    let m = 10;
    for p in [0.15, 0.2, 0.3] {
        let spec = BaseGraphSpec { kind: BaseKind::Hypercube(m), p };
        let (_, cluster) = percolate(&spec, 5)?;
        let g = cluster.into_graph();
        if g.vertex_count() < 2 {
            println!("p = {p}: isolated cluster");
            continue;
        }
        let analysis = analyze(&g, BoundOptions::default())?;
        let est = simulate(&g, &SimConfig::new(Quantity::Cover, StartPolicy::Fixed(analysis.diameter.pair.0), 10, 1))?;
        println!(
            "p = {p}: cluster {} vertices, R = {:.2}, lower {:.0}, cover {:.0} +- {:.0}, clean upper {:.0}",
            g.vertex_count(),
            analysis.report.diameter,
            analysis.report.best_lower(),
            est.mean,
            est.std_err,
            analysis.report.upper_clean
        );
    }
    Ok(())
}
