//! Effective resistances, hitting times and the commute identity on a small
//! multigraph with a loop and a doubled edge.

use covertime::{HittingTimes, MultiGraph, ResistanceOracle};

fn main() -> covertime::Result<()> {
    let g = MultiGraph::from_weighted_edges(5, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 1), (3, 4, 1), (4, 4, 1)])?;
    let oracle = ResistanceOracle::new(&g)?;
    let hit = HittingTimes::new(&oracle, &g)?;
    println!("|E| = {}, 2-core size = {}", g.edge_count(), oracle.core_size());
    for (u, v) in [(0, 2), (0, 4), (1, 4)] {
        let r = oracle.resistance(u, v)?;
        let commute = hit.hitting_time(u, v)? + hit.hitting_time(v, u)?;
        println!(
            "R({u},{v}) = {r:.6}  H({u}->{v}) = {:.4}  commute = {commute:.4}  2|E|R = {:.4}",
            hit.hitting_time(u, v)?,
            2.0 * g.edge_count() as f64 * r
        );
    }
    let d = oracle.diameter(4096);
    println!("resistance diameter {:.4} between {:?} ({})", d.value, d.pair, d.provenance.as_str());
    Ok(())
}
