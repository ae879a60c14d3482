//! Worst-start cover time before and after adding edges, exactly.

use covertime::experiments::{run_edge_addition, EdgeAdditionConfig, EdgeMode};

fn main() -> covertime::Result<()> {
    for k in 1..=3 {
        let mut config = EdgeAdditionConfig::new(EdgeMode::ExactDp, k, 100);
        config.master_seed = k as u64;
        let report = run_edge_addition(&config)?;
        let worst = report.rows.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio)).unwrap();
        println!(
            "k={k}: max ratio {:.4} (bound {:.3}) on {} + {:?}, violations {}",
            report.max_ratio, worst.bound, worst.graph, worst.added, report.violations
        );
    }
    Ok(())
}
