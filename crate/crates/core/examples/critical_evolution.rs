//! Cover time of the largest component of G(n, p) in the critical window,
//! on a small grid.

use covertime::experiments::{run_evolution, EvolutionConfig, Regime};

fn main() -> covertime::Result<()> {
    let mut config = EvolutionConfig::new(Regime::Critical { lambda: 0.0 }, vec![1000, 2000, 4000, 8000]);
    config.seeds = 8;
    config.master_seed = 11;
    let report = run_evolution(&config)?;
    println!("{:>6} {:>8} {:>12} {:>12} {:>12} {:>8}", "n", "|C1|", "cover", "kklv", "clean", "ratio");
    for row in &report.rows {
        println!(
            "{:>6} {:>8.1} {:>12.1} {:>12.1} {:>12.1} {:>8.3}",
            row.size,
            row.median_component,
            row.median_cover,
            row.median_kklv_lower.unwrap_or(f64::NAN),
            row.median_upper_clean.unwrap_or(f64::NAN),
            row.ratio
        );
    }
    let fit = report.fitted_exponent;
    println!("exponent {:.3} [{:.3}, {:.3}]", fit.exponent, fit.ci_low, fit.ci_high);
    Ok(())
}
