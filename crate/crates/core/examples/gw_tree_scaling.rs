//! Cover time of uniform random trees against k^(3/2).

use covertime::experiments::{run_gw_scaling, TreeScalingConfig};

fn main() -> covertime::Result<()> {
    let mut config = TreeScalingConfig::new(vec![128, 256, 512, 1024]);
    config.seeds = 10;
    let report = run_gw_scaling(&config)?;
    print!("{}", report.to_csv());
    let fit = report.fitted_exponent;
    println!("exponent {:.3} [{:.3}, {:.3}], sandwich violations {}", fit.exponent, fit.ci_low, fit.ci_high, report.sandwich_violations);
    Ok(())
}
