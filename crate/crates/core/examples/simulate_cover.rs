//! Monte Carlo estimates of cover, blanket, hitting and return times.

use covertime::graph::named::hypercube;
use covertime::{simulate, Quantity, SimConfig, StartPolicy};

fn main() -> covertime::Result<()> {
    let g = hypercube(5);
    let quantities = [
        Quantity::Cover,
        Quantity::CoverReturn,
        Quantity::Blanket,
        Quantity::Hitting { target: 31 },
        Quantity::Commute { target: 31 },
        Quantity::Return,
    ];
    for q in quantities {
        let est = simulate(&g, &SimConfig::new(q, StartPolicy::Fixed(0), 2_000, 1))?;
        println!("{:<14} {:>10.2} +- {:.2}", est.quantity.to_string(), est.mean, est.std_err);
    }
    let stationary = simulate(&g, &SimConfig::new(Quantity::Cover, StartPolicy::Stationary, 2_000, 2))?;
    println!("cover from stationary start {:.2}", stationary.mean);
    println!("{}", serde_json::to_string(&stationary).unwrap());
    Ok(())
}
