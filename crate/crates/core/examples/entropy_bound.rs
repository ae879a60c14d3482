//! Packing profile and cover-time bounds for a 2D torus.

use covertime::bounds::{analyze, BoundOptions};
use covertime::graph::named::torus;

fn main() -> covertime::Result<()> {
    let g = torus(20, 2);
    let analysis = analyze(&g, BoundOptions::default())?;
    let report = &analysis.report;
    println!("R = {:.4}, levels up to {}", report.diameter, analysis.profile.truncation_level);
    for level in &report.levels {
        println!("  i={:<2} radius {:<10.5} |A_i| = {:<4} alpha = {:.4}", level.i, level.radius, level.size, level.alpha);
    }
    println!("kklv lower     {:.1}", report.kklv_lower);
    println!("matthews lower {:.1}", report.matthews_lower.unwrap_or(f64::NAN));
    println!("upper (clean)  {:.1}", report.upper_clean);
    println!("upper          {:.3e}", report.upper_theorem);
    println!("{}", serde_json::to_string_pretty(report).unwrap());
    Ok(())
}
