//! Tail of the local-time difference at an inverse local time.

use covertime::graph::named::cycle;
use covertime::walk::local_time_tail_check;

fn main() -> covertime::Result<()> {
    let g = cycle(8);
    for level in [1.0, 4.0] {
        let points = local_time_tail_check(&g, 0, 4, level, &[0.5, 1.0, 2.0, 4.0], 200_000, 9)?;
        for p in points {
            println!(
                "t = {level}  lambda = {:<4} P = {:.4} +- {:.4}  bound {:.4}",
                p.lambda, p.empirical_prob, p.std_err, p.bound
            );
        }
    }
    Ok(())
}
