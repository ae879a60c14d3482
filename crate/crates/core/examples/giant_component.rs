//! The supercritical giant built from a kernel, subdivided paths and
//! Poisson trees, compared with the giant of G(n, p).

use covertime::generators::{giant_model, gnp, GiantModelParams};

fn main() -> covertime::Result<()> {
    let (n, eps) = (20_000, 0.1);
    let params = GiantModelParams::new(n, eps)?;
    println!("mu = {:.6}, Lambda ~ N({:.4}, {:.2e})", params.mu, params.lambda_mean, params.lambda_var);
    for seed in 0..3 {
        let s = giant_model(&params, seed)?;
        let giant = gnp(n, (1.0 + eps) / n as f64, seed)?.largest_component();
        println!(
            "seed {seed}: model |V| = {:<6} kernel {} vertices / {} edges (attempts {}), 2-core {}; gnp giant {}",
            s.graph.vertex_count(),
            s.kernel.vertex_count(),
            s.kernel.edge_count(),
            s.kernel_attempts,
            s.core_vertices,
            giant.len()
        );
    }
    Ok(())
}
