//! Reference computations shared by the integration tests. Everything here
//! is deliberately naive: dense linear algebra and brute force.

#![allow(dead_code)]

use covertime::generators::{gnp, seeded_rng};
use covertime::MultiGraph;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// All-pairs effective resistance from the pseudoinverse of the Laplacian,
/// computed as `(L + J/n)^-1 - J/n`.
pub fn resistance_matrix(g: &MultiGraph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut l = DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
    for &(u, v, m) in g.edges() {
        if u == v {
            continue;
        }
        let m = m as f64;
        l[(u, u)] += m;
        l[(v, v)] += m;
        l[(u, v)] -= m;
        l[(v, u)] -= m;
    }
    let pinv = l.try_inverse().expect("connected graph");
    DMatrix::from_fn(n, n, |i, j| pinv[(i, i)] + pinv[(j, j)] - 2.0 * pinv[(i, j)])
}

/// Expected hitting times of `target` from every vertex by solving
/// `h(x) = 1 + sum_y P(x, y) h(y)` with `h(target) = 0`.
pub fn hitting_column(g: &MultiGraph, target: usize) -> Vec<f64> {
    let n = g.vertex_count();
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut b = DVector::<f64>::from_element(n, 1.0);
    for x in 0..n {
        if x == target {
            b[x] = 0.0;
            continue;
        }
        let d = g.degree(x) as f64;
        for &(y, m) in g.neighbors(x) {
            // a loop contributes two edge-ends back to x
            let w = if y == x { 2.0 * m as f64 } else { m as f64 };
            a[(x, y)] -= w / d;
        }
    }
    let h = a.lu().solve(&b).expect("nonsingular hitting system");
    h.iter().copied().collect()
}

/// Connected `G(n, p)` sample by rejection, `n` uniform in `lo..=hi`.
pub fn random_connected(seed: u64, lo: usize, hi: usize) -> MultiGraph {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(lo..=hi);
    let p = rng.random_range(0.3..0.8);
    loop {
        let g = gnp(n, p, rng.random()).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// Adds `extra` random edge copies, loops included.
pub fn sprinkle(g: &MultiGraph, extra: usize, seed: u64) -> MultiGraph {
    let mut rng = seeded_rng(seed);
    let n = g.vertex_count();
    let mut h = g.clone();
    for _ in 0..extra {
        h = h.add_edge(rng.random_range(0..n), rng.random_range(0..n)).unwrap();
    }
    h
}

/// Smallest number of closed balls of the given radius (centers at
/// vertices) covering every vertex, by exhaustive search over subsets.
pub fn brute_force_cover(r: &DMatrix<f64>, radius: f64, inside: impl Fn(f64, f64) -> bool) -> usize {
    let n = r.nrows();
    let balls: Vec<u32> = (0..n)
        .map(|c| (0..n).filter(|&x| inside(r[(c, x)], radius)).fold(0u32, |m, x| m | 1 << x))
        .collect();
    let full = (1u32 << n) - 1;
    (1..=n)
        .find(|&size| {
            (0u32..1 << n)
                .filter(|s| s.count_ones() as usize == size)
                .any(|s| (0..n).filter(|&c| s >> c & 1 == 1).fold(0, |m, c| m | balls[c]) == full)
        })
        .unwrap()
}
