//! Random graph and tree samplers.
//!
//! Every sampler is a pure function of its parameters and a `u64` seed; the
//! seed feeds a ChaCha8 generator.

use std::collections::{BinaryHeap, HashSet};
use std::cmp::Reverse;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::graph::{named, ComponentView, MultiGraph};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi `G(n, p)` by geometric skipping over the `n(n-1)/2` pairs.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<MultiGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = seeded_rng(seed);
    MultiGraph::from_edges(n, gnp_pairs(n, p, &mut rng))
}

fn gnp_pairs<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    if p <= 0.0 || n < 2 {
        return Vec::new();
    }
    if p >= 1.0 {
        return (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
    }
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

/// Uniform labeled tree on `k` vertices by decoding a uniform Prüfer sequence.
pub fn uniform_labeled_tree(k: usize, seed: u64) -> Result<MultiGraph> {
    if k == 0 {
        return Err(Error::contract("tree needs at least one vertex"));
    }
    let mut rng = seeded_rng(seed);
    if k <= 2 {
        return MultiGraph::from_edges(k, (1..k).map(|v| (0, v)));
    }
    let code: Vec<usize> = (0..k - 2).map(|_| rng.random_range(0..k)).collect();
    MultiGraph::from_edges(k, prufer_decode(k, &code))
}

/// Edges of the labeled tree with Prüfer code `code` (length `k - 2`).
pub fn prufer_decode(k: usize, code: &[usize]) -> Vec<(usize, usize)> {
    debug_assert_eq!(code.len() + 2, k);
    let mut remaining = vec![1usize; k];
    for &c in code {
        remaining[c] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..k)
        .filter(|&v| remaining[v] == 1)
        .map(Reverse)
        .collect();
    let mut edges = Vec::with_capacity(k - 1);
    for &c in code {
        let Reverse(leaf) = leaves.pop().expect("a tree code always has a leaf");
        edges.push((leaf.min(c), leaf.max(c)));
        remaining[c] -= 1;
        if remaining[c] == 1 {
            leaves.push(Reverse(c));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    edges.push((a.min(b), a.max(b)));
    edges
}

#[derive(Debug, Clone)]
pub struct PgwTree {
    /// Rooted at vertex 0, vertices numbered in breadth-first order.
    pub tree: MultiGraph,
    pub size: usize,
    pub height: usize,
    /// Set when growth stopped at the size cap.
    pub truncated: bool,
}

/// Poisson(`mu`) Galton–Watson tree grown breadth first.
pub fn pgw_tree(mu: f64, seed: u64, size_cap: usize) -> Result<PgwTree> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::contract(format!("offspring mean {mu} outside (0, 1]")));
    }
    if size_cap == 0 {
        return Err(Error::contract("size cap must be at least 1"));
    }
    let mut rng = seeded_rng(seed);
    let mut edges = Vec::new();
    let grown = grow_pgw(mu, size_cap, 0, 1, &mut edges, &mut rng);
    let size = grown.size;
    Ok(PgwTree {
        tree: MultiGraph::from_edges(size, edges)?,
        size,
        height: grown.height,
        truncated: grown.truncated,
    })
}

struct Grown {
    size: usize,
    height: usize,
    truncated: bool,
}

/// Grows a PGW tree below `root`, numbering new vertices from `next_id`.
fn grow_pgw<R: Rng>(
    mu: f64,
    size_cap: usize,
    root: usize,
    next_id: usize,
    edges: &mut Vec<(usize, usize)>,
    rng: &mut R,
) -> Grown {
    let offspring = Poisson::new(mu).expect("mu is positive");
    let mut frontier = vec![root];
    let mut next = next_id;
    let mut size = 1;
    let mut height = 0;
    while !frontier.is_empty() {
        let mut children = Vec::new();
        for &parent in &frontier {
            let count = offspring.sample(rng) as usize;
            for _ in 0..count {
                if size == size_cap {
                    return Grown {
                        size,
                        height: height + usize::from(!children.is_empty()),
                        truncated: true,
                    };
                }
                edges.push((parent, next));
                children.push(next);
                next += 1;
                size += 1;
            }
        }
        if !children.is_empty() {
            height += 1;
        }
        frontier = children;
    }
    Grown {
        size,
        height,
        truncated: false,
    }
}

/// The root in `(0, 1)` of `mu e^-mu = (1 + eps) e^-(1 + eps)`.
pub fn conjugate_mu(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::contract(format!(
            "conjugate needs epsilon > 0, got {epsilon}"
        )));
    }
    let target = (1.0 + epsilon) * (-(1.0 + epsilon)).exp();
    let f = |x: f64| x * (-x).exp() - target;
    // x e^-x is increasing on (0, 1)
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiantModelParams {
    pub n: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub lambda_mean: f64,
    pub lambda_var: f64,
}

impl GiantModelParams {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("giant model needs n >= 1"));
        }
        let mu = conjugate_mu(epsilon)?;
        Ok(GiantModelParams {
            n,
            epsilon,
            mu,
            lambda_mean: 1.0 + epsilon - mu,
            lambda_var: 1.0 / (epsilon * n as f64),
        })
    }
}

#[derive(Debug, Clone)]
pub struct GiantSample {
    pub graph: MultiGraph,
    /// Kernel on vertices `0..N`; these ids are kept in `graph`.
    pub kernel: MultiGraph,
    /// Length of the path replacing each kernel edge, in `kernel.edges()` order
    /// (one entry per edge copy).
    pub path_lengths: Vec<usize>,
    /// Vertex count of the subdivided kernel (the tree roots).
    pub core_vertices: usize,
    pub lambda: f64,
    /// Extra draws of the whole degree vector (parity or empty kernel).
    pub degree_resamples: usize,
    pub negative_lambda_draws: usize,
    pub kernel_attempts: usize,
    /// False when rejection never produced a simple kernel and the last
    /// configuration-model multigraph was kept.
    pub kernel_simple: bool,
}

const MAX_DEGENERATE_RESAMPLES: usize = 100;
const MAX_KERNEL_ATTEMPTS: usize = 10_000;

/// Three-step construction of the supercritical giant component: a kernel
/// with Poisson(Λ) degrees conditioned to be at least 3, edges subdivided by
/// Geom(1 − μ) paths, and a PGW(μ) tree hung from every vertex.
pub fn giant_model(params: &GiantModelParams, seed: u64) -> Result<GiantSample> {
    let mut rng = seeded_rng(seed);
    let normal = Normal::new(params.lambda_mean, params.lambda_var.sqrt())
        .map_err(|e| Error::contract(format!("bad Λ distribution: {e}")))?;

    let mut degree_resamples = 0;
    let mut negative_lambda_draws = 0;
    let mut empty_rounds = 0;
    let (lambda, kernel_degrees) = loop {
        let lambda = loop {
            let x: f64 = normal.sample(&mut rng);
            if x > 0.0 {
                break x;
            }
            negative_lambda_draws += 1;
        };
        let poisson = Poisson::new(lambda).expect("lambda is positive");
        let degrees = loop {
            let d: Vec<usize> = (0..params.n)
                .map(|_| poisson.sample(&mut rng) as usize)
                .filter(|&d| d >= 3)
                .collect();
            if d.iter().sum::<usize>() % 2 == 0 {
                break d;
            }
            degree_resamples += 1;
        };
        if !degrees.is_empty() {
            break (lambda, degrees);
        }
        empty_rounds += 1;
        degree_resamples += 1;
        if empty_rounds >= MAX_DEGENERATE_RESAMPLES {
            return Err(Error::Degenerate(format!(
                "empty kernel after {MAX_DEGENERATE_RESAMPLES} resamples (n = {}, eps = {})",
                params.n, params.epsilon
            )));
        }
    };

    let (kernel, kernel_attempts, kernel_simple) = configuration_model(&kernel_degrees, &mut rng)?;

    let big_n = kernel.vertex_count();
    let log_mu = params.mu.ln();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut path_lengths = Vec::new();
    let mut next = big_n;
    for &(u, v, m) in kernel.edges() {
        for _ in 0..m {
            // support {1, 2, ...}, P(L = l) = (1 - mu) mu^(l - 1)
            let r: f64 = rng.random();
            let len = 1 + ((1.0 - r).ln() / log_mu).floor() as usize;
            path_lengths.push(len);
            let mut prev = u;
            for _ in 1..len {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, v));
        }
    }
    let core_vertices = next;
    for root in 0..core_vertices {
        let grown = grow_pgw(params.mu, usize::MAX, root, next, &mut edges, &mut rng);
        next += grown.size - 1;
    }
    Ok(GiantSample {
        graph: MultiGraph::from_edges(next, edges)?,
        kernel,
        path_lengths,
        core_vertices,
        lambda,
        degree_resamples,
        negative_lambda_draws,
        kernel_attempts,
        kernel_simple,
    })
}

/// Configuration model on `degrees`, rejecting until simple.
///
/// Returns the graph, the attempts used and whether it is simple. After
/// `MAX_KERNEL_ATTEMPTS` failures the last multigraph is returned unflagged
/// as simple.
fn configuration_model<R: Rng>(degrees: &[usize], rng: &mut R) -> Result<(MultiGraph, usize, bool)> {
    let total: usize = degrees.iter().sum();
    if !total.is_multiple_of(2) {
        return Err(Error::contract("configuration model needs an even degree sum"));
    }
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    let mut last = Vec::new();
    for attempt in 1..=MAX_KERNEL_ATTEMPTS {
        stubs.shuffle(rng);
        let pairs: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let mut seen = HashSet::with_capacity(pairs.len());
        let simple = pairs
            .iter()
            .all(|&(a, b)| a != b && seen.insert((a.min(b), a.max(b))));
        if simple {
            return Ok((MultiGraph::from_edges(degrees.len(), pairs)?, attempt, true));
        }
        last = pairs;
    }
    Ok((
        MultiGraph::from_edges(degrees.len(), last)?,
        MAX_KERNEL_ATTEMPTS,
        false,
    ))
}

/// Random `d`-regular simple graph on `n` vertices (configuration model with rejection).
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<MultiGraph> {
    let mut rng = seeded_rng(seed);
    random_regular_with(n, d, &mut rng)
}

fn random_regular_with<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<MultiGraph> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::contract(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let (g, attempts, simple) = configuration_model(&vec![d; n], rng)?;
    if !simple {
        return Err(Error::Degenerate(format!(
            "no simple {d}-regular sample after {attempts} attempts"
        )));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseKind {
    Complete(usize),
    Hypercube(u32),
    Torus { side: usize, dim: u32 },
    RandomRegular { n: usize, d: usize },
    FromFile(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseGraphSpec {
    pub kind: BaseKind,
    pub p: f64,
}

/// Bond percolation: keeps every edge copy of the base graph with probability `p`.
pub fn percolate(base: &BaseGraphSpec, seed: u64) -> Result<(MultiGraph, ComponentView)> {
    let p = base.p;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("retention probability {p} outside [0, 1]")));
    }
    let mut rng = seeded_rng(seed);
    let full = match &base.kind {
        BaseKind::Complete(n) => MultiGraph::from_edges(*n, gnp_pairs(*n, p, &mut rng))?,
        kind => {
            let base_graph = match kind {
                BaseKind::Hypercube(m) => named::hypercube(*m),
                BaseKind::Torus { side, dim } => named::torus(*side, *dim),
                BaseKind::RandomRegular { n, d } => random_regular_with(*n, *d, &mut rng)?,
                BaseKind::FromFile(path) => {
                    MultiGraph::from_edge_list(BufReader::new(File::open(path)?))?
                }
                BaseKind::Complete(_) => unreachable!(),
            };
            let mut kept = Vec::new();
            for &(u, v, m) in base_graph.edges() {
                for _ in 0..m {
                    if rng.random::<f64>() < p {
                        kept.push((u, v));
                    }
                }
            }
            MultiGraph::from_edges(base_graph.vertex_count(), kept)?
        }
    };
    let largest = full.largest_component();
    Ok((full, largest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp(20, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gnp(20, 1.0, 1).unwrap(), complete(20));
        assert!(gnp(5, 1.5, 0).is_err());
    }

    #[test]
    fn gnp_edge_count_mean() {
        let (n, p) = (200, 0.05);
        let pairs = (n * (n - 1) / 2) as f64;
        let counts: Vec<f64> = (0..200).map(|s| gnp(n, p, s).unwrap().edge_count() as f64).collect();
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        let se = (pairs * p * (1.0 - p) / counts.len() as f64).sqrt();
        assert!((mean - pairs * p).abs() < 4.0 * se, "{mean}");
        assert!(gnp(n, p, 3).unwrap().is_simple());
    }

    #[test]
    fn gnp_is_pure_in_seed() {
        assert_eq!(gnp(300, 0.01, 9).unwrap(), gnp(300, 0.01, 9).unwrap());
        assert_ne!(gnp(300, 0.01, 9).unwrap(), gnp(300, 0.01, 10).unwrap());
    }

    #[test]
    fn small_trees() {
        assert_eq!(uniform_labeled_tree(1, 0).unwrap().vertex_count(), 1);
        let t2 = uniform_labeled_tree(2, 0).unwrap();
        assert_eq!(t2.edges(), &[(0, 1, 1)]);
        for s in 0..50 {
            let t = uniform_labeled_tree(30, s).unwrap();
            assert_eq!(t.edge_count(), 29);
            assert!(t.is_connected() && t.is_simple());
        }
    }

    #[test]
    fn prufer_known_code() {
        // code [3, 3, 3] on 5 vertices is the star centered at 3 with leaves 0,1,2,4
        let mut e = prufer_decode(5, &[3, 3, 3]);
        e.sort();
        assert_eq!(e, vec![(0, 3), (1, 3), (2, 3), (3, 4)]);
    }

    #[test]
    fn pgw_small_mu_is_a_root() {
        let singles = (0..2000).filter(|&s| pgw_tree(1e-3, s, 100).unwrap().size == 1).count();
        assert!(singles > 1980);
    }

    #[test]
    fn pgw_root_degree_mean() {
        let mu = 0.7;
        let degs: Vec<f64> = (0..20_000)
            .map(|s| pgw_tree(mu, s, 1_000).unwrap().tree.degree(0) as f64)
            .collect();
        let mean = degs.iter().sum::<f64>() / degs.len() as f64;
        let se = (mu / degs.len() as f64).sqrt();
        assert!((mean - mu).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn pgw_truncation_flag() {
        let t = (0..200)
            .map(|s| pgw_tree(1.0, s, 5).unwrap())
            .find(|t| t.truncated)
            .expect("critical trees exceed 5 vertices often");
        assert_eq!(t.size, 5);
        assert!(t.tree.is_connected());
        assert!(pgw_tree(0.0, 0, 5).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let mu = conjugate_mu(0.2).unwrap();
        assert!(mu > 0.8 && mu < 0.85);
        assert!((mu * (-mu).exp() - 1.2 * (-1.2f64).exp()).abs() < 1e-12);
        let tiny = conjugate_mu(1e-8).unwrap();
        assert!(tiny > 1.0 - 1e-7 && tiny < 1.0);
        assert!(conjugate_mu(0.0).is_err());
        assert!(conjugate_mu(-1.0).is_err());
    }

    #[test]
    fn giant_structure() {
        let params = GiantModelParams::new(20_000, 0.2).unwrap();
        let s = giant_model(&params, 4).unwrap();
        assert!(s.kernel.degrees().iter().all(|&d| d >= 3));
        assert_eq!(s.kernel.degrees().iter().sum::<u64>() % 2, 0);
        assert!(s.kernel_simple);
        assert_eq!(s.path_lengths.len() as u64, s.kernel.edge_count());
        let internal: usize = s.path_lengths.iter().map(|l| l - 1).sum();
        assert_eq!(s.core_vertices, s.kernel.vertex_count() + internal);
        assert_eq!(s.graph.edge_count() as usize, s.graph.vertex_count() - 1 + s.kernel.edge_count() as usize - s.kernel.vertex_count() + 1);
        assert_eq!(
            giant_model(&params, 4).unwrap().graph,
            s.graph,
        );
    }

    #[test]
    fn percolation_examples() {
        let (full, largest) = percolate(&BaseGraphSpec { kind: BaseKind::Hypercube(3), p: 1.0 }, 0).unwrap();
        assert_eq!(full, hypercube(3));
        assert_eq!(largest.len(), 8);
        let (full, largest) = percolate(&BaseGraphSpec { kind: BaseKind::Torus { side: 5, dim: 2 }, p: 0.0 }, 0).unwrap();
        assert_eq!(full.edge_count(), 0);
        assert_eq!(largest.len(), 1);
        let (full, _) = percolate(&BaseGraphSpec { kind: BaseKind::Torus { side: 5, dim: 2 }, p: 1.0 }, 0).unwrap();
        assert_eq!(full.vertex_count(), 25);
        assert!(full.degrees().iter().all(|&d| d == 4));
        let (full, _) = percolate(&BaseGraphSpec { kind: BaseKind::RandomRegular { n: 50, d: 3 }, p: 1.0 }, 2).unwrap();
        assert!(full.is_simple() && full.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn percolation_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, "0 1\n1 2\n2 0\n").unwrap();
        let (full, largest) = percolate(&BaseGraphSpec { kind: BaseKind::FromFile(path), p: 1.0 }, 0).unwrap();
        assert_eq!(full, cycle(3));
        assert_eq!(largest.len(), 3);
        let missing = BaseGraphSpec { kind: BaseKind::FromFile("/nonexistent/x".into()), p: 1.0 };
        assert!(percolate(&missing, 0).is_err());
    }
}
