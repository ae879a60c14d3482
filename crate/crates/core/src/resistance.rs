//! Effective resistance on a connected multigraph with unit conductance per
//! edge copy.
//!
//! The oracle peels the graph down to its 2-core first. Every peeled vertex
//! hangs off exactly one core vertex through a tree of bridges, so
//! resistances involving it reduce to tree distances plus one core query.
//! Only the core Laplacian, grounded at its smallest vertex, is factorized:
//! densely up to `dense_limit` vertices, by preconditioned conjugate
//! gradients with a per-vertex column cache beyond that.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Largest core handled by a dense factorization.
    pub dense_limit: usize,
    /// Relative residual tolerance for the iterative solver.
    pub cg_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            dense_limit: 4096,
            cg_tolerance: 1e-10,
        }
    }
}

#[derive(Debug)]
pub struct ResistanceOracle {
    n: usize,
    /// Core index of the core vertex each vertex hangs from.
    attach: Vec<usize>,
    depth: Vec<u32>,
    lca: EulerLca,
    core: CoreSolver,
}

impl ResistanceOracle {
    pub fn new(g: &MultiGraph) -> Result<Self> {
        Self::with_config(g, OracleConfig::default())
    }

    pub fn with_config(g: &MultiGraph, config: OracleConfig) -> Result<Self> {
        let n = g.vertex_count();
        if n == 0 {
            return Err(Error::contract("resistance oracle needs at least one vertex"));
        }
        if !g.is_connected() {
            return Err(Error::contract("resistance oracle needs a connected graph"));
        }

        let in_core = two_core(g);
        let mut core_vertices: Vec<usize> = (0..n).filter(|&v| in_core[v]).collect();
        if core_vertices.is_empty() {
            // a tree: root everything at vertex 0
            core_vertices.push(0);
        }
        let mut core_index = vec![usize::MAX; n];
        for (i, &v) in core_vertices.iter().enumerate() {
            core_index[v] = i;
        }

        // Hanging forest: BFS out of each core vertex through non-core vertices.
        let mut attach = vec![usize::MAX; n];
        let mut depth = vec![0u32; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ci, &root) in core_vertices.iter().enumerate() {
            attach[root] = ci;
            let mut queue = vec![root];
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head];
                head += 1;
                for &(y, _) in g.neighbors(x) {
                    if y != x && core_index[y] == usize::MAX && attach[y] == usize::MAX {
                        attach[y] = ci;
                        depth[y] = depth[x] + 1;
                        children[x].push(y);
                        queue.push(y);
                    }
                }
            }
        }
        debug_assert!(attach.iter().all(|&a| a != usize::MAX));
        let lca = EulerLca::new(&core_vertices, &children, &depth);

        let core = CoreSolver::new(g, &core_vertices, &core_index, config);
        Ok(ResistanceOracle {
            n,
            attach,
            depth,
            lca,
            core,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of vertices in the factorized 2-core.
    pub fn core_size(&self) -> usize {
        self.core.size()
    }

    /// True when the core is handled by the iterative solver.
    pub fn is_iterative(&self) -> bool {
        matches!(self.core, CoreSolver::Iterative(_))
    }

    /// Largest relative residual reached by any iterative solve so far (0 for dense).
    pub fn solver_residual(&self) -> f64 {
        match &self.core {
            CoreSolver::Iterative(cg) => *cg.worst_residual.read().unwrap(),
            _ => 0.0,
        }
    }

    /// Effective resistance between `u` and `v`.
    pub fn resistance(&self, u: usize, v: usize) -> Result<f64> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::Domain(x));
            }
        }
        Ok(self.resistance_unchecked(u, v))
    }

    pub(crate) fn resistance_unchecked(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        let (au, av) = (self.attach[u], self.attach[v]);
        if au == av {
            let w = self.lca.query(u, v);
            (self.depth[u] + self.depth[v] - 2 * self.depth[w]) as f64
        } else {
            (self.depth[u] + self.depth[v]) as f64 + self.core.resistance(au, av)
        }
    }

    /// Resistances from `u` to every vertex.
    pub fn row(&self, u: usize) -> Vec<f64> {
        (0..self.n).map(|v| self.resistance_unchecked(u, v)).collect()
    }

    /// Resistance diameter; exact when `k <= k_exact`, otherwise a lower
    /// bound from farthest-point sweeps.
    pub fn diameter(&self, k_exact: usize) -> ResistanceDiameter {
        let n = self.n;
        if n == 1 {
            return ResistanceDiameter {
                value: 0.0,
                pair: (0, 0),
                provenance: Provenance::Exact,
                min_positive: f64::INFINITY,
            };
        }
        if n <= k_exact {
            let mut best = (0.0, (0, 0));
            let mut min_positive = f64::INFINITY;
            for u in 0..n {
                for v in u + 1..n {
                    let r = self.resistance_unchecked(u, v);
                    if r > best.0 {
                        best = (r, (u, v));
                    }
                    if r > 0.0 && r < min_positive {
                        min_positive = r;
                    }
                }
            }
            return ResistanceDiameter {
                value: best.0,
                pair: best.1,
                provenance: Provenance::Exact,
                min_positive,
            };
        }
        const SWEEPS: usize = 8;
        let mut best = (0.0, (0, 0));
        let mut min_positive = f64::INFINITY;
        let mut source = 0;
        for _ in 0..SWEEPS {
            let row = self.row(source);
            let (far, r) = row
                .iter()
                .enumerate()
                .fold((source, 0.0), |acc, (v, &r)| if r > acc.1 { (v, r) } else { acc });
            for &r in &row {
                if r > 0.0 && r < min_positive {
                    min_positive = r;
                }
            }
            if r > best.0 {
                best = (r, (source.min(far), source.max(far)));
            } else if far == best.1 .0 || far == best.1 .1 {
                break;
            }
            source = far;
        }
        ResistanceDiameter {
            value: best.0,
            pair: best.1,
            provenance: Provenance::Approximate,
            min_positive,
        }
    }
}

/// Whether a reported resistance diameter is the exact maximum or a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Approximate,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Approximate => "approximate",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ResistanceDiameter {
    pub value: f64,
    pub pair: (usize, usize),
    pub provenance: Provenance,
    /// Smallest positive resistance seen while scanning.
    pub min_positive: f64,
}

/// Marks vertices of the 2-core (loops ignored, parallel edges counted).
fn two_core(g: &MultiGraph) -> Vec<bool> {
    let n = g.vertex_count();
    let mut deg: Vec<u64> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .filter(|&&(w, _)| w != v)
                .map(|&(_, m)| m as u64)
                .sum()
        })
        .collect();
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &(w, m) in g.neighbors(v) {
            if w != v && alive[w] {
                deg[w] -= m as u64;
                if deg[w] <= 1 {
                    stack.push(w);
                }
            }
        }
    }
    alive
}

/// Constant-time LCA on the hanging forest via an Euler tour and a sparse table.
#[derive(Debug)]
struct EulerLca {
    first: Vec<usize>,
    tour: Vec<usize>,
    table: Vec<Vec<u32>>,
    depth_on_tour: Vec<u32>,
}

impl EulerLca {
    fn new(roots: &[usize], children: &[Vec<usize>], depth: &[u32]) -> Self {
        let n = children.len();
        let mut first = vec![usize::MAX; n];
        let mut tour = Vec::with_capacity(2 * n);
        for &root in roots {
            let mut stack = vec![(root, 0usize)];
            first[root] = tour.len();
            tour.push(root);
            while let Some(&mut (x, ref mut next)) = stack.last_mut() {
                if *next < children[x].len() {
                    let c = children[x][*next];
                    *next += 1;
                    first[c] = tour.len();
                    tour.push(c);
                    stack.push((c, 0));
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        tour.push(p);
                    }
                }
            }
        }
        let depth_on_tour: Vec<u32> = tour.iter().map(|&x| depth[x]).collect();
        let m = tour.len();
        let mut table = vec![(0..m as u32).collect::<Vec<u32>>()];
        let mut span = 1;
        while 2 * span <= m {
            let prev = table.last().unwrap();
            let next: Vec<u32> = (0..=m - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth_on_tour[a as usize] <= depth_on_tour[b as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            table.push(next);
            span *= 2;
        }
        EulerLca {
            first,
            tour,
            table,
            depth_on_tour,
        }
    }

    fn query(&self, u: usize, v: usize) -> usize {
        let (mut a, mut b) = (self.first[u], self.first[v]);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let len = b - a + 1;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.table[level];
        let (x, y) = (row[a], row[b + 1 - (1 << level)]);
        let best = if self.depth_on_tour[x as usize] <= self.depth_on_tour[y as usize] {
            x
        } else {
            y
        };
        self.tour[best as usize]
    }
}

#[derive(Debug)]
enum CoreSolver {
    /// Single core vertex (the graph is a tree).
    Trivial,
    /// Inverse of the grounded core Laplacian; index 0 is the ground.
    Dense(DMatrix<f64>),
    Iterative(IterativeCore),
}

impl CoreSolver {
    fn new(
        g: &MultiGraph,
        core_vertices: &[usize],
        core_index: &[usize],
        config: OracleConfig,
    ) -> Self {
        let k = core_vertices.len();
        if k == 1 {
            return CoreSolver::Trivial;
        }
        // Grounded Laplacian on core indices 1..k, stored at offset -1.
        let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k - 1];
        let mut diag = vec![0.0; k - 1];
        for (ci, &v) in core_vertices.iter().enumerate() {
            for &(w, m) in g.neighbors(v) {
                let cw = core_index[w];
                if w == v || cw == usize::MAX {
                    continue;
                }
                if ci > 0 {
                    diag[ci - 1] += m as f64;
                    if cw > 0 {
                        entries[ci - 1].push((cw - 1, -(m as f64)));
                    }
                }
            }
        }
        if k <= config.dense_limit {
            let mut lap = DMatrix::<f64>::zeros(k - 1, k - 1);
            for i in 0..k - 1 {
                lap[(i, i)] = diag[i];
                for &(j, c) in &entries[i] {
                    lap[(i, j)] += c;
                }
            }
            let inverse = lap
                .cholesky()
                .expect("grounded Laplacian of a connected graph is positive definite")
                .inverse();
            CoreSolver::Dense(inverse)
        } else {
            CoreSolver::Iterative(IterativeCore {
                diag,
                entries,
                tolerance: config.cg_tolerance,
                columns: RwLock::new(HashMap::new()),
                worst_residual: RwLock::new(0.0),
            })
        }
    }

    fn size(&self) -> usize {
        match self {
            CoreSolver::Trivial => 1,
            CoreSolver::Dense(m) => m.nrows() + 1,
            CoreSolver::Iterative(cg) => cg.diag.len() + 1,
        }
    }

    fn resistance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        match self {
            CoreSolver::Trivial => 0.0,
            CoreSolver::Dense(inv) => {
                let g = |i: usize, j: usize| {
                    if i == 0 || j == 0 {
                        0.0
                    } else {
                        inv[(i - 1, j - 1)]
                    }
                };
                g(a, a) + g(b, b) - 2.0 * g(a, b)
            }
            CoreSolver::Iterative(cg) => {
                if a == 0 {
                    return cg.column(b)[b - 1];
                }
                if b == 0 {
                    return cg.column(a)[a - 1];
                }
                let ca = cg.column(a);
                let cb = cg.column(b);
                ca[a - 1] + cb[b - 1] - 2.0 * ca[b - 1]
            }
        }
    }
}

#[derive(Debug)]
struct IterativeCore {
    diag: Vec<f64>,
    entries: Vec<Vec<(usize, f64)>>,
    tolerance: f64,
    columns: RwLock<HashMap<usize, Arc<Vec<f64>>>>,
    worst_residual: RwLock<f64>,
}

impl IterativeCore {
    /// Column `a` (core index, nonzero) of the grounded inverse.
    fn column(&self, a: usize) -> Arc<Vec<f64>> {
        if let Some(col) = self.columns.read().unwrap().get(&a) {
            return Arc::clone(col);
        }
        let mut rhs = vec![0.0; self.diag.len()];
        rhs[a - 1] = 1.0;
        let (x, residual) = self.solve(&rhs);
        {
            let mut worst = self.worst_residual.write().unwrap();
            if residual > *worst {
                *worst = residual;
            }
        }
        let col = Arc::new(x);
        self.columns
            .write()
            .unwrap()
            .entry(a)
            .or_insert_with(|| Arc::clone(&col))
            .clone()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut s = self.diag[i] * x[i];
            for &(j, c) in &self.entries[i] {
                s += c * x[j];
            }
            out[i] = s;
        }
    }

    /// Jacobi-preconditioned conjugate gradients; returns the iterate and its
    /// relative residual.
    fn solve(&self, b: &[f64]) -> (Vec<f64>, f64) {
        let n = b.len();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let bnorm = dot(b, b).sqrt();
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let max_iter = 20 * n + 100;
        let mut rel = dot(&r, &r).sqrt() / bnorm;
        for _ in 0..max_iter {
            if rel <= self.tolerance {
                break;
            }
            self.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            rel = dot(&r, &r).sqrt() / bnorm;
            for i in 0..n {
                z[i] = r[i] / self.diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        (x, rel)
    }
}

/// Exact expected hitting times from the resistance metric.
///
/// With `phi(x) = sum_w d_w R(x, w)` the hitting time is
/// `E_u tau_v = |E| R(u, v) + (phi(v) - phi(u)) / 2`.
#[derive(Debug)]
pub struct HittingTimes<'a> {
    oracle: &'a ResistanceOracle,
    phi: Vec<f64>,
    edge_count: f64,
}

impl<'a> HittingTimes<'a> {
    pub fn new(oracle: &'a ResistanceOracle, g: &MultiGraph) -> Result<Self> {
        if g.vertex_count() != oracle.vertex_count() {
            return Err(Error::contract("graph and oracle sizes differ"));
        }
        let n = g.vertex_count();
        let degrees: Vec<f64> = g.degrees().iter().map(|&d| d as f64).collect();
        let phi = (0..n)
            .map(|x| {
                (0..n)
                    .map(|w| degrees[w] * oracle.resistance_unchecked(x, w))
                    .sum()
            })
            .collect();
        Ok(HittingTimes {
            oracle,
            phi,
            edge_count: g.edge_count() as f64,
        })
    }

    pub fn oracle(&self) -> &ResistanceOracle {
        self.oracle
    }

    /// Expected number of steps for a walk from `u` to first reach `v`.
    pub fn hitting_time(&self, u: usize, v: usize) -> Result<f64> {
        let r = self.oracle.resistance(u, v)?;
        Ok(self.hitting_with(u, v, r))
    }

    pub(crate) fn hitting_unchecked(&self, u: usize, v: usize) -> f64 {
        self.hitting_with(u, v, self.oracle.resistance_unchecked(u, v))
    }

    fn hitting_with(&self, u: usize, v: usize, r: f64) -> f64 {
        if u == v {
            return 0.0;
        }
        self.edge_count * r + 0.5 * (self.phi[v] - self.phi[u])
    }

    /// Dense `(u, v) -> E_u tau_v` matrix, row-major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.phi.len();
        (0..n)
            .map(|u| (0..n).map(|v| self.hitting_unchecked(u, v)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::graph::MultiGraph;
    use proptest::prelude::*;

    fn oracle(g: &MultiGraph) -> ResistanceOracle {
        ResistanceOracle::new(g).unwrap()
    }

    fn iterative(g: &MultiGraph) -> ResistanceOracle {
        ResistanceOracle::with_config(
            g,
            OracleConfig {
                dense_limit: 1,
                cg_tolerance: 1e-12,
            },
        )
        .unwrap()
    }

    /// Independent reference: pseudo-inverse of the full Laplacian (no peeling,
    /// no grounding), via a dense solve of `L + J/n`.
    fn reference_resistance(g: &MultiGraph) -> DMatrix<f64> {
        let n = g.vertex_count();
        let mut l = DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
        for &(u, v, m) in g.edges() {
            if u != v {
                let c = m as f64;
                l[(u, u)] += c;
                l[(v, v)] += c;
                l[(u, v)] -= c;
                l[(v, u)] -= c;
            }
        }
        let inv = l.try_inverse().unwrap();
        DMatrix::from_fn(n, n, |u, v| inv[(u, u)] + inv[(v, v)] - 2.0 * inv[(u, v)])
    }

    /// Independent reference: solve the one-step equations for hitting `target`.
    fn reference_hitting(g: &MultiGraph, target: usize) -> Vec<f64> {
        let n = g.vertex_count();
        let mut a = DMatrix::<f64>::identity(n, n);
        let mut b = nalgebra::DVector::<f64>::from_element(n, 1.0);
        for x in 0..n {
            if x == target {
                a.row_mut(x).fill(0.0);
                a[(x, x)] = 1.0;
                b[x] = 0.0;
                continue;
            }
            let d = g.degree(x) as f64;
            for &(y, m) in g.neighbors(x) {
                let ends = if y == x { 2.0 * m as f64 } else { m as f64 };
                if y != target {
                    a[(x, y)] -= ends / d;
                }
            }
        }
        a.lu().solve(&b).unwrap().iter().copied().collect()
    }

    #[test]
    fn series_and_parallel_laws() {
        let o = oracle(&path(4));
        assert_eq!(o.resistance(0, 3).unwrap(), 3.0);
        let par = MultiGraph::from_weighted_edges(2, [(0, 1, 2)]).unwrap();
        assert!((oracle(&par).resistance(0, 1).unwrap() - 0.5).abs() < 1e-12);
        let k4 = oracle(&complete(4));
        for (u, v) in [(0, 1), (1, 3), (2, 3)] {
            assert!((k4.resistance(u, v).unwrap() - 0.5).abs() < 1e-12);
        }
        let k3 = oracle(&complete(3));
        assert!((k3.resistance(0, 2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn loops_carry_no_current() {
        let g = path(3).add_edge(1, 1).unwrap().add_edge(2, 2).unwrap();
        let o = oracle(&g);
        assert_eq!(o.resistance(0, 2).unwrap(), 2.0);
    }

    #[test]
    fn domain_error_outside_component() {
        let o = oracle(&path(3));
        assert!(matches!(o.resistance(0, 3), Err(Error::Domain(3))));
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = MultiGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(ResistanceOracle::new(&g).is_err());
    }

    #[test]
    fn diameter_examples() {
        let single = oracle(&MultiGraph::empty(1)).diameter(4096);
        assert_eq!(single.value, 0.0);

        // cycle: R(u, v) = j (n - j) / n, maximized at antipodes
        let c8 = oracle(&cycle(8)).diameter(4096);
        assert!((c8.value - 2.0).abs() < 1e-12);
        assert_eq!((c8.pair.1 - c8.pair.0), 4);
        assert!((c8.min_positive - 7.0 / 8.0).abs() < 1e-12);

        let p = oracle(&path(11)).diameter(4096);
        assert_eq!(p.value, 10.0);
        assert_eq!(p.pair, (0, 10));
        assert_eq!(p.provenance, Provenance::Exact);
    }

    #[test]
    fn approximate_diameter_is_a_lower_bound() {
        let g = cycle(30).add_edge(0, 15).unwrap();
        let o = oracle(&g);
        let exact = o.diameter(4096);
        let approx = o.diameter(10);
        assert_eq!(approx.provenance, Provenance::Approximate);
        assert!(approx.value <= exact.value + 1e-12);
        assert!(approx.value > 0.5 * exact.value);
    }

    #[test]
    fn cycle_closed_form() {
        let n = 9;
        let o = oracle(&cycle(n));
        for j in 0..n {
            let expect = (j * (n - j)) as f64 / n as f64;
            assert!((o.resistance(0, j).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn hitting_examples() {
        let k2 = path(2);
        let o = oracle(&k2);
        let h = HittingTimes::new(&o, &k2).unwrap();
        assert!((h.hitting_time(0, 1).unwrap() - 1.0).abs() < 1e-12);

        let p3 = path(3);
        let o = oracle(&p3);
        let h = HittingTimes::new(&o, &p3).unwrap();
        assert!((h.hitting_time(0, 2).unwrap() - 4.0).abs() < 1e-12);
        let oracle_col = reference_hitting(&p3, 2);
        assert!((oracle_col[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn iterative_core_matches_dense() {
        let g = crate::graph::named::torus(4, 2)
            .add_edge(0, 5)
            .unwrap()
            .add_edge(3, 3)
            .unwrap();
        let dense = oracle(&g);
        let cg = iterative(&g);
        assert!(cg.is_iterative());
        for u in 0..g.vertex_count() {
            for v in 0..g.vertex_count() {
                let a = dense.resistance(u, v).unwrap();
                let b = cg.resistance(u, v).unwrap();
                assert!((a - b).abs() < 1e-9, "{u} {v}: {a} vs {b}");
            }
        }
        assert!(cg.solver_residual() <= 1e-12);
    }

    fn arb_connected() -> impl Strategy<Value = MultiGraph> {
        (2usize..14).prop_flat_map(|n| {
            (
                proptest::collection::vec(0usize..1000, n - 1),
                proptest::collection::vec((0..n, 0..n, 1u32..3), 0..12),
            )
                .prop_map(move |(parents, extra)| {
                    let mut triples: Vec<(usize, usize, u32)> = (1..n)
                        .map(|i| (parents[i - 1] % i, i, 1))
                        .collect();
                    triples.extend(extra);
                    MultiGraph::from_weighted_edges(n, triples).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_pseudoinverse_reference(g in arb_connected()) {
            let o = oracle(&g);
            let reference = reference_resistance(&g);
            let n = g.vertex_count();
            for u in 0..n {
                for v in 0..n {
                    let r = o.resistance(u, v).unwrap();
                    prop_assert!((r - reference[(u, v)]).abs() < 1e-8);
                }
            }
        }

        #[test]
        fn metric_axioms_and_distance_domination(g in arb_connected()) {
            let o = oracle(&g);
            let n = g.vertex_count();
            for u in 0..n {
                let dist = g.bfs_distances(u);
                for v in 0..n {
                    let r = o.resistance(u, v).unwrap();
                    prop_assert!((r - o.resistance(v, u).unwrap()).abs() < 1e-9);
                    if u != v {
                        prop_assert!(r > 0.0);
                    }
                    prop_assert!(r <= dist[v].unwrap() as f64 + 1e-9);
                    for w in 0..n {
                        let rw = o.resistance(u, w).unwrap() + o.resistance(w, v).unwrap();
                        prop_assert!(r <= rw + 1e-9);
                    }
                }
            }
        }

        #[test]
        fn hitting_times_match_one_step_equations(g in arb_connected()) {
            let o = oracle(&g);
            let h = HittingTimes::new(&o, &g).unwrap();
            let n = g.vertex_count();
            let e = g.edge_count() as f64;
            for v in 0..n {
                let reference = reference_hitting(&g, v);
                for u in 0..n {
                    let ours = h.hitting_time(u, v).unwrap();
                    prop_assert!((ours - reference[u]).abs() <= 1e-8 * reference[u].max(1.0));
                    let commute = ours + h.hitting_time(v, u).unwrap();
                    let identity = 2.0 * e * o.resistance(u, v).unwrap();
                    prop_assert!((commute - identity).abs() <= 1e-8 * identity.max(1.0));
                }
            }
        }
    }
}
