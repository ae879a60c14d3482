//! Experiment drivers behind the `covertime` binary: bound reports, the
//! cover-time evolution across the phase transition of `G(n, p)`, scaling on
//! uniform random trees and the edge-addition study.
//!
//! Grid cells run concurrently; each cell derives its own seed from the
//! master seed and its coordinates, and rows are assembled in grid order, so
//! reports are reproducible byte for byte whatever the thread count.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bounds::{analyze_with, BoundOptions, BoundReport};
use crate::error::{Error, Result};
use crate::generators::{
    giant_model, gnp, percolate, pgw_tree, seeded_rng, uniform_labeled_tree, BaseGraphSpec,
    GiantModelParams,
};
use crate::graph::MultiGraph;
use crate::resistance::ResistanceOracle;
use crate::walk::{simulate, ExactCover, Quantity, SimConfig, StartPolicy};

/// SplitMix64 finalizer over the master seed and cell coordinates.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    coords.iter().fold(mix(master), |acc, &c| mix(acc ^ mix(c)))
}

/// Where a command gets its graph from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Edges(PathBuf),
    Gnp { n: usize, p: f64 },
    Tree { k: usize },
    Pgw { mu: f64, size_cap: usize },
    Giant { n: usize, epsilon: f64 },
    Percolation(BaseGraphSpec),
}

impl GraphSource {
    pub fn build(&self, seed: u64) -> Result<MultiGraph> {
        match self {
            GraphSource::Edges(path) => {
                let file = std::fs::File::open(path)?;
                MultiGraph::from_edge_list(std::io::BufReader::new(file))
            }
            GraphSource::Gnp { n, p } => gnp(*n, *p, seed),
            GraphSource::Tree { k } => uniform_labeled_tree(*k, seed),
            GraphSource::Pgw { mu, size_cap } => Ok(pgw_tree(*mu, seed, *size_cap)?.tree),
            GraphSource::Giant { n, epsilon } => {
                Ok(giant_model(&GiantModelParams::new(*n, *epsilon)?, seed)?.graph)
            }
            GraphSource::Percolation(spec) => Ok(percolate(spec, seed)?.0),
        }
    }

    /// Builds the graph and restricts it to its largest component when asked;
    /// otherwise a disconnected graph is a contract violation.
    pub fn build_connected(&self, seed: u64, largest_component: bool) -> Result<MultiGraph> {
        let g = self.build(seed)?;
        if largest_component {
            Ok(g.largest_component().into_graph())
        } else if g.is_connected() {
            Ok(g)
        } else {
            Err(Error::contract(
                "input graph is disconnected (pass --largest-component to use its largest component)",
            ))
        }
    }
}

/// Full bound report (entropy upper bound, packing and Matthews lower bounds).
pub fn bound_report(g: &MultiGraph, options: BoundOptions) -> Result<BoundReport> {
    if !g.is_connected() {
        return Err(Error::contract("bound needs a connected graph"));
    }
    let oracle = ResistanceOracle::new(g)?;
    Ok(analyze_with(g, &oracle, options)?.report)
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub exponent: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Least-squares slope of `ln y` on `ln x` with a 95% t-interval.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<Fit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::contract("a scaling fit needs at least 3 grid points"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let se = (ssr / (m - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, m - 2.0)
        .expect("at least one degree of freedom")
        .inverse_cdf(0.975);
    Ok(Fit {
        exponent: slope,
        ci_low: slope - t * se,
        ci_high: slope + t * se,
    })
}

/// Regimes of `G(n, p)` around `p = 1/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `p = (1 - eps)/n`.
    Subcritical,
    /// `p = (1 + lambda n^-1/3)/n`.
    Critical { lambda: f64 },
    /// `p = (1 + eps)/n`.
    Supercritical,
}

impl Regime {
    pub fn label(&self) -> String {
        match self {
            Regime::Subcritical => "subcritical".into(),
            Regime::Critical { lambda } => format!("critical(lambda={lambda})"),
            Regime::Supercritical => "supercritical".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub regime: Regime,
    pub n_grid: Vec<usize>,
    pub seeds: u64,
    pub trials: u64,
    pub master_seed: u64,
    /// `eps = n^-epsilon_exponent` in the off-critical regimes.
    pub epsilon_exponent: f64,
    pub bounds: bool,
}

impl EvolutionConfig {
    pub fn new(regime: Regime, n_grid: Vec<usize>) -> Self {
        EvolutionConfig {
            regime,
            n_grid,
            seeds: 20,
            trials: 10,
            master_seed: 0,
            epsilon_exponent: 0.25,
            bounds: true,
        }
    }

    pub fn epsilon(&self, n: usize) -> f64 {
        (n as f64).powf(-self.epsilon_exponent)
    }

    pub fn edge_probability(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self.regime {
            Regime::Subcritical => (1.0 - self.epsilon(n)) / nf,
            Regime::Critical { lambda } => (1.0 + lambda * nf.powf(-1.0 / 3.0)) / nf,
            Regime::Supercritical => (1.0 + self.epsilon(n)) / nf,
        }
    }

    /// Predicted order of the cover time of the largest component.
    pub fn law(&self, n: usize) -> f64 {
        let nf = n as f64;
        let eps = self.epsilon(n);
        match self.regime {
            Regime::Subcritical => eps.powi(-3) * (eps.powi(3) * nf).ln().powf(1.5),
            Regime::Critical { .. } => nf,
            Regime::Supercritical => nf * (eps.powi(3) * nf).ln().powi(2),
        }
    }
}

/// `phi(c) = c x (2 - x) / (4 (c x - ln c))` with `x = 1 - e^(-c x)`.
pub fn cooper_frieze_phi(c: f64) -> f64 {
    // giant fraction by bisection on (0, 1]
    let (mut lo, mut hi) = (1e-300f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid - (1.0 - (-c * mid).exp()) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    c * x * (2.0 - x) / (4.0 * (c * x - c.ln()))
}

/// One (size, seed) cell of a scaling study.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingCell {
    pub size: usize,
    pub seed_index: u64,
    pub seed: u64,
    pub component_size: usize,
    pub component_edges: u64,
    pub start: usize,
    pub cover_mean: f64,
    pub cover_std_err: f64,
    pub bounds: Option<BoundReport>,
    /// `kklv_lower <= cover_mean + 3 se` and `cover_mean - 3 se <= upper_theorem`.
    pub sandwich_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub size: usize,
    pub seeds: u64,
    pub median_component: f64,
    pub median_cover: f64,
    pub median_upper_clean: Option<f64>,
    pub median_kklv_lower: Option<f64>,
    pub median_upper_theorem: Option<f64>,
    pub law: f64,
    pub ratio: f64,
    /// `phi(1 + eps) n ln^2 n`, context for supercritical rows only.
    pub cooper_frieze: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub regime: String,
    pub master_seed: u64,
    pub trials: u64,
    pub parameters: serde_json::Value,
    pub rows: Vec<ScalingRow>,
    pub fitted_exponent: Fit,
    /// max / min over rows of `median_cover / law`.
    pub ratio_spread: f64,
    pub sandwich_violations: usize,
    pub cells: Vec<ScalingCell>,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "size,seeds,median_component,median_cover,median_upper_clean,median_kklv_lower,median_upper_theorem,law,ratio\n",
        );
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.size,
                r.seeds,
                r.median_component,
                r.median_cover,
                opt(r.median_upper_clean),
                opt(r.median_kklv_lower),
                opt(r.median_upper_theorem),
                r.law,
                r.ratio
            )
            .unwrap();
        }
        out
    }
}

/// Simulates the cover time of `g` from a resistance-diameter endpoint and
/// optionally computes its bounds.
fn scaling_cell(
    g: &MultiGraph,
    size: usize,
    seed_index: u64,
    seed: u64,
    trials: u64,
    with_bounds: bool,
) -> Result<ScalingCell> {
    let k = g.vertex_count();
    if k < 2 {
        return Ok(ScalingCell {
            size,
            seed_index,
            seed,
            component_size: k,
            component_edges: g.edge_count(),
            start: 0,
            cover_mean: 0.0,
            cover_std_err: 0.0,
            bounds: None,
            sandwich_ok: None,
        });
    }
    let oracle = ResistanceOracle::new(g)?;
    let options = BoundOptions::default();
    let (start, bounds) = if with_bounds {
        let analysis = analyze_with(g, &oracle, options)?;
        (analysis.diameter.pair.0, Some(analysis.report))
    } else {
        (oracle.diameter(options.k_exact).pair.0, None)
    };
    let est = simulate(
        g,
        &SimConfig::new(Quantity::Cover, StartPolicy::Fixed(start), trials, seed),
    )?;
    let sandwich_ok = bounds.as_ref().map(|b| {
        b.kklv_lower <= est.mean + 3.0 * est.std_err
            && est.mean - 3.0 * est.std_err <= b.upper_theorem
    });
    Ok(ScalingCell {
        size,
        seed_index,
        seed,
        component_size: k,
        component_edges: g.edge_count(),
        start,
        cover_mean: est.mean,
        cover_std_err: est.std_err,
        bounds,
        sandwich_ok,
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    regime: String,
    master_seed: u64,
    trials: u64,
    parameters: serde_json::Value,
    grid: &[usize],
    seeds: u64,
    cells: Vec<ScalingCell>,
    law: impl Fn(usize) -> f64,
    fit_against_law: bool,
    cooper_frieze: impl Fn(usize) -> Option<f64>,
) -> Result<ScalingReport> {
    let mut rows = Vec::with_capacity(grid.len());
    for &size in grid {
        let in_row: Vec<&ScalingCell> = cells.iter().filter(|c| c.size == size).collect();
        let collect = |f: &dyn Fn(&ScalingCell) -> Option<f64>| -> Option<f64> {
            let mut v: Vec<f64> = in_row.iter().filter_map(|c| f(c)).collect();
            (!v.is_empty()).then(|| median(&mut v))
        };
        let median_cover = collect(&|c| Some(c.cover_mean)).unwrap_or(f64::NAN);
        let law_value = law(size);
        rows.push(ScalingRow {
            size,
            seeds,
            median_component: collect(&|c| Some(c.component_size as f64)).unwrap_or(f64::NAN),
            median_cover,
            median_upper_clean: collect(&|c| c.bounds.as_ref().map(|b| b.upper_clean)),
            median_kklv_lower: collect(&|c| c.bounds.as_ref().map(|b| b.kklv_lower)),
            median_upper_theorem: collect(&|c| c.bounds.as_ref().map(|b| b.upper_theorem)),
            law: law_value,
            ratio: median_cover / law_value,
            cooper_frieze: cooper_frieze(size),
        });
    }
    let xs: Vec<f64> = rows
        .iter()
        .map(|r| if fit_against_law { r.law } else { r.size as f64 })
        .collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.median_cover).collect();
    let fitted_exponent = log_log_fit(&xs, &ys)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let ratio_spread = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let sandwich_violations = cells.iter().filter(|c| c.sandwich_ok == Some(false)).count();
    Ok(ScalingReport {
        regime,
        master_seed,
        trials,
        parameters,
        rows,
        fitted_exponent,
        ratio_spread,
        sandwich_violations,
        cells,
    })
}

/// Cover time of the largest component of `G(n, p)` across an `n` grid.
pub fn run_evolution(config: &EvolutionConfig) -> Result<ScalingReport> {
    if config.n_grid.len() < 3 {
        return Err(Error::contract("evolution needs at least 3 grid points"));
    }
    if config.seeds == 0 || config.trials == 0 {
        return Err(Error::contract("seeds and trials must be positive"));
    }
    let jobs: Vec<(usize, u64)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.seeds).map(move |s| (n, s)))
        .collect();
    let cells: Vec<ScalingCell> = jobs
        .par_iter()
        .map(|&(n, s)| {
            let seed = derive_seed(config.master_seed, &[n as u64, s]);
            let g = gnp(n, config.edge_probability(n), seed)?;
            let component = g.largest_component().into_graph();
            scaling_cell(&component, n, s, seed, config.trials, config.bounds)
        })
        .collect::<Result<_>>()?;
    let parameters = serde_json::json!({
        "n_grid": config.n_grid,
        "seeds": config.seeds,
        "epsilon_exponent": config.epsilon_exponent,
        "edge_probability": config.n_grid.iter().map(|&n| config.edge_probability(n)).collect::<Vec<_>>(),
        "bounds": config.bounds,
    });
    let supercritical = config.regime == Regime::Supercritical;
    assemble(
        config.regime.label(),
        config.master_seed,
        config.trials,
        parameters,
        &config.n_grid,
        config.seeds,
        cells,
        |n| config.law(n),
        !matches!(config.regime, Regime::Critical { .. }),
        |n| {
            supercritical.then(|| {
                let nf = n as f64;
                cooper_frieze_phi(1.0 + config.epsilon(n)) * nf * nf.ln().powi(2)
            })
        },
    )
}

#[derive(Debug, Clone)]
pub struct TreeScalingConfig {
    pub k_grid: Vec<usize>,
    pub seeds: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub bounds: bool,
}

impl TreeScalingConfig {
    pub fn new(k_grid: Vec<usize>) -> Self {
        TreeScalingConfig {
            k_grid,
            seeds: 20,
            trials: 10,
            master_seed: 0,
            bounds: true,
        }
    }
}

/// Cover time of uniform labeled trees against `k^(3/2)`.
pub fn run_gw_scaling(config: &TreeScalingConfig) -> Result<ScalingReport> {
    if config.k_grid.len() < 3 {
        return Err(Error::contract("tree scaling needs at least 3 grid points"));
    }
    if config.seeds == 0 || config.trials == 0 {
        return Err(Error::contract("seeds and trials must be positive"));
    }
    let jobs: Vec<(usize, u64)> = config
        .k_grid
        .iter()
        .flat_map(|&k| (0..config.seeds).map(move |s| (k, s)))
        .collect();
    let cells: Vec<ScalingCell> = jobs
        .par_iter()
        .map(|&(k, s)| {
            let seed = derive_seed(config.master_seed, &[k as u64, s]);
            let tree = uniform_labeled_tree(k, seed)?;
            scaling_cell(&tree, k, s, seed, config.trials, config.bounds)
        })
        .collect::<Result<_>>()?;
    let parameters = serde_json::json!({
        "k_grid": config.k_grid,
        "seeds": config.seeds,
        "bounds": config.bounds,
    });
    assemble(
        "gw_tree".into(),
        config.master_seed,
        config.trials,
        parameters,
        &config.k_grid,
        config.seeds,
        cells,
        |k| (k as f64).powf(1.5),
        false,
        |_| None,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMode {
    ExactDp,
    MonteCarlo,
}

#[derive(Debug, Clone)]
pub struct EdgeAdditionConfig {
    pub mode: EdgeMode,
    pub k_edges: usize,
    pub instances: usize,
    pub master_seed: u64,
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Trials per start in Monte Carlo mode.
    pub trials: u64,
}

impl EdgeAdditionConfig {
    pub fn new(mode: EdgeMode, k_edges: usize, instances: usize) -> Self {
        EdgeAdditionConfig {
            mode,
            k_edges,
            instances,
            master_seed: 0,
            min_vertices: 2,
            max_vertices: 10,
            trials: 2_000,
        }
    }
}

/// Allowed growth factor of the worst-start cover time after adding
/// `k_edges` edges: 4 for one edge, `2k + 1 + 2k^2 / |E|` otherwise.
pub fn edge_addition_bound(k_edges: usize, edge_count: u64) -> f64 {
    if k_edges == 1 {
        4.0
    } else {
        let k = k_edges as f64;
        2.0 * k + 1.0 + 2.0 * k * k / edge_count as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeAdditionRow {
    pub instance: usize,
    pub graph: String,
    pub vertices: usize,
    pub edges: u64,
    pub added: Vec<(usize, usize)>,
    pub before: f64,
    pub after: f64,
    pub before_std_err: Option<f64>,
    pub after_std_err: Option<f64>,
    pub ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeAdditionReport {
    pub mode: EdgeMode,
    pub k_edges: usize,
    pub master_seed: u64,
    pub max_ratio: f64,
    pub violations: usize,
    pub rows: Vec<EdgeAdditionRow>,
}

impl EdgeAdditionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,vertices,edges,added,before,after,ratio,bound,holds\n");
        for r in &self.rows {
            let added: Vec<String> = r.added.iter().map(|(u, v)| format!("{u}-{v}")).collect();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.instance,
                r.vertices,
                r.edges,
                added.join(" "),
                r.before,
                r.after,
                r.ratio,
                r.bound,
                r.holds
            )
            .unwrap();
        }
        out
    }
}

/// A random connected `G(n, p)` instance plus `k` random extra edges.
///
/// Instances rotate through three kinds of added edge: a loop, a copy of an
/// existing edge, and a uniformly random pair (which may itself be either).
pub fn edge_instance(
    master_seed: u64,
    instance: usize,
    k_edges: usize,
    min_vertices: usize,
    max_vertices: usize,
) -> Result<(MultiGraph, Vec<(usize, usize)>)> {
    let mut rng = seeded_rng(derive_seed(master_seed, &[instance as u64]));
    let n = rng.random_range(min_vertices.max(2)..=max_vertices.max(2));
    let p: f64 = rng.random_range(0.25..0.85);
    let g = loop {
        let g = gnp(n, p, rng.random())?;
        if g.is_connected() {
            break g;
        }
    };
    let mut added = Vec::with_capacity(k_edges);
    for j in 0..k_edges {
        let pair = match (instance + j) % 3 {
            0 => {
                let u = rng.random_range(0..n);
                (u, u)
            }
            1 => {
                let e = g.edges()[rng.random_range(0..g.edges().len())];
                (e.0, e.1)
            }
            _ => (rng.random_range(0..n), rng.random_range(0..n)),
        };
        added.push(pair);
    }
    Ok((g, added))
}

fn compact(g: &MultiGraph) -> String {
    g.edges()
        .iter()
        .map(|&(u, v, m)| if m == 1 { format!("{u}-{v}") } else { format!("{u}-{v}x{m}") })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Worst-start cover time before and after adding edges, per instance.
pub fn run_edge_addition(config: &EdgeAdditionConfig) -> Result<EdgeAdditionReport> {
    if config.k_edges == 0 {
        return Err(Error::contract("k_edges must be at least 1"));
    }
    if config.mode == EdgeMode::ExactDp && config.max_vertices > 12 {
        return Err(Error::contract("exact mode is limited to 12 vertices"));
    }
    if config.mode == EdgeMode::MonteCarlo && config.max_vertices > crate::walk::WORST_START_LIMIT {
        return Err(Error::contract("Monte Carlo mode is limited to 64 vertices"));
    }
    let rows: Vec<EdgeAdditionRow> = (0..config.instances)
        .into_par_iter()
        .map(|i| {
            let (g, added) = edge_instance(
                config.master_seed,
                i,
                config.k_edges,
                config.min_vertices,
                config.max_vertices,
            )?;
            let mut h = g.clone();
            for &(u, v) in &added {
                h = h.add_edge(u, v)?;
            }
            let bound = edge_addition_bound(config.k_edges, g.edge_count());
            let (before, after, before_se, after_se) = match config.mode {
                EdgeMode::ExactDp => (
                    ExactCover::new(&g)?.worst().0,
                    ExactCover::new(&h)?.worst().0,
                    None,
                    None,
                ),
                EdgeMode::MonteCarlo => {
                    let seed = derive_seed(config.master_seed, &[i as u64, 1]);
                    let cfg = SimConfig::new(
                        Quantity::Cover,
                        StartPolicy::WorstOverAllStarts,
                        config.trials,
                        seed,
                    );
                    let b = simulate(&g, &cfg)?;
                    let a = simulate(&h, &cfg)?;
                    (b.mean, a.mean, Some(b.std_err), Some(a.std_err))
                }
            };
            let ratio = after / before;
            Ok(EdgeAdditionRow {
                instance: i,
                graph: compact(&g),
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                added,
                before,
                after,
                before_std_err: before_se,
                after_std_err: after_se,
                ratio,
                bound,
                holds: ratio <= bound,
            })
        })
        .collect::<Result<_>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let violations = rows.iter().filter(|r| !r.holds).count();
    Ok(EdgeAdditionReport {
        mode: config.mode,
        k_edges: config.k_edges,
        master_seed: config.master_seed,
        max_ratio,
        violations,
        rows,
    })
}
