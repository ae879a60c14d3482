//! Simple random walks: seeded parallel Monte Carlo for cover, blanket,
//! hitting and return times, and an exact cover-time oracle for tiny graphs.
//!
//! A step picks one of the `deg(v)` edge-ends at `v` uniformly, so a loop of
//! multiplicity `m` is taken with probability `2m / deg(v)`.
//!
//! Trial `t` of a run draws from a ChaCha8 stream selected by `t` under the
//! master seed, and statistics are reduced in trial order, so results do not
//! depend on how many worker threads execute the trials.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::resistance::ResistanceOracle;

/// Largest component on which every start is simulated.
pub const WORST_START_LIMIT: usize = 64;
/// Largest graph accepted by [`exact_cover_time`].
pub const EXACT_COVER_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Cover,
    /// Cover every vertex, then return to the start.
    CoverReturn,
    /// First time all local times are positive and within a factor of 2.
    Blanket,
    Hitting { target: usize },
    /// Go to `target` and come back.
    Commute { target: usize },
    /// First return to the start vertex.
    Return,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Cover => write!(f, "cover"),
            Quantity::CoverReturn => write!(f, "cover_return"),
            Quantity::Blanket => write!(f, "blanket"),
            Quantity::Hitting { target } => write!(f, "hitting({target})"),
            Quantity::Commute { target } => write!(f, "commute({target})"),
            Quantity::Return => write!(f, "return"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPolicy {
    Fixed(usize),
    WorstOverAllStarts,
    Stationary,
}

impl fmt::Display for StartPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartPolicy::Fixed(v) => write!(f, "fixed({v})"),
            StartPolicy::WorstOverAllStarts => write!(f, "worst_over_all_starts"),
            StartPolicy::Stationary => write!(f, "stationary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkEstimate {
    pub quantity: Quantity,
    pub start_policy: StartPolicy,
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
    pub samples: Option<Vec<u64>>,
    pub master_seed: u64,
    /// Start attaining the maximum under [`StartPolicy::WorstOverAllStarts`].
    pub worst_start: Option<usize>,
}

impl Serialize for WalkEstimate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            quantity: String,
            start_policy: String,
            mean: f64,
            std_err: f64,
            trials: u64,
            seed: u64,
        }
        Wire {
            quantity: self.quantity.to_string(),
            start_policy: self.start_policy.to_string(),
            mean: self.mean,
            std_err: self.std_err,
            trials: self.trials,
            seed: self.master_seed,
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub quantity: Quantity,
    pub start: StartPolicy,
    pub trials: u64,
    pub master_seed: u64,
    pub keep_samples: bool,
}

impl SimConfig {
    pub fn new(quantity: Quantity, start: StartPolicy, trials: u64, master_seed: u64) -> Self {
        SimConfig {
            quantity,
            start,
            trials,
            master_seed,
            keep_samples: false,
        }
    }

    pub fn with_samples(mut self) -> Self {
        self.keep_samples = true;
        self
    }
}

/// RNG for one trial: the stream index selects an independent ChaCha8 stream.
pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Edge-end table: vertex `v` owns `ends[offsets[v]..offsets[v + 1]]`.
#[derive(Debug, Clone)]
pub struct Walker {
    offsets: Vec<usize>,
    ends: Vec<u32>,
    cumulative_degree: Vec<u64>,
    step_cap: u64,
}

impl Walker {
    pub fn new(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut ends = Vec::with_capacity(2 * g.edge_count() as usize);
        offsets.push(0);
        for v in 0..n {
            for &(w, m) in g.neighbors(v) {
                let copies = if w == v { 2 * m } else { m };
                ends.extend(std::iter::repeat_n(w as u32, copies as usize));
            }
            offsets.push(ends.len());
        }
        let mut acc = 0u64;
        let cumulative_degree = g
            .degrees()
            .iter()
            .map(|&d| {
                acc += d;
                acc
            })
            .collect();
        let step_cap = 10_000u64
            .saturating_mul(2 * g.edge_count())
            .saturating_mul(n as u64)
            .max(10_000);
        Walker {
            offsets,
            ends,
            cumulative_degree,
            step_cap,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, v: usize) -> u64 {
        (self.offsets[v + 1] - self.offsets[v]) as u64
    }

    #[inline]
    pub fn step<R: Rng>(&self, v: usize, rng: &mut R) -> usize {
        let lo = self.offsets[v];
        let hi = self.offsets[v + 1];
        self.ends[rng.random_range(lo..hi)] as usize
    }

    fn stationary_start<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative_degree.last().unwrap();
        let r = rng.random_range(0..total);
        self.cumulative_degree.partition_point(|&c| c <= r)
    }

    fn check_cap(&self, t: u64, trial: u64) -> Result<()> {
        if t > self.step_cap {
            Err(Error::StepCap {
                trial,
                cap: self.step_cap,
            })
        } else {
            Ok(())
        }
    }

    /// Runs one trial of `quantity` from `start`; `trial` only labels errors.
    pub fn run<R: Rng>(
        &self,
        quantity: Quantity,
        start: usize,
        rng: &mut R,
        trial: u64,
    ) -> Result<u64> {
        match quantity {
            Quantity::Cover => self.cover(start, rng, trial).map(|(t, _)| t),
            Quantity::CoverReturn => {
                let (t, at) = self.cover(start, rng, trial)?;
                if at == start {
                    return Ok(t);
                }
                Ok(t + self.hit(at, start, rng, trial)?)
            }
            Quantity::Blanket => self.blanket(start, rng, trial),
            Quantity::Hitting { target } => self.hit(start, target, rng, trial),
            Quantity::Commute { target } => {
                let there = self.hit(start, target, rng, trial)?;
                Ok(there + self.hit(target, start, rng, trial)?)
            }
            Quantity::Return => {
                if self.vertex_count() == 1 && self.degree(start) == 0 {
                    return Ok(0);
                }
                let first = self.step(start, rng);
                Ok(1 + self.hit(first, start, rng, trial)?)
            }
        }
    }

    fn hit<R: Rng>(&self, from: usize, target: usize, rng: &mut R, trial: u64) -> Result<u64> {
        let mut v = from;
        let mut t = 0u64;
        while v != target {
            v = self.step(v, rng);
            t += 1;
            if t & 0xffff == 0 {
                self.check_cap(t, trial)?;
            }
        }
        Ok(t)
    }

    /// Cover time and the vertex where covering completed.
    fn cover<R: Rng>(&self, start: usize, rng: &mut R, trial: u64) -> Result<(u64, usize)> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut remaining = n - 1;
        let mut v = start;
        let mut t = 0u64;
        while remaining > 0 {
            v = self.step(v, rng);
            t += 1;
            if !seen[v] {
                seen[v] = true;
                remaining -= 1;
            }
            if t & 0xffff == 0 {
                self.check_cap(t, trial)?;
            }
        }
        Ok((t, v))
    }

    fn blanket<R: Rng>(&self, start: usize, rng: &mut R, trial: u64) -> Result<u64> {
        let n = self.vertex_count();
        let degrees: Vec<u64> = (0..n).map(|v| self.degree(v).max(1)).collect();
        let mut visits = vec![0u64; n];
        visits[start] = 1;
        let mut remaining = n - 1;
        let mut v = start;
        let mut t = 0u64;
        while remaining > 0 {
            v = self.step(v, rng);
            t += 1;
            if visits[v] == 0 {
                remaining -= 1;
            }
            visits[v] += 1;
            if t & 0xffff == 0 {
                self.check_cap(t, trial)?;
            }
        }
        let mut tracker = LocalTimeTracker::new(&visits, &degrees);
        while !tracker.within_factor_two() {
            v = self.step(v, rng);
            t += 1;
            tracker.visit(v);
            if t & 0xffff == 0 {
                self.check_cap(t, trial)?;
            }
        }
        Ok(t)
    }
}

/// Maintains argmin and argmax of `visits[v] / degree[v]` under increments.
struct LocalTimeTracker<'a> {
    visits: Vec<u64>,
    degrees: &'a [u64],
    /// Segment tree of argmin indices; leaves start at `size`.
    tree: Vec<usize>,
    size: usize,
    argmax: usize,
}

impl<'a> LocalTimeTracker<'a> {
    fn new(visits: &[u64], degrees: &'a [u64]) -> Self {
        let n = visits.len();
        let size = n.next_power_of_two();
        let mut tracker = LocalTimeTracker {
            visits: visits.to_vec(),
            degrees,
            tree: vec![usize::MAX; 2 * size],
            size,
            argmax: 0,
        };
        for v in 0..n {
            tracker.tree[size + v] = v;
            if tracker.less(tracker.argmax, v) {
                tracker.argmax = v;
            }
        }
        for i in (1..size).rev() {
            tracker.tree[i] = tracker.pick_min(tracker.tree[2 * i], tracker.tree[2 * i + 1]);
        }
        tracker
    }

    /// `L_a < L_b` by exact cross-multiplication.
    fn less(&self, a: usize, b: usize) -> bool {
        (self.visits[a] as u128) * (self.degrees[b] as u128)
            < (self.visits[b] as u128) * (self.degrees[a] as u128)
    }

    fn pick_min(&self, a: usize, b: usize) -> usize {
        match (a, b) {
            (usize::MAX, x) | (x, usize::MAX) => x,
            _ if self.less(b, a) => b,
            _ => a,
        }
    }

    fn visit(&mut self, v: usize) {
        self.visits[v] += 1;
        if self.less(self.argmax, v) {
            self.argmax = v;
        }
        let mut i = (self.size + v) / 2;
        while i >= 1 {
            self.tree[i] = self.pick_min(self.tree[2 * i], self.tree[2 * i + 1]);
            i /= 2;
        }
    }

    fn within_factor_two(&self) -> bool {
        let lo = self.tree[1];
        let hi = self.argmax;
        if self.visits[lo] == 0 {
            return false;
        }
        (self.visits[hi] as u128) * (self.degrees[lo] as u128)
            <= 2 * (self.visits[lo] as u128) * (self.degrees[hi] as u128)
    }
}

fn mean_and_std_err(samples: &[u64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|&x| x as f64).sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples
        .iter()
        .map(|&x| {
            let d = x as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn validate_target(quantity: Quantity, n: usize) -> Result<()> {
    match quantity {
        Quantity::Hitting { target } | Quantity::Commute { target } if target >= n => {
            Err(Error::Domain(target))
        }
        _ => Ok(()),
    }
}

/// Monte Carlo estimate of a walk functional on a connected graph.
pub fn simulate(g: &MultiGraph, config: &SimConfig) -> Result<WalkEstimate> {
    let n = g.vertex_count();
    if n == 0 || !g.is_connected() {
        return Err(Error::contract("simulation needs a nonempty connected graph"));
    }
    if config.trials == 0 {
        return Err(Error::contract("trials must be at least 1"));
    }
    validate_target(config.quantity, n)?;
    let walker = Walker::new(g);
    let trials = config.trials;
    let seed = config.master_seed;

    let run_from = |start: Option<usize>, stream_base: u64| -> Result<Vec<u64>> {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, stream_base + t);
                let s = match start {
                    Some(s) => s,
                    None => walker.stationary_start(&mut rng),
                };
                walker.run(config.quantity, s, &mut rng, t)
            })
            .collect()
    };

    let (samples, worst_start) = match config.start {
        StartPolicy::Fixed(v) => {
            if v >= n {
                return Err(Error::Domain(v));
            }
            (run_from(Some(v), 0)?, None)
        }
        StartPolicy::Stationary => (run_from(None, 0)?, None),
        StartPolicy::WorstOverAllStarts => {
            if n > WORST_START_LIMIT {
                return Err(Error::contract(format!(
                    "worst-start simulation limited to {WORST_START_LIMIT} vertices, got {n}"
                )));
            }
            let mut best: Option<(f64, usize, Vec<u64>)> = None;
            for s in 0..n {
                let samples = run_from(Some(s), s as u64 * trials)?;
                let (mean, _) = mean_and_std_err(&samples);
                if best.as_ref().is_none_or(|b| mean > b.0) {
                    best = Some((mean, s, samples));
                }
            }
            let (_, s, samples) = best.unwrap();
            (samples, Some(s))
        }
    };
    let (mean, std_err) = mean_and_std_err(&samples);
    Ok(WalkEstimate {
        quantity: config.quantity,
        start_policy: config.start,
        mean,
        std_err,
        trials,
        samples: config.keep_samples.then_some(samples),
        master_seed: seed,
        worst_start,
    })
}

/// Exact expected cover times from every start, for graphs with at most
/// [`EXACT_COVER_LIMIT`] vertices.
///
/// `T(S, v)`, the expected remaining time with visited set `S` at `v`, does
/// not depend on the start, so one pass over visited sets in decreasing size
/// serves all starts. Only connected sets are reachable and solved.
#[derive(Debug, Clone)]
pub struct ExactCover {
    n: usize,
    from_start: Vec<f64>,
}

impl ExactCover {
    pub fn new(g: &MultiGraph) -> Result<Self> {
        let n = g.vertex_count();
        if n > EXACT_COVER_LIMIT {
            return Err(Error::contract(format!(
                "exact cover time limited to {EXACT_COVER_LIMIT} vertices, got {n}"
            )));
        }
        if n == 0 || !g.is_connected() {
            return Err(Error::contract("exact cover time needs a nonempty connected graph"));
        }
        if n == 1 {
            return Ok(ExactCover {
                n,
                from_start: vec![0.0],
            });
        }
        let transitions: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|v| {
                let d = g.degree(v) as f64;
                g.neighbors(v)
                    .iter()
                    .map(|&(w, m)| {
                        let ends = if w == v { 2 * m } else { m };
                        (w, ends as f64 / d)
                    })
                    .collect()
            })
            .collect();
        let adjacency_mask: Vec<u32> = (0..n)
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .fold(0u32, |acc, &(w, _)| acc | (1 << w))
            })
            .collect();
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut values = vec![0.0f64; (full as usize + 1) * n];
        let mut masks: Vec<u32> = (1..full).filter(|&m| is_connected_mask(m, &adjacency_mask)).collect();
        masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));

        for mask in masks {
            let members: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let mut local = [usize::MAX; 32];
            for (i, &v) in members.iter().enumerate() {
                local[v] = i;
            }
            let k = members.len();
            let mut a = DMatrix::<f64>::identity(k, k);
            let mut b = DVector::<f64>::from_element(k, 1.0);
            for (i, &v) in members.iter().enumerate() {
                for &(w, p) in &transitions[v] {
                    if mask & (1 << w) != 0 {
                        a[(i, local[w])] -= p;
                    } else {
                        let next = (mask | (1 << w)) as usize;
                        b[i] += p * values[next * n + w];
                    }
                }
            }
            let x = a
                .lu()
                .solve(&b)
                .ok_or_else(|| Error::Solver("singular cover-time system".into()))?;
            for (i, &v) in members.iter().enumerate() {
                values[mask as usize * n + v] = x[i];
            }
        }
        let from_start = (0..n).map(|s| values[(1usize << s) * n + s]).collect();
        Ok(ExactCover { n, from_start })
    }

    pub fn from(&self, start: usize) -> Result<f64> {
        if start >= self.n {
            return Err(Error::Domain(start));
        }
        Ok(self.from_start[start])
    }

    /// Maximum over starts, with the first start attaining it.
    pub fn worst(&self) -> (f64, usize) {
        self.from_start
            .iter()
            .enumerate()
            .fold((f64::NEG_INFINITY, 0), |acc, (s, &t)| if t > acc.0 { (t, s) } else { acc })
    }

    pub fn all_starts(&self) -> &[f64] {
        &self.from_start
    }
}

fn is_connected_mask(mask: u32, adjacency: &[u32]) -> bool {
    let first = mask.trailing_zeros();
    let mut reached = 1u32 << first;
    let mut frontier = reached;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adjacency[v] & mask & !reached;
        reached |= new;
        frontier |= new;
    }
    reached == mask
}

/// Exact expected cover time from `start` (graphs with at most 20 vertices).
pub fn exact_cover_time(g: &MultiGraph, start: usize) -> Result<f64> {
    ExactCover::new(g)?.from(start)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub lambda: f64,
    pub empirical_prob: f64,
    /// Binomial standard error of `empirical_prob`.
    pub std_err: f64,
    pub bound: f64,
}

/// Empirical tail of `L^u - L^v` at the first time the local time at `u`
/// reaches `level`, against `exp(-lambda^2 / (4 level R(u, v)))`.
pub fn local_time_tail_check(
    g: &MultiGraph,
    u: usize,
    v: usize,
    level: f64,
    lambdas: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<Vec<TailPoint>> {
    let n = g.vertex_count();
    if u >= n || v >= n {
        return Err(Error::Domain(u.max(v)));
    }
    if u == v {
        return Err(Error::contract("local-time tail needs distinct vertices"));
    }
    if !(level > 0.0) {
        return Err(Error::contract("local-time level must be positive"));
    }
    if trials == 0 {
        return Err(Error::contract("trials must be at least 1"));
    }
    let oracle = ResistanceOracle::new(g)?;
    let r = oracle.resistance(u, v)?;
    let walker = Walker::new(g);
    let (du, dv) = (g.degree(u) as f64, g.degree(v) as f64);
    // first visit count at which L^u >= level
    let needed = (level * du - 1e-9).ceil().max(1.0) as u64;
    let diffs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(master_seed, t);
            let (mut at_u, mut at_v) = (1u64, 0u64);
            let mut x = u;
            let mut steps = 0u64;
            while at_u < needed {
                x = walker.step(x, &mut rng);
                steps += 1;
                if x == u {
                    at_u += 1;
                } else if x == v {
                    at_v += 1;
                }
                if steps & 0xffff == 0 {
                    walker.check_cap(steps, t)?;
                }
            }
            Ok(at_u as f64 / du - at_v as f64 / dv)
        })
        .collect::<Result<_>>()?;
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let hits = diffs.iter().filter(|&&d| d >= lambda).count() as f64;
            let p = hits / trials as f64;
            TailPoint {
                lambda,
                empirical_prob: p,
                std_err: (p * (1.0 - p) / trials as f64).sqrt(),
                bound: (-lambda * lambda / (4.0 * level * r)).exp(),
            }
        })
        .collect())
}
