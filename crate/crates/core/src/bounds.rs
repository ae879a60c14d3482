//! Resistance-ball packings and the cover-time bounds built from them.
//!
//! For level `i` the greedy packing picks centers in ascending id order whose
//! closed resistance balls of radius `R / 2^(i+1)` are pairwise disjoint,
//! until no further center fits. Maximality makes the radius `R / 2^i` balls
//! around the same centers a cover, and any minimal cover `A_i` satisfies
//! `|packing(i-1)| <= |A_i| <= |packing(i)|`. The packing sizes therefore
//! give certified upper bounds on the covering numbers for the entropy sum,
//! and (shifted by one level) certified lower bounds for the packing lower
//! bound.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::resistance::{HittingTimes, Provenance, ResistanceDiameter, ResistanceOracle};

/// Hard cap on explicitly computed levels.
pub const MAX_LEVEL: u32 = 40;

/// Relative slack for closed-ball membership against rounding in resistances.
const BALL_SLACK: f64 = 1e-9;

/// Closed-ball membership `r <= radius` with rounding slack.
#[inline]
pub fn within(r: f64, radius: f64) -> bool {
    r <= radius * (1.0 + BALL_SLACK) + 1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingLevel {
    pub level: u32,
    /// Covering radius `R / 2^level`; packing balls use half of it.
    pub radius: f64,
    pub centers: Vec<usize>,
}

impl PackingLevel {
    pub fn size(&self) -> usize {
        self.centers.len()
    }

    /// `2^-level * ln |centers|`.
    pub fn alpha(&self) -> f64 {
        (self.size() as f64).ln() / 2f64.powi(self.level as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringProfile {
    pub diameter: f64,
    pub levels: Vec<PackingLevel>,
    pub truncation_level: u32,
    pub vertex_count: usize,
}

impl CoveringProfile {
    pub fn level(&self, i: u32) -> Option<&PackingLevel> {
        self.levels.get((i as usize).checked_sub(1)?)
    }
}

/// Levels needed before every covering ball is a singleton.
///
/// `max(ceil(log2 ln k), ceil(log2(R / r_min)), 1)`, capped at [`MAX_LEVEL`].
pub fn truncation_level(vertex_count: usize, diameter: f64, min_positive: f64) -> u32 {
    let entropy_levels = if vertex_count > 2 {
        (vertex_count as f64).ln().log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale_levels = if diameter > 0.0 && min_positive.is_finite() && min_positive > 0.0 {
        (diameter / min_positive).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    entropy_levels.max(scale_levels).clamp(1, MAX_LEVEL)
}

/// Greedy maximal packing at levels `1..=max_level`.
pub fn greedy_packing(oracle: &ResistanceOracle, diameter: f64, max_level: u32) -> CoveringProfile {
    let max_level = max_level.max(1);
    let levels = (1..=max_level)
        .into_par_iter()
        .map(|i| {
            let radius = diameter / 2f64.powi(i as i32);
            PackingLevel {
                level: i,
                radius,
                centers: pack_level(oracle, radius / 2.0),
            }
        })
        .collect();
    CoveringProfile {
        diameter,
        levels,
        truncation_level: max_level,
        vertex_count: oracle.vertex_count(),
    }
}

/// Centers of a maximal family of pairwise disjoint closed balls of radius `rho`.
fn pack_level(oracle: &ResistanceOracle, rho: f64) -> Vec<usize> {
    let n = oracle.vertex_count();
    let mut claimed = vec![false; n];
    let mut centers: Vec<usize> = Vec::new();
    let mut balls: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if claimed[v] {
            continue;
        }
        // a claimed w with R(v, w) <= rho sits in some ball B(c, rho), so
        // only centers with R(v, c) <= 2 rho need a look
        let conflict = centers.iter().zip(&balls).any(|(&c, ball)| {
            within(oracle.resistance_unchecked(v, c), 2.0 * rho)
                && ball
                    .iter()
                    .any(|&w| within(oracle.resistance_unchecked(v, w), rho))
        });
        if conflict {
            continue;
        }
        let ball: Vec<usize> = (0..n)
            .filter(|&w| within(oracle.resistance_unchecked(v, w), rho))
            .collect();
        for &w in &ball {
            claimed[w] = true;
        }
        centers.push(v);
        balls.push(ball);
    }
    centers
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub i: u32,
    pub radius: f64,
    pub size: usize,
    pub alpha: f64,
}

/// Upper and lower cover-time bounds, all in walk steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(rename = "R")]
    pub diameter: f64,
    #[serde(rename = "R_provenance")]
    pub provenance: Provenance,
    pub levels: Vec<LevelSummary>,
    pub psi: f64,
    /// `6 * psi * R * |E|`.
    pub upper_theorem: f64,
    /// `(sum_{i <= log2 ln k} sqrt(alpha_i))^2 * R * |E|` without constants.
    pub upper_clean: f64,
    /// Packing lower bound `max_i alpha_i R |E|` with shifted packing sizes.
    pub kklv_lower: f64,
    pub matthews_lower: Option<f64>,
}

impl BoundReport {
    /// Best certified lower bound in the report.
    pub fn best_lower(&self) -> f64 {
        self.kklv_lower.max(self.matthews_lower.unwrap_or(0.0))
    }
}

/// `sum_{i > from} sqrt(max(2^-i ln k, 2^-i/2))`, using `|A_i| <= k`.
fn entropy_tail(from: u32, vertex_count: usize) -> f64 {
    let ln_k = (vertex_count.max(1) as f64).ln();
    let mut i = from + 1;
    let mut sum = 0.0;
    // while 2^-i ln k exceeds the floor 2^-i/2
    while 2f64.powf(i as f64 / 2.0) < ln_k {
        sum += (ln_k / 2f64.powi(i as i32)).sqrt();
        i += 1;
    }
    sum + 2f64.powf(-(i as f64) / 4.0) / (1.0 - 2f64.powf(-0.25))
}

/// Turns a covering profile into the entropy upper bound and packing lower bound.
pub fn psi_bound(profile: &CoveringProfile, edge_count: u64) -> Result<BoundReport> {
    if profile.levels.is_empty() {
        return Err(Error::contract("covering profile has no levels"));
    }
    if edge_count == 0 {
        return Err(Error::contract("bounds need at least one edge"));
    }
    let scale = profile.diameter * edge_count as f64;
    let k = profile.vertex_count;

    let mut root_sum: f64 = profile
        .levels
        .iter()
        .map(|l| l.alpha().max(2f64.powf(-(l.level as f64) / 2.0)).sqrt())
        .sum();
    root_sum += entropy_tail(profile.truncation_level, k);
    let psi = 128.0 * root_sum * root_sum;

    let clean_levels = if k > 2 {
        ((k as f64).ln().log2().ceil() as u32).max(1)
    } else {
        1
    };
    let clean_root: f64 = profile
        .levels
        .iter()
        .take(clean_levels as usize)
        .map(|l| l.alpha().sqrt())
        .sum();

    // |A_i| >= |packing(i - 1)|, so 2^-i ln|packing(i - 1)| <= alpha_i.
    let kklv = profile
        .levels
        .iter()
        .map(|l| (l.size() as f64).ln() / 2f64.powi(l.level as i32 + 1))
        .fold(0.0, f64::max);

    Ok(BoundReport {
        diameter: profile.diameter,
        provenance: Provenance::Exact,
        levels: profile
            .levels
            .iter()
            .map(|l| LevelSummary {
                i: l.level,
                radius: l.radius,
                size: l.size(),
                alpha: l.alpha(),
            })
            .collect(),
        psi,
        upper_theorem: 6.0 * psi * scale,
        upper_clean: clean_root * clean_root * scale,
        kklv_lower: kklv * scale,
        matthews_lower: None,
    })
}

/// Matthews bound `max_A ln|A| * min_{u != v in A} E_u tau_v` over the candidates.
pub fn matthews_lower(hit: &HittingTimes<'_>, candidates: &[Vec<usize>]) -> Result<(f64, Vec<usize>)> {
    let n = hit.oracle().vertex_count();
    let usable: BTreeSet<Vec<usize>> = candidates
        .iter()
        .filter(|set| set.len() >= 2)
        .map(|set| {
            let mut s = set.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .filter(|s| s.len() >= 2)
        .collect();
    if usable.is_empty() {
        return Err(Error::contract("Matthews bound needs a candidate set with two vertices"));
    }
    if let Some(&bad) = usable.iter().flatten().find(|&&v| v >= n) {
        return Err(Error::Domain(bad));
    }
    let scored: Vec<(f64, &Vec<usize>)> = usable
        .par_iter()
        .map(|set| {
            let mut min = f64::INFINITY;
            for &u in set {
                for &v in set {
                    if u != v {
                        min = min.min(hit.hitting_unchecked(u, v));
                    }
                }
            }
            ((set.len() as f64).ln() * min, set)
        })
        .collect();
    let (value, set) = scored
        .into_iter()
        .fold((f64::NEG_INFINITY, None), |acc, (v, s)| {
            if v > acc.0 {
                (v, Some(s))
            } else {
                acc
            }
        });
    Ok((value.max(0.0), set.unwrap().clone()))
}

#[derive(Debug, Clone, Copy)]
pub struct BoundOptions {
    /// Largest component for which the resistance diameter is computed exactly.
    pub k_exact: usize,
    /// Skip the Matthews bound (it needs an O(k^2) potential table).
    pub matthews: bool,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            k_exact: 4096,
            matthews: true,
        }
    }
}

/// Bound report together with the geometry that produced it.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: BoundReport,
    pub diameter: ResistanceDiameter,
    /// Upper bound on the resistance diameter used for the upper bounds.
    pub diameter_upper: f64,
    pub profile: CoveringProfile,
    pub matthews_set: Option<Vec<usize>>,
}

/// Full pipeline on a connected graph with at least one edge.
pub fn analyze(g: &MultiGraph, options: BoundOptions) -> Result<Analysis> {
    if g.vertex_count() < 2 || g.edge_count() == 0 {
        return Err(Error::contract("bounds need a connected graph with at least two vertices"));
    }
    let oracle = ResistanceOracle::new(g)?;
    analyze_with(g, &oracle, options)
}

pub fn analyze_with(g: &MultiGraph, oracle: &ResistanceOracle, options: BoundOptions) -> Result<Analysis> {
    if g.vertex_count() < 2 || g.edge_count() == 0 {
        return Err(Error::contract("bounds need a connected graph with at least two vertices"));
    }
    let k = g.vertex_count();
    let diameter = oracle.diameter(options.k_exact);
    let levels = truncation_level(k, diameter.value, diameter.min_positive);
    let profile = greedy_packing(oracle, diameter.value, levels);
    let mut report = psi_bound(&profile, g.edge_count())?;
    let mut diameter_upper = diameter.value;

    if diameter.provenance == Provenance::Approximate {
        // R <= R(u, x) + R(x, v) <= 2 ecc(x); the entropy bound stays valid
        // for any upper bound on R
        let source = diameter.pair.0;
        diameter_upper = 2.0 * oracle.row(source).into_iter().fold(0.0, f64::max);
        let upper_profile = greedy_packing(
            oracle,
            diameter_upper,
            truncation_level(k, diameter_upper, diameter.min_positive),
        );
        let upper = psi_bound(&upper_profile, g.edge_count())?;
        report.psi = upper.psi;
        report.upper_theorem = upper.upper_theorem;
        report.upper_clean = upper.upper_clean;
        report.provenance = Provenance::Approximate;
    }

    let mut matthews_set = None;
    if options.matthews {
        let hit = HittingTimes::new(oracle, g)?;
        let mut candidates: Vec<Vec<usize>> =
            profile.levels.iter().map(|l| l.centers.clone()).collect();
        candidates.push(vec![diameter.pair.0, diameter.pair.1]);
        let (value, set) = matthews_lower(&hit, &candidates)?;
        report.matthews_lower = Some(value);
        matthews_set = Some(set);
    }
    Ok(Analysis {
        report,
        diameter,
        diameter_upper,
        profile,
        matthews_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::walk::ExactCover;

    fn profile_of(g: &MultiGraph) -> (ResistanceOracle, CoveringProfile) {
        let o = ResistanceOracle::new(g).unwrap();
        let d = o.diameter(4096);
        let p = greedy_packing(&o, d.value, truncation_level(g.vertex_count(), d.value, d.min_positive));
        (o, p)
    }

    /// Smallest number of closed balls of `radius` covering all vertices.
    fn brute_force_cover(o: &ResistanceOracle, radius: f64) -> usize {
        let n = o.vertex_count();
        let balls: Vec<u32> = (0..n)
            .map(|c| {
                (0..n)
                    .filter(|&w| within(o.resistance(c, w).unwrap(), radius))
                    .fold(0u32, |m, w| m | (1 << w))
            })
            .collect();
        let full = (1u32 << n) - 1;
        (1..=n)
            .find(|&size| {
                (0u32..1 << n)
                    .filter(|m| m.count_ones() as usize == size)
                    .any(|m| {
                        (0..n)
                            .filter(|&c| m & (1 << c) != 0)
                            .fold(0, |acc, c| acc | balls[c])
                            == full
                    })
            })
            .unwrap()
    }

    #[test]
    fn single_vertex_levels() {
        let g = MultiGraph::empty(1);
        let o = ResistanceOracle::new(&g).unwrap();
        let p = greedy_packing(&o, 0.0, 3);
        assert!(p.levels.iter().all(|l| l.size() == 1 && l.alpha() == 0.0));
    }

    #[test]
    fn cycle8_level_one() {
        let (o, p) = profile_of(&cycle(8));
        assert_eq!(p.diameter, 2.0);
        let l1 = p.level(1).unwrap();
        // packing radius 1/2 isolates vertices, so the scan takes
        // every vertex not yet within 1/2 of a center: all of them
        assert_eq!(l1.size(), 8);
        assert_eq!(brute_force_cover(&o, 1.0), 3);
        let l0_cover = brute_force_cover(&o, 2.0);
        assert_eq!(l0_cover, 1);
    }

    #[test]
    fn path_midpoint_cover() {
        let (o, _) = profile_of(&path(5));
        assert_eq!(brute_force_cover(&o, 2.0), 1);
    }

    #[test]
    fn packing_is_disjoint_and_covers() {
        for g in [cycle(9), path(12), complete(6), star(7), hypercube(3)] {
            let (o, p) = profile_of(&g);
            let n = g.vertex_count();
            for l in &p.levels {
                for w in 0..n {
                    assert!(l.centers.iter().any(|&c| within(o.resistance(c, w).unwrap(), l.radius)));
                }
                for (a, &c1) in l.centers.iter().enumerate() {
                    for &c2 in &l.centers[a + 1..] {
                        let shared = (0..n).any(|w| {
                            within(o.resistance(c1, w).unwrap(), l.radius / 2.0)
                                && within(o.resistance(c2, w).unwrap(), l.radius / 2.0)
                        });
                        assert!(!shared);
                    }
                }
            }
            for w in p.levels.windows(2) {
                assert!(w[0].size() <= w[1].size());
            }
        }
    }

    #[test]
    fn sandwich_against_brute_force() {
        for g in [cycle(8), path(6), star(5), complete(4), path(4).add_edge(0, 3).unwrap().add_edge(3, 3).unwrap()] {
            let (o, p) = profile_of(&g);
            for l in &p.levels {
                let cover = brute_force_cover(&o, l.radius);
                assert!(cover <= l.size());
                if l.level >= 2 {
                    assert!(p.level(l.level - 1).unwrap().size() <= cover);
                }
            }
        }
    }

    #[test]
    fn truncation_levels() {
        assert_eq!(truncation_level(2, 1.0, 1.0), 1);
        // path of 64 edges: R / r_min = 64
        assert_eq!(truncation_level(65, 64.0, 1.0), 6);
        // complete graph: R = r_min, entropy term only
        assert_eq!(truncation_level(1000, 0.002, 0.002), 3);
        assert_eq!(truncation_level(10, 1e30, 1e-30), MAX_LEVEL);
    }

    #[test]
    fn k2_sandwich() {
        let g = path(2);
        let a = analyze(&g, BoundOptions::default()).unwrap();
        assert_eq!(a.report.diameter, 1.0);
        assert!(a.report.upper_theorem >= 1.0);
        assert!(a.report.kklv_lower <= 1.0);
        assert!(a.report.psi.is_finite());
        let (m, _) = (a.report.matthews_lower.unwrap(), ());
        assert!((m - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cycle8_sandwich() {
        let g = cycle(8);
        let a = analyze(&g, BoundOptions::default()).unwrap();
        let exact = ExactCover::new(&g).unwrap().worst().0;
        assert!((exact - 28.0).abs() < 1e-9);
        assert!(a.report.kklv_lower <= exact);
        assert!(a.report.best_lower() <= exact);
        assert!(exact <= a.report.upper_theorem);
    }

    #[test]
    fn psi_monotone_in_alpha() {
        let (_, p) = profile_of(&path(40));
        let base = psi_bound(&p, 39).unwrap().psi;
        let mut smaller = p.clone();
        let l = &mut smaller.levels[2];
        l.centers.truncate(l.centers.len() / 2);
        assert!(psi_bound(&smaller, 39).unwrap().psi <= base);
    }

    #[test]
    fn psi_bound_contracts() {
        let (_, p) = profile_of(&path(3));
        assert!(psi_bound(&p, 0).is_err());
        let empty = CoveringProfile {
            levels: vec![],
            ..p
        };
        assert!(psi_bound(&empty, 2).is_err());
    }

    #[test]
    fn matthews_examples() {
        let p3 = path(3);
        let o = ResistanceOracle::new(&p3).unwrap();
        let h = HittingTimes::new(&o, &p3).unwrap();
        let (v, set) = matthews_lower(&h, &[vec![0, 2]]).unwrap();
        assert!((v - 4.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(set, vec![0, 2]);
        assert!(v <= 5.0);
        assert!(matthews_lower(&h, &[vec![1]]).is_err());
        assert!(matthews_lower(&h, &[vec![0, 7]]).is_err());
    }

    #[test]
    fn path_levels_grow_geometrically() {
        let (_, p) = profile_of(&path(65));
        // on a line, packing balls are integer intervals of half-width floor(rho)
        for l in &p.levels {
            let spacing = 2.0 * (l.radius / 2.0).floor() + 1.0;
            let expect = (64.0 / spacing).floor() as usize + 1;
            assert!(l.size().abs_diff(expect) <= 1, "level {}: {} vs {expect}", l.level, l.size());
        }
    }

    #[test]
    fn tail_matches_direct_sum() {
        for (from, k) in [(3u32, 10usize), (1, 1_000_000), (6, 100)] {
            let ln_k = (k as f64).ln();
            let direct: f64 = (from + 1..400)
                .map(|i| (ln_k / 2f64.powi(i as i32)).max(2f64.powf(-(i as f64) / 2.0)).sqrt())
                .sum();
            assert!((entropy_tail(from, k) - direct).abs() < 1e-9);
        }
    }
}
