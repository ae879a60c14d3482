//! Undirected multigraphs with loops, the state space of every walk in this
//! crate.
//!
//! Degrees follow the edge-end convention: a non-loop edge of multiplicity
//! `m` contributes `m` to both endpoints, a loop of multiplicity `m`
//! contributes `2m` to its vertex. With this convention `sum(deg) = 2|E|`
//! where `|E|` counts edges with multiplicity.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::io::BufRead;
use std::ops::Deref;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    /// Canonical edge list: `u <= v`, sorted, one entry per distinct pair.
    edges: Vec<(usize, usize, u32)>,
    adj: Vec<Vec<(usize, u32)>>,
    degree: Vec<u64>,
    edge_count: u64,
}

impl MultiGraph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_multiplicities(n, BTreeMap::new())
    }

    /// Builds a graph from `(u, v)` pairs; repeated pairs accumulate multiplicity.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_weighted_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1)))
    }

    /// Builds a graph from `(u, v, multiplicity)` triples.
    pub fn from_weighted_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        let mut mult = BTreeMap::new();
        for (u, v, m) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Range { vertex: x, count: n });
                }
            }
            if m == 0 {
                return Err(Error::contract("edge multiplicity must be at least 1"));
            }
            *mult.entry((u.min(v), u.max(v))).or_insert(0u32) += m;
        }
        Ok(Self::from_multiplicities(n, mult))
    }

    fn from_multiplicities(n: usize, mult: BTreeMap<(usize, usize), u32>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0u64; n];
        let mut edge_count = 0u64;
        let mut edges = Vec::with_capacity(mult.len());
        for ((u, v), m) in mult {
            edges.push((u, v, m));
            edge_count += m as u64;
            if u == v {
                adj[u].push((u, m));
                degree[u] += 2 * m as u64;
            } else {
                adj[u].push((v, m));
                adj[v].push((u, m));
                degree[u] += m as u64;
                degree[v] += m as u64;
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        MultiGraph {
            n,
            edges,
            adj,
            degree,
            edge_count,
        }
    }

    /// Parses the edge-list text format.
    ///
    /// Lines are `u v` or `u v m`; `#` starts a comment; an optional header
    /// `n <count>` fixes the vertex count (it must precede any edge line).
    pub fn from_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut triples = Vec::new();
        let mut max_id: Option<usize> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields[0] == "n" {
                if declared.is_some() || !triples.is_empty() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "header must appear once, before any edge".into(),
                    });
                }
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected `n <count>`".into(),
                    });
                }
                declared = Some(parse_int(fields[1], lineno)?);
                continue;
            }
            if fields.len() != 2 && fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected `u v` or `u v m`, got {} fields", fields.len()),
                });
            }
            let u = parse_int(fields[0], lineno)?;
            let v = parse_int(fields[1], lineno)?;
            let m = if fields.len() == 3 {
                let m = parse_int(fields[2], lineno)?;
                if m == 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "multiplicity must be at least 1".into(),
                    });
                }
                u32::try_from(m).map_err(|_| Error::Parse {
                    line: lineno,
                    msg: "multiplicity too large".into(),
                })?
            } else {
                1
            };
            if let Some(count) = declared {
                for x in [u, v] {
                    if x >= count {
                        return Err(Error::Range { vertex: x, count });
                    }
                }
            }
            max_id = Some(max_id.map_or(u.max(v), |x| x.max(u).max(v)));
            triples.push((u, v, m));
        }
        let n = declared.unwrap_or_else(|| max_id.map_or(0, |x| x + 1));
        Self::from_weighted_edges(n, triples)
    }

    /// Serializes to the edge-list text format (with header).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n {}", self.n).unwrap();
        for &(u, v, m) in &self.edges {
            if m == 1 {
                writeln!(out, "{u} {v}").unwrap();
            } else {
                writeln!(out, "{u} {v} {m}").unwrap();
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of edges counted with multiplicity (loops included).
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Canonical `(u, v, multiplicity)` list with `u <= v`.
    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    /// Neighbors of `v` with multiplicities; a loop lists `v` itself once.
    pub fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degree
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        let (a, b) = (u.min(v), u.max(v));
        self.adj
            .get(a)
            .and_then(|list| list.binary_search_by_key(&b, |&(w, _)| w).ok().map(|i| list[i].1))
            .unwrap_or(0)
    }

    /// True when the graph has no loops or parallel edges.
    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|&(u, v, m)| u != v && m == 1)
    }

    /// Returns a copy with one more copy of edge `{u, v}` (a loop when `u == v`).
    pub fn add_edge(&self, u: usize, v: usize) -> Result<Self> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::Range {
                    vertex: x,
                    count: self.n,
                });
            }
        }
        let mut mult: BTreeMap<(usize, usize), u32> =
            self.edges.iter().map(|&(a, b, m)| ((a, b), m)).collect();
        *mult.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        Ok(Self::from_multiplicities(self.n, mult))
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.bfs_distances(0).iter().all(|d| d.is_some())
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &(y, _) in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Connected components, largest first; equal sizes ordered by smallest vertex id.
    pub fn connected_components(&self) -> Vec<ComponentView> {
        let mut label = vec![usize::MAX; self.n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = groups.len();
            let mut members = vec![s];
            label[s] = id;
            let mut head = 0;
            while head < members.len() {
                let x = members[head];
                head += 1;
                for &(y, _) in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            groups.push(members);
        }
        // groups are created in order of smallest member, so a stable sort by
        // size keeps the tie-break.
        groups.sort_by(|a, b| b.len().cmp(&a.len()));
        groups
            .into_iter()
            .map(|vertices| ComponentView::induced(self, vertices))
            .collect()
    }

    /// The largest connected component (ties broken by smallest vertex id).
    pub fn largest_component(&self) -> ComponentView {
        if self.n == 0 {
            return ComponentView {
                vertices: Vec::new(),
                graph: MultiGraph::empty(0),
            };
        }
        self.connected_components().swap_remove(0)
    }

    /// The whole graph as a component view (identity relabeling); errors if disconnected.
    pub fn as_component(&self) -> Result<ComponentView> {
        if !self.is_connected() {
            return Err(Error::contract("graph is not connected"));
        }
        Ok(ComponentView {
            vertices: (0..self.n).collect(),
            graph: self.clone(),
        })
    }
}

fn parse_int(s: &str, line: usize) -> Result<usize> {
    s.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("`{s}` is not a nonnegative integer"),
    })
}

/// A connected induced subgraph with dense local ids `0..k`.
///
/// Local id `i` corresponds to `vertices()[i]` in the parent graph; the
/// vertex list is sorted, so the relabeling is order preserving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentView {
    vertices: Vec<usize>,
    graph: MultiGraph,
}

impl ComponentView {
    fn induced(parent: &MultiGraph, vertices: Vec<usize>) -> Self {
        let local = |x: usize| vertices.binary_search(&x).ok();
        let mut triples = Vec::new();
        for &u in &vertices {
            for &(v, m) in parent.neighbors(u) {
                if u <= v {
                    if let (Some(a), Some(b)) = (local(u), local(v)) {
                        triples.push((a, b, m));
                    }
                }
            }
        }
        let graph = MultiGraph::from_weighted_edges(vertices.len(), triples)
            .expect("induced ids are in range");
        ComponentView { vertices, graph }
    }

    /// Original ids of the component's vertices, sorted.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn into_graph(self) -> MultiGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn to_local(&self, original: usize) -> Option<usize> {
        self.vertices.binary_search(&original).ok()
    }

    pub fn to_original(&self, local: usize) -> usize {
        self.vertices[local]
    }
}

impl Deref for ComponentView {
    type Target = MultiGraph;

    fn deref(&self) -> &MultiGraph {
        &self.graph
    }
}

/// Small named graphs used throughout tests and examples.
pub mod named {
    use super::MultiGraph;

    pub fn path(vertices: usize) -> MultiGraph {
        MultiGraph::from_edges(vertices, (1..vertices).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(vertices: usize) -> MultiGraph {
        assert!(vertices >= 3);
        MultiGraph::from_edges(vertices, (0..vertices).map(|i| (i, (i + 1) % vertices))).unwrap()
    }

    pub fn complete(vertices: usize) -> MultiGraph {
        let edges = (0..vertices).flat_map(|u| (u + 1..vertices).map(move |v| (u, v)));
        MultiGraph::from_edges(vertices, edges).unwrap()
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> MultiGraph {
        MultiGraph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    pub fn hypercube(dim: u32) -> MultiGraph {
        let n = 1usize << dim;
        let edges = (0..n).flat_map(move |x| {
            (0..dim).filter_map(move |b| {
                let y = x ^ (1 << b);
                (x < y).then_some((x, y))
            })
        });
        MultiGraph::from_edges(n, edges).unwrap()
    }

    /// Discrete torus `Z_side^dim`; requires `side >= 3` so that it is simple.
    pub fn torus(side: usize, dim: u32) -> MultiGraph {
        assert!(side >= 3);
        let n = side.pow(dim);
        let mut edges = Vec::with_capacity(n * dim as usize);
        for x in 0..n {
            let mut stride = 1;
            for _ in 0..dim {
                let coord = (x / stride) % side;
                let y = x - coord * stride + ((coord + 1) % side) * stride;
                edges.push((x, y));
                stride *= side;
            }
        }
        MultiGraph::from_edges(n, edges).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<MultiGraph> {
        MultiGraph::from_edge_list(s.as_bytes())
    }

    fn degree_sum_holds(g: &MultiGraph) -> bool {
        g.degrees().iter().sum::<u64>() == 2 * g.edge_count()
    }

    #[test]
    fn parses_path() {
        let g = parse("0 1\n1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.degrees(), &[1, 2, 1]);
    }

    #[test]
    fn multiplicity_column() {
        let g = parse("0 1 2").unwrap();
        assert_eq!(g.degrees(), &[2, 2]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.multiplicity(1, 0), 2);
    }

    #[test]
    fn loop_counts_twice() {
        let g = parse("0 0").unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn duplicate_lines_accumulate() {
        let g = parse("# comment\n0 1\n1 0 # again\n").unwrap();
        assert_eq!(g.multiplicity(0, 1), 2);
        assert!(!g.is_simple());
    }

    #[test]
    fn header_adds_isolated_vertices() {
        let g = parse("n 5\n0 1\n").unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.connected_components().len(), 4);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse("0 1\n\n1 2 3 4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0 1 0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("n 3\n0 3"),
            Err(Error::Range { vertex: 3, count: 3 })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = parse("n 6\n0 1 3\n2 2\n4 1\n").unwrap();
        assert_eq!(parse(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn components_of_path() {
        let comps = path(3).connected_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 3);
    }

    #[test]
    fn component_tie_break_uses_smallest_id() {
        let g = MultiGraph::from_edges(4, [(2, 3), (0, 1)]).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].vertices(), &[0, 1]);
        assert_eq!(comps[1].vertices(), &[2, 3]);
    }

    #[test]
    fn empty_graph_has_singletons() {
        let comps = MultiGraph::empty(4).connected_components();
        assert_eq!(comps.len(), 4);
        assert!(comps.iter().all(|c| c.len() == 1));
        assert_eq!(comps[0].vertices(), &[0]);
    }

    #[test]
    fn add_edge_examples() {
        let p3 = path(3);
        let c3 = p3.add_edge(0, 2).unwrap();
        assert_eq!(c3, cycle(3));

        let k2 = path(2).add_edge(0, 1).unwrap();
        assert_eq!(k2.degrees(), &[2, 2]);

        let looped = p3.add_edge(1, 1).unwrap();
        assert_eq!(looped.degree(1), 4);
        assert_eq!(looped.edge_count(), 3);

        assert!(matches!(p3.add_edge(0, 3), Err(Error::Range { .. })));
    }

    #[test]
    fn named_graphs() {
        let q3 = hypercube(3);
        assert_eq!(q3.vertex_count(), 8);
        assert!(q3.degrees().iter().all(|&d| d == 3));
        let t = torus(5, 2);
        assert_eq!(t.vertex_count(), 25);
        assert!(t.degrees().iter().all(|&d| d == 4));
        assert!(t.is_simple());
        assert_eq!(complete(5).edge_count(), 10);
    }

    fn arb_multigraph() -> impl Strategy<Value = MultiGraph> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n, 1u32..3), 0..30)
                .prop_map(move |e| MultiGraph::from_weighted_edges(n, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn degree_sum_and_symmetry(g in arb_multigraph()) {
            prop_assert!(degree_sum_holds(&g));
            for u in 0..g.vertex_count() {
                for &(v, m) in g.neighbors(u) {
                    prop_assert_eq!(g.multiplicity(v, u), m);
                }
            }
        }

        #[test]
        fn add_edge_is_local(g in arb_multigraph(), a in 0usize..12, b in 0usize..12) {
            let n = g.vertex_count();
            let (a, b) = (a % n, b % n);
            let h = g.add_edge(a, b).unwrap();
            prop_assert_eq!(h.edge_count(), g.edge_count() + 1);
            prop_assert!(degree_sum_holds(&h));
            for x in 0..n {
                if x != a && x != b {
                    prop_assert_eq!(h.degree(x), g.degree(x));
                }
            }
        }

        #[test]
        fn components_partition(g in arb_multigraph()) {
            let comps = g.connected_components();
            let mut seen = vec![0u32; g.vertex_count()];
            for c in &comps {
                prop_assert!(c.graph().is_connected());
                for (i, &v) in c.vertices().iter().enumerate() {
                    seen[v] += 1;
                    prop_assert_eq!(c.to_local(v), Some(i));
                    prop_assert_eq!(c.to_original(i), v);
                }
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
            for w in comps.windows(2) {
                prop_assert!(w[0].len() >= w[1].len());
            }
        }
    }
}
