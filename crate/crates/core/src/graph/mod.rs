//! Finite graphs as half-edge structures.
//!
//! Every edge `k` owns the two half-edges `2k` and `2k + 1`; the involution is
//! `h ^ 1`. Half-edge `2k` points from the edge's declared source to its
//! declared target. Loops are ordinary edges whose two halves share a vertex.

mod io;
mod length;
mod morphism;
mod tree;

pub use io::{parse_graph, parse_metric_graph, EdgeDoc, GraphDoc};
pub use length::{validate_length_function, LengthFunction, LONG_EDGE_TOL};
pub use morphism::{collapse, HalfEdgeImage, Morphism};
pub use tree::{cycle_basis, OrientedCycle, SpanningTree};

use crate::error::{Error, Result};
use crate::report::{Check, Report};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type HalfEdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    /// `target[h]` is the vertex half-edge `h` points into.
    target: Vec<VertexId>,
}

impl Graph {
    /// Builds a graph from named vertices and `(name, source, target)` edges.
    pub fn new(vertex_names: Vec<String>, edges: Vec<(String, VertexId, VertexId)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for name in vertex_names.iter().chain(edges.iter().map(|e| &e.0)) {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateId(name.clone()));
            }
        }
        let mut target = Vec::with_capacity(2 * edges.len());
        let mut edge_names = Vec::with_capacity(edges.len());
        for (name, s, t) in edges {
            if s >= vertex_names.len() || t >= vertex_names.len() {
                return Err(Error::DanglingVertex {
                    edge: name,
                    vertex: format!("#{}", s.max(t)),
                });
            }
            target.push(t);
            target.push(s);
            edge_names.push(name);
        }
        Ok(Graph { vertex_names, edge_names, target })
    }

    /// Convenience constructor with vertices `v0, v1, …` and edges `e0, e1, …`.
    pub fn from_edge_list(num_vertices: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let vertices = (0..num_vertices).map(|i| format!("v{i}")).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(k, &(s, t))| (format!("e{k}"), s, t))
            .collect();
        Graph::new(vertices, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_names.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.target.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    /// Human-readable half-edge label: the edge name, with `~` for the reverse half.
    pub fn half_edge_label(&self, h: HalfEdgeId) -> String {
        let name = &self.edge_names[h / 2];
        if h % 2 == 0 {
            name.clone()
        } else {
            format!("{name}~")
        }
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edge_names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn involution(&self, h: HalfEdgeId) -> HalfEdgeId {
        h ^ 1
    }

    #[inline]
    pub fn target(&self, h: HalfEdgeId) -> VertexId {
        self.target[h]
    }

    #[inline]
    pub fn source(&self, h: HalfEdgeId) -> VertexId {
        self.target[h ^ 1]
    }

    #[inline]
    pub fn edge_of(h: HalfEdgeId) -> EdgeId {
        h / 2
    }

    /// The canonically oriented half-edge of an edge.
    #[inline]
    pub fn forward(e: EdgeId) -> HalfEdgeId {
        2 * e
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.source(2 * e), self.target(2 * e))
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (s, t) = self.endpoints(e);
        s == t
    }

    /// Half-edges pointing out of `v`. A loop contributes both halves.
    pub fn out_half_edges(&self, v: VertexId) -> impl Iterator<Item = HalfEdgeId> + '_ {
        (0..self.target.len()).filter(move |&h| self.source(h) == v)
    }

    /// Half-edges pointing into `v`.
    pub fn in_half_edges(&self, v: VertexId) -> impl Iterator<Item = HalfEdgeId> + '_ {
        (0..self.target.len()).filter(move |&h| self.target[h] == v)
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.target.iter().filter(|&&t| t == v).count()
    }

    /// Number of connected components of the subgraph keeping edges with `keep[e]`.
    pub fn components_with(&self, keep: impl Fn(EdgeId) -> bool) -> (usize, Vec<usize>) {
        let mut uf = UnionFind::new(self.num_vertices());
        for e in 0..self.num_edges() {
            if keep(e) {
                let (s, t) = self.endpoints(e);
                uf.union(s, t);
            }
        }
        let mut label = vec![usize::MAX; self.num_vertices()];
        let mut count = 0;
        for v in 0..self.num_vertices() {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            label[v] = label[r];
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices() > 0 && self.components_with(|_| true).0 == 1
    }

    /// Rank of `H₁`: `#edges − #vertices + 1`.
    pub fn rank(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.num_edges() + 1 - self.num_vertices())
    }

    /// The bridges of the graph, in ascending edge order.
    pub fn separating_edges(&self) -> Vec<EdgeId> {
        let n = self.num_vertices();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut bridges = Vec::new();
        let mut time = 0;
        let incident: Vec<Vec<HalfEdgeId>> = (0..n).map(|v| self.out_half_edges(v).collect()).collect();
        for start in 0..n {
            if disc[start] != usize::MAX {
                continue;
            }
            // (vertex, edge used to enter, next incident index)
            let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(start, None, 0)];
            disc[start] = time;
            low[start] = time;
            time += 1;
            while let Some(top) = stack.last_mut() {
                let (v, via) = (top.0, top.1);
                if top.2 < incident[v].len() {
                    let h = incident[v][top.2];
                    top.2 += 1;
                    let e = Graph::edge_of(h);
                    if Some(e) == via {
                        continue;
                    }
                    let w = self.target(h);
                    if disc[w] == usize::MAX {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, Some(e), 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            bridges.push(via.unwrap());
                        }
                    }
                }
            }
        }
        bridges.sort_unstable();
        bridges
    }
}

/// Result of [`validate_shape`].
#[derive(Debug, Clone)]
pub struct ShapeReport {
    pub connected: bool,
    pub valences: Vec<usize>,
    pub involution_fixed_points: usize,
    pub separating_edges: Vec<EdgeId>,
    pub report: Report,
}

impl ShapeReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Structural report on a graph. With `require_gr` the graph must be connected
/// with every vertex of valence at least three; with `require_no_bridges` it
/// must additionally have no separating edges.
pub fn validate_shape(g: &Graph, require_gr: bool, require_no_bridges: bool) -> ShapeReport {
    let connected = g.is_connected();
    let valences: Vec<usize> = (0..g.num_vertices()).map(|v| g.valence(v)).collect();
    let involution_fixed_points = (0..g.num_half_edges()).filter(|&h| g.involution(h) == h).count();
    let separating_edges = g.separating_edges();

    let mut report = Report::new();
    let involutive = (0..g.num_half_edges())
        .all(|h| g.involution(g.involution(h)) == h && g.source(g.involution(h)) == g.target(h));
    report.push(Check::boolean(
        "shape.involution",
        involutive && involution_fixed_points == 0,
        None,
    ));
    if require_gr {
        report.push(Check::boolean("shape.connected", connected, None));
        let (worst, at) = valences
            .iter()
            .enumerate()
            .map(|(v, &k)| (k as f64 - 3.0, v))
            .fold((f64::INFINITY, None), |acc, (m, v)| if m < acc.0 { (m, Some(v)) } else { acc });
        report.push(Check::from_margin(
            "shape.min_valence",
            if worst.is_finite() { worst } else { -3.0 },
            at.map(|v| g.vertex_name(v).to_string()),
        ));
    }
    if require_no_bridges {
        report.push(Check::boolean(
            "shape.no_separating_edges",
            separating_edges.is_empty(),
            separating_edges.first().map(|&e| g.edge_name(e).to_string()),
        ));
    }
    ShapeReport { connected, valences, involution_fixed_points, separating_edges, report }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn connected_without(g: &Graph, skip: EdgeId) -> bool {
        g.components_with(|e| e != skip).0 == 1
    }

    #[test]
    fn half_edge_structure() {
        let g = corpus::theta();
        assert_eq!(g.num_half_edges(), 6);
        for h in 0..6 {
            assert_eq!(g.involution(g.involution(h)), h);
            assert_ne!(g.involution(h), h);
            assert_eq!(g.source(g.involution(h)), g.target(h));
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(corpus::theta().rank().unwrap(), 2);
        assert_eq!(corpus::rose(2).rank().unwrap(), 2);
        assert_eq!(corpus::path(4).rank().unwrap(), 0);
        let split = Graph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(split.rank(), Err(Error::Disconnected)));
    }

    #[test]
    fn bridges_of_small_graphs() {
        assert!(corpus::theta().separating_edges().is_empty());
        assert!(corpus::rose(2).separating_edges().is_empty());
        let d = corpus::dumbbell();
        assert_eq!(d.separating_edges(), vec![d.edge_id("bridge").unwrap()]);
        let p = corpus::path(4);
        assert_eq!(p.separating_edges(), vec![0, 1, 2]);
    }

    #[test]
    fn parallel_edges_are_not_bridges() {
        let g = Graph::from_edge_list(3, &[(0, 1), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.separating_edges(), vec![2]);
    }

    #[test]
    fn shape_reports() {
        let theta = validate_shape(&corpus::theta(), true, true);
        assert!(theta.passed());
        assert_eq!(theta.valences, vec![3, 3]);
        let rose = validate_shape(&corpus::rose(2), true, true);
        assert!(rose.passed());
        assert_eq!(rose.valences, vec![4]);
        let seg = validate_shape(&corpus::path(2), true, false);
        assert!(!seg.passed());
        assert_eq!(seg.valences, vec![1, 1]);
        let dumbbell = validate_shape(&corpus::dumbbell(), true, true);
        assert!(!dumbbell.passed());
        assert!(validate_shape(&corpus::dumbbell(), true, false).passed());
    }

    #[test]
    fn bridges_match_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n: usize = rng.gen_range(1..=5);
            let m = rng.gen_range(n.saturating_sub(1)..=8);
            let edges: Vec<_> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            let g = Graph::from_edge_list(n, &edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            let brute: Vec<EdgeId> = (0..m).filter(|&e| !connected_without(&g, e)).collect();
            assert_eq!(g.separating_edges(), brute, "edges {edges:?}");
        }
    }
}
