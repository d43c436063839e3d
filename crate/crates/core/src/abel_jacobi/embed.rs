use super::cut::CutForest;
use super::ImmersedGraph;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, HalfEdgeId, UnionFind, VertexId};
use crate::linalg::{self, Matrix};
use crate::report::{Check, Report};
use crate::TOL_GEOMETRIC;
use std::collections::VecDeque;

/// Scale applied to good coordinates before thickening.
pub const SCALE: f64 = 4.0;
/// Lower bound on the Euclidean length of external edges.
pub const EXTERNAL_EDGE_MIN: f64 = 4.0;

/// Origin of a vertex of an [`EmbeddedTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeVertex {
    /// A vertex of the graph.
    Graph(VertexId),
    /// The free end of the external edge along half-edge `h`.
    Leaf(HalfEdgeId),
    /// A vertex of a tree given directly by positions.
    Free(usize),
}

/// A linearly embedded finite tree in Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedTree {
    pub labels: Vec<TreeVertex>,
    /// Positions relative to the tree's own base.
    pub positions: Vec<Vec<f64>>,
    pub edges: Vec<(usize, usize)>,
    /// Graph edge carried by each tree edge, if any.
    pub edge_labels: Vec<Option<EdgeId>>,
    /// Position of the base in the global (scaled good) frame.
    pub anchor: Vec<f64>,
    pub scale: f64,
}

impl EmbeddedTree {
    /// A tree given by vertex positions and an edge list.
    pub fn new(positions: Vec<Vec<f64>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::NotATree("no vertices".into()));
        }
        let dim = positions[0].len();
        if positions.iter().any(|p| p.len() != dim) {
            return Err(Error::NotATree("positions have mixed dimensions".into()));
        }
        if edges.len() + 1 != n {
            return Err(Error::NotATree(format!("{} vertices but {} edges", n, edges.len())));
        }
        let mut uf = UnionFind::new(n);
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::NotATree(format!("edge {k} references a missing vertex")));
            }
            if !uf.union(a, b) {
                return Err(Error::NotATree(format!("edge {k} closes a cycle")));
            }
        }
        let m = edges.len();
        Ok(EmbeddedTree {
            labels: (0..n).map(TreeVertex::Free).collect(),
            positions,
            edges,
            edge_labels: vec![None; m],
            anchor: vec![0.0; dim],
            scale: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.num_vertices()];
        for &(a, b) in &self.edges {
            val[a] += 1;
            val[b] += 1;
        }
        val
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.valence(v) == 1
    }

    /// `(edge index, other endpoint)` for every edge at `v`.
    pub fn incident(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k, &(a, b))| {
                if a == v {
                    Some((k, b))
                } else if b == v {
                    Some((k, a))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn edge_vector(&self, k: usize) -> Vec<f64> {
        let (a, b) = self.edges[k];
        linalg::sub(&self.positions[b], &self.positions[a])
    }

    pub fn edge_length(&self, k: usize) -> f64 {
        linalg::norm(&self.edge_vector(k))
    }

    /// Index of the leaf at the end of the external edge along `h`.
    pub fn leaf_of(&self, h: HalfEdgeId) -> Option<usize> {
        self.labels.iter().position(|&l| l == TreeVertex::Leaf(h))
    }

    pub fn global_position(&self, v: usize) -> Vec<f64> {
        linalg::add(&self.anchor, &self.positions[v])
    }

    /// Axis-aligned bounding box of the local positions.
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in &self.positions {
            for i in 0..d {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }

    /// Applies `x ↦ Rx + t` to every position.
    pub fn transformed(&self, rotation: &Matrix, translation: &[f64]) -> Self {
        let mut t = self.clone();
        for p in t.positions.iter_mut() {
            *p = linalg::add(&rotation.mul_vec(p), translation);
        }
        t
    }

    /// Hop distances between all pairs of vertices.
    pub fn hop_distances(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let adj: Vec<Vec<usize>> = (0..n).map(|v| self.incident(v).into_iter().map(|(_, w)| w).collect()).collect();
        (0..n)
            .map(|s| {
                let mut d = vec![usize::MAX; n];
                d[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(v) = q.pop_front() {
                    for &w in &adj[v] {
                        if d[w] == usize::MAX {
                            d[w] = d[v] + 1;
                            q.push_back(w);
                        }
                    }
                }
                d
            })
            .collect()
    }

    /// Endpoints `(near_e, far_e, near_f, far_f)` of two distinct edges, the
    /// near ones being closest to each other along the tree.
    pub fn facing_endpoints(&self, hops: &[Vec<usize>], e: usize, f: usize) -> (usize, usize, usize, usize) {
        let (a, b) = self.edges[e];
        let (c, d) = self.edges[f];
        let mut best = (usize::MAX, 0, 0, 0, 0);
        for (x, xf) in [(a, b), (b, a)] {
            for (y, yf) in [(c, d), (d, c)] {
                if hops[x][y] < best.0 {
                    best = (hops[x][y], x, xf, y, yf);
                }
            }
        }
        (best.1, best.2, best.3, best.4)
    }

    /// Merges the endpoints of every edge shorter than `tol`.
    pub fn collapse_short_edges(&self, tol: f64) -> Self {
        let n = self.num_vertices();
        let mut uf = UnionFind::new(n);
        for k in 0..self.num_edges() {
            if self.edge_length(k) < tol {
                let (a, b) = self.edges[k];
                uf.union(a, b);
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut labels = Vec::new();
        let mut positions = Vec::new();
        for v in 0..n {
            let r = uf.find(v);
            if index[r] == usize::MAX {
                index[r] = labels.len();
                labels.push(self.labels[r]);
                positions.push(self.positions[r].clone());
            }
            index[v] = index[r];
        }
        let mut edges = Vec::new();
        let mut edge_labels = Vec::new();
        for k in 0..self.num_edges() {
            if self.edge_length(k) >= tol {
                let (a, b) = self.edges[k];
                edges.push((index[a], index[b]));
                edge_labels.push(self.edge_labels[k]);
            }
        }
        EmbeddedTree { labels, positions, edges, edge_labels, anchor: self.anchor.clone(), scale: self.scale }
    }

    pub fn vertex_label(&self, g: Option<&Graph>, v: usize) -> String {
        match (self.labels[v], g) {
            (TreeVertex::Graph(x), Some(g)) => g.vertex_name(x).to_string(),
            (TreeVertex::Leaf(h), Some(g)) => format!("leaf:{}", g.half_edge_label(h)),
            (TreeVertex::Graph(x), None) => format!("v{x}"),
            (TreeVertex::Leaf(h), None) => format!("leaf:h{h}"),
            (TreeVertex::Free(i), _) => format!("p{i}"),
        }
    }
}

/// Smallest residual of `Σ cᵢ uᵢ = target` with `cᵢ ≥ 0` over linearly
/// independent subsets of at most `dim` vectors.
fn cone_residual(vectors: &[Vec<f64>], target: &[f64]) -> f64 {
    let dim = target.len();
    let k = vectors.len();
    let mut best = linalg::norm(target);
    let limit = 1usize << k;
    for mask in 1..limit {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > dim {
            continue;
        }
        let cols: Vec<&Vec<f64>> = idx.iter().map(|&i| &vectors[i]).collect();
        let m = idx.len();
        let gram = Matrix::from_rows(
            &(0..m).map(|i| (0..m).map(|j| linalg::dot(cols[i], cols[j])).collect()).collect::<Vec<_>>(),
        );
        let rhs: Vec<f64> = (0..m).map(|i| linalg::dot(cols[i], target)).collect();
        let Ok(inv) = gram.inverse() else { continue };
        let coef = inv.mul_vec(&rhs);
        if coef.iter().any(|&c| c < -TOL_GEOMETRIC) {
            continue;
        }
        let mut fit = vec![0.0; dim];
        for (c, u) in coef.iter().zip(&cols) {
            linalg::axpy(&mut fit, c.max(0.0), u);
        }
        best = best.min(linalg::dist(&fit, target));
    }
    best
}

/// The three taut conditions and the external-edge bound, after merging
/// the endpoints of zero-length edges.
pub fn check_tautness(tree: &EmbeddedTree) -> Report {
    check_tautness_labeled(tree, None)
}

pub fn check_tautness_labeled(tree: &EmbeddedTree, g: Option<&Graph>) -> Report {
    let t = tree.collapse_short_edges(1e-12);
    let val = t.valences();
    let mut report = Report::new();

    let mut worst_cone = 0.0f64;
    let mut at = None;
    for v in 0..t.num_vertices() {
        if val[v] < 2 {
            continue;
        }
        let units: Vec<Vec<f64>> = t
            .incident(v)
            .into_iter()
            .map(|(_, w)| {
                let d = linalg::sub(&t.positions[w], &t.positions[v]);
                linalg::scale(&d, 1.0 / linalg::norm(&d))
            })
            .collect();
        for i in 0..units.len() {
            let others: Vec<Vec<f64>> =
                units.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, u)| u.clone()).collect();
            let res = cone_residual(&others, &linalg::scale(&units[i], -1.0));
            if res > worst_cone {
                worst_cone = res;
                at = Some(t.vertex_label(g, v));
            }
        }
    }
    report.push(Check::at_most("taut.positive_balance", worst_cone, TOL_GEOMETRIC, at));

    let bivalent = (0..t.num_vertices()).find(|&v| val[v] == 2);
    report.push(Check::boolean("taut.no_bivalent", bivalent.is_none(), bivalent.map(|v| t.vertex_label(g, v))));

    let hops = t.hop_distances();
    let mut worst_cos = 1.0f64;
    let mut at = None;
    for e in 0..t.num_edges() {
        for f in e + 1..t.num_edges() {
            let (ne, fe, nf, ff) = t.facing_endpoints(&hops, e, f);
            let a = linalg::sub(&t.positions[ne], &t.positions[fe]);
            let b = linalg::sub(&t.positions[ff], &t.positions[nf]);
            let cos = linalg::dot(&a, &b) / (linalg::norm(&a) * linalg::norm(&b));
            if cos < worst_cos {
                worst_cos = cos;
                at = Some(format!("{}-{}|{}-{}", t.vertex_label(g, fe), t.vertex_label(g, ne), t.vertex_label(g, nf), t.vertex_label(g, ff)));
            }
        }
    }
    report.push(Check::from_margin("taut.path_angles", worst_cos.min(1.0) + TOL_GEOMETRIC, at));

    let mut shortest = f64::INFINITY;
    let mut at = None;
    for k in 0..t.num_edges() {
        let (a, b) = t.edges[k];
        if val[a] == 1 || val[b] == 1 {
            let len = t.edge_length(k);
            if len < shortest {
                shortest = len;
                at = Some(format!("{}-{}", t.vertex_label(g, a), t.vertex_label(g, b)));
            }
        }
    }
    if shortest.is_finite() {
        report.push(Check::from_margin("taut.external_length", shortest - EXTERNAL_EDGE_MIN + TOL_GEOMETRIC, at));
    } else {
        report.push(Check::boolean("taut.external_length", true, None));
    }
    report
}

/// The two external edges over one cut edge, placed in the global frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutGluing {
    pub edge: EdgeId,
    /// `(tree, leaf vertex)` on the side of the forward half-edge.
    pub a: (usize, usize),
    /// `(tree, leaf vertex)` on the side of the reverse half-edge.
    pub b: (usize, usize),
    /// Lattice vector (cycle coordinates) by which tree `b` is translated to meet tree `a`.
    pub shift_cycles: Vec<i64>,
    /// The same translation in the global frame.
    pub shift: Vec<f64>,
    /// Distance of the raw closure defect from the nearest lattice vector.
    pub integrality_residual: f64,
}

/// Cut trees embedded in scaled good coordinates, with the torus lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusLayout {
    /// Lattice generators `s·U·eᵢ` as columns.
    pub lattice: Matrix,
    pub trees: Vec<EmbeddedTree>,
    pub gluings: Vec<LayoutGluing>,
    pub scale: f64,
}

impl TorusLayout {
    pub fn rank(&self) -> usize {
        self.lattice.rows()
    }

    /// Largest distance between the two copies of a glued external edge.
    pub fn gluing_mismatch(&self) -> f64 {
        let mut worst = 0.0f64;
        for gl in &self.gluings {
            let ta = &self.trees[gl.a.0];
            let tb = &self.trees[gl.b.0];
            let inner_a = ta.incident(gl.a.1)[0].1;
            let inner_b = tb.incident(gl.b.1)[0].1;
            let pa_leaf = ta.global_position(gl.a.1);
            let pa_in = ta.global_position(inner_a);
            let pb_leaf = linalg::add(&tb.global_position(gl.b.1), &gl.shift);
            let pb_in = linalg::add(&tb.global_position(inner_b), &gl.shift);
            worst = worst.max(linalg::dist(&pa_leaf, &pb_in)).max(linalg::dist(&pa_in, &pb_leaf));
        }
        worst
    }
}

/// Embeds every cut tree by `s·U·f`, relative to its lowest-id vertex.
pub fn embed_trees(g: &Graph, forest: &CutForest, im: &ImmersedGraph, scale: f64) -> Result<TorusLayout> {
    let r = im.rank();
    let u = &im.metric.u;
    let lattice = u.scaled(scale);
    let lengths = &im.lengths;
    let omega = im.omega();
    let mut trees = Vec::with_capacity(forest.num_trees());
    // potentials recomputed inside each component, in cycle coordinates
    let mut local_f: Vec<Vec<f64>> = vec![Vec::new(); g.num_vertices()];
    for ct in &forest.trees {
        let base = ct.base();
        local_f[base] = im.potentials[base].clone();
        let mut seen = vec![false; g.num_vertices()];
        seen[base] = true;
        let mut q = VecDeque::from([base]);
        while let Some(v) = q.pop_front() {
            for h in g.out_half_edges(v) {
                let e = Graph::edge_of(h);
                let w = g.target(h);
                if forest.cut[e] || seen[w] {
                    continue;
                }
                seen[w] = true;
                let mut p = local_f[v].clone();
                linalg::axpy(&mut p, lengths.half_edge(h) * 2.0, omega.value(h));
                local_f[w] = p;
                q.push_back(w);
            }
        }

        let mut labels = Vec::new();
        let mut positions = Vec::new();
        let mut index = std::collections::HashMap::new();
        for &v in &ct.vertices {
            index.insert(v, labels.len());
            labels.push(TreeVertex::Graph(v));
            let rel = linalg::sub(&local_f[v], &local_f[base]);
            positions.push(linalg::scale(&u.mul_vec(&rel), scale));
        }
        let mut edges = Vec::new();
        let mut edge_labels = Vec::new();
        for &e in &ct.edges {
            let (s, t) = g.endpoints(e);
            edges.push((index[&s], index[&t]));
            edge_labels.push(Some(e));
        }
        for &h in &ct.legs {
            let from = index[&g.source(h)];
            let disp = linalg::scale(&u.mul_vec(&im.displacement(h)), scale);
            positions.push(linalg::add(&positions[from], &disp));
            labels.push(TreeVertex::Leaf(h));
            edges.push((from, labels.len() - 1));
            edge_labels.push(Some(Graph::edge_of(h)));
        }
        let anchor = if r == 0 { Vec::new() } else { linalg::scale(&u.mul_vec(&local_f[base]), scale) };
        trees.push(EmbeddedTree { labels, positions, edges, edge_labels, anchor, scale });
    }

    let mut gluings = Vec::new();
    for gl in &forest.gluings {
        let h = Graph::forward(gl.edge);
        let end = linalg::add(&local_f[g.source(h)], &im.displacement(h));
        let defect = linalg::sub(&end, &local_f[g.target(h)]);
        let rounded: Vec<i64> = defect.iter().map(|x| x.round() as i64).collect();
        let residual = defect.iter().zip(&rounded).map(|(x, &k)| (x - k as f64).abs()).fold(0.0, f64::max);
        let as_f: Vec<f64> = rounded.iter().map(|&k| k as f64).collect();
        let shift = if r == 0 { Vec::new() } else { lattice.mul_vec(&as_f) };
        let ta = gl.source_side.0;
        let tb = gl.target_side.0;
        gluings.push(LayoutGluing {
            edge: gl.edge,
            a: (ta, trees[ta].leaf_of(h).expect("leaf present")),
            b: (tb, trees[tb].leaf_of(g.involution(h)).expect("leaf present")),
            shift_cycles: rounded,
            shift,
            integrality_residual: residual,
        });
    }
    Ok(TorusLayout { lattice, trees, gluings, scale })
}

/// Worst value of `⟨Uω(e), Uω(e′)⟩` over pairs of edges in one cut tree,
/// each oriented away from the path joining them.
pub fn path_pair_report(g: &Graph, layout: &TorusLayout) -> Check {
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for t in &layout.trees {
        let hops = t.hop_distances();
        for e in 0..t.num_edges() {
            for f in e + 1..t.num_edges() {
                let (ne, fe, nf, ff) = t.facing_endpoints(&hops, e, f);
                let le = t.edge_length(e);
                let lf = t.edge_length(f);
                if le < 1e-12 || lf < 1e-12 {
                    continue;
                }
                let a = linalg::scale(&linalg::sub(&t.positions[fe], &t.positions[ne]), 1.0 / le);
                let b = linalg::scale(&linalg::sub(&t.positions[ff], &t.positions[nf]), 1.0 / lf);
                let d = linalg::dot(&a, &b);
                if d > worst {
                    worst = d;
                    at = Some(format!("{}-{}|{}-{}", t.vertex_label(Some(g), ne), t.vertex_label(Some(g), fe), t.vertex_label(Some(g), nf), t.vertex_label(Some(g), ff)));
                }
            }
        }
    }
    Check::at_most("cut_tree.path_pair_sign", if worst.is_finite() { worst } else { 0.0 }, crate::TOL_STRUCTURAL, at)
}

#[cfg(test)]
mod tests {
    use super::super::{cut_long_edges, torus_immersion};
    use super::*;
    use crate::corpus;
    use crate::graph::LengthFunction;

    fn layout(g: &Graph, l: &LengthFunction) -> TorusLayout {
        let im = torus_immersion(g, l, 0).unwrap();
        let f = cut_long_edges(g, l).unwrap();
        embed_trees(g, &f, &im, SCALE).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        linalg::dist(a, b) < 1e-12
    }

    #[test]
    fn theta_tripod_leaves() {
        let g = corpus::theta();
        let lay = layout(&g, &LengthFunction::unit(&g));
        let t = &lay.trees[0];
        assert!(close(&t.positions[t.leaf_of(0).unwrap()], &[4.0, 0.0]));
        assert!(close(&t.positions[t.leaf_of(2).unwrap()], &[0.0, 4.0]));
        assert!(close(&t.positions[t.leaf_of(4).unwrap()], &[-4.0, -4.0]));
        assert!(check_tautness(t).passed());
        assert!(check_tautness(&lay.trees[1]).passed());
        assert!(lay.gluing_mismatch() < 1e-12);
        assert_eq!(lay.gluings[0].shift_cycles, vec![1, 0]);
        assert_eq!(lay.gluings[2].shift_cycles, vec![0, 0]);
    }

    #[test]
    fn rose_four_star() {
        let g = corpus::rose(2);
        let lay = layout(&g, &LengthFunction::unit(&g));
        let t = &lay.trees[0];
        let legs: Vec<Vec<f64>> = (0..4).map(|h| t.positions[t.leaf_of(h).unwrap()].clone()).collect();
        assert!(close(&legs[0], &[4.0, 0.0]) && close(&legs[1], &[-4.0, 0.0]));
        assert!(close(&legs[2], &[0.0, 4.0]) && close(&legs[3], &[0.0, -4.0]));
        assert!(check_tautness(t).passed());
        assert!(lay.gluing_mismatch() < 1e-12);
        assert!(path_pair_report(&g, &lay).passed());
    }

    #[test]
    fn synthetic_trees() {
        let seg = EmbeddedTree::new(vec![vec![0.0, 0.0], vec![8.0, 0.0]], vec![(0, 1)]).unwrap();
        assert!(check_tautness(&seg).passed());

        // a path that turns back on itself
        let reflex = EmbeddedTree::new(
            vec![vec![0.0, 0.0], vec![5.0, 0.0], vec![-5.0, 0.0], vec![0.0, -5.0], vec![5.0, 3.0], vec![5.0, -6.0], vec![2.0, 6.0]],
            vec![(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (4, 6)],
        )
        .unwrap();
        let rep = check_tautness(&reflex);
        assert!(!rep.get("taut.path_angles").unwrap().passed());
        assert!(!rep.get("taut.no_bivalent").unwrap().passed());

        // all legs on one side: no positive balance
        let fan = EmbeddedTree::new(
            vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0], vec![3.0, 3.0]],
            vec![(0, 1), (0, 2), (0, 3)],
        )
        .unwrap();
        assert!(!check_tautness(&fan).get("taut.positive_balance").unwrap().passed());

        let short = EmbeddedTree::new(vec![vec![0.0], vec![3.0]], vec![(0, 1)]).unwrap();
        assert!(!check_tautness(&short).get("taut.external_length").unwrap().passed());

        assert!(EmbeddedTree::new(vec![vec![0.0], vec![1.0]], vec![(0, 1), (1, 0)]).is_err());
        assert!(EmbeddedTree::new(vec![vec![0.0], vec![1.0], vec![2.0]], vec![(0, 1), (0, 1)]).is_err());
    }

    #[test]
    fn zero_length_edges_collapse_before_tautness() {
        let g = corpus::theta();
        let lay = layout(&g, &LengthFunction::from_edge_lengths(vec![1.0, 1.0, 0.0]));
        assert_eq!(lay.trees.len(), 1);
        let t = &lay.trees[0];
        assert_eq!(t.collapse_short_edges(1e-12).num_vertices(), 5);
        assert!(check_tautness(t).passed());
        assert!(lay.gluing_mismatch() < 1e-12);
    }

    #[test]
    fn corpus_layouts_are_taut() {
        let cases: Vec<(Graph, LengthFunction)> = vec![
            (corpus::k4(), corpus::k4_short_star(0.6)),
            (corpus::k4(), LengthFunction::unit(&corpus::k4())),
            (corpus::k33(), LengthFunction::unit(&corpus::k33())),
            (corpus::dumbbell(), corpus::dumbbell_lengths(0.4)),
        ];
        for (g, l) in cases {
            let lay = layout(&g, &l);
            for t in &lay.trees {
                let rep = check_tautness_labeled(t, Some(&g));
                assert!(rep.passed(), "{rep}");
            }
            assert!(lay.gluing_mismatch() < 1e-9);
            assert!(lay.gluings.iter().all(|gl| gl.integrality_residual < 1e-9));
        }
    }
}
