//! The Abel-Jacobi immersion of a metric graph into `H₁(Γ; ℝ/ℤ)`.
//!
//! The universal abelian cover is never built. A vertex potential
//! `f: Γ₀ → ℝ^r` along the spanning tree plus the integer lattice of cycle
//! classes describes the lifted map completely: the segment of half-edge `e`
//! starts at `f(σe)` with displacement `2λ(e)·ω(e)`, and the closure defect
//! `f(σe) + 2λ(e)ω(e) − f(τe)` is the lattice vector of the cycle through `e`.

mod cut;
mod embed;
mod export;

pub use cut::{cut_edges, cut_long_edges, CutForest, CutTree, Gluing};
pub use embed::{
    check_tautness, check_tautness_labeled, embed_trees, path_pair_report, EmbeddedTree, LayoutGluing,
    TorusLayout, TreeVertex, EXTERNAL_EDGE_MIN, SCALE,
};
pub use export::{immersion_svg, potentials_csv, tree_positions_csv};

use crate::error::Result;
use crate::graph::{EdgeId, Graph, HalfEdgeId, LengthFunction, SpanningTree, VertexId};
use crate::linalg::{self, Matrix};
use crate::period::{BalancedCocycle, GoodMetric, PeriodData};
use crate::report::{Check, Report};
use crate::{TOL_GEOMETRIC, TOL_STRUCTURAL};

/// `f(v₀) = 0` and `f(τe) = f(σe) + 2λ(e)ω(e)` along tree edges.
pub fn vertex_potentials(
    g: &Graph,
    tree: &SpanningTree,
    lengths: &LengthFunction,
    omega: &BalancedCocycle,
) -> Vec<Vec<f64>> {
    let mut f = vec![vec![0.0; omega.dim()]; g.num_vertices()];
    for &v in tree.order() {
        if let Some(h) = tree.parent(v) {
            let mut p = f[g.source(h)].clone();
            linalg::axpy(&mut p, 2.0 * lengths.half_edge(h), omega.value(h));
            f[v] = p;
        }
    }
    f
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: Vec<f64>,
    pub displacement: Vec<f64>,
}

/// The lifted immersion in cycle coordinates, with the good-coordinate transform.
#[derive(Debug, Clone)]
pub struct ImmersedGraph {
    pub base: VertexId,
    pub data: PeriodData,
    pub lengths: LengthFunction,
    pub potentials: Vec<Vec<f64>>,
    /// One segment per edge, along its forward half-edge.
    pub segments: Vec<Segment>,
    pub metric: GoodMetric,
    pub separating_edges: Vec<EdgeId>,
}

impl ImmersedGraph {
    pub fn rank(&self) -> usize {
        self.data.rank()
    }

    pub fn omega(&self) -> &BalancedCocycle {
        &self.data.omega
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.data.tree
    }

    /// `2λ(e)·ω(e)` for a half-edge.
    pub fn displacement(&self, h: HalfEdgeId) -> Vec<f64> {
        linalg::scale(self.omega().value(h), 2.0 * self.lengths.half_edge(h))
    }

    /// `f(σe) + 2λ(e)ω(e) − f(τe)` in cycle coordinates.
    pub fn closure_defect(&self, g: &Graph, h: HalfEdgeId) -> Vec<f64> {
        let end = linalg::add(&self.potentials[g.source(h)], &self.displacement(h));
        linalg::sub(&end, &self.potentials[g.target(h)])
    }

    /// Lattice generators (images of `γ₁ … γ_r`) in good coordinates, as columns.
    pub fn lattice_good(&self) -> Matrix {
        self.metric.u.clone()
    }

    pub fn potential_good(&self, v: VertexId) -> Vec<f64> {
        self.metric.apply(&self.potentials[v])
    }

    pub fn displacement_good(&self, h: HalfEdgeId) -> Vec<f64> {
        self.metric.apply(&self.displacement(h))
    }

    /// A point of the torus in cycle coordinates, reduced to `[0, 1)^r`.
    pub fn reduce(point: &[f64]) -> Vec<f64> {
        point.iter().map(|x| x - x.floor()).collect()
    }
}

/// The Abel-Jacobi immersion with base vertex `base` and the default tree.
pub fn torus_immersion(g: &Graph, lengths: &LengthFunction, base: VertexId) -> Result<ImmersedGraph> {
    let data = PeriodData::compute(g, lengths, base)?;
    immersion_from(g, lengths, data)
}

/// Builds the immersion from an already computed canonical cocycle.
pub fn immersion_from(g: &Graph, lengths: &LengthFunction, data: PeriodData) -> Result<ImmersedGraph> {
    let metric = data.good_metric(lengths)?;
    let potentials = vertex_potentials(g, &data.tree, lengths, &data.omega);
    let segments = (0..g.num_edges())
        .map(|e| {
            let h = Graph::forward(e);
            Segment {
                start: potentials[g.source(h)].clone(),
                displacement: linalg::scale(data.omega.value(h), lengths.edge(e)),
            }
        })
        .collect();
    Ok(ImmersedGraph {
        base: data.tree.root(),
        data,
        lengths: lengths.clone(),
        potentials,
        segments,
        metric,
        separating_edges: g.separating_edges(),
    })
}

/// Closure defects are the cycle classes: `eᵢ` for chord `i`, zero on tree edges.
pub fn lattice_defect_report(g: &Graph, im: &ImmersedGraph) -> Report {
    let mut worst = 0.0f64;
    let mut at = None;
    let chords = im.tree().chords();
    for e in 0..g.num_edges() {
        let h = Graph::forward(e);
        let mut expect = vec![0.0; im.rank()];
        if let Some(i) = chords.iter().position(|&c| c == h) {
            expect[i] = 1.0;
        }
        let err = linalg::max_abs(&linalg::sub(&im.closure_defect(g, h), &expect));
        if err > worst {
            worst = err;
            at = Some(g.edge_name(e).to_string());
        }
    }
    let mut r = Report::new();
    r.push(Check::at_most("immersion.lattice_defect", worst, TOL_GEOMETRIC, at));
    r
}

/// Result of [`check_local_embedding`].
#[derive(Debug, Clone)]
pub struct LocalEmbeddingReport {
    pub report: Report,
    /// Edges of positive length whose image is a point (they separate the graph).
    pub separating_zero: Vec<EdgeId>,
    /// Edges of length zero (collapsed to a point, allowed).
    pub collapsed: Vec<EdgeId>,
}

/// Nonzero displacement on every edge of positive length, and nonpositive
/// good-metric products between sibling displacements.
pub fn check_local_embedding(g: &Graph, im: &ImmersedGraph) -> LocalEmbeddingReport {
    let mut report = Report::new();
    let mut separating_zero = Vec::new();
    let mut collapsed = Vec::new();
    let mut min_norm = f64::INFINITY;
    let mut at = None;
    for e in 0..g.num_edges() {
        let norm = linalg::norm(&im.displacement(Graph::forward(e)));
        if im.lengths.edge(e) == 0.0 {
            collapsed.push(e);
            continue;
        }
        if im.separating_edges.contains(&e) {
            if norm <= TOL_GEOMETRIC {
                separating_zero.push(e);
            }
            continue;
        }
        if norm < min_norm {
            min_norm = norm;
            at = Some(g.edge_name(e).to_string());
        }
    }
    if min_norm.is_infinite() {
        report.push(Check::boolean("immersion.nonzero_displacement", true, None));
    } else {
        report.push(Check::above("immersion.nonzero_displacement", min_norm, TOL_GEOMETRIC, at));
    }
    report.push(Check::boolean(
        "immersion.bridgeless",
        im.separating_edges.is_empty(),
        separating_zero.first().map(|&e| g.edge_name(e).to_string()),
    ));

    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for v in 0..g.num_vertices() {
        let out: Vec<HalfEdgeId> = g.out_half_edges(v).filter(|&h| im.lengths.half_edge(h) > 0.0).collect();
        for (i, &a) in out.iter().enumerate() {
            for &b in &out[i + 1..] {
                let d = linalg::dot(&im.displacement_good(a), &im.displacement_good(b));
                if d > worst {
                    worst = d;
                    at = Some(format!("{}|{}", g.half_edge_label(a), g.half_edge_label(b)));
                }
            }
        }
    }
    report.push(Check::at_most(
        "immersion.sibling_sign",
        if worst.is_finite() { worst } else { 0.0 },
        TOL_STRUCTURAL,
        at,
    ));
    LocalEmbeddingReport { report, separating_zero, collapsed }
}
