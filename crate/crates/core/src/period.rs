//! Balanced 1-cocycles and the canonical cocycle built from the period matrix.
//!
//! With a spanning tree fixed, a balanced cocycle is determined by its values
//! `w₁ … w_r` on the chords, and every other value is a `{−1, 0, +1}`
//! combination of those. Integrating against a length function gives the
//! period matrix `G[j][i] = Σ_E ℓ(E) a_j(E) a_i(E)`; the canonical cocycle is
//! the one whose integrals over the basis cycles are the standard basis,
//! i.e. whose chord values are the columns of `G⁻¹`.

use crate::error::{Error, Result};
use crate::graph::{cycle_basis, Graph, HalfEdgeId, LengthFunction, OrientedCycle, SpanningTree, VertexId};
use crate::linalg::{self, Cholesky, Matrix};
use crate::report::{Check, Report};
use crate::{TOL_GEOMETRIC, TOL_STRUCTURAL};

/// Half-edge indexed vectors with `ω(ē) = −ω(e)` and zero sum into each vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedCocycle {
    dim: usize,
    values: Vec<Vec<f64>>,
    /// Chord half-edges of the tree whose coordinates these are.
    basis: Vec<HalfEdgeId>,
}

impl BalancedCocycle {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, h: HalfEdgeId) -> &[f64] {
        &self.values[h]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn basis(&self) -> &[HalfEdgeId] {
        &self.basis
    }

    /// Largest `‖Σ_{τe = v} ω(e)‖∞` over vertices.
    pub fn balance_residual(&self, g: &Graph) -> (f64, VertexId) {
        (0..g.num_vertices())
            .map(|v| {
                let mut sum = vec![0.0; self.dim];
                for h in g.in_half_edges(v) {
                    linalg::axpy(&mut sum, 1.0, &self.values[h]);
                }
                (linalg::max_abs(&sum), v)
            })
            .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
    }

    /// Largest `‖ω(e) + ω(ē)‖∞`.
    pub fn antisymmetry_residual(&self, g: &Graph) -> f64 {
        (0..g.num_half_edges())
            .map(|h| linalg::max_abs(&linalg::add(&self.values[h], &self.values[g.involution(h)])))
            .fold(0.0, f64::max)
    }

    /// Structural report: antisymmetry and per-vertex balance.
    pub fn check(&self, g: &Graph) -> Report {
        let mut r = Report::new();
        r.push(Check::at_most(
            "cocycle.antisymmetry",
            self.antisymmetry_residual(g),
            TOL_STRUCTURAL,
            None,
        ));
        let (res, v) = self.balance_residual(g);
        r.push(Check::at_most(
            "cocycle.balance",
            res,
            TOL_STRUCTURAL,
            Some(g.vertex_name(v).to_string()),
        ));
        r
    }

    /// CSV with columns `half_edge_id, coord_1 … coord_r`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("half_edge_id");
        for i in 1..=self.dim {
            out.push_str(&format!(",coord_{i}"));
        }
        out.push('\n');
        for (h, v) in self.values.iter().enumerate() {
            out.push_str(&h.to_string());
            for x in v {
                out.push_str(&format!(",{x:.17e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Coefficient `cᵢ(e)` of chord value `wᵢ` in `ω(e)`, per half-edge.
pub fn cycle_coefficients(g: &Graph, cycles: &[OrientedCycle]) -> Vec<Vec<i32>> {
    let mut c = vec![vec![0; cycles.len()]; g.num_half_edges()];
    for (i, gamma) in cycles.iter().enumerate() {
        for &h in gamma.half_edges() {
            c[h][i] += 1;
            c[g.involution(h)][i] -= 1;
        }
    }
    c
}

/// The unique balanced cocycle with `ω(eᵢ) = wᵢ` on the chords of `tree`.
pub fn extend_cocycle(g: &Graph, tree: &SpanningTree, w: &[Vec<f64>]) -> Result<BalancedCocycle> {
    let r = tree.rank();
    if w.len() != r {
        return Err(Error::VectorCount { expected: r, got: w.len() });
    }
    let dim = w.first().map_or(r, Vec::len);
    let coeffs = cycle_coefficients(g, &cycle_basis(g, tree));
    let values = coeffs
        .iter()
        .map(|c| {
            let mut v = vec![0.0; dim];
            for (ci, wi) in c.iter().zip(w) {
                if *ci != 0 {
                    linalg::axpy(&mut v, f64::from(*ci), wi);
                }
            }
            v
        })
        .collect();
    Ok(BalancedCocycle { dim, values, basis: tree.chords().to_vec() })
}

/// The weighted cycle Gram matrix realizing `λ_*` in cycle coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    matrix: Matrix,
}

impl PeriodMatrix {
    /// Assembles `G` from edge lengths without checking definiteness.
    pub fn assemble(g: &Graph, cycles: &[OrientedCycle], edge_lengths: &[f64]) -> Self {
        let incidences: Vec<Vec<i32>> = cycles.iter().map(|c| c.incidence(g)).collect();
        let r = cycles.len();
        let mut m = Matrix::zeros(r, r);
        for j in 0..r {
            for i in 0..r {
                m[(j, i)] = (0..g.num_edges())
                    .map(|e| edge_lengths[e] * f64::from(incidences[j][e] * incidences[i][e]))
                    .sum();
            }
        }
        PeriodMatrix { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::new(&self.matrix)
    }
}

pub fn period_matrix(g: &Graph, tree: &SpanningTree, lengths: &LengthFunction) -> Result<PeriodMatrix> {
    lengths.ensure_valid(g)?;
    let p = PeriodMatrix::assemble(g, &cycle_basis(g, tree), lengths.edge_lengths());
    p.cholesky()?;
    Ok(p)
}

/// `λ_*(ω)(γⱼ) = Σ_{e ∈ γⱼ} 2λ(e) ω(e)`, evaluated by walking each cycle.
pub fn lambda_star(cycles: &[OrientedCycle], lengths: &LengthFunction, omega: &BalancedCocycle) -> Vec<Vec<f64>> {
    cycles
        .iter()
        .map(|c| {
            let mut s = vec![0.0; omega.dim()];
            for &h in c.half_edges() {
                linalg::axpy(&mut s, 2.0 * lengths.half_edge(h), omega.value(h));
            }
            s
        })
        .collect()
}

/// `ω(Γ, λ) = λ_*⁻¹(inc)`: chord values are the columns of `G⁻¹`.
pub fn canonical_cocycle(g: &Graph, lengths: &LengthFunction, tree: &SpanningTree) -> Result<BalancedCocycle> {
    let period = period_matrix(g, tree, lengths)?;
    canonical_from_period(g, tree, &period)
}

pub(crate) fn canonical_from_period(g: &Graph, tree: &SpanningTree, period: &PeriodMatrix) -> Result<BalancedCocycle> {
    let inv = period.cholesky()?.inverse();
    let r = tree.rank();
    let w: Vec<Vec<f64>> = (0..r).map(|i| inv.column(i)).collect();
    extend_cocycle(g, tree, &w)
}

/// Result of [`check_nonsingular`].
#[derive(Debug, Clone, PartialEq)]
pub struct NonsingularReport {
    pub rank: usize,
    pub dim: usize,
    pub nonsingular: bool,
    /// Half-edges with `‖ω(e)‖ < 1e−9`.
    pub zero_half_edges: Vec<HalfEdgeId>,
}

pub fn check_nonsingular(omega: &BalancedCocycle) -> NonsingularReport {
    let rank = linalg::rank(omega.values(), TOL_GEOMETRIC);
    let zero_half_edges = (0..omega.values().len())
        .filter(|&h| linalg::norm(omega.value(h)) < TOL_GEOMETRIC)
        .collect();
    NonsingularReport { rank, dim: omega.dim(), nonsingular: rank == omega.dim(), zero_half_edges }
}

/// The scalar product making the chord values orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodMetric {
    /// Gram matrix of the scalar product in cycle coordinates.
    pub s: Matrix,
    /// Change of coordinates sending `ω(eᵢ)` to the `i`-th standard basis vector.
    pub u: Matrix,
}

impl GoodMetric {
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        linalg::dot(a, &self.s.mul_vec(b))
    }

    /// Good (orthonormal) coordinates of a cycle-coordinate vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.u.mul_vec(v)
    }
}

/// Computes `U = [ω(e₁) … ω(e_r)]⁻¹` and `S = UᵀU`.
pub fn good_metric(
    tree: &SpanningTree,
    lengths: &LengthFunction,
    omega: &BalancedCocycle,
) -> Result<GoodMetric> {
    if let Err(e) = tree.contains_all_short_edges(lengths) {
        return Err(Error::TreeMissesShortEdge(e));
    }
    let ns = check_nonsingular(omega);
    if !ns.nonsingular {
        return Err(Error::SingularCocycle { rank: ns.rank, dim: ns.dim });
    }
    let r = tree.rank();
    let cols: Vec<Vec<f64>> = tree.chords().iter().map(|&h| omega.value(h).to_vec()).collect();
    let m = Matrix::from_columns(&cols, r);
    let u = m.inverse()?;
    let s = u.transpose().mul(&u);
    Ok(GoodMetric { s, u })
}

/// Orthonormality of the chord values and the sibling sign condition
/// `⟨ω(e), ω(e′)⟩_S ≤ 0` for distinct half-edges with a common source.
pub fn good_metric_report(g: &Graph, tree: &SpanningTree, omega: &BalancedCocycle, metric: &GoodMetric) -> Report {
    let mut r = Report::new();
    let chords = tree.chords();
    let mut ortho = 0.0f64;
    for (i, &a) in chords.iter().enumerate() {
        for (j, &b) in chords.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((metric.inner(omega.value(a), omega.value(b)) - target).abs());
        }
    }
    r.push(Check::at_most("good_metric.orthonormal", ortho, 1e-10, None));

    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for v in 0..g.num_vertices() {
        let out: Vec<HalfEdgeId> = g.out_half_edges(v).collect();
        for (i, &a) in out.iter().enumerate() {
            for &b in &out[i + 1..] {
                let d = metric.inner(omega.value(a), omega.value(b));
                if d > worst {
                    worst = d;
                    at = Some(format!("{}|{}", g.half_edge_label(a), g.half_edge_label(b)));
                }
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    r.push(Check::at_most("good_metric.sibling_sign", worst, TOL_STRUCTURAL, at));
    r
}

/// Everything derived from `(Γ, λ)` with a fixed tree.
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub tree: SpanningTree,
    pub cycles: Vec<OrientedCycle>,
    pub period: PeriodMatrix,
    pub omega: BalancedCocycle,
}

impl PeriodData {
    /// Uses the default tree: all short edges, highest-id long edges first.
    pub fn compute(g: &Graph, lengths: &LengthFunction, root: VertexId) -> Result<Self> {
        let tree = SpanningTree::new(g, lengths, root)?;
        Self::with_tree(g, lengths, tree)
    }

    pub fn with_tree(g: &Graph, lengths: &LengthFunction, tree: SpanningTree) -> Result<Self> {
        let period = period_matrix(g, &tree, lengths)?;
        let omega = canonical_from_period(g, &tree, &period)?;
        let cycles = cycle_basis(g, &tree);
        Ok(PeriodData { tree, cycles, period, omega })
    }

    pub fn rank(&self) -> usize {
        self.tree.rank()
    }

    pub fn good_metric(&self, lengths: &LengthFunction) -> Result<GoodMetric> {
        good_metric(&self.tree, lengths, &self.omega)
    }

    /// Largest deviation of `λ_*(ω)` from the identity on the cycle basis.
    pub fn lambda_star_residual(&self, lengths: &LengthFunction) -> f64 {
        let ls = lambda_star(&self.cycles, lengths, &self.omega);
        let id = Matrix::identity(self.rank());
        ls.iter()
            .enumerate()
            .flat_map(|(j, v)| {
                let id = &id;
                v.iter().enumerate().map(move |(i, x)| (x - id[(j, i)]).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Derivative of the chord values along a length perturbation:
    /// `d(G⁻¹) = −G⁻¹ (dG) G⁻¹`.
    pub fn chord_derivative(&self, g: &Graph, d_lengths: &[f64]) -> Result<Matrix> {
        let inv = self.period.cholesky()?.inverse();
        let dg = PeriodMatrix::assemble(g, &self.cycles, d_lengths);
        Ok(inv.mul(dg.matrix()).mul(&inv).scaled(-1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use approx::assert_abs_diff_eq;

    fn theta_data() -> (Graph, LengthFunction, PeriodData) {
        let g = corpus::theta();
        let l = LengthFunction::unit(&g);
        let d = PeriodData::compute(&g, &l, 0).unwrap();
        (g, l, d)
    }

    #[test]
    fn extend_theta_unit_vectors() {
        let g = corpus::theta();
        let t = SpanningTree::new(&g, &LengthFunction::unit(&g), 0).unwrap();
        let w = extend_cocycle(&g, &t, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(w.value(4), &[-1.0, -1.0]);
        assert_eq!(w.value(5), &[1.0, 1.0]);
        assert!(w.check(&g).passed());
    }

    #[test]
    fn extend_rose_and_zero() {
        let g = corpus::rose(2);
        let t = SpanningTree::new(&g, &LengthFunction::unit(&g), 0).unwrap();
        let w = extend_cocycle(&g, &t, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(w.value(0), &[1.0, 0.0]);
        assert_eq!(w.value(2), &[0.0, 1.0]);
        assert_eq!(w.balance_residual(&g).0, 0.0);
        let z = extend_cocycle(&g, &t, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(z.values().iter().all(|v| v.iter().all(|&x| x == 0.0)));
        assert!(matches!(
            extend_cocycle(&g, &t, &[vec![1.0, 0.0]]),
            Err(Error::VectorCount { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn theta_period_matrices() {
        let (g, _, d) = theta_data();
        assert_eq!(d.period.matrix(), &Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]));
        let t = d.tree.clone();
        let p = period_matrix(&g, &t, &LengthFunction::from_edge_lengths(vec![1.0, 1.0, 0.0])).unwrap();
        assert_eq!(p.matrix(), &Matrix::identity(2));
        let rose = corpus::rose(2);
        let lr = LengthFunction::unit(&rose);
        let tr = SpanningTree::new(&rose, &lr, 0).unwrap();
        assert_eq!(period_matrix(&rose, &tr, &lr).unwrap().matrix(), &Matrix::identity(2));
    }

    #[test]
    fn theta_canonical_values() {
        let (g, l, d) = theta_data();
        let w = &d.omega;
        for (got, want) in [
            (w.value(0), [2.0 / 3.0, -1.0 / 3.0]),
            (w.value(2), [-1.0 / 3.0, 2.0 / 3.0]),
            (w.value(4), [-1.0 / 3.0, -1.0 / 3.0]),
        ] {
            assert_abs_diff_eq!(got[0], want[0], epsilon = 1e-15);
            assert_abs_diff_eq!(got[1], want[1], epsilon = 1e-15);
        }
        assert!(d.lambda_star_residual(&l) < 1e-12);
        assert!(w.check(&g).passed());
    }

    #[test]
    fn dumbbell_bridge_value_vanishes() {
        let g = corpus::dumbbell();
        let l = corpus::dumbbell_lengths(0.4);
        let d = PeriodData::compute(&g, &l, 0).unwrap();
        let bridge = Graph::forward(g.edge_id("bridge").unwrap());
        assert_eq!(d.omega.value(bridge), &[0.0, 0.0]);
        let ns = check_nonsingular(&d.omega);
        assert!(ns.nonsingular);
        assert_eq!(ns.zero_half_edges, vec![bridge, bridge + 1]);
    }

    #[test]
    fn nonsingularity() {
        let (_, _, d) = theta_data();
        let ns = check_nonsingular(&d.omega);
        assert!(ns.nonsingular && ns.zero_half_edges.is_empty());
        let g = corpus::theta();
        let z = extend_cocycle(&g, &d.tree, &[vec![0.0; 2], vec![0.0; 2]]).unwrap();
        assert!(!check_nonsingular(&z).nonsingular);
    }

    #[test]
    fn theta_good_metric() {
        let (g, l, d) = theta_data();
        let m = d.good_metric(&l).unwrap();
        let s = Matrix::from_rows(&[vec![5.0, 4.0], vec![4.0, 5.0]]);
        let u = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(m.s.max_abs_diff(&s) < 1e-12);
        assert!(m.u.max_abs_diff(&u) < 1e-12);
        // a and c both leave u
        assert_abs_diff_eq!(m.inner(d.omega.value(0), d.omega.value(4)), -1.0, epsilon = 1e-12);
        assert!(good_metric_report(&g, &d.tree, &d.omega, &m).passed());
    }

    #[test]
    fn rose_good_metric_is_identity() {
        let g = corpus::rose(2);
        let l = LengthFunction::unit(&g);
        let d = PeriodData::compute(&g, &l, 0).unwrap();
        let m = d.good_metric(&l).unwrap();
        assert!(m.s.max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert!(good_metric_report(&g, &d.tree, &d.omega, &m).passed());
    }

    #[test]
    fn good_metric_preconditions() {
        let g = corpus::theta();
        let l = LengthFunction::from_edge_lengths(vec![1.0, 1.0, 0.5]);
        // a tree through `a` leaves the short edge `c` out
        let avoid = vec![false, true, true];
        let t = SpanningTree::avoiding(&g, &avoid, 0).unwrap();
        let d = PeriodData::with_tree(&g, &l, t).unwrap();
        assert!(matches!(d.good_metric(&l), Err(Error::TreeMissesShortEdge(2))));
    }

    #[test]
    fn csv_export_shape() {
        let (_, _, d) = theta_data();
        let csv = d.omega.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "half_edge_id,coord_1,coord_2");
        assert_eq!(lines.len(), 7);
        let fields: Vec<f64> = lines[5].split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert_eq!(fields, d.omega.value(4));
    }
}
