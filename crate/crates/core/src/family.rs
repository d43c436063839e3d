//! Simplices of length functions along chains of collapses.
//!
//! A chain `Γ₀ → Γ₁ → … → Γ_k` is stored on `Γ₀` as the sets of edges
//! collapsed at each step. With `λᵢ(E) = 1` when `E` survives to `Γᵢ`, the
//! point `t` of the simplex carries `ℓ(E) = Σ tᵢ λᵢ(E)`.

use crate::abel_jacobi::{cut_edges, embed_trees, immersion_from, TorusLayout, SCALE};
use crate::error::{Error, Result};
use crate::graph::{collapse, EdgeId, Graph, GraphDoc, HalfEdgeImage, LengthFunction, Morphism, SpanningTree};
use crate::linalg::{self, Matrix};
use crate::period::PeriodData;
use crate::report::{Check, Report};
use crate::thickening::{sublevel_region, GridConfig};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Slack allowed on the simplex constraints.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexFamily {
    graph: Graph,
    /// Edges of `Γ₀` collapsed in step `i → i + 1`.
    steps: Vec<Vec<EdgeId>>,
    /// `Γᵢ` with the composite morphism `Γ₀ → Γᵢ`, for `i = 0 … k`.
    stages: Vec<(Graph, Morphism)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    chain: Vec<serde_json::Value>,
}

impl SimplexFamily {
    pub fn new(graph: Graph, steps: Vec<Vec<EdgeId>>) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut stages = vec![(graph.clone(), Morphism::identity(&graph))];
        let mut cumulative: Vec<EdgeId> = Vec::new();
        for (i, step) in steps.iter().enumerate() {
            for &e in step {
                if e >= graph.num_edges() {
                    return Err(Error::InvalidFamily(format!("step {} names a missing edge", i + 1)));
                }
                if cumulative.contains(&e) {
                    return Err(Error::InvalidFamily(format!(
                        "edge {} is collapsed twice",
                        graph.edge_name(e)
                    )));
                }
                cumulative.push(e);
            }
            stages.push(collapse(&graph, &cumulative)?);
        }
        Ok(SimplexFamily { graph, steps, stages })
    }

    /// `{"chain": [graph₀, [edge ids…], …]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut it = doc.chain.into_iter();
        let first = it.next().ok_or_else(|| Error::InvalidFamily("empty chain".into()))?;
        let gdoc: GraphDoc = serde_json::from_value(first).map_err(|e| Error::Parse(e.to_string()))?;
        let graph = gdoc.graph()?;
        let mut steps = Vec::new();
        for v in it {
            let names: Vec<String> = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
            let ids = names
                .iter()
                .map(|n| graph.edge_id(n).ok_or_else(|| Error::InvalidFamily(format!("unknown edge `{n}`"))))
                .collect::<Result<Vec<_>>>()?;
            steps.push(ids);
        }
        Self::new(graph, steps)
    }

    pub fn to_json(&self) -> String {
        let mut chain = vec![serde_json::to_value(GraphDoc::from_graph(&self.graph, None)).unwrap()];
        for s in &self.steps {
            let names: Vec<&str> = s.iter().map(|&e| self.graph.edge_name(e)).collect();
            chain.push(serde_json::to_value(names).unwrap());
        }
        serde_json::to_string_pretty(&FamilyDoc { chain }).unwrap()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Simplex dimension `k`.
    pub fn dim(&self) -> usize {
        self.steps.len()
    }

    pub fn stage(&self, i: usize) -> &(Graph, Morphism) {
        &self.stages[i]
    }

    /// `λᵢ(E)`.
    pub fn survives(&self, i: usize, e: EdgeId) -> bool {
        self.stages[i].1.edge(e).is_some()
    }

    pub fn indicators(&self, i: usize) -> Vec<f64> {
        (0..self.graph.num_edges()).map(|e| if self.survives(i, e) { 1.0 } else { 0.0 }).collect()
    }

    /// Edges that survive every stage; they have length one everywhere.
    pub fn uniform_cut(&self) -> Vec<bool> {
        (0..self.graph.num_edges()).map(|e| (0..=self.dim()).all(|i| self.survives(i, e))).collect()
    }

    pub fn check_simplex(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.dim() + 1 {
            return Err(Error::OutsideSimplex(format!("expected {} coordinates, got {}", self.dim() + 1, t.len())));
        }
        if t.iter().any(|&x| x < -SIMPLEX_TOL || x.is_nan()) {
            return Err(Error::OutsideSimplex(format!("negative coordinate in {t:?}")));
        }
        let s: f64 = t.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::OutsideSimplex(format!("coordinates sum to {s}")));
        }
        Ok(())
    }

    /// Edge-length derivative along the direction `dt` in the simplex.
    pub fn length_direction(&self, dt: &[f64]) -> Vec<f64> {
        (0..self.graph.num_edges())
            .map(|e| (0..=self.dim()).filter(|&i| self.survives(i, e)).map(|i| dt[i]).sum())
            .collect()
    }

    /// Canonical cocycle at `t` with the tree through all non-cut edges.
    pub fn period_data(&self, t: &[f64]) -> Result<(LengthFunction, PeriodData)> {
        let lengths = interpolate_length(self, t)?;
        let tree = SpanningTree::avoiding(&self.graph, &self.uniform_cut(), 0)?;
        let data = PeriodData::with_tree(&self.graph, &lengths, tree)?;
        Ok((lengths, data))
    }

    /// Cut trees at `t` along the uniform cut, embedded in scaled good coordinates.
    pub fn layout(&self, t: &[f64]) -> Result<TorusLayout> {
        let (lengths, data) = self.period_data(t)?;
        let im = immersion_from(&self.graph, &lengths, data)?;
        let forest = cut_edges(&self.graph, &self.uniform_cut())?;
        embed_trees(&self.graph, &forest, &im, SCALE)
    }
}

/// `ℓ(E) = Σ tᵢ λᵢ(E)` on `Γ₀`, validated.
pub fn interpolate_length(fam: &SimplexFamily, t: &[f64]) -> Result<LengthFunction> {
    fam.check_simplex(t)?;
    let lengths: Vec<f64> = fam.length_direction(t).into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
    LengthFunction::validated(&fam.graph, lengths)
}

/// Point of the segment from `a` to `b` at parameter `s`.
pub fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect()
}

/// One interior sample of a path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub s: f64,
    pub t: Vec<f64>,
    /// Error of the central difference with step `h` and `h/2`.
    pub error_h: f64,
    pub error_half: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct PathReport {
    pub samples: Vec<PathSample>,
    /// Largest jump of the potentials between consecutive path points.
    pub potential_jump: f64,
    pub report: Report,
}

impl PathReport {
    /// One row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,error_h,error_half,ratio\n");
        for p in &self.samples {
            let t: Vec<String> = p.t.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{},{},{},{},{}", p.s, t.join(" "), p.error_h, p.error_half, p.ratio).unwrap();
        }
        out
    }
}

fn chord_matrix(fam: &SimplexFamily, t: &[f64]) -> Result<(Matrix, PeriodData)> {
    let (_, data) = fam.period_data(t)?;
    let cols: Vec<Vec<f64>> = data.tree.chords().iter().map(|&h| data.omega.value(h).to_vec()).collect();
    Ok((Matrix::from_columns(&cols, data.rank()), data))
}

/// Compares central differences of the chord values along `a → b` with the
/// exact derivative `−G⁻¹ (dG) G⁻¹` at `interior` evenly spaced parameters.
/// The error ratio under halving the step must be `4 ± 20%`.
pub fn family_cocycle_path(fam: &SimplexFamily, a: &[f64], b: &[f64], interior: usize, h: f64) -> Result<PathReport> {
    fam.check_simplex(a)?;
    fam.check_simplex(b)?;
    let dt: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let dl = fam.length_direction(&dt);
    let mut samples = Vec::new();
    let mut worst_ratio_dev = 0.0f64;
    let mut at = None;
    for k in 1..=interior {
        let s = k as f64 / (interior + 1) as f64;
        let (_, data) = chord_matrix(fam, &lerp(a, b, s))?;
        let exact = data.chord_derivative(&fam.graph, &dl)?;
        let fd = |step: f64| -> Result<f64> {
            let (p, _) = chord_matrix(fam, &lerp(a, b, s + step))?;
            let (m, _) = chord_matrix(fam, &lerp(a, b, s - step))?;
            let mut worst = 0.0f64;
            for i in 0..p.rows() {
                for j in 0..p.cols() {
                    let d = (p[(i, j)] - m[(i, j)]) / (2.0 * step);
                    worst = worst.max((d - exact[(i, j)]).abs());
                }
            }
            Ok(worst)
        };
        let e1 = fd(h)?;
        let e2 = fd(h / 2.0)?;
        let ratio = e1 / e2;
        let dev = if ratio.is_finite() { (ratio / 4.0 - 1.0).abs() } else { f64::INFINITY };
        if dev > worst_ratio_dev {
            worst_ratio_dev = dev;
            at = Some(format!("s={s}"));
        }
        samples.push(PathSample { s, t: lerp(a, b, s), error_h: e1, error_half: e2, ratio });
    }

    // continuity of the potentials along the path (fixed basis)
    let steps = 50;
    let mut prev: Option<Vec<Vec<f64>>> = None;
    let mut jump = 0.0f64;
    for k in 0..=steps {
        let t = lerp(a, b, k as f64 / steps as f64);
        let (lengths, data) = fam.period_data(&t)?;
        let f = crate::abel_jacobi::vertex_potentials(&fam.graph, &data.tree, &lengths, &data.omega);
        if let Some(p) = &prev {
            for (x, y) in p.iter().zip(&f) {
                jump = jump.max(linalg::dist(x, y));
            }
        }
        prev = Some(f);
    }

    let mut report = Report::new();
    report.push(Check::at_most("family.fd_order_two", worst_ratio_dev, 0.2, at));
    report.push(Check::at_most("family.potentials_continuous", jump, 0.1, None));
    Ok(PathReport { samples, potential_jump: jump, report })
}

/// On the face `t_face = 0` (at its barycentre), the canonical cocycle of
/// `Γ₀` agrees on surviving half-edges with that of the graph obtained by
/// collapsing the edges of length zero; collapsed edges have zero
/// displacement.
pub fn face_compatibility_check(fam: &SimplexFamily, face: usize) -> Result<Report> {
    let mut report = Report::new();
    let k = fam.dim();
    if k == 0 {
        report.push(Check::boolean("family.face_restriction", true, Some("no proper faces".into())));
        return Ok(report);
    }
    if face > k {
        return Err(Error::InvalidFamily(format!("face {face} of a {k}-simplex")));
    }
    let t: Vec<f64> = (0..=k).map(|i| if i == face { 0.0 } else { 1.0 / k as f64 }).collect();
    let (lengths, data) = fam.period_data(&t)?;
    let g = &fam.graph;
    let zero: Vec<EdgeId> = (0..g.num_edges()).filter(|&e| lengths.edge(e) == 0.0).collect();
    let (quotient, phi) = collapse(g, &zero)?;
    let avoid: Vec<bool> = (0..quotient.num_edges())
        .map(|f| !(0..g.num_edges()).any(|e| data.tree.contains(e) && phi.edge(e) == Some(f)))
        .collect();
    let qtree = SpanningTree::avoiding(&quotient, &avoid, phi.vertex(data.tree.root()))?;
    let qlengths: Vec<f64> = (0..quotient.num_edges())
        .map(|f| lengths.edge((0..g.num_edges()).find(|&e| phi.edge(e) == Some(f)).expect("surjective")))
        .collect();
    let qlengths = LengthFunction::validated(&quotient, qlengths)?;
    let qdata = PeriodData::with_tree(&quotient, &qlengths, qtree)?;

    let mut worst = 0.0f64;
    let mut at = None;
    for h in 0..g.num_half_edges() {
        if let HalfEdgeImage::HalfEdge(q) = phi.half_edge(h) {
            let d = linalg::max_abs(&linalg::sub(data.omega.value(h), qdata.omega.value(q)));
            if d > worst {
                worst = d;
                at = Some(g.half_edge_label(h));
            }
        }
    }
    report.push(Check::at_most("family.face_restriction", worst, 1e-9, at));

    let mut disp = 0.0f64;
    let mut min_omega = f64::INFINITY;
    for &e in &zero {
        let h = Graph::forward(e);
        disp = disp.max(linalg::norm(&linalg::scale(data.omega.value(h), lengths.edge(e))));
        if !g.separating_edges().contains(&e) {
            min_omega = min_omega.min(linalg::norm(data.omega.value(h)));
        }
    }
    report.push(Check::at_most("family.collapsed_displacement", disp, 0.0, None));
    if min_omega.is_finite() {
        report.push(Check::above("family.collapsed_cocycle_nonzero", min_omega, crate::TOL_GEOMETRIC, None));
    }
    Ok(report)
}

/// Euler characteristic of `W` at `samples` evenly spaced points of `a → b`.
pub fn euler_along_path(fam: &SimplexFamily, a: &[f64], b: &[f64], samples: usize, grid: GridConfig) -> Result<Vec<(f64, i64)>> {
    (0..samples)
        .map(|k| {
            let s = if samples == 1 { 0.0 } else { k as f64 / (samples - 1) as f64 };
            let region = sublevel_region(&fam.layout(&lerp(a, b, s))?, grid)?;
            Ok((s, region.euler_characteristic))
        })
        .collect()
}

/// The theta graph collapsing onto the rose with two petals.
pub fn theta_to_rose() -> SimplexFamily {
    let g = crate::corpus::theta();
    let c = g.edge_id("c").expect("theta has edge c");
    SimplexFamily::new(g, vec![vec![c]]).expect("valid chain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interpolation() {
        let fam = theta_to_rose();
        assert_eq!(interpolate_length(&fam, &[1.0, 0.0]).unwrap().edge_lengths(), &[1.0, 1.0, 1.0]);
        assert_eq!(interpolate_length(&fam, &[0.5, 0.5]).unwrap().edge_lengths(), &[1.0, 1.0, 0.5]);
        assert!(matches!(interpolate_length(&fam, &[0.7, 0.7]), Err(Error::OutsideSimplex(_))));
        assert!(interpolate_length(&fam, &[1.2, -0.2]).is_err());
        assert_eq!(fam.uniform_cut(), vec![true, true, false]);
    }

    #[test]
    fn period_matrix_along_segment() {
        let fam = theta_to_rose();
        for x in [0.0, 0.3, 1.0] {
            let (_, d) = fam.period_data(&[x, 1.0 - x]).unwrap();
            let want = Matrix::from_rows(&[vec![1.0 + x, x], vec![x, 1.0 + x]]);
            assert!(d.period.matrix().max_abs_diff(&want) < 1e-15);
        }
        let (_, d) = fam.period_data(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(d.omega.value(4)[0], -1.0 / 3.0, epsilon = 1e-15);
        let (_, d) = fam.period_data(&[0.0, 1.0]).unwrap();
        assert_eq!(d.omega.value(0), &[1.0, 0.0]);
        assert_eq!(d.omega.value(2), &[0.0, 1.0]);
    }

    #[test]
    fn second_order_convergence() {
        let fam = theta_to_rose();
        let rep = family_cocycle_path(&fam, &[1.0, 0.0], &[0.0, 1.0], 3, 0.02).unwrap();
        assert!(rep.report.passed(), "{}", rep.report);
        assert!(rep.to_csv().starts_with("s,t,"));
    }

    #[test]
    fn face_restriction() {
        let fam = theta_to_rose();
        let rep = face_compatibility_check(&fam, 0).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(rep.get("family.collapsed_cocycle_nonzero").is_some());
        let id = SimplexFamily::new(corpus::theta(), vec![]).unwrap();
        assert!(face_compatibility_check(&id, 0).unwrap().passed());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let fam = theta_to_rose();
        let back = SimplexFamily::from_json(&fam.to_json()).unwrap();
        assert_eq!(back, fam);
        let text = r#"{"chain":[{"vertices":["u","v"],"edges":[{"id":"a","source":"u","target":"v"},{"id":"b","source":"u","target":"v"}]},["a","b"]]}"#;
        assert!(matches!(SimplexFamily::from_json(text), Err(Error::CollapseCycle(_))));
        let text = r#"{"chain":[{"vertices":["u"],"edges":[]},["x"]]}"#;
        assert!(matches!(SimplexFamily::from_json(text), Err(Error::InvalidFamily(_))));
    }

    #[test]
    fn euler_characteristic_is_constant() {
        let fam = theta_to_rose();
        let xs = euler_along_path(&fam, &[1.0, 0.0], &[0.0, 1.0], 3, GridConfig::default()).unwrap();
        assert!(xs.iter().all(|&(_, x)| x == -1), "{xs:?}");
    }
}
