//! The thickening field `Φ_T` of a linearly embedded tree.
//!
//! `Φ_T(x) = Π_E ψ(d(x, E)) / Π_v ψ(‖x − v‖)^{val(v) − 1}`.
//!
//! The main evaluator uses the edge form: anchored at the nearest edge `E₀`
//! of positive length, every other edge `E` contributes
//! `ψ(d(x, E)) / ψ(‖x − v_E‖)` where `v_E` is the endpoint of `E` on the
//! side of `E₀`. Each vertex then appears `val − 1` times, so both forms
//! agree. Products are accumulated as sums of logarithms.

use super::psi::psi_all;
use crate::abel_jacobi::{EmbeddedTree, TreeVertex};
use crate::error::{Error, Result};
use crate::linalg;

/// Below this distance a point counts as lying on the tree.
pub const ON_TREE: f64 = 1e-12;
const ZERO_EDGE: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Seg {
    a: Vec<f64>,
    d: Vec<f64>,
    len2: f64,
    ends: (usize, usize),
}

/// Closest point of a segment and which end, if any, the projection hits.
#[derive(Debug, Clone)]
struct Projection {
    dist: f64,
    foot: Vec<f64>,
    /// `Some(vertex)` when the foot is an endpoint.
    clamped: Option<usize>,
}

/// Immutable evaluator of `Φ_T` and `∇Φ_T`.
#[derive(Debug, Clone)]
pub struct ThickeningField {
    tree: EmbeddedTree,
    segs: Vec<Seg>,
    /// Edges of positive length.
    active: Vec<usize>,
    exponents: Vec<i32>,
    /// `near[anchor][edge]`: endpoint of `edge` on the side of `anchor`.
    near: Vec<Vec<usize>>,
}

impl ThickeningField {
    pub fn new(tree: &EmbeddedTree) -> Self {
        let segs: Vec<Seg> = tree
            .edges
            .iter()
            .map(|&(a, b)| {
                let d = linalg::sub(&tree.positions[b], &tree.positions[a]);
                Seg { a: tree.positions[a].clone(), len2: linalg::dot(&d, &d), d, ends: (a, b) }
            })
            .collect();
        let active = (0..segs.len()).filter(|&k| segs[k].len2.sqrt() >= ZERO_EDGE).collect();
        let exponents = tree.valences().iter().map(|&v| v as i32 - 1).collect();
        let hops = tree.hop_distances();
        let near = (0..segs.len())
            .map(|k| {
                let (p, q) = segs[k].ends;
                (0..segs.len())
                    .map(|e| {
                        let (c, d) = segs[e].ends;
                        let dc = hops[c][p].min(hops[c][q]);
                        let dd = hops[d][p].min(hops[d][q]);
                        if dc <= dd {
                            c
                        } else {
                            d
                        }
                    })
                    .collect()
            })
            .collect();
        ThickeningField { tree: tree.clone(), segs, active, exponents, near }
    }

    pub fn tree(&self) -> &EmbeddedTree {
        &self.tree
    }

    pub fn dim(&self) -> usize {
        self.tree.dim()
    }

    fn project(&self, k: usize, x: &[f64]) -> Projection {
        let s = &self.segs[k];
        let rel = linalg::sub(x, &s.a);
        let t = if s.len2 > 0.0 { linalg::dot(&rel, &s.d) / s.len2 } else { 0.0 };
        let (t, clamped) = if t <= 0.0 {
            (0.0, Some(s.ends.0))
        } else if t >= 1.0 {
            (1.0, Some(s.ends.1))
        } else {
            (t, None)
        };
        let mut foot = s.a.clone();
        linalg::axpy(&mut foot, t, &s.d);
        Projection { dist: linalg::dist(x, &foot), foot, clamped }
    }

    /// Euclidean distance from `x` to the tree.
    pub fn distance(&self, x: &[f64]) -> f64 {
        if self.segs.is_empty() {
            return linalg::dist(x, &self.tree.positions[0]);
        }
        (0..self.segs.len()).map(|k| self.project(k, x).dist).fold(f64::INFINITY, f64::min)
    }

    /// Nearest edge of positive length.
    pub fn anchor_edge(&self, x: &[f64]) -> Option<usize> {
        let mut best = None;
        let mut bd = f64::INFINITY;
        for &k in &self.active {
            let d = self.project(k, x).dist;
            if d < bd {
                bd = d;
                best = Some(k);
            }
        }
        best
    }

    /// `Φ_T(x)` and `∇Φ_T(x)` from the edge form.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let dim = x.len();
        let zero = vec![0.0; dim];
        let Some(anchor) = self.anchor_edge(x) else {
            // every edge is degenerate: the tree is a point
            let p = &self.tree.positions[0];
            let r = linalg::dist(x, p);
            if r < ON_TREE {
                return (0.0, zero);
            }
            let (v, dv, _) = psi_all(r);
            return (v, linalg::scale(&linalg::sub(x, p), dv / r));
        };
        let p0 = self.project(anchor, x);
        if p0.dist < ON_TREE {
            return (0.0, zero);
        }
        let mut log_phi = 0.0;
        let mut dlog = vec![0.0; dim];
        let add = |dist: f64, foot: &[f64], sign: f64, log_phi: &mut f64, dlog: &mut Vec<f64>| {
            let (v, dv, _) = psi_all(dist);
            *log_phi += sign * v.ln();
            if dv != 0.0 {
                let g = dv / v;
                linalg::axpy(dlog, sign * g / dist, &linalg::sub(x, foot));
            }
        };
        add(p0.dist, &p0.foot, 1.0, &mut log_phi, &mut dlog);
        for &k in &self.active {
            if k == anchor {
                continue;
            }
            let pr = self.project(k, x);
            let v_near = self.near[anchor][k];
            if pr.clamped == Some(v_near) {
                continue;
            }
            if pr.dist < ON_TREE {
                return (0.0, zero);
            }
            let vn = &self.tree.positions[v_near];
            let rn = linalg::dist(x, vn);
            if rn < ON_TREE {
                return (0.0, zero);
            }
            add(pr.dist, &pr.foot, 1.0, &mut log_phi, &mut dlog);
            add(rn, vn, -1.0, &mut log_phi, &mut dlog);
        }
        let phi = log_phi.exp().clamp(0.0, 1.0);
        (phi, linalg::scale(&dlog, phi))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_and_gradient(x).0
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }

    /// `Φ_T(x)` as the literal quotient of the edge and vertex products.
    pub fn value_vertex_formula(&self, x: &[f64]) -> f64 {
        let mut num = 1.0;
        for k in 0..self.segs.len() {
            num *= psi_all(self.project(k, x).dist).0;
        }
        let mut den = 1.0;
        for (v, &e) in self.exponents.iter().enumerate() {
            den *= psi_all(linalg::dist(x, &self.tree.positions[v])).0.powi(e);
        }
        if num == 0.0 || den == 0.0 || !den.is_finite() {
            return 0.0;
        }
        (num / den).clamp(0.0, 1.0)
    }

    /// Distances from `x` to the hyperplanes where some projection switches
    /// between the interior of an edge and an endpoint, and to the vertices.
    pub fn distance_to_switches(&self, x: &[f64]) -> f64 {
        let mut d = f64::INFINITY;
        for &k in &self.active {
            let s = &self.segs[k];
            let len = s.len2.sqrt();
            let rel = linalg::sub(x, &s.a);
            let along = linalg::dot(&rel, &s.d) / len;
            d = d.min(along.abs()).min((along - len).abs());
        }
        for p in &self.tree.positions {
            d = d.min(linalg::dist(x, p));
        }
        d
    }
}

pub fn phi_eval(field: &ThickeningField, x: &[f64]) -> f64 {
    field.value(x)
}

pub fn phi_grad(field: &ThickeningField, x: &[f64]) -> Vec<f64> {
    field.gradient(x)
}

/// Inserts a bivalent vertex at fraction `s` of edge `edge`.
pub fn subdivide_tree(tree: &EmbeddedTree, edge: usize, s: f64) -> Result<EmbeddedTree> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::SubdivisionEndpoint(s));
    }
    if edge >= tree.num_edges() {
        return Err(Error::NotATree(format!("no edge {edge}")));
    }
    let mut t = tree.clone();
    let (a, b) = t.edges[edge];
    let mut p = t.positions[a].clone();
    linalg::axpy(&mut p, s, &tree.edge_vector(edge));
    let m = t.positions.len();
    t.positions.push(p);
    t.labels.push(TreeVertex::Free(m));
    t.edges[edge] = (a, m);
    t.edges.push((m, b));
    t.edge_labels.push(t.edge_labels[edge]);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::psi::{psi, psi_prime};
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tripod() -> EmbeddedTree {
        EmbeddedTree::new(
            vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0], vec![-4.0, -4.0]],
            vec![(0, 1), (0, 2), (0, 3)],
        )
        .unwrap()
    }

    #[test]
    fn on_tree_and_far_away() {
        let f = ThickeningField::new(&tripod());
        assert_eq!(f.value(&[2.0, 0.0]), 0.0);
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        assert_eq!(f.value(&[-2.0, -2.0]), 0.0);
        assert_eq!(f.value(&[10.0, 10.0]), 1.0);
        assert_eq!(f.gradient(&[10.0, 10.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn single_segment_is_psi_of_distance() {
        let seg = EmbeddedTree::new(vec![vec![0.0, 0.0], vec![8.0, 0.0]], vec![(0, 1)]).unwrap();
        let f = ThickeningField::new(&seg);
        for &(x, y, d) in &[(3.0, 0.4, 0.4), (3.0, -1.0, 1.0), (-0.3, 0.4, 0.5), (9.0, 0.0, 1.0)] {
            assert_abs_diff_eq!(f.value(&[x, y]), psi(d), epsilon = 1e-15);
        }
        let g = f.gradient(&[3.0, 0.7]);
        assert_abs_diff_eq!(g[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], psi_prime(0.7), epsilon = 1e-14);
        assert_abs_diff_eq!(f.value(&[6.0, 0.5]), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn edge_and_vertex_formulas_agree() {
        let f = ThickeningField::new(&tripod());
        for i in 0..50 {
            for j in 0..50 {
                let x = [-6.0 + 0.23 * i as f64, -6.0 + 0.21 * j as f64];
                assert_abs_diff_eq!(f.value(&x), f.value_vertex_formula(&x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn subdivision_leaves_field_unchanged() {
        let t = tripod();
        let f = ThickeningField::new(&t);
        for s in [0.5, 0.99] {
            let g = ThickeningField::new(&subdivide_tree(&t, 2, s).unwrap());
            for i in 0..40 {
                let x = [-5.0 + 0.27 * i as f64, 1.3 - 0.31 * i as f64];
                assert_abs_diff_eq!(f.value(&x), g.value(&x), epsilon = 1e-12);
            }
        }
        assert!(matches!(subdivide_tree(&t, 0, 1.0), Err(Error::SubdivisionEndpoint(_))));
        assert!(subdivide_tree(&t, 0, 0.0).is_err());
    }

    #[test]
    fn zero_length_edge_is_harmless() {
        let t = EmbeddedTree::new(
            vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![4.0, 0.0], vec![-4.0, 0.0], vec![0.0, 4.0], vec![0.0, -4.0]],
            vec![(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)],
        )
        .unwrap();
        let f = ThickeningField::new(&t);
        for x in [[0.3, 0.2], [1.0, -0.7], [-0.1, 0.05]] {
            assert_abs_diff_eq!(f.value(&x), f.value_vertex_formula(&x), epsilon = 1e-12);
        }
    }

    #[test]
    fn point_tree() {
        let t = EmbeddedTree::new(vec![vec![1.0, 1.0]], vec![]).unwrap();
        let f = ThickeningField::new(&t);
        assert_abs_diff_eq!(f.value(&[1.3, 1.0]), psi(0.3), epsilon = 1e-15);
        assert_abs_diff_eq!(f.value_vertex_formula(&[1.3, 1.0]), psi(0.3), epsilon = 1e-15);
    }
}
