//! Sampled verification of the properties of `Φ_T`.

use super::field::{subdivide_tree, ThickeningField};
use super::psi::psi;
use crate::abel_jacobi::{EmbeddedTree, TorusLayout};
use crate::linalg::{self, Matrix};
use crate::report::Check;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Margin added around the bounding box of a tree when sampling.
pub const SAMPLE_MARGIN: f64 = 1.5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniform point of the tree's bounding box inflated by `margin`.
pub fn sample_box<R: Rng>(rng: &mut R, tree: &EmbeddedTree, margin: f64) -> Vec<f64> {
    let (lo, hi) = tree.bbox();
    lo.iter().zip(&hi).map(|(&a, &b)| rng.gen_range(a - margin..=b + margin)).collect()
}

/// A uniform unit vector.
pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n = linalg::norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return linalg::scale(&v, 1.0 / n);
        }
    }
}

/// A unit vector orthogonal to the unit vector `axis` (zero in dimension 1).
pub fn random_normal<R: Rng>(rng: &mut R, axis: &[f64]) -> Vec<f64> {
    if axis.len() < 2 {
        return vec![0.0; axis.len()];
    }
    loop {
        let v = random_unit(rng, axis.len());
        let mut w = v.clone();
        linalg::axpy(&mut w, -linalg::dot(&v, axis), axis);
        let n = linalg::norm(&w);
        if n > 1e-3 {
            return linalg::scale(&w, 1.0 / n);
        }
    }
}

/// A random orthogonal matrix (Gram-Schmidt on random rows).
pub fn random_rotation<R: Rng>(rng: &mut R, dim: usize) -> Matrix {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < dim {
        let mut v = random_unit(rng, dim);
        for r in &rows {
            let c = linalg::dot(&v, r);
            linalg::axpy(&mut v, -c, r);
        }
        let n = linalg::norm(&v);
        if n > 1e-3 {
            rows.push(linalg::scale(&v, 1.0 / n));
        }
    }
    Matrix::from_rows(&rows)
}

/// Summary of a Key Lemma run.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyLemmaStats {
    pub samples: usize,
    pub in_band: usize,
    pub violations: usize,
    pub min_gradient: f64,
    pub check: Check,
}

/// Samples the inflated bounding box and requires `‖∇Φ‖ > 1e−8` wherever
/// `Φ ∈ [0.05, 0.95]`.
pub fn verify_key_lemma(field: &ThickeningField, samples: usize, seed: u64) -> KeyLemmaStats {
    let mut r = rng(seed);
    let mut in_band = 0;
    let mut violations = 0;
    let mut min_gradient = f64::INFINITY;
    let mut at = None;
    for _ in 0..samples {
        let x = sample_box(&mut r, field.tree(), SAMPLE_MARGIN);
        let (phi, g) = field.value_and_gradient(&x);
        if !(0.05..=0.95).contains(&phi) {
            continue;
        }
        in_band += 1;
        let n = linalg::norm(&g);
        if n <= 1e-8 {
            violations += 1;
        }
        if n < min_gradient {
            min_gradient = n;
            at = Some(format!("{x:?}"));
        }
    }
    let check = if in_band == 0 {
        Check::boolean("thickening.key_lemma", false, Some("no samples in band".into()))
    } else {
        Check::above("thickening.key_lemma", min_gradient, 1e-8, at)
    };
    KeyLemmaStats { samples, in_band, violations, min_gradient, check }
}

/// Largest `|Φ_edge − Φ_vertex|` over `samples` random points.
pub fn formula_agreement(field: &ThickeningField, samples: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut at = None;
    for _ in 0..samples {
        let x = sample_box(&mut r, field.tree(), SAMPLE_MARGIN);
        let d = (field.value(&x) - field.value_vertex_formula(&x)).abs();
        if d > worst {
            worst = d;
            at = Some(format!("{x:?}"));
        }
    }
    Check::at_most("thickening.formula_agreement", worst, 1e-12, at)
}

/// Largest `|Φ_T − Φ_T′|` after inserting a bivalent vertex at fraction `s`
/// of every edge of positive length, one edge at a time.
pub fn subdivision_invariance(field: &ThickeningField, fractions: &[f64], samples: usize, seed: u64) -> Check {
    let tree = field.tree();
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut at = None;
    for e in 0..tree.num_edges() {
        if tree.edge_length(e) < 1e-12 {
            continue;
        }
        for &s in fractions {
            let sub = ThickeningField::new(&subdivide_tree(tree, e, s).expect("interior fraction"));
            for _ in 0..samples {
                let x = sample_box(&mut r, tree, SAMPLE_MARGIN);
                let d = (field.value(&x) - sub.value(&x)).abs();
                if d > worst {
                    worst = d;
                    at = Some(format!("edge {e} at {s}"));
                }
            }
        }
    }
    Check::at_most("thickening.subdivision_invariance", worst, 1e-12, at)
}

/// Gradient accuracy at points away from vertices and projection switches.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientStats {
    pub admissible: usize,
    pub attempts: usize,
    pub worst_relative_error: f64,
    pub check: Check,
}

/// Central differences with step `1e−5` against the analytic gradient at
/// `count` points with `Φ ∈ band` lying at least `1e−3` from vertices and
/// projection-switch hyperplanes.
pub fn gradient_fd_check(field: &ThickeningField, count: usize, band: (f64, f64), seed: u64) -> GradientStats {
    let step = 1e-5;
    let mut r = rng(seed);
    let mut admissible = 0;
    let mut attempts = 0;
    let mut worst = 0.0f64;
    let mut at = None;
    let dim = field.dim();
    while admissible < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let x = sample_box(&mut r, field.tree(), SAMPLE_MARGIN);
        let (phi, g) = field.value_and_gradient(&x);
        if phi < band.0 || phi > band.1 || field.distance_to_switches(&x) < 1e-3 {
            continue;
        }
        admissible += 1;
        let mut fd = vec![0.0; dim];
        for i in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            fd[i] = (field.value(&xp) - field.value(&xm)) / (2.0 * step);
        }
        let err = linalg::dist(&fd, &g) / linalg::norm(&g).max(1e-300);
        if err > worst {
            worst = err;
            at = Some(format!("{x:?}"));
        }
    }
    let mut check = Check::at_most("thickening.gradient_fd", worst, 1e-6, at);
    if admissible < count {
        check = Check::boolean("thickening.gradient_fd", false, Some(format!("only {admissible} admissible points")));
    }
    GradientStats { admissible, attempts, worst_relative_error: worst, check }
}

/// A star with `k` legs of length `leg` along the given unit directions.
pub fn star_tree(directions: &[Vec<f64>], leg: f64) -> EmbeddedTree {
    let dim = directions[0].len();
    let mut positions = vec![vec![0.0; dim]];
    let mut edges = Vec::new();
    for (i, d) in directions.iter().enumerate() {
        positions.push(linalg::scale(d, leg));
        edges.push((0, i + 1));
    }
    EmbeddedTree::new(positions, edges).expect("a star is a tree")
}

/// `k` evenly spread unit directions in the plane.
pub fn planar_directions(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            vec![a.cos(), a.sin()]
        })
        .collect()
}

/// Taut stars used for the local bounds: planar stars of valence 3 and 4
/// plus a few regular spatial stars.
pub fn corpus_stars() -> Vec<EmbeddedTree> {
    let mut stars: Vec<EmbeddedTree> = (3..=4).map(|k| star_tree(&planar_directions(k), 4.0)).collect();
    let s = 1.0 / 3f64.sqrt();
    stars.push(star_tree(
        &[vec![s, s, s], vec![s, -s, -s], vec![-s, s, -s], vec![-s, -s, s]],
        4.0,
    ));
    let mut bipyramid: Vec<Vec<f64>> = planar_directions(3).into_iter().map(|mut v| {
        v.push(0.0);
        v
    }).collect();
    bipyramid.push(vec![0.0, 0.0, 1.0]);
    bipyramid.push(vec![0.0, 0.0, -1.0]);
    stars.push(star_tree(&bipyramid, 4.0));
    let mut oct = Vec::new();
    for i in 0..3 {
        for sign in [1.0, -1.0] {
            let mut v = vec![0.0; 3];
            v[i] = sign;
            oct.push(v);
        }
    }
    stars.push(star_tree(&oct, 4.0));
    stars
}

/// `‖∇Φ₀(x)‖ ≤ (4k − 2)‖x − v‖` within distance `½` of the centre `v` of a
/// star of valence `k`. Reports the largest ratio of the two sides.
pub fn near_vertex_bound(star: &EmbeddedTree, samples: usize, seed: u64) -> Check {
    let field = ThickeningField::new(star);
    let k = star.valence(0) as f64;
    let centre = &star.positions[0];
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut at = None;
    for _ in 0..samples {
        let u = random_unit(&mut r, star.dim());
        let rad = r.gen_range(1e-6..=0.5);
        let x = linalg::add(centre, &linalg::scale(&u, rad));
        let g = linalg::norm(&field.gradient(&x));
        let ratio = g / ((4.0 * k - 2.0) * rad);
        if ratio > worst {
            worst = ratio;
            at = Some(format!("{x:?}"));
        }
    }
    Check::at_most(format!("thickening.near_vertex_bound.k{}", k as usize), worst, 1.0 + 1e-12, at)
}

/// Largest `‖∇Φ₀(x) − ∇Φ₀(y)‖ / ‖x − y‖` over near pairs inside the ball of
/// radius `½` about the centre of a star, compared with `16k² − 12k − 2`.
pub fn local_lipschitz(star: &EmbeddedTree, samples: usize, seed: u64) -> (f64, Check) {
    let field = ThickeningField::new(star);
    let k = star.valence(0) as f64;
    let bound = 16.0 * k * k - 12.0 * k - 2.0;
    let centre = &star.positions[0];
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut at = None;
    let dim = star.dim();
    for _ in 0..samples {
        let u = random_unit(&mut r, dim);
        let x = linalg::add(centre, &linalg::scale(&u, r.gen_range(0.0..=0.49)));
        let y = linalg::add(&x, &linalg::scale(&random_unit(&mut r, dim), r.gen_range(1e-6..=1e-2)));
        if linalg::dist(&y, centre) > 0.5 {
            continue;
        }
        let q = linalg::dist(&field.gradient(&x), &field.gradient(&y)) / linalg::dist(&x, &y);
        if q > worst {
            worst = q;
            at = Some(format!("{x:?}"));
        }
    }
    (worst, Check::at_most(format!("thickening.local_lipschitz.k{}", k as usize), worst, bound, at))
}

/// Largest sampled `‖∇Φ(x) − ∇Φ(y)‖ / ‖x − y‖` over near pairs.
pub fn lipschitz_estimate(field: &ThickeningField, samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = sample_box(&mut r, field.tree(), SAMPLE_MARGIN);
        let y = linalg::add(&x, &linalg::scale(&random_unit(&mut r, field.dim()), 1e-3));
        let q = linalg::dist(&field.gradient(&x), &field.gradient(&y)) / 1e-3;
        worst = worst.max(q);
    }
    worst
}

/// `Φ_{RT+t}(Rx + t) = Φ_T(x)` under random rigid motions.
pub fn rigid_motion_check(field: &ThickeningField, motions: usize, samples: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let dim = field.dim();
    let mut worst = 0.0f64;
    for _ in 0..motions {
        let rot = random_rotation(&mut r, dim);
        let shift: Vec<f64> = (0..dim).map(|_| r.gen_range(-10.0..=10.0)).collect();
        let moved = ThickeningField::new(&field.tree().transformed(&rot, &shift));
        for _ in 0..samples {
            let x = sample_box(&mut r, field.tree(), SAMPLE_MARGIN);
            let y = linalg::add(&rot.mul_vec(&x), &shift);
            let (p0, g0) = field.value_and_gradient(&x);
            let (p1, g1) = moved.value_and_gradient(&y);
            worst = worst.max((p0 - p1).abs()).max(linalg::dist(&rot.mul_vec(&g0), &g1));
        }
    }
    Check::at_most("thickening.rigid_motion", worst, 1e-9, None)
}

/// Points within `5/2` of each leaf along its external edge and up to
/// distance `½` from it, plus cap points past the leaf; requires
/// `|Φ − ψ(dist to the external edge)| ≤ 1e−9`.
pub fn leaf_standardness(field: &ThickeningField, per_leaf: usize, seed: u64) -> Check {
    let tree = field.tree();
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut at = None;
    for v in 0..tree.num_vertices() {
        if !tree.is_leaf(v) {
            continue;
        }
        let (k, inner) = tree.incident(v)[0];
        let len = tree.edge_length(k);
        if len < 2.5 {
            continue;
        }
        let leaf = &tree.positions[v];
        let dir = linalg::scale(&linalg::sub(leaf, &tree.positions[inner]), 1.0 / len);
        for i in 0..per_leaf {
            let rad = r.gen_range(0.0..=0.5);
            let x = if i % 4 == 3 {
                // cap beyond the leaf
                let mut u = random_unit(&mut r, tree.dim());
                if linalg::dot(&u, &dir) < 0.0 {
                    u = linalg::scale(&u, -1.0);
                }
                linalg::add(leaf, &linalg::scale(&u, rad))
            } else {
                let arc = r.gen_range(len - 2.5..=len);
                let n = random_normal(&mut r, &dir);
                let mut x = linalg::add(&tree.positions[inner], &linalg::scale(&dir, arc));
                linalg::axpy(&mut x, rad, &n);
                x
            };
            let d = segment_distance(&x, &tree.positions[inner], leaf);
            let err = (field.value(&x) - psi(d)).abs();
            if err > worst {
                worst = err;
                at = Some(tree.vertex_label(None, v));
            }
        }
    }
    Check::at_most("thickening.leaf_standardness", worst, 1e-9, at)
}

pub fn segment_distance(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d = linalg::sub(b, a);
    let len2 = linalg::dot(&d, &d);
    let t = if len2 > 0.0 { (linalg::dot(&linalg::sub(x, a), &d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let mut p = a.to_vec();
    linalg::axpy(&mut p, t, &d);
    linalg::dist(x, &p)
}

/// On every glued pair of external edges, compares the two trees' fields on
/// the shared cylinder: arc length in `[3/2, L − 3/2]`, radius at most `½`.
pub fn glued_pair_agreement(layout: &TorusLayout, per_pair: usize, seed: u64) -> Check {
    let fields: Vec<ThickeningField> = layout.trees.iter().map(ThickeningField::new).collect();
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut at = None;
    for gl in &layout.gluings {
        let ta = &layout.trees[gl.a.0];
        let tb = &layout.trees[gl.b.0];
        let inner = ta.incident(gl.a.1)[0].1;
        let p0 = ta.global_position(inner);
        let p1 = ta.global_position(gl.a.1);
        let len = linalg::dist(&p0, &p1);
        if len < 3.0 {
            continue;
        }
        let dir = linalg::scale(&linalg::sub(&p1, &p0), 1.0 / len);
        let b_origin = linalg::add(&tb.anchor, &gl.shift);
        for _ in 0..per_pair {
            let arc = r.gen_range(1.5..=len - 1.5);
            let rad = r.gen_range(0.0..=0.5);
            let n = random_normal(&mut r, &dir);
            let mut y = linalg::add(&p0, &linalg::scale(&dir, arc));
            linalg::axpy(&mut y, rad, &n);
            let fa = fields[gl.a.0].value(&linalg::sub(&y, &ta.anchor));
            let fb = fields[gl.b.0].value(&linalg::sub(&y, &b_origin));
            let err = (fa - fb).abs();
            if err > worst {
                worst = err;
                at = Some(format!("edge {}", gl.edge));
            }
        }
    }
    Check::at_most("thickening.glued_pair_agreement", worst, 1e-9, at)
}
