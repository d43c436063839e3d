//! Small hand-checkable cases, each compared with an oracle computed here
//! (hand arithmetic or brute force).

use abeljac::abel_jacobi::{
    check_local_embedding, check_tautness, cut_long_edges, embed_trees, torus_immersion, EmbeddedTree, SCALE,
};
use abeljac::corpus;
use abeljac::family::{face_compatibility_check, interpolate_length, theta_to_rose};
use abeljac::graph::{collapse, cycle_basis, validate_length_function, Graph, HalfEdgeImage, LengthFunction, SpanningTree};
use abeljac::linalg;
use abeljac::period::{check_nonsingular, extend_cocycle, period_matrix, PeriodData};
use abeljac::thickening::{
    log_derivative, near_vertex_bound, psi, psi_prime, random_unit, rng, sublevel_region, subdivide_tree,
    verify_key_lemma, verify_psi, GridConfig, ThickeningField,
};
use approx::assert_abs_diff_eq;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn theta_unit() -> (Graph, LengthFunction) {
    let g = corpus::theta();
    let l = LengthFunction::unit(&g);
    (g, l)
}

fn e(g: &Graph, name: &str) -> usize {
    g.edge_id(name).unwrap()
}

/// `x` solving `[[p, q], [q, s]] x = b` by Cramer's rule.
fn cramer(m: [[f64; 2]; 2], b: [f64; 2]) -> [f64; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [(b[0] * m[1][1] - m[0][1] * b[1]) / det, (m[0][0] * b[1] - b[0] * m[1][0]) / det]
}

#[test]
fn theta_tree_follows_the_tie_break() {
    let (g, l) = theta_unit();
    let tree = SpanningTree::new(&g, &l, 0).unwrap();
    // every spanning tree of theta is a single edge; the chosen one leaves
    // the lexicographically smallest chord set
    let mut candidates: Vec<(Vec<usize>, usize)> = (0..3)
        .map(|t| ((0..3).filter(|&x| x != t).collect(), t))
        .collect();
    candidates.sort();
    assert_eq!(tree.tree_edges(), vec![candidates[0].1]);
    assert_eq!(tree.tree_edges(), vec![e(&g, "c")]);
    let chords: Vec<usize> = tree.chords().iter().map(|&h| h / 2).collect();
    assert_eq!(chords, vec![e(&g, "a"), e(&g, "b")]);
}

#[test]
fn dumbbell_tree_contains_the_short_bridge() {
    let g = corpus::dumbbell();
    let tree = SpanningTree::new(&g, &corpus::dumbbell_lengths(0.4), 0).unwrap();
    assert!(tree.contains(e(&g, "bridge")));
}

#[test]
fn theta_cycle_basis_and_incidence() {
    let (g, l) = theta_unit();
    let tree = SpanningTree::new(&g, &l, 0).unwrap();
    let cycles = cycle_basis(&g, &tree);
    let (a, b, c) = (2 * e(&g, "a"), 2 * e(&g, "b"), 2 * e(&g, "c"));
    assert_eq!(cycles[0].half_edges(), &[a, c + 1]);
    assert_eq!(cycles[1].half_edges(), &[b, c + 1]);
    assert_eq!(cycles[0].incidence(&g)[e(&g, "c")], -1);
}

#[test]
fn theta_collapses_to_rose() {
    let g = corpus::theta();
    let (q, phi) = collapse(&g, &[e(&g, "c")]).unwrap();
    assert_eq!(q.num_vertices(), 1);
    assert_eq!(q.num_edges(), 2);
    for name in ["a", "b"] {
        let img = phi.edge(e(&g, name)).unwrap();
        assert!(q.is_loop(img));
    }
    assert!(matches!(phi.half_edge(2 * e(&g, "c")), HalfEdgeImage::Vertex(_)));
}

#[test]
fn dumbbell_collapses_to_rose() {
    let g = corpus::dumbbell();
    let (q, _) = collapse(&g, &[e(&g, "bridge")]).unwrap();
    assert_eq!((q.num_vertices(), q.num_edges()), (1, 2));
    assert!(q.separating_edges().is_empty());
}

#[test]
fn theta_with_two_short_edges_is_invalid() {
    let g = corpus::theta();
    let l = LengthFunction::from_edge_lengths(vec![0.5, 0.5, 1.0]);
    let r = validate_length_function(&g, &l);
    assert!(!r.passed());
    // the embedded cycle through a and b alone carries no edge of length one
    let (a, b) = (e(&g, "a"), e(&g, "b"));
    assert_eq!(g.endpoints(a), g.endpoints(b));
}

#[test]
fn extension_of_standard_chord_values() {
    let (g, l) = theta_unit();
    let tree = SpanningTree::new(&g, &l, 0).unwrap();
    let w = extend_cocycle(&g, &tree, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert_eq!(w.value(2 * e(&g, "c")), &[-1.0, -1.0]);
}

#[test]
fn theta_period_matrices() {
    let (g, l) = theta_unit();
    let tree = SpanningTree::new(&g, &l, 0).unwrap();
    let p = period_matrix(&g, &tree, &l).unwrap();
    // ℓ_a + ℓ_c on the diagonal, the shared edge c off it
    assert_eq!(p.matrix().to_rows(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    let short = LengthFunction::from_edge_lengths(vec![1.0, 1.0, 0.0]);
    let p0 = period_matrix(&g, &tree, &short).unwrap();
    assert_eq!(p0.matrix().to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
}

#[test]
fn theta_canonical_values_match_a_direct_solve() {
    let (g, l) = theta_unit();
    let data = PeriodData::compute(&g, &l, 0).unwrap();
    let x1 = cramer([[2.0, 1.0], [1.0, 2.0]], [1.0, 0.0]);
    let x2 = cramer([[2.0, 1.0], [1.0, 2.0]], [0.0, 1.0]);
    let a = data.omega.value(2 * e(&g, "a"));
    let b = data.omega.value(2 * e(&g, "b"));
    let c = data.omega.value(2 * e(&g, "c"));
    assert!(close(a, &[x1[0], x2[0]], 1e-15));
    assert!(close(a, &[2.0 / 3.0, -1.0 / 3.0], 1e-15));
    assert!(close(b, &[-1.0 / 3.0, 2.0 / 3.0], 1e-15));
    assert!(close(c, &[-1.0 / 3.0, -1.0 / 3.0], 1e-15));
    let ns = check_nonsingular(&data.omega);
    assert!(ns.nonsingular && ns.zero_half_edges.is_empty());
}

#[test]
fn dumbbell_bridge_value_is_zero() {
    let g = corpus::dumbbell();
    let data = PeriodData::compute(&g, &corpus::dumbbell_lengths(0.4), 0).unwrap();
    let bridge = 2 * e(&g, "bridge");
    assert_eq!(data.omega.value(bridge), &[0.0, 0.0]);
    let ns = check_nonsingular(&data.omega);
    assert!(ns.nonsingular);
    assert_eq!(ns.zero_half_edges, vec![bridge, bridge + 1]);
}

#[test]
fn theta_good_metric() {
    let (g, l) = theta_unit();
    let data = PeriodData::compute(&g, &l, 0).unwrap();
    let m = data.good_metric(&l).unwrap();
    assert!(close(&m.u.to_rows().concat(), &[2.0, 1.0, 1.0, 2.0], 1e-14));
    assert!(close(&m.s.to_rows().concat(), &[5.0, 4.0, 4.0, 5.0], 1e-13));
    let (a, c) = (2 * e(&g, "a"), 2 * e(&g, "c"));
    assert_eq!(g.source(a), g.source(c));
    assert_abs_diff_eq!(m.inner(data.omega.value(a), data.omega.value(c)), -1.0, epsilon = 1e-14);
    assert!(close(&m.apply(data.omega.value(c)), &[-1.0, -1.0], 1e-14));
}

#[test]
fn theta_potentials_and_closure_defect() {
    let (g, l) = theta_unit();
    let im = torus_immersion(&g, &l, 0).unwrap();
    let (u, v) = (g.vertex_id("u").unwrap(), g.vertex_id("v").unwrap());
    assert!(close(&im.potentials[u], &[0.0, 0.0], 0.0));
    assert!(close(&im.potentials[v], &[-1.0 / 3.0, -1.0 / 3.0], 1e-15));
    assert!(close(&im.closure_defect(&g, 2 * e(&g, "a")), &[1.0, 0.0], 1e-15));
    assert!(close(&im.closure_defect(&g, 2 * e(&g, "b")), &[0.0, 1.0], 1e-15));
    let local = check_local_embedding(&g, &im);
    assert!(local.report.passed());
    assert!((0..3).all(|k| linalg::norm(&im.displacement(2 * k)) > 0.0));
}

#[test]
fn dumbbell_bridge_displacement_is_reported() {
    let g = corpus::dumbbell();
    let im = torus_immersion(&g, &corpus::dumbbell_lengths(0.4), 0).unwrap();
    let local = check_local_embedding(&g, &im);
    assert_eq!(local.separating_zero, vec![e(&g, "bridge")]);
    assert!(!local.report.passed());
}

#[test]
fn cut_decompositions() {
    let (g, l) = theta_unit();
    let f = cut_long_edges(&g, &l).unwrap();
    assert_eq!(f.num_trees(), 2);
    assert_eq!(f.gluings.len(), 3);
    assert!(f.trees.iter().all(|t| t.legs.len() == 3 && t.edges.is_empty()));

    let rose = corpus::rose(2);
    let f = cut_long_edges(&rose, &LengthFunction::unit(&rose)).unwrap();
    assert_eq!((f.num_trees(), f.gluings.len(), f.trees[0].legs.len()), (1, 2, 4));

    let d = corpus::dumbbell();
    let f = cut_long_edges(&d, &corpus::dumbbell_lengths(0.4)).unwrap();
    assert_eq!(f.num_trees(), 1);
    assert_eq!(f.trees[0].edges, vec![e(&d, "bridge")]);
}

#[test]
fn theta_tripod_leaves_and_balance() {
    let (g, l) = theta_unit();
    let im = torus_immersion(&g, &l, 0).unwrap();
    let layout = embed_trees(&g, &cut_long_edges(&g, &l).unwrap(), &im, SCALE).unwrap();
    let t = &layout.trees[0];
    let mut leaves: Vec<Vec<f64>> = (0..t.num_vertices())
        .filter(|&v| t.is_leaf(v))
        .map(|v| t.positions[v].iter().map(|x| x.round()).collect())
        .collect();
    leaves.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(leaves, vec![vec![-4.0, -4.0], vec![0.0, 4.0], vec![4.0, 0.0]]);
    let sum = linalg::add(&linalg::add(&[1.0, 0.0], &[0.0, 1.0]), &linalg::scale(&[-1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()], 2f64.sqrt()));
    assert!(linalg::max_abs(&sum) < 1e-15);
    assert!(check_tautness(t).passed());
}

#[test]
fn psi_reference_values() {
    assert_abs_diff_eq!(psi(0.3), 0.09, epsilon = 1e-15);
    assert_eq!(psi(2.0), 1.0);
    assert_eq!(psi_prime(2.0), 0.0);
    assert!(verify_psi(10_000).passed());
    assert!(log_derivative(1.49).abs() < 0.05);
    assert!(log_derivative(1.49) > 0.0);
}

fn segment() -> EmbeddedTree {
    EmbeddedTree::new(vec![vec![0.0, 0.0], vec![4.0, 0.0]], vec![(0, 1)]).unwrap()
}

fn tripod() -> EmbeddedTree {
    EmbeddedTree::new(
        vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0], vec![-4.0, -4.0]],
        vec![(0, 1), (0, 2), (0, 3)],
    )
    .unwrap()
}

#[test]
fn field_zero_on_tree_one_far_away() {
    let f = ThickeningField::new(&tripod());
    assert_eq!(f.value(&[2.0, 0.0]), 0.0);
    assert_eq!(f.value(&[-1.0, -1.0]), 0.0);
    assert_eq!(f.value(&[2.0, 1.5]), 1.0);
    assert_eq!(f.value(&[10.0, 10.0]), 1.0);
    assert!(f.value(&[2.0, 1.49]) < 1.0);
}

#[test]
fn single_segment_is_psi_of_distance() {
    let f = ThickeningField::new(&segment());
    let mut r = rng(9);
    for _ in 0..500 {
        let x: [f64; 2] = [rand::Rng::gen_range(&mut r, -2.0..6.0), rand::Rng::gen_range(&mut r, -2.0..2.0)];
        let foot = [x[0].clamp(0.0, 4.0), 0.0];
        let d = linalg::dist(&x, &foot);
        assert_abs_diff_eq!(f.value(&x), psi(d), epsilon = 1e-14);
        if d > 1e-6 {
            let normal = linalg::scale(&linalg::sub(&x, &foot), 1.0 / d);
            assert!(close(&f.gradient(&x), &linalg::scale(&normal, psi_prime(d)), 1e-12));
        }
    }
}

#[test]
fn near_vertex_bound_on_a_tripod() {
    assert!(near_vertex_bound(&tripod(), 5_000, 3).passed());
}

#[test]
fn key_lemma_on_theta_tripod_and_rose_star() {
    let f = ThickeningField::new(&tripod());
    assert_eq!(verify_key_lemma(&f, 100_000, 1).violations, 0);
    let rose = corpus::rose(2);
    let l = LengthFunction::unit(&rose);
    let im = torus_immersion(&rose, &l, 0).unwrap();
    let layout = embed_trees(&rose, &cut_long_edges(&rose, &l).unwrap(), &im, SCALE).unwrap();
    assert_eq!(layout.trees[0].valence(0), 4);
    assert_eq!(verify_key_lemma(&ThickeningField::new(&layout.trees[0]), 100_000, 2).violations, 0);
}

#[test]
fn subdivision_at_half_and_near_the_end() {
    let t = tripod();
    let f = ThickeningField::new(&t);
    let mut r = rng(4);
    for s in [0.5, 0.99] {
        let g = ThickeningField::new(&subdivide_tree(&t, 1, s).unwrap());
        for _ in 0..1_000 {
            let x = linalg::scale(&random_unit(&mut r, 2), rand::Rng::gen_range(&mut r, 0.0..6.0));
            assert!((f.value(&x) - g.value(&x)).abs() <= 1e-12);
        }
    }
}

#[test]
fn boundary_is_closed_and_quarter_near_leaves() {
    let (g, l) = theta_unit();
    let im = torus_immersion(&g, &l, 0).unwrap();
    let layout = embed_trees(&g, &cut_long_edges(&g, &l).unwrap(), &im, SCALE).unwrap();
    let region = sublevel_region(&layout, GridConfig::default()).unwrap();
    assert!(!region.polylines.is_empty() && region.polylines.iter().all(|p| p.closed));

    let f = ThickeningField::new(&tripod());
    assert_abs_diff_eq!(f.value(&[3.0, 0.5]), 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(f.value(&[0.5, 3.0]), 0.25, epsilon = 1e-12);
}

#[test]
fn family_lengths_and_faces() {
    let fam = theta_to_rose();
    let g = fam.graph().clone();
    let l = interpolate_length(&fam, &[0.5, 0.5]).unwrap();
    assert_eq!((l.edge(e(&g, "a")), l.edge(e(&g, "b")), l.edge(e(&g, "c"))), (1.0, 1.0, 0.5));

    let (_, start) = fam.period_data(&[1.0, 0.0]).unwrap();
    assert!(close(start.omega.value(2 * e(&g, "c")), &[-1.0 / 3.0, -1.0 / 3.0], 1e-15));

    let (face_l, face) = fam.period_data(&[0.0, 1.0]).unwrap();
    assert!(close(face.omega.value(2 * e(&g, "a")), &[1.0, 0.0], 1e-15));
    assert!(close(face.omega.value(2 * e(&g, "b")), &[0.0, 1.0], 1e-15));
    assert_eq!(face_l.edge(e(&g, "c")), 0.0);
    assert!(linalg::norm(face.omega.value(2 * e(&g, "c"))) > 0.0);

    // independent solve on the rose itself
    let rose = corpus::rose(2);
    let rose_data = PeriodData::compute(&rose, &LengthFunction::unit(&rose), 0).unwrap();
    assert!(close(rose_data.omega.value(0), &[1.0, 0.0], 1e-15));
    assert!(close(rose_data.omega.value(2), &[0.0, 1.0], 1e-15));

    let r = face_compatibility_check(&fam, 0).unwrap();
    assert!(r.passed(), "{r}");
}
