//! The full check suite for one metric graph.

use crate::abel_jacobi::{
    check_local_embedding, check_tautness_labeled, cut_long_edges, embed_trees, immersion_from,
    lattice_defect_report, path_pair_report, TorusLayout, SCALE,
};
use crate::error::Result;
use crate::graph::{validate_length_function, validate_shape, Graph, LengthFunction};
use crate::linalg;
use crate::period::{check_nonsingular, good_metric_report, PeriodData};
use crate::report::{Check, Report};
use crate::thickening::{
    formula_agreement, glued_pair_agreement, gradient_fd_check, leaf_standardness, rigid_motion_check,
    sublevel_region, subdivision_invariance, verify_key_lemma, verify_psi, GridConfig, ThickeningField,
};
use crate::{TOL_GEOMETRIC, TOL_STRUCTURAL};

/// Sample sizes and tolerances for [`verify_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub key_lemma_samples: usize,
    pub gradient_points: usize,
    pub formula_points: usize,
    pub leaf_points: usize,
    pub psi_grid: usize,
    pub grid_h: f64,
    pub tol_structural: f64,
    pub tol_geometric: f64,
    pub region: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            key_lemma_samples: 100_000,
            gradient_points: 10_000,
            formula_points: 10_000,
            leaf_points: 2_000,
            psi_grid: 10_000,
            grid_h: 0.05,
            tol_structural: TOL_STRUCTURAL,
            tol_geometric: TOL_GEOMETRIC,
            region: true,
        }
    }
}

impl VerifyConfig {
    /// Smaller sample counts for quick runs.
    pub fn quick() -> Self {
        VerifyConfig {
            key_lemma_samples: 5_000,
            gradient_points: 500,
            formula_points: 500,
            leaf_points: 200,
            psi_grid: 2_000,
            ..Self::default()
        }
    }
}

fn relabel(mut r: Report, prefix: &str) -> Report {
    for c in r.checks.iter_mut() {
        c.check = format!("{prefix}{}", c.check);
    }
    r
}

/// Structure of the canonical cocycle: balance, `λ_*` identity, zero set,
/// integer coefficients in the chord basis, and the good metric.
pub fn period_suite(g: &Graph, lengths: &LengthFunction, data: &PeriodData, cfg: &VerifyConfig) -> Report {
    let mut r = Report::new();
    let (bal, v) = data.omega.balance_residual(g);
    r.push(Check::at_most("cocycle.balance", bal, cfg.tol_structural, Some(g.vertex_name(v).to_string())));
    r.push(Check::at_most("cocycle.antisymmetry", data.omega.antisymmetry_residual(g), 0.0, None));
    r.push(Check::at_most("cocycle.lambda_star_identity", data.lambda_star_residual(lengths), cfg.tol_structural, None));

    let ns = check_nonsingular(&data.omega);
    r.push(Check::boolean("cocycle.nonsingular", ns.nonsingular, Some(format!("rank {} of {}", ns.rank, ns.dim))));
    let bridges: Vec<usize> = g.separating_edges().iter().flat_map(|&e| [2 * e, 2 * e + 1]).collect();
    let zero_ok = ns.zero_half_edges == bridges;
    r.push(Check::boolean(
        "cocycle.zero_set_is_bridges",
        zero_ok,
        if zero_ok { None } else { Some(format!("zero {:?} vs bridges {:?}", ns.zero_half_edges, bridges)) },
    ));

    match data.good_metric(lengths) {
        Ok(m) => {
            let mut worst = 0.0f64;
            for h in 0..g.num_half_edges() {
                for c in m.apply(data.omega.value(h)) {
                    worst = worst.max((c - c.round()).abs());
                }
            }
            r.push(Check::at_most("cocycle.integer_coefficients", worst, cfg.tol_geometric, None));
            r.extend(good_metric_report(g, &data.tree, &data.omega, &m));
        }
        Err(e) => r.push(Check::boolean("good_metric.exists", false, Some(e.to_string()))),
    }
    r
}

/// Tautness and every sampled field property for each cut tree, plus pasting.
pub fn thickening_suite(g: &Graph, layout: &TorusLayout, cfg: &VerifyConfig) -> Report {
    let mut r = Report::new();
    r.push(path_pair_report(g, layout));
    let mut mismatch = layout.gluing_mismatch();
    for gl in &layout.gluings {
        mismatch = mismatch.max(gl.integrality_residual);
    }
    r.push(Check::at_most("cut_tree.gluing", mismatch, cfg.tol_geometric, None));
    for (i, t) in layout.trees.iter().enumerate() {
        let p = format!("tree{i}.");
        let seed = cfg.seed.wrapping_add(1000 * i as u64);
        r.extend(relabel(check_tautness_labeled(t, Some(g)), &p));
        if t.dim() == 0 {
            continue;
        }
        let f = ThickeningField::new(t);
        let mut one = Report::new();
        one.push(formula_agreement(&f, cfg.formula_points, seed + 1));
        one.push(subdivision_invariance(&f, &[0.5, 0.99], (cfg.formula_points / 10).max(10), seed + 2));
        one.push(gradient_fd_check(&f, cfg.gradient_points, (0.01, 0.99), seed + 3).check);
        one.push(verify_key_lemma(&f, cfg.key_lemma_samples, seed + 4).check);
        one.push(leaf_standardness(&f, cfg.leaf_points, seed + 5));
        one.push(rigid_motion_check(&f, 3, (cfg.formula_points / 10).max(10), seed + 6));
        r.extend(relabel(one, &p));
    }
    if layout.rank() > 0 {
        r.push(glued_pair_agreement(layout, cfg.leaf_points, cfg.seed + 7));
    }
    r
}

/// Topology and regularity of `W` on a rank-2 torus.
pub fn region_suite(layout: &TorusLayout, cfg: &VerifyConfig) -> Result<Report> {
    let region = sublevel_region(layout, GridConfig { h: cfg.grid_h, ..GridConfig::default() })?;
    let mut r = region.report();
    let chi = region.euler_characteristic;
    r.push(Check::at_most(
        "region.euler_characteristic",
        (chi - (1 - layout.rank() as i64)).abs() as f64,
        0.0,
        Some(format!("chi = {chi}")),
    ));
    Ok(r)
}

/// Everything checkable for `(Γ, λ)`.
pub fn verify_suite(g: &Graph, lengths: &LengthFunction, cfg: &VerifyConfig) -> Result<Report> {
    let mut r = Report::new();
    r.extend(validate_shape(g, false, false).report);
    r.extend(validate_length_function(g, lengths));
    if !r.passed() {
        return Ok(r);
    }
    let data = PeriodData::compute(g, lengths, 0)?;
    r.extend(period_suite(g, lengths, &data, cfg));
    let im = immersion_from(g, lengths, data)?;
    r.extend(lattice_defect_report(g, &im));
    r.extend(check_local_embedding(g, &im).report);
    r.extend(verify_psi(cfg.psi_grid));
    let forest = cut_long_edges(g, lengths)?;
    let layout = embed_trees(g, &forest, &im, SCALE)?;
    let min_ext = forest
        .cut_edges()
        .iter()
        .map(|&e| SCALE * linalg::norm(&im.displacement_good(2 * e)))
        .fold(f64::INFINITY, f64::min);
    if min_ext.is_finite() {
        r.push(Check::from_margin("cut_tree.long_edge_length", min_ext - 4.0 + cfg.tol_geometric, None));
    }
    r.extend(thickening_suite(g, &layout, cfg));
    if cfg.region && layout.rank() == 2 {
        r.extend(region_suite(&layout, cfg)?);
    }
    Ok(r)
}
