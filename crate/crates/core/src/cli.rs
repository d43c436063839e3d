//! Configuration-driven command surface behind the `abeljac` binary.
//!
//! Every subcommand reads one JSON document from `--input`, writes one
//! artifact, and collects a [`Report`]. The artifact goes to `--out` when
//! given and to standard output otherwise; the human summary goes to standard
//! output when the artifact has its own file and to standard error otherwise.
//! `--report` additionally writes the JSON report to a file. The exit code is
//! `0` when every check passes, `1` when some check fails (the failures are
//! printed to standard error as JSON) and `2` on unusable input.

use crate::abel_jacobi::{
    check_local_embedding, check_tautness_labeled, cut_long_edges, embed_trees, immersion_svg,
    lattice_defect_report, path_pair_report, potentials_csv, torus_immersion, tree_positions_csv,
    CutForest, TorusLayout, TreeVertex, SCALE,
};
use crate::error::{Error, Result};
use crate::family::{
    euler_along_path, face_compatibility_check, family_cocycle_path, lerp, SimplexFamily,
};
use crate::graph::{parse_metric_graph, validate_length_function, validate_shape, Graph, LengthFunction};
use crate::period::PeriodData;
use crate::report::{Check, Report};
use crate::thickening::{sublevel_region, GridConfig};
use crate::verify::{period_suite, region_suite, verify_suite, VerifyConfig};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Graph shape and length function reports.
    Validate,
    /// Canonical cocycle values per half-edge.
    Cocycle,
    /// Immersion into the Jacobian torus.
    Embed,
    /// Decomposition into cut trees in good coordinates.
    Cut,
    /// Sublevel region of the thickening field on the torus (rank 2).
    Thicken,
    /// The full check suite.
    Verify,
    /// Sweep over a simplex of length functions given by a collapse chain.
    Family,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "abeljac", version, about = "Abel-Jacobi immersions of metric graphs and their thickenings")]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Graph JSON (family JSON for `family`).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Artifact destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Additional destination for the JSON report.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Destination for the sampled field grid of `thicken`.
    #[arg(long, global = true)]
    pub field_dump: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0.05)]
    pub grid_h: f64,
    /// Key Lemma sample count; the other sampled checks use a tenth of it.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = crate::TOL_STRUCTURAL)]
    pub tol_structural: f64,
    #[arg(long, global = true, default_value_t = crate::TOL_GEOMETRIC)]
    pub tol_geometric: f64,
    /// Require valence at least three and no separating edges.
    #[arg(long, global = true)]
    pub require_gr0: bool,
}

impl CommandConfig {
    /// A configuration with default flags for `command` reading `input`.
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        CommandConfig {
            command,
            input: Some(input.into()),
            out: None,
            format: None,
            report: None,
            field_dump: None,
            grid_h: 0.05,
            samples: 100_000,
            seed: 0,
            tol_structural: crate::TOL_STRUCTURAL,
            tol_geometric: crate::TOL_GEOMETRIC,
            require_gr0: false,
        }
    }

    pub fn verify_config(&self) -> VerifyConfig {
        let tenth = (self.samples / 10).max(10);
        VerifyConfig {
            seed: self.seed,
            key_lemma_samples: self.samples,
            gradient_points: tenth,
            formula_points: tenth,
            leaf_points: (tenth / 5).max(10),
            grid_h: self.grid_h,
            tol_structural: self.tol_structural,
            tol_geometric: self.tol_geometric,
            ..VerifyConfig::default()
        }
    }

    fn grid(&self) -> GridConfig {
        GridConfig { h: self.grid_h, ..GridConfig::default() }
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifact: String,
    pub report: Report,
    /// Extra files to write, as `(path, contents)`.
    pub side_files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn new(artifact: String, report: Report) -> Self {
        Outcome { artifact, report, side_files: Vec::new() }
    }
}

fn read_input(config: &CommandConfig) -> Result<String> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| Error::Parse("missing --input".into()))?;
    Ok(std::fs::read_to_string(path)?)
}

fn load_graph(config: &CommandConfig) -> Result<(Graph, LengthFunction)> {
    parse_metric_graph(&read_input(config)?)
}

fn unsupported(config: &CommandConfig, format: Format) -> Error {
    Error::Parse(format!("{:?} does not produce {:?} output", config.command, format))
}

fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports always serialize") + "\n"
}

fn precondition_report(g: &Graph, l: &LengthFunction, config: &CommandConfig) -> Report {
    let mut r = validate_shape(g, config.require_gr0, config.require_gr0).report;
    r.extend(validate_length_function(g, l));
    r
}

fn run_validate(config: &CommandConfig) -> Result<Outcome> {
    let (g, l) = load_graph(config)?;
    match config.format.unwrap_or(Format::Json) {
        Format::Json => {}
        f => return Err(unsupported(config, f)),
    }
    let r = precondition_report(&g, &l, config);
    Ok(Outcome::new(report_json(&r), r))
}

fn run_cocycle(config: &CommandConfig) -> Result<Outcome> {
    let (g, l) = load_graph(config)?;
    let mut r = precondition_report(&g, &l, config);
    if !r.passed() {
        return Ok(Outcome::new(String::new(), r));
    }
    let data = PeriodData::compute(&g, &l, 0)?;
    r.extend(period_suite(&g, &l, &data, &config.verify_config()));
    let artifact = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => data.omega.to_csv(),
        Format::Json => {
            let values: Vec<_> = (0..g.num_half_edges())
                .map(|h| json!({"half_edge": g.half_edge_label(h), "omega": data.omega.value(h)}))
                .collect();
            serde_json::to_string_pretty(&json!({"rank": data.rank(), "values": values}))? + "\n"
        }
        f => return Err(unsupported(config, f)),
    };
    Ok(Outcome::new(artifact, r))
}

fn run_embed(config: &CommandConfig) -> Result<Outcome> {
    let (g, l) = load_graph(config)?;
    let mut r = precondition_report(&g, &l, config);
    if !r.passed() {
        return Ok(Outcome::new(String::new(), r));
    }
    let im = torus_immersion(&g, &l, 0)?;
    r.extend(lattice_defect_report(&g, &im));
    r.extend(check_local_embedding(&g, &im).report);
    let default = if im.rank() == 2 { Format::Svg } else { Format::Csv };
    let artifact = match config.format.unwrap_or(default) {
        Format::Svg => immersion_svg(&g, &im)?,
        Format::Csv => potentials_csv(&g, &im),
        f => return Err(unsupported(config, f)),
    };
    Ok(Outcome::new(artifact, r))
}

fn layout_for(g: &Graph, l: &LengthFunction) -> Result<(CutForest, TorusLayout)> {
    let im = torus_immersion(g, l, 0)?;
    let forest = cut_long_edges(g, l)?;
    let layout = embed_trees(g, &forest, &im, SCALE)?;
    Ok((forest, layout))
}

/// JSON description of the cut trees and their gluings.
pub fn layout_json(g: &Graph, forest: &CutForest, layout: &TorusLayout) -> serde_json::Value {
    let trees: Vec<_> = layout
        .trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let vertices: Vec<_> = (0..t.num_vertices())
                .map(|v| {
                    let kind = match t.labels[v] {
                        TreeVertex::Graph(_) => "vertex",
                        TreeVertex::Leaf(_) => "leaf",
                        TreeVertex::Free(_) => "free",
                    };
                    json!({"label": t.vertex_label(Some(g), v), "kind": kind, "position": t.global_position(v)})
                })
                .collect();
            json!({
                "base": g.vertex_name(forest.trees[i].base()),
                "edges": t.edges,
                "vertices": vertices,
            })
        })
        .collect();
    let gluings: Vec<_> = layout
        .gluings
        .iter()
        .map(|gl| {
            json!({
                "edge": g.edge_name(gl.edge),
                "forward": [gl.a.0, gl.a.1],
                "reverse": [gl.b.0, gl.b.1],
                "shift_cycles": gl.shift_cycles,
            })
        })
        .collect();
    let lattice: Vec<Vec<f64>> = (0..layout.lattice.cols()).map(|j| layout.lattice.column(j)).collect();
    json!({
        "scale": layout.scale,
        "cut_edges": forest.cut_edges().iter().map(|&e| g.edge_name(e)).collect::<Vec<_>>(),
        "lattice": lattice,
        "trees": trees,
        "gluings": gluings,
    })
}

fn run_cut(config: &CommandConfig) -> Result<Outcome> {
    let (g, l) = load_graph(config)?;
    let mut r = precondition_report(&g, &l, config);
    if !r.passed() {
        return Ok(Outcome::new(String::new(), r));
    }
    let (forest, layout) = layout_for(&g, &l)?;
    for (i, t) in layout.trees.iter().enumerate() {
        for mut c in check_tautness_labeled(t, Some(&g)).checks {
            c.check = format!("tree{i}.{}", c.check);
            r.push(c);
        }
    }
    r.push(path_pair_report(&g, &layout));
    r.push(Check::at_most("cut_tree.gluing", layout.gluing_mismatch(), config.tol_geometric, None));
    let artifact = match config.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&layout_json(&g, &forest, &layout))? + "\n",
        Format::Csv => tree_positions_csv(&g, &layout),
        f => return Err(unsupported(config, f)),
    };
    Ok(Outcome::new(artifact, r))
}

fn run_thicken(config: &CommandConfig) -> Result<Outcome> {
    let (g, l) = load_graph(config)?;
    let r = precondition_report(&g, &l, config);
    if !r.passed() {
        return Ok(Outcome::new(String::new(), r));
    }
    let (_, layout) = layout_for(&g, &l)?;
    let region = sublevel_region(&layout, config.grid())?;
    let mut r = r;
    r.extend(region_suite(&layout, &config.verify_config())?);
    let artifact = match config.format.unwrap_or(Format::Svg) {
        Format::Svg => region.svg(),
        Format::Csv => region.boundary_csv(),
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "euler_characteristic": region.euler_characteristic,
                "grid": [region.nx, region.ny],
                "h": region.h,
                "level": region.level,
                "inside_nodes": region.inside_nodes,
                "boundary_curves": region.polylines.len(),
                "min_boundary_gradient": region.min_boundary_gradient,
            }))? + "\n"
        }
    };
    let mut out = Outcome::new(artifact, r);
    if let Some(p) = &config.field_dump {
        out.side_files.push((p.clone(), region.field_csv()));
    }
    Ok(out)
}

fn run_verify(config: &CommandConfig) -> Result<Outcome> {
    let (g, l) = load_graph(config)?;
    let mut r = precondition_report(&g, &l, config);
    if !r.passed() {
        return Ok(Outcome::new(report_json(&r), r));
    }
    r.extend(verify_suite(&g, &l, &config.verify_config())?);
    match config.format.unwrap_or(Format::Json) {
        Format::Json => Ok(Outcome::new(report_json(&r), r)),
        f => Err(unsupported(config, f)),
    }
}

/// Endpoints of the default sweep: from near vertex `0` of the simplex to
/// near its last vertex, staying off the faces.
pub fn default_family_path(fam: &SimplexFamily) -> (Vec<f64>, Vec<f64>) {
    let k = fam.dim();
    let bary = vec![1.0 / (k + 1) as f64; k + 1];
    let corner = |i: usize| -> Vec<f64> {
        let e: Vec<f64> = (0..=k).map(|j| if j == i { 1.0 } else { 0.0 }).collect();
        lerp(&e, &bary, 0.1)
    };
    (corner(0), corner(k))
}

/// Smoothness and face checks along the default sweep.
pub fn family_report(fam: &SimplexFamily, grid: GridConfig) -> Result<(Report, String)> {
    let (a, b) = default_family_path(fam);
    let path = family_cocycle_path(fam, &a, &b, 5, 1e-3)?;
    let mut r = path.report.clone();
    for face in 0..=fam.dim() {
        for mut c in face_compatibility_check(fam, face)?.checks {
            c.check = format!("face{face}.{}", c.check);
            r.push(c);
        }
    }
    if fam.layout(&a)?.rank() == 2 {
        let chis = euler_along_path(fam, &a, &b, 5, grid)?;
        let first = chis[0].1;
        let bad = chis.iter().find(|(_, c)| *c != first);
        r.push(Check::boolean(
            "family.euler_constant",
            bad.is_none(),
            bad.map(|(s, c)| format!("s={s} chi={c}")),
        ));
    }
    Ok((r, path.to_csv()))
}

fn run_family(config: &CommandConfig) -> Result<Outcome> {
    let fam = SimplexFamily::from_json(&read_input(config)?)?;
    let (r, csv) = family_report(&fam, config.grid())?;
    let artifact = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => csv,
        Format::Json => report_json(&r),
        f => return Err(unsupported(config, f)),
    };
    Ok(Outcome::new(artifact, r))
}

/// Runs the subcommand without touching the file system beyond `--input`.
pub fn execute(config: &CommandConfig) -> Result<Outcome> {
    match config.command {
        Command::Validate => run_validate(config),
        Command::Cocycle => run_cocycle(config),
        Command::Embed => run_embed(config),
        Command::Cut => run_cut(config),
        Command::Thicken => run_thicken(config),
        Command::Verify => run_verify(config),
        Command::Family => run_family(config),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn summary(report: &Report) -> String {
    let failed = report.failures().count();
    format!("{report}{} checks, {} failed\n", report.checks.len(), failed)
}

/// Runs `config`, writes artifacts and returns the process exit code.
pub fn run(config: &CommandConfig) -> i32 {
    let outcome = match execute(config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}", json!({"error": e.to_string()}));
            return 2;
        }
    };
    let io = (|| -> Result<()> {
        let text = summary(&outcome.report);
        match &config.out {
            Some(p) => {
                write_file(p, &outcome.artifact)?;
                print!("{text}");
            }
            None => {
                std::io::stdout().write_all(outcome.artifact.as_bytes())?;
                eprint!("{text}");
            }
        }
        if let Some(p) = &config.report {
            write_file(p, &report_json(&outcome.report))?;
        }
        for (p, contents) in &outcome.side_files {
            write_file(p, contents)?;
        }
        Ok(())
    })();
    if let Err(e) = io {
        eprintln!("{}", json!({"error": e.to_string()}));
        return 2;
    }
    if outcome.report.passed() {
        0
    } else {
        let failures: Vec<_> = outcome.report.failures().cloned().collect();
        eprintln!("{}", json!({ "failures": failures }));
        1
    }
}
