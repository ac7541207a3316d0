//! Builds graphs and control sets for a configuration, and runs the verifiers.

use flagdyn_core::engine::{analyze_control_sets, order_control_sets, Labeling};
use flagdyn_core::verify::{self, FixedPointCheck, VerificationReport};
use flagdyn_core::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

const LABEL_TOL: f64 = REGULARITY_TOL;

pub const THEOREMS: [&str; 7] = [
    "counting",
    "fiber-unions",
    "conjugacy-csw",
    "translation-covariance",
    "projection-cores",
    "transitivity-fixed-points",
    "nu-decomposition",
];

pub struct Analysis {
    pub graph: ReachGraph,
    pub records: Vec<ControlSetRecord>,
    pub labeling: Option<Labeling>,
    pub order: Vec<(usize, usize)>,
}

fn analyze(cfg: &RunConfig, graph: ReachGraph) -> Result<Analysis, CliError> {
    let (records, labeling) = analyze_control_sets(&graph, &cfg.generators, LABEL_TOL)?;
    let order = order_control_sets(&records, &graph)?;
    Ok(Analysis { graph, records, labeling, order })
}

fn build(cfg: &RunConfig, cloud: SampleCloud) -> Result<ReachGraph, CliError> {
    let opts = GraphOptions::new(cfg.word_depth).with_epsilon(cfg.epsilon);
    Ok(build_reach_graph(&cfg.generators, cloud, &opts)?)
}

/// The `K` analysis and the flag analysis over the same base rotations.
pub fn analyze_k_and_flag(cfg: &RunConfig) -> Result<(Analysis, Analysis), CliError> {
    let k = analyze(cfg, build(cfg, sample_space(Space::K, cfg.n, cfg.cloud_count, cfg.seed)?)?)?;
    let flag = analyze(cfg, k.graph.project_to_flag()?)?;
    Ok((k, flag))
}

/// Analyses of the configured spaces, in the order of `cfg.spaces()`.
///
/// When both a flag-type space and `K` are requested, the flag cloud lies under
/// the `K` cloud. In the plane the flag manifold is the projective line, which
/// is reported as such.
pub fn analyze_spaces(cfg: &RunConfig) -> Result<Vec<Analysis>, CliError> {
    let spaces = cfg.spaces();
    if spaces.len() == 1 {
        let cloud = sample_space(spaces[0], cfg.n, cfg.cloud_count, cfg.seed)?;
        return Ok(vec![analyze(cfg, build(cfg, cloud)?)?]);
    }
    if cfg.n == 2 {
        let k = analyze(cfg, build(cfg, sample_space(Space::K, 2, cfg.cloud_count, cfg.seed)?)?)?;
        let cloud = sample_space(Space::Proj, 2, k.graph.cloud().base_len(), cfg.seed)?;
        let proj = analyze(cfg, build(cfg, cloud)?)?;
        return Ok(vec![proj, k]);
    }
    let (k, flag) = analyze_k_and_flag(cfg)?;
    Ok(vec![flag, k])
}

#[derive(Serialize)]
pub struct Subgroups {
    pub ws: Option<Vec<WeylElement>>,
    pub cs: Option<Vec<SignVector>>,
}

fn failed(tag: &str, err: impl std::fmt::Display) -> VerificationReport {
    VerificationReport {
        theorem_tag: tag.into(),
        passed: false,
        lhs: verify::Quantity::Int(0),
        rhs: verify::Quantity::Int(0),
        details: err.to_string(),
    }
}

/// Runs the requested checks. Unknown tags are rejected before any work.
pub fn run_checks(cfg: &RunConfig, tags: &[String]) -> Result<(Subgroups, Vec<VerificationReport>), CliError> {
    if let Some(bad) = tags.iter().find(|t| !THEOREMS.contains(&t.as_str())) {
        return Err(CliError::Usage(format!("unknown theorem tag {bad:?}; known tags: {}", THEOREMS.join(", "))));
    }
    let wants = |t: &str| tags.iter().any(|x| x == t);
    let mut reports = Vec::new();
    let mut subgroups = Subgroups { ws: None, cs: None };
    if tags.iter().any(|t| t != "nu-decomposition") {
        let (k, flag) = analyze_k_and_flag(cfg)?;
        let ws = verify::compute_ws(&flag.records, cfg.n);
        let cs = verify::compute_cs(&k.records, &k.graph);
        subgroups = Subgroups { ws: ws.as_ref().ok().cloned(), cs: cs.as_ref().ok().cloned() };
        let subgroup_error = ws.as_ref().err().or(cs.as_ref().err());
        for tag in THEOREMS.iter().filter(|t| wants(t)) {
            let report = match (*tag, &ws, &cs) {
                ("counting", Ok(ws), Ok(cs)) => verify::verify_counting(&k.records, &flag.records, cs, ws, cfg.n),
                ("conjugacy-csw", _, Ok(cs)) => verify::verify_conjugacy_csw(&k.records, &k.graph, cs)
                    .unwrap_or_else(|e| failed(tag, e)),
                ("counting" | "conjugacy-csw", _, _) => {
                    failed(tag, subgroup_error.map(|e| e.to_string()).unwrap_or_default())
                }
                ("fiber-unions", _, _) => {
                    verify::verify_fiber_unions(&k.graph, &k.records, &flag.graph, &flag.records)
                        .unwrap_or_else(|e| failed(tag, e))
                }
                ("translation-covariance", _, _) => verify::verify_translation_covariance(&k.records, &k.graph),
                ("projection-cores", _, _) => {
                    verify::verify_projection_cores(&k.graph, &k.records, &flag.graph, &flag.records)
                        .unwrap_or_else(|e| failed(tag, e))
                }
                ("transitivity-fixed-points", _, _) => {
                    let check = if cfg.n == 2 {
                        FixedPointCheck { trials: 50, seed: cfg.seed, converse: true }
                    } else {
                        FixedPointCheck { trials: 20, seed: cfg.seed, converse: false }
                    };
                    verify::verify_transitivity_fixed_points(&k.graph, &k.records, &cfg.generators, &check)
                        .unwrap_or_else(|e| failed(tag, e))
                }
                _ => continue,
            };
            reports.push(report);
        }
    }
    if wants("nu-decomposition") {
        for u in enumerate_mstar(cfg.n) {
            reports.push(verify::verify_nu_decomposition(&u, 100, cfg.seed)?);
        }
    }
    Ok((subgroups, reports))
}
