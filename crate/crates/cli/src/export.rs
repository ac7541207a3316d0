//! JSON and JSON-lines output files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use flagdyn_core::engine::Labeling;
use flagdyn_core::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::run::Analysis;

#[derive(Serialize)]
struct RecordOut<'a> {
    id: usize,
    space: Space,
    size: usize,
    core_size: usize,
    invariant: bool,
    labels: &'a [Label],
    order_rank: usize,
}

#[derive(Serialize)]
struct LabelingOut<'a> {
    word: &'a [u8],
    element: &'a GroupElement,
    conjugator: &'a GroupElement,
    anchor: usize,
}

#[derive(Serialize)]
struct ControlSetsOut<'a> {
    space: Space,
    n: usize,
    generators: &'a GeneratorSet,
    cloud_count: usize,
    points: usize,
    seed: u64,
    epsilon: f64,
    word_depth: usize,
    labeling: Option<LabelingOut<'a>>,
    control_sets: Vec<RecordOut<'a>>,
    order: &'a [(usize, usize)],
}

#[derive(Serialize)]
struct PointOut {
    coords: Vec<f64>,
    control_set: Option<usize>,
    core: bool,
}

#[derive(Serialize)]
struct PointsOut {
    space: Space,
    n: usize,
    points: Vec<PointOut>,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e.into()))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

fn labeling_out(l: &Labeling) -> LabelingOut<'_> {
    LabelingOut { word: &l.word, element: &l.element, conjugator: &l.chamber.conjugator, anchor: l.anchor }
}

/// Writes the control sets, points and (optionally) edges of one analysis.
pub fn write_analysis(cfg: &RunConfig, a: &Analysis) -> Result<Vec<PathBuf>, CliError> {
    let space = a.graph.space();
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();

    let sets = ControlSetsOut {
        space,
        n: cfg.n,
        generators: &cfg.generators,
        cloud_count: a.graph.cloud().count,
        points: a.graph.node_count(),
        seed: cfg.seed,
        epsilon: a.graph.epsilon,
        word_depth: a.graph.word_depth,
        labeling: a.labeling.as_ref().map(labeling_out),
        control_sets: a
            .records
            .iter()
            .map(|r| RecordOut {
                id: r.id,
                space: r.space,
                size: r.size(),
                core_size: r.core_size(),
                invariant: r.invariant,
                labels: &r.labels,
                order_rank: r.order_rank,
            })
            .collect(),
        order: &a.order,
    };
    let path = dir.join(format!("control_sets_{space}.json"));
    write_json(&path, &sets)?;
    written.push(path);

    let cloud = a.graph.cloud();
    let mut points: Vec<PointOut> =
        (0..cloud.len()).map(|i| PointOut { coords: cloud.coordinates(i), control_set: None, core: false }).collect();
    for r in &a.records {
        r.member_indices.iter().for_each(|&v| points[v as usize].control_set = Some(r.id));
        r.core_indices.iter().for_each(|&v| points[v as usize].core = true);
    }
    let path = dir.join(format!("points_{space}.json"));
    write_json(&path, &PointsOut { space, n: cfg.n, points })?;
    written.push(path);

    if cfg.graph_export {
        let path = dir.join(format!("graph_{space}.jsonl"));
        let mut w = create(&path)?;
        a.graph
            .edges()
            .try_for_each(|(s, d)| writeln!(w, "{{\"src\":{s},\"dst\":{d}}}"))
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// One line per space, e.g. `PROJ: 2 (1 invariant); K: 4 (2 invariant)`.
pub fn summary(analyses: &[Analysis]) -> String {
    analyses
        .iter()
        .map(|a| {
            let space = a.graph.space();
            match a.records.len() {
                0 => format!("{space}: 0 control sets"),
                k => format!("{space}: {k} ({} invariant)", a.records.iter().filter(|r| r.invariant).count()),
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// A table row per control set.
pub fn table(a: &Analysis) -> Vec<String> {
    a.records
        .iter()
        .map(|r| {
            format!(
                "  {} #{}: size {}, core {}, {}, rank {}, labels {:?}",
                r.space,
                r.id,
                r.size(),
                r.core_size(),
                if r.invariant { "invariant" } else { "transient" },
                r.order_rank,
                r.labels
            )
        })
        .collect()
}
