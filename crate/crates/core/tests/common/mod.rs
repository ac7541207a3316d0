//! Shared builders and geometric oracles for the engine tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use flagdyn_core::engine::{analyze_control_sets, flag_cloud_of, Labeling};
use flagdyn_core::*;

pub const TOL: f64 = 1e-6;

pub struct Analysis {
    pub graph: ReachGraph,
    pub records: Vec<ControlSetRecord>,
    pub labeling: Option<Labeling>,
}

pub fn analyze(gens: &GeneratorSet, cloud: SampleCloud, depth: usize) -> Analysis {
    let graph = build_reach_graph(gens, cloud, &GraphOptions::new(depth)).unwrap();
    from_graph(gens, graph)
}

pub fn from_graph(gens: &GeneratorSet, graph: ReachGraph) -> Analysis {
    let (records, labeling) = analyze_control_sets(&graph, gens, TOL).unwrap();
    Analysis { graph, records, labeling }
}

pub fn sl2_proj(count: usize) -> Analysis {
    analyze(&Preset::Slplus2.generators(2).unwrap(), sample_space(Space::Proj, 2, count, 0).unwrap(), 8)
}

pub fn sl2_k(count: usize) -> Analysis {
    analyze(&Preset::Slplus2.generators(2).unwrap(), sample_space(Space::K, 2, count, 0).unwrap(), 8)
}

/// The flag analysis over the cloud of a `K` analysis.
pub fn flag_over(gens: &GeneratorSet, k: &Analysis, derived: bool) -> Analysis {
    let graph = if derived {
        k.graph.project_to_flag().unwrap()
    } else {
        build_reach_graph(gens, flag_cloud_of(k.graph.cloud()), &GraphOptions::new(k.graph.word_depth)).unwrap()
    };
    from_graph(gens, graph)
}

/// Angle of point `idx` on the circle: in `[0, π)` for lines, `[0, 2π)` for rotations.
pub fn angle(cloud: &SampleCloud, idx: usize) -> f64 {
    match cloud.space {
        Space::K => {
            let r = cloud.rotation(idx);
            r[(1, 0)].atan2(r[(0, 0)]).rem_euclid(TAU)
        }
        Space::Flag | Space::Proj => cloud.proj_point(idx).angle(),
    }
}

/// Angle subtended by distance `d` in the metric of the space (chordal for lines,
/// Frobenius for plane rotations).
pub fn angle_of_distance(space: Space, d: f64) -> f64 {
    let chord = match space {
        Space::K => d / 2f64.sqrt(),
        Space::Flag | Space::Proj => d,
    };
    2.0 * (chord / 2.0).min(1.0).asin()
}

fn arc_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// Points of `record` outside the arc `[lo, lo + PI/2]` widened by `collar`, plus
/// points of the arc shrunk by `collar` missing from `record`.
pub fn quarter_arc_violations(graph: &ReachGraph, record: &ControlSetRecord, lo: f64, collar: f64) -> usize {
    let cloud = graph.cloud();
    let period = if cloud.space == Space::K { TAU } else { PI };
    let mid = lo + PI / 4.0;
    let members: std::collections::BTreeSet<u32> = record.member_indices.iter().copied().collect();
    (0..cloud.len())
        .filter(|&i| {
            let d = arc_distance(angle(cloud, i), mid, period);
            let inside = members.contains(&(i as u32));
            (inside && d > PI / 4.0 + collar) || (!inside && d < PI / 4.0 - collar)
        })
        .count()
}

/// The record carrying `label`.
pub fn carrying<'a>(records: &'a [ControlSetRecord], label: &Label) -> &'a ControlSetRecord {
    records.iter().find(|r| r.labels.contains(label)).unwrap_or_else(|| panic!("no record carries {label:?}"))
}

pub fn u_label(perm: &[usize], signs: &[i8]) -> Label {
    Label::U(SignedPermutation::new(WeylElement::from_perm(perm).unwrap(), signs).unwrap())
}

pub fn invariant_count(records: &[ControlSetRecord]) -> usize {
    records.iter().filter(|r| r.invariant).count()
}
