//! Control sets read off a reachability graph.
//!
//! Cores are the strongly connected components with at least two nodes, plus
//! single nodes with a self-loop and no other way out. A record's members are its
//! core together with the points that the core ε-reaches and that ε-return to it.
//! A record is invariant when its core reaches no other core.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::csr::Csr;
use petgraph::Directed;
use serde::{Deserialize, Serialize};

use super::cloud::Space;
use super::graph::{enumerate_words, ReachGraph};
use super::presets::GeneratorSet;
use crate::error::{Error, Result};
use crate::flag::{flag_fixed_points_of_conjugator, proj_fixed_points_of_conjugator};
use crate::k_action::typed_point_on_k;
use crate::linalg::{regular_split_decompose, GroupElement, RegularSplit};
use crate::weyl::{enumerate_m, enumerate_mstar, SignedPermutation, WeylElement};

/// The type of a fixed point: an element of `M*` on `K`, of `W` on flags and lines.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    U(SignedPermutation),
    W(WeylElement),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSetRecord {
    pub id: usize,
    pub space: Space,
    pub member_indices: Vec<u32>,
    pub core_indices: Vec<u32>,
    pub invariant: bool,
    pub labels: Vec<Label>,
    pub order_rank: usize,
}

impl ControlSetRecord {
    pub fn size(&self) -> usize {
        self.member_indices.len()
    }

    pub fn core_size(&self) -> usize {
        self.core_indices.len()
    }

    pub fn has_label(&self, label: &Label) -> bool {
        self.labels.contains(label)
    }
}

/// Strongly connected components, in reverse topological order.
pub(crate) fn strong_components(graph: &ReachGraph) -> Vec<Vec<u32>> {
    let n = graph.node_count();
    let edges: Vec<(u32, u32)> = graph.edges().collect();
    // Tarjan's algorithm recurses once per node on a path.
    let stack = (n * 512).max(16 << 20);
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(stack)
            .spawn_scoped(s, || {
                let mut csr: Csr<(), (), Directed, u32> = Csr::from_sorted_edges(&edges).expect("edges are sorted");
                while csr.node_count() < n {
                    csr.add_node(());
                }
                tarjan_scc(&csr)
            })
            .expect("spawn scc thread")
            .join()
            .expect("scc thread panicked")
    })
}

fn reach_from(graph: &ReachGraph, start: &[u32]) -> Vec<bool> {
    let mut seen = vec![false; graph.node_count()];
    let mut stack: Vec<u32> = start.to_vec();
    start.iter().for_each(|&v| seen[v as usize] = true);
    while let Some(v) = stack.pop() {
        for &t in graph.successors(v as usize) {
            if !seen[t as usize] {
                seen[t as usize] = true;
                stack.push(t);
            }
        }
    }
    seen
}

fn cores(graph: &ReachGraph) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = strong_components(graph)
        .into_iter()
        .filter(|c| match c.as_slice() {
            [v] => graph.successors(*v as usize) == [*v],
            _ => true,
        })
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    out.sort();
    out
}

/// Control sets of the graph, with invariance and order rank filled in and no
/// labels yet.
pub fn find_control_sets(graph: &ReachGraph) -> Result<Vec<ControlSetRecord>> {
    let cores = cores(graph);
    let n = graph.node_count();
    let mut core_of = vec![usize::MAX; n];
    for (c, core) in cores.iter().enumerate() {
        core.iter().for_each(|&v| core_of[v as usize] = c);
    }
    let reverse = graph.adjacency().reversed();
    let mut owner = core_of.clone();
    let mut members: Vec<Vec<u32>> = cores.clone();
    for (c, core) in cores.iter().enumerate() {
        let reach = reach_from(graph, core);
        let fattened = fatten(graph, &reach);
        let core_mask: Vec<bool> = (0..n).map(|v| core_of[v] == c).collect();
        let target = fatten(graph, &core_mask);
        let returns = reach_backward(&reverse, &target);
        for v in 0..n {
            if owner[v] == usize::MAX && fattened[v] && returns[v] {
                owner[v] = c;
                members[c].push(v as u32);
            }
        }
    }
    members.iter_mut().for_each(|m| m.sort_unstable());

    let mut records: Vec<ControlSetRecord> = cores
        .into_iter()
        .zip(members)
        .map(|(core_indices, member_indices)| ControlSetRecord {
            id: 0,
            space: graph.space(),
            member_indices,
            core_indices,
            invariant: false,
            labels: Vec::new(),
            order_rank: 0,
        })
        .collect();
    records.sort_by_key(|r| r.member_indices.first().copied());
    records.iter_mut().enumerate().for_each(|(i, r)| r.id = i);

    let order = order_control_sets(&records, graph)?;
    for r in records.iter_mut() {
        r.invariant = !order.iter().any(|&(a, _)| a == r.id);
    }
    let ranks = order_ranks(records.len(), &order);
    records.iter_mut().zip(ranks).for_each(|(r, k)| r.order_rank = k);
    Ok(records)
}

fn fatten(graph: &ReachGraph, set: &[bool]) -> Vec<bool> {
    let mut out = set.to_vec();
    for v in (0..set.len()).filter(|&v| set[v]) {
        graph.neighbours(v).for_each(|u| out[u] = true);
    }
    out
}

fn reach_backward(reverse: &super::graph::Adjacency, target: &[bool]) -> Vec<bool> {
    let mut seen = target.to_vec();
    let mut stack: Vec<u32> = (0..target.len()).filter(|&v| target[v]).map(|v| v as u32).collect();
    while let Some(v) = stack.pop() {
        for &t in reverse.get(v as usize) {
            if !seen[t as usize] {
                seen[t as usize] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Whether the core of `record` reaches no other record's core.
pub fn classify_invariant(record: &ControlSetRecord, records: &[ControlSetRecord], graph: &ReachGraph) -> bool {
    let reach = reach_from(graph, &record.core_indices);
    records
        .iter()
        .filter(|r| r.id != record.id)
        .all(|r| r.core_indices.iter().all(|&v| !reach[v as usize]))
}

/// Pairs `(a, b)` of record ids with `a ≤ b`: some core point of `a` reaches the
/// core of `b`. The relation is transitive because reachability is.
pub fn order_control_sets(records: &[ControlSetRecord], graph: &ReachGraph) -> Result<Vec<(usize, usize)>> {
    let reaches: Vec<Vec<bool>> = records.iter().map(|r| reach_from(graph, &r.core_indices)).collect();
    let hits = |a: usize, b: usize| records[b].core_indices.iter().any(|&v| reaches[a][v as usize]);
    let mut pairs = Vec::new();
    for a in 0..records.len() {
        for b in (0..records.len()).filter(|&b| b != a && hits(a, b)) {
            if hits(b, a) {
                return Err(Error::Cycle { a: records[a].id, b: records[b].id });
            }
            pairs.push((records[a].id, records[b].id));
        }
    }
    Ok(pairs)
}

/// Length of the longest chain below each record.
fn order_ranks(count: usize, order: &[(usize, usize)]) -> Vec<usize> {
    let mut rank = vec![0; count];
    // The order is acyclic, so `count` relaxation rounds suffice.
    for _ in 0..count {
        let mut changed = false;
        for &(a, b) in order {
            if rank[b] < rank[a] + 1 {
                rank[b] = rank[a] + 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    rank
}

/// The regular element used for labeling and its chamber, translated by `M` so
/// that the identity type lands in the anchor record.
#[derive(Clone, Debug, Serialize)]
pub struct Labeling {
    pub word: Vec<u8>,
    pub element: GroupElement,
    pub chamber: RegularSplit,
    pub anchor: usize,
}

/// The first word, breadth-first, whose product is regular with positive spectrum.
pub fn find_regular_word(gens: &GeneratorSet, depth: usize, tol: f64) -> Result<(Vec<u8>, GroupElement, RegularSplit)> {
    enumerate_words(gens, depth)
        .into_iter()
        .find_map(|w| regular_split_decompose(&w.element, tol).ok().map(|s| (w.letters, w.element, s)))
        .ok_or(Error::NoRegularElement { depth })
}

/// The record whose core contains the node nearest to a probe within ε, or
/// failing that any core node within ε.
fn record_near(graph: &ReachGraph, core_of: &[Option<usize>], probe: &super::index::Probe) -> Option<usize> {
    if let Some((v, d)) = graph.nearest_node(probe) {
        if d <= graph.base_epsilon() {
            if let Some(r) = core_of[v] {
                return Some(r);
            }
        }
    }
    graph.nodes_within(probe).into_iter().find_map(|v| core_of[v])
}

pub(crate) fn core_lookup(records: &[ControlSetRecord], nodes: usize) -> Vec<Option<usize>> {
    let mut core_of = vec![None; nodes];
    for (i, r) in records.iter().enumerate() {
        r.core_indices.iter().for_each(|&v| core_of[v as usize] = Some(i));
    }
    core_of
}

/// Translates the conjugator of `chamber` by the first `c ∈ M` whose fixed point
/// `κ(g c)` lies in the core of `records[anchor]`.
pub(crate) fn anchor_chamber(
    graph: &ReachGraph,
    records: &[ControlSetRecord],
    anchor: usize,
    chamber: &RegularSplit,
) -> Result<RegularSplit> {
    if graph.space() != Space::K {
        return Ok(chamber.clone());
    }
    let core_of = core_lookup(records, graph.node_count());
    let g = chamber.conjugator.matrix();
    for c in enumerate_m(graph.dim()) {
        let p = typed_point_on_k(g, &c.as_signed_permutation())?;
        if record_near(graph, &core_of, &graph.probe_rotation(p.matrix())) == Some(anchor) {
            let conjugator = GroupElement::new(g.mul_diag(&c.as_f64()))?;
            return Ok(RegularSplit { conjugator, logs: chamber.logs.clone() });
        }
    }
    Err(Error::Factorization(format!("no attracting fixed point lands in control set {anchor}")))
}

/// Typed fixed points of a chamber, each with the record whose core it hits.
pub(crate) fn typed_hits(
    graph: &ReachGraph,
    records: &[ControlSetRecord],
    h: &GroupElement,
    chamber: &RegularSplit,
) -> Result<Vec<(Label, Option<usize>)>> {
    let core_of = core_lookup(records, graph.node_count());
    let g = chamber.conjugator.matrix();
    let near = |rot: &crate::linalg::Matrix| record_near(graph, &core_of, &graph.probe_rotation(rot));
    match graph.space() {
        Space::K => enumerate_mstar(graph.dim())
            .into_iter()
            .map(|u| {
                let p = typed_point_on_k(g, &u)?;
                Ok((Label::U(u), near(p.matrix())))
            })
            .collect(),
        Space::Flag => Ok(flag_fixed_points_of_conjugator(h, g)?
            .into_iter()
            .map(|(w, f)| (Label::W(w), near(f.representative())))
            .collect()),
        Space::Proj => Ok(proj_fixed_points_of_conjugator(g)
            .into_iter()
            .map(|(w, p)| {
                let probe = super::index::Probe::for_vector(p.dir());
                (Label::W(w), record_near(graph, &core_of, &probe))
            })
            .collect()),
    }
}

/// Labels every record by the types of the fixed points of a regular word that
/// land in its core. The anchor is the first invariant record.
pub fn label_control_sets(
    records: &mut [ControlSetRecord],
    graph: &ReachGraph,
    gens: &GeneratorSet,
    tol: f64,
) -> Result<Labeling> {
    let (word, element, chamber) = find_regular_word(gens, graph.word_depth, tol)?;
    let mut anchored = None;
    for r in records.iter().filter(|r| r.invariant) {
        match anchor_chamber(graph, records, r.id, &chamber) {
            Ok(c) => {
                anchored = Some((r.id, c));
                break;
            }
            Err(Error::Factorization(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let (anchor, chamber) = anchored.ok_or_else(|| {
        Error::Factorization("no invariant control set contains an attracting fixed point".into())
    })?;
    let hits = typed_hits(graph, records, &element, &chamber)?;
    records.iter_mut().for_each(|r| r.labels.clear());
    for (label, hit) in hits {
        match hit {
            Some(r) => records[r].labels.push(label),
            None => log::warn!("fixed point of type {label:?} is not within ε of any core"),
        }
    }
    records.iter_mut().for_each(|r| r.labels.sort());
    Ok(Labeling { word, element, chamber, anchor })
}

/// Drops records that received no label and renumbers the rest.
///
/// The transitivity set of every control set contains a typed fixed point of
/// each regular element of the semigroup interior, so an unlabeled core is an
/// artifact of the discretization. Invariance and ranks are recomputed over the
/// remaining records; the returned labeling has its anchor renumbered.
pub fn prune_unlabeled(
    records: Vec<ControlSetRecord>,
    labeling: Labeling,
    graph: &ReachGraph,
) -> Result<(Vec<ControlSetRecord>, Labeling)> {
    let dropped = unlabeled(&records);
    if dropped.is_empty() {
        return Ok((records, labeling));
    }
    log::info!("dropping {} unlabeled control sets", dropped.len());
    let mut kept: Vec<ControlSetRecord> = records.into_iter().filter(|r| !dropped.contains(&r.id)).collect();
    let anchor = kept.iter().position(|r| r.id == labeling.anchor).ok_or_else(|| {
        Error::Factorization("the anchor control set has no label".into())
    })?;
    kept.iter_mut().enumerate().for_each(|(i, r)| r.id = i);
    let order = order_control_sets(&kept, graph)?;
    for r in kept.iter_mut() {
        r.invariant = !order.iter().any(|&(a, _)| a == r.id);
    }
    let ranks = order_ranks(kept.len(), &order);
    kept.iter_mut().zip(ranks).for_each(|(r, k)| r.order_rank = k);
    Ok((kept, Labeling { anchor, ..labeling }))
}

/// Finds, labels and prunes the control sets of a graph. A graph without
/// control sets yields no labeling.
pub fn analyze_control_sets(
    graph: &ReachGraph,
    gens: &GeneratorSet,
    tol: f64,
) -> Result<(Vec<ControlSetRecord>, Option<Labeling>)> {
    let mut records = find_control_sets(graph)?;
    if records.is_empty() {
        return Ok((records, None));
    }
    let labeling = label_control_sets(&mut records, graph, gens, tol)?;
    let (records, labeling) = prune_unlabeled(records, labeling, graph)?;
    Ok((records, Some(labeling)))
}

/// Ids of records that received no label.
pub fn unlabeled(records: &[ControlSetRecord]) -> BTreeSet<usize> {
    records.iter().filter(|r| r.labels.is_empty()).map(|r| r.id).collect()
}
