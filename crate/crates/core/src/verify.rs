//! Checks of the structure theory on computed control sets: the subgroups
//! `W(S)` and `C(S)`, the count of control sets on `K`, fibers over flag control
//! sets, translation by `M`, fixed-point typing, and the factorization of
//! conjugated unipotent groups.

use std::collections::{BTreeMap, BTreeSet};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::control::{anchor_chamber, core_lookup, typed_hits};
use crate::engine::{enumerate_words, ControlSetRecord, GeneratorSet, Label, ReachGraph, Space};
use crate::error::{Error, Result};
use crate::linalg::{regular_split_decompose, Matrix, REGULARITY_TOL};
use crate::weyl::{
    check_subgroup, conjugate_c_by_w, enumerate_m, enumerate_mstar, enumerate_w, FiniteGroupElement, SignVector, SignedPermutation,
    WeylElement,
};

/// A number in a report: counts are exact, errors are real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Int(i64),
    Real(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_tag: String,
    pub passed: bool,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub details: String,
}

impl VerificationReport {
    fn exact(tag: &str, lhs: usize, rhs: usize, details: String) -> Self {
        Self { theorem_tag: tag.into(), passed: lhs == rhs, lhs: Quantity::Int(lhs as i64), rhs: Quantity::Int(rhs as i64), details }
    }

    /// Passes when `value <= bound`.
    fn bounded(tag: &str, value: f64, bound: f64, details: String) -> Self {
        Self { theorem_tag: tag.into(), passed: value <= bound, lhs: Quantity::Real(value), rhs: Quantity::Real(bound), details }
    }
}

/// Allowed mismatch fraction for set comparisons.
pub const MISMATCH_TOL: f64 = 0.01;

fn identity_label(space: Space, n: usize) -> Label {
    match space {
        Space::K => Label::U(SignedPermutation::identity(n)),
        Space::Flag | Space::Proj => Label::W(WeylElement::identity(n)),
    }
}

fn record_with<'a>(records: &'a [ControlSetRecord], label: &Label) -> Option<&'a ControlSetRecord> {
    records.iter().find(|r| r.has_label(label))
}

/// `W(S)`: the types carried by the flag control set of the identity type.
pub fn compute_ws(flag_records: &[ControlSetRecord], n: usize) -> Result<Vec<WeylElement>> {
    let home = record_with(flag_records, &identity_label(Space::Flag, n))
        .ok_or_else(|| Error::NotASubgroup("no flag control set carries the identity type".into()))?;
    if !home.invariant {
        return Err(Error::NotASubgroup(format!("control set {} of the identity type is not invariant", home.id)));
    }
    let ws: Vec<WeylElement> = home
        .labels
        .iter()
        .filter_map(|l| match l {
            Label::W(w) => Some(w.clone()),
            Label::U(_) => None,
        })
        .collect();
    check_subgroup(&ws, &enumerate_w(n))?;
    Ok(ws)
}

/// `{m ∈ M : core · m = core}` for one `K` record, exactly on the lifted graph.
pub fn stabilizer(record: &ControlSetRecord, graph: &ReachGraph) -> Vec<SignVector> {
    let core: BTreeSet<u32> = record.core_indices.iter().copied().collect();
    graph
        .cloud()
        .m_elements()
        .iter()
        .enumerate()
        .filter(|&(a, _)| core.iter().all(|&v| core.contains(&(graph.translate_node(v as usize, a) as u32))))
        .map(|(_, m)| m.clone())
        .collect()
}

/// `C(S)`: the stabilizer of the `K` control set of the identity type. Every
/// invariant record must give the same group.
pub fn compute_cs(k_records: &[ControlSetRecord], graph: &ReachGraph) -> Result<Vec<SignVector>> {
    let n = graph.cloud().n;
    let anchor = record_with(k_records, &identity_label(Space::K, n))
        .ok_or_else(|| Error::NotASubgroup("no control set on K carries the identity type".into()))?;
    let cs = stabilizer(anchor, graph);
    check_subgroup(&cs, &enumerate_m(n))?;
    if let Some(r) = k_records.iter().filter(|r| r.invariant).find(|r| stabilizer(r, graph) != cs) {
        return Err(Error::NotASubgroup(format!("invariant control sets {} and {} have different stabilizers", anchor.id, r.id)));
    }
    Ok(cs)
}

/// `C(S, w)`: the stabilizer of the `K` control set containing the fixed points of type `lift(w)`.
pub fn compute_csw(k_records: &[ControlSetRecord], graph: &ReachGraph, w: &WeylElement) -> Result<Vec<SignVector>> {
    let rec = record_with(k_records, &Label::U(w.lift()))
        .ok_or_else(|| Error::NotASubgroup(format!("no control set on K carries the type of {w:?}")))?;
    let csw = stabilizer(rec, graph);
    check_subgroup(&csw, &enumerate_m(w.n()))?;
    Ok(csw)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// The number of control sets on `K` against `|C(S)\C| · |W(S)\W|`.
pub fn verify_counting(
    k_records: &[ControlSetRecord],
    flag_records: &[ControlSetRecord],
    cs: &[SignVector],
    ws: &[WeylElement],
    n: usize,
) -> VerificationReport {
    let m = 1usize << (n - 1);
    let (c_index, w_index) = (m / cs.len().max(1), factorial(n) / ws.len().max(1));
    VerificationReport::exact(
        "counting",
        k_records.len(),
        c_index * w_index,
        format!(
            "{} control sets on K, {} on the flag manifold; |C(S)| = {}, |W(S)| = {}, {} x {}",
            k_records.len(),
            flag_records.len(),
            cs.len(),
            ws.len(),
            c_index,
            w_index
        ),
    )
}

fn same_base(k_graph: &ReachGraph, flag_graph: &ReachGraph) -> Result<()> {
    let (a, b) = (k_graph.cloud(), flag_graph.cloud());
    if a.space != Space::K || b.space != Space::Flag || a.n != b.n || a.base() != b.base() {
        return Err(Error::Dimension("the flag cloud must be the projection of the K cloud".into()));
    }
    Ok(())
}

/// For each flag control set `ℂ`: the `K` points over its core are the union of
/// the `M`-translates of one `K` core, and `|C(S,w)\C|` control sets lie over it.
pub fn verify_fiber_unions(
    k_graph: &ReachGraph,
    k_records: &[ControlSetRecord],
    flag_graph: &ReachGraph,
    flag_records: &[ControlSetRecord],
) -> Result<VerificationReport> {
    same_base(k_graph, flag_graph)?;
    let b = k_graph.cloud().base_len();
    let mc = k_graph.cloud().m_elements().len();
    let mut worst = 0.0f64;
    let mut count_failures = Vec::new();
    let mut lines = Vec::new();
    for f in flag_records {
        let core: BTreeSet<usize> = f.core_indices.iter().map(|&v| v as usize).collect();
        let over: Vec<&ControlSetRecord> = k_records
            .iter()
            .filter(|r| {
                let inside = r.core_indices.iter().filter(|&&v| core.contains(&(v as usize % b))).count();
                2 * inside > r.core_indices.len()
            })
            .collect();
        let Some(first) = over.first() else {
            count_failures.push(format!("no control set on K over flag set {}", f.id));
            continue;
        };
        let union: BTreeSet<usize> = first
            .core_indices
            .iter()
            .flat_map(|&v| (0..mc).map(move |a| k_graph.translate_node(v as usize, a)))
            .collect();
        let fiber: BTreeSet<usize> = core.iter().flat_map(|&i| (0..mc).map(move |a| a * b + i)).collect();
        let mismatch = union.symmetric_difference(&fiber).count() as f64 / fiber.len().max(1) as f64;
        worst = worst.max(mismatch);
        let expected = match f.labels.iter().find_map(|l| if let Label::W(w) = l { Some(w) } else { None }) {
            Some(w) => mc / compute_csw(k_records, k_graph, w)?.len(),
            None => {
                count_failures.push(format!("flag set {} has no label", f.id));
                continue;
            }
        };
        if over.len() != expected {
            count_failures.push(format!("{} control sets over flag set {}, expected {}", over.len(), f.id, expected));
        }
        let ids: Vec<usize> = over.iter().map(|r| r.id).collect();
        lines.push(format!("flag {} <- K {:?} (mismatch {:.4})", f.id, ids, mismatch));
    }
    let mut report = VerificationReport::bounded("fiber-unions", worst, MISMATCH_TOL, lines.join("; "));
    if !count_failures.is_empty() {
        report.passed = false;
        report.details = format!("{}; {}", report.details, count_failures.join("; "));
    }
    Ok(report)
}

/// `C(S, w) = w⁻¹ C(S) w` for every type `w` carried by a flag control set.
pub fn verify_conjugacy_csw(
    k_records: &[ControlSetRecord],
    k_graph: &ReachGraph,
    cs: &[SignVector],
) -> Result<VerificationReport> {
    let n = k_graph.cloud().n;
    let mut bad = Vec::new();
    let ws = enumerate_w(n);
    for w in &ws {
        let csw: BTreeSet<SignVector> = compute_csw(k_records, k_graph, w)?.into_iter().collect();
        let winv = w.inverse();
        let predicted: BTreeSet<SignVector> = cs.iter().map(|c| conjugate_c_by_w(&winv, c)).collect();
        if csw != predicted {
            bad.push(format!("w = {w:?}: C(S,w) = {csw:?}, conjugate = {predicted:?}"));
        }
    }
    let agree = ws.len() - bad.len();
    let details = if bad.is_empty() { format!("all {} types agree", ws.len()) } else { bad.join("; ") };
    Ok(VerificationReport::exact("conjugacy-csw", agree, ws.len(), details))
}

/// Right translation by every `m ∈ M` maps each `K` core onto another core, and
/// carries the types `u` of a record to `u m`.
pub fn verify_translation_covariance(k_records: &[ControlSetRecord], k_graph: &ReachGraph) -> VerificationReport {
    let core_of = core_lookup(k_records, k_graph.node_count());
    let ms = k_graph.cloud().m_elements();
    let mut worst = 0.0f64;
    let mut label_errors = 0usize;
    for r in k_records {
        for (a, m) in ms.iter().enumerate() {
            let moved: Vec<usize> = r.core_indices.iter().map(|&v| k_graph.translate_node(v as usize, a)).collect();
            let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
            moved.iter().filter_map(|&v| core_of[v]).for_each(|t| *votes.entry(t).or_default() += 1);
            let Some((&target, _)) = votes.iter().max_by_key(|&(_, c)| *c) else {
                worst = 1.0;
                continue;
            };
            let image: BTreeSet<usize> = moved.into_iter().collect();
            let other: BTreeSet<usize> = k_records[target].core_indices.iter().map(|&v| v as usize).collect();
            let mismatch = image.symmetric_difference(&other).count() as f64 / other.len().max(1) as f64;
            worst = worst.max(mismatch);
            let mp = m.as_signed_permutation();
            let expected: BTreeSet<Label> = r
                .labels
                .iter()
                .filter_map(|l| if let Label::U(u) = l { Some(Label::U(u.compose(&mp))) } else { None })
                .collect();
            let got: BTreeSet<Label> = k_records[target].labels.iter().cloned().collect();
            if expected != got {
                label_errors += 1;
            }
        }
    }
    let mut report = VerificationReport::bounded(
        "translation-covariance",
        worst,
        MISMATCH_TOL,
        format!("largest core mismatch {worst:.4}; {label_errors} label mismatches"),
    );
    report.passed &= label_errors == 0;
    report
}

/// The image of each `K` core under `π` lies in a single flag core.
pub fn verify_projection_cores(
    k_graph: &ReachGraph,
    k_records: &[ControlSetRecord],
    flag_graph: &ReachGraph,
    flag_records: &[ControlSetRecord],
) -> Result<VerificationReport> {
    same_base(k_graph, flag_graph)?;
    let b = k_graph.cloud().base_len();
    let flag_core = core_lookup(flag_records, flag_graph.node_count());
    let mut worst = 0.0f64;
    for r in k_records {
        let mut votes: BTreeMap<Option<usize>, usize> = BTreeMap::new();
        r.core_indices.iter().for_each(|&v| *votes.entry(flag_core[v as usize % b]).or_default() += 1);
        let best = votes.iter().filter(|(k, _)| k.is_some()).map(|(_, &c)| c).max().unwrap_or(0);
        worst = worst.max(1.0 - best as f64 / r.core_indices.len().max(1) as f64);
    }
    Ok(VerificationReport::bounded(
        "projection-cores",
        worst,
        MISMATCH_TOL,
        format!("largest fraction of a K core outside its flag core {worst:.4}"),
    ))
}

/// Factors `ν ∈ u N u⁻¹` as `ν⁻ ν⁺` with unit lower and unit upper triangular
/// factors (Doolittle).
pub fn lower_upper(nu: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = nu.dim();
    let mut l = Matrix::identity(n);
    let mut u = Matrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            u[(i, j)] = nu[(i, j)] - (0..i).map(|k| l[(i, k)] * u[(k, j)]).sum::<f64>();
        }
        if u[(i, i)].abs() < 1e-12 {
            return Err(Error::Factorization(format!("zero pivot at {i}")));
        }
        for j in i + 1..n {
            l[(j, i)] = (nu[(j, i)] - (0..i).map(|k| l[(j, k)] * u[(k, i)]).sum::<f64>()) / u[(i, i)];
        }
    }
    Ok((l, u))
}

/// Positions `(i, j)`, `i ≠ j`, where elements of `u N u⁻¹` may be nonzero.
pub fn nu_pattern(u: &SignedPermutation) -> Vec<(usize, usize)> {
    let p = u.weyl().perm();
    let n = p.len();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| i != j && p[i] < p[j]).collect()
}

/// Random elements of `u N u⁻¹` factor into their lower and upper parts, each
/// again in `u N u⁻¹`.
pub fn verify_nu_decomposition(u: &SignedPermutation, samples: usize, seed: u64) -> Result<VerificationReport> {
    let n = u.n();
    let um = u.matrix();
    let uinv = um.transpose();
    let allowed: BTreeSet<(usize, usize)> = nu_pattern(u).into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut recon, mut pattern) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let mut upper = Matrix::identity(n);
        for i in 0..n {
            for j in i + 1..n {
                upper[(i, j)] = rng.random_range(-2.0..=2.0);
            }
        }
        let nu = &(&um * &upper) * &uinv;
        let (lo, hi) = lower_upper(&nu)?;
        let scale = nu.max_abs().max(1.0);
        recon = recon.max((&lo * &hi).distance(&nu) / scale);
        for (i, j) in (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| i != j) {
            let entry = if i > j { lo[(i, j)] } else { hi[(i, j)] };
            if !allowed.contains(&(i, j)) {
                pattern = pattern.max(entry.abs() / scale);
            }
        }
    }
    let mut report = VerificationReport::bounded(
        "nu-decomposition",
        recon,
        1e-10,
        format!("u = {u:?}, {samples} samples, largest entry outside the pattern {pattern:e}"),
    );
    report.passed &= pattern <= 1e-12;
    Ok(report)
}

/// Options for the fixed-point check.
#[derive(Clone, Debug)]
pub struct FixedPointCheck {
    pub trials: usize,
    pub seed: u64,
    /// Also check that every core point away from the boundary is near a fixed
    /// point of its type, over all regular words up to the graph depth.
    pub converse: bool,
}

/// Typed fixed points of random regular words land in the cores carrying their type.
pub fn verify_transitivity_fixed_points(
    graph: &ReachGraph,
    records: &[ControlSetRecord],
    gens: &GeneratorSet,
    check: &FixedPointCheck,
) -> Result<VerificationReport> {
    let n = graph.cloud().n;
    let anchor = record_with(records, &identity_label(graph.space(), n))
        .map(|r| r.id)
        .ok_or_else(|| Error::Factorization("records are not labeled".into()))?;
    let owner: BTreeMap<Label, usize> =
        records.iter().flat_map(|r| r.labels.iter().map(move |l| (l.clone(), r.id))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut counterexamples = Vec::new();
    let mut points = 0usize;
    let max_len = graph.word_depth.max(2);
    let mut attempts = 0usize;
    while seen.len() < check.trials && attempts < 1000 * check.trials.max(1) && !gens.is_empty() {
        attempts += 1;
        let len = rng.random_range(1..=max_len);
        let letters: Vec<u8> = (0..len).map(|_| rng.random_range(0..gens.len()) as u8).collect();
        if seen.contains(&letters) {
            continue;
        }
        let h = letters.iter().skip(1).fold(gens.gens[letters[0] as usize].clone(), |acc, &l| acc.compose(&gens.gens[l as usize]));
        let Ok(chamber) = regular_split_decompose(&h, REGULARITY_TOL) else { continue };
        seen.insert(letters.clone());
        let chamber = match anchor_chamber(graph, records, anchor, &chamber) {
            Ok(c) => c,
            Err(e) => {
                counterexamples.push(format!("word {letters:?}: {e}"));
                continue;
            }
        };
        let mut per_record: BTreeMap<usize, usize> = BTreeMap::new();
        for (label, hit) in typed_hits(graph, records, &h, &chamber)? {
            points += 1;
            if hit.is_some() && hit == owner.get(&label).copied() {
                *per_record.entry(hit.unwrap_or(0)).or_default() += 1;
            } else {
                counterexamples.push(format!("word {letters:?}: type {label:?} landed in {hit:?}"));
            }
        }
        if let Some(r) = records.iter().find(|r| per_record.get(&r.id).copied().unwrap_or(0) != r.labels.len()) {
            counterexamples.push(format!("word {letters:?}: control set {} received {:?} points", r.id, per_record.get(&r.id)));
        }
    }
    if seen.len() < check.trials {
        counterexamples.push(format!("only {} regular words found", seen.len()));
    }
    let mut details = format!("{} words, {} typed fixed points", seen.len(), points);
    if check.converse {
        let missed = converse_misses(graph, records, gens, anchor)?;
        details = format!("{details}; {} interior core points far from fixed points of their type", missed.len());
        counterexamples.extend(missed.into_iter().take(20).map(|v| format!("core point {v} not near a fixed point")));
    }
    if !counterexamples.is_empty() {
        details = format!("{details}; {}", counterexamples.iter().take(10).cloned().collect::<Vec<_>>().join("; "));
    }
    Ok(VerificationReport::exact("transitivity-fixed-points", counterexamples.len(), 0, details))
}

/// Core nodes outside a `2ε` collar of their core's boundary that are not
/// within ε of any fixed point of a matching type, over all regular words.
fn converse_misses(
    graph: &ReachGraph,
    records: &[ControlSetRecord],
    gens: &GeneratorSet,
    anchor: usize,
) -> Result<Vec<usize>> {
    let core_of = core_lookup(records, graph.node_count());
    let mut covered = vec![false; graph.node_count()];
    let n = graph.cloud().n;
    let labels: Vec<Label> = match graph.space() {
        Space::K => enumerate_mstar(n).into_iter().map(Label::U).collect(),
        Space::Flag => enumerate_w(n).into_iter().map(Label::W).collect(),
        Space::Proj => (0..n).map(|j| Label::W(WeylElement::transposition(n, 0, j))).collect(),
    };
    for w in enumerate_words(gens, graph.word_depth) {
        let Ok(chamber) = regular_split_decompose(&w.element, REGULARITY_TOL) else { continue };
        let Ok(chamber) = anchor_chamber(graph, records, anchor, &chamber) else { continue };
        for label in &labels {
            let probe = probe_of_label(graph, &chamber, label)?;
            for v in graph.nodes_within(&probe) {
                if core_of[v].is_some_and(|r| records[r].has_label(label)) {
                    covered[v] = true;
                }
            }
        }
    }
    let interior = |v: usize| {
        let r = core_of[v];
        graph.neighbours(v).all(|u| graph.neighbours(u).all(|x| core_of[x] == r))
    };
    Ok((0..graph.node_count()).filter(|&v| core_of[v].is_some() && !covered[v] && interior(v)).collect())
}

fn probe_of_label(
    graph: &ReachGraph,
    chamber: &crate::linalg::RegularSplit,
    label: &Label,
) -> Result<crate::engine::index::Probe> {
    let g = chamber.conjugator.matrix();
    Ok(match (graph.space(), label) {
        (Space::K, Label::U(u)) => graph.probe_rotation(crate::k_action::typed_point_on_k(g, u)?.matrix()),
        (Space::Flag, Label::W(w)) => graph.probe_rotation(&crate::linalg::kappa(&(g * &w.lift().matrix()))?),
        (Space::Proj, Label::W(w)) => {
            let j = (0..w.n()).find(|&i| w.image(i) == 0).unwrap_or(0);
            crate::engine::index::Probe::for_vector(&g.column(j))
        }
        _ => return Err(Error::Dimension(format!("label {label:?} does not match the space"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_type_needs_no_lower_part() {
        let r = verify_nu_decomposition(&SignedPermutation::identity(3), 50, 1).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn swap_in_the_plane_is_all_lower() {
        let u = WeylElement::transposition(2, 0, 1).lift();
        assert_eq!(nu_pattern(&u), vec![(1, 0)]);
        let nu = Matrix::from_rows(&[vec![1.0, 0.0], vec![-0.7, 1.0]]).unwrap();
        let (lo, hi) = lower_upper(&nu).unwrap();
        assert!(lo.distance(&nu) < 1e-15);
        assert!(hi.distance(&Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn every_type_factors() {
        for n in [2, 3] {
            for u in enumerate_mstar(n) {
                let r = verify_nu_decomposition(&u, 100, 7).unwrap();
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn counting_arithmetic() {
        let cs = vec![SignVector::identity(3), SignVector::new(&[1, -1, -1]).unwrap()];
        let ws = vec![WeylElement::identity(3), WeylElement::transposition(3, 1, 2)];
        let r = verify_counting(&[], &[], &cs, &ws, 3);
        assert_eq!(r.rhs, Quantity::Int(6));
        assert!(!r.passed);
    }
}
