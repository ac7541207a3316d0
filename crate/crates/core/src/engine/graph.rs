//! The ε-reachability graph of a semigroup on a sample cloud.
//!
//! Edges are computed on the base points (flags, or lines) and carry an `M`
//! voltage; the `K` graph is the lift of the base graph along those voltages, so
//! it commutes with right translation by `M` and projects onto the flag graph.
//!
//! For each base point and each generator word `w` up to the word depth, the
//! image `w·x` is matched against the cloud: short words connect to every point
//! within ε, longer words to the nearest point only. Edges are also added
//! backwards, from the points whose `w⁻¹`-images land near `x`.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cloud::{SampleCloud, Space};
use super::index::{quaternion_of, BaseIndex, Probe};
use super::presets::GeneratorSet;
use crate::error::{Error, Result};
use crate::linalg::{kappa, GroupElement, Matrix};

/// Default ε as a multiple of the cloud dispersion.
pub const EPSILON_FACTOR: f64 = 1.5;

/// Default word depth: 8 for `n = 2`, 6 otherwise.
pub fn default_word_depth(n: usize) -> usize {
    if n == 2 {
        8
    } else {
        6
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphOptions {
    /// Matching radius in the metric of the space; defaults to
    /// `EPSILON_FACTOR` times the dispersion.
    pub epsilon: Option<f64>,
    pub word_depth: usize,
    /// Words up to this length connect to every point within ε.
    pub ball_depth: usize,
    /// Whether to add the edges found from inverse images.
    pub backward: bool,
}

impl GraphOptions {
    pub fn new(word_depth: usize) -> Self {
        Self { epsilon: None, word_depth, ball_depth: 1, backward: true }
    }

    pub fn with_epsilon(mut self, epsilon: Option<f64>) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// A generator word and its product.
#[derive(Clone, Debug)]
pub struct Word {
    pub letters: Vec<u8>,
    pub element: GroupElement,
}

/// All words of length `1..=depth`, breadth-first, each letter order
/// following the generator order.
pub fn enumerate_words(gens: &GeneratorSet, depth: usize) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut layer: Vec<Word> = vec![];
    for len in 1..=depth {
        layer = if len == 1 {
            gens.gens
                .iter()
                .enumerate()
                .map(|(i, g)| Word { letters: vec![i as u8], element: g.clone() })
                .collect()
        } else {
            layer
                .iter()
                .flat_map(|w| {
                    gens.gens.iter().enumerate().map(move |(i, g)| {
                        let mut letters = w.letters.clone();
                        letters.push(i as u8);
                        Word { letters, element: w.element.compose(g) }
                    })
                })
                .collect()
        };
        if layer.is_empty() {
            break;
        }
        out.extend(layer.iter().cloned());
    }
    out
}

/// Compressed adjacency lists.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn from_lists(lists: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for l in lists {
            targets.extend(l);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub(crate) fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub(crate) fn get(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub(crate) fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub(crate) fn reversed(&self) -> Self {
        let mut lists = vec![Vec::new(); self.len()];
        for v in 0..self.len() {
            for &t in self.get(v) {
                lists[t as usize].push(v as u32);
            }
        }
        Self::from_lists(lists)
    }
}

/// The directed graph `i → j` on the points of a cloud.
pub struct ReachGraph {
    cloud: SampleCloud,
    pub epsilon: f64,
    pub word_depth: usize,
    pub ball_depth: usize,
    base_epsilon: f64,
    index: BaseIndex,
    adjacency: Adjacency,
    /// ε-neighbourhoods of base points, as codes.
    near: Adjacency,
    m_mul: Vec<Vec<usize>>,
}

impl std::fmt::Debug for ReachGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReachGraph")
            .field("space", &self.cloud.space)
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .field("epsilon", &self.epsilon)
            .field("word_depth", &self.word_depth)
            .finish()
    }
}

fn uses_angle_for_k(cloud: &SampleCloud) -> bool {
    cloud.n == 2 && cloud.space == Space::K
}

/// Converts a radius in the metric of the space to the metric of the index.
fn to_base_metric(cloud: &SampleCloud, eps: f64) -> f64 {
    if uses_angle_for_k(cloud) {
        2.0 * (eps / (2.0 * SQRT_2)).min(1.0).asin()
    } else {
        eps
    }
}

fn from_base_metric(cloud: &SampleCloud, eps: f64) -> f64 {
    if uses_angle_for_k(cloud) {
        2.0 * SQRT_2 * (eps / 2.0).sin()
    } else {
        eps
    }
}

/// Largest nearest-neighbour distance in the cloud, in the metric of its space.
pub fn cloud_dispersion(cloud: &SampleCloud) -> f64 {
    from_base_metric(cloud, BaseIndex::new(cloud).dispersion(cloud))
}

/// Runs `f` on a pool capped by `FLAGDYN_THREADS`, if set.
pub(crate) fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var("FLAGDYN_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok());
    match cap.filter(|&c| c > 0).map(|c| rayon::ThreadPoolBuilder::new().num_threads(c).build()) {
        Some(Ok(pool)) => pool.install(f),
        _ => f(),
    }
}

/// Word matrices prepared for fast application.
enum WordTable {
    /// Row-major 2×2 entries.
    Plane(Vec<([f64; 4], usize)>),
    /// Row-major 3×3 entries, for rotations indexed by quaternions.
    Space(Vec<([f64; 9], usize)>),
    General(Vec<(Matrix, usize)>),
}

impl WordTable {
    fn new(words: Vec<(Matrix, usize)>, quat: bool) -> Self {
        if quat && words.first().is_some_and(|(w, _)| w.dim() == 3) {
            let table = words
                .into_iter()
                .map(|(w, len)| {
                    let mut a = [0.0; 9];
                    a.copy_from_slice(w.as_slice());
                    (a, len)
                })
                .collect();
            WordTable::Space(table)
        } else if words.first().is_some_and(|(w, _)| w.dim() == 2) {
            let plane = words
                .into_iter()
                .map(|(w, len)| {
                    let s = w.as_slice();
                    ([s[0], s[1], s[2], s[3]], len)
                })
                .collect();
            WordTable::Plane(plane)
        } else {
            WordTable::General(words)
        }
    }
}

/// Collects distinct codes for one source point.
///
/// `stamps[c] == stamp` marks code `c` as already seen, so the buffer can be
/// reused across sources without clearing.
struct Collector<'a> {
    stamps: &'a mut [u32],
    stamp: u32,
    codes: Vec<u32>,
    ball: Vec<u32>,
}

impl Collector<'_> {
    fn add(&mut self, code: u32) {
        let slot = &mut self.stamps[code as usize];
        if *slot != self.stamp {
            *slot = self.stamp;
            self.codes.push(code);
        }
    }

    fn push_match(&mut self, index: &BaseIndex, probe: &Probe, ball: bool, eps: f64) {
        if ball {
            let mut hits = std::mem::take(&mut self.ball);
            hits.clear();
            index.within(probe, eps, &mut hits);
            hits.iter().for_each(|&c| self.add(c));
            self.ball = hits;
        } else if let Some((code, d)) = index.nearest(probe) {
            if d <= eps {
                self.add(code);
            }
        }
    }
}

/// `κ(w b)` for row-major 3×3 matrices: Gram–Schmidt on the columns, with the
/// last column completed by a cross product.
fn kappa3(w: &[f64; 9], b: &[f64; 9]) -> Result<[f64; 9]> {
    let col = |j: usize| -> [f64; 3] {
        std::array::from_fn(|i| w[3 * i] * b[j] + w[3 * i + 1] * b[3 + j] + w[3 * i + 2] * b[6 + j])
    };
    let (c0, mut c1) = (col(0), col(1));
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let n0 = dot(&c0, &c0).sqrt();
    if n0 <= 1e-14 {
        return Err(Error::NumericalRank { index: 0, value: n0 });
    }
    let q0 = c0.map(|x| x / n0);
    let p = dot(&q0, &c1);
    c1.iter_mut().zip(&q0).for_each(|(x, q)| *x -= p * q);
    let n1 = dot(&c1, &c1).sqrt();
    if n1 <= 1e-14 {
        return Err(Error::NumericalRank { index: 1, value: n1 });
    }
    let q1 = c1.map(|x| x / n1);
    let q2 = [q0[1] * q1[2] - q0[2] * q1[1], q0[2] * q1[0] - q0[0] * q1[2], q0[0] * q1[1] - q0[1] * q1[0]];
    Ok([q0[0], q1[0], q2[0], q0[1], q1[1], q2[1], q0[2], q1[2], q2[2]])
}

#[allow(clippy::too_many_arguments)]
fn matches_of(
    index: &BaseIndex,
    space: Space,
    words: &WordTable,
    base: &Matrix,
    eps: f64,
    ball_depth: usize,
    stamps: &mut [u32],
    stamp: u32,
) -> Result<Vec<u32>> {
    let mut out = Collector { stamps, stamp, codes: Vec::new(), ball: Vec::new() };
    match words {
        WordTable::Plane(ws) => {
            let (c, s) = (base[(0, 0)], base[(1, 0)]);
            // On the grid every direction is within half a spacing of a point, so
            // when that is inside the radius only the nearest index is needed.
            let grid = index.circle_bins().filter(|&b| eps >= 0.5 * std::f64::consts::PI / b as f64);
            for (w, len) in ws {
                let (x, y) = (w[0] * c + w[1] * s, w[2] * c + w[3] * s);
                if let Some(b) = grid.filter(|_| *len > ball_depth) {
                    out.add(index.circle_nearest_code(b, x, y));
                    continue;
                }
                let phi = y.atan2(x);
                let probe = Probe::Angle(if phi < 0.0 { phi + std::f64::consts::TAU } else { phi });
                out.push_match(index, &probe, *len <= ball_depth, eps);
            }
        }
        WordTable::Space(ws) => {
            let mut b = [0.0; 9];
            b.copy_from_slice(base.as_slice());
            for (w, len) in ws {
                let q = quaternion_of(&kappa3(w, &b)?);
                if *len <= ball_depth {
                    let mut hits = std::mem::take(&mut out.ball);
                    hits.clear();
                    index.quat_within(&q, eps, &mut hits);
                    hits.iter().for_each(|&c| out.add(c));
                    out.ball = hits;
                } else if let Some((code, d)) = index.quat_nearest(&q) {
                    if d <= eps {
                        out.add(code);
                    }
                }
            }
        }
        WordTable::General(ws) => {
            let first = base.column(0);
            for (w, len) in ws {
                let probe = if space == Space::Proj {
                    Probe::for_vector(&w.mul_vec(&first))
                } else {
                    Probe::Rotation(kappa(&(w * base))?)
                };
                out.push_match(index, &probe, *len <= ball_depth, eps);
            }
        }
    }
    let mut codes = out.codes;
    codes.sort_unstable();
    Ok(codes)
}

/// Builds the reachability graph of `gens` on `cloud`.
pub fn build_reach_graph(gens: &GeneratorSet, cloud: SampleCloud, opts: &GraphOptions) -> Result<ReachGraph> {
    if opts.word_depth == 0 {
        return Err(Error::Dimension("word depth must be at least 1".into()));
    }
    if let Some(d) = gens.dim().filter(|&d| d != cloud.n) {
        return Err(Error::Dimension(format!("generators are {d}x{d} but the cloud is for n = {}", cloud.n)));
    }
    let index = BaseIndex::new(&cloud);
    let base_epsilon = match opts.epsilon {
        Some(e) if e > 0.0 && e.is_finite() => to_base_metric(&cloud, e),
        Some(e) => return Err(Error::Dimension(format!("epsilon must be positive, got {e}"))),
        None => EPSILON_FACTOR * index.dispersion(&cloud),
    };
    let epsilon = from_base_metric(&cloud, base_epsilon);
    let mc = index.m_count();
    let b = cloud.base_len();
    let space = cloud.space;

    let words = enumerate_words(gens, opts.word_depth);
    let quat = index.is_quat();
    let forward = WordTable::new(words.iter().map(|w| (w.element.matrix().clone(), w.letters.len())).collect(), quat);
    let backward = WordTable::new(if opts.backward {
        words
            .iter()
            .map(|w| Ok((w.element.inverse()?.into_matrix(), w.letters.len())))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    }, quat);

    let base = cloud.base();
    let (mut lists, back_lists, near_lists) = with_thread_cap(|| -> Result<_> {
        let pass = |words: &WordTable| {
            (0..b)
                .into_par_iter()
                .map_init(
                    || vec![0u32; b * mc],
                    |stamps, i| matches_of(&index, space, words, &base[i], base_epsilon, opts.ball_depth, stamps, i as u32 + 1),
                )
                .collect::<Result<Vec<_>>>()
        };
        let fwd = pass(&forward)?;
        let bwd = pass(&backward)?;
        let near = (0..b)
            .into_par_iter()
            .map(|i| {
                let mut codes = Vec::new();
                index.within(&Probe::for_rotation(space, &base[i]), base_epsilon, &mut codes);
                codes.sort_unstable();
                codes.dedup();
                codes
            })
            .collect::<Vec<_>>();
        Ok((fwd, bwd, near))
    })?;

    // κ(w⁻¹ x_j) ≈ x_i m means x_j ≈ κ(w x_i) m, an edge i → j with the same voltage.
    for (j, codes) in back_lists.into_iter().enumerate() {
        for c in codes {
            let (i, m) = (c as usize / mc, c as usize % mc);
            lists[i].push((j * mc + m) as u32);
        }
    }
    lists.iter_mut().for_each(|l| {
        l.sort_unstable();
        l.dedup();
    });

    let ms = cloud.m_elements();
    let m_mul: Vec<Vec<usize>> = ms
        .iter()
        .map(|x| {
            ms.iter()
                .map(|y| ms.iter().position(|z| z.mask() == x.mask() ^ y.mask()).expect("M is a group"))
                .collect()
        })
        .collect();

    let adjacency = if space == Space::K {
        let lifted = (0..mc).flat_map(|a| {
            let (lists, m_mul) = (&lists, &m_mul);
            (0..b).map(move |i| {
                let mut t: Vec<u32> = lists[i]
                    .iter()
                    .map(|&c| {
                        let (j, m) = (c as usize / mc, c as usize % mc);
                        (m_mul[m][a] * b + j) as u32
                    })
                    .collect();
                t.sort_unstable();
                t.dedup();
                t
            })
        });
        Adjacency::from_lists(lifted)
    } else {
        Adjacency::from_lists(lists.iter().map(|l| {
            let mut t: Vec<u32> = l.iter().map(|&c| c / mc as u32).collect();
            t.dedup();
            t
        }))
    };

    let graph = ReachGraph {
        cloud,
        epsilon,
        word_depth: opts.word_depth,
        ball_depth: opts.ball_depth,
        base_epsilon,
        index,
        adjacency,
        near: Adjacency::from_lists(near_lists),
        m_mul,
    };
    let n_nodes = graph.node_count();
    if n_nodes > 0 && !gens.is_empty() && (graph.edge_count() as f64) < n_nodes as f64 {
        log::warn!("sparse reachability graph: {} edges on {} nodes", graph.edge_count(), n_nodes);
    }
    log::info!("{graph:?}");
    Ok(graph)
}

impl ReachGraph {
    /// The graph on the flag manifold of the projected cloud, read off this `K`
    /// graph by forgetting voltages. It equals [`build_reach_graph`] on
    /// [`flag_cloud_of`](super::cloud::flag_cloud_of) with the same base radius.
    pub fn project_to_flag(&self) -> Result<ReachGraph> {
        if self.cloud.space != Space::K {
            return Err(Error::UnsupportedSpace(format!("{} graphs have no flag projection", self.cloud.space)));
        }
        let cloud = super::cloud::flag_cloud_of(&self.cloud);
        let b = cloud.base_len();
        let adjacency = Adjacency::from_lists((0..b).map(|i| {
            let mut t: Vec<u32> = self.successors(i).iter().map(|&v| v % b as u32).collect();
            t.sort_unstable();
            t.dedup();
            t
        }));
        Ok(ReachGraph {
            epsilon: from_base_metric(&cloud, self.base_epsilon),
            word_depth: self.word_depth,
            ball_depth: self.ball_depth,
            base_epsilon: self.base_epsilon,
            index: BaseIndex::new(&cloud),
            adjacency,
            near: self.near.clone(),
            m_mul: self.m_mul.clone(),
            cloud,
        })
    }

    pub fn cloud(&self) -> &SampleCloud {
        &self.cloud
    }

    pub fn space(&self) -> Space {
        self.cloud.space
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.edge_count()
    }

    pub fn successors(&self, v: usize) -> &[u32] {
        self.adjacency.get(v)
    }

    /// All edges in increasing `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.node_count()).flat_map(move |v| self.successors(v).iter().map(move |&t| (v as u32, t)))
    }

    pub(crate) fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    fn node_of_code(&self, code: u32, a: usize) -> usize {
        let mc = self.index.m_count();
        let (j, m) = (code as usize / mc, code as usize % mc);
        match self.cloud.space {
            Space::K => self.m_mul[m][a] * self.cloud.base_len() + j,
            Space::Flag | Space::Proj => j,
        }
    }

    /// Nodes within ε of node `v`, itself included.
    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, a) = self.cloud.split_index(v);
        self.near.get(i).iter().map(move |&c| self.node_of_code(c, a))
    }

    /// The probe for a rotation in `K` (or a flag representative).
    pub(crate) fn probe_rotation(&self, rot: &Matrix) -> Probe {
        Probe::for_rotation(self.cloud.space, rot)
    }

    /// The nearest node to `probe` and its distance in the index metric.
    pub(crate) fn nearest_node(&self, probe: &Probe) -> Option<(usize, f64)> {
        self.index.nearest(probe).map(|(c, d)| (self.node_of_code(c, 0), d))
    }

    /// Nodes within ε of `probe`.
    pub(crate) fn nodes_within(&self, probe: &Probe) -> Vec<usize> {
        let mut codes = Vec::new();
        self.index.within(probe, self.base_epsilon, &mut codes);
        let mut nodes: Vec<usize> = codes.into_iter().map(|c| self.node_of_code(c, 0)).collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    pub(crate) fn base_epsilon(&self) -> f64 {
        self.base_epsilon
    }

    /// The node of `x · m_a` for the point `x` at node `v`. Only `K` nodes move.
    pub fn translate_node(&self, v: usize, a: usize) -> usize {
        match self.cloud.space {
            Space::K => {
                let (i, c) = self.cloud.split_index(v);
                self.m_mul[c][a] * self.cloud.base_len() + i
            }
            Space::Flag | Space::Proj => v,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.index.n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::cloud::{flag_cloud_of, sample_space};
    use crate::engine::presets::slplus2;

    #[test]
    fn flag_projection_matches_a_direct_build() {
        for (n, count, depth) in [(2, 180, 4), (3, 300, 3)] {
            let gens = if n == 2 { slplus2().unwrap() } else { crate::engine::presets::slplus3().unwrap() };
            let k = build_reach_graph(&gens, sample_space(Space::K, n, count, 4).unwrap(), &GraphOptions::new(depth)).unwrap();
            let direct = build_reach_graph(&gens, flag_cloud_of(k.cloud()), &GraphOptions::new(depth)).unwrap();
            let projected = k.project_to_flag().unwrap();
            assert_eq!(projected.edges().collect::<Vec<_>>(), direct.edges().collect::<Vec<_>>());
            assert_eq!(projected.space(), Space::Flag);
        }
    }

    #[test]
    fn word_counts() {
        let g = slplus2().unwrap();
        let words = enumerate_words(&g, 3);
        assert_eq!(words.len(), 4 + 16 + 64);
        assert_eq!(words[4].letters, vec![0, 0]);
        assert_eq!(words[5].letters, vec![0, 1]);
        let prod = words[5].element.matrix();
        let expect = g.gens[0].matrix() * g.gens[1].matrix();
        assert!(prod.distance(&expect) < 1e-12);
    }

    #[test]
    fn empty_generators_give_no_edges() {
        let cloud = sample_space(Space::Proj, 2, 90, 0).unwrap();
        let graph = build_reach_graph(&GeneratorSet::empty("none"), cloud, &GraphOptions::new(3)).unwrap();
        assert_eq!(graph.edge_count(), 0);
        assert_eq!(graph.node_count(), 90);
    }

    #[test]
    fn identity_gives_self_loops_without_balls() {
        let gens = GeneratorSet::new(vec![GroupElement::identity(3)], "id").unwrap();
        for space in [Space::K, Space::Flag, Space::Proj] {
            let cloud = sample_space(space, 3, 200, 4).unwrap();
            let opts = GraphOptions { ball_depth: 0, ..GraphOptions::new(2) };
            let graph = build_reach_graph(&gens, cloud, &opts).unwrap();
            assert_eq!(graph.edge_count(), graph.node_count());
            assert!(graph.edges().all(|(s, t)| s == t));
        }
    }

    #[test]
    fn k_graph_commutes_with_translation() {
        let gens = crate::engine::presets::slplus3().unwrap();
        let cloud = sample_space(Space::K, 3, 300, 1).unwrap();
        let graph = build_reach_graph(&gens, cloud, &GraphOptions::new(2)).unwrap();
        for a in 0..4 {
            for v in 0..graph.node_count() {
                let moved = graph.translate_node(v, a);
                let lhs: std::collections::BTreeSet<usize> =
                    graph.successors(v).iter().map(|&t| graph.translate_node(t as usize, a)).collect();
                let rhs: Vec<usize> = graph.successors(moved).iter().map(|&t| t as usize).collect();
                assert_eq!(lhs.into_iter().collect::<Vec<_>>(), rhs);
            }
        }
    }

    #[test]
    fn edges_follow_the_angle_map() {
        // Oracle: the image of the line at angle θ under g is atan2 of g·(cos θ, sin θ).
        let gens = GeneratorSet::new(
            vec![
                GroupElement::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap(),
                GroupElement::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap(),
            ],
            "two",
        )
        .unwrap();
        let cloud = sample_space(Space::Proj, 2, 180, 0).unwrap();
        let opts = GraphOptions { ball_depth: 0, backward: false, ..GraphOptions::new(1) };
        let graph = build_reach_graph(&gens, cloud, &opts).unwrap();
        let h = std::f64::consts::PI / 180.0;
        for i in 0..180 {
            let theta = i as f64 * h;
            let mut expect: Vec<u32> = gens
                .gens
                .iter()
                .map(|g| {
                    let v = g.matrix().mul_vec(&[theta.cos(), theta.sin()]);
                    let phi = v[1].atan2(v[0]).rem_euclid(std::f64::consts::PI);
                    ((phi / h).round() as u32) % 180
                })
                .collect();
            expect.sort_unstable();
            expect.dedup();
            assert_eq!(graph.successors(i), expect.as_slice());
        }
    }
}
