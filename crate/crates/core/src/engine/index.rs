//! Nearest-neighbour search over the base points of a cloud.
//!
//! Every match is reported as a code `j·|M| + a`: base point `j` together with
//! the element `m_a` for which `base[j] · m_a` is the matching rotation. The flag
//! and projective graphs drop the `M` part; the `K` graph uses it as a voltage.
//!
//! Distances are in the base metric: the angle on `ℙ¹` for `n = 2`, the
//! Frobenius distance between rotations for flags, and the chordal distance
//! `min(|u − v|, |u + v|)` for lines.

use std::f64::consts::{PI, SQRT_2};
use std::num::NonZero;

use kiddo::{ImmutableKdTree, SquaredEuclidean};

use super::cloud::{SampleCloud, Space};
use crate::linalg::Matrix;

/// A point to look up.
#[derive(Clone, Debug)]
pub(crate) enum Probe {
    /// Angle in `[0, 2π)` of the first column of a plane rotation.
    Angle(f64),
    Rotation(Matrix),
    Line([f64; 4]),
}

impl Probe {
    /// The probe for a rotation, shaped for the given space.
    pub(crate) fn for_rotation(space: Space, rot: &Matrix) -> Self {
        match (rot.dim(), space) {
            (2, _) => Probe::Angle(rot[(1, 0)].atan2(rot[(0, 0)]).rem_euclid(2.0 * PI)),
            (_, Space::Proj) => Probe::for_vector(&rot.column(0)),
            _ => Probe::Rotation(rot.clone()),
        }
    }

    /// The probe for a (not necessarily unit) vector spanning a line.
    pub(crate) fn for_vector(v: &[f64]) -> Self {
        if v.len() == 2 {
            return Probe::Angle(v[1].atan2(v[0]).rem_euclid(2.0 * PI));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut out = [0.0; 4];
        out.iter_mut().zip(v).for_each(|(o, x)| *o = x / norm);
        Probe::Line(out)
    }
}

enum Kind {
    Circle { b: usize },
    Quat { tree: ImmutableKdTree<f64, 4>, tags: Vec<u32> },
    Flat { tree: ImmutableKdTree<f64, 16>, tags: Vec<u32> },
    Line3 { tree: ImmutableKdTree<f64, 3>, tags: Vec<u32> },
    Line4 { tree: ImmutableKdTree<f64, 4>, tags: Vec<u32> },
}

pub(crate) struct BaseIndex {
    kind: Kind,
    m_count: usize,
    n: usize,
}

/// Bound on the error of [`fast_atan2`], with a wide safety margin.
const FAST_ATAN_ERR: f64 = 1e-4;

/// Polynomial `atan2` in `[0, 2π)`, accurate to about `1e-5`.
fn fast_atan2(y: f64, x: f64) -> f64 {
    let (ax, ay) = (x.abs(), y.abs());
    let (lo, hi) = if ax > ay { (ay, ax) } else { (ax, ay) };
    if hi == 0.0 {
        return 0.0;
    }
    let a = lo / hi;
    let s = a * a;
    let mut r = a
        * (0.999_977_26
            + s * (-0.332_623_47 + s * (0.193_543_46 + s * (-0.116_432_87 + s * (0.052_653_32 + s * -0.011_721_20)))));
    if ay > ax {
        r = PI / 2.0 - r;
    }
    if x < 0.0 {
        r = PI - r;
    }
    if y < 0.0 {
        r = 2.0 * PI - r;
    }
    r
}

fn quaternion(rot: &Matrix) -> [f64; 4] {
    let mut r = [0.0; 9];
    r.copy_from_slice(rot.as_slice());
    quaternion_of(&r)
}

/// Unit quaternion `[w, x, y, z]` of a row-major rotation (Shepperd's method).
pub(crate) fn quaternion_of(r: &[f64; 9]) -> [f64; 4] {
    let t = r[0] + r[4] + r[8];
    if t > 0.0 {
        let s = 2.0 * (t + 1.0).sqrt();
        [0.25 * s, (r[7] - r[5]) / s, (r[2] - r[6]) / s, (r[3] - r[1]) / s]
    } else if r[0] > r[4] && r[0] > r[8] {
        let s = 2.0 * (1.0 + r[0] - r[4] - r[8]).sqrt();
        [(r[7] - r[5]) / s, 0.25 * s, (r[1] + r[3]) / s, (r[2] + r[6]) / s]
    } else if r[4] > r[8] {
        let s = 2.0 * (1.0 + r[4] - r[0] - r[8]).sqrt();
        [(r[2] - r[6]) / s, (r[1] + r[3]) / s, 0.25 * s, (r[5] + r[7]) / s]
    } else {
        let s = 2.0 * (1.0 + r[8] - r[0] - r[4]).sqrt();
        [(r[3] - r[1]) / s, (r[2] + r[6]) / s, (r[5] + r[7]) / s, 0.25 * s]
    }
}

fn flatten16(rot: &Matrix) -> [f64; 16] {
    let mut out = [0.0; 16];
    out.copy_from_slice(rot.as_slice());
    out
}

/// Frobenius distance between rotations whose unit quaternions are `dq` apart.
fn quat_to_frobenius(dq: f64) -> f64 {
    2.0 * SQRT_2 * dq * (1.0 - dq * dq / 4.0).max(0.0).sqrt()
}

fn frobenius_to_quat(df: f64) -> f64 {
    let theta = 2.0 * (df / (2.0 * SQRT_2)).min(1.0).asin();
    2.0 * (theta / 4.0).sin()
}

fn nearest_in<const K: usize>(tree: &ImmutableKdTree<f64, K>, tags: &[u32], q: &[f64; K]) -> Option<(u32, f64)> {
    let hit = tree.query(q).nearest_one::<SquaredEuclidean<f64>>().execute();
    tags.get(hit.item as usize).map(|&t| (t, hit.distance.max(0.0).sqrt()))
}

fn within_in<const K: usize>(tree: &ImmutableKdTree<f64, K>, tags: &[u32], q: &[f64; K], r: f64, out: &mut Vec<u32>) {
    let hits = tree.query(q).within::<SquaredEuclidean<f64>>(r * r).unsorted().execute();
    out.extend(hits.iter().map(|h| tags[h.item as usize]));
}

fn nearest_k_in<const K: usize>(
    tree: &ImmutableKdTree<f64, K>,
    tags: &[u32],
    q: &[f64; K],
    k: usize,
) -> Vec<(u32, f64)> {
    let k = NonZero::new(k.max(1)).expect("positive");
    tree.query(q)
        .nearest_n::<SquaredEuclidean<f64>>(k)
        .execute()
        .iter()
        .map(|h| (tags[h.item as usize], h.distance.max(0.0).sqrt()))
        .collect()
}

impl BaseIndex {
    pub(crate) fn new(cloud: &SampleCloud) -> Self {
        let n = cloud.n;
        let ms = cloud.m_elements();
        let m_count = ms.len();
        let base = cloud.base();
        let code = |j: usize, a: usize| (j * m_count + a) as u32;
        let kind = if n == 2 {
            Kind::Circle { b: base.len() }
        } else if cloud.space == Space::Proj {
            let mut pts = Vec::with_capacity(2 * base.len());
            let mut tags = Vec::with_capacity(2 * base.len());
            for (j, r) in base.iter().enumerate() {
                let Probe::Line(v) = Probe::for_vector(&r.column(0)) else { unreachable!() };
                pts.push(v);
                pts.push(v.map(|x| -x));
                tags.extend([code(j, 0), code(j, 0)]);
            }
            if n == 3 {
                let pts3: Vec<[f64; 3]> = pts.iter().map(|v| [v[0], v[1], v[2]]).collect();
                Kind::Line3 { tree: ImmutableKdTree::new_from_slice(&pts3).expect("kd-tree"), tags }
            } else {
                Kind::Line4 { tree: ImmutableKdTree::new_from_slice(&pts).expect("kd-tree"), tags }
            }
        } else if n == 3 {
            let mut pts = Vec::with_capacity(2 * m_count * base.len());
            let mut tags = Vec::with_capacity(pts.capacity());
            for (j, r) in base.iter().enumerate() {
                for (a, m) in ms.iter().enumerate() {
                    let q = quaternion(&r.mul_diag(&m.as_f64()));
                    pts.push(q);
                    pts.push(q.map(|x| -x));
                    tags.extend([code(j, a), code(j, a)]);
                }
            }
            Kind::Quat { tree: ImmutableKdTree::new_from_slice(&pts).expect("kd-tree"), tags }
        } else {
            let mut pts = Vec::with_capacity(m_count * base.len());
            let mut tags = Vec::with_capacity(pts.capacity());
            for (j, r) in base.iter().enumerate() {
                for (a, m) in ms.iter().enumerate() {
                    pts.push(flatten16(&r.mul_diag(&m.as_f64())));
                    tags.push(code(j, a));
                }
            }
            Kind::Flat { tree: ImmutableKdTree::new_from_slice(&pts).expect("kd-tree"), tags }
        };
        Self { kind, m_count, n }
    }

    /// Number of grid points on the half circle, when the base is the `n = 2` grid.
    pub(crate) fn circle_bins(&self) -> Option<usize> {
        match self.kind {
            Kind::Circle { b } => Some(b),
            _ => None,
        }
    }

    /// Code of the grid point nearest to the direction `(x, y)`, matching
    /// [`BaseIndex::nearest`] exactly.
    pub(crate) fn circle_nearest_code(&self, b: usize, x: f64, y: f64) -> u32 {
        // Angles are nonnegative, so truncating casts stand in for floor and round.
        let inv_h = b as f64 / PI;
        let t = fast_atan2(y, x) * inv_h;
        let frac = t - (t as i64) as f64;
        let k = if (frac - 0.5).abs() > FAST_ATAN_ERR * inv_h {
            (t + 0.5) as i64
        } else {
            let phi = y.atan2(x);
            let phi = if phi < 0.0 { phi + 2.0 * PI } else { phi };
            (phi / (PI / b as f64)).round() as i64
        };
        self.circle_code(b, k)
    }

    /// Nearest entry to a unit quaternion, when the base is indexed by quaternions.
    pub(crate) fn quat_nearest(&self, q: &[f64; 4]) -> Option<(u32, f64)> {
        match &self.kind {
            Kind::Quat { tree, tags } => nearest_in(tree, tags, q).map(|(t, d)| (t, quat_to_frobenius(d))),
            _ => None,
        }
    }

    pub(crate) fn quat_within(&self, q: &[f64; 4], r: f64, out: &mut Vec<u32>) {
        if let Kind::Quat { tree, tags } = &self.kind {
            within_in(tree, tags, q, frobenius_to_quat(r), out)
        }
    }

    pub(crate) fn is_quat(&self) -> bool {
        matches!(self.kind, Kind::Quat { .. })
    }

    pub(crate) fn m_count(&self) -> usize {
        self.m_count
    }

    fn circle_code(&self, b: usize, k: i64) -> u32 {
        let full = 2 * b as i64;
        let mut k = k;
        if k < 0 || k >= full {
            k = k.rem_euclid(full);
        }
        let k = k as usize;
        let (j, m) = if k >= b { (k - b, 1) } else { (k, 0) };
        (j * self.m_count + m) as u32
    }

    pub(crate) fn nearest(&self, p: &Probe) -> Option<(u32, f64)> {
        match (&self.kind, p) {
            (Kind::Circle { b }, Probe::Angle(phi)) => {
                let h = PI / *b as f64;
                let k = (phi / h).round();
                Some((self.circle_code(*b, k as i64), (phi - k * h).abs()))
            }
            (Kind::Quat { tree, tags }, Probe::Rotation(r)) => {
                nearest_in(tree, tags, &quaternion(r)).map(|(t, d)| (t, quat_to_frobenius(d)))
            }
            (Kind::Flat { tree, tags }, Probe::Rotation(r)) => nearest_in(tree, tags, &flatten16(r)),
            (Kind::Line3 { tree, tags }, Probe::Line(v)) => nearest_in(tree, tags, &[v[0], v[1], v[2]]),
            (Kind::Line4 { tree, tags }, Probe::Line(v)) => nearest_in(tree, tags, v),
            _ => None,
        }
    }

    /// Appends the codes of all base translates within `r` of `p`.
    pub(crate) fn within(&self, p: &Probe, r: f64, out: &mut Vec<u32>) {
        match (&self.kind, p) {
            (Kind::Circle { b }, Probe::Angle(phi)) => {
                let h = PI / *b as f64;
                let lo = ((phi - r) / h).ceil() as i64;
                let hi = ((phi + r) / h).floor() as i64;
                // Never wrap all the way round the circle onto the same point twice.
                let hi = hi.min(lo + 2 * *b as i64 - 1);
                out.extend((lo..=hi).map(|k| self.circle_code(*b, k)));
            }
            (Kind::Quat { tree, tags }, Probe::Rotation(rot)) => {
                within_in(tree, tags, &quaternion(rot), frobenius_to_quat(r), out)
            }
            (Kind::Flat { tree, tags }, Probe::Rotation(rot)) => within_in(tree, tags, &flatten16(rot), r, out),
            (Kind::Line3 { tree, tags }, Probe::Line(v)) => within_in(tree, tags, &[v[0], v[1], v[2]], r, out),
            (Kind::Line4 { tree, tags }, Probe::Line(v)) => within_in(tree, tags, v, r, out),
            _ => {}
        }
    }

    /// Largest distance from a base point to its nearest distinct base point.
    pub(crate) fn dispersion(&self, cloud: &SampleCloud) -> f64 {
        let base = cloud.base();
        if base.len() < 2 {
            return 0.0;
        }
        let k = 2 * self.m_count + 2;
        let nearest_other = |j: usize| -> f64 {
            let own = |t: u32| t as usize / self.m_count == j;
            let hits = match &self.kind {
                Kind::Circle { b } => return PI / *b as f64,
                Kind::Quat { tree, tags } => nearest_k_in(tree, tags, &quaternion(&base[j]), k)
                    .into_iter()
                    .map(|(t, d)| (t, quat_to_frobenius(d)))
                    .collect(),
                Kind::Flat { tree, tags } => nearest_k_in(tree, tags, &flatten16(&base[j]), k),
                Kind::Line3 { tree, tags } => {
                    let c = base[j].column(0);
                    nearest_k_in(tree, tags, &[c[0], c[1], c[2]], k)
                }
                Kind::Line4 { tree, tags } => {
                    let c = base[j].column(0);
                    nearest_k_in(tree, tags, &[c[0], c[1], c[2], c[3]], k)
                }
            };
            hits.into_iter().filter(|&(t, _)| !own(t)).map(|(_, d)| d).fold(f64::INFINITY, f64::min)
        };
        (0..base.len()).map(nearest_other).filter(|d| d.is_finite()).fold(0.0, f64::max)
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }
}
