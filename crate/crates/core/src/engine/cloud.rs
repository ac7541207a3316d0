//! Sample clouds on `K`, the flag manifold and projective space.
//!
//! Every cloud is built from a set of base rotations. The flag cloud is the set
//! of their cosets, the projective cloud their first columns, and the `K` cloud
//! their full `M`-orbits: point `a·B + b` is `base[b] · m_a`. For `n = 2` the base
//! rotations are equispaced, so all three clouds share one grid on `ℙ¹`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::flag::{FlagPoint, ProjPoint};
use crate::k_action::PointOnK;
use crate::linalg::{kappa, Matrix};
use crate::weyl::{enumerate_m, SignVector};

/// Which compact space a cloud samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    K,
    #[serde(rename = "FLAG")]
    Flag,
    #[serde(rename = "PROJ")]
    Proj,
}

impl Space {
    pub const ALL: [Space; 3] = [Space::K, Space::Flag, Space::Proj];
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::K => "K",
            Space::Flag => "FLAG",
            Space::Proj => "PROJ",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Space::ALL
            .into_iter()
            .find(|sp| sp.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnsupportedSpace(s.to_string()))
    }
}

/// A deterministic sample of one of the spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCloud {
    pub space: Space,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    base: Vec<Matrix>,
    m: Vec<SignVector>,
}

impl SampleCloud {
    pub fn len(&self) -> usize {
        match self.space {
            Space::K => self.base.len() * self.m.len(),
            Space::Flag | Space::Proj => self.base.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Number of base rotations.
    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub(crate) fn base(&self) -> &[Matrix] {
        &self.base
    }

    /// The elements of `M`, in the order used for node indices.
    pub fn m_elements(&self) -> &[SignVector] {
        &self.m
    }

    /// Splits a point index into base index and `M` index.
    pub fn split_index(&self, idx: usize) -> (usize, usize) {
        match self.space {
            Space::K => (idx % self.base.len(), idx / self.base.len()),
            Space::Flag | Space::Proj => (idx, 0),
        }
    }

    /// The rotation of a point: for the flag and projective clouds this is the
    /// base representative.
    pub fn rotation(&self, idx: usize) -> Matrix {
        let (b, a) = self.split_index(idx);
        self.base[b].mul_diag(&self.m[a].as_f64())
    }

    pub fn k_point(&self, idx: usize) -> PointOnK {
        PointOnK::from_rotation_unchecked(self.rotation(idx))
    }

    pub fn flag_point(&self, idx: usize) -> FlagPoint {
        FlagPoint::from_rotation(&self.rotation(idx))
    }

    pub fn proj_point(&self, idx: usize) -> ProjPoint {
        ProjPoint::new(&self.rotation(idx).column(0)).expect("unit column")
    }

    /// Coordinates for export: the rotation or canonical flag representative
    /// (row-major), or the unit vector of a line.
    pub fn coordinates(&self, idx: usize) -> Vec<f64> {
        match self.space {
            Space::K => self.rotation(idx).as_slice().to_vec(),
            Space::Flag => self.flag_point(idx).representative().as_slice().to_vec(),
            Space::Proj => self.proj_point(idx).dir().to_vec(),
        }
    }
}

impl Serialize for SampleCloud {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let points: Vec<Vec<f64>> = (0..self.len()).map(|i| self.coordinates(i)).collect();
        let mut st = s.serialize_struct("SampleCloud", 5)?;
        st.serialize_field("space", &self.space)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("count", &self.count)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("points", &points)?;
        st.end()
    }
}

/// Samples `space` for `SL(n)`.
///
/// For `n = 2` the grid is equispaced and the seed is ignored: `count` lines on
/// `ℙ¹`, or `count` rotations (rounded up to even) on `SO(2)`. For larger `n`,
/// `count` base rotations are drawn: a randomly shifted Halton sequence mapped
/// through unit quaternions when `n = 3`, Gaussian QR otherwise. The `K` cloud
/// then holds their full `M`-orbits, `count · 2^(n−1)` points.
pub fn sample_space(space: Space, n: usize, count: usize, seed: u64) -> Result<SampleCloud> {
    if count == 0 {
        return Err(Error::Dimension("cannot sample zero points".into()));
    }
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedSpace(format!("{space} for n = {n}; supported sizes are 2 to 4")));
    }
    let base = if n == 2 {
        let b = if space == Space::K { count.div_ceil(2) } else { count };
        (0..b).map(|i| rotation_2d(PI * i as f64 / b as f64)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if n == 3 {
            let shift: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            (0..count).map(|i| shoemake(halton3(i + 1, shift))).collect()
        } else {
            (0..count).map(|_| haar_rotation(n, &mut rng)).collect()
        }
    };
    Ok(SampleCloud { space, n, count, seed, base, m: enumerate_m(n) })
}

/// The flag cloud lying under a `K` cloud.
pub fn flag_cloud_of(k_cloud: &SampleCloud) -> SampleCloud {
    SampleCloud { space: Space::Flag, ..k_cloud.clone() }
}

pub(crate) fn rotation_2d(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_row_slice(2, &[c, -s, s, c]).expect("2x2")
}

fn haar_rotation(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    // QR of a Gaussian matrix; flipping a column of the sample keeps it Gaussian
    // and makes κ land in SO(n).
    loop {
        let data: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
        let mut g = Matrix::from_row_slice(n, &data).expect("square");
        let det = g.det();
        if det.abs() < 1e-8 {
            continue;
        }
        if det < 0.0 {
            let col: Vec<f64> = g.column(n - 1).iter().map(|x| -x).collect();
            g.set_column(n - 1, &col);
        }
        if let Ok(k) = kappa(&g) {
            return k;
        }
    }
}

/// Radical inverse of `i` in `base`.
fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let (mut x, mut f) = (0.0, 1.0 / base as f64);
    while i > 0 {
        x += f * (i % base) as f64;
        i /= base;
        f /= base as f64;
    }
    x
}

/// Point `i` of the Halton sequence in bases 2, 3, 5, shifted mod 1.
fn halton3(i: usize, shift: [f64; 3]) -> [f64; 3] {
    let mut u = [radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)];
    u.iter_mut().zip(shift).for_each(|(x, s)| *x = (*x + s).fract());
    u
}

/// Shoemake's map, pushing the uniform measure on the cube to Haar measure.
fn shoemake([u1, u2, u3]: [f64; 3]) -> Matrix {
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (s2, c2) = (2.0 * PI * u2).sin_cos();
    let (s3, c3) = (2.0 * PI * u3).sin_cos();
    quaternion_matrix([b * c3, a * s2, a * c2, b * s3])
}

/// Rotation matrix of the unit quaternion `(w, x, y, z)`.
pub(crate) fn quaternion_matrix([w, x, y, z]: [f64; 4]) -> Matrix {
    Matrix::from_row_slice(
        3,
        &[
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    )
    .expect("3x3")
}
