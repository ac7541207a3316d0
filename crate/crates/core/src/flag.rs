//! Projective space and the maximal flag manifold `K/M`.
//!
//! Flags are stored as a canonical rotation in their `M`-coset, so the action
//! reuses `κ` and the projection is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_sign, kappa, regular_split_decompose, GroupElement, Matrix};
use crate::weyl::{enumerate_m, enumerate_w, WeylElement};

const FIXED_TOL: f64 = 1e-8;

/// A point of `K/M`, held as the canonical representative of its coset.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FlagPoint(Matrix);

impl FlagPoint {
    /// The canonical representative of `k M`: each column is flipped so that its
    /// largest entry is positive, and if that leaves determinant −1 the column
    /// with the smallest such entry is flipped back.
    pub fn from_rotation(k: &Matrix) -> Self {
        let n = k.dim();
        let mut rep = k.clone();
        let mut peaks = Vec::with_capacity(n);
        for j in 0..n {
            let col = rep.column(j);
            let (idx, peak) = col
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |best, (i, &x)| if x.abs() > best.1 { (i, x.abs()) } else { best });
            if col[idx] < 0.0 {
                rep.set_column(j, &col.iter().map(|x| -x).collect::<Vec<_>>());
            }
            peaks.push(peak);
        }
        if rep.det() < 0.0 {
            let j = (0..n).min_by(|&a, &b| peaks[a].total_cmp(&peaks[b])).unwrap_or(0);
            let col: Vec<f64> = rep.column(j).iter().map(|x| -x).collect();
            rep.set_column(j, &col);
        }
        Self(rep)
    }

    pub fn representative(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `min_{m ∈ M} ‖F₁ − F₂ m‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        enumerate_m(self.dim())
            .iter()
            .map(|m| self.0.distance(&other.0.mul_diag(&m.as_f64())))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A line in `ℝⁿ`, stored as a unit vector whose largest entry is positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    dir: Vec<f64>,
}

impl ProjPoint {
    pub fn new(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v.is_empty() || norm < 1e-300 || !norm.is_finite() {
            return Err(Error::Dimension("zero vector has no direction".into()));
        }
        let mut dir = v.to_vec();
        canonical_sign(&mut dir);
        Ok(Self { dir })
    }

    /// The line at angle `theta` in the plane.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(&[c, s]).expect("unit vector")
    }

    pub fn dir(&self) -> &[f64] {
        &self.dir
    }

    pub fn dim(&self) -> usize {
        self.dir.len()
    }

    /// Angle in `[0, π)` of a line in the plane.
    pub fn angle(&self) -> f64 {
        self.dir[1].atan2(self.dir[0]).rem_euclid(std::f64::consts::PI)
    }

    /// `min(|u − v|, |u + v|)`.
    pub fn distance(&self, other: &Self) -> f64 {
        let (minus, plus) = self.dir.iter().zip(&other.dir).fold((0.0, 0.0), |(a, b), (x, y)| {
            (a + (x - y) * (x - y), b + (x + y) * (x + y))
        });
        minus.min(plus).sqrt()
    }
}

pub fn act_on_projective(g: &GroupElement, p: &ProjPoint) -> ProjPoint {
    ProjPoint::new(&g.matrix().mul_vec(&p.dir)).expect("invertible matrices preserve nonzero vectors")
}

pub fn act_on_flag(g: &GroupElement, f: &FlagPoint) -> Result<FlagPoint> {
    Ok(FlagPoint::from_rotation(&kappa(&(g.matrix() * &f.0))?))
}

/// The `n!` fixed flags of a regular element, in `W` order; `w = 1` is the attractor.
pub fn fixed_points_on_flag(h: &GroupElement, tol: f64) -> Result<Vec<(WeylElement, FlagPoint)>> {
    let split = regular_split_decompose(h, tol)?;
    flag_fixed_points_of_conjugator(h, split.conjugator.matrix())
}

pub(crate) fn flag_fixed_points_of_conjugator(
    h: &GroupElement,
    conjugator: &Matrix,
) -> Result<Vec<(WeylElement, FlagPoint)>> {
    enumerate_w(h.dim())
        .into_iter()
        .map(|w| {
            let f = FlagPoint::from_rotation(&kappa(&(conjugator * &w.lift().matrix()))?);
            let err = act_on_flag(h, &f)?.distance(&f);
            if err > FIXED_TOL {
                return Err(Error::Factorization(format!("flag of type {w:?} moved by {err:e}")));
            }
            Ok((w, f))
        })
        .collect()
}

/// The `n` fixed lines of a regular element. The eigenline of the `j`-th largest
/// eigenvalue carries the label of the transposition `(0 j)`.
pub fn fixed_points_on_projective(h: &GroupElement, tol: f64) -> Result<Vec<(WeylElement, ProjPoint)>> {
    let split = regular_split_decompose(h, tol)?;
    Ok(proj_fixed_points_of_conjugator(split.conjugator.matrix()))
}

pub(crate) fn proj_fixed_points_of_conjugator(conjugator: &Matrix) -> Vec<(WeylElement, ProjPoint)> {
    let n = conjugator.dim();
    (0..n)
        .map(|j| {
            let label = WeylElement::transposition(n, 0, j);
            (label, ProjPoint::new(&conjugator.column(j)).expect("conjugator is invertible"))
        })
        .collect()
}
