//! The action `δ(g, k) = κ(g k)` of SL(n, ℝ) on `K = SO(n)`, right translation
//! by `M`, the projection to the flag manifold, and typed fixed points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag::FlagPoint;
use crate::linalg::{kappa, GroupElement, Matrix, RegularSplit, regular_split_decompose};
use crate::weyl::{enumerate_mstar, SignVector, SignedPermutation};

const ORTHO_TOL: f64 = 1e-10;
const FIXED_TOL: f64 = 1e-8;

/// A rotation matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PointOnK(Matrix);

impl PointOnK {
    pub fn new(rot: Matrix) -> Result<Self> {
        let defect = rot.orthogonality_defect();
        if defect > ORTHO_TOL || rot.det() <= 0.0 {
            return Err(Error::Dimension(format!("not a rotation (orthogonality defect {defect:e})")));
        }
        Ok(Self(rot))
    }

    /// Wraps a matrix already known to be a rotation.
    pub(crate) fn from_rotation_unchecked(rot: Matrix) -> Self {
        Self(rot)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    /// Rotation of the plane by `theta`.
    pub fn rotation_2d(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self(Matrix::from_row_slice(2, &[c, -s, s, c]).expect("2x2"))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.0.distance(&other.0)
    }
}

/// A fixed point `κ(g u)` of a regular element, typed by `u ∈ M*`.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointOnK {
    pub point: PointOnK,
    pub u_label: SignedPermutation,
    pub chamber: RegularSplit,
}

/// `δ(g, k) = κ(g k)`.
pub fn act_on_k(g: &GroupElement, k: &PointOnK) -> Result<PointOnK> {
    Ok(PointOnK(kappa(&(g.matrix() * k.matrix()))?))
}

/// `k · diag(m)`.
pub fn right_translate(k: &PointOnK, m: &SignVector) -> PointOnK {
    PointOnK(k.matrix().mul_diag(&m.as_f64()))
}

/// `π : K → K/M`.
pub fn project_to_flag(k: &PointOnK) -> FlagPoint {
    FlagPoint::from_rotation(k.matrix())
}

/// The point of `K` fixed by `h` of type `u`, given the chamber of `h`.
pub fn typed_point_on_k(conjugator: &Matrix, u: &SignedPermutation) -> Result<PointOnK> {
    Ok(PointOnK(kappa(&(conjugator * &u.matrix()))?))
}

/// All `2^(n−1)·n!` fixed points of a regular element on `K`, in `M*` order.
pub fn fixed_points_on_k(h: &GroupElement, tol: f64) -> Result<Vec<FixedPointOnK>> {
    let chamber = regular_split_decompose(h, tol)?;
    fixed_points_of_split(h, &chamber)
}

/// Fixed points for a chamber whose conjugator may have been translated by `M`.
pub fn fixed_points_of_split(h: &GroupElement, chamber: &RegularSplit) -> Result<Vec<FixedPointOnK>> {
    let g = chamber.conjugator.matrix();
    enumerate_mstar(h.dim())
        .into_iter()
        .map(|u| {
            let point = typed_point_on_k(g, &u)?;
            let moved = act_on_k(h, &point)?;
            let err = moved.distance(&point);
            if err > FIXED_TOL {
                return Err(Error::Factorization(format!("fixed point of type {u:?} moved by {err:e}")));
            }
            Ok(FixedPointOnK { point, u_label: u, chamber: chamber.clone() })
        })
        .collect()
}

/// Iterates `k ↦ δ(h, k)` until the orbit is within `tol` of a fixed point of `h`.
///
/// Starting points within `tol` of two fixed points at once are reported as
/// non-convergent rather than assigned arbitrarily.
pub fn iterate_to_attractor(
    h: &GroupElement,
    k0: &PointOnK,
    max_steps: usize,
    tol: f64,
) -> Result<(FixedPointOnK, usize)> {
    let fixed = fixed_points_on_k(h, crate::linalg::REGULARITY_TOL)?;
    let mut k = k0.clone();
    for step in 0..=max_steps {
        let mut close = fixed.iter().filter(|f| f.point.distance(&k) <= tol);
        if let Some(f) = close.next() {
            if close.next().is_some() {
                return Err(Error::NoConvergence { steps: step });
            }
            return Ok((f.clone(), step));
        }
        if step < max_steps {
            k = act_on_k(h, &k)?;
        }
    }
    Err(Error::NoConvergence { steps: max_steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::enumerate_m;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ge(rows: &[&[f64]]) -> GroupElement {
        GroupElement::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn trivial_actions() {
        let k = PointOnK::rotation_2d(0.7);
        assert!(act_on_k(&GroupElement::identity(2), &k).unwrap().distance(&k) < 1e-15);
        let a = ge(&[&[3.0, 0.0], &[0.0, 1.0 / 3.0]]);
        assert!(act_on_k(&a, &PointOnK::identity(2)).unwrap().distance(&PointOnK::identity(2)) < 1e-15);
    }

    #[test]
    fn first_column_follows_the_vector() {
        let g = ge(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let k = act_on_k(&g, &PointOnK::identity(2)).unwrap();
        let s5 = 5f64.sqrt();
        assert!((k.matrix()[(0, 0)] - 2.0 / s5).abs() < 1e-14);
        assert!((k.matrix()[(1, 0)] - 1.0 / s5).abs() < 1e-14);
    }

    #[test]
    fn right_translation_examples() {
        let minus = SignVector::new(&[-1, -1]).unwrap();
        let k = right_translate(&PointOnK::identity(2), &minus);
        assert_eq!(k.matrix(), &Matrix::identity(2).scale(-1.0));
        assert_eq!(right_translate(&k, &minus), PointOnK::identity(2));
    }

    #[test]
    fn diagonal_fixed_points_in_the_plane() {
        let e = 1f64.exp();
        let h = ge(&[&[e, 0.0], &[0.0, 1.0 / e]]);
        let fixed = fixed_points_on_k(&h, 1e-6).unwrap();
        assert_eq!(fixed.len(), 4);
        let mut angles: Vec<f64> = fixed
            .iter()
            .map(|f| f.point.matrix()[(1, 0)].atan2(f.point.matrix()[(0, 0)]).rem_euclid(2.0 * PI))
            .collect();
        angles.sort_by(f64::total_cmp);
        for (a, b) in angles.iter().zip([0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_fixed_points_in_space_are_signed_permutations() {
        let h = ge(&[&[4.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.25]]);
        for f in fixed_points_on_k(&h, 1e-6).unwrap() {
            assert!(f.point.matrix().distance(&f.u_label.matrix()) < 1e-12);
        }
    }

    #[test]
    fn attractor_iteration() {
        let e = 1f64.exp();
        let h = ge(&[&[e, 0.0], &[0.0, 1.0 / e]]);
        let (f, steps) = iterate_to_attractor(&h, &PointOnK::rotation_2d(0.3), 200, 1e-9).unwrap();
        assert!(f.point.distance(&PointOnK::identity(2)) < 1e-9);
        assert!(steps > 0);
        assert!(f.u_label.as_sign_vector().is_some());

        let (f, _) = iterate_to_attractor(&h, &PointOnK::rotation_2d(PI - 0.3), 200, 1e-9).unwrap();
        assert!(f.point.distance(&PointOnK::rotation_2d(PI)) < 1e-9);

        let (_, steps) = iterate_to_attractor(&h, &PointOnK::identity(2), 10, 1e-9).unwrap();
        assert_eq!(steps, 0);
    }

    #[test]
    fn translation_commutes_with_the_action() {
        let rows = [vec![2.0, 1.0, 0.5], vec![0.3, 1.0, 0.2], vec![0.1, 0.4, 1.0]];
        let g = GroupElement::normalized(Matrix::from_rows(&rows).unwrap()).unwrap();
        let k = act_on_k(&g, &PointOnK::identity(3)).unwrap();
        for m in enumerate_m(3) {
            let lhs = act_on_k(&g, &right_translate(&k, &m)).unwrap();
            let rhs = right_translate(&act_on_k(&g, &k).unwrap(), &m);
            assert!(lhs.distance(&rhs) < 1e-10);
        }
    }
}
