//! Small dense matrices over `f64` and the factorizations the rest of the crate
//! leans on: the Iwasawa decomposition `g = k a n` and the eigen-split of a
//! regular element `h = g diag(exp(logs)) g⁻¹`.
//!
//! Matrices are square, at most a handful of rows, and stored row-major inline.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default tolerance on log-eigenvalue gaps for regularity tests.
pub const REGULARITY_TOL: f64 = 1e-6;

/// Relative determinant deviation accepted without touching the matrix.
const DET_EXACT_TOL: f64 = 1e-9;
/// Relative determinant deviation that is silently repaired by rescaling.
const DET_RESCALE_TOL: f64 = 1e-4;
/// Smallest admissible diagonal entry of the `a` factor.
const RANK_TOL: f64 = 1e-14;

/// Square real matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: SmallVec<[f64; 16]>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: SmallVec::from_elem(0.0, n * n) }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Builds a matrix from a row-major slice of length `n²`.
    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!("expected {} entries, got {}", n * n, data.len())));
        }
        Ok(Self { n, data: SmallVec::from_slice(data) })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows must form a non-empty square array".into()));
        }
        Ok(Self { n, data: rows.iter().flatten().copied().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data.chunks(self.n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Right multiplication by `diag(d)`, i.e. column `j` scaled by `d[j]`.
    pub fn mul_diag(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        for row in out.data.chunks_mut(self.n) {
            row.iter_mut().zip(d).for_each(|(x, s)| *x *= s);
        }
        out
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                .unwrap_or(c);
            if a[p * n + c] == 0.0 {
                return 0.0;
            }
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for i in c + 1..n {
                let f = a[i * n + c] / piv;
                for j in c..n {
                    a[i * n + j] -= f * a[c * n + j];
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a[(i, c)].abs().total_cmp(&a[(j, c)].abs()))
                .unwrap_or(c);
            let piv = a[(p, c)];
            if piv.abs() <= 1e-300_f64.max(1e-15 * scale) {
                return Err(Error::NumericalRank { index: c, value: piv });
            }
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                    inv.data.swap(p * n + j, c * n + j);
                }
            }
            for j in 0..n {
                a[(c, j)] /= piv;
                inv[(c, j)] /= piv;
            }
            for i in (0..n).filter(|&i| i != c) {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in 0..n {
                        a[(i, j)] -= f * a[(c, j)];
                        inv[(i, j)] -= f * inv[(c, j)];
                    }
                }
            }
        }
        Ok(inv)
    }

    /// `‖selfᵀ self − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        (&self.transpose() * self).distance(&Self::identity(self.n))
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        let n = self.n;
        debug_assert_eq!(n, rhs.n);
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a != 0.0 {
                    for j in 0..n {
                        out.data[i * n + j] += a * rhs.data[k * n + j];
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// An element of SL(n, ℝ).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct GroupElement(Matrix);

impl GroupElement {
    /// Validates the determinant. Small drift is repaired by rescaling with
    /// `det^(-1/n)`; anything beyond that is rejected.
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.dim();
        if n < 2 {
            return Err(Error::Dimension(format!("n = {n}, need n >= 2")));
        }
        if m.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::Dimension("non-finite entry".into()));
        }
        let det = m.det();
        // Hadamard's bound: the largest determinant the entries allow.
        let scale = (0..n)
            .map(|j| m.column(j).iter().map(|x| x * x).sum::<f64>().sqrt())
            .product::<f64>()
            .max(1.0);
        let deviation = (det - 1.0).abs() / scale;
        if deviation <= DET_EXACT_TOL {
            Ok(Self(m))
        } else if deviation <= DET_RESCALE_TOL && det > 0.0 {
            log::warn!("rescaling matrix with determinant {det} to determinant 1");
            Ok(Self(m.scale(det.powf(-1.0 / n as f64))))
        } else {
            Err(Error::InvalidDeterminant { det, deviation })
        }
    }

    /// Rescales an arbitrary matrix with positive determinant into SL(n).
    pub fn normalized(m: Matrix) -> Result<Self> {
        let det = m.det();
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::InvalidDeterminant { det, deviation: f64::INFINITY });
        }
        let n = m.dim() as f64;
        Self::new(m.scale(det.powf(-1.0 / n)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self(self.0.inverse()?))
    }

    /// Product, renormalized so the determinant stays exactly on the group.
    pub fn compose(&self, other: &Self) -> Self {
        let p = &self.0 * &other.0;
        let det = p.det();
        if det > 0.0 && (det - 1.0).abs() > 1e-14 {
            Self(p.scale(det.powf(-1.0 / p.dim() as f64)))
        } else {
            Self(p)
        }
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        GroupElement::new(Matrix::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Factors of `g = k · a · nfac`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IwasawaTriple {
    pub k: Matrix,
    pub a: Matrix,
    pub nfac: Matrix,
}

/// Householder QR of `m` with the diagonal of `R` made positive.
fn qr_positive(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = m.dim();
    let mut r = m.clone();
    let mut q = Matrix::identity(n);
    let mut v = vec![0.0; n];
    for c in 0..n.saturating_sub(1) {
        let norm = (c..n).map(|i| r[(i, c)] * r[(i, c)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(c, c)] > 0.0 { -norm } else { norm };
        v[..c].iter_mut().for_each(|x| *x = 0.0);
        for i in c..n {
            v[i] = r[(i, c)];
        }
        v[c] -= alpha;
        let vv: f64 = v[c..].iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        // R ← (I − 2vvᵀ/vᵀv) R and Q ← Q (I − 2vvᵀ/vᵀv)
        for j in 0..n {
            let s = 2.0 * (c..n).map(|i| v[i] * r[(i, j)]).sum::<f64>() / vv;
            for i in c..n {
                r[(i, j)] -= s * v[i];
            }
        }
        for i in 0..n {
            let s = 2.0 * (c..n).map(|j| q[(i, j)] * v[j]).sum::<f64>() / vv;
            for j in c..n {
                q[(i, j)] -= s * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            r[(i, j)] = 0.0;
        }
        let d = r[(i, i)];
        if d.abs() <= RANK_TOL {
            return Err(Error::NumericalRank { index: i, value: d });
        }
        if d < 0.0 {
            for j in 0..n {
                r[(i, j)] = -r[(i, j)];
                q[(j, i)] = -q[(j, i)];
            }
        }
    }
    Ok((q, r))
}

/// The unique factorization `g = k a n` with `k ∈ SO(n)`, `a` positive diagonal
/// and `n` unit upper triangular.
pub fn iwasawa_decompose(g: &GroupElement) -> Result<IwasawaTriple> {
    iwasawa_of_matrix(g.matrix())
}

/// Iwasawa factors of any matrix with positive determinant.
pub(crate) fn iwasawa_of_matrix(m: &Matrix) -> Result<IwasawaTriple> {
    let (k, r) = qr_positive(m)?;
    let d = r.diagonal();
    let inv: Vec<f64> = d.iter().map(|x| 1.0 / x).collect();
    let mut nfac = r.clone();
    for (i, row) in nfac.data.chunks_mut(r.n).enumerate() {
        row.iter_mut().for_each(|x| *x *= inv[i]);
    }
    Ok(IwasawaTriple { k, a: Matrix::diag(&d), nfac })
}

/// κ(g): the `K` component of the Iwasawa decomposition.
pub fn iwasawa_project(g: &GroupElement) -> Result<Matrix> {
    kappa(g.matrix())
}

/// κ of a bare matrix with positive determinant.
pub fn kappa(m: &Matrix) -> Result<Matrix> {
    qr_positive(m).map(|(q, _)| q)
}

/// Eigen-data of a regular element: `h = conjugator · diag(exp(logs)) · conjugator⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularSplit {
    pub conjugator: GroupElement,
    pub logs: Vec<f64>,
}

impl RegularSplit {
    /// Rebuilds `h` from the split.
    pub fn reconstruct(&self) -> Result<Matrix> {
        let g = self.conjugator.matrix();
        let d: Vec<f64> = self.logs.iter().map(|l| l.exp()).collect();
        Ok(&g.mul_diag(&d) * &g.inverse()?)
    }
}

/// Unit null vector of `a` (the right singular vector of the smallest singular value).
fn null_vector(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Factorization("SVD did not converge".into()))?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Factorization("empty SVD".into()))?;
    Ok(vt.row(imin).iter().copied().collect())
}

/// Scales to unit norm and makes the entry of largest magnitude positive.
pub(crate) fn canonical_sign(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pivot = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
    let s = if pivot < 0.0 { -1.0 / norm } else { 1.0 / norm };
    v.iter_mut().for_each(|x| *x *= s);
}

/// Splits a regular element with real positive spectrum.
///
/// Eigenvalues are sorted descending. Each eigenvector is unit length with its
/// largest entry positive; when those columns have negative determinant the last
/// one is negated, and the whole matrix is then rescaled to determinant 1.
pub fn regular_split_decompose(h: &GroupElement, tol: f64) -> Result<RegularSplit> {
    let n = h.dim();
    let hm = h.matrix().to_nalgebra();
    let eig = hm.clone().complex_eigenvalues();
    if let Some(z) = eig.iter().find(|z| z.im.abs() > tol) {
        return Err(Error::ComplexSpectrum { imag: z.im });
    }
    let mut vals: Vec<f64> = eig.iter().map(|z| z.re).collect();
    if let Some(&v) = vals.iter().find(|&&v| v <= 0.0) {
        return Err(Error::NonPositiveSpectrum { value: v });
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    let mut logs: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let gap = logs.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    if gap <= tol {
        return Err(Error::NotRegular { gap, tol });
    }
    let mean = logs.iter().sum::<f64>() / n as f64;
    logs.iter_mut().for_each(|l| *l -= mean);

    let cols = vals
        .iter()
        .map(|&lambda| {
            let shifted = &hm - DMatrix::<f64>::identity(n, n) * lambda;
            let mut v = null_vector(&shifted)?;
            canonical_sign(&mut v);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut p = Matrix::from_columns(&cols)?;
    let det = p.det();
    if det.abs() <= 1e-300 {
        return Err(Error::NumericalRank { index: n - 1, value: det });
    }
    if det < 0.0 {
        let last: Vec<f64> = p.column(n - 1).iter().map(|x| -x).collect();
        p.set_column(n - 1, &last);
    }
    let conjugator = GroupElement::normalized(p)?;
    Ok(RegularSplit { conjugator, logs })
}

/// Whether `h` is conjugate to a positive diagonal matrix with distinct entries.
pub fn is_regular_positive(h: &GroupElement, tol: f64) -> bool {
    regular_split_decompose(h, tol).is_ok()
}
