//! Generator sets for the semigroups studied by the engine.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{GroupElement, Matrix};

/// Generators of a semigroup, with a human-readable description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub gens: Vec<GroupElement>,
    #[serde(default)]
    pub description: String,
}

impl GeneratorSet {
    pub fn new(gens: Vec<GroupElement>, description: impl Into<String>) -> Result<Self> {
        if let Some(w) = gens.windows(2).find(|w| w[0].dim() != w[1].dim()) {
            return Err(Error::Dimension(format!("generators of sizes {} and {}", w[0].dim(), w[1].dim())));
        }
        Ok(Self { gens, description: description.into() })
    }

    pub fn empty(description: impl Into<String>) -> Self {
        Self { gens: Vec::new(), description: description.into() }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Matrix size, if there is at least one generator.
    pub fn dim(&self) -> Option<usize> {
        self.gens.first().map(GroupElement::dim)
    }

    /// Whether every entry of every generator is strictly positive.
    pub fn all_positive(&self) -> bool {
        self.gens.iter().all(|g| g.matrix().as_slice().iter().all(|&x| x > 0.0))
    }
}

/// Built-in generator sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Positive matrices of SL(2, ℝ).
    Slplus2,
    /// Positive matrices of SL(3, ℝ).
    Slplus3,
    /// A set generating all of SL(n, ℝ) as a semigroup.
    FullGroup,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Slplus2, Preset::Slplus3, Preset::FullGroup];

    /// The natural matrix size, if the preset fixes one.
    pub fn natural_dim(self) -> Option<usize> {
        match self {
            Preset::Slplus2 => Some(2),
            Preset::Slplus3 => Some(3),
            Preset::FullGroup => None,
        }
    }

    pub fn generators(self, n: usize) -> Result<GeneratorSet> {
        match (self, n) {
            (Preset::Slplus2, 2) => slplus2(),
            (Preset::Slplus3, 3) => slplus3(),
            (Preset::FullGroup, 2..=4) => full_group(n),
            _ => Err(Error::Dimension(format!("preset {self} is not defined for n = {n}"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Slplus2 => "slplus2",
            Preset::Slplus3 => "slplus3",
            Preset::FullGroup => "full-group",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| Error::Dimension(format!("unknown preset {s:?}")))
    }
}

fn element(rows: &[&[f64]]) -> Result<GroupElement> {
    GroupElement::normalized(Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?)
}

/// Two unipotent-like positive matrices plus two nearly diagonal ones whose
/// attractors sit close to the coordinate axes.
pub fn slplus2() -> Result<GeneratorSet> {
    let d = (1.0 + 1e-4) / 1.5;
    GeneratorSet::new(
        vec![
            element(&[&[2.0, 1.0], &[1.0, 1.0]])?,
            element(&[&[1.0, 1.0], &[1.0, 2.0]])?,
            element(&[&[1.5, 0.01], &[0.01, d]])?,
            element(&[&[d, 0.01], &[0.01, 1.5]])?,
        ],
        "positive matrices of SL(2)",
    )
}

/// `g(x, y)_ij = (2 if i = j else 1) · y_i / x_j`, rescaled to determinant 1.
fn transitive_family(x: [f64; 3], y: [f64; 3]) -> Result<GroupElement> {
    let data: Vec<f64> = (0..9)
        .map(|k| {
            let (i, j) = (k / 3, k % 3);
            let diag = if i == j { 2.0 } else { 1.0 };
            diag * y[i] / x[j]
        })
        .collect();
    GroupElement::normalized(Matrix::from_row_slice(3, &data)?)
}

pub fn slplus3() -> Result<GeneratorSet> {
    let a = transitive_family([1.0, 1.0, 1.0], [4.0, 2.0, 1.0])?;
    let at = GroupElement::normalized(a.matrix().transpose())?;
    GeneratorSet::new(
        vec![
            a,
            at,
            transitive_family([1.0, 2.0, 4.0], [4.0, 1.0, 2.0])?,
            transitive_family([2.0, 1.0, 4.0], [1.0, 4.0, 2.0])?,
        ],
        "positive matrices of SL(3)",
    )
}

fn plane_rotation(n: usize, i: usize, j: usize, theta: f64) -> Matrix {
    let mut r = Matrix::identity(n);
    let (s, c) = theta.sin_cos();
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    r
}

/// A regular diagonal element, its inverse, and rotations by angles that are
/// irrational multiples of π in consecutive coordinate planes.
pub fn full_group(n: usize) -> Result<GeneratorSet> {
    let diag: Vec<f64> = (0..n).map(|i| 2f64.powf((n as f64 - 1.0) / 2.0 - i as f64)).collect();
    let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let mut gens = vec![GroupElement::normalized(Matrix::diag(&diag))?, GroupElement::normalized(Matrix::diag(&inv))?];
    for i in 0..n - 1 {
        gens.push(GroupElement::new(plane_rotation(n, i, i + 1, 1.0 + 0.5 * i as f64))?);
    }
    GeneratorSet::new(gens, format!("generators of SL({n})"))
}
