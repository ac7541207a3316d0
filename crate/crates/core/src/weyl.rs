//! The finite groups attached to the diagonal torus of SL(n, ℝ).
//!
//! * `M`: diagonal sign matrices of determinant 1 ([`SignVector`]).
//! * `M*`: signed permutation matrices of determinant 1 ([`SignedPermutation`]).
//! * `W = M*/M ≅ Sₙ` ([`WeylElement`]).
//!
//! `M` is discrete here, so the canonical groups are `U ≅ M*` and `C ≅ M`.
//! A signed permutation `u` has `u[i][perm[i]] = signs[i]`, so conjugating a
//! diagonal `d` by `u` gives `d'[i] = d[perm[i]]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

type Small<T> = SmallVec<[T; 4]>;

/// Operations shared by the finite groups, used by coset enumeration.
pub trait FiniteGroupElement: Clone + PartialEq + fmt::Debug {
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
}

/// A permutation of `{0, …, n−1}`; serialized 1-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    perm: Small<u8>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n as u8).collect() }
    }

    /// From a 0-based one-line notation.
    pub fn from_perm(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let seen: BTreeSet<usize> = perm.iter().copied().collect();
        if seen.len() != n || perm.iter().any(|&p| p >= n) {
            return Err(Error::Dimension(format!("{perm:?} is not a permutation")));
        }
        Ok(Self { perm: perm.iter().map(|&p| p as u8).collect() })
    }

    /// The transposition of `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut w = Self::identity(n);
        w.perm.swap(i, j);
        w
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> Vec<usize> {
        self.perm.iter().map(|&p| p as usize).collect()
    }

    pub fn image(&self, i: usize) -> usize {
        self.perm[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// +1 for even permutations, −1 for odd ones.
    pub fn sign(&self) -> i8 {
        let inversions = (0..self.n())
            .flat_map(|i| (i + 1..self.n()).map(move |j| (i, j)))
            .filter(|&(i, j)| self.perm[i] > self.perm[j])
            .count();
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The least element of `M*` in enumeration order with this Weyl class.
    pub fn lift(&self) -> SignedPermutation {
        let mut signs: Small<i8> = SmallVec::from_elem(1, self.n());
        if self.sign() < 0 {
            signs[self.n() - 1] = -1;
        }
        SignedPermutation { perm: self.clone(), signs }
    }

    /// Acts on a diagonal by coordinate permutation: `d'[i] = d[perm[i]]`.
    pub fn act_on_diagonal<T: Copy>(&self, d: &[T]) -> Vec<T> {
        self.perm.iter().map(|&p| d[p as usize]).collect()
    }
}

impl FiniteGroupElement for WeylElement {
    fn compose(&self, other: &Self) -> Self {
        Self { perm: self.perm.iter().map(|&p| other.perm[p as usize]).collect() }
    }

    fn inverse(&self) -> Self {
        let mut inv: Small<u8> = SmallVec::from_elem(0, self.n());
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        Self { perm: inv }
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{:?}", self.perm.iter().map(|p| p + 1).collect::<Vec<_>>())
    }
}

impl Serialize for WeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            perm: Vec<usize>,
        }
        Repr { perm: self.perm.iter().map(|&p| p as usize + 1).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            perm: Vec<usize>,
        }
        let r = Repr::deserialize(d)?;
        let zero: Vec<usize> = r.perm.iter().map(|p| p.wrapping_sub(1)).collect();
        WeylElement::from_perm(&zero).map_err(serde::de::Error::custom)
    }
}

/// An element of `M`: a sign vector with product +1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector {
    signs: Small<i8>,
}

impl SignVector {
    pub fn identity(n: usize) -> Self {
        Self { signs: SmallVec::from_elem(1, n) }
    }

    pub fn new(signs: &[i8]) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Dimension(format!("{signs:?} is not a sign vector")));
        }
        if signs.iter().filter(|&&s| s < 0).count() % 2 != 0 {
            return Err(Error::Dimension(format!("{signs:?} has product -1")));
        }
        Ok(Self { signs: signs.iter().copied().collect() })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::diag(&self.as_f64())
    }

    pub fn as_signed_permutation(&self) -> SignedPermutation {
        SignedPermutation { perm: WeylElement::identity(self.n()), signs: self.signs.clone() }
    }

    /// Bitmask with bit `i` set when `signs[i] = −1`; composition is XOR.
    pub fn mask(&self) -> u8 {
        self.signs.iter().enumerate().fold(0, |m, (i, &s)| if s < 0 { m | (1 << i) } else { m })
    }

    pub fn from_mask(n: usize, mask: u8) -> Result<Self> {
        let signs: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        Self::new(&signs)
    }
}

impl FiniteGroupElement for SignVector {
    fn compose(&self, other: &Self) -> Self {
        Self { signs: self.signs.iter().zip(&other.signs).map(|(a, b)| a * b).collect() }
    }

    fn inverse(&self) -> Self {
        self.clone()
    }
}

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(s: SignVector) -> Self {
        s.signs.to_vec()
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.signs.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
        write!(f, "({s})")
    }
}

/// An element of `M*`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: WeylElement,
    signs: Small<i8>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self { perm: WeylElement::identity(n), signs: SmallVec::from_elem(1, n) }
    }

    pub fn new(perm: WeylElement, signs: &[i8]) -> Result<Self> {
        if signs.len() != perm.n() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Dimension(format!("bad sign vector {signs:?}")));
        }
        let u = Self { perm, signs: signs.iter().copied().collect() };
        if u.det() != 1 {
            return Err(Error::Dimension(format!("{u:?} has determinant -1")));
        }
        Ok(u)
    }

    /// Recovers a signed permutation from its matrix, if it is one.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Option<Self> {
        let n = m.dim();
        let mut perm = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<f64> = (0..n).map(|j| m[(i, j)]).collect();
            let j = (0..n).find(|&j| (row[j].abs() - 1.0).abs() <= tol)?;
            if row.iter().enumerate().any(|(k, x)| k != j && x.abs() > tol) {
                return None;
            }
            perm.push(j);
            signs.push(if row[j] > 0.0 { 1 } else { -1 });
        }
        Self::new(WeylElement::from_perm(&perm).ok()?, &signs).ok()
    }

    pub fn n(&self) -> usize {
        self.perm.n()
    }

    pub fn weyl(&self) -> &WeylElement {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn det(&self) -> i8 {
        self.perm.sign() * self.signs.iter().product::<i8>()
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.n();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, self.perm.image(i))] = f64::from(self.signs[i]);
        }
        m
    }

    /// The sign part when the permutation is trivial.
    pub fn as_sign_vector(&self) -> Option<SignVector> {
        self.perm.is_identity().then(|| SignVector { signs: self.signs.clone() })
    }

    fn sort_key(&self) -> (Small<u8>, Small<u8>) {
        (self.perm.perm.clone(), self.signs.iter().map(|&s| u8::from(s < 0)).collect())
    }
}

impl FiniteGroupElement for SignedPermutation {
    fn compose(&self, other: &Self) -> Self {
        let signs = (0..self.n()).map(|i| self.signs[i] * other.signs[self.perm.image(i)]).collect();
        Self { perm: self.perm.compose(&other.perm), signs }
    }

    fn inverse(&self) -> Self {
        let inv = self.perm.inverse();
        let signs = (0..self.n()).map(|j| self.signs[inv.image(j)]).collect();
        Self { perm: inv, signs }
    }
}

impl PartialOrd for SignedPermutation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignedPermutation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.signs.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
        write!(f, "u{:?}({s})", self.perm.perm.iter().map(|p| p + 1).collect::<Vec<_>>())
    }
}

#[derive(Serialize, Deserialize)]
struct SignedPermutationRepr {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl Serialize for SignedPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignedPermutationRepr {
            perm: self.perm.perm.iter().map(|&p| p as usize + 1).collect(),
            signs: self.signs.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedPermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SignedPermutationRepr::deserialize(d)?;
        let zero: Vec<usize> = r.perm.iter().map(|p| p.wrapping_sub(1)).collect();
        let w = WeylElement::from_perm(&zero).map_err(serde::de::Error::custom)?;
        SignedPermutation::new(w, &r.signs).map_err(serde::de::Error::custom)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// All sign patterns of length `n`, `+` before `−`, lexicographically.
fn sign_patterns(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { -1 } else { 1 }).collect())
}

/// `M`: the `2^(n−1)` sign vectors with product +1, lexicographic with `+ < −`.
pub fn enumerate_m(n: usize) -> Vec<SignVector> {
    sign_patterns(n).filter_map(|s| SignVector::new(&s).ok()).collect()
}

/// `M*`: the `2^(n−1)·n!` signed permutations of determinant +1, ordered by
/// one-line notation and then signs.
pub fn enumerate_mstar(n: usize) -> Vec<SignedPermutation> {
    permutations(n)
        .into_iter()
        .flat_map(|p| {
            let w = WeylElement::from_perm(&p).expect("generated permutation");
            sign_patterns(n).filter_map(move |s| SignedPermutation::new(w.clone(), &s).ok())
        })
        .collect()
}

/// `W ≅ Sₙ` in lexicographic order.
pub fn enumerate_w(n: usize) -> Vec<WeylElement> {
    permutations(n).iter().map(|p| WeylElement::from_perm(p).expect("generated permutation")).collect()
}

/// The Weyl class of `u`: its underlying permutation.
pub fn weyl_class(u: &SignedPermutation) -> WeylElement {
    u.perm.clone()
}

/// `w c w⁻¹`, i.e. the signs of `c` permuted by `w`.
pub fn conjugate_c_by_w(w: &WeylElement, c: &SignVector) -> SignVector {
    SignVector { signs: w.act_on_diagonal(&c.signs).into_iter().collect() }
}

/// A subgroup together with the partition of the ambient group into right cosets `H g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosetTable<T> {
    pub subgroup: Vec<T>,
    pub cosets: Vec<Vec<T>>,
}

impl<T> CosetTable<T> {
    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn representatives(&self) -> impl Iterator<Item = &T> {
        self.cosets.iter().filter_map(|c| c.first())
    }
}

/// Checks that `subset` is a subgroup of `group`.
pub fn check_subgroup<T: FiniteGroupElement>(subset: &[T], group: &[T]) -> Result<()> {
    let inside = |x: &T| subset.contains(x);
    if subset.is_empty() {
        return Err(Error::NotASubgroup("empty set".into()));
    }
    if let Some(x) = subset.iter().find(|x| !group.contains(x)) {
        return Err(Error::NotASubgroup(format!("{x:?} is not in the group")));
    }
    for a in subset {
        if !inside(&a.inverse()) {
            return Err(Error::NotASubgroup(format!("inverse of {a:?} missing")));
        }
        if let Some(b) = subset.iter().find(|b| !inside(&a.compose(b))) {
            return Err(Error::NotASubgroup(format!("{a:?}·{b:?} missing")));
        }
    }
    Ok(())
}

/// Partitions `group` into right cosets `H g` of `subgroup`. Each coset lists its
/// elements in `group` order, so its first entry is the least representative.
pub fn right_cosets<T: FiniteGroupElement>(subgroup: &[T], group: &[T]) -> Result<CosetTable<T>> {
    check_subgroup(subgroup, group)?;
    let mut assigned = vec![false; group.len()];
    let mut cosets = Vec::new();
    for (i, g) in group.iter().enumerate() {
        if assigned[i] {
            continue;
        }
        let members: Vec<T> = subgroup.iter().map(|h| h.compose(g)).collect();
        let mut coset = Vec::with_capacity(members.len());
        for (j, x) in group.iter().enumerate() {
            if members.contains(x) {
                assigned[j] = true;
                coset.push(x.clone());
            }
        }
        cosets.push(coset);
    }
    Ok(CosetTable { subgroup: subgroup.to_vec(), cosets })
}
