//! The Weyl group `W ≅ {±1}ⁿ` of the Hilbert group, characters of its torus in
//! the ambient Siegel coordinates `(a₁, …, aₙ; c)`, and the character pullback
//! along the zip-flag morphism.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("sign entries must be +1 or -1, got {0}")]
    BadSign(i64),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("character ({a:?}; {c}) violates the parity condition sum(a) = c mod 2")]
    Parity { a: Vec<i64>, c: i64 },
    #[error("{0:?} is not a permutation of 0..n")]
    NotAPermutation(Vec<usize>),
}

/// An element of `∏ S₂`, stored as one sign per factor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct WeylElem {
    signs: Vec<i8>,
}

impl TryFrom<Vec<i64>> for WeylElem {
    type Error = WeylError;
    fn try_from(v: Vec<i64>) -> Result<Self, WeylError> {
        WeylElem::new(&v)
    }
}

impl From<WeylElem> for Vec<i64> {
    fn from(w: WeylElem) -> Vec<i64> {
        w.signs.iter().map(|&s| s as i64).collect()
    }
}

impl fmt::Debug for WeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElem({self})")
    }
}

/// Sign string such as `+-+`.
impl fmt::Display for WeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl WeylElem {
    pub fn new(signs: &[i64]) -> Result<WeylElem, WeylError> {
        let signs = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                other => Err(WeylError::BadSign(other)),
            })
            .collect::<Result<_, _>>()?;
        Ok(WeylElem { signs })
    }

    pub fn identity(n: usize) -> WeylElem {
        WeylElem { signs: vec![1; n] }
    }

    /// The longest element `w₀ = (−1, …, −1)`.
    pub fn longest(n: usize) -> WeylElem {
        WeylElem { signs: vec![-1; n] }
    }

    /// The element with sign −1 exactly at the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> WeylElem {
        WeylElem { signs: (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect() }
    }

    pub fn mask(&self) -> u64 {
        self.signs.iter().enumerate().filter(|(_, &s)| s < 0).map(|(i, _)| 1u64 << i).sum()
    }

    /// All `2ⁿ` elements, ordered by [`WeylElem::mask`].
    pub fn all(n: usize) -> impl Iterator<Item = WeylElem> {
        (0..1u64 << n).map(move |m| WeylElem::from_mask(n, m))
    }

    pub fn rank(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, i: usize) -> i8 {
        self.signs[i]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Number of −1 entries.
    pub fn length(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn mul(&self, other: &WeylElem) -> Result<WeylElem, WeylError> {
        self.same_rank(other.rank())?;
        Ok(WeylElem { signs: self.signs.iter().zip(&other.signs).map(|(a, b)| a * b).collect() })
    }

    /// Every element is an involution.
    pub fn inverse(&self) -> WeylElem {
        self.clone()
    }

    /// `u ≤ w` in the Bruhat order: every −1 of `u` is a −1 of `w`.
    pub fn bruhat_leq(&self, w: &WeylElem) -> Result<bool, WeylError> {
        self.same_rank(w.rank())?;
        Ok(self.signs.iter().zip(&w.signs).all(|(&u, &v)| u > 0 || v < 0))
    }

    fn same_rank(&self, n: usize) -> Result<(), WeylError> {
        if self.rank() == n {
            Ok(())
        } else {
            Err(WeylError::RankMismatch(self.rank(), n))
        }
    }
}

pub fn length(w: &WeylElem) -> usize {
    w.length()
}

pub fn bruhat_leq(u: &WeylElem, w: &WeylElem) -> Result<bool, WeylError> {
    u.bruhat_leq(w)
}

/// A character `(a₁, …, aₙ; c)`, i.e. `diag(tᵢz, tᵢ⁻¹z) ↦ ∏ tᵢ^{aᵢ} z^c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub a: Vec<i64>,
    pub c: i64,
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.a.iter().map(i64::to_string).collect();
        write!(f, "({}; {})", a.join(","), self.c)
    }
}

impl Character {
    /// A realizable character; rejects `Σaᵢ ≢ c (mod 2)`.
    pub fn new(a: Vec<i64>, c: i64) -> Result<Character, WeylError> {
        let chi = Character { a, c };
        if chi.is_realizable() {
            Ok(chi)
        } else {
            Err(WeylError::Parity { a: chi.a, c: chi.c })
        }
    }

    /// No parity check; for probing weights that do not occur.
    pub fn unchecked(a: Vec<i64>, c: i64) -> Character {
        Character { a, c }
    }

    pub fn zero(n: usize) -> Character {
        Character { a: vec![0; n], c: 0 }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn is_realizable(&self) -> bool {
        (self.a.iter().sum::<i64>() - self.c).rem_euclid(2) == 0
    }

    pub fn add(&self, other: &Character) -> Result<Character, WeylError> {
        if self.rank() != other.rank() {
            return Err(WeylError::RankMismatch(self.rank(), other.rank()));
        }
        Ok(Character { a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(), c: self.c + other.c })
    }

    pub fn scale(&self, k: i64) -> Character {
        Character { a: self.a.iter().map(|x| k * x).collect(), c: k * self.c }
    }

    pub fn neg(&self) -> Character {
        self.scale(-1)
    }
}

/// A permutation of `0..n`, `perm[i]` being the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm(Vec<usize>);

impl TryFrom<Vec<usize>> for Perm {
    type Error = WeylError;
    fn try_from(v: Vec<usize>) -> Result<Self, WeylError> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Vec<usize> {
        p.0
    }
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Perm, WeylError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(WeylError::NotAPermutation(images));
            }
        }
        Ok(Perm(images))
    }

    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    /// The n-cycle `i ↦ i + 1 (mod n)`.
    pub fn cycle(n: usize) -> Perm {
        Perm((0..n).map(|i| (i + 1) % n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// The Hilbert cocharacter datum: degree, prime, Galois permutation and `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocharDatum {
    pub n: usize,
    pub p: u32,
    pub sigma: Perm,
    pub z: WeylElem,
}

impl CocharDatum {
    pub fn new(n: usize, p: u32, sigma: Perm) -> Result<CocharDatum, WeylError> {
        if sigma.len() != n {
            return Err(WeylError::RankMismatch(sigma.len(), n));
        }
        // P = B here, so z = w₀·w₀,I⁺ = w₀.
        Ok(CocharDatum { n, p, sigma, z: WeylElem::longest(n) })
    }

    /// `p` split in the totally real field.
    pub fn split(n: usize, p: u32) -> CocharDatum {
        Self::new(n, p, Perm::identity(n)).expect("identity has rank n")
    }

    /// `p` inert: Galois rotates the embeddings.
    pub fn inert(n: usize, p: u32) -> CocharDatum {
        Self::new(n, p, Perm::cycle(n)).expect("cycle has rank n")
    }
}

/// `η = (−1, …, −1; −n)`.
pub fn hodge_character(datum: &CocharDatum) -> Character {
    Character { a: vec![-1; datum.n], c: -(datum.n as i64) }
}

/// `aᵢ ↦ wᵢ·aᵢ`, `c` fixed.
pub fn weyl_act(w: &WeylElem, chi: &Character) -> Result<Character, WeylError> {
    if w.rank() != chi.rank() {
        return Err(WeylError::RankMismatch(w.rank(), chi.rank()));
    }
    Ok(Character { a: chi.a.iter().zip(w.signs()).map(|(&x, &s)| s as i64 * x).collect(), c: chi.c })
}

/// Galois action `^σχ`: the entry at `i` moves to `σ(i)`.
pub fn galois_act(sigma: &Perm, chi: &Character) -> Result<Character, WeylError> {
    if sigma.len() != chi.rank() {
        return Err(WeylError::RankMismatch(sigma.len(), chi.rank()));
    }
    let mut a = vec![0; chi.rank()];
    for (i, &x) in chi.a.iter().enumerate() {
        a[sigma.apply(i)] = x;
    }
    Ok(Character { a, c: chi.c })
}

/// `μ + p·^{σ⁻¹}(z·ν)`: the zip-flag character pulled back from `L_Sbt(μ, ν)`.
pub fn zipflag_pullback(mu: &Character, nu: &Character, datum: &CocharDatum) -> Result<Character, WeylError> {
    let twisted = galois_act(&datum.sigma.inverse(), &weyl_act(&datum.z, nu)?)?;
    mu.add(&twisted.scale(datum.p as i64))
}
