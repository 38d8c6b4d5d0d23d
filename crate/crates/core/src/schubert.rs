//! The flag variety `G/B ≅ (ℙ¹)ⁿ` of the Hilbert group: multihomogeneous
//! polynomials in the coordinate pairs `[x_{i0} : x_{i1}]`, the Hasse section
//! `∏ x_{i0}`, Bruhat words of group elements and exact vanishing orders.
//!
//! `B` is the lower-triangular Borel, so `gB ↦ g·[0:1]` identifies `G/B` with
//! `(ℙ¹)ⁿ`, the base point is `[0:1]`, and the open cell is `{[1:t]}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::Matrix;
use crate::field::FieldCtx;
use crate::weylchar::{Character, CocharDatum, WeylElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchubertError {
    #[error("the zero polynomial has no vanishing order")]
    ZeroPolynomial,
    #[error("[0:0] is not a point of the projective line (factor {0})")]
    NotAPoint(usize),
    #[error("factor {0} is not invertible")]
    Singular(usize),
    #[error("factor count mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("malformed polynomial term: {0}")]
    BadTerm(String),
}

/// Vanishing order, with a distinguished value for an identically vanishing restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// Sparse polynomial in `nvars` affine variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePoly {
    ctx: Arc<FieldCtx>,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, u32>,
}

impl AffinePoly {
    pub fn zero(ctx: &Arc<FieldCtx>, nvars: usize) -> AffinePoly {
        AffinePoly { ctx: ctx.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<FieldCtx>, nvars: usize, c: u32) -> AffinePoly {
        let mut p = Self::zero(ctx, nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(ctx: &Arc<FieldCtx>, nvars: usize, j: usize) -> AffinePoly {
        let mut e = vec![0; nvars];
        e[j] = 1;
        let mut p = Self::zero(ctx, nvars);
        p.add_term(e, ctx.one());
        p
    }

    /// `x_j + c`.
    pub fn shifted_var(ctx: &Arc<FieldCtx>, nvars: usize, j: usize, c: u32) -> AffinePoly {
        let mut p = Self::var(ctx, nvars, j);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, u32)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: u32) {
        assert_eq!(exps.len(), self.nvars);
        if c == 0 {
            return;
        }
        let f = &self.ctx;
        let entry = self.terms.entry(exps).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, other: &AffinePoly) -> AffinePoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn mul(&self, other: &AffinePoly) -> AffinePoly {
        let f = &self.ctx;
        let mut out = Self::zero(f, self.nvars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, f.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> AffinePoly {
        (0..e).fold(Self::constant(&self.ctx, self.nvars, self.ctx.one()), |acc, _| acc.mul(self))
    }

    /// Replaces variable `j` by `images[j]`; all images share one variable set.
    pub fn substitute(&self, images: &[AffinePoly]) -> AffinePoly {
        assert_eq!(images.len(), self.nvars);
        let target_vars = images.first().map_or(0, |p| p.nvars);
        let mut out = Self::zero(&self.ctx, target_vars);
        for (e, c) in self.terms() {
            let mut term = Self::constant(&self.ctx, target_vars, c);
            for (j, &d) in e.iter().enumerate() {
                if d > 0 {
                    term = term.mul(&images[j].pow(d));
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval(&self, point: &[u32]) -> u32 {
        let f = &self.ctx;
        self.terms().fold(0, |acc, (e, c)| {
            let v = e.iter().zip(point).fold(c, |m, (&d, &x)| f.mul(m, f.pow(x, d as u64)));
            f.add(acc, v)
        })
    }

    /// Order at the origin: least total degree of a surviving monomial.
    pub fn order_at_origin(&self) -> Order {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }

    /// Order at an arbitrary point: translate it to the origin first.
    pub fn order_at(&self, point: &[u32]) -> Order {
        assert_eq!(point.len(), self.nvars);
        let shifts: Vec<AffinePoly> =
            (0..self.nvars).map(|j| Self::shifted_var(&self.ctx, self.nvars, j, point[j])).collect();
        self.substitute(&shifts).order_at_origin()
    }
}

/// Polynomial in the pairs `(x_{i0}, x_{i1})`, `i = 1…n`; each term records
/// the per-factor exponent pair.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ctx: Arc<FieldCtx>,
    n: usize,
    terms: BTreeMap<Vec<(u32, u32)>, u32>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

/// `x10*x20`-style rendering, factors numbered from 1.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let ctx = &self.ctx;
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut parts = Vec::new();
                if c != ctx.one() {
                    parts.push(crate::field::FieldElem::new(ctx, c).to_string());
                }
                for (i, &(d0, d1)) in e.iter().enumerate() {
                    for (side, d) in [(0, d0), (1, d1)] {
                        match d {
                            0 => {}
                            1 => parts.push(format!("x{}{}", i + 1, side)),
                            d => parts.push(format!("x{}{}^{}", i + 1, side, d)),
                        }
                    }
                }
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TermRepr {
    exps: Vec<[u32; 2]>,
    coeff: Vec<u32>,
}

impl MultiPoly {
    pub fn zero(ctx: &Arc<FieldCtx>, n: usize) -> MultiPoly {
        MultiPoly { ctx: ctx.clone(), n, terms: BTreeMap::new() }
    }

    pub fn monomial(ctx: &Arc<FieldCtx>, exps: Vec<(u32, u32)>, coeff: u32) -> MultiPoly {
        let mut p = Self::zero(ctx, exps.len());
        p.add_term(exps, coeff);
        p
    }

    /// `∏ x_{i,εᵢ}` with `εᵢ` the i-th bit of `mask`.
    pub fn basis_monomial(ctx: &Arc<FieldCtx>, n: usize, mask: u64) -> MultiPoly {
        let exps = (0..n).map(|i| if mask >> i & 1 == 1 { (0, 1) } else { (1, 0) }).collect();
        Self::monomial(ctx, exps, ctx.one())
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<(u32, u32)>, u32)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn add_term(&mut self, exps: Vec<(u32, u32)>, c: u32) {
        assert_eq!(exps.len(), self.n);
        if c == 0 {
            return;
        }
        let f = self.ctx.clone();
        let entry = self.terms.entry(exps).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn scale(&self, c: u32) -> MultiPoly {
        let mut out = Self::zero(&self.ctx, self.n);
        for (e, v) in self.terms() {
            out.add_term(e.clone(), self.ctx.mul(v, c));
        }
        out
    }

    /// Whether every term has bidegree `(1, …, 1)`, i.e. `f` is a section of `O(1, …, 1)`.
    pub fn is_section_of_o1(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&(a, b)| a + b == 1))
    }

    /// Multidegree of a multihomogeneous polynomial, `None` if mixed.
    pub fn multidegree(&self) -> Option<Vec<u32>> {
        let mut degs = self.terms.keys().map(|e| e.iter().map(|&(a, b)| a + b).collect::<Vec<_>>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    fn to_affine(&self) -> AffinePoly {
        let mut out = AffinePoly::zero(&self.ctx, 2 * self.n);
        for (e, c) in self.terms() {
            out.add_term(e.iter().flat_map(|&(a, b)| [a, b]).collect(), c);
        }
        out
    }

    fn from_affine(ctx: &Arc<FieldCtx>, p: &AffinePoly) -> MultiPoly {
        let n = p.nvars() / 2;
        let mut out = Self::zero(ctx, n);
        for (e, c) in p.terms() {
            out.add_term(e.chunks(2).map(|d| (d[0], d[1])).collect(), c);
        }
        out
    }

    pub fn eval(&self, pt: &PointP1n) -> u32 {
        let coords: Vec<u32> = pt.coords.iter().flat_map(|&(u, v)| [u, v]).collect();
        self.to_affine().eval(&coords)
    }

    /// `(g·f)(x) = f(g⁻¹x)`, factorwise.
    pub fn act(&self, g: &GroupElem) -> Result<MultiPoly, SchubertError> {
        if g.n() != self.n {
            return Err(SchubertError::RankMismatch(g.n(), self.n));
        }
        if **g.ctx() != *self.ctx {
            return Err(SchubertError::ContextMismatch);
        }
        let f = &self.ctx;
        let inv = g.inverse();
        let vars = 2 * self.n;
        let mut images = Vec::with_capacity(vars);
        for m in &inv.factors {
            let i = images.len();
            for row in 0..2 {
                let mut lin = AffinePoly::zero(f, vars);
                let mut e0 = vec![0; vars];
                e0[i] = 1;
                let mut e1 = vec![0; vars];
                e1[i + 1] = 1;
                lin.add_term(e0, m[2 * row]);
                lin.add_term(e1, m[2 * row + 1]);
                images.push(lin);
            }
        }
        Ok(Self::from_affine(f, &self.to_affine().substitute(&images)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermRepr> = self
            .terms()
            .map(|(e, c)| TermRepr { exps: e.iter().map(|&(a, b)| [a, b]).collect(), coeff: self.ctx.decode(c) })
            .collect();
        serde_json::to_value(terms).expect("plain data serializes")
    }

    pub fn from_json(ctx: &Arc<FieldCtx>, n: usize, value: &serde_json::Value) -> Result<MultiPoly, SchubertError> {
        let terms: Vec<TermRepr> =
            serde_json::from_value(value.clone()).map_err(|e| SchubertError::BadTerm(e.to_string()))?;
        let mut out = Self::zero(ctx, n);
        for t in terms {
            if t.exps.len() != n || t.coeff.len() != ctx.k() || t.coeff.iter().any(|&c| c >= ctx.p()) {
                return Err(SchubertError::BadTerm(format!("{t:?}")));
            }
            out.add_term(t.exps.iter().map(|e| (e[0], e[1])).collect(), ctx.encode(&t.coeff));
        }
        Ok(out)
    }
}

/// `h_Sbt = ∏ x_{i0}`.
pub fn hasse_section(n: usize, ctx: &Arc<FieldCtx>) -> MultiPoly {
    MultiPoly::basis_monomial(ctx, n, 0)
}

/// The `2ⁿ` monomials `∏ x_{i,εᵢ}` spanning `H⁰(O(1, …, 1))`.
pub fn section_space_basis(n: usize, ctx: &Arc<FieldCtx>) -> Vec<MultiPoly> {
    (0..1u64 << n).map(|m| MultiPoly::basis_monomial(ctx, n, m)).collect()
}

/// Torus weight of a monomial under `(t·f)(x) = f(t⁻¹x)` with
/// `t = (diag(tᵢz, tᵢ⁻¹z))ᵢ`: `x_{i0}` has weight `tᵢ⁻¹z⁻¹`, `x_{i1}` has `tᵢz⁻¹`.
pub fn monomial_weight(exps: &[(u32, u32)]) -> Character {
    let a = exps.iter().map(|&(d0, d1)| d1 as i64 - d0 as i64).collect();
    let c = -exps.iter().map(|&(d0, d1)| (d0 + d1) as i64).sum::<i64>();
    Character::unchecked(a, c)
}

/// Basis of the `target` weight space inside the bidegree-`(1, …, 1)` sections.
pub fn torus_weight_space(n: usize, ctx: &Arc<FieldCtx>, target: &Character) -> Vec<MultiPoly> {
    section_space_basis(n, ctx)
        .into_iter()
        .filter(|m| {
            let (exps, _) = m.terms().next().expect("monomials are nonzero");
            monomial_weight(exps) == *target
        })
        .collect()
}

/// A point of `(ℙ¹)ⁿ`, each pair scaled so its first nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointP1n {
    coords: Vec<(u32, u32)>,
}

impl PointP1n {
    pub fn new(ctx: &Arc<FieldCtx>, coords: &[(u32, u32)]) -> Result<PointP1n, SchubertError> {
        let coords = coords
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| match (u, v) {
                (0, 0) => Err(SchubertError::NotAPoint(i)),
                (0, _) => Ok((0, ctx.one())),
                (u, v) => Ok((ctx.one(), ctx.mul(v, ctx.inv(u).expect("u is nonzero")))),
            })
            .collect::<Result<_, _>>()?;
        Ok(PointP1n { coords })
    }

    pub fn coords(&self) -> &[(u32, u32)] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Affine chart of factor `i`: `[1:t]` (open) or `[0:1]`.
    fn chart_var(&self, ctx: &Arc<FieldCtx>, i: usize) -> [AffinePoly; 2] {
        let n = self.n();
        match self.coords[i] {
            (0, _) => [AffinePoly::var(ctx, n, i), AffinePoly::constant(ctx, n, ctx.one())],
            (_, v) => [AffinePoly::constant(ctx, n, ctx.one()), AffinePoly::shifted_var(ctx, n, i, v)],
        }
    }
}

/// The rational points of the cell `C(w)`: `[1:t]` where `wᵢ = −1`, `[0:1]` where `wᵢ = +1`.
pub fn cell_points(ctx: &Arc<FieldCtx>, w: &WeylElem) -> Vec<PointP1n> {
    let n = w.rank();
    let free: Vec<usize> = (0..n).filter(|&i| w.sign(i) < 0).collect();
    let q = ctx.order() as u64;
    let total = q.pow(free.len() as u32);
    (0..total)
        .map(|mut idx| {
            let mut coords = vec![(0, ctx.one()); n];
            for &i in free.iter().rev() {
                coords[i] = (ctx.one(), (idx % q) as u32);
                idx /= q;
            }
            PointP1n { coords }
        })
        .collect()
}

/// Stratum of a point: `−1` in factor `i` iff the point is off `[0:1]`.
pub fn cell_of_point(pt: &PointP1n) -> WeylElem {
    let mask = pt.coords.iter().enumerate().filter(|(_, &(u, _))| u != 0).map(|(i, _)| 1u64 << i).sum();
    WeylElem::from_mask(pt.n(), mask)
}

pub fn vanishing_order_at_point(f: &MultiPoly, pt: &PointP1n) -> Result<Order, SchubertError> {
    if f.is_zero() {
        return Err(SchubertError::ZeroPolynomial);
    }
    if pt.n() != f.n() {
        return Err(SchubertError::RankMismatch(pt.n(), f.n()));
    }
    let images: Vec<AffinePoly> = (0..f.n()).flat_map(|i| pt.chart_var(f.ctx(), i)).collect();
    Ok(f.to_affine().substitute(&images).order_at_origin())
}

/// Order of `f` at the generic point of `C(w)`, computed symbolically: cell
/// parameters `tᵢ` where `wᵢ = −1`, normal parameters `sⱼ = x_{j0}` elsewhere.
pub fn vanishing_order_on_stratum(f: &MultiPoly, w: &WeylElem) -> Result<Order, SchubertError> {
    if f.is_zero() {
        return Err(SchubertError::ZeroPolynomial);
    }
    let n = f.n();
    if w.rank() != n {
        return Err(SchubertError::RankMismatch(w.rank(), n));
    }
    let ctx = f.ctx();
    let one = AffinePoly::constant(ctx, n, ctx.one());
    let images: Vec<AffinePoly> = (0..n)
        .flat_map(|i| {
            let param = AffinePoly::var(ctx, n, i);
            if w.sign(i) < 0 {
                [one.clone(), param]
            } else {
                [param, one.clone()]
            }
        })
        .collect();
    let restricted = f.to_affine().substitute(&images);
    let normal: Vec<usize> = (0..n).filter(|&i| w.sign(i) > 0).collect();
    Ok(restricted
        .terms()
        .map(|(e, _)| normal.iter().map(|&j| e[j] as usize).sum())
        .min()
        .map_or(Order::Infinite, Order::Finite))
}

/// An `n`-tuple of invertible 2×2 matrices; each factor is `[a, b, c, d]` for `[[a, b], [c, d]]`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElem {
    ctx: Arc<FieldCtx>,
    factors: Vec<[u32; 4]>,
}

impl std::hash::Hash for GroupElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.factors.hash(state);
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElem({self})")
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = &self.ctx;
        let show = |v: u32| crate::field::FieldElem::new(ctx, v).to_string();
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|m| format!("[[{},{}],[{},{}]]", show(m[0]), show(m[1]), show(m[2]), show(m[3])))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl GroupElem {
    pub fn new(ctx: &Arc<FieldCtx>, factors: Vec<[u32; 4]>) -> Result<GroupElem, SchubertError> {
        for (i, m) in factors.iter().enumerate() {
            if m.iter().any(|&v| v >= ctx.order()) || mat2_det(ctx, m) == 0 {
                return Err(SchubertError::Singular(i));
            }
        }
        Ok(GroupElem { ctx: ctx.clone(), factors })
    }

    pub fn from_matrices(factors: &[Matrix]) -> Result<GroupElem, SchubertError> {
        let ctx = factors.first().ok_or(SchubertError::RankMismatch(0, 1))?.ctx().clone();
        let raw = factors
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if m.rows() != 2 || m.cols() != 2 {
                    return Err(SchubertError::Singular(i));
                }
                if **m.ctx() != *ctx {
                    return Err(SchubertError::ContextMismatch);
                }
                Ok([m.raw(0, 0), m.raw(0, 1), m.raw(1, 0), m.raw(1, 1)])
            })
            .collect::<Result<_, _>>()?;
        Self::new(&ctx, raw)
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> GroupElem {
        GroupElem { ctx: ctx.clone(), factors: vec![[1, 0, 0, 1]; n] }
    }

    /// `ẇ`: the lift `ṡ = [[0, 1], [−1, 0]]` in every factor where `wᵢ = −1`.
    pub fn weyl_lift(ctx: &Arc<FieldCtx>, w: &WeylElem) -> GroupElem {
        let s = [0, 1, ctx.neg(1), 0];
        let factors = w.signs().iter().map(|&x| if x < 0 { s } else { [1, 0, 0, 1] }).collect();
        GroupElem { ctx: ctx.clone(), factors }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[[u32; 4]] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> Matrix {
        Matrix::from_raw(&self.ctx, 2, 2, self.factors[i].to_vec())
    }

    pub fn det(&self, i: usize) -> u32 {
        mat2_det(&self.ctx, &self.factors[i])
    }

    /// All factor determinants agree.
    pub fn is_hilbert(&self) -> bool {
        self.factors.windows(2).all(|w| mat2_det(&self.ctx, &w[0]) == mat2_det(&self.ctx, &w[1]))
    }

    pub fn mul(&self, other: &GroupElem) -> GroupElem {
        assert_eq!(self.n(), other.n());
        let factors = self.factors.iter().zip(&other.factors).map(|(a, b)| mat2_mul(&self.ctx, a, b)).collect();
        GroupElem { ctx: self.ctx.clone(), factors }
    }

    pub fn inverse(&self) -> GroupElem {
        let factors = self.factors.iter().map(|m| mat2_inv(&self.ctx, m)).collect();
        GroupElem { ctx: self.ctx.clone(), factors }
    }

    /// Coordinates as a flat vector `(a₁, b₁, c₁, d₁, a₂, …)`.
    pub fn flat(&self) -> Vec<u32> {
        self.factors.iter().flatten().copied().collect()
    }

    /// Image `g·[0:1]` in `(ℙ¹)ⁿ = G/B`.
    pub fn flag_point(&self) -> PointP1n {
        let coords: Vec<(u32, u32)> = self.factors.iter().map(|m| (m[1], m[3])).collect();
        PointP1n::new(&self.ctx, &coords).expect("invertible matrices have nonzero columns")
    }
}

pub(crate) fn mat2_det(f: &FieldCtx, m: &[u32; 4]) -> u32 {
    f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2]))
}

pub(crate) fn mat2_mul(f: &FieldCtx, a: &[u32; 4], b: &[u32; 4]) -> [u32; 4] {
    [
        f.add(f.mul(a[0], b[0]), f.mul(a[1], b[2])),
        f.add(f.mul(a[0], b[1]), f.mul(a[1], b[3])),
        f.add(f.mul(a[2], b[0]), f.mul(a[3], b[2])),
        f.add(f.mul(a[2], b[1]), f.mul(a[3], b[3])),
    ]
}

pub(crate) fn mat2_inv(f: &FieldCtx, m: &[u32; 4]) -> [u32; 4] {
    let d = f.inv(mat2_det(f, m)).expect("factor is invertible");
    [f.mul(m[3], d), f.mul(f.neg(m[1]), d), f.mul(f.neg(m[2]), d), f.mul(m[0], d)]
}

/// The Bruhat cell `BẇB` containing `g`: factor `i` is in `B` iff its top-right entry vanishes.
pub fn bruhat_word(g: &GroupElem) -> WeylElem {
    let mask = g.factors.iter().enumerate().filter(|(_, m)| m[1] != 0).map(|(i, _)| 1u64 << i).sum();
    WeylElem::from_mask(g.n(), mask)
}

/// Label of `g`'s zip-flag stratum: the Bruhat cell of `g·ż`.
pub fn stratum_label(g: &GroupElem, datum: &CocharDatum) -> WeylElem {
    bruhat_word(&g.mul(&GroupElem::weyl_lift(g.ctx(), &datum.z)))
}

/// The Hasse section pulled back to the group through `g ↦ g·[0:1]`:
/// `∏ bᵢ` in the coordinates `(aᵢ, bᵢ, cᵢ, dᵢ)` of [`GroupElem::flat`].
pub fn hasse_on_group(n: usize, ctx: &Arc<FieldCtx>) -> AffinePoly {
    product_of_entries(n, ctx, 1)
}

/// The Hasse section pulled back through `g ↦ g·ż` (top-right of `g·ṡ` is `a`): `∏ aᵢ`.
pub fn hasse_on_zip_flag(n: usize, ctx: &Arc<FieldCtx>) -> AffinePoly {
    product_of_entries(n, ctx, 0)
}

fn product_of_entries(n: usize, ctx: &Arc<FieldCtx>, slot: usize) -> AffinePoly {
    let mut e = vec![0; 4 * n];
    for i in 0..n {
        e[4 * i + slot] = 1;
    }
    let mut p = AffinePoly::zero(ctx, 4 * n);
    p.add_term(e, ctx.one());
    p
}

/// Order of a polynomial function on `GL₂ⁿ` at `g`.
pub fn order_on_group(f: &AffinePoly, g: &GroupElem) -> Order {
    f.order_at(&g.flat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weylchar::{hodge_character, weyl_act};

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::new(2, 1).unwrap()
    }

    #[test]
    fn hasse_section_examples() {
        let f = f2();
        assert_eq!(hasse_section(1, &f).to_string(), "x10");
        assert_eq!(hasse_section(2, &f).to_string(), "x10*x20");
        let pt = PointP1n::new(&f, &[(1, 0), (1, 0), (1, 0)]).unwrap();
        assert_eq!(hasse_section(3, &f).eval(&pt), 1);
        assert!(hasse_section(4, &f).is_section_of_o1());
    }

    #[test]
    fn weight_space_examples() {
        let f = FieldCtx::new(5, 1).unwrap();
        for n in 1..=4 {
            let datum = CocharDatum::split(n, 5);
            let eta = hodge_character(&datum);
            assert_eq!(torus_weight_space(n, &f, &eta), vec![hasse_section(n, &f)]);
            let w0eta = weyl_act(&datum.z, &eta).unwrap();
            assert_eq!(torus_weight_space(n, &f, &w0eta), vec![MultiPoly::basis_monomial(&f, n, (1 << n) - 1)]);
        }
        assert!(torus_weight_space(2, &f, &Character::unchecked(vec![-1, 0], -2)).is_empty());
    }

    /// Independent oracle: let every torus element of F_7 act on every section
    /// monomial by substitution and compare with the character value.
    #[test]
    fn weight_space_matches_torus_action() {
        let f = FieldCtx::new(7, 1).unwrap();
        let n = 2;
        let eval_char = |chi: &Character, t: &[u32], z: u32| {
            let mut v = f.pow(z, chi.c.rem_euclid(6) as u64);
            for (i, &a) in chi.a.iter().enumerate() {
                v = f.mul(v, f.pow(t[i], a.rem_euclid(6) as u64));
            }
            v
        };
        let mut tori = Vec::new();
        for t1 in f.units() {
            for t2 in f.units() {
                for z in f.units() {
                    tori.push((vec![t1, t2], z));
                }
            }
        }
        let candidates: Vec<Character> = [-1i64, 1]
            .iter()
            .flat_map(|&a1| [-1i64, 1].into_iter().map(move |a2| Character::new(vec![a1, a2], -2).unwrap()))
            .collect();
        for chi in &candidates {
            let oracle: Vec<MultiPoly> = section_space_basis(n, &f)
                .into_iter()
                .filter(|m| {
                    tori.iter().all(|(t, z)| {
                        let factors = t
                            .iter()
                            .map(|&ti| [f.mul(ti, *z), 0, 0, f.mul(f.inv(ti).unwrap(), *z)])
                            .collect();
                        let g = GroupElem::new(&f, factors).unwrap();
                        m.act(&g).unwrap() == m.scale(eval_char(chi, t, *z))
                    })
                })
                .collect();
            assert_eq!(torus_weight_space(n, &f, chi), oracle, "{chi}");
            assert_eq!(oracle.len(), 1);
        }
    }

    #[test]
    fn section_space_dimension() {
        let f = f2();
        for n in 1..=6 {
            let basis = section_space_basis(n, &f);
            assert_eq!(basis.len(), 1 << n);
            assert!(basis.iter().all(MultiPoly::is_section_of_o1));
        }
    }

    #[test]
    fn point_orders() {
        let f = FieldCtx::new(3, 1).unwrap();
        let h = hasse_section(2, &f);
        let at = |c: &[(u32, u32)]| vanishing_order_at_point(&h, &PointP1n::new(&f, c).unwrap()).unwrap();
        assert_eq!(at(&[(1, 1), (1, 1)]), Order::Finite(0));
        assert_eq!(at(&[(0, 1), (1, 1)]), Order::Finite(1));
        assert_eq!(at(&[(0, 1), (0, 1)]), Order::Finite(2));
        // Scaling representatives does not move the point.
        assert_eq!(at(&[(0, 2), (2, 2)]), Order::Finite(1));
        assert_eq!(
            vanishing_order_at_point(&MultiPoly::zero(&f, 2), &PointP1n::new(&f, &[(1, 1), (1, 1)]).unwrap()),
            Err(SchubertError::ZeroPolynomial)
        );
        assert_eq!(PointP1n::new(&f, &[(0, 0)]).unwrap_err(), SchubertError::NotAPoint(0));
    }

    #[test]
    fn point_order_of_a_non_monomial_section() {
        // x10*x21 - x11*x20 vanishes on the diagonal of P¹ × P¹ to order 1, elsewhere not at all.
        let f = FieldCtx::new(3, 1).unwrap();
        let mut g = MultiPoly::zero(&f, 2);
        g.add_term(vec![(1, 0), (0, 1)], 1);
        g.add_term(vec![(0, 1), (1, 0)], f.neg(1));
        for a in f.elements() {
            for b in f.elements() {
                let pt = PointP1n::new(&f, &[(1, a), (1, b)]).unwrap();
                let expected = if a == b { 1 } else { 0 };
                assert_eq!(vanishing_order_at_point(&g, &pt).unwrap(), Order::Finite(expected));
            }
        }
        // Its square vanishes doubly there.
        let sq = MultiPoly::from_affine(&f, &g.to_affine().mul(&g.to_affine()));
        let pt = PointP1n::new(&f, &[(1, 2), (1, 2)]).unwrap();
        assert_eq!(vanishing_order_at_point(&sq, &pt).unwrap(), Order::Finite(2));
    }

    #[test]
    fn stratum_orders() {
        let f = f2();
        let h = hasse_section(3, &f);
        let w = |s: &[i64]| WeylElem::new(s).unwrap();
        assert_eq!(vanishing_order_on_stratum(&h, &w(&[-1, -1, -1])).unwrap(), Order::Finite(0));
        assert_eq!(vanishing_order_on_stratum(&h, &w(&[1, 1, 1])).unwrap(), Order::Finite(3));
        assert_eq!(vanishing_order_on_stratum(&h, &w(&[-1, 1, -1])).unwrap(), Order::Finite(1));
        assert_eq!(vanishing_order_on_stratum(&MultiPoly::zero(&f, 3), &w(&[1, 1, 1])), Err(SchubertError::ZeroPolynomial));
    }

    #[test]
    fn stratum_orders_of_other_polynomials() {
        let f = f2();
        let x11 = MultiPoly::basis_monomial(&f, 1, 1);
        assert_eq!(vanishing_order_on_stratum(&x11, &WeylElem::longest(1)).unwrap(), Order::Finite(0));
        assert_eq!(vanishing_order_on_stratum(&x11, &WeylElem::identity(1)).unwrap(), Order::Finite(0));
        let f3 = FieldCtx::new(3, 1).unwrap();
        let square = MultiPoly::monomial(&f3, vec![(2, 0)], 1);
        assert_eq!(vanishing_order_on_stratum(&square, &WeylElem::identity(1)).unwrap(), Order::Finite(2));
        // x10 - x10*x11 restricts to s - s on the chart [s:1] of the closed cell.
        let mut mixed = MultiPoly::monomial(&f3, vec![(1, 0)], 1);
        mixed.add_term(vec![(1, 1)], f3.neg(1));
        assert_eq!(vanishing_order_on_stratum(&mixed, &WeylElem::identity(1)).unwrap(), Order::Infinite);
        assert_eq!(mixed.multidegree(), None);
    }

    #[test]
    fn generic_and_closed_point_orders_agree() {
        for (p, k) in [(2, 1), (3, 1), (2, 2)] {
            let f = FieldCtx::new(p, k).unwrap();
            for n in 1..=3 {
                let h = hasse_section(n, &f);
                for w in WeylElem::all(n) {
                    let generic = vanishing_order_on_stratum(&h, &w).unwrap();
                    assert_eq!(generic, Order::Finite(n - w.length()));
                    for pt in cell_points(&f, &w) {
                        if pt.coords().iter().all(|&(u, v)| u == 0 || v != 0) {
                            assert_eq!(vanishing_order_at_point(&h, &pt).unwrap(), generic);
                        }
                        assert_eq!(cell_of_point(&pt), w);
                    }
                }
            }
        }
    }

    #[test]
    fn cells_partition_the_points() {
        for (p, k) in [(2, 1), (3, 1), (2, 2)] {
            let f = FieldCtx::new(p, k).unwrap();
            let q = f.order() as usize;
            for n in 1..=3 {
                let mut all = std::collections::HashSet::new();
                let mut total = 0;
                for w in WeylElem::all(n) {
                    let pts = cell_points(&f, &w);
                    assert_eq!(pts.len(), q.pow(w.length() as u32));
                    total += pts.len();
                    all.extend(pts);
                }
                assert_eq!(total, (q + 1).pow(n as u32));
                assert_eq!(all.len(), total);
            }
        }
    }

    #[test]
    fn bruhat_word_examples() {
        let f = FieldCtx::new(3, 1).unwrap();
        let lower = GroupElem::new(&f, vec![[1, 0, 2, 1], [2, 0, 0, 1]]).unwrap();
        assert_eq!(bruhat_word(&lower), WeylElem::identity(2));
        let s = GroupElem::new(&f, vec![[1, 0, 0, 1], [0, 1, 2, 0]]).unwrap();
        assert_eq!(bruhat_word(&s), WeylElem::new(&[1, -1]).unwrap());
        assert_eq!(GroupElem::new(&f, vec![[1, 1, 1, 1]]).unwrap_err(), SchubertError::Singular(0));
    }

    #[test]
    fn stratum_label_examples() {
        for p in [2, 3] {
            let f = FieldCtx::new(p, 1).unwrap();
            for n in 1..=3 {
                let datum = CocharDatum::split(n, p);
                let zdot = GroupElem::weyl_lift(&f, &datum.z);
                for w in WeylElem::all(n) {
                    let g = GroupElem::weyl_lift(&f, &w).mul(&zdot.inverse());
                    assert_eq!(stratum_label(&g, &datum), w);
                }
                assert_eq!(stratum_label(&zdot.inverse(), &datum), WeylElem::identity(n));
            }
        }
    }

    #[test]
    fn flag_point_lies_in_its_bruhat_cell() {
        let f = FieldCtx::new(3, 1).unwrap();
        let g = GroupElem::new(&f, vec![[1, 2, 0, 1], [2, 0, 1, 1]]).unwrap();
        assert_eq!(cell_of_point(&g.flag_point()), bruhat_word(&g));
    }

    #[test]
    fn action_is_a_left_action() {
        let f = FieldCtx::new(3, 1).unwrap();
        let g = GroupElem::new(&f, vec![[1, 2, 0, 1], [2, 0, 1, 1]]).unwrap();
        let h = GroupElem::new(&f, vec![[0, 1, 2, 0], [1, 1, 0, 1]]).unwrap();
        let mut poly = hasse_section(2, &f);
        poly.add_term(vec![(0, 1), (1, 0)], 2);
        let lhs = poly.act(&g.mul(&h)).unwrap();
        let rhs = poly.act(&h).unwrap().act(&g).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_round_trip() {
        let f = FieldCtx::new(2, 2).unwrap();
        let mut poly = hasse_section(2, &f);
        poly.add_term(vec![(0, 1), (1, 0)], 3);
        let v = poly.to_json();
        assert_eq!(v[1]["exps"], serde_json::json!([[1, 0], [1, 0]]));
        assert_eq!(v[0]["coeff"], serde_json::json!([1, 1]));
        assert_eq!(MultiPoly::from_json(&f, 2, &v).unwrap(), poly);
        assert!(MultiPoly::from_json(&f, 3, &v).is_err());
    }

    #[test]
    fn group_orders_track_cells() {
        let f = FieldCtx::new(3, 1).unwrap();
        let h = hasse_on_group(2, &f);
        let hz = hasse_on_zip_flag(2, &f);
        let datum = CocharDatum::split(2, 3);
        let g = GroupElem::new(&f, vec![[0, 1, 2, 1], [1, 0, 1, 1]]).unwrap();
        assert_eq!(order_on_group(&h, &g), Order::Finite(2 - bruhat_word(&g).length()));
        assert_eq!(order_on_group(&hz, &g), Order::Finite(2 - stratum_label(&g, &datum).length()));
    }
}
