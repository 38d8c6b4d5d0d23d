//! Exact arithmetic in `F_{p^k}` together with the absolute Frobenius.
//!
//! Elements are encoded as integers in `[0, q)`: the coefficient of `x^j` in
//! the polynomial-basis representative is the `j`-th base-`p` digit. The raw
//! encoded operations on [`FieldCtx`] are what the linear-algebra kernels use;
//! [`FieldElem`] is the context-carrying value type for the public surface.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

/// Fields up to this order get precomputed addition/multiplication tables.
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} does not fit the element encoding")]
    TooLarge { p: u32, k: usize },
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("zero has no inverse")]
    InverseOfZero,
    #[error("expected {expected} coefficients, got {got}")]
    BadCoefficients { expected: usize, got: usize },
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    BadModulus(usize),
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over F_p, low degree first, no trailing zeros.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let m = poly_trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = mod_pow(m[dm], p - 2, p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let factor = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (j, &c) in m.iter().enumerate() {
            let sub = (factor as u64 * c as u64 % p as u64) as u32;
            r[shift + j] = (r[shift + j] + p - sub) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn mod_pow(base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1u64 % p as u64;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// All monic polynomials of degree `d` over `F_p`, coefficient lists low degree first.
fn monic_polys(p: u32, d: usize) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(d as u32);
    (0..count).map(move |mut v| {
        let mut coeffs = vec![0u32; d + 1];
        // c_0 is the most significant digit so the iteration is lexicographic, low degree first.
        for j in (0..d).rev() {
            coeffs[j] = (v % p as u64) as u32;
            v /= p as u64;
        }
        coeffs[d] = 1;
        coeffs
    })
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        for divisor in monic_polys(p, d) {
            if poly_rem(m, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[derive(Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

/// The finite field `F_{p^k}` presented as `F_p[x] / (modulus)`.
pub struct FieldCtx {
    p: u32,
    k: usize,
    q: u32,
    modulus: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    frob: Vec<u32>,
    tables: Option<Tables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// Builds `F_{p^k}` with the lexicographically smallest monic irreducible
    /// modulus (coefficients compared from the constant term upwards).
    pub fn new(p: u32, k: usize) -> Result<Arc<FieldCtx>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k < 1 {
            return Err(FieldError::ZeroDegree);
        }
        Self::check_size(p, k)?;
        let modulus = monic_polys(p, k)
            .find(|m| is_irreducible(m, p))
            .expect("irreducible polynomials exist in every degree");
        Ok(Arc::new(Self::build(p, modulus)))
    }

    /// Builds `F_p[x] / (modulus)` for an explicit monic irreducible modulus.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Arc<FieldCtx>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let m: Vec<u32> = modulus.to_vec();
        if m.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let k = m.len() - 1;
        if m[k] != 1 || m.iter().any(|&c| c >= p) || !is_irreducible(&m, p) {
            return Err(FieldError::BadModulus(k));
        }
        Self::check_size(p, k)?;
        Ok(Arc::new(Self::build(p, m)))
    }

    fn check_size(p: u32, k: usize) -> Result<(), FieldError> {
        match (p as u64).checked_pow(k as u32) {
            Some(q) if q <= (1 << 24) => Ok(()),
            _ => Err(FieldError::TooLarge { p, k }),
        }
    }

    fn build(p: u32, modulus: Vec<u32>) -> FieldCtx {
        let k = modulus.len() - 1;
        let q = p.pow(k as u32);
        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            neg: Vec::new(),
            inv: Vec::new(),
            frob: Vec::new(),
            tables: None,
        };
        ctx.neg = (0..q).map(|a| ctx.neg_slow(a)).collect();
        if q <= TABLE_LIMIT {
            let mut add = vec![0; (q * q) as usize];
            let mut mul = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = ctx.add_slow(a, b);
                    mul[(a * q + b) as usize] = ctx.mul_slow(a, b);
                }
            }
            ctx.tables = Some(Tables { add, mul });
        }
        ctx.inv = (0..q)
            .map(|a| if a == 0 { 0 } else { ctx.pow(a, q as u64 - 2) })
            .collect();
        ctx.frob = (0..q).map(|a| ctx.pow(a, p as u64)).collect();
        ctx
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Field order `p^k`.
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, low degree first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn decode(&self, a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k);
        let mut v = a;
        for _ in 0..self.k {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    pub fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// Encoded image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    fn neg_slow(&self, a: u32) -> u32 {
        let s: Vec<u32> = self.decode(a).iter().map(|&u| (self.p - u) % self.p).collect();
        self.encode(&s)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.decode(a), self.decode(b));
        let mut prod = vec![0u32; 2 * self.k];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % self.p as u64) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k, 0);
        self.encode(&r)
    }

    #[inline]
    pub fn zero(&self) -> u32 {
        0
    }

    #[inline]
    pub fn one(&self) -> u32 {
        // k = 1 with modulus x still has 1 as the constant term.
        1
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(a * self.q + b) as usize],
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(a * self.q + b) as usize],
            None => self.mul_slow(a, b),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut acc = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// `a^p`.
    #[inline]
    pub fn frob(&self, a: u32) -> u32 {
        self.frob[a as usize]
    }

    /// `a^(p^e)`.
    pub fn frob_pow(&self, a: u32, e: u32) -> u32 {
        (0..e % self.k as u32).fold(a, |x, _| self.frob(x))
    }

    /// All encoded elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    /// Nonzero encoded elements in increasing order.
    pub fn units(&self) -> impl Iterator<Item = u32> {
        1..self.q
    }
}

/// A value of `F_{p^k}` tied to its field.
#[derive(Clone)]
pub struct FieldElem {
    ctx: Arc<FieldCtx>,
    value: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.k == 1 {
            return write!(f, "{}", self.value);
        }
        let coeffs = self.coeffs();
        let terms: Vec<String> = coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| match (j, c) {
                (0, c) => c.to_string(),
                (1, 1) => "u".to_string(),
                (1, c) => format!("{c}u"),
                (j, 1) => format!("u^{j}"),
                (j, c) => format!("{c}u^{j}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.same_field(other)
    }
}

impl Eq for FieldElem {}

impl FieldElem {
    pub fn new(ctx: &Arc<FieldCtx>, value: u32) -> FieldElem {
        assert!(value < ctx.q, "encoded value {value} out of range");
        FieldElem { ctx: ctx.clone(), value }
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> FieldElem {
        Self::new(ctx, 0)
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> FieldElem {
        Self::new(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<FieldCtx>, v: i64) -> FieldElem {
        Self::new(ctx, ctx.from_int(v))
    }

    /// From polynomial-basis coefficients, low degree first.
    pub fn from_coeffs(ctx: &Arc<FieldCtx>, coeffs: &[i64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() != ctx.k {
            return Err(FieldError::BadCoefficients { expected: ctx.k, got: coeffs.len() });
        }
        let c: Vec<u32> = coeffs.iter().map(|&v| ctx.from_int(v)).collect();
        Ok(Self::new(ctx, ctx.encode(&c)))
    }

    /// The generator `u` (class of `x`) of the polynomial basis.
    pub fn generator(ctx: &Arc<FieldCtx>) -> FieldElem {
        if ctx.k == 1 {
            // x is congruent to -m_0 modulo the linear modulus x + m_0.
            return Self::new(ctx, ctx.neg(ctx.modulus[0]));
        }
        Self::new(ctx, ctx.p)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.ctx.decode(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn same_field(&self, other: &FieldElem) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx
    }

    fn check(&self, other: &FieldElem) -> Result<(), FieldError> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(other)?;
        Ok(Self::new(&self.ctx, self.ctx.add(self.value, other.value)))
    }

    pub fn try_sub(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(other)?;
        Ok(Self::new(&self.ctx, self.ctx.sub(self.value, other.value)))
    }

    pub fn try_mul(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check(other)?;
        Ok(Self::new(&self.ctx, self.ctx.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElem, FieldError> {
        self.ctx
            .inv(self.value)
            .map(|v| Self::new(&self.ctx, v))
            .ok_or(FieldError::InverseOfZero)
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        Self::new(&self.ctx, self.ctx.pow(self.value, e))
    }

    pub fn frobenius(&self) -> FieldElem {
        Self::new(&self.ctx, self.ctx.frob(self.value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// Dispatches one field operation; `y` is required for the binary ones.
pub fn arith(op: ArithOp, x: &FieldElem, y: Option<&FieldElem>) -> Result<FieldElem, FieldError> {
    match op {
        ArithOp::Add => x.try_add(y.ok_or(FieldError::ContextMismatch)?),
        ArithOp::Mul => x.try_mul(y.ok_or(FieldError::ContextMismatch)?),
        ArithOp::Neg => Ok(-x),
        ArithOp::Inv => x.inv(),
    }
}

pub fn frobenius(x: &FieldElem) -> FieldElem {
    x.frobenius()
}

// Operator sugar panics on mixed fields; use the `try_*` methods to get an error instead.

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(&self.ctx, self.ctx.neg(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Small fields used by the exhaustive checks, all with `p^k <= 81`.
    fn small_fields() -> Vec<Arc<FieldCtx>> {
        [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 1), (3, 2), (3, 3), (3, 4), (5, 1), (5, 2), (7, 1), (7, 2)]
            .iter()
            .map(|&(p, k)| FieldCtx::new(p, k).unwrap())
            .collect()
    }

    #[test]
    fn create_prime_fields() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(f2.modulus(), &[0, 1]);
        assert_eq!(f2.order(), 2);
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(f3.order(), 3);
    }

    #[test]
    fn f4_modulus_is_the_only_irreducible_quadratic() {
        // Oracle: of x^2, x^2+1, x^2+x, x^2+x+1 only the last has no root in F_2.
        let candidates: Vec<[u32; 3]> = vec![[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]];
        let irreducible: Vec<_> = candidates
            .iter()
            .filter(|c| (0..2u32).all(|x| (c[0] + c[1] * x + c[2] * x * x) % 2 != 0))
            .collect();
        assert_eq!(irreducible, vec![&[1, 1, 1]]);
        let f4 = FieldCtx::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldCtx::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(FieldCtx::new(1, 1).unwrap_err(), FieldError::NotPrime(1));
        assert_eq!(FieldCtx::new(2, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(FieldCtx::with_modulus(2, &[1, 0, 1]).is_err());
        assert!(FieldCtx::with_modulus(2, &[1, 1, 1]).is_ok());
    }

    #[test]
    fn modulus_selection_is_deterministic() {
        for (p, k) in [(2, 3), (3, 2), (5, 2)] {
            assert_eq!(FieldCtx::new(p, k).unwrap().modulus(), FieldCtx::new(p, k).unwrap().modulus());
        }
        // x^3 + x^2 + 1 beats x^3 + x + 1 in low-degree-first order.
        assert_eq!(FieldCtx::new(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
        // x^2 + 1 over F_3.
        assert_eq!(FieldCtx::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn arith_examples() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let one = FieldElem::one(&f2);
        assert!(arith(ArithOp::Add, &one, Some(&one)).unwrap().is_zero());

        let f4 = FieldCtx::new(2, 2).unwrap();
        let u = FieldElem::generator(&f4);
        // u^2 = u + 1 modulo u^2 + u + 1.
        assert_eq!(arith(ArithOp::Mul, &u, Some(&u)).unwrap().coeffs(), vec![1, 1]);

        let f3 = FieldCtx::new(3, 1).unwrap();
        let two = FieldElem::from_int(&f3, 2);
        assert_eq!(arith(ArithOp::Inv, &two, None).unwrap(), two);
    }

    #[test]
    fn arith_errors() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let f3 = FieldCtx::new(3, 1).unwrap();
        let a = FieldElem::one(&f2);
        let b = FieldElem::one(&f3);
        assert_eq!(a.try_add(&b).unwrap_err(), FieldError::ContextMismatch);
        assert_eq!(FieldElem::zero(&f3).inv().unwrap_err(), FieldError::InverseOfZero);
        // Separately constructed contexts for the same field are interchangeable.
        let f2b = FieldCtx::new(2, 1).unwrap();
        assert!(a.try_add(&FieldElem::one(&f2b)).is_ok());
    }

    #[test]
    fn frobenius_examples() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        assert!(frobenius(&FieldElem::zero(&f4)).is_zero());
        assert_eq!(frobenius(&FieldElem::one(&f4)), FieldElem::one(&f4));
        let u = FieldElem::generator(&f4);
        assert_eq!(frobenius(&u).coeffs(), vec![1, 1]);
    }

    #[test]
    fn frobenius_has_order_dividing_k() {
        for f in small_fields() {
            for a in f.elements() {
                let mut x = a;
                for _ in 0..f.k() {
                    x = f.frob(x);
                }
                assert_eq!(x, a, "F_{}^{}", f.p(), f.k());
            }
            // Fixes exactly the prime field.
            let fixed = f.elements().filter(|&a| f.frob(a) == a).count();
            assert_eq!(fixed as u32, f.p());
        }
    }

    #[test]
    fn frobenius_is_a_ring_homomorphism() {
        for f in small_fields() {
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.frob(f.mul(a, b)), f.mul(f.frob(a), f.frob(b)));
                    assert_eq!(f.frob(f.add(a, b)), f.add(f.frob(a), f.frob(b)));
                }
            }
        }
    }

    #[test]
    fn inverses_and_field_axioms() {
        for f in small_fields() {
            for a in f.units() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
        }
    }

    #[test]
    fn table_and_polynomial_paths_agree() {
        // F_{2^9} exceeds the table limit and exercises the slow path.
        let big = FieldCtx::new(2, 9).unwrap();
        assert!(big.tables.is_none());
        let small = FieldCtx::new(2, 4).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(small.mul(a, b), small.mul_slow(a, b));
                assert_eq!(small.add(a, b), small.add_slow(a, b));
            }
        }
        for a in [1u32, 7, 100, 511] {
            assert_eq!(big.mul(a, big.inv(a).unwrap()), 1);
            assert_eq!(big.frob_pow(a, 9), a);
        }
    }

    #[test]
    fn display_uses_generator_name() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let u = FieldElem::generator(&f4);
        assert_eq!((&u * &u).to_string(), "u + 1");
        assert_eq!(FieldElem::zero(&f4).to_string(), "0");
    }
}
