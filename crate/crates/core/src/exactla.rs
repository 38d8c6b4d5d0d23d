//! Dense exact linear algebra over a [`FieldCtx`]: matrices, canonical
//! subspaces, Frobenius-semilinear maps and the top exterior power of a
//! `2n`-dimensional space with its induced Hodge-type filtration.
//!
//! The ambient `F^{2n}` is always split into blocks `D_i = span(e_{2i}, e_{2i+1})`.
//! Coordinates on `⋀ⁿ F^{2n}` are indexed by `n`-subsets in colexicographic order.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("expected a one-dimensional subspace, got dimension {0}")]
    NotALine(usize),
    #[error("line {0} is not supported in its own block")]
    OutsideBlock(usize),
    #[error("malformed subset {subset:?} for n = {n}")]
    MalformedSubset { n: usize, subset: Vec<usize> },
    #[error("filtration level {m} out of range 0..={n}")]
    LevelOutOfRange { m: usize, n: usize },
}

/// Row-major matrix with all entries in one field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ctx: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.data.chunks(self.cols.max(1))).finish()
    }
}

impl Matrix {
    pub fn zeros(ctx: &Arc<FieldCtx>, rows: usize, cols: usize) -> Matrix {
        Matrix { ctx: ctx.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> Matrix {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.data[i * n + i] = ctx.one();
        }
        m
    }

    /// From encoded field values, row-major.
    pub fn from_raw(ctx: &Arc<FieldCtx>, rows: usize, cols: usize, data: Vec<u32>) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        assert!(data.iter().all(|&v| v < ctx.order()));
        Matrix { ctx: ctx.clone(), rows, cols, data }
    }

    /// Entries reduced from integers into the prime field.
    pub fn from_ints(ctx: &Arc<FieldCtx>, rows: usize, cols: usize, entries: &[i64]) -> Matrix {
        let data = entries.iter().map(|&v| ctx.from_int(v)).collect();
        Self::from_raw(ctx, rows, cols, data)
    }

    pub fn from_elems(rows: usize, cols: usize, entries: &[FieldElem]) -> Result<Matrix, LinAlgError> {
        if entries.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch { expected: rows * cols, got: entries.len() });
        }
        let ctx = entries.first().ok_or(LinAlgError::DimensionMismatch { expected: 1, got: 0 })?.ctx().clone();
        if entries.iter().any(|e| !Arc::ptr_eq(e.ctx(), &ctx) && **e.ctx() != *ctx) {
            return Err(LinAlgError::ContextMismatch);
        }
        Ok(Matrix { ctx, rows, cols, data: entries.iter().map(FieldElem::value).collect() })
    }

    pub fn from_rows(ctx: &Arc<FieldCtx>, cols: usize, rows: &[Vec<u32>]) -> Matrix {
        let data: Vec<u32> = rows.iter().flat_map(|r| {
            assert_eq!(r.len(), cols);
            r.iter().copied()
        }).collect();
        Self::from_raw(ctx, rows.len(), cols, data)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set_raw(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        FieldElem::new(&self.ctx, self.raw(i, j))
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, LinAlgError> {
        if *self.ctx != *rhs.ctx {
            return Err(LinAlgError::ContextMismatch);
        }
        if self.cols != rhs.rows {
            return Err(LinAlgError::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        let f = &self.ctx;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0;
                for l in 0..self.cols {
                    acc = f.add(acc, f.mul(self.raw(i, l), rhs.raw(l, j)));
                }
                out.data[i * rhs.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// `self · v` for a column vector of encoded values.
    pub fn apply(&self, v: &[u32]) -> Result<Vec<u32>, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let f = &self.ctx;
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect())
    }

    /// Reduced row-echelon form and rank.
    pub fn rref(&self) -> (Matrix, usize) {
        let f = &self.ctx;
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.raw(r, col) != 0) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            let inv = f.inv(m.raw(rank, col)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = f.mul(m.raw(rank, j), inv);
                m.set_raw(rank, j, v);
            }
            for r in 0..m.rows {
                let factor = m.raw(r, col);
                if r == rank || factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.raw(r, j), f.mul(factor, m.raw(rank, j)));
                    m.set_raw(r, j, v);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        (m, rank)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Determinant of a square matrix by elimination.
    pub fn det(&self) -> u32 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let f = &self.ctx;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| m.raw(r, col) != 0) else {
                return 0;
            };
            if pivot != col {
                m.swap_rows(col, pivot);
                det = f.neg(det);
            }
            let p = m.raw(col, col);
            det = f.mul(det, p);
            let inv = f.inv(p).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = f.mul(m.raw(r, col), inv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let v = f.sub(m.raw(r, j), f.mul(factor, m.raw(col, j)));
                    m.set_raw(r, j, v);
                }
            }
        }
        det
    }
}

pub fn rref(m: &Matrix) -> (Matrix, usize) {
    m.rref()
}

/// A subspace of `F^d` stored by its reduced row-echelon basis, so equal
/// subspaces compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn span(ctx: &Arc<FieldCtx>, ambient: usize, vectors: &[Vec<u32>]) -> Subspace {
        let m = Matrix::from_rows(ctx, ambient, vectors);
        let (r, rank) = m.rref();
        let rows: Vec<Vec<u32>> = (0..rank).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis: Matrix::from_rows(ctx, ambient, &rows) }
    }

    pub fn zero(ctx: &Arc<FieldCtx>, ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::zeros(ctx, 0, ambient) }
    }

    pub fn whole(ctx: &Arc<FieldCtx>, ambient: usize) -> Subspace {
        Subspace { ambient, basis: Matrix::identity(ctx, ambient) }
    }

    /// `span(e_i)` in `F^ambient`.
    pub fn coordinate_line(ctx: &Arc<FieldCtx>, ambient: usize, i: usize) -> Subspace {
        let mut v = vec![0; ambient];
        v[i] = ctx.one();
        Self::span(ctx, ambient, &[v])
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.basis.ctx()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<u32>> {
        self.basis.row_vecs()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), LinAlgError> {
        if self.ambient != other.ambient {
            return Err(LinAlgError::DimensionMismatch { expected: self.ambient, got: other.ambient });
        }
        if *self.ctx() != *other.ctx() {
            return Err(LinAlgError::ContextMismatch);
        }
        Ok(())
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        let mut rows = self.basis_vectors();
        rows.push(v.to_vec());
        Matrix::from_rows(self.ctx(), self.ambient, &rows).rank() == self.dim()
    }

    /// Whether `inner ⊆ self`, decided by the rank of the stacked bases.
    pub fn contains(&self, inner: &Subspace) -> Result<bool, LinAlgError> {
        self.check_compatible(inner)?;
        if inner.dim() > self.dim() {
            return Ok(false);
        }
        let mut rows = self.basis_vectors();
        rows.extend(inner.basis_vectors());
        Ok(Matrix::from_rows(self.ctx(), self.ambient, &rows).rank() == self.dim())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check_compatible(other)?;
        let mut rows = self.basis_vectors();
        rows.extend(other.basis_vectors());
        Ok(Subspace::span(self.ctx(), self.ambient, &rows))
    }

    /// Places a subspace of `F^(self.ambient)` at coordinate `offset` inside `F^ambient`.
    pub fn embed(&self, ambient: usize, offset: usize) -> Subspace {
        assert!(offset + self.ambient <= ambient);
        let rows: Vec<Vec<u32>> = self
            .basis_vectors()
            .into_iter()
            .map(|r| {
                let mut v = vec![0; ambient];
                v[offset..offset + self.ambient].copy_from_slice(&r);
                v
            })
            .collect();
        Subspace::span(self.ctx(), ambient, &rows)
    }
}

pub fn subspace_contains(outer: &Subspace, inner: &Subspace) -> Result<bool, LinAlgError> {
    outer.contains(inner)
}

/// `v ↦ matrix · Frob^twist(v)`, Frobenius applied entrywise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearMap {
    pub matrix: Matrix,
    pub twist: u32,
}

impl SemilinearMap {
    pub fn new(matrix: Matrix, twist: u32) -> SemilinearMap {
        SemilinearMap { matrix, twist }
    }

    pub fn apply_raw(&self, v: &[u32]) -> Result<Vec<u32>, LinAlgError> {
        let f = self.matrix.ctx();
        let twisted: Vec<u32> = v.iter().map(|&x| f.frob_pow(x, self.twist)).collect();
        self.matrix.apply(&twisted)
    }

    pub fn apply(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>, LinAlgError> {
        let f = self.matrix.ctx();
        if v.iter().any(|x| **x.ctx() != **f) {
            return Err(LinAlgError::ContextMismatch);
        }
        let raw: Vec<u32> = v.iter().map(FieldElem::value).collect();
        Ok(self.apply_raw(&raw)?.into_iter().map(|x| FieldElem::new(f, x)).collect())
    }
}

pub fn semilinear_apply(map: &SemilinearMap, v: &[FieldElem]) -> Result<Vec<FieldElem>, LinAlgError> {
    map.apply(v)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Colexicographic rank of an increasing `n`-subset of `{0, …, 2n-1}`.
pub fn wedge_basis_index(n: usize, subset: &[usize]) -> Result<usize, LinAlgError> {
    let malformed = || LinAlgError::MalformedSubset { n, subset: subset.to_vec() };
    if subset.len() != n || subset.iter().any(|&s| s >= 2 * n) || subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(malformed());
    }
    Ok(subset.iter().enumerate().map(|(j, &s)| binomial(s, j + 1)).sum())
}

/// Inverse of [`wedge_basis_index`].
pub fn wedge_basis_subset(n: usize, mut index: usize) -> Vec<usize> {
    assert!(index < binomial(2 * n, n));
    let mut out = vec![0; n];
    for j in (0..n).rev() {
        let mut s = j;
        while binomial(s + 1, j + 1) <= index {
            s += 1;
        }
        out[j] = s;
        index -= binomial(s, j + 1);
    }
    out
}

/// Coordinates of `v_1 ∧ … ∧ v_n` in `⋀ⁿ F^{2n}`: the maximal minors, one per subset.
pub fn wedge(ctx: &Arc<FieldCtx>, vectors: &[Vec<u32>]) -> Vec<u32> {
    let n = vectors.len();
    let dim = binomial(2 * n, n);
    (0..dim)
        .map(|idx| {
            let cols = wedge_basis_subset(n, idx);
            let entries: Vec<u32> = vectors.iter().flat_map(|v| cols.iter().map(move |&c| v[c])).collect();
            Matrix::from_raw(ctx, n, n, entries).det()
        })
        .collect()
}

/// The line `⋀ᵢ Lᵢ` for lines `Lᵢ` supported in block `i` of `F^{2n}`.
pub fn wedge_of_lines(lines: &[Subspace]) -> Result<Subspace, LinAlgError> {
    let n = lines.len();
    let ctx = lines.first().ok_or(LinAlgError::NotALine(0))?.ctx().clone();
    let mut gens = Vec::with_capacity(n);
    for (i, line) in lines.iter().enumerate() {
        if line.ambient_dim() != 2 * n {
            return Err(LinAlgError::DimensionMismatch { expected: 2 * n, got: line.ambient_dim() });
        }
        if **line.ctx() != *ctx {
            return Err(LinAlgError::ContextMismatch);
        }
        if line.dim() != 1 {
            return Err(LinAlgError::NotALine(line.dim()));
        }
        let v = line.basis().row(0).to_vec();
        if v.iter().enumerate().any(|(c, &x)| x != 0 && c / 2 != i) {
            return Err(LinAlgError::OutsideBlock(i));
        }
        gens.push(v);
    }
    Ok(Subspace::span(&ctx, binomial(2 * n, n), &[wedge(&ctx, &gens)]))
}

/// `Fil^m ⊆ ⋀ⁿ F^{2n}`: spanned by wedges with at least `m` factors from `omega`.
pub fn induced_filtration(omega: &Subspace, m: usize) -> Result<Subspace, LinAlgError> {
    let ambient = omega.ambient_dim();
    let n = ambient / 2;
    if !ambient.is_multiple_of(2) || omega.dim() != n {
        return Err(LinAlgError::DimensionMismatch { expected: n, got: omega.dim() });
    }
    if m > n {
        return Err(LinAlgError::LevelOutOfRange { m, n });
    }
    let ctx = omega.ctx();
    let wedge_dim = binomial(ambient, n);
    if m == 0 {
        return Ok(Subspace::whole(ctx, wedge_dim));
    }
    let omega_basis = omega.basis_vectors();
    let unit = |c: usize| {
        let mut v = vec![0; ambient];
        v[c] = ctx.one();
        v
    };
    // Exactly m factors from omega suffice: the remaining factors range over a
    // full basis, which already covers wedges with more omega factors.
    let mut spanning = Vec::new();
    for from_omega in subsets(n, m) {
        for from_ambient in subsets(ambient, n - m) {
            let factors: Vec<Vec<u32>> = from_omega
                .iter()
                .map(|&i| omega_basis[i].clone())
                .chain(from_ambient.iter().map(|&c| unit(c)))
                .collect();
            let w = wedge(ctx, &factors);
            if w.iter().any(|&x| x != 0) {
                spanning.push(w);
            }
        }
    }
    Ok(Subspace::span(ctx, wedge_dim, &spanning))
}

/// All increasing `k`-subsets of `{0, …, n-1}` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
