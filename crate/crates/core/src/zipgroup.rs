//! The zip group `E ⊂ B × B⁺` of the split Hilbert datum over `F_q`, acting on
//! `G(F_q) = {g ∈ GL₂ⁿ : det gᵢ = det gⱼ}` by `(a, b)·g = a·g·b⁻¹`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::FieldCtx;
use crate::schubert::{bruhat_word, stratum_label, GroupElem};
use crate::weylchar::{CocharDatum, WeylElem};

/// Default cap on `|GL₂(F_q)|ⁿ` for the group enumerators.
pub const DEFAULT_BOUND: u128 = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZipGroupError {
    #[error("enumeration needs {needed} candidates, bound is {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
    #[error("orbit {class} mixes stratum labels {first} and {other} (element {element})")]
    NonConstantLabel { class: usize, first: WeylElem, other: WeylElem, element: String },
    #[error("element {0} is not in the enumerated group")]
    Missing(String),
    #[error("({a}, {b}) is not in E")]
    NotInE { a: String, b: String },
}

/// `|GL₂(F_q)|ⁿ`, the raw search space of [`enumerate_g`].
pub fn group_search_size(ctx: &FieldCtx, n: usize) -> u128 {
    let q = ctx.order() as u128;
    ((q * q - 1) * (q * q - q)).saturating_pow(n as u32)
}

fn check_bound(ctx: &FieldCtx, n: usize, bound: u128) -> Result<(), ZipGroupError> {
    let needed = group_search_size(ctx, n);
    if needed > bound {
        return Err(ZipGroupError::BoundExceeded { needed, bound });
    }
    Ok(())
}

/// Cartesian product of per-factor choices with equal determinants, factor 0 most significant.
fn hilbert_tuples(ctx: &Arc<FieldCtx>, n: usize, choices: &[[u32; 4]]) -> Vec<GroupElem> {
    let mut by_det: BTreeMap<u32, Vec<[u32; 4]>> = BTreeMap::new();
    for m in choices {
        by_det.entry(crate::schubert::mat2_det(ctx, m)).or_default().push(*m);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let tuple: Vec<[u32; 4]> = idx.iter().map(|&i| choices[i]).collect();
        let d = crate::schubert::mat2_det(ctx, &tuple[0]);
        if tuple.iter().all(|m| crate::schubert::mat2_det(ctx, m) == d) {
            out.push(GroupElem::new(ctx, tuple).expect("invertible factors"));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn gl2(ctx: &FieldCtx) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for a in ctx.elements() {
        for b in ctx.elements() {
            for c in ctx.elements() {
                for d in ctx.elements() {
                    let m = [a, b, c, d];
                    if crate::schubert::mat2_det(ctx, &m) != 0 {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// `G(F_q)` in lexicographic order of the flat coordinates.
pub fn enumerate_g(ctx: &Arc<FieldCtx>, n: usize, bound: u128) -> Result<Vec<GroupElem>, ZipGroupError> {
    check_bound(ctx, n, bound)?;
    Ok(hilbert_tuples(ctx, n, &gl2(ctx)))
}

/// Lower-triangular Hilbert tuples `B(F_q)`.
pub fn borel_lower(ctx: &Arc<FieldCtx>, n: usize) -> Vec<GroupElem> {
    let mats: Vec<[u32; 4]> = gl2(ctx).into_iter().filter(|m| m[1] == 0).collect();
    hilbert_tuples(ctx, n, &mats)
}

/// Upper-triangular Hilbert tuples `B⁺(F_q)`.
pub fn borel_upper(ctx: &Arc<FieldCtx>, n: usize) -> Vec<GroupElem> {
    let mats: Vec<[u32; 4]> = gl2(ctx).into_iter().filter(|m| m[2] == 0).collect();
    hilbert_tuples(ctx, n, &mats)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZipGroupElem {
    a: GroupElem,
    b: GroupElem,
}

impl ZipGroupElem {
    pub fn new(a: GroupElem, b: GroupElem) -> Result<ZipGroupElem, ZipGroupError> {
        let err = || ZipGroupError::NotInE { a: a.to_string(), b: b.to_string() };
        if a.n() != b.n() || !a.is_hilbert() || !b.is_hilbert() {
            return Err(err());
        }
        let f = a.ctx();
        let ok = a.factors().iter().zip(b.factors()).all(|(x, y)| {
            x[1] == 0 && y[2] == 0 && y[0] == f.frob(x[0]) && y[3] == f.frob(x[3])
        });
        if !ok {
            return Err(err());
        }
        Ok(ZipGroupElem { a, b })
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> ZipGroupElem {
        ZipGroupElem { a: GroupElem::identity(ctx, n), b: GroupElem::identity(ctx, n) }
    }

    pub fn a(&self) -> &GroupElem {
        &self.a
    }

    pub fn b(&self) -> &GroupElem {
        &self.b
    }

    pub fn compose(&self, other: &ZipGroupElem) -> ZipGroupElem {
        ZipGroupElem { a: self.a.mul(&other.a), b: self.b.mul(&other.b) }
    }

    /// `g ↦ a·g·b⁻¹`.
    pub fn act(&self, g: &GroupElem) -> GroupElem {
        self.a.mul(g).mul(&self.b.inverse())
    }
}

/// `E(F_q)`: `a` ranges over `B(F_q)`, and `b` has diagonal `Fr(diag a)` with a free upper entry.
pub fn enumerate_e(ctx: &Arc<FieldCtx>, n: usize, bound: u128) -> Result<Vec<ZipGroupElem>, ZipGroupError> {
    check_bound(ctx, n, bound)?;
    let mut out = Vec::new();
    let q = ctx.order() as u64;
    for a in borel_lower(ctx, n) {
        for mut upper in 0..q.pow(n as u32) {
            let mut digits = vec![0u32; n];
            for d in digits.iter_mut().rev() {
                *d = (upper % q) as u32;
                upper /= q;
            }
            let factors = a
                .factors()
                .iter()
                .zip(&digits)
                .map(|(m, &u)| [ctx.frob(m[0]), u, 0, ctx.frob(m[3])])
                .collect();
            let b = GroupElem::new(ctx, factors).expect("nonzero diagonal");
            out.push(ZipGroupElem::new(a.clone(), b).expect("constructed inside E"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitClass {
    pub label: WeylElem,
    pub members: Vec<usize>,
}

/// Partition of an enumerated `G(F_q)` into `E(F_q)`-orbits; members index into the group list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub classes: Vec<OrbitClass>,
}

impl OrbitPartition {
    pub fn labels(&self) -> Vec<&WeylElem> {
        self.classes.iter().map(|c| &c.label).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.members.len()).collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
            self.parent[hi] = lo;
        }
    }
}

/// Orbits of `g ↦ a·g·b⁻¹`, classes ordered by their first member.
pub fn orbits(group: &[GroupElem], e: &[ZipGroupElem], datum: &CocharDatum) -> Result<OrbitPartition, ZipGroupError> {
    let index: HashMap<Vec<u32>, usize> = group.iter().enumerate().map(|(i, g)| (g.flat(), i)).collect();
    let mut uf = UnionFind::new(group.len());
    for (i, g) in group.iter().enumerate() {
        for x in e {
            let h = x.act(g);
            let j = *index.get(&h.flat()).ok_or_else(|| ZipGroupError::Missing(h.to_string()))?;
            uf.union(i, j);
        }
    }
    let mut classes: Vec<OrbitClass> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, g) in group.iter().enumerate() {
        let root = uf.find(i);
        let label = stratum_label(g, datum);
        match slot.get(&root) {
            Some(&c) => {
                if classes[c].label != label {
                    return Err(ZipGroupError::NonConstantLabel {
                        class: c,
                        first: classes[c].label.clone(),
                        other: label,
                        element: g.to_string(),
                    });
                }
                classes[c].members.push(i);
            }
            None => {
                slot.insert(root, classes.len());
                classes.push(OrbitClass { label, members: vec![i] });
            }
        }
    }
    Ok(OrbitPartition { classes })
}

/// Sizes of the Bruhat cells `B·ẇ·B(F_q)`, keyed by `w` in mask order.
pub fn bruhat_census(ctx: &Arc<FieldCtx>, n: usize, bound: u128) -> Result<Vec<(WeylElem, usize)>, ZipGroupError> {
    let group = enumerate_g(ctx, n, bound)?;
    Ok(census_of(&group, n))
}

fn census_of(group: &[GroupElem], n: usize) -> Vec<(WeylElem, usize)> {
    let mut counts = vec![0usize; 1 << n];
    for g in group {
        counts[bruhat_word(g).mask() as usize] += 1;
    }
    WeylElem::all(n).zip(counts).collect()
}

/// One row per `w`: Bruhat cell size and the `E`-orbits carrying label `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrataRow {
    pub w: WeylElem,
    pub length: usize,
    pub cell_size: usize,
    pub orbit_sizes: Vec<usize>,
}

impl StrataRow {
    pub const TSV_HEADER: &'static str = "w\tl(w)\tcell-size\torbit-count\torbit-sizes";

    pub fn tsv_row(&self) -> String {
        let sizes: Vec<String> = self.orbit_sizes.iter().map(|s| s.to_string()).collect();
        format!("{}\t{}\t{}\t{}\t{}", self.w, self.length, self.cell_size, self.orbit_sizes.len(), sizes.join(","))
    }
}

/// Census and orbit table for the split datum.
pub fn strata_rows(ctx: &Arc<FieldCtx>, n: usize, bound: u128) -> Result<Vec<StrataRow>, ZipGroupError> {
    let group = enumerate_g(ctx, n, bound)?;
    let e = enumerate_e(ctx, n, bound)?;
    let datum = CocharDatum::split(n, ctx.p());
    let partition = orbits(&group, &e, &datum)?;
    Ok(census_of(&group, n)
        .into_iter()
        .map(|(w, cell_size)| {
            let mut orbit_sizes: Vec<usize> =
                partition.classes.iter().filter(|c| c.label == w).map(|c| c.members.len()).collect();
            orbit_sizes.sort_unstable_by(|a, b| b.cmp(a));
            StrataRow { length: w.length(), w, cell_size, orbit_sizes }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schubert::{hasse_on_group, hasse_on_zip_flag, hasse_section, order_on_group, vanishing_order_on_stratum, Order};

    fn field(q: u32) -> Arc<FieldCtx> {
        match q {
            4 => FieldCtx::new(2, 2).unwrap(),
            p => FieldCtx::new(p, 1).unwrap(),
        }
    }

    /// `|GL₂(F_q)| = (q²−1)(q²−q)`, and equal determinants cut `|GL₂|ⁿ` by `(q−1)^{n−1}`.
    fn group_order(q: usize, n: u32) -> usize {
        let gl = (q * q - 1) * (q * q - q);
        gl.pow(n) / (q - 1).pow(n - 1)
    }

    #[test]
    fn group_sizes() {
        assert_eq!(enumerate_g(&field(2), 1, DEFAULT_BOUND).unwrap().len(), 6);
        assert_eq!(enumerate_g(&field(3), 1, DEFAULT_BOUND).unwrap().len(), 48);
        assert_eq!(enumerate_g(&field(2), 2, DEFAULT_BOUND).unwrap().len(), 36);
        for (q, n) in [(3, 2), (4, 1), (4, 2)] {
            let g = enumerate_g(&field(q as u32), n, u128::MAX).unwrap();
            assert_eq!(g.len(), group_order(q, n as u32));
            assert!(g.iter().all(|x| x.is_hilbert()));
        }
        assert!(matches!(enumerate_g(&field(5), 2, DEFAULT_BOUND), Err(ZipGroupError::BoundExceeded { .. })));
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        let g = enumerate_g(&field(3), 2, DEFAULT_BOUND).unwrap();
        assert!(g.windows(2).all(|w| w[0].flat() < w[1].flat()));
    }

    /// Oracle: filter all of `G × G` by the defining conditions of `E`.
    fn e_by_filter(ctx: &Arc<FieldCtx>, n: usize) -> Vec<ZipGroupElem> {
        let g = enumerate_g(ctx, n, u128::MAX).unwrap();
        let mut out = Vec::new();
        for a in &g {
            for b in &g {
                if let Ok(x) = ZipGroupElem::new(a.clone(), b.clone()) {
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn e_sizes_match_filter() {
        assert_eq!(enumerate_e(&field(2), 1, DEFAULT_BOUND).unwrap().len(), 4);
        assert_eq!(enumerate_e(&field(3), 1, DEFAULT_BOUND).unwrap().len(), 36);
        for (q, n) in [(2, 1), (3, 1), (2, 2), (4, 1)] {
            let ctx = field(q);
            let mut fast = enumerate_e(&ctx, n, u128::MAX).unwrap();
            let mut slow = e_by_filter(&ctx, n);
            let key = |x: &ZipGroupElem| (x.a.flat(), x.b.flat());
            fast.sort_by_key(key);
            slow.sort_by_key(key);
            assert_eq!(fast, slow, "q={q} n={n}");
        }
        let e = enumerate_e(&field(3), 2, DEFAULT_BOUND).unwrap();
        assert_eq!(e.len(), 648);
        assert!(e.contains(&ZipGroupElem::identity(&field(3), 2)));
    }

    #[test]
    fn frobenius_condition_matters_over_f4() {
        let f = field(4);
        let u = 2;
        let a = GroupElem::new(&f, vec![[u, 0, 0, 1]]).unwrap();
        let same = GroupElem::new(&f, vec![[u, 0, 0, 1]]).unwrap();
        assert!(ZipGroupElem::new(a.clone(), same).is_err());
        let twisted = GroupElem::new(&f, vec![[f.frob(u), 1, 0, 1]]).unwrap();
        assert!(ZipGroupElem::new(a, twisted).is_ok());
    }

    #[test]
    fn action_law() {
        let f = field(2);
        let g = enumerate_g(&f, 1, DEFAULT_BOUND).unwrap();
        let e = enumerate_e(&f, 1, DEFAULT_BOUND).unwrap();
        for x in &e {
            for y in &e {
                for h in &g {
                    assert_eq!(x.act(&y.act(h)), x.compose(y).act(h));
                }
            }
        }
        let f3 = field(3);
        let g = enumerate_g(&f3, 1, DEFAULT_BOUND).unwrap();
        let id = ZipGroupElem::identity(&f3, 1);
        assert!(g.iter().all(|h| id.act(h) == *h));
    }

    #[test]
    fn census_examples_and_law() {
        let c = bruhat_census(&field(2), 1, DEFAULT_BOUND).unwrap();
        assert_eq!(c.iter().map(|(w, s)| (w.to_string(), *s)).collect::<Vec<_>>(), vec![("+".into(), 2), ("-".into(), 4)]);
        let c = bruhat_census(&field(3), 1, DEFAULT_BOUND).unwrap();
        assert_eq!(c.iter().map(|x| x.1).collect::<Vec<_>>(), vec![12, 36]);
        for q in [2, 3, 4] {
            for n in 1..=2 {
                let ctx = field(q);
                let borel = borel_lower(&ctx, n).len();
                let c = bruhat_census(&ctx, n, u128::MAX).unwrap();
                for (w, size) in &c {
                    assert_eq!(*size, (q as usize).pow(w.length() as u32) * borel);
                }
                assert_eq!(c.iter().map(|x| x.1).sum::<usize>(), group_order(q as usize, n as u32));
            }
        }
    }

    /// Oracle for cell membership: `g ∈ BẇB` iff some `b, b'` give `g = b·ẇ·b'`.
    #[test]
    fn bruhat_word_matches_double_coset_search() {
        let f = field(2);
        for n in 1..=2 {
            let borel = borel_lower(&f, n);
            let g = enumerate_g(&f, n, DEFAULT_BOUND).unwrap();
            for w in WeylElem::all(n) {
                let wd = GroupElem::weyl_lift(&f, &w);
                let mut cell: Vec<Vec<u32>> =
                    borel.iter().flat_map(|x| borel.iter().map(|y| x.mul(&wd).mul(y).flat()).collect::<Vec<_>>()).collect();
                cell.sort();
                cell.dedup();
                for h in &g {
                    assert_eq!(cell.binary_search(&h.flat()).is_ok(), bruhat_word(h) == w);
                }
            }
        }
    }

    #[test]
    fn orbits_refine_strata() {
        for q in [2, 3] {
            for n in 1..=2 {
                let ctx = field(q);
                let g = enumerate_g(&ctx, n, DEFAULT_BOUND).unwrap();
                let e = enumerate_e(&ctx, n, DEFAULT_BOUND).unwrap();
                let datum = CocharDatum::split(n, q);
                let part = orbits(&g, &e, &datum).unwrap();
                let mut seen: Vec<usize> = part.classes.iter().flat_map(|c| c.members.clone()).collect();
                seen.sort_unstable();
                assert_eq!(seen, (0..g.len()).collect::<Vec<_>>());
                let hasse = hasse_on_zip_flag(n, &ctx);
                for class in &part.classes {
                    let expected = n - class.label.length();
                    assert_eq!(vanishing_order_on_stratum(&hasse_section(n, &ctx), &class.label).unwrap(), Order::Finite(expected));
                    for &i in &class.members {
                        assert_eq!(order_on_group(&hasse, &g[i]), Order::Finite(expected));
                    }
                }
                for w in WeylElem::all(n) {
                    let rep = GroupElem::weyl_lift(&ctx, &w).mul(&GroupElem::weyl_lift(&ctx, &datum.z).inverse());
                    let i = g.iter().position(|h| *h == rep).unwrap();
                    let class = part.classes.iter().find(|c| c.members.contains(&i)).unwrap();
                    assert_eq!(class.label, w);
                }
            }
        }
    }

    #[test]
    fn orbit_sizes_small() {
        let ctx = field(2);
        let rows = strata_rows(&ctx, 1, DEFAULT_BOUND).unwrap();
        let total: usize = rows.iter().flat_map(|r| r.orbit_sizes.iter()).sum();
        assert_eq!(total, 6);
        for r in &rows {
            assert_eq!(r.orbit_sizes.iter().sum::<usize>(), r.cell_size);
        }
        assert_eq!(StrataRow::TSV_HEADER.split('\t').count(), rows[0].tsv_row().split('\t').count());
    }

    #[test]
    fn non_constant_labels_are_reported() {
        // A fake "group element" that identifies everything merges different labels.
        let ctx = field(2);
        let g = enumerate_g(&ctx, 1, DEFAULT_BOUND).unwrap();
        let swap = GroupElem::weyl_lift(&ctx, &WeylElem::longest(1));
        let bogus = ZipGroupElem { a: swap, b: GroupElem::identity(&ctx, 1) };
        let err = orbits(&g, &[bogus], &CocharDatum::split(1, 2)).unwrap_err();
        assert!(matches!(err, ZipGroupError::NonConstantLabel { .. }));
    }

    #[test]
    fn hasse_pullbacks_are_translation_invariant() {
        let ctx = field(3);
        let n = 1;
        let g = enumerate_g(&ctx, n, DEFAULT_BOUND).unwrap();
        let lower = borel_lower(&ctx, n);
        let upper = borel_upper(&ctx, n);
        let on_group = hasse_on_group(n, &ctx);
        let on_flag = hasse_on_zip_flag(n, &ctx);
        for h in &g {
            let o1 = order_on_group(&on_group, h);
            let o2 = order_on_group(&on_flag, h);
            for x in &lower {
                for y in &lower {
                    assert_eq!(order_on_group(&on_group, &x.mul(h).mul(y)), o1);
                }
                for y in &upper {
                    assert_eq!(order_on_group(&on_flag, &x.mul(h).mul(y)), o2);
                }
            }
        }
    }
}
