//! Hilbert F-zips as line data: for each block `D_i ≅ F²` of `H¹ = F^{2n}` a
//! Hodge line `Ω_i` and a conjugate line `C_i`. The partial Hasse invariant
//! `h_i` vanishes iff `C_i = Ω_i`; the total order is compared against the
//! position of `⋀ⁿ C` in the filtration of `⋀ⁿ H¹` induced by `Ω = ⊕Ω_i`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{induced_filtration, wedge_of_lines, LinAlgError, Matrix, SemilinearMap, Subspace};
use crate::field::{FieldCtx, FieldError};
use crate::weylchar::{Perm, WeylError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZipError {
    #[error("expected {expected} entries, got {got}")]
    Length { expected: usize, got: usize },
    #[error("block {0}: not a line in F^2")]
    NotALine(usize),
    #[error("block {0}: Frobenius data kills the complement of the Hodge line")]
    Degenerate(usize),
    #[error("enumeration needs {needed} configurations, bound is {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
    #[error("malformed zip file: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// A line in `F²`, `None` for the zero vector.
pub fn block_line(ctx: &Arc<FieldCtx>, v: [u32; 2]) -> Option<Subspace> {
    let s = Subspace::span(ctx, 2, &[v.to_vec()]);
    (s.dim() == 1).then_some(s)
}

/// The `q + 1` lines of `F²` ordered by their normalized generator.
pub fn lines_of_plane(ctx: &Arc<FieldCtx>) -> Vec<Subspace> {
    let mut gens = vec![[0, ctx.one()]];
    gens.extend(ctx.elements().map(|t| [ctx.one(), t]));
    gens.into_iter().map(|v| block_line(ctx, v).expect("nonzero")).collect()
}

fn generator(line: &Subspace) -> [u32; 2] {
    let r = line.basis().row(0);
    [r[0], r[1]]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertZip {
    ctx: Arc<FieldCtx>,
    perm: Perm,
    omega: Vec<Subspace>,
    conj: Vec<Subspace>,
}

impl HilbertZip {
    pub fn new(ctx: &Arc<FieldCtx>, perm: Perm, omega: Vec<Subspace>, conj: Vec<Subspace>) -> Result<HilbertZip, ZipError> {
        let n = perm.len();
        for v in [&omega, &conj] {
            if v.len() != n {
                return Err(ZipError::Length { expected: n, got: v.len() });
            }
        }
        for (i, l) in omega.iter().chain(&conj).enumerate() {
            if l.ambient_dim() != 2 || l.dim() != 1 {
                return Err(ZipError::NotALine(i % n.max(1)));
            }
            if **l.ctx() != **ctx {
                return Err(LinAlgError::ContextMismatch.into());
            }
        }
        Ok(HilbertZip { ctx: ctx.clone(), perm, omega, conj })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    pub fn omega(&self) -> &[Subspace] {
        &self.omega
    }

    pub fn conj(&self) -> &[Subspace] {
        &self.conj
    }

    /// `Ω = ⊕ Ω_i` inside `F^{2n}`.
    pub fn hodge_subspace(&self) -> Subspace {
        let n = self.n();
        let rows: Vec<Vec<u32>> = self.omega.iter().enumerate().flat_map(|(i, l)| l.embed(2 * n, 2 * i).basis_vectors()).collect();
        Subspace::span(&self.ctx, 2 * n, &rows)
    }

    /// The line `⋀ⁿ ConjFil₀ = C_1 ∧ … ∧ C_n`.
    pub fn conjugate_wedge(&self) -> Subspace {
        let n = self.n();
        let lines: Vec<Subspace> = self.conj.iter().enumerate().map(|(i, l)| l.embed(2 * n, 2 * i)).collect();
        wedge_of_lines(&lines).expect("conjugate lines sit in their blocks")
    }

    pub fn with_conj(&self, i: usize, line: Subspace) -> HilbertZip {
        let mut z = self.clone();
        z.conj[i] = line;
        z
    }

    pub fn to_json(&self) -> serde_json::Value {
        let line = |l: &Subspace| -> Vec<Vec<u32>> { generator(l).iter().map(|&x| self.ctx.decode(x)).collect() };
        serde_json::json!({
            "p": self.ctx.p(),
            "k": self.ctx.k(),
            "n": self.n(),
            "perm": self.perm.images(),
            "omega": self.omega.iter().map(line).collect::<Vec<_>>(),
            "conj": self.conj.iter().map(line).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<HilbertZip, ZipError> {
        let file: ZipFile = serde_json::from_str(s).map_err(|e| ZipError::Parse(e.to_string()))?;
        file.into_zip()
    }
}

impl fmt::Display for HilbertZip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PermRepr {
    Named(String),
    Explicit(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ElemRepr {
    Int(i64),
    Coeffs(Vec<i64>),
}

/// On-disk zip datum; lines are given by a generator in block coordinates.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZipFile {
    p: u32,
    #[serde(default = "one")]
    k: usize,
    n: usize,
    perm: PermRepr,
    omega: Vec<Vec<ElemRepr>>,
    conj: Vec<Vec<ElemRepr>>,
}

fn one() -> usize {
    1
}

impl ZipFile {
    fn into_zip(self) -> Result<HilbertZip, ZipError> {
        let ctx = FieldCtx::new(self.p, self.k)?;
        let perm = parse_perm(&self.perm, self.n)?;
        let elem = |e: &ElemRepr| -> Result<u32, ZipError> {
            match e {
                ElemRepr::Int(v) => Ok(ctx.from_int(*v)),
                ElemRepr::Coeffs(c) => Ok(crate::field::FieldElem::from_coeffs(&ctx, c)?.value()),
            }
        };
        let lines = |raw: &[Vec<ElemRepr>]| -> Result<Vec<Subspace>, ZipError> {
            raw.iter()
                .enumerate()
                .map(|(i, v)| {
                    if v.len() != 2 {
                        return Err(ZipError::NotALine(i));
                    }
                    block_line(&ctx, [elem(&v[0])?, elem(&v[1])?]).ok_or(ZipError::NotALine(i))
                })
                .collect()
        };
        let omega = lines(&self.omega)?;
        let conj = lines(&self.conj)?;
        HilbertZip::new(&ctx, perm, omega, conj)
    }
}

fn parse_perm(repr: &PermRepr, n: usize) -> Result<Perm, ZipError> {
    match repr {
        PermRepr::Named(s) => PermSpec::parse(s).map_err(ZipError::Parse)?.build(n),
        PermRepr::Explicit(v) => {
            if v.len() != n {
                return Err(ZipError::Length { expected: n, got: v.len() });
            }
            Ok(Perm::new(v.clone())?)
        }
    }
}

/// Splitting behaviour of `p`, as given on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermSpec {
    Split,
    Inert,
    Explicit(Vec<usize>),
}

impl PermSpec {
    /// `split`, `inert`, or a comma-separated image list such as `1,2,0`.
    pub fn parse(s: &str) -> Result<PermSpec, String> {
        match s.trim() {
            "split" => Ok(PermSpec::Split),
            "inert" => Ok(PermSpec::Inert),
            other => other
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| format!("bad permutation {other:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()
                .map(PermSpec::Explicit),
        }
    }

    pub fn build(&self, n: usize) -> Result<Perm, ZipError> {
        match self {
            PermSpec::Split => Ok(Perm::identity(n)),
            PermSpec::Inert => Ok(Perm::cycle(n)),
            PermSpec::Explicit(v) => {
                if v.len() != n {
                    return Err(ZipError::Length { expected: n, got: v.len() });
                }
                Ok(Perm::new(v.clone())?)
            }
        }
    }
}

/// Builds the conjugate lines from Frobenius data: `C_i` is spanned by
/// `F_i · Frob(c)`, where `c` is the first standard basis vector of block
/// `π(i)` not lying in `Ω_{π(i)}`.
pub fn zip_from_frobenius(
    ctx: &Arc<FieldCtx>,
    perm: Perm,
    omega: Vec<Subspace>,
    frob: &[Matrix],
) -> Result<HilbertZip, ZipError> {
    let n = perm.len();
    if frob.len() != n {
        return Err(ZipError::Length { expected: n, got: frob.len() });
    }
    if omega.len() != n {
        return Err(ZipError::Length { expected: n, got: omega.len() });
    }
    let mut conj = Vec::with_capacity(n);
    for (i, m) in frob.iter().enumerate() {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(LinAlgError::DimensionMismatch { expected: 2, got: m.rows() }.into());
        }
        if m.is_zero() {
            return Err(ZipError::Degenerate(i));
        }
        let source = &omega[perm.apply(i)];
        let complement = [vec![ctx.one(), 0], vec![0, ctx.one()]]
            .into_iter()
            .find(|e| !source.contains_vector(e))
            .expect("a line misses one of the two coordinate vectors");
        let image = SemilinearMap::new(m.clone(), 1).apply_raw(&complement)?;
        let line = block_line(ctx, [image[0], image[1]]).ok_or(ZipError::Degenerate(i))?;
        conj.push(line);
    }
    HilbertZip::new(ctx, perm, omega, conj)
}

/// `flags[i]` is true iff `h_i = 0`, i.e. `C_i = Ω_i`.
pub fn partial_hasse_flags(z: &HilbertZip) -> Vec<bool> {
    z.omega.iter().zip(&z.conj).map(|(o, c)| o == c).collect()
}

/// Order of the Hasse invariant: one for each vanishing partial Hasse invariant.
pub fn hasse_order(z: &HilbertZip) -> usize {
    partial_hasse_flags(z).into_iter().filter(|&b| b).count()
}

/// The decreasing filtration `Fil^0 ⊇ … ⊇ Fil^n` of `⋀ⁿ F^{2n}` induced by `Ω`.
#[derive(Debug, Clone)]
pub struct HodgeFiltration {
    levels: Vec<Subspace>,
}

impl HodgeFiltration {
    pub fn new(omega: &Subspace) -> Result<HodgeFiltration, LinAlgError> {
        let n = omega.ambient_dim() / 2;
        let levels = (0..=n).map(|m| induced_filtration(omega, m)).collect::<Result<_, _>>()?;
        Ok(HodgeFiltration { levels })
    }

    pub fn level(&self, m: usize) -> &Subspace {
        &self.levels[m]
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// Largest `m` with `line ⊆ Fil^m`.
    pub fn max_level_containing(&self, line: &Subspace) -> usize {
        (0..=self.top())
            .rev()
            .find(|&m| self.levels[m].contains(line).expect("same exterior power"))
            .expect("Fil^0 is everything")
    }
}

/// Largest `m` with `⋀ⁿ ConjFil₀ ⊆ Fil^m`.
pub fn max_hodge_level(z: &HilbertZip) -> usize {
    let filtration = HodgeFiltration::new(&z.hodge_subspace()).expect("Ω has dimension n");
    filtration.max_level_containing(&z.conjugate_wedge())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZipReport {
    pub flags: Vec<bool>,
    pub hasse_order: usize,
    pub m_max: usize,
    pub consistent: bool,
}

impl ZipReport {
    fn build(flags: Vec<bool>, m_max: usize) -> ZipReport {
        let hasse_order = flags.iter().filter(|&&b| b).count();
        ZipReport { flags, hasse_order, m_max, consistent: hasse_order == m_max }
    }

    pub const TSV_HEADER: &'static str = "flags\thasse_order\tm_max\tconsistent";

    pub fn tsv_row(&self) -> String {
        let flags: String = self.flags.iter().map(|&b| if b { '1' } else { '0' }).collect();
        format!("{}\t{}\t{}\t{}", flags, self.hasse_order, self.m_max, self.consistent)
    }
}

pub fn check_equivalence(z: &HilbertZip) -> ZipReport {
    ZipReport::build(partial_hasse_flags(z), max_hodge_level(z))
}

fn check_with(z: &HilbertZip, filtration: &HodgeFiltration) -> ZipReport {
    ZipReport::build(partial_hasse_flags(z), filtration.max_level_containing(&z.conjugate_wedge()))
}

/// Number of configurations `(q+1)^{2n}` that [`enumerate_zips`] would yield.
pub fn zip_count(ctx: &FieldCtx, n: usize) -> u128 {
    (ctx.order() as u128 + 1).saturating_pow(2 * n as u32)
}

/// Every choice of `(Ω_i, C_i)`: Hodge tuples outermost, each tuple
/// lexicographic with block 0 most significant.
pub fn enumerate_zips(
    ctx: &Arc<FieldCtx>,
    perm: &Perm,
    bound: u128,
) -> Result<impl Iterator<Item = HilbertZip>, ZipError> {
    let n = perm.len();
    let needed = zip_count(ctx, n);
    if needed > bound {
        return Err(ZipError::BoundExceeded { needed, bound });
    }
    let lines = lines_of_plane(ctx);
    let per_role = (lines.len() as u64).pow(n as u32);
    let ctx = ctx.clone();
    let perm = perm.clone();
    let tuple = move |lines: &[Subspace], mut idx: u64| -> Vec<Subspace> {
        let mut out = vec![lines[0].clone(); n];
        for slot in out.iter_mut().rev() {
            *slot = lines[(idx % lines.len() as u64) as usize].clone();
            idx /= lines.len() as u64;
        }
        out
    };
    Ok((0..per_role).flat_map(move |o| {
        let omega = tuple(&lines, o);
        let lines = lines.clone();
        let ctx = ctx.clone();
        let perm = perm.clone();
        (0..per_role).map(move |c| HilbertZip {
            ctx: ctx.clone(),
            perm: perm.clone(),
            omega: omega.clone(),
            conj: tuple(&lines, c),
        })
    }))
}

#[derive(Debug, Clone, Default)]
pub struct EquivalenceSummary {
    pub total: usize,
    pub consistent: usize,
    pub counterexamples: Vec<(HilbertZip, ZipReport)>,
}

impl EquivalenceSummary {
    pub fn all_consistent(&self) -> bool {
        self.total == self.consistent
    }
}

/// Runs [`check_equivalence`] over every enumerated zip, reusing the Hodge
/// filtration across all conjugate choices for a fixed `Ω`.
pub fn verify_equivalence(ctx: &Arc<FieldCtx>, perm: &Perm, bound: u128) -> Result<EquivalenceSummary, ZipError> {
    let mut summary = EquivalenceSummary::default();
    let mut cached: Option<(Vec<Subspace>, HodgeFiltration)> = None;
    for z in enumerate_zips(ctx, perm, bound)? {
        if cached.as_ref().is_none_or(|(o, _)| *o != z.omega) {
            cached = Some((z.omega.clone(), HodgeFiltration::new(&z.hodge_subspace())?));
        }
        let report = check_with(&z, &cached.as_ref().expect("just filled").1);
        summary.total += 1;
        if report.consistent {
            summary.consistent += 1;
        } else {
            summary.counterexamples.push((z, report));
        }
    }
    Ok(summary)
}

/// Flip every non-vanishing `h_i` to vanishing (`C_i := Ω_i`) and check that
/// both sides of the equivalence go up by exactly one. Returns the number of
/// flips checked and the failures.
pub fn verify_flag_flips(ctx: &Arc<FieldCtx>, perm: &Perm, bound: u128) -> Result<(usize, Vec<HilbertZip>), ZipError> {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut cached: Option<(Vec<Subspace>, HodgeFiltration)> = None;
    for z in enumerate_zips(ctx, perm, bound)? {
        if cached.as_ref().is_none_or(|(o, _)| *o != z.omega) {
            cached = Some((z.omega.clone(), HodgeFiltration::new(&z.hodge_subspace())?));
        }
        let fil = &cached.as_ref().expect("just filled").1;
        let before = check_with(&z, fil);
        for (i, &flag) in before.flags.iter().enumerate() {
            if flag {
                continue;
            }
            let flipped = z.with_conj(i, z.omega[i].clone());
            let after = check_with(&flipped, fil);
            checked += 1;
            if after.hasse_order != before.hasse_order + 1 || after.m_max != before.m_max + 1 {
                failures.push(z.clone());
            }
        }
    }
    Ok((checked, failures))
}
