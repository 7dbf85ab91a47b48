//! Exact eigenvalue formulas for B-spline Galerkin matrices: grid families
//! on `[0, pi]`, the closed-form grid assignments for the mass and
//! generalized stiffness matrices, verification, and empirical inference of
//! the stiffness assignment.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::eig::{eig_gen_sym_def, eig_sym, Spectrum};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::galerkin::{assemble_km, reference_blocks, ReferenceBlocks};
use crate::matching::sorted_match;

/// `a(m) = m + floor(sqrt(8 m))`, with an integer square root.
pub fn seq_a(m: u64) -> Result<u64> {
    if m == 0 {
        return invalid("a(m) is defined for m >= 1");
    }
    Ok(m + (8 * m).isqrt())
}

/// Smallest `alpha >= 1` with `sum_{m <= alpha} a(m) <= p <= sum_{m <= alpha + 1} a(m)`.
pub fn alpha(p: usize) -> Result<usize> {
    if p < 3 {
        return invalid("alpha is defined for p >= 3");
    }
    let p = p as u64;
    let mut lo = seq_a(1)?;
    let mut al = 1u64;
    loop {
        let hi = lo + seq_a(al + 1)?;
        if lo <= p && p <= hi {
            return Ok(al as usize);
        }
        lo = hi;
        al += 1;
    }
}

/// Threshold index used by [`grid_assign_m`] for `k = 1`: the largest
/// `alpha` with `3 + sum_{m < alpha} a(m) <= p`. It equals [`alpha`] for
/// `p <= 5` and differs from it at `p = 6, 7, 8`, where only this one
/// reproduces the computed spectra.
pub fn alpha_mass(p: usize) -> Result<usize> {
    if p < 3 {
        return invalid("alpha is defined for p >= 3");
    }
    let p = p as u64;
    let mut start = 3u64;
    let mut al = 1u64;
    loop {
        let next = start + seq_a(al)?;
        if next > p {
            return Ok(al as usize);
        }
        start = next;
        al += 1;
    }
}

/// Subsets of `{i pi / n : i = 0..n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GridKind {
    /// All `n + 1` points.
    Full,
    /// Without `0`.
    NoZero,
    /// Without `pi`.
    NoPi,
    /// Without `0` and `pi`.
    Interior,
}

impl GridKind {
    /// Search order used by [`infer_grid_assignment`].
    pub const ALL: [GridKind; 4] = [GridKind::Full, GridKind::NoZero, GridKind::NoPi, GridKind::Interior];

    pub fn count(self, n: usize) -> usize {
        match self {
            GridKind::Full => n + 1,
            GridKind::NoZero | GridKind::NoPi => n,
            GridKind::Interior => n - 1,
        }
    }

    fn range(self, n: usize) -> std::ops::RangeInclusive<usize> {
        let lo = usize::from(matches!(self, GridKind::NoZero | GridKind::Interior));
        let hi = if matches!(self, GridKind::NoPi | GridKind::Interior) { n - 1 } else { n };
        lo..=hi
    }

    pub fn label(self) -> &'static str {
        match self {
            GridKind::Full => "full",
            GridKind::NoZero => "no0",
            GridKind::NoPi => "nopi",
            GridKind::Interior => "interior",
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GridKind::ALL
            .into_iter()
            .find(|g| g.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown grid kind {s:?}")))
    }
}

pub fn grid_points(kind: GridKind, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return invalid("grids need n >= 1");
    }
    Ok(kind.range(n).map(|i| i as f64 * PI / n as f64).collect())
}

fn check_pkj(p: usize, k: usize, j: usize) -> Result<()> {
    if p == 0 || k > 1 || k >= p {
        return invalid(format!("unsupported (p, k) = ({p}, {k})"));
    }
    if j == 0 || j > p - k {
        return invalid(format!("branch index {j} outside 1..={}", p - k));
    }
    Ok(())
}

/// Grid of branch `j` (1-based) in the eigenvalue formula for `n M_{n,p,k}`.
pub fn grid_assign_m(p: usize, k: usize, j: usize) -> Result<GridKind> {
    check_pkj(p, k, j)?;
    let odd = (p + j) % 2 == 1;
    if k == 0 {
        return Ok(if odd {
            GridKind::NoZero
        } else if j != p {
            GridKind::NoPi
        } else {
            GridKind::Interior
        });
    }
    if p == 2 {
        return Ok(GridKind::NoZero);
    }
    let c = p - alpha_mass(p)? - 1;
    Ok(if j == c {
        GridKind::Full
    } else if j == p - 1 {
        GridKind::Interior
    } else if (j < c && odd) || (c < j && !odd) {
        GridKind::NoZero
    } else {
        GridKind::NoPi
    })
}

/// Grid of branch `j` (1-based) in the eigenvalue formula for
/// `n^{-2} M_{n,p,k}^{-1} K_{n,p,k}`.
pub fn grid_assign_l(p: usize, k: usize, j: usize) -> Result<GridKind> {
    check_pkj(p, k, j)?;
    Ok(if (p + j) % 2 == 0 {
        GridKind::Interior
    } else if j > 1 {
        GridKind::Full
    } else {
        GridKind::NoZero
    })
}

/// Matrix families with exact eigenvalue formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `n^{-1} K_{n,p,k}` against the branches of `f_{p,k}`.
    K,
    /// `n M_{n,p,k}` against the branches of `h_{p,k}`.
    M,
    /// `n^{-2} M^{-1} K` against the branches of `e_{p,k}`.
    L,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" | "k" => Ok(Family::K),
            "M" | "m" => Ok(Family::M),
            "L" | "l" => Ok(Family::L),
            _ => invalid(format!("unknown family {s:?}")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::K => "K",
            Family::M => "M",
            Family::L => "L",
        })
    }
}

impl Family {
    /// Spectrum of the scaled matrix for `(n, p, k)`.
    pub fn spectrum(self, n: usize, p: usize, k: usize) -> Result<Spectrum> {
        let (km, mm) = assemble_km(n, p, k)?;
        let nf = n as f64;
        match self {
            Family::K => eig_sym(&(km / nf)),
            Family::M => eig_sym(&(mm * nf)),
            Family::L => Ok(eig_gen_sym_def(&km, &mm)?.scaled(1.0 / (nf * nf))),
        }
    }

    /// Ascending branches of the family's symbol at `theta`.
    pub fn branches(self, blocks: &ReferenceBlocks, theta: f64) -> Result<Vec<f64>> {
        match self {
            Family::K => Ok(blocks.f_branches(theta)),
            Family::M => Ok(blocks.h_branches(theta)),
            Family::L => blocks.e_branches(theta),
        }
    }

    /// Closed-form assignment, where one is known.
    pub fn assignment(self, p: usize, k: usize) -> Result<Option<Vec<GridKind>>> {
        let r = p.checked_sub(k).filter(|&r| r > 0).ok_or_else(|| {
            Error::InvalidArgument(format!("unsupported (p, k) = ({p}, {k})"))
        })?;
        match self {
            Family::K => Ok(None),
            Family::M => (1..=r).map(|j| grid_assign_m(p, k, j)).collect::<Result<_>>().map(Some),
            Family::L => (1..=r).map(|j| grid_assign_l(p, k, j)).collect::<Result<_>>().map(Some),
        }
    }
}

/// Branch values at `i pi / n`, `i = 0..n`: `table[i][j]`.
fn branch_table<B>(branches: B, n: usize) -> Result<Vec<Vec<f64>>>
where
    B: Fn(f64) -> Result<Vec<f64>>,
{
    (0..=n).map(|i| branches(i as f64 * PI / n as f64)).collect()
}

fn formula_values(table: &[Vec<f64>], assignment: &[GridKind], n: usize) -> Result<Vec<f64>> {
    let mut vals = Vec::new();
    for (j, kind) in assignment.iter().enumerate() {
        for i in kind.range(n) {
            let row = &table[i];
            if j >= row.len() {
                return invalid(format!("branch {} missing at theta index {i}", j + 1));
            }
            vals.push(row[j]);
        }
    }
    Ok(vals)
}

/// Compares a spectrum against `{lambda_j(theta) : theta in grid_j}` by
/// sorted matching. Returns whether the error is within `tol`, and the error.
pub fn verify_eig_formula<B>(
    spectrum: &Spectrum,
    branches: B,
    assignment: &[GridKind],
    n: usize,
    tol: f64,
) -> Result<(bool, f64)>
where
    B: Fn(f64) -> Result<Vec<f64>>,
{
    let total: usize = assignment.iter().map(|g| g.count(n)).sum();
    if total != spectrum.len() {
        return invalid(format!("assignment covers {total} points, spectrum has {}", spectrum.len()));
    }
    let table = branch_table(branches, n)?;
    let vals = formula_values(&table, assignment, n)?;
    let m = sorted_match(&vals, spectrum.values())?.m_n;
    Ok((m <= tol, m))
}

fn near_some(sorted: &[f64], v: f64, tol: f64) -> bool {
    let idx = sorted.partition_point(|&x| x < v - tol);
    idx < sorted.len() && sorted[idx] <= v + tol
}

/// First assignment, in lexicographic order over [`GridKind::ALL`] per
/// branch, whose point count equals the spectrum size and whose formula
/// passes [`verify_eig_formula`] at `tol`.
///
/// Besides the count constraint, a kind is skipped for branch `j` when one
/// of its points has no eigenvalue within `tol`; such a kind cannot pass.
pub fn infer_grid_assignment<B>(
    spectrum: &Spectrum,
    branches: B,
    p: usize,
    k: usize,
    n: usize,
    tol: f64,
) -> Result<Option<Vec<GridKind>>>
where
    B: Fn(f64) -> Result<Vec<f64>>,
{
    if k >= p {
        return invalid(format!("unsupported (p, k) = ({p}, {k})"));
    }
    if n == 0 {
        return invalid("n must be positive");
    }
    let r = p - k;
    let table = branch_table(branches, n)?;
    let eigs = spectrum.values();
    let allowed: Vec<Vec<GridKind>> = (0..r)
        .map(|j| {
            GridKind::ALL
                .into_iter()
                .filter(|kind| kind.range(n).all(|i| table[i].get(j).is_some_and(|&v| near_some(eigs, v, tol))))
                .collect()
        })
        .collect();
    for candidate in allowed.into_iter().multi_cartesian_product() {
        let total: usize = candidate.iter().map(|g| g.count(n)).sum();
        if total != spectrum.len() {
            continue;
        }
        let vals = formula_values(&table, &candidate, n)?;
        if sorted_match(&vals, eigs)?.m_n <= tol {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// One `(family, p, k, n)` verification.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub p: usize,
    pub k: usize,
    pub n: usize,
    pub assignment: Option<Vec<GridKind>>,
    pub max_error: f64,
    pub pass: bool,
}

/// Verifies one tuple. For [`Family::K`] the assignment is inferred; the
/// others use their closed forms.
pub fn verify_tuple(family: Family, p: usize, k: usize, n: usize, tol: f64) -> Result<SweepRow> {
    let blocks = reference_blocks(p, k)?;
    let spectrum = family.spectrum(n, p, k)?;
    let br = |t: f64| family.branches(&blocks, t);
    let (assignment, max_error, pass) = match family.assignment(p, k)? {
        Some(a) => {
            let (pass, err) = verify_eig_formula(&spectrum, br, &a, n, tol)?;
            (Some(a), err, pass)
        }
        None => match infer_grid_assignment(&spectrum, br, p, k, n, tol)? {
            Some(a) => {
                let (pass, err) = verify_eig_formula(&spectrum, br, &a, n, tol)?;
                (Some(a), err, pass)
            }
            None => (None, f64::INFINITY, false),
        },
    };
    Ok(SweepRow { family, p, k, n, assignment, max_error, pass })
}

/// All `(p, k, n)` with `1 <= p <= pmax`, `k` in `ks` below `p`, `n` in
/// `ns`, in that nesting order; rows are computed concurrently but returned
/// in order.
pub fn sweep(family: Family, pmax: usize, ks: &[usize], ns: &[usize], tol: f64, exec: Execution) -> Result<Vec<SweepRow>> {
    let tuples: Vec<(usize, usize, usize)> = (1..=pmax)
        .flat_map(|p| ks.iter().filter(move |&&k| k < p).flat_map(move |&k| ns.iter().map(move |&n| (p, k, n))))
        .collect();
    exec.map(&tuples, |&(p, k, n)| verify_tuple(family, p, k, n, tol))
        .into_iter()
        .collect()
}

/// Inferred stiffness assignments for one `(p, k)` over several `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceReport {
    pub p: usize,
    pub k: usize,
    pub per_n: Vec<(usize, Option<Vec<GridKind>>)>,
}

impl InferenceReport {
    /// The common assignment if every `n` produced the same one.
    pub fn stable(&self) -> Option<&Vec<GridKind>> {
        let first = self.per_n.first()?.1.as_ref()?;
        self.per_n.iter().all(|(_, a)| a.as_ref() == Some(first)).then_some(first)
    }
}

pub fn infer_stiffness_assignments(
    pmax: usize,
    ks: &[usize],
    ns: &[usize],
    tol: f64,
    exec: Execution,
) -> Result<Vec<InferenceReport>> {
    let pairs: Vec<(usize, usize)> = (1..=pmax)
        .flat_map(|p| ks.iter().filter(move |&&k| k < p).map(move |&k| (p, k)))
        .collect();
    exec.map(&pairs, |&(p, k)| -> Result<InferenceReport> {
        let blocks = reference_blocks(p, k)?;
        let per_n = ns
            .iter()
            .map(|&n| {
                let s = Family::K.spectrum(n, p, k)?;
                let a = infer_grid_assignment(&s, |t| Family::K.branches(&blocks, t), p, k, n, tol)?;
                Ok((n, a))
            })
            .collect::<Result<_>>()?;
        Ok(InferenceReport { p, k, per_n })
    })
    .into_iter()
    .collect()
}
