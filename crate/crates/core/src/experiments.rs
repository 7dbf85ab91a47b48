//! End-to-end experiment drivers shared by the acceptance tests and the CLI.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::catalog::{chi_one_symbol, cosine_symbol, e5_branch1, e5_branch2, e5_matrix, e5_symbol, iga_symbol, Coefficient, ToeplitzExample};
use crate::domain::{RealMultiset, ScalarSymbol};
use crate::eig::{eig_sym, eig_sym_tridiag, Spectrum};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::galerkin::{fd_matrix, iga_2d_matrix};
use crate::grid::AUGrid;
use crate::matching::{grid_samples, mn_curve, mn_curve_2d, sorted_match, MnRow};
use crate::split::{split_and_match, Partition, SplitMatch};
use crate::toeplitz::{toeplitz_build_real, FourierCoeffs};

/// Spectrum of `T_n(f)` for a real even symbol on `[-pi, pi]`. Coefficients
/// are computed concurrently under `exec`.
pub fn toeplitz_spectrum(f: &ScalarSymbol, n: usize, exec: Execution) -> Result<Spectrum> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let c = FourierCoeffs::compute_with(f, n - 1, exec);
    eig_sym(&toeplitz_build_real(&c, n)?)
}

/// `{i pi / (n + 1) : i = 1..n}`.
pub fn interior_grid(n: usize) -> Result<AUGrid> {
    AUGrid::from_1d(0.0, PI, (1..=n).map(|i| i as f64 * PI / (n + 1) as f64).collect())
}

/// `M_n` of a Toeplitz example on the grid `i pi / (n + 1)`.
pub fn toeplitz_mn_table(example: ToeplitzExample, ns: &[usize], exec: Execution) -> Result<Vec<MnRow>> {
    let f = example.symbol();
    let spectra: Vec<Result<Spectrum>> = exec.map(ns, |&n| toeplitz_spectrum(&f, n, exec));
    let mut by_n = BTreeMap::new();
    for (&n, s) in ns.iter().zip(spectra) {
        by_n.insert(n, RealMultiset::new(s?.into_values())?);
    }
    mn_curve(&f, interior_grid, &by_n, ns, exec)
}

/// Side of the square grid for `n`, which must be a perfect square.
pub fn square_side(n: usize) -> Result<usize> {
    let m = n.isqrt();
    if m * m != n {
        return invalid(format!("n = {n} is not a perfect square"));
    }
    Ok(m)
}

/// `M_n` of the finite-difference matrices against `a(x)(2 - 2 cos theta)`
/// on the `sqrt(n) x sqrt(n)` uniform grid.
pub fn fd_mn_table(coef: Coefficient, ns: &[usize], exec: Execution) -> Result<Vec<MnRow>> {
    for &n in ns {
        square_side(n)?;
    }
    let spectra: Vec<Result<Spectrum>> = exec.map(ns, |&n| {
        let (d, o) = fd_matrix(|x| coef.eval(x), n);
        eig_sym_tridiag(&d, &o)
    });
    let mut by_n = BTreeMap::new();
    for (&n, s) in ns.iter().zip(spectra) {
        by_n.insert(n, RealMultiset::new(s?.into_values())?);
    }
    let f = coef.symbol();
    mn_curve_2d(&f, |n| { let m = n.isqrt(); vec![m, m] }, &by_n, ns, exec)
}

/// Exactness row: largest deviation from a closed-form spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRow {
    pub n: usize,
    pub max_error: f64,
    pub min_eig: f64,
    pub max_eig: f64,
}

/// `max_i |lambda_i(T_n(a + b cos)) - (a + b cos(i pi/(n+1)))|` after sorting.
pub fn cosine_exactness(a: f64, b: f64, ns: &[usize], exec: Execution) -> Result<Vec<ExactRow>> {
    let f = cosine_symbol(a, b);
    exec.map(ns, |&n| -> Result<ExactRow> {
        let s = toeplitz_spectrum(&f, n, Execution::Sequential)?;
        let samples = grid_samples(&f, &interior_grid(n)?);
        let m = sorted_match(&samples, s.values())?;
        Ok(ExactRow { n, max_error: m.m_n, min_eig: s.values()[0], max_eig: s.values()[n - 1] })
    })
    .into_iter()
    .collect()
}

/// Isogeometric Kronecker-sum spectrum against the symbol on `(i1 pi/n, i2 pi/n)`.
pub fn iga_exactness(ns: &[usize], exec: Execution) -> Result<Vec<ExactRow>> {
    let f = iga_symbol();
    let spectra: Vec<Result<Spectrum>> = exec.map(ns, |&n| eig_sym(&iga_2d_matrix(n)?));
    let mut by_n = BTreeMap::new();
    let mut bounds = BTreeMap::new();
    for (&n, s) in ns.iter().zip(spectra) {
        let s = s?;
        bounds.insert(n, (s.values()[0], s.values()[s.len() - 1]));
        by_n.insert(n, RealMultiset::new(s.into_values())?);
    }
    let rows = mn_curve_2d(&f, |n| vec![n, n], &by_n, ns, exec)?;
    Ok(rows
        .into_iter()
        .map(|r| ExactRow { n: r.n, max_error: r.m_n, min_eig: bounds[&r.n].0, max_eig: bounds[&r.n].1 })
        .collect())
}

/// Outcome of the two-branch splitting pipeline on the quadratic `C^0`
/// Galerkin matrix.
#[derive(Debug, Clone)]
pub struct E5Outcome {
    pub n: usize,
    pub cardinalities: Vec<usize>,
    pub branch_mn: Vec<f64>,
    pub split: SplitMatch,
}

/// Splits the spectrum of [`e5_matrix`] into branches and matches each part
/// against its branch on `{i pi / n}` (`i = 1..n`, resp. `1..n-1`).
pub fn e5_pipeline(n: usize, exec: Execution) -> Result<E5Outcome> {
    if n < 2 {
        return invalid("n must be at least 2");
    }
    let s = eig_sym(&e5_matrix(n))?;
    let lambdas = RealMultiset::new(s.into_values())?;
    // ascending spectrum: lowest n on the first branch
    let assignment = (0..lambdas.len()).map(|i| usize::from(i >= n)).collect();
    let reference = Partition::new(lambdas.values().to_vec(), assignment, 2)?;
    let grid1: Vec<f64> = (1..=n).map(|i| i as f64 * PI / n as f64).collect();
    let grid2: Vec<f64> = (1..n).map(|i| i as f64 * PI / n as f64).collect();
    let split = split_and_match(&lambdas, &e5_symbol(), &reference, &[grid1, grid2], 1e-6, exec)?;
    Ok(E5Outcome {
        n,
        cardinalities: split.partition.cardinalities(),
        branch_mn: split.matches.iter().map(|m| m.m_n).collect(),
        split,
    })
}

/// Closed-form branch values used to cross-check [`e5_pipeline`].
pub fn e5_branch_values(n: usize) -> (Vec<f64>, Vec<f64>) {
    let b1 = (1..=n).map(|i| e5_branch1(i as f64 * PI / n as f64)).collect();
    let b2 = (1..n).map(|i| e5_branch2(i as f64 * PI / n as f64)).collect();
    (b1, b2)
}

/// Indicator of `{1}` sampled at `i / n` against `n` zero eigenvalues.
pub fn counterexample(ns: &[usize]) -> Result<Vec<MnRow>> {
    let f = chi_one_symbol();
    let mut by_n = BTreeMap::new();
    for &n in ns {
        by_n.insert(n, RealMultiset::new(vec![0.0; n])?);
    }
    let grid = |n: usize| AUGrid::from_1d(0.0, 1.0, (1..=n).map(|i| i as f64 / n as f64).collect());
    mn_curve(&f, grid, &by_n, ns, Execution::Sequential)
}
