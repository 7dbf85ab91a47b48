//! Discretization matrices: variable-coefficient finite differences, the
//! biquadratic isogeometric Laplacian, and B-spline Galerkin stiffness/mass
//! matrices with their block symbols.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bspline::{deriv_unchecked, eta, eval_unchecked, BSplineBasis};
use crate::eig::{eig_gen_hermitian_def, eig_hermitian_unchecked};
use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;

/// Tridiagonal finite-difference matrix of `-(a u')'` on the grid
/// `x_i = i / (n + 1)`: `diag_i = a_{i-1/2} + a_{i+1/2}`, `off_i = -a_{i+1/2}`.
pub fn fd_matrix<A: Fn(f64) -> f64>(a: A, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / (n + 1) as f64;
    // a at x_{i+1/2}, i = 0..n
    let half: Vec<f64> = (0..=n).map(|i| a((i as f64 + 0.5) * h)).collect();
    let diag = (0..n).map(|i| half[i] + half[i + 1]).collect();
    let off = (1..n).map(|i| -half[i]).collect();
    (diag, off)
}

/// Dense form of a symmetric tridiagonal matrix.
pub fn tridiag_dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
    }
    for (i, &v) in off.iter().enumerate() {
        m[(i, i + 1)] = v;
        m[(i + 1, i)] = v;
    }
    m
}

fn banded(n: usize, center: f64, end: f64, off1: f64, off1_end: f64, off2: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = if i == 0 || i == n - 1 { end } else { center };
        if i + 1 < n {
            let v = if i == 0 || i + 2 == n { off1_end } else { off1 };
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        if i + 2 < n {
            m[(i, i + 2)] = off2;
            m[(i + 2, i)] = off2;
        }
    }
    m
}

/// Stiffness and mass stencils `(K_n, M_n)` of the 1D biquadratic
/// isogeometric discretization.
pub fn iga_stencils(n: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if n < 3 {
        return invalid("the stencils need n >= 3");
    }
    let k = banded(n, 6.0, 8.0, -2.0, -1.0, -1.0) / 6.0;
    let m = banded(n, 66.0, 40.0, 26.0, 25.0, 1.0) / 120.0;
    Ok((k, m))
}

/// `K_n (x) M_n + M_n (x) K_n`, of size `n^2`.
pub fn iga_2d_matrix(n: usize) -> Result<DMatrix<f64>> {
    let (k, m) = iga_stencils(n)?;
    Ok(k.kronecker(&m) + m.kronecker(&k))
}

/// Blocks `K^[l]`, `M^[l]`, `l = 0..eta`, of the reference B-splines:
/// `K^[l](i, j) = int beta_j'(t) beta_i'(t - l) dt` and likewise for `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBlocks {
    pub p: usize,
    pub k: usize,
    pub eta: usize,
    pub k_blocks: Vec<DMatrix<f64>>,
    pub m_blocks: Vec<DMatrix<f64>>,
}

/// Computes the reference blocks with `p + 1` Gauss–Legendre nodes per unit
/// knot span.
pub fn reference_blocks(p: usize, k: usize) -> Result<ReferenceBlocks> {
    reference_blocks_with_nodes(p, k, p + 1)
}

/// [`reference_blocks`] with an explicit node count per span.
pub fn reference_blocks_with_nodes(p: usize, k: usize, nodes: usize) -> Result<ReferenceBlocks> {
    let basis = BSplineBasis::reference(p, k)?;
    let r = p - k;
    let eta = eta(p, k);
    let rule = GaussLegendre::new(nodes);
    let mut k_blocks = Vec::with_capacity(eta);
    let mut m_blocks = Vec::with_capacity(eta);
    for l in 0..eta {
        let mut kb = DMatrix::zeros(r, r);
        let mut mb = DMatrix::zeros(r, r);
        // beta_i(t - l) lives on [l, l + eta]; beta_j on [0, eta]
        for s in l..eta {
            for (t, w) in rule.mapped(s as f64, s as f64 + 1.0) {
                for i in 0..r {
                    let (vi, di) = (eval_unchecked(&basis, i, t - l as f64), deriv_unchecked(&basis, i, t - l as f64));
                    for j in 0..r {
                        kb[(i, j)] += w * deriv_unchecked(&basis, j, t) * di;
                        mb[(i, j)] += w * eval_unchecked(&basis, j, t) * vi;
                    }
                }
            }
        }
        k_blocks.push(kb);
        m_blocks.push(mb);
    }
    Ok(ReferenceBlocks { p, k, eta, k_blocks, m_blocks })
}

fn block_symbol(blocks: &[DMatrix<f64>], theta: f64) -> DMatrix<Complex64> {
    let mut s = blocks[0].map(|v| Complex64::new(v, 0.0));
    for (l, b) in blocks.iter().enumerate().skip(1) {
        let e = Complex64::from_polar(1.0, l as f64 * theta);
        let bt = b.transpose();
        s += b.map(|v| e * v) + bt.map(|v| e.conj() * v);
    }
    s
}

impl ReferenceBlocks {
    pub fn size(&self) -> usize {
        self.p - self.k
    }

    /// `f_{p,k}(theta) = sum_l K^[l] e^{i l theta}` with `K^[-l] = K^[l]^T`.
    pub fn f(&self, theta: f64) -> DMatrix<Complex64> {
        block_symbol(&self.k_blocks, theta)
    }

    /// Mass counterpart `h_{p,k}` of [`ReferenceBlocks::f`].
    pub fn h(&self, theta: f64) -> DMatrix<Complex64> {
        block_symbol(&self.m_blocks, theta)
    }

    pub fn f_branches(&self, theta: f64) -> Vec<f64> {
        eig_hermitian_unchecked(&self.f(theta)).into_values()
    }

    pub fn h_branches(&self, theta: f64) -> Vec<f64> {
        eig_hermitian_unchecked(&self.h(theta)).into_values()
    }

    /// Eigenvalues of `h(theta)^{-1} f(theta)`, ascending.
    pub fn e_branches(&self, theta: f64) -> Result<Vec<f64>> {
        match eig_gen_hermitian_def(&self.f(theta), &self.h(theta)) {
            Ok(s) => Ok(s.into_values()),
            Err(Error::NotPositiveDefinite) => Err(Error::Internal(format!(
                "mass symbol is not positive definite at theta = {theta}"
            ))),
            Err(e) => Err(e),
        }
    }
}

pub fn symbol_f(p: usize, k: usize, theta: f64) -> Result<DMatrix<Complex64>> {
    Ok(reference_blocks(p, k)?.f(theta))
}

pub fn symbol_h(p: usize, k: usize, theta: f64) -> Result<DMatrix<Complex64>> {
    Ok(reference_blocks(p, k)?.h(theta))
}

pub fn symbol_e_branches(p: usize, k: usize, theta: f64) -> Result<Vec<f64>> {
    reference_blocks(p, k)?.e_branches(theta)
}

/// Stiffness and mass matrices of the Galerkin basis without its first and
/// last functions, both of size `n (p - k) + k - 1`. Exact element-wise
/// Gauss–Legendre assembly with `p + 1` nodes.
pub fn assemble_km(n: usize, p: usize, k: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if n < 2 {
        return invalid("assembly needs n >= 2");
    }
    let basis = BSplineBasis::galerkin(n, p, k)?;
    let full = basis.len();
    let dim = basis.dim();
    let rule = GaussLegendre::new(p + 1);
    let mut km = DMatrix::zeros(dim, dim);
    let mut mm = DMatrix::zeros(dim, dim);
    for e in 0..n {
        let (a, b) = (e as f64 / n as f64, (e + 1) as f64 / n as f64);
        let active: Vec<usize> = (1..full - 1)
            .filter(|&i| {
                let (lo, hi) = basis.support(i);
                lo < b && hi > a
            })
            .collect();
        for (x, w) in rule.mapped(a, b) {
            let vals: Vec<(f64, f64)> = active
                .iter()
                .map(|&i| (eval_unchecked(&basis, i, x), deriv_unchecked(&basis, i, x)))
                .collect();
            for (ai, &i) in active.iter().enumerate() {
                for (aj, &j) in active.iter().enumerate() {
                    km[(i - 1, j - 1)] += w * vals[ai].1 * vals[aj].1;
                    mm[(i - 1, j - 1)] += w * vals[ai].0 * vals[aj].0;
                }
            }
        }
    }
    Ok((km, mm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::{eig_gen_sym_def, eig_sym};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fd_constant_coefficient_is_laplacian() {
        let (d, o) = fd_matrix(|_| 1.0, 5);
        assert!(d.iter().all(|&v| v == 2.0));
        assert!(o.iter().all(|&v| v == -1.0));
        let dense = tridiag_dense(&d, &o);
        assert_eq!(dense, dense.transpose());
    }

    #[test]
    fn iga_spectrum_is_sampled_symbol() {
        let kappa = |t: f64| 1.0 - 2.0 / 3.0 * t.cos() - (2.0 * t).cos() / 3.0;
        let mu = |t: f64| 11.0 / 20.0 + 13.0 / 30.0 * t.cos() + (2.0 * t).cos() / 60.0;
        for n in [3, 4, 7, 12] {
            let s = eig_sym(&iga_2d_matrix(n).unwrap()).unwrap();
            let mut exact = Vec::new();
            for i1 in 1..=n {
                for i2 in 1..=n {
                    let (t1, t2) = (i1 as f64 * PI / n as f64, i2 as f64 * PI / n as f64);
                    exact.push(kappa(t1) * mu(t2) + mu(t1) * kappa(t2));
                }
            }
            exact.sort_by(f64::total_cmp);
            let err = s.values().iter().zip(&exact).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 1e-12, "n={n} err={err}");
        }
        assert!(iga_2d_matrix(2).is_err());
    }

    #[test]
    fn worksheet_symbols_p2_k0() {
        let blocks = reference_blocks(2, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t: f64 = rng.random_range(0.0..PI);
            let e = Complex64::from_polar(1.0, t);
            let f = blocks.f(t);
            let fe = [
                c(4.0 / 3.0, 0.0),
                c(-2.0 / 3.0, 0.0) - e * (2.0 / 3.0),
                c(-2.0 / 3.0, 0.0) - e.conj() * (2.0 / 3.0),
                c(8.0 / 3.0 - 4.0 / 3.0 * t.cos(), 0.0),
            ];
            let h = blocks.h(t);
            let he = [
                c(2.0 / 15.0, 0.0),
                c(0.1, 0.0) + e * 0.1,
                c(0.1, 0.0) + e.conj() * 0.1,
                c(0.4 + t.cos() / 15.0, 0.0),
            ];
            for (idx, (ef, eh)) in fe.iter().zip(&he).enumerate() {
                let (i, j) = (idx / 2, idx % 2);
                assert!((f[(i, j)] - ef).norm() < 1e-12);
                assert!((h[(i, j)] - eh).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_symbols() {
        let b = reference_blocks(1, 0).unwrap();
        let oracle = reference_blocks_with_nodes(1, 0, 4).unwrap();
        for t in [0.0, 0.4, 1.7, PI] {
            assert!((b.f(t)[(0, 0)].re - (2.0 - 2.0 * t.cos())).abs() < 1e-13);
            assert!((b.h(t)[(0, 0)].re - (4.0 + 2.0 * t.cos()) / 6.0).abs() < 1e-13);
            assert!((b.f(t) - oracle.f(t)).iter().all(|z| z.norm() < 1e-13));
            assert!((b.h(t) - oracle.h(t)).iter().all(|z| z.norm() < 1e-13));
        }
    }

    #[test]
    fn branches_at_pi() {
        let b = reference_blocks(2, 0).unwrap();
        let f = b.f(PI);
        assert!((f[(0, 1)]).norm() < 1e-12);
        let br = b.f_branches(PI);
        assert!((br[0] - 4.0 / 3.0).abs() < 1e-12 && (br[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_branches_match_characteristic_polynomial() {
        let b = reference_blocks(2, 0).unwrap();
        for t in [0.3, 1.1, 2.5, PI] {
            let (f, h) = (b.f(t), b.h(t));
            let qa = (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]).re;
            let qb = -(f[(0, 0)] * h[(1, 1)] + f[(1, 1)] * h[(0, 0)] - f[(0, 1)] * h[(1, 0)] - f[(1, 0)] * h[(0, 1)]).re;
            let qc = (f[(0, 0)] * f[(1, 1)] - f[(0, 1)] * f[(1, 0)]).re;
            let disc = (qb * qb - 4.0 * qa * qc).sqrt();
            let roots = [(-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa)];
            let e = b.e_branches(t).unwrap();
            assert!((e[0] - roots[0]).abs() < 1e-10 && (e[1] - roots[1]).abs() < 1e-10, "t={t}");
        }
        let e = b.e_branches(PI).unwrap();
        assert!((e[0] - 10.0).abs() < 1e-10 && (e[1] - 12.0).abs() < 1e-10);
    }

    #[test]
    fn linear_assembly() {
        let n = 6;
        let (k, m) = assemble_km(n, 1, 0).unwrap();
        let nf = n as f64;
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let (ke, me) = match i.abs_diff(j) {
                    0 => (2.0 * nf, 4.0 / (6.0 * nf)),
                    1 => (-nf, 1.0 / (6.0 * nf)),
                    _ => (0.0, 0.0),
                };
                assert!((k[(i, j)] - ke).abs() < 1e-12 && (m[(i, j)] - me).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_c0_stiffness_is_e5_matrix() {
        let n = 7;
        let (k, _) = assemble_km(n, 2, 0).unwrap();
        let a = k / n as f64;
        assert_eq!(a.nrows(), 2 * n - 1);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let expected = match (i % 2, i.abs_diff(j)) {
                    (0, 0) => 4.0,
                    (1, 0) => 8.0,
                    (_, 1) => -2.0,
                    (1, 2) => -2.0,
                    _ => 0.0,
                } / 3.0;
                assert!((a[(i, j)] - expected).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn assembled_interior_matches_reference_blocks() {
        for p in 1..=6 {
            for k in 0..p.min(2) {
                let blocks = reference_blocks(p, k).unwrap();
                let r = p - k;
                let eta = blocks.eta;
                let n = 2 * eta + 4;
                let (km, mm) = assemble_km(n, p, k).unwrap();
                let nf = n as f64;
                let row = |m: usize, i: usize| p + (m - 1) * r + i;
                for b in 1..n {
                    for l in 0..eta {
                        let a = b + l;
                        if a + eta > n - 1 {
                            continue;
                        }
                        for i in 0..r {
                            for j in 0..r {
                                let (gi, gj) = (row(a, i), row(b, j));
                                assert!((km[(gi, gj)] - nf * blocks.k_blocks[l][(i, j)]).abs() < 1e-10 * nf);
                                assert!((mm[(gi, gj)] - blocks.m_blocks[l][(i, j)] / nf).abs() < 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn assembled_matrices_are_spd() {
        for p in 1..=8 {
            for k in 0..p.min(2) {
                for n in [2, 5, 11] {
                    let (km, mm) = assemble_km(n, p, k).unwrap();
                    assert!((&km - km.transpose()).amax() < 1e-12 * km.amax());
                    assert!(nalgebra::Cholesky::new(km.clone()).is_some());
                    assert!(nalgebra::Cholesky::new(mm.clone()).is_some());
                    assert!(eig_gen_sym_def(&km, &mm).is_ok());
                }
            }
        }
    }
}
