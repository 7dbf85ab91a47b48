//! Symmetric / Hermitian eigenvalue computations.
//!
//! Dense problems go through `nalgebra`. The symmetric tridiagonal path is an
//! implicit QL iteration with Wilkinson shifts that never forms a dense
//! matrix, so it scales to tens of thousands of rows.

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub(crate) fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Multiplies every eigenvalue by `factor` (which must be non-negative to
    /// keep the order).
    pub fn scaled(mut self, factor: f64) -> Self {
        debug_assert!(factor >= 0.0);
        self.values.iter_mut().for_each(|v| *v *= factor);
        self
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

const HERMITIAN_TOL: f64 = 1e-10;

/// All eigenvalues of a real symmetric matrix.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<Spectrum> {
    if !a.is_square() {
        return invalid("eigenvalue problem needs a square matrix");
    }
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > HERMITIAN_TOL * scale {
                return invalid(format!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    if n == 0 {
        return Ok(Spectrum { values: Vec::new() });
    }
    Ok(Spectrum::from_unsorted(a.symmetric_eigenvalues().as_slice().to_vec()))
}

/// All eigenvalues of a complex Hermitian matrix.
pub fn eig_hermitian(a: &DMatrix<Complex64>) -> Result<Spectrum> {
    if !a.is_square() {
        return invalid("eigenvalue problem needs a square matrix");
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if crate::domain::hermitian_defect(a) > HERMITIAN_TOL * scale {
        return invalid("matrix is not Hermitian");
    }
    Ok(eig_hermitian_unchecked(a))
}

pub(crate) fn eig_hermitian_unchecked(a: &DMatrix<Complex64>) -> Spectrum {
    if a.nrows() == 0 {
        return Spectrum { values: Vec::new() };
    }
    if a.iter().all(|z| z.im == 0.0) {
        let re = a.map(|z| z.re);
        return Spectrum::from_unsorted(re.symmetric_eigenvalues().as_slice().to_vec());
    }
    Spectrum::from_unsorted(a.symmetric_eigenvalues().as_slice().to_vec())
}

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal
/// and off-diagonal (`offdiag.len() == diag.len() - 1`).
pub fn eig_sym_tridiag(diag: &[f64], offdiag: &[f64]) -> Result<Spectrum> {
    let n = diag.len();
    if n == 0 {
        if offdiag.is_empty() {
            return Ok(Spectrum { values: Vec::new() });
        }
        return invalid("off-diagonal given for an empty matrix");
    }
    if offdiag.len() + 1 != n {
        return invalid(format!(
            "tridiagonal matrix of size {n} needs {} off-diagonal entries, got {}",
            n - 1,
            offdiag.len()
        ));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    tql1(&mut d, &mut e)?;
    Ok(Spectrum::from_unsorted(d))
}

/// Implicit QL with Wilkinson shifts, eigenvalues only (EISPACK `tql1`).
/// On return `d` holds the eigenvalues.
fn tql1(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            // look for a small subdiagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Internal(format!(
                    "tridiagonal QL failed to converge at row {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of the symmetric-definite pencil `(K, M)`, i.e. of `M^{-1} K`,
/// through the Cholesky reduction `L^{-1} K L^{-T}`.
pub fn eig_gen_sym_def(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<Spectrum> {
    if k.shape() != m.shape() || !k.is_square() {
        return invalid("pencil matrices must be square and of equal size");
    }
    let chol = Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let reduced = reduce_pencil(k, &l)?;
    eig_sym(&reduced)
}

/// Eigenvalues of the Hermitian-definite pencil `(F, H)`.
pub fn eig_gen_hermitian_def(f: &DMatrix<Complex64>, h: &DMatrix<Complex64>) -> Result<Spectrum> {
    if f.shape() != h.shape() || !f.is_square() {
        return invalid("pencil matrices must be square and of equal size");
    }
    let chol = Cholesky::new(h.clone()).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    // X = L^{-1} F, then C = (L^{-1} X^H)^H = L^{-1} F L^{-H}
    let x = l
        .solve_lower_triangular(f)
        .ok_or(Error::NotPositiveDefinite)?;
    let y = l
        .solve_lower_triangular(&x.adjoint())
        .ok_or(Error::NotPositiveDefinite)?;
    let mut c = y.adjoint();
    symmetrize_hermitian(&mut c);
    Ok(eig_hermitian_unchecked(&c))
}

fn reduce_pencil(k: &DMatrix<f64>, l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let x = l
        .solve_lower_triangular(k)
        .ok_or(Error::NotPositiveDefinite)?;
    let y = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let mut c = y.transpose();
    let n = c.nrows();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }
    Ok(c)
}

fn symmetrize_hermitian(c: &mut DMatrix<Complex64>) {
    let n = c.nrows();
    for i in 0..n {
        c[(i, i)].im = 0.0;
        for j in 0..i {
            let avg = 0.5 * (c[(i, j)] + c[(j, i)].conj());
            c[(i, j)] = avg;
            c[(j, i)] = avg.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn diagonal_sorted() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        assert_eq!(eig_sym(&a).unwrap().values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn laplacian_closed_form() {
        let n = 8;
        let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let s = eig_sym(&a).unwrap();
        for (i, v) in s.values().iter().enumerate() {
            let exact = 2.0 - 2.0 * ((i + 1) as f64 * PI / 9.0).cos();
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonsymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(eig_sym(&a), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_symmetric(50, &mut rng);
        let eig = a.clone().symmetric_eigen();
        let s = eig_sym(&a).unwrap();
        let mut ours = eig.eigenvalues.as_slice().to_vec();
        ours.sort_by(f64::total_cmp);
        let norm = a.norm();
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            let r = (&a * v - v * *lambda).norm();
            assert!(r <= 1e-9 * norm);
        }
        for (x, y) in s.values().iter().zip(&ours) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiag_classic_formula() {
        let s = eig_sym_tridiag(&[2.0; 4], &[-1.0; 3]).unwrap();
        for (i, v) in s.values().iter().enumerate() {
            let exact = 2.0 - 2.0 * ((i + 1) as f64 * PI / 5.0).cos();
            assert!((v - exact).abs() < 1e-14);
        }
        assert!(eig_sym_tridiag(&[1.0, 2.0], &[1.0, 1.0]).is_err());
        assert_eq!(eig_sym_tridiag(&[5.0], &[]).unwrap().values(), &[5.0]);
    }

    #[test]
    fn tridiag_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 17, 64, 200] {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let e: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dense = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    d[i]
                } else if i.abs_diff(j) == 1 {
                    e[i.min(j)]
                } else {
                    0.0
                }
            });
            let a = eig_sym_tridiag(&d, &e).unwrap();
            let b = eig_sym(&dense).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-10, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn generalized_identity_and_scalar_pencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = random_symmetric(12, &mut rng);
        let id = DMatrix::identity(12, 12);
        let a = eig_gen_sym_def(&k, &id).unwrap();
        let b = eig_sym(&k).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-10);
        }
        let g = DMatrix::from_fn(12, 12, |_, _| rng.random_range(-1.0..1.0));
        let m = &g * g.transpose() + DMatrix::identity(12, 12);
        let s = eig_gen_sym_def(&(&m * 2.5), &m).unwrap();
        assert!(s.values().iter().all(|v| (v - 2.5).abs() < 1e-10));
    }

    #[test]
    fn generalized_rejects_indefinite() {
        let k = DMatrix::identity(2, 2);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert_eq!(eig_gen_sym_def(&k, &m), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn hermitian_two_by_two() {
        let z = Complex64::new;
        let a = DMatrix::from_row_slice(2, 2, &[z(2.0, 0.0), z(0.0, 1.0), z(0.0, -1.0), z(2.0, 0.0)]);
        let s = eig_hermitian(&a).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-14 && (s.values()[1] - 3.0).abs() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[z(2.0, 0.0), z(0.0, 1.0), z(0.0, 1.0), z(2.0, 0.0)]);
        assert!(eig_hermitian(&bad).is_err());
    }
}
