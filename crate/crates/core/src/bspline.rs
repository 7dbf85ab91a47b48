//! B-spline bases: the Galerkin basis on `[0, 1]` with open knot vector and
//! the reference basis on `[0, eta]`.
//!
//! Basis functions are indexed from 0. Each one is evaluated from its own
//! `p + 2` local knots with the Cox–de Boor recursion.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Open knot vector on `[0, 1]` with `n` elements.
    Galerkin { n: usize },
    /// Knots `0, 1, ..., eta`, each repeated `p - k` times.
    Reference { eta: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BSplineBasis {
    p: usize,
    k: usize,
    kind: BasisKind,
    knots: Vec<f64>,
}

fn check_degree(p: usize, k: usize) -> Result<()> {
    if p == 0 {
        return invalid("degree must be at least 1");
    }
    if k >= p {
        return invalid(format!("smoothness {k} must be below the degree {p}"));
    }
    Ok(())
}

/// `ceil((p + 1) / (p - k))`.
pub fn eta(p: usize, k: usize) -> usize {
    (p + 1).div_ceil(p - k)
}

impl BSplineBasis {
    /// Degree-`p`, `C^k` splines on the uniform partition of `[0, 1]` into
    /// `n` elements; interior knots have multiplicity `p - k`.
    pub fn galerkin(n: usize, p: usize, k: usize) -> Result<Self> {
        check_degree(p, k)?;
        if n == 0 {
            return invalid("at least one element is required");
        }
        let mut knots = vec![0.0; p + 1];
        for i in 1..n {
            knots.extend(std::iter::repeat_n(i as f64 / n as f64, p - k));
        }
        knots.extend(std::iter::repeat_n(1.0, p + 1));
        Ok(Self { p, k, kind: BasisKind::Galerkin { n }, knots })
    }

    /// Reference basis; its first `p - k` functions are the reference
    /// B-splines.
    pub fn reference(p: usize, k: usize) -> Result<Self> {
        check_degree(p, k)?;
        let eta = eta(p, k);
        let knots = (0..=eta)
            .flat_map(|v| std::iter::repeat_n(v as f64, p - k))
            .collect();
        Ok(Self { p, k, kind: BasisKind::Reference { eta }, knots })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn smoothness(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions, boundary ones included.
    pub fn len(&self) -> usize {
        self.knots.len() - self.p - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension once the first and last functions are dropped:
    /// `n (p - k) + k - 1` for a Galerkin basis.
    pub fn dim(&self) -> usize {
        self.len().saturating_sub(2)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().expect("non-empty knots"))
    }

    /// Support `[t_i, t_{i+p+1}]` of function `i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        (self.knots[i], self.knots[i + self.p + 1])
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return invalid(format!("basis index {i} out of range 0..{}", self.len()));
        }
        Ok(())
    }

    fn local(&self, i: usize) -> &[f64] {
        &self.knots[i..i + self.p + 2]
    }
}

/// Degree-`u.len() - 2` B-spline with knots `u` at `x`. Spans are half-open
/// except the one ending at `end`, which also contains its right endpoint.
fn cox_de_boor(u: &[f64], x: f64, end: f64) -> f64 {
    let q = u.len() - 2;
    let mut n: Vec<f64> = (0..=q)
        .map(|r| {
            let (a, b) = (u[r], u[r + 1]);
            let inside = a <= x && x < b;
            let at_end = x == end && b == end && a < b;
            if inside || at_end {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    for d in 1..=q {
        for r in 0..=(q - d) {
            let l = if u[r + d] > u[r] { (x - u[r]) / (u[r + d] - u[r]) * n[r] } else { 0.0 };
            let rt = if u[r + d + 1] > u[r + 1] {
                (u[r + d + 1] - x) / (u[r + d + 1] - u[r + 1]) * n[r + 1]
            } else {
                0.0
            };
            n[r] = l + rt;
        }
    }
    n[0]
}

/// Value of basis function `i` at `x`.
pub fn bspline_eval(basis: &BSplineBasis, i: usize, x: f64) -> Result<f64> {
    basis.check(i)?;
    Ok(eval_unchecked(basis, i, x))
}

/// Derivative of basis function `i` at `x`.
pub fn bspline_deriv(basis: &BSplineBasis, i: usize, x: f64) -> Result<f64> {
    basis.check(i)?;
    Ok(deriv_unchecked(basis, i, x))
}

pub(crate) fn eval_unchecked(basis: &BSplineBasis, i: usize, x: f64) -> f64 {
    cox_de_boor(basis.local(i), x, basis.domain().1)
}

pub(crate) fn deriv_unchecked(basis: &BSplineBasis, i: usize, x: f64) -> f64 {
    let u = basis.local(i);
    let p = basis.p as f64;
    let end = basis.domain().1;
    let q = u.len() - 1;
    let left = if u[q - 1] > u[0] { p / (u[q - 1] - u[0]) * cox_de_boor(&u[..q], x, end) } else { 0.0 };
    let right = if u[q] > u[1] { p / (u[q] - u[1]) * cox_de_boor(&u[1..], x, end) } else { 0.0 };
    left - right
}
