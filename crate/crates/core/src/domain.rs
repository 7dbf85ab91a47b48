//! Domain types shared by every module: rectangles, interval unions,
//! multisets and scalar / matrix-valued symbols.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Closed `d`-dimensional rectangle `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Rect {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return invalid(format!(
                "rectangle corners must have equal positive dimension, got {} and {}",
                a.len(),
                b.len()
            ));
        }
        if a.iter().zip(&b).any(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
            return invalid("rectangle requires finite a <= b componentwise");
        }
        Ok(Rect { a, b })
    }

    /// One-dimensional interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Rect::new(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.a
    }

    pub fn upper(&self) -> &[f64] {
        &self.b
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.a.iter().zip(&self.b))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn volume(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(lo, hi)| hi - lo).product()
    }
}

/// Finite union of disjoint closed intervals, kept sorted.
///
/// Represents essential ranges and their expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Builds a union from arbitrary closed intervals, merging any that
    /// overlap or touch.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.iter().any(|&(lo, hi)| !(lo <= hi)) {
            return invalid("interval endpoints must satisfy lo <= hi");
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(IntervalUnion { intervals: merged })
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self> {
        IntervalUnion::new(vec![(lo, hi)])
    }

    pub fn empty() -> Self {
        IntervalUnion { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        // intervals are sorted, so binary search on the lower endpoints
        let idx = self.intervals.partition_point(|&(lo, _)| lo <= x);
        idx > 0 && x <= self.intervals[idx - 1].1
    }

    /// Closed `eps`-expansion `{x : dist(x, S) <= eps}`.
    pub fn expand(&self, eps: f64) -> IntervalUnion {
        let eps = eps.max(0.0);
        IntervalUnion::new(
            self.intervals
                .iter()
                .map(|&(lo, hi)| (lo - eps, hi + eps))
                .collect(),
        )
        .expect("expansion keeps lo <= hi")
    }

    /// Distance from `x` to the union (0 inside).
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(lo, hi)| format!("[{lo}, {hi}]"))
            .collect();
        write!(f, "{}", parts.join(" U "))
    }
}

/// Finite multiset of reals, stored in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMultiset {
    values: Vec<f64>,
}

impl RealMultiset {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("multiset must contain at least one value");
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("multiset value at index {pos} is not finite"));
        }
        Ok(RealMultiset { values })
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

    /// Stable ascending permutation: `argsort()[r]` is the index of the
    /// `r`-th smallest value.
    pub fn argsort(&self) -> Vec<usize> {
        argsort(&self.values)
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Stable argsort in ascending order.
pub fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    idx
}

type PointFn<T> = Arc<dyn Fn(&[f64]) -> T + Send + Sync>;

/// Real-valued function on a subdomain `Omega` of a rectangle.
#[derive(Clone)]
pub struct ScalarSymbol {
    domain: Rect,
    membership: Option<PointFn<bool>>,
    eval: PointFn<f64>,
    declared_inf: f64,
    declared_sup: f64,
    discontinuities: Vec<f64>,
}

impl fmt::Debug for ScalarSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarSymbol")
            .field("domain", &self.domain)
            .field("restricted", &self.membership.is_some())
            .field("declared_inf", &self.declared_inf)
            .field("declared_sup", &self.declared_sup)
            .field("discontinuities", &self.discontinuities)
            .finish()
    }
}

impl ScalarSymbol {
    pub fn new<F>(domain: Rect, eval: F, declared_inf: f64, declared_sup: f64) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(declared_inf <= declared_sup) {
            return invalid("declared_inf must not exceed declared_sup");
        }
        Ok(ScalarSymbol {
            domain,
            membership: None,
            eval: Arc::new(eval),
            declared_inf,
            declared_sup,
            discontinuities: Vec::new(),
        })
    }

    /// Univariate symbol on `[a, b]`.
    pub fn univariate<F>(a: f64, b: f64, f: F, declared_inf: f64, declared_sup: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarSymbol::new(Rect::interval(a, b)?, move |x| f(x[0]), declared_inf, declared_sup)
    }

    /// Restricts the symbol to `Omega = {x in rect : member(x)}`.
    pub fn with_membership<P>(mut self, member: P) -> Self
    where
        P: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.membership = Some(Arc::new(member));
        self
    }

    /// Declares breakpoints (1-D points, or hyperplane coordinates along the
    /// first axis) where the symbol may jump or have a kink.
    pub fn with_discontinuities(mut self, points: Vec<f64>) -> Self {
        self.discontinuities = points;
        self
    }

    pub fn domain(&self) -> &Rect {
        &self.domain
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn eval1(&self, t: f64) -> f64 {
        (self.eval)(&[t])
    }

    /// Membership in `Omega`.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.domain.contains(x) && self.membership.as_ref().is_none_or(|m| m(x))
    }

    pub fn membership_fn(&self) -> impl Fn(&[f64]) -> bool + '_ {
        move |x| self.contains(x)
    }

    pub fn declared_inf(&self) -> f64 {
        self.declared_inf
    }

    pub fn declared_sup(&self) -> f64 {
        self.declared_sup
    }

    pub fn discontinuities(&self) -> &[f64] {
        &self.discontinuities
    }

    /// Checks finiteness and the declared bounds at the given points of
    /// `Omega`; points outside `Omega` are ignored.
    pub fn spot_check(&self, points: &[Vec<f64>]) -> Result<()> {
        let slack = 1e-12 * (1.0 + self.declared_inf.abs().max(self.declared_sup.abs()));
        for x in points.iter().filter(|x| self.contains(x)) {
            let v = self.eval(x);
            if !v.is_finite() {
                return invalid(format!("symbol is not finite at {x:?}"));
            }
            if v < self.declared_inf - slack || v > self.declared_sup + slack {
                return invalid(format!(
                    "symbol value {v} at {x:?} outside declared range [{}, {}]",
                    self.declared_inf, self.declared_sup
                ));
            }
        }
        Ok(())
    }
}

type MatrixFn = Arc<dyn Fn(f64) -> DMatrix<Complex64> + Send + Sync>;

/// Hermitian-matrix-valued function on an interval.
#[derive(Clone)]
pub struct MatrixSymbol {
    a: f64,
    b: f64,
    size: usize,
    eval: MatrixFn,
}

impl fmt::Debug for MatrixSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixSymbol")
            .field("interval", &(self.a, self.b))
            .field("size", &self.size)
            .finish()
    }
}

impl MatrixSymbol {
    pub fn new<F>(a: f64, b: f64, size: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> DMatrix<Complex64> + Send + Sync + 'static,
    {
        if !(a < b) {
            return invalid("matrix symbol interval must satisfy a < b");
        }
        if size == 0 {
            return invalid("matrix symbol size must be positive");
        }
        Ok(MatrixSymbol { a, b, size, eval: Arc::new(eval) })
    }

    /// `diag(f_1, ..., f_k)` from scalar functions.
    pub fn diagonal(a: f64, b: f64, fs: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>) -> Result<Self> {
        let k = fs.len();
        MatrixSymbol::new(a, b, k, move |t| {
            DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    Complex64::new(fs[i](t), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Number of eigenvalue branches `k`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn eval(&self, t: f64) -> DMatrix<Complex64> {
        (self.eval)(t)
    }

    /// Largest entrywise deviation from Hermitian symmetry at `t`.
    pub fn hermitian_defect(&self, t: f64) -> f64 {
        let m = self.eval(t);
        hermitian_defect(&m)
    }

    /// Ascending eigenvalues `lambda_1(f(t)) <= ... <= lambda_k(f(t))`.
    pub fn branches(&self, t: f64) -> Vec<f64> {
        crate::eig::eig_hermitian_unchecked(&self.eval(t)).into_values()
    }

    /// The `j`-th branch (0-based) as a scalar function.
    pub fn branch(&self, j: usize, t: f64) -> f64 {
        self.branches(t)[j]
    }
}

pub(crate) fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
