//! Fourier coefficients of generating functions and (block) Toeplitz matrices.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::domain::{MatrixSymbol, ScalarSymbol};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::quadrature::GaussLegendre;

/// Gauss–Legendre nodes per sub-panel used by default.
pub const DEFAULT_NODES: usize = 24;

/// Largest phase change of `e^{-ik theta}` allowed across one sub-panel.
const MAX_PHASE: f64 = 4.0;

fn panel_breakpoints(discontinuities: &[f64]) -> Vec<f64> {
    let mut bps = vec![-PI, 0.0, PI];
    bps.extend(discontinuities.iter().copied().filter(|t| t.abs() < PI));
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    bps
}

fn subpanels(k: i64) -> impl Fn(f64) -> usize {
    move |width: f64| ((width * (k.unsigned_abs() as f64 + 1.0)) / MAX_PHASE).ceil() as usize
}

/// `f_k = (1 / 2 pi) int_{-pi}^{pi} f(theta) e^{-ik theta} d theta` for a
/// symbol defined on `[-pi, pi]`.
///
/// Composite Gauss–Legendre with panels split at `0`, `+-pi` and at the
/// symbol's declared discontinuities; the number of sub-panels grows with `|k|`.
pub fn fourier_coeff(f: &ScalarSymbol, k: i64) -> Complex64 {
    fourier_coeff_with_nodes(f, k, DEFAULT_NODES)
}

/// [`fourier_coeff`] with an explicit node count per sub-panel.
pub fn fourier_coeff_with_nodes(f: &ScalarSymbol, k: i64, nodes: usize) -> Complex64 {
    let rule = GaussLegendre::new(nodes);
    coeff_with_rule(f, k, &rule, &panel_breakpoints(f.discontinuities()))
}

fn coeff_with_rule(f: &ScalarSymbol, k: i64, rule: &GaussLegendre, bps: &[f64]) -> Complex64 {
    let kf = k as f64;
    let acc: Complex64 = rule.integrate_composite(bps, subpanels(k), |t| {
        let v = f.eval1(t);
        Complex64::new(v * (kf * t).cos(), -v * (kf * t).sin())
    });
    acc / (2.0 * PI)
}

/// Scalar Fourier coefficients `f_{-order}, ..., f_{order}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    order: usize,
    coeffs: Vec<Complex64>,
}

impl FourierCoeffs {
    /// Coefficients up to `|k| <= order` by quadrature.
    pub fn compute(f: &ScalarSymbol, order: usize) -> Self {
        FourierCoeffs::compute_with(f, order, Execution::default())
    }

    pub fn compute_with(f: &ScalarSymbol, order: usize, exec: Execution) -> Self {
        let rule = GaussLegendre::new(DEFAULT_NODES);
        let bps = panel_breakpoints(f.discontinuities());
        let ks: Vec<i64> = (-(order as i64)..=order as i64).collect();
        let coeffs = exec.map(&ks, |&k| coeff_with_rule(f, k, &rule, &bps));
        FourierCoeffs { order, coeffs }
    }

    /// Coefficients listed from `-order` to `order`.
    pub fn from_vec(order: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * order + 1 {
            return invalid(format!(
                "order {order} needs {} coefficients, got {}",
                2 * order + 1,
                coeffs.len()
            ));
        }
        Ok(FourierCoeffs { order, coeffs })
    }

    /// Real even coefficients from `c_0, c_1, ..., c_order`.
    pub fn real_even(c: &[f64]) -> Result<Self> {
        if c.is_empty() {
            return invalid("at least c_0 is required");
        }
        let order = c.len() - 1;
        let coeffs = (-(order as i64)..=order as i64)
            .map(|k| Complex64::new(c[k.unsigned_abs() as usize], 0.0))
            .collect();
        Ok(FourierCoeffs { order, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `f_k`, zero beyond the stored order.
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.order as i64) as usize]
        }
    }

    /// Largest violation of `Im f_k = 0` and `f_{-k} = f_k`.
    pub fn real_even_defect(&self) -> f64 {
        (0..=self.order as i64)
            .map(|k| {
                let (a, b) = (self.get(k), self.get(-k));
                a.im.abs().max(b.im.abs()).max((a - b).norm())
            })
            .fold(0.0, f64::max)
    }
}

/// `T_n(f) = [f_{i-j}]_{i,j=1}^n`. Fails when the coefficients stop short of
/// `|k| = n - 1`.
pub fn toeplitz_build(c: &FourierCoeffs, n: usize) -> Result<DMatrix<Complex64>> {
    if n > 0 && c.order() < n - 1 {
        return invalid(format!(
            "T_{n} needs coefficients up to order {}, have {}",
            n - 1,
            c.order()
        ));
    }
    Ok(toeplitz_build_truncated(c, n).0)
}

/// Like [`toeplitz_build`], treating missing coefficients as zero. The flag
/// reports whether truncation happened.
pub fn toeplitz_build_truncated(c: &FourierCoeffs, n: usize) -> (DMatrix<Complex64>, bool) {
    let truncated = n > 0 && c.order() < n - 1;
    let m = DMatrix::from_fn(n, n, |i, j| c.get(i as i64 - j as i64));
    (m, truncated)
}

/// Real symmetric `T_n(f)` for a real even symbol. Fails if the coefficients
/// carry imaginary parts above `1e-12`.
pub fn toeplitz_build_real(c: &FourierCoeffs, n: usize) -> Result<DMatrix<f64>> {
    let m = toeplitz_build(c, n)?;
    if m.iter().any(|z| z.im.abs() > 1e-12) {
        return invalid("symbol has non-real Fourier coefficients");
    }
    Ok(m.map(|z| z.re))
}

/// Block Fourier coefficients `F_k` (each `s x s`) for `|k| <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFourierCoeffs {
    order: usize,
    size: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

impl BlockFourierCoeffs {
    /// Entrywise quadrature of a matrix-valued symbol. The symbol's evaluator
    /// must be valid on all of `[-pi, pi]`.
    pub fn compute(ms: &MatrixSymbol, order: usize) -> Self {
        let s = ms.size();
        let rule = GaussLegendre::new(DEFAULT_NODES);
        let bps = panel_breakpoints(&[]);
        let ks: Vec<i64> = (-(order as i64)..=order as i64).collect();
        let blocks = Execution::default().map(&ks, |&k| {
            let kf = k as f64;
            let mut acc = DMatrix::<Complex64>::zeros(s, s);
            for pair in bps.windows(2) {
                let pieces = subpanels(k)(pair[1] - pair[0]).max(1);
                let step = (pair[1] - pair[0]) / pieces as f64;
                for p in 0..pieces {
                    let a = pair[0] + p as f64 * step;
                    for (t, w) in rule.mapped(a, a + step) {
                        let phase = Complex64::new((kf * t).cos(), -(kf * t).sin());
                        acc += ms.eval(t) * (phase * w);
                    }
                }
            }
            acc / Complex64::new(2.0 * PI, 0.0)
        });
        BlockFourierCoeffs { order, size: s, blocks }
    }

    /// From explicit blocks `F_0, F_1, ..., F_order` of a Hermitian-valued
    /// symbol; negative orders are filled in as `F_{-k} = F_k^*`.
    pub fn from_nonnegative(blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return invalid("at least F_0 is required");
        };
        let size = first.nrows();
        if blocks.iter().any(|b| b.nrows() != size || b.ncols() != size) {
            return invalid("all blocks must be square of equal size");
        }
        let order = blocks.len() - 1;
        let mut all = Vec::with_capacity(2 * order + 1);
        for k in (1..=order).rev() {
            all.push(blocks[k].adjoint());
        }
        all.extend(blocks);
        Ok(BlockFourierCoeffs { order, size, blocks: all })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn block_size(&self) -> usize {
        self.size
    }

    pub fn get(&self, k: i64) -> DMatrix<Complex64> {
        if k.unsigned_abs() as usize > self.order {
            DMatrix::zeros(self.size, self.size)
        } else {
            self.blocks[(k + self.order as i64) as usize].clone()
        }
    }

    /// Largest violation of `F_{-k} = F_k^*`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..=self.order as i64)
            .map(|k| {
                (self.get(-k) - self.get(k).adjoint())
                    .iter()
                    .fold(0.0_f64, |m, z| m.max(z.norm()))
            })
            .fold(0.0_f64, f64::max)
    }
}

/// Block Toeplitz matrix of size `n s`: block `(i, j)` is `F_{i-j}`.
/// Coefficients beyond the stored order are zero.
pub fn block_toeplitz_build(c: &BlockFourierCoeffs, n: usize) -> DMatrix<Complex64> {
    let s = c.block_size();
    let mut m = DMatrix::zeros(n * s, n * s);
    for bi in 0..n {
        for bj in 0..n {
            let k = bi as i64 - bj as i64;
            if k.unsigned_abs() as usize > c.order() {
                continue;
            }
            let block = c.get(k);
            m.view_mut((bi * s, bj * s), (s, s)).copy_from(&block);
        }
    }
    m
}
