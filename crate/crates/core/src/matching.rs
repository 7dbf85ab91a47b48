//! Sorted matching of symbol samples against eigenvalues (the `M_n`
//! diagnostic) and construction of exact-preimage grids.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;

use crate::domain::{argsort, RealMultiset, ScalarSymbol};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::grid::{restrict_indices, AUGrid, make_uniform_grid};
use crate::domain::Rect;

/// Largest length accepted by [`min_perm_match`].
pub const MAX_PERM_LEN: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub m_n: f64,
    /// `samples[sigma[i]]` is ascending in `i`.
    pub sigma: Vec<usize>,
    /// `lambdas[tau[i]]` is ascending in `i`.
    pub tau: Vec<usize>,
    /// `samples[sigma[i]] - lambdas[tau[i]]`.
    pub paired_diffs: Vec<f64>,
}

/// Sorts both vectors and pairs them positionally.
pub fn sorted_match(samples: &[f64], lambdas: &[f64]) -> Result<MatchResult> {
    if samples.len() != lambdas.len() {
        return invalid(format!(
            "length mismatch: {} samples, {} eigenvalues",
            samples.len(),
            lambdas.len()
        ));
    }
    if samples.is_empty() {
        return invalid("cannot match empty vectors");
    }
    let sigma = argsort(samples);
    let tau = argsort(lambdas);
    let paired_diffs: Vec<f64> = sigma
        .iter()
        .zip(&tau)
        .map(|(&s, &t)| samples[s] - lambdas[t])
        .collect();
    let m_n = paired_diffs.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    Ok(MatchResult { m_n, sigma, tau, paired_diffs })
}

/// Exhaustive minimum over all permutations `tau` of `max_i |s_i - l_tau(i)|`.
pub fn min_perm_match(samples: &[f64], lambdas: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n != lambdas.len() {
        return invalid("length mismatch");
    }
    if n > MAX_PERM_LEN {
        return Err(Error::UnsupportedSize { size: n, max: MAX_PERM_LEN });
    }
    if n == 0 {
        return invalid("cannot match empty vectors");
    }
    let best = (0..n)
        .permutations(n)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .fold(0.0_f64, |m, (i, &j)| m.max((samples[i] - lambdas[j]).abs()))
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Symbol samples at the points of `grid` lying in `Omega`.
pub fn grid_samples(symbol: &ScalarSymbol, grid: &AUGrid) -> Vec<f64> {
    let member = symbol.membership_fn();
    let points = grid.points();
    let dims = grid.dims();
    restrict_indices(grid, member)
        .iter()
        .map(|idx| {
            let flat = crate::grid::flatten_index(dims, idx).expect("index from the same grid");
            symbol.eval(&points[flat])
        })
        .collect()
}

/// One row of an `M_n` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MnRow {
    pub n: usize,
    pub m_n: f64,
}

/// `M_n` for each `n` in `ns`, sampling the symbol on `grid_for(n)`.
pub fn mn_curve<G>(
    symbol: &ScalarSymbol,
    grid_for: G,
    lambdas_by_n: &BTreeMap<usize, RealMultiset>,
    ns: &[usize],
    exec: Execution,
) -> Result<Vec<MnRow>>
where
    G: Fn(usize) -> Result<AUGrid> + Sync,
{
    let rows = exec.map(ns, |&n| -> Result<MnRow> {
        let lambdas = lambdas_by_n
            .get(&n)
            .ok_or_else(|| Error::InvalidArgument(format!("no eigenvalues supplied for n = {n}")))?;
        let samples = grid_samples(symbol, &grid_for(n)?);
        if samples.len() != lambdas.len() {
            return invalid(format!(
                "n = {n}: {} grid points in the domain but {} eigenvalues",
                samples.len(),
                lambdas.len()
            ));
        }
        let m = sorted_match(&samples, lambdas.values())?;
        Ok(MnRow { n, m_n: m.m_n })
    });
    rows.into_iter().collect()
}

/// Two-level variant of [`mn_curve`]: for each `n` the symbol is sampled on
/// the tensor grid `dims_for(n)` with points `a + i (b - a) / dims` over the
/// symbol's rectangle.
pub fn mn_curve_2d<D>(
    symbol: &ScalarSymbol,
    dims_for: D,
    lambdas_by_n: &BTreeMap<usize, RealMultiset>,
    ns: &[usize],
    exec: Execution,
) -> Result<Vec<MnRow>>
where
    D: Fn(usize) -> Vec<usize> + Sync,
{
    let rect: Rect = symbol.domain().clone();
    mn_curve(symbol, |n| make_uniform_grid(&rect, &dims_for(n)), lambdas_by_n, ns, exec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Restriction of a univariate symbol to an interval where it is strictly
/// monotone.
#[derive(Clone)]
pub struct MonotonePiece {
    lo: f64,
    hi: f64,
    direction: Direction,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for MonotonePiece {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MonotonePiece")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("direction", &self.direction)
            .finish()
    }
}

impl MonotonePiece {
    pub fn new<F>(lo: f64, hi: f64, direction: Direction, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo < hi) {
            return invalid(format!("empty piece [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi, direction, eval: Arc::new(eval) })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// `(min, max)` of the piece's endpoint values.
    pub fn image(&self) -> (f64, f64) {
        let (u, v) = (self.eval(self.lo), self.eval(self.hi));
        (u.min(v), u.max(v))
    }

    /// Bisection root of `f(x) = y`, or `None` if `y` is outside the image
    /// inflated by `slack`.
    pub fn preimage(&self, y: f64, slack: f64) -> Option<f64> {
        let (lo_v, hi_v) = self.image();
        if y < lo_v - slack || y > hi_v + slack {
            return None;
        }
        let sign = match self.direction {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        };
        let (mut a, mut b) = (self.lo, self.hi);
        while b - a > PREIMAGE_TOL {
            let m = 0.5 * (a + b);
            if sign * (self.eval(m) - y) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }
}

/// Bisection tolerance in `x`.
pub const PREIMAGE_TOL: f64 = 1e-12;
const BRACKET_SLACK: f64 = 1e-9;
// distances to the reference point closer than this count as a tie
const TIE_TOL: f64 = 1e-10;

/// Builds a grid of exact preimages of the eigenvalues.
///
/// Eigenvalues are paired with the reference samples `f(theta_i)` by sorted
/// matching; each paired eigenvalue is inverted on every piece and the root
/// closest to `theta_i` is kept (smaller root on ties). The result is sorted.
pub fn preimage_grid(
    pieces: &[MonotonePiece],
    lambdas: &RealMultiset,
    ref_grid: &AUGrid,
) -> Result<AUGrid> {
    if ref_grid.rect().dim() != 1 {
        return invalid("preimage grids are one-dimensional");
    }
    if pieces.is_empty() {
        return invalid("no monotone pieces supplied");
    }
    let thetas = ref_grid.abscissae();
    if thetas.len() != lambdas.len() {
        return invalid("reference grid and eigenvalue counts differ");
    }
    let sym_at = |x: f64| -> f64 {
        let piece = pieces
            .iter()
            .find(|p| p.lo <= x && x <= p.hi)
            .unwrap_or_else(|| {
                pieces
                    .iter()
                    .min_by(|p, q| dist_to(p, x).total_cmp(&dist_to(q, x)))
                    .expect("non-empty")
            });
        piece.eval(x.clamp(piece.lo, piece.hi))
    };
    let samples: Vec<f64> = thetas.iter().map(|&t| sym_at(t)).collect();
    let m = sorted_match(&samples, lambdas.values())?;
    let mut xs = vec![0.0; thetas.len()];
    for (&s, &t) in m.sigma.iter().zip(&m.tau) {
        let mu = lambdas.values()[t];
        let theta = thetas[s];
        let mut best: Option<f64> = None;
        for piece in pieces {
            if let Some(x) = piece.preimage(mu, BRACKET_SLACK) {
                best = match best {
                    None => Some(x),
                    Some(b) => {
                        let (db, dx) = ((b - theta).abs(), (x - theta).abs());
                        if dx < db - TIE_TOL || ((dx - db).abs() <= TIE_TOL && x < b) {
                            Some(x)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
        }
        xs[s] = best.ok_or(Error::NoPreimage { index: s + 1, value: mu })?;
    }
    xs.sort_by(f64::total_cmp);
    let (a, b) = (ref_grid.rect().lower()[0], ref_grid.rect().upper()[0]);
    AUGrid::from_1d(a, b, xs)
}

fn dist_to(p: &MonotonePiece, x: f64) -> f64 {
    if x < p.lo {
        p.lo - x
    } else if x > p.hi {
        x - p.hi
    } else {
        0.0
    }
}
