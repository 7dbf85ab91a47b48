//! Monotone rearrangement: discrete quantile interpolants of sampled
//! multisets and a brute-force quantile oracle for symbols.

use crate::domain::{IntervalUnion, RealMultiset, ScalarSymbol};
use crate::error::{invalid, Result};
use crate::grid::make_uniform_grid;

/// Piecewise-linear interpolant through `(l / w, s_l)`, `l = 0..w`, of sorted
/// samples `s_0 <= ... <= s_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileInterpolant {
    sorted: Vec<f64>,
}

impl QuantileInterpolant {
    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Number of intervals `w`.
    pub fn intervals(&self) -> usize {
        self.sorted.len() - 1
    }

    /// Node abscissae `l / w`.
    pub fn nodes(&self) -> Vec<f64> {
        let w = self.intervals() as f64;
        (0..self.sorted.len()).map(|l| l as f64 / w).collect()
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        quantile_eval(self, y)
    }
}

/// Sorts the samples and builds their quantile interpolant.
pub fn empirical_quantile(samples: &RealMultiset) -> Result<QuantileInterpolant> {
    if samples.len() < 2 {
        return invalid("a quantile interpolant needs at least two samples");
    }
    Ok(QuantileInterpolant { sorted: samples.sorted() })
}

/// Value of the interpolant at `y` in `[0, 1]`.
pub fn quantile_eval(q: &QuantileInterpolant, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return invalid(format!("quantile argument {y} outside [0, 1]"));
    }
    let w = q.intervals();
    let s = &q.sorted;
    let pos = y * w as f64;
    let l = (pos.floor() as usize).min(w - 1);
    let frac = pos - l as f64;
    if frac == 0.0 {
        return Ok(s[l]);
    }
    if frac == 1.0 {
        return Ok(s[l + 1]);
    }
    Ok(s[l] + frac * (s[l + 1] - s[l]))
}

/// Samples the symbol on a uniform grid with about `density` points over its
/// rectangle (per-axis count `density^(1/d)`), keeping points of `Omega`.
fn dense_samples(f: &ScalarSymbol, density: usize) -> Result<Vec<f64>> {
    let d = f.domain().dim();
    let per_axis = ((density as f64).powf(1.0 / d as f64).round() as usize).max(1);
    let grid = make_uniform_grid(f.domain(), &vec![per_axis; d])?;
    let samples: Vec<f64> = grid
        .points()
        .iter()
        .filter(|x| f.contains(x))
        .map(|x| f.eval(x))
        .collect();
    if samples.is_empty() {
        return invalid("no sample point falls inside the symbol's domain");
    }
    Ok(samples)
}

/// Brute-force `f^dagger(y)`: the `ceil(y N)`-th order statistic of `N`
/// uniform samples of `f` over `Omega`.
pub fn quantile_oracle(f: &ScalarSymbol, density: usize, y: f64) -> Result<f64> {
    if density < 1000 {
        return invalid("quantile oracle needs density >= 1000");
    }
    if !(0.0..=1.0).contains(&y) {
        return invalid(format!("quantile argument {y} outside [0, 1]"));
    }
    let mut samples = dense_samples(f, density)?;
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let rank = ((y * n as f64).ceil() as usize).clamp(1, n);
    Ok(samples[rank - 1])
}

/// Default gap tolerance `10 (sup - inf) / density`.
pub fn default_gap_tol(f: &ScalarSymbol, density: usize) -> f64 {
    let span = f.declared_sup() - f.declared_inf();
    let tol = 10.0 * span / density as f64;
    if tol > 0.0 {
        tol
    } else {
        f64::EPSILON
    }
}

/// Numerical essential range: sorted dense samples are merged into intervals,
/// split wherever consecutive values differ by more than `gap_tol`.
/// Clusters holding fewer than `max(2, density / 1000)` samples are treated as
/// measure-zero and dropped.
pub fn essential_range(f: &ScalarSymbol, density: usize, gap_tol: f64) -> Result<IntervalUnion> {
    if density < 1000 {
        return invalid("essential range needs density >= 1000");
    }
    if !(gap_tol > 0.0) {
        return invalid("gap tolerance must be positive");
    }
    let mut samples = dense_samples(f, density)?;
    samples.sort_by(f64::total_cmp);
    let min_cluster = (density / 1000).max(2);
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=samples.len() {
        if i == samples.len() || samples[i] - samples[i - 1] > gap_tol {
            if i - start >= min_cluster {
                clusters.push((samples[start], samples[i - 1]));
            }
            start = i;
        }
    }
    IntervalUnion::new(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ms(v: &[f64]) -> RealMultiset {
        RealMultiset::new(v.to_vec()).unwrap()
    }

    #[test]
    fn three_samples() {
        let q = empirical_quantile(&ms(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(q.sorted_samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(q.eval(0.0).unwrap(), 1.0);
        assert_eq!(q.eval(0.5).unwrap(), 2.0);
        assert_eq!(q.eval(1.0).unwrap(), 3.0);
        assert_eq!(q.nodes(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn midpoint_of_first_segment() {
        let q = empirical_quantile(&ms(&[0.0, 1.0, 2.0])).unwrap();
        assert_eq!(q.eval(0.25).unwrap(), 0.5);
    }

    #[test]
    fn constant_is_fixed_point() {
        let q = empirical_quantile(&ms(&[1.75; 9])).unwrap();
        for i in 0..=100 {
            assert_eq!(q.eval(i as f64 / 100.0).unwrap(), 1.75);
        }
    }

    #[test]
    fn errors() {
        assert!(empirical_quantile(&ms(&[1.0])).is_err());
        let q = empirical_quantile(&ms(&[0.0, 1.0])).unwrap();
        assert!(q.eval(-0.1).is_err());
        assert!(q.eval(1.1).is_err());
    }

    #[test]
    fn increasing_symbol_is_its_own_rearrangement() {
        let n = 11;
        let samples: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let q = empirical_quantile(&ms(&samples)).unwrap();
        assert!((q.eval(0.5).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cosine_samples_approach_reversed_cosine() {
        let n = 100;
        let samples: Vec<f64> = (1..=n)
            .map(|i| (i as f64 * PI / (n + 1) as f64).cos())
            .collect();
        let q = empirical_quantile(&ms(&samples)).unwrap();
        let f = ScalarSymbol::univariate(0.0, PI, f64::cos, -1.0, 1.0).unwrap();
        for i in 0..=90 {
            let y = 0.05 + i as f64 * 0.01;
            let closed = -(PI * y).cos();
            assert!((q.eval(y).unwrap() - closed).abs() < 0.05);
            // dense-sampling oracle agrees with the closed form
            assert!((quantile_oracle(&f, 20_000, y).unwrap() - closed).abs() < 1e-3);
        }
    }

    #[test]
    fn oracle_examples() {
        let inc = ScalarSymbol::univariate(1.0, 3.0, |t| t * t, 1.0, 9.0).unwrap();
        for y in [0.1, 0.5, 0.9] {
            let v = quantile_oracle(&inc, 10_000, y).unwrap();
            let x = 1.0 + 2.0 * y;
            assert!((v - x * x).abs() < 1e-2);
        }
        let chi = ScalarSymbol::univariate(0.0, 1.0, |t| if t == 1.0 { 1.0 } else { 0.0 }, 0.0, 1.0)
            .unwrap();
        assert_eq!(quantile_oracle(&chi, 1000, 0.5).unwrap(), 0.0);
        let cos = ScalarSymbol::univariate(0.0, PI, f64::cos, -1.0, 1.0).unwrap();
        let v = quantile_oracle(&cos, 1_000_000, 0.25).unwrap();
        assert!((v + (PI / 4.0).cos()).abs() < 1e-3);
        assert!(quantile_oracle(&cos, 999, 0.25).is_err());
    }

    #[test]
    fn essential_range_examples() {
        let (a, b) = (1.5, -2.0);
        let f = ScalarSymbol::univariate(0.0, PI, move |t| a + b * t.cos(), a - 2.0, a + 2.0).unwrap();
        let er = essential_range(&f, 10_000, default_gap_tol(&f, 10_000)).unwrap();
        assert_eq!(er.intervals().len(), 1);
        let (lo, hi) = er.intervals()[0];
        assert!((lo - (a - 2.0)).abs() < 1e-3 && (hi - (a + 2.0)).abs() < 1e-3);

        let chi = ScalarSymbol::univariate(0.0, 1.0, |t| if t == 1.0 { 1.0 } else { 0.0 }, 0.0, 1.0)
            .unwrap();
        let er = essential_range(&chi, 10_000, default_gap_tol(&chi, 10_000)).unwrap();
        assert_eq!(er.intervals(), &[(0.0, 0.0)]);
    }

    #[test]
    fn essential_range_detects_gap() {
        let f = ScalarSymbol::univariate(0.0, 1.0, |t| if t < 0.5 { t } else { t + 1.0 }, 0.0, 2.0)
            .unwrap();
        let er = essential_range(&f, 10_000, default_gap_tol(&f, 10_000)).unwrap();
        assert_eq!(er.intervals().len(), 2);
        assert!(essential_range(&f, 10_000, 0.0).is_err());
    }
}
