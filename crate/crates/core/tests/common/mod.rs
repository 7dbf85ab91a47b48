//! Property suites shared by the `properties` and `acceptance` targets.
//! Each suite runs a deterministic proptest runner and reports the first
//! counterexample as an error string.

#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use symmatch::domain::{IntervalUnion, RealMultiset};
use symmatch::eig::eig_sym;
use symmatch::grid::{count_grid_in_interval, grid_deviation, AUGrid};
use symmatch::matching::{min_perm_match, sorted_match};
use symmatch::rearrange::empirical_quantile;
use symmatch::split::{bad_count, graph_path, refine_split_counted, DisplacementGraph, Partition};

pub const TRIALS: u32 = 1000;
pub const SMALL_TRIALS: u32 = 100;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn vec_pair(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_len).prop_flat_map(|n| (prop::collection::vec(-10.0..10.0f64, n), prop::collection::vec(-10.0..10.0f64, n)))
}

/// Sorted pairing never does worse than the identity pairing.
pub fn sorted_pairing_is_optimal() -> Result<(), String> {
    run(TRIALS, vec_pair(50), |(x, y)| {
        let sorted = sorted_match(&x, &y).unwrap().m_n;
        prop_assert!(sorted <= max_abs_diff(&x, &y) + 1e-15);
        // symmetric in its arguments
        prop_assert_eq!(sorted, sorted_match(&y, &x).unwrap().m_n);
        Ok(())
    })
}

/// Exhaustive permutation minimum equals the sorted pairing.
pub fn min_perm_equals_sorted() -> Result<(), String> {
    run(SMALL_TRIALS, vec_pair(8), |(x, y)| {
        let brute = min_perm_match(&x, &y).unwrap();
        let sorted = sorted_match(&x, &y).unwrap().m_n;
        prop_assert!((brute - sorted).abs() <= 1e-12, "brute {} sorted {}", brute, sorted);
        Ok(())
    })
}

/// Sorting a perturbed uniform grid never increases its deviation.
pub fn sorting_keeps_grid_uniform() -> Result<(), String> {
    let strategy = (1..=60usize).prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0..1.0f64, n), 0.0..0.5f64));
    run(TRIALS, strategy, |(n, noise, scale)| {
        let xs: Vec<f64> = (1..=n).zip(&noise).map(|(i, e)| i as f64 / n as f64 + scale * e).collect();
        let g = AUGrid::from_1d(0.0, 1.0, xs).unwrap();
        let sorted = g.sorted_1d().unwrap();
        prop_assert!(grid_deviation(&sorted) <= grid_deviation(&g) + 1e-15);
        Ok(())
    })
}

fn samples(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 2..=max_len)
}

/// Quantile interpolants are monotone, preserve the empirical distribution
/// at the nodes, and integrate like the samples.
pub fn quantile_identities() -> Result<(), String> {
    let strategy = (samples(200), prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1000), -6.0..6.0f64);
    run(TRIALS, strategy, |(s, pairs, u)| {
        let q = empirical_quantile(&RealMultiset::new(s.clone()).unwrap()).unwrap();
        for (a, b) in pairs {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(q.eval(lo).unwrap() <= q.eval(hi).unwrap());
        }
        let w = q.intervals() as f64;
        let node_frac = q.sorted_samples().iter().filter(|&&v| v <= u).count() as f64 / (w + 1.0);
        let sample_frac = s.iter().filter(|&&v| v <= u).count() as f64 / s.len() as f64;
        prop_assert!((node_frac - sample_frac).abs() <= 1.0 / w + 1e-15);

        let sorted = q.sorted_samples();
        let gap = sorted.windows(2).fold(0.0_f64, |m, p| m.max(p[1] - p[0]));
        let lip: [(fn(f64) -> f64, f64); 3] = [
            (|x| x, 1.0),
            (|x| x * x, 10.0),
            (|x| x.clamp(-1.0, 1.0), 1.0),
        ];
        for (f, lip) in lip {
            let mean = s.iter().map(|&v| f(v)).sum::<f64>() / s.len() as f64;
            let trap = sorted.windows(2).map(|p| 0.5 * (f(p[0]) + f(p[1]))).sum::<f64>() / w;
            prop_assert!((mean - trap).abs() <= 2.0 * lip * gap + 1e-12, "mean {} trap {}", mean, trap);
        }
        Ok(())
    })
}

fn refinement_instance() -> impl Strategy<Value = (usize, Vec<usize>, Vec<f64>, Vec<(usize, usize)>)> {
    (2..=4usize).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec(0..k, 200),
            prop::collection::vec(0.0..0.9f64, 200),
            prop::collection::vec((0..200usize, 0..200usize), 5),
        )
    })
}

/// Refinement keeps the elements and part sizes, stops within the bad-set
/// budget, and ends with every part inside its target range.
pub fn refinement_invariants() -> Result<(), String> {
    run(TRIALS, refinement_instance(), |(k, parts, offsets, swaps)| {
        let values: Vec<f64> = parts.iter().zip(&offsets).map(|(&j, &o)| j as f64 + o).collect();
        let targets: Vec<IntervalUnion> = (0..k).map(|j| IntervalUnion::single(j as f64, j as f64 + 0.9).unwrap()).collect();
        let reference = Partition::new(values, parts.clone(), k).unwrap();
        let mut init = parts.clone();
        for (a, b) in swaps {
            init.swap(a, b);
        }
        let init = reference.reassigned(init).unwrap();
        let budget = bad_count(&init, &targets);
        let out = refine_split_counted(&init, &targets, &reference).unwrap();
        prop_assert_eq!(out.partition.values(), reference.values());
        prop_assert_eq!(out.partition.cardinalities(), init.cardinalities());
        prop_assert!(out.iterations <= budget);
        for j in 0..k {
            prop_assert!(out.partition.part(j).iter().all(|&v| targets[j].contains(v)));
        }
        Ok(())
    })
}

/// Every edge of the displacement graph of two equal-size partitions closes
/// into a cycle.
pub fn displacement_paths_exist() -> Result<(), String> {
    let strategy = (prop::collection::vec(0..5usize, 30), Just(()).prop_perturb(|_, mut rng| {
        let mut perm: Vec<usize> = (0..30).collect();
        for i in (1..30).rev() {
            perm.swap(i, (rng.next_u32() as usize) % (i + 1));
        }
        perm
    }));
    run(TRIALS, strategy, |(a_parts, perm)| {
        let values: Vec<f64> = (0..30).map(|e| e as f64).collect();
        let b_parts: Vec<usize> = perm.iter().map(|&e| a_parts[e]).collect();
        let a = Partition::new(values, a_parts, 5).unwrap();
        let b = a.reassigned(b_parts).unwrap();
        let g = DisplacementGraph::new(&a, &b).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if !g.has_edge(i, j) {
                    continue;
                }
                let path = graph_path(&a, &b, i, j).map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(path.first(), Some(&j));
                prop_assert_eq!(path.last(), Some(&i));
                for w in path.windows(2) {
                    prop_assert!(g.has_edge(w[0], w[1]));
                }
            }
        }
        Ok(())
    })
}

/// Points of `{x0 + i h}` in `[alpha, beta]` never exceed the counting bound.
pub fn grid_count_bound() -> Result<(), String> {
    let strategy = (-5.0..5.0f64, 0.01..2.0f64, -5.0..5.0f64, 0.0..5.0f64);
    run(TRIALS, strategy, |(x0, h, alpha, len)| {
        let beta = alpha + len;
        let bound = count_grid_in_interval(x0, h, alpha, beta).unwrap();
        let lo = ((alpha - x0) / h).floor() as i64 - 2;
        let hi = ((beta - x0) / h).ceil() as i64 + 2;
        let actual = (lo..=hi).filter(|&i| { let x = x0 + i as f64 * h; alpha <= x && x <= beta }).count();
        prop_assert!(actual <= bound, "actual {} bound {}", actual, bound);
        Ok(())
    })
}

fn symmetric(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    (&m + m.transpose()) * 0.5
}

/// Eigenvalues move by at most the spectral norm of the perturbation.
pub fn weyl_stability() -> Result<(), String> {
    let strategy = (1..=40usize).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(-1.0..1.0f64, n * n), prop::collection::vec(-1.0..1.0f64, n * n), 0.0..1.0f64)
    });
    run(SMALL_TRIALS, strategy, |(n, a, e, scale)| {
        let a = symmetric(n, &a);
        let e = symmetric(n, &e) * scale;
        let la = eig_sym(&a).unwrap();
        let lae = eig_sym(&(&a + &e)).unwrap();
        let le = eig_sym(&e).unwrap();
        let norm = le.min().unwrap().abs().max(le.max().unwrap().abs());
        prop_assert!(max_abs_diff(la.values(), lae.values()) <= norm + 1e-9);
        Ok(())
    })
}

/// Every property suite with its name.
pub fn all_suites() -> Vec<(&'static str, fn() -> Result<(), String>)> {
    vec![
        ("sorted pairing minimizes the max difference", sorted_pairing_is_optimal),
        ("permutation minimum equals sorted matching", min_perm_equals_sorted),
        ("sorting a perturbed grid keeps its deviation", sorting_keeps_grid_uniform),
        ("quantile monotonicity, measure and integral identities", quantile_identities),
        ("refinement conservation, sizes, termination, cleanliness", refinement_invariants),
        ("displacement paths exist for all edges", displacement_paths_exist),
        ("grid counting bound", grid_count_bound),
        ("Weyl perturbation bound", weyl_stability),
    ]
}
