mod common;

use proptest::prelude::*;
use symmatch::grid::{flatten_index, grid_deviation, make_uniform_grid, unflatten_index};
use symmatch::domain::{RealMultiset, Rect};
use symmatch::eig::{eig_gen_sym_def, eig_sym, eig_sym_tridiag};
use symmatch::rearrange::empirical_quantile;
use nalgebra::DMatrix;

#[test]
fn sorted_pairing_is_optimal() {
    common::sorted_pairing_is_optimal().unwrap();
}

#[test]
fn min_perm_equals_sorted() {
    common::min_perm_equals_sorted().unwrap();
}

#[test]
fn sorting_keeps_grid_uniform() {
    common::sorting_keeps_grid_uniform().unwrap();
}

#[test]
fn quantile_identities() {
    common::quantile_identities().unwrap();
}

#[test]
fn refinement_invariants() {
    common::refinement_invariants().unwrap();
}

#[test]
fn displacement_paths_exist() {
    common::displacement_paths_exist().unwrap();
}

#[test]
fn grid_count_bound() {
    common::grid_count_bound().unwrap();
}

#[test]
fn weyl_stability() {
    common::weyl_stability().unwrap();
}

proptest! {
    #[test]
    fn flatten_roundtrip(dims in prop::collection::vec(1..=20usize, 1..=3), seed in any::<u64>()) {
        let total: usize = dims.iter().product();
        let flat = (seed % total as u64) as usize;
        let idx = unflatten_index(&dims, flat).unwrap();
        prop_assert_eq!(flatten_index(&dims, &idx).unwrap(), flat);
    }

    #[test]
    fn uniform_grid_has_zero_deviation(dims in prop::collection::vec(1..=12usize, 1..=3), lo in -3.0..3.0f64, width in 0.1..4.0f64) {
        let d = dims.len();
        let rect = Rect::new(vec![lo; d], vec![lo + width; d]).unwrap();
        prop_assert_eq!(grid_deviation(&make_uniform_grid(&rect, &dims).unwrap()), 0.0);
    }

    #[test]
    fn constant_quantile_is_constant(c in -100.0..100.0f64, n in 2..50usize, y in 0.0..=1.0f64) {
        let q = empirical_quantile(&RealMultiset::new(vec![c; n]).unwrap()).unwrap();
        prop_assert_eq!(q.eval(y).unwrap(), c);
    }

    #[test]
    fn spectra_are_ascending(n in 1..30usize, seed in prop::collection::vec(-1.0..1.0f64, 900)) {
        let m = DMatrix::from_fn(n, n, |i, j| seed[i.min(j) * 30 + i.max(j)]);
        let s = eig_sym(&m).unwrap();
        prop_assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(s.len(), n);
    }

    #[test]
    fn tridiagonal_matches_dense(d in prop::collection::vec(-2.0..2.0f64, 1..60), o in prop::collection::vec(-2.0..2.0f64, 60)) {
        let n = d.len();
        let off = &o[..n - 1];
        let dense = DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else if i.abs_diff(j) == 1 { off[i.min(j)] } else { 0.0 });
        let a = eig_sym_tridiag(&d, off).unwrap();
        let b = eig_sym(&dense).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn generalized_with_identity_is_standard(n in 1..20usize, seed in prop::collection::vec(-1.0..1.0f64, 400)) {
        let k = DMatrix::from_fn(n, n, |i, j| seed[i.min(j) * 20 + i.max(j)]);
        let a = eig_gen_sym_def(&k, &DMatrix::identity(n, n)).unwrap();
        let b = eig_sym(&k).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}
