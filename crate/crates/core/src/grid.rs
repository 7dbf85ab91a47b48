//! Asymptotically uniform grids in a rectangle and related counting utilities.
//!
//! Multi-indices are 1-based (`i = 1..n` componentwise) and enumerated in
//! lexicographic order with the last coordinate varying fastest.

use crate::domain::Rect;
use crate::error::{invalid, Result};

/// Lexicographically indexed point family in a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct AUGrid {
    rect: Rect,
    dims: Vec<usize>,
    points: Vec<Vec<f64>>,
}

impl AUGrid {
    /// Wraps an explicit point family. `points` must be listed in
    /// lexicographic multi-index order and have `prod(dims)` entries.
    pub fn from_points(rect: Rect, dims: Vec<usize>, points: Vec<Vec<f64>>) -> Result<Self> {
        check_dims(&rect, &dims)?;
        let count: usize = dims.iter().product();
        if points.len() != count {
            return invalid(format!(
                "grid with dims {dims:?} needs {count} points, got {}",
                points.len()
            ));
        }
        if points.iter().any(|p| p.len() != rect.dim()) {
            return invalid("grid point dimension does not match the rectangle");
        }
        Ok(AUGrid { rect, dims, points })
    }

    /// One-dimensional grid from a list of abscissae.
    pub fn from_1d(a: f64, b: f64, xs: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        AUGrid::from_points(
            Rect::interval(a, b)?,
            vec![n],
            xs.into_iter().map(|x| vec![x]).collect(),
        )
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point at a 1-based multi-index.
    pub fn point(&self, index: &[usize]) -> Result<&[f64]> {
        let flat = flatten_index(&self.dims, index)?;
        Ok(&self.points[flat])
    }

    /// First coordinates of a 1-D grid.
    pub fn abscissae(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0]).collect()
    }

    /// The same grid with its points sorted ascending (1-D only).
    pub fn sorted_1d(&self) -> Result<AUGrid> {
        if self.rect.dim() != 1 {
            return invalid("sorting a grid is only defined in one dimension");
        }
        let mut xs = self.abscissae();
        xs.sort_by(f64::total_cmp);
        AUGrid::from_1d(self.rect.lower()[0], self.rect.upper()[0], xs)
    }
}

fn check_dims(rect: &Rect, dims: &[usize]) -> Result<()> {
    if dims.len() != rect.dim() {
        return invalid(format!(
            "dims has length {} but the rectangle is {}-dimensional",
            dims.len(),
            rect.dim()
        ));
    }
    if dims.contains(&0) {
        return invalid("grid dims must be >= 1 componentwise");
    }
    Ok(())
}

/// Uniform point of the rectangle at a 1-based multi-index: `a + i (b - a) / n`.
fn uniform_point(rect: &Rect, dims: &[usize], index: &[usize]) -> Vec<f64> {
    rect.lower()
        .iter()
        .zip(rect.upper())
        .zip(dims.iter().zip(index))
        .map(|((&a, &b), (&n, &i))| {
            if i == n {
                // exact right endpoint
                b
            } else {
                a + i as f64 * (b - a) / n as f64
            }
        })
        .collect()
}

/// The uniform grid `{a + i (b - a) / n : i = 1..n}`.
pub fn make_uniform_grid(rect: &Rect, dims: &[usize]) -> Result<AUGrid> {
    check_dims(rect, dims)?;
    let points = MultiIndexIter::new(dims)
        .map(|idx| uniform_point(rect, dims, &idx))
        .collect();
    Ok(AUGrid { rect: rect.clone(), dims: dims.to_vec(), points })
}

/// Distance `m(G)` of a grid from the uniform grid: the largest infinity-norm
/// displacement over all multi-indices.
pub fn grid_deviation(grid: &AUGrid) -> f64 {
    MultiIndexIter::new(&grid.dims)
        .zip(&grid.points)
        .map(|(idx, p)| {
            uniform_point(&grid.rect, &grid.dims, &idx)
                .iter()
                .zip(p)
                .map(|(u, x)| (u - x).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Multi-indices of the grid points lying in `Omega`, in lexicographic order.
pub fn restrict_indices<P>(grid: &AUGrid, member: P) -> Vec<Vec<usize>>
where
    P: Fn(&[f64]) -> bool,
{
    MultiIndexIter::new(&grid.dims)
        .zip(&grid.points)
        .filter(|(_, p)| member(p))
        .map(|(idx, _)| idx)
        .collect()
}

/// Upper bound `floor((beta - alpha) / h) + 1` on the number of points of a
/// uniform grid of step `h` inside `[alpha, beta]`, whatever its offset.
pub fn count_grid_in_interval(_x0: f64, h: f64, alpha: f64, beta: f64) -> Result<usize> {
    if !(h > 0.0) {
        return invalid("grid step h must be positive");
    }
    if !(alpha <= beta) {
        return invalid("interval must satisfy alpha <= beta");
    }
    Ok(((beta - alpha) / h).floor() as usize + 1)
}

/// Row-major (lexicographic) flattening of a 1-based multi-index.
pub fn flatten_index(dims: &[usize], index: &[usize]) -> Result<usize> {
    if dims.len() != index.len() {
        return invalid("multi-index length does not match dims");
    }
    let mut flat = 0usize;
    for (&n, &i) in dims.iter().zip(index) {
        if i == 0 || i > n {
            return invalid(format!("index component {i} outside 1..={n}"));
        }
        flat = flat * n + (i - 1);
    }
    Ok(flat)
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(dims: &[usize], mut flat: usize) -> Result<Vec<usize>> {
    let total: usize = dims.iter().product();
    if flat >= total {
        return invalid(format!("flat index {flat} outside 0..{total}"));
    }
    let mut idx = vec![0; dims.len()];
    for (slot, &n) in idx.iter_mut().zip(dims).rev() {
        *slot = flat % n + 1;
        flat /= n;
    }
    Ok(idx)
}

/// Iterator over `1..=dims` in lexicographic order.
#[derive(Debug, Clone)]
pub struct MultiIndexIter {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndexIter {
    pub fn new(dims: &[usize]) -> Self {
        let next = if dims.is_empty() || dims.contains(&0) {
            None
        } else {
            Some(vec![1; dims.len()])
        };
        MultiIndexIter { dims: dims.to_vec(), next }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        while pos > 0 {
            pos -= 1;
            if succ[pos] < self.dims[pos] {
                succ[pos] += 1;
                self.next = Some(succ);
                break;
            }
            succ[pos] = 1;
        }
        Some(current)
    }
}
