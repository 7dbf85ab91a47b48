//! Splitting the eigenvalues of a matrix-valued symbol's matrices into one
//! sub-multiset per eigenvalue branch.
//!
//! Partitions are over element identities: every partition of the same input
//! shares its value vector and differs only in the part assigned to each
//! element. Part indices are 0-based.

use std::collections::VecDeque;

use nalgebra::{DMatrix, Scalar};

use crate::domain::{argsort, IntervalUnion, MatrixSymbol, RealMultiset, ScalarSymbol};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::matching::{sorted_match, MatchResult};
use crate::rearrange::{default_gap_tol, essential_range};

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    values: Vec<f64>,
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// `assignment[e]` is the part of element `e`.
    pub fn new(values: Vec<f64>, assignment: Vec<usize>, k: usize) -> Result<Self> {
        if values.len() != assignment.len() {
            return invalid("values and assignment differ in length");
        }
        if k == 0 {
            return invalid("a partition needs at least one part");
        }
        if let Some(&bad) = assignment.iter().find(|&&j| j >= k) {
            return invalid(format!("part index {bad} out of range for {k} parts"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("partition values must be finite");
        }
        Ok(Self { values, assignment, k })
    }

    /// Concatenates the parts; elements are numbered part by part.
    pub fn from_parts(parts: Vec<Vec<f64>>) -> Result<Self> {
        let k = parts.len();
        let mut values = Vec::new();
        let mut assignment = Vec::new();
        for (j, part) in parts.into_iter().enumerate() {
            assignment.extend(std::iter::repeat_n(j, part.len()));
            values.extend(part);
        }
        Self::new(values, assignment, k)
    }

    /// Same elements, different assignment.
    pub fn reassigned(&self, assignment: Vec<usize>) -> Result<Self> {
        Self::new(self.values.clone(), assignment, self.k)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn num_parts(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn indices(&self, j: usize) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.assignment[e] == j).collect()
    }

    pub fn part(&self, j: usize) -> Vec<f64> {
        self.indices(j).into_iter().map(|e| self.values[e]).collect()
    }

    pub fn parts(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|j| self.part(j)).collect()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &j in &self.assignment {
            c[j] += 1;
        }
        c
    }

    fn compatible(&self, other: &Partition) -> bool {
        self.k == other.k && self.values.len() == other.values.len() && self.values == other.values
    }
}

/// Directed graph on the parts of two partitions of the same elements, with
/// an edge `(i, j)` whenever some element lies in part `i` of the first
/// partition and in part `j` of the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementGraph {
    k: usize,
    // multiplicity of A_i ∩ B_j
    counts: Vec<Vec<usize>>,
}

impl DisplacementGraph {
    pub fn new(a: &Partition, b: &Partition) -> Result<Self> {
        if !a.compatible(b) {
            return invalid("partitions are not over the same elements");
        }
        let k = a.k;
        let mut counts = vec![vec![0; k]; k];
        for (&i, &j) in a.assignment.iter().zip(&b.assignment) {
            counts[i][j] += 1;
        }
        Ok(Self { k, counts })
    }

    pub fn num_nodes(&self) -> usize {
        self.k
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.counts[i][j] > 0
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> usize {
        self.counts[i][j]
    }

    /// Shortest directed path `from -> ... -> to` (breadth-first, lowest
    /// index first), or `None`.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut prev = vec![usize::MAX; self.k];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for v in 0..self.k {
                if u != v && self.has_edge(u, v) && prev[v] == usize::MAX {
                    prev[v] = u;
                    if v == to {
                        let mut path = vec![to];
                        let mut w = to;
                        while w != from {
                            w = prev[w];
                            path.push(w);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Checks that every edge `(i, j)` can be closed by a path from `j` back
    /// to `i`.
    pub fn check_cycles(&self) -> Result<()> {
        for i in 0..self.k {
            for j in 0..self.k {
                if self.has_edge(i, j) && self.path(j, i).is_none() {
                    return Err(Error::LemmaViolation { from: j, to: i });
                }
            }
        }
        Ok(())
    }
}

/// Directed path from `j` to `i` in the displacement graph of `(a, b)`.
///
/// Requires equal part sizes and the edge `(i, j)`.
pub fn graph_path(a: &Partition, b: &Partition, i: usize, j: usize) -> Result<Vec<usize>> {
    if !a.compatible(b) {
        return invalid("partitions are not over the same elements");
    }
    if i >= a.k || j >= a.k {
        return invalid("node out of range");
    }
    if i == j {
        return Ok(vec![i]);
    }
    if a.cardinalities() != b.cardinalities() {
        return invalid("part cardinalities differ");
    }
    let g = DisplacementGraph::new(a, b)?;
    if !g.has_edge(i, j) {
        return invalid(format!("no edge ({i}, {j})"));
    }
    g.path(j, i).ok_or(Error::LemmaViolation { from: j, to: i })
}

/// Branch bounds estimated on a fine grid and widened by 1% of the range, so
/// that they can serve as declared bounds.
fn sampled_bounds(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const SAMPLES: usize = 4096;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=SAMPLES {
        let v = f(a + (b - a) * i as f64 / SAMPLES as f64);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let pad = 0.01 * (hi - lo) + 1e-12 * hi.abs().max(lo.abs()).max(1.0);
    (lo - pad, hi + pad)
}

/// Branch `j` (0-based) of a matrix symbol as a scalar symbol.
pub fn branch_symbol(ms: &MatrixSymbol, j: usize) -> Result<ScalarSymbol> {
    if j >= ms.size() {
        return invalid(format!("branch {j} out of range"));
    }
    let (a, b) = ms.interval();
    let m = ms.clone();
    let (lo, hi) = sampled_bounds(|t| ms.branch(j, t), a, b);
    ScalarSymbol::univariate(a, b, move |t| m.branch(j, t), lo, hi)
}

fn concat_segment(r: usize, y: f64) -> usize {
    ((y * r as f64).floor() as usize).min(r - 1)
}

/// Concatenation of the resized branches: on `[j/r, (j+1)/r)` the result is
/// branch `j` with `[j/r, (j+1)/r)` stretched onto the symbol's interval.
pub fn concat_branches(ms: &MatrixSymbol) -> Result<ScalarSymbol> {
    let r = ms.size();
    let (a, b) = ms.interval();
    let m = ms.clone();
    let eval = move |y: f64| {
        let j = concat_segment(r, y);
        let t = (a + (b - a) * (r as f64 * y - j as f64)).clamp(a, b);
        m.branch(j, t)
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..r {
        let (l, h) = sampled_bounds(|t| ms.branch(j, t), a, b);
        lo = lo.min(l);
        hi = hi.max(h);
    }
    let jumps = (1..r).map(|j| j as f64 / r as f64).collect();
    Ok(ScalarSymbol::univariate(0.0, 1.0, eval, lo, hi)?.with_discontinuities(jumps))
}

/// Principal submatrix on the indices `i` (1-based) with `i / (n + 1)` in
/// `e`, together with their count.
pub fn restriction<T: Scalar>(a: &DMatrix<T>, e: &IntervalUnion) -> (DMatrix<T>, usize) {
    let n = a.nrows();
    let keep: Vec<usize> = (1..=n)
        .filter(|&i| e.contains(i as f64 / (n + 1) as f64))
        .map(|i| i - 1)
        .collect();
    let sub = a.select_rows(&keep).select_columns(&keep);
    (sub, keep.len())
}

/// Rank-matches sorted eigenvalues against sorted samples of the concatenated
/// branches on `{i / d}`, then repairs the part sizes to `cards`.
pub fn initial_split(lambdas: &RealMultiset, ms: &MatrixSymbol, cards: &[usize]) -> Result<Partition> {
    let r = ms.size();
    if cards.len() != r {
        return invalid(format!("{} cardinalities for {r} branches", cards.len()));
    }
    let d = lambdas.len();
    if cards.iter().sum::<usize>() != d {
        return invalid("cardinalities do not sum to the number of eigenvalues");
    }
    let tilde = concat_branches(ms)?;
    let ys: Vec<f64> = (1..=d).map(|i| i as f64 / d as f64).collect();
    let samples: Vec<f64> = ys.iter().map(|&y| tilde.eval1(y)).collect();
    let sample_order = argsort(&samples);
    let sample_labels: Vec<usize> = sample_order.iter().map(|&i| concat_segment(r, ys[i])).collect();

    let lambda_order = lambdas.argsort();
    // labels[pos] is the part of the pos-th smallest eigenvalue
    let mut labels = sample_labels.clone();
    let mut counts = vec![0usize; r];
    for &j in &labels {
        counts[j] += 1;
    }
    while let Some(q) = (0..r).find(|&q| counts[q] < cards[q]) {
        let anchors: Vec<usize> = {
            let own: Vec<usize> = (0..d).filter(|&p| labels[p] == q).collect();
            if own.is_empty() {
                (0..d).filter(|&p| sample_labels[p] == q).collect()
            } else {
                own
            }
        };
        let best = (0..d)
            .filter(|&p| counts[labels[p]] > cards[labels[p]])
            .min_by_key(|&p| anchors.iter().map(|&a| a.abs_diff(p)).min().unwrap_or(0))
            .ok_or_else(|| Error::Internal("cardinality repair found no surplus part".into()))?;
        counts[labels[best]] -= 1;
        labels[best] = q;
        counts[q] += 1;
    }
    let mut assignment = vec![0; d];
    for (pos, &e) in lambda_order.iter().enumerate() {
        assignment[e] = labels[pos];
    }
    Partition::new(lambdas.values().to_vec(), assignment, r)
}

/// Elements of part `j` whose values fall outside `targets[j]`, ascending by
/// value then index.
fn bad_elements(p: &Partition, targets: &[IntervalUnion]) -> Vec<usize> {
    let mut bad: Vec<usize> = (0..p.len())
        .filter(|&e| !targets[p.assignment[e]].contains(p.values[e]))
        .collect();
    bad.sort_by(|&x, &y| p.values[x].total_cmp(&p.values[y]).then(x.cmp(&y)));
    bad
}

/// Total size of the bad sets of `p` with respect to `targets`.
pub fn bad_count(p: &Partition, targets: &[IntervalUnion]) -> usize {
    bad_elements(p, targets).len()
}

/// Outcome of [`refine_split_counted`].
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub partition: Partition,
    /// Number of displacement cycles performed.
    pub iterations: usize,
}

/// Moves misplaced elements by successive displacements along paths of the
/// displacement graph until every part lies in its target range.
pub fn refine_split(
    init: &Partition,
    targets: &[IntervalUnion],
    reference: &Partition,
) -> Result<Partition> {
    refine_split_counted(init, targets, reference).map(|r| r.partition)
}

/// [`refine_split`], also reporting the number of iterations.
pub fn refine_split_counted(
    init: &Partition,
    targets: &[IntervalUnion],
    reference: &Partition,
) -> Result<Refinement> {
    if !init.compatible(reference) {
        return invalid("reference is not a partition of the same elements");
    }
    if targets.len() != init.k {
        return invalid("one target range per part is required");
    }
    if init.cardinalities() != reference.cardinalities() {
        return invalid("initial and reference cardinalities differ");
    }
    if let Some(e) = (0..reference.len()).find(|&e| !targets[reference.assignment[e]].contains(reference.values[e])) {
        return invalid(format!(
            "reference element {} = {} lies outside the target range of part {}",
            e, reference.values[e], reference.assignment[e]
        ));
    }
    let budget = bad_count(init, targets);
    let mut cur = init.clone();
    let mut iterations = 0;
    while let Some(&x) = bad_elements(&cur, targets).first() {
        if iterations >= budget {
            return Err(Error::Internal("refinement exceeded its iteration bound".into()));
        }
        let j = cur.assignment[x];
        let p = reference.assignment[x];
        let g = DisplacementGraph::new(&cur, reference)?;
        let path = g.path(p, j).ok_or(Error::LemmaViolation { from: p, to: j })?;
        // choose all movers before changing anything
        let mut moves = vec![(x, p)];
        for w in path.windows(2) {
            let (from, to) = (w[0], w[1]);
            let y = (0..cur.len())
                .filter(|&e| e != x && cur.assignment[e] == from && reference.assignment[e] == to)
                .min_by(|&u, &v| cur.values[u].total_cmp(&cur.values[v]).then(u.cmp(&v)))
                .ok_or(Error::LemmaViolation { from, to })?;
            moves.push((y, to));
        }
        for (e, to) in moves {
            cur.assignment[e] = to;
        }
        iterations += 1;
    }
    Ok(Refinement { partition: cur, iterations })
}

/// Result of [`split_and_match`].
#[derive(Debug, Clone)]
pub struct SplitMatch {
    pub partition: Partition,
    pub targets: Vec<IntervalUnion>,
    pub matches: Vec<MatchResult>,
}

/// Density used when estimating branch essential ranges.
pub const BRANCH_DENSITY: usize = 10_000;

/// Initial split, refinement against `reference` with target ranges given by
/// the branch essential ranges expanded by `delta`, then a sorted match of
/// each part against its branch sampled on `grids[j]`.
pub fn split_and_match(
    lambdas: &RealMultiset,
    ms: &MatrixSymbol,
    reference: &Partition,
    grids: &[Vec<f64>],
    delta: f64,
    exec: Execution,
) -> Result<SplitMatch> {
    let r = ms.size();
    if grids.len() != r {
        return invalid("one grid per branch is required");
    }
    let cards = reference.cardinalities();
    if let Some(j) = (0..r).find(|&j| grids[j].len() != cards[j]) {
        return invalid(format!("grid {j} has {} points for {} eigenvalues", grids[j].len(), cards[j]));
    }
    if reference.values() != lambdas.values() {
        return invalid("reference is not a partition of the given eigenvalues");
    }
    let targets: Vec<IntervalUnion> = (0..r)
        .map(|j| {
            let f = branch_symbol(ms, j)?;
            let er = essential_range(&f, BRANCH_DENSITY, default_gap_tol(&f, BRANCH_DENSITY))?;
            Ok(er.expand(delta))
        })
        .collect::<Result<_>>()?;
    let init = initial_split(lambdas, ms, &cards)?;
    let partition = refine_split(&init, &targets, reference)?;
    let branches: Vec<usize> = (0..r).collect();
    let matches = exec
        .map(&branches, |&j| {
            let samples: Vec<f64> = grids[j].iter().map(|&t| ms.branch(j, t)).collect();
            sorted_match(&samples, &partition.part(j))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SplitMatch { partition, targets, matches })
}
