//! Vertex isoperimetry on the lattice `[k]^n = {0, …, k-1}^n` with the
//! Manhattan metric.
//!
//! Cells are enumerated row-major (last coordinate fastest). The simplicial
//! order orders cells by coordinate sum and breaks ties at the first differing
//! coordinate, where the larger value comes first. Among all pairs of sets of
//! sizes `r` and `s`, the first `r` and last `s` cells of that order are as far
//! apart as possible; [`verify_extremal_pairs`] checks this by exhaustive
//! search on small grids.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_half_open_eps, domain, Error, Result};

/// Default cap on exhaustive-search work units.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Largest grid handled by [`verify_extremal_pairs`] (subsets are bitmasks).
pub const MAX_EXHAUSTIVE_CELLS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Grid {
    pub k: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cell {
    pub coords: Vec<usize>,
}

impl Cell {
    pub fn new(coords: Vec<usize>) -> Self {
        Self { coords }
    }

    pub fn sum(&self) -> usize {
        self.coords.iter().sum()
    }
}

impl Grid {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 2 || n < 1 {
            return Err(domain(format!("grid needs k >= 2 and n >= 1, got k = {k}, n = {n}")));
        }
        k.checked_pow(n as u32).ok_or_else(|| domain(format!("{k}^{n} cells do not fit in memory")))?;
        Ok(Self { k, n })
    }

    /// Number of cells, `k^n`.
    pub fn size(&self) -> usize {
        self.k.pow(self.n as u32)
    }

    pub fn cell(&self, mut index: usize) -> Cell {
        let mut coords = vec![0; self.n];
        for c in coords.iter_mut().rev() {
            *c = index % self.k;
            index /= self.k;
        }
        Cell { coords }
    }

    pub fn index(&self, cell: &Cell) -> Result<usize> {
        if cell.coords.len() != self.n {
            return Err(Error::DimensionMismatch(cell.coords.len(), self.n));
        }
        cell.coords.iter().try_fold(0usize, |acc, &c| {
            if c >= self.k {
                Err(Error::Range(format!("coordinate {c} outside [0, {})", self.k)))
            } else {
                Ok(acc * self.k + c)
            }
        })
    }

    pub fn manhattan(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.cell(i), self.cell(j));
        a.coords.iter().zip(&b.coords).map(|(x, y)| x.abs_diff(*y)).sum()
    }

    /// Largest Manhattan distance in the grid, `n(k-1)`.
    pub fn diameter(&self) -> usize {
        self.n * (self.k - 1)
    }

    /// All cell indices sorted by the simplicial order.
    pub fn simplicial_order(&self) -> Vec<usize> {
        let cells: Vec<Cell> = (0..self.size()).map(|i| self.cell(i)).collect();
        let mut order: Vec<usize> = (0..self.size()).collect();
        order.sort_by(|&a, &b| simplicial_order_unchecked(&cells[a], &cells[b]));
        order
    }
}

fn simplicial_order_unchecked(x: &Cell, y: &Cell) -> Ordering {
    x.sum().cmp(&y.sum()).then_with(|| {
        match x.coords.iter().zip(&y.coords).find(|(a, b)| a != b) {
            // The larger coordinate comes first.
            Some((a, b)) => b.cmp(a),
            None => Ordering::Equal,
        }
    })
}

/// Compares two cells in the simplicial order.
pub fn simplicial_cmp(x: &Cell, y: &Cell) -> Result<Ordering> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::DimensionMismatch(x.coords.len(), y.coords.len()));
    }
    Ok(simplicial_order_unchecked(x, y))
}

/// A set of cells of one grid, stored as a bitset over cell indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetHandle {
    grid: Grid,
    bits: Vec<u64>,
}

impl SubsetHandle {
    pub fn empty(grid: Grid) -> Self {
        Self { grid, bits: vec![0; grid.size().div_ceil(64)] }
    }

    pub fn from_indices(grid: Grid, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::empty(grid);
        for i in indices {
            set.insert(i)?;
        }
        Ok(set)
    }

    pub fn from_cells<'a>(grid: Grid, cells: impl IntoIterator<Item = &'a Cell>) -> Result<Self> {
        let mut set = Self::empty(grid);
        for c in cells {
            set.insert(grid.index(c)?)?;
        }
        Ok(set)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn insert(&mut self, index: usize) -> Result<()> {
        if index >= self.grid.size() {
            return Err(Error::Range(format!("cell index {index} outside the grid")));
        }
        self.bits[index / 64] |= 1 << (index % 64);
        Ok(())
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.grid.size() && self.bits[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.grid.size()).filter(|&i| self.contains(i))
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.indices().map(|i| self.grid.cell(i)).collect()
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).any(|(a, b)| a & b != 0)
    }
}

fn check_count(grid: Grid, r: usize) -> Result<()> {
    if r > grid.size() {
        Err(Error::Range(format!("segment length {r} exceeds the {} cells of the grid", grid.size())))
    } else {
        Ok(())
    }
}

/// The first `r` cells of the simplicial order.
pub fn initial_segment(grid: Grid, r: usize) -> Result<SubsetHandle> {
    check_count(grid, r)?;
    SubsetHandle::from_indices(grid, grid.simplicial_order().into_iter().take(r))
}

/// The last `s` cells of the simplicial order.
pub fn final_segment(grid: Grid, s: usize) -> Result<SubsetHandle> {
    check_count(grid, s)?;
    SubsetHandle::from_indices(grid, grid.simplicial_order().into_iter().rev().take(s))
}

fn neighbours(grid: Grid, index: usize) -> impl Iterator<Item = usize> {
    let cell = grid.cell(index);
    let mut stride = 1;
    let mut out = Vec::with_capacity(2 * grid.n);
    for &c in cell.coords.iter().rev() {
        if c > 0 {
            out.push(index - stride);
        }
        if c + 1 < grid.k {
            out.push(index + stride);
        }
        stride *= grid.k;
    }
    out.into_iter()
}

/// Cells within Manhattan distance `t` of `a`, by breadth-first search over
/// unit steps.
pub fn t_boundary(a: &SubsetHandle, t: usize) -> SubsetHandle {
    let grid = a.grid;
    let mut dist = vec![usize::MAX; grid.size()];
    let mut queue = VecDeque::new();
    for i in a.indices() {
        dist[i] = 0;
        queue.push_back(i);
    }
    let mut out = a.clone();
    while let Some(i) = queue.pop_front() {
        if dist[i] == t {
            continue;
        }
        for j in neighbours(grid, i) {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                out.bits[j / 64] |= 1 << (j % 64);
                queue.push_back(j);
            }
        }
    }
    out
}

/// Smallest Manhattan distance between a cell of `a` and a cell of `b`.
pub fn set_distance(a: &SubsetHandle, b: &SubsetHandle) -> Result<usize> {
    if a.grid != b.grid {
        return Err(Error::DimensionMismatch(a.grid.size(), b.grid.size()));
    }
    let bs: Vec<Cell> = b.cells();
    a.cells()
        .iter()
        .flat_map(|x| {
            bs.iter().map(move |y| x.coords.iter().zip(&y.coords).map(|(p, q)| p.abs_diff(*q)).sum::<usize>())
        })
        .min()
        .ok_or(Error::EmptySet)
}

/// Outcome of an exhaustive extremal-pair search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalCheck {
    pub k: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    /// Largest `d(A, B)` over all `|A| = r`, `|B| = s`.
    pub brute_max: usize,
    /// `d(initial_segment(r), final_segment(s))`.
    pub segment_distance: usize,
    pub agree: bool,
    /// Number of `(A, B)` pairs covered, `C(N, r) C(N, s)`.
    pub search_space: u128,
    /// Work actually performed, `C(N, r) · N` cell distances.
    pub work: u128,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Visits every `r`-subset of `{lo, …, n-1}` as a bitmask, in increasing
/// numeric order (Gosper's hack on the shifted range).
fn for_each_subset(lo: usize, n: usize, r: usize, mut f: impl FnMut(u64)) {
    let width = n - lo;
    if r > width {
        return;
    }
    if r == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << width;
    let mut m: u64 = (1u64 << r) - 1;
    while m < limit {
        f(m << lo);
        let c = m & m.wrapping_neg();
        let rr = m + c;
        m = (((rr ^ m) >> 2) / c) | rr;
    }
}

/// Checks that simplicial segments are extremal for sets of sizes `r`, `s`.
///
/// Every `A` with `|A| = r` is enumerated. For a fixed `A` the best `B` is
/// the `s` cells farthest from `A`, so `max_B d(A, B)` is the `s`-th largest
/// distance to `A` and the search over `B` is exact without enumeration.
/// Work is split on the smallest element of `A` and merged by maximum, so the
/// result is independent of scheduling.
pub fn verify_extremal_pairs(grid: Grid, r: usize, s: usize, budget: u128) -> Result<ExtremalCheck> {
    let size = grid.size();
    if size > MAX_EXHAUSTIVE_CELLS {
        return Err(domain(format!(
            "exhaustive search needs at most {MAX_EXHAUSTIVE_CELLS} cells, the grid has {size}"
        )));
    }
    if r == 0 || s == 0 || r > size || s > size {
        return Err(Error::Range(format!("set sizes must lie in [1, {size}], got r = {r}, s = {s}")));
    }
    let search_space = binomial(size, r) * binomial(size, s);
    let work = binomial(size, r) * size as u128;
    if work > budget {
        return Err(Error::BudgetExceeded { required: work, search_space, budget });
    }
    let dist: Vec<Vec<u8>> = (0..size).map(|i| (0..size).map(|j| grid.manhattan(i, j) as u8).collect()).collect();
    let diameter = grid.diameter();

    let best_for = |mask: u64| -> usize {
        let mut to_a = vec![u8::MAX; size];
        let mut m = mask;
        while m != 0 {
            let a = m.trailing_zeros() as usize;
            m &= m - 1;
            for (slot, &d) in to_a.iter_mut().zip(&dist[a]) {
                *slot = (*slot).min(d);
            }
        }
        let mut hist = vec![0usize; diameter + 1];
        for &d in &to_a {
            hist[d as usize] += 1;
        }
        let mut seen = 0;
        for d in (0..=diameter).rev() {
            seen += hist[d];
            if seen >= s {
                return d;
            }
        }
        0
    };

    let brute_max = (0..=size - r)
        .into_par_iter()
        .map(|first| {
            let mut best = 0;
            for_each_subset(first + 1, size, r - 1, |rest| {
                best = best.max(best_for(rest | 1 << first));
            });
            best
        })
        .max()
        .unwrap_or(0);

    let segment_distance = set_distance(&initial_segment(grid, r)?, &final_segment(grid, s)?)?;
    Ok(ExtremalCheck {
        k: grid.k,
        n: grid.n,
        r,
        s,
        brute_max,
        segment_distance,
        agree: brute_max == segment_distance,
        search_space,
        work,
    })
}

/// Number of cells of `[k]^n` with each exact coordinate sum `0..=n(k-1)`.
fn sum_histogram(k: usize, n: usize) -> Vec<BigUint> {
    let mut counts = vec![BigUint::one()];
    for _ in 0..n {
        let len = counts.len() + k - 1;
        let mut next = Vec::with_capacity(len);
        // Sliding window of width k over the previous row.
        let mut window = BigUint::zero();
        for s in 0..len {
            if s < counts.len() {
                window += &counts[s];
            }
            if s >= k {
                window -= &counts[s - k];
            }
            next.push(window.clone());
        }
        counts = next;
    }
    counts
}

/// Number of cells of `[k]^n` with coordinate sum at most `s`.
pub fn count_cells_sum_le(k: usize, n: usize, s: usize) -> Result<BigUint> {
    if k < 2 || n < 1 {
        return Err(domain("need k >= 2 and n >= 1"));
    }
    if s > n * (k - 1) {
        return Err(Error::Range(format!("sum {s} exceeds the largest sum {}", n * (k - 1))));
    }
    Ok(sum_histogram(k, n).into_iter().take(s + 1).sum())
}

/// Largest Manhattan distance between two sets of `ε`-fraction of the
/// `m`-refined lattice `{0, 1/m, …, 1}^n`, divided by `√n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingReport {
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    /// Coordinate-sum threshold (in lattice steps) of the lower slab.
    pub lower_sum: usize,
    pub lattice_value: f64,
    /// `-2√(π/6) Φ^{-1}(ε)`, the `n, m → ∞` limit.
    pub continuous_target: f64,
}

/// Lattice value of the Manhattan distance between the two extremal slabs.
///
/// The lower slab `{Σx ≤ s₁}` is the smallest one holding at least
/// `ε (m+1)^n` cells, compared in exact rational arithmetic; the upper slab is
/// its mirror image. The distance `nm - 2s₁` is rescaled to the unit cube.
pub fn scaled_max_distance(n: usize, m: usize, eps: f64, budget: u128) -> Result<ScalingReport> {
    check_half_open_eps(eps)?;
    if n == 0 || m == 0 {
        return Err(domain("need n >= 1 and m >= 1"));
    }
    let work = (n as u128) * (n as u128) * (m as u128);
    if work > budget {
        let cells = u32::try_from(n).ok().and_then(|e| (m as u128 + 1).checked_pow(e)).unwrap_or(u128::MAX);
        return Err(Error::BudgetExceeded { required: work, search_space: cells, budget });
    }
    let k = m + 1;
    let hist = sum_histogram(k, n);
    let total = BigInt::from(BigUint::from(k).pow(n as u32));
    let target = BigRational::from_float(eps).expect("finite eps") * BigRational::from_integer(total);
    let mut acc = BigUint::zero();
    let mut lower_sum = n * m;
    for (s, c) in hist.iter().enumerate() {
        acc += c;
        if BigRational::from_integer(BigInt::from(acc.clone())) >= target {
            lower_sum = s;
            break;
        }
    }
    let steps = (n * m).saturating_sub(2 * lower_sum);
    let lattice_value = steps as f64 / (m as f64 * (n as f64).sqrt());
    let continuous_target = -2.0 * (std::f64::consts::PI / 6.0).sqrt() * crate::specfun::phi_inv(eps)?;
    Ok(ScalingReport { n, m, eps, lower_sum, lattice_value, continuous_target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(v: &[usize]) -> Cell {
        Cell::new(v.to_vec())
    }

    #[test]
    fn order_on_small_grids() {
        assert_eq!(simplicial_cmp(&c(&[1, 0]), &c(&[0, 1])).unwrap(), Ordering::Less);
        let g = Grid::new(3, 2).unwrap();
        let order: Vec<Vec<usize>> = g.simplicial_order().into_iter().map(|i| g.cell(i).coords).collect();
        let expected = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2], [2, 1], [1, 2], [2, 2]];
        assert_eq!(order, expected.iter().map(|v| v.to_vec()).collect::<Vec<_>>());
        // Every pair agrees with the listed order.
        for i in 0..9 {
            for j in 0..9 {
                let got = simplicial_cmp(&c(&expected[i]), &c(&expected[j])).unwrap();
                assert_eq!(got, i.cmp(&j));
            }
        }
        assert!(matches!(simplicial_cmp(&c(&[0]), &c(&[0, 0])), Err(Error::DimensionMismatch(1, 2))));
    }

    #[test]
    fn order_is_strict_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draw = |rng: &mut ChaCha8Rng| c(&(0..4).map(|_| rng.random_range(0..4)).collect::<Vec<_>>());
        for _ in 0..10_000 {
            let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let xy = simplicial_cmp(&x, &y).unwrap();
            assert_eq!(xy.reverse(), simplicial_cmp(&y, &x).unwrap());
            assert_eq!(xy == Ordering::Equal, x == y);
            if xy == Ordering::Less && simplicial_cmp(&y, &z).unwrap() == Ordering::Less {
                assert_eq!(simplicial_cmp(&x, &z).unwrap(), Ordering::Less);
            }
        }
    }

    #[test]
    fn segments() {
        let g = Grid::new(3, 2).unwrap();
        let a = initial_segment(g, 2).unwrap();
        assert_eq!(a.cells(), vec![c(&[0, 0]), c(&[1, 0])]);
        assert_eq!(initial_segment(g, 9).unwrap().len(), 9);
        assert!(initial_segment(g, 10).is_err());
        assert!(final_segment(g, 10).is_err());
        for (k, n) in [(3, 2), (2, 3)] {
            let g = Grid::new(k, n).unwrap();
            for s in 0..=g.size() {
                let fin = final_segment(g, s).unwrap();
                let init = initial_segment(g, s).unwrap();
                for i in 0..g.size() {
                    let comp = Cell::new(g.cell(i).coords.iter().map(|x| k - 1 - x).collect());
                    assert_eq!(fin.contains(i), init.contains(g.index(&comp).unwrap()));
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let g = Grid::new(3, 2).unwrap();
        let a = SubsetHandle::from_cells(g, &[c(&[0, 0])]).unwrap();
        let b = t_boundary(&a, 1);
        assert_eq!(b.cells(), vec![c(&[0, 0]), c(&[0, 1]), c(&[1, 0])]);
        assert_eq!(t_boundary(&a, 0), a);
        assert_eq!(t_boundary(&a, g.diameter()).len(), 9);
        for t in 0..5 {
            let small = t_boundary(&a, t);
            let big = t_boundary(&a, t + 1);
            assert!(small.indices().all(|i| big.contains(i)));
        }
    }

    #[test]
    fn distance_examples() {
        let g = Grid::new(3, 2).unwrap();
        let a = SubsetHandle::from_cells(g, &[c(&[0, 0])]).unwrap();
        let b = SubsetHandle::from_cells(g, &[c(&[2, 2])]).unwrap();
        assert_eq!(set_distance(&a, &b).unwrap(), 4);
        assert_eq!(set_distance(&a, &a).unwrap(), 0);
        assert_eq!(set_distance(&a, &SubsetHandle::empty(g)), Err(Error::EmptySet));
    }

    #[test]
    fn distance_matches_boundary_growth() {
        let g = Grid::new(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let ma: u32 = rng.random_range(1..1 << 16);
            let mb: u32 = rng.random_range(1..1 << 16);
            let a = SubsetHandle::from_indices(g, (0..16).filter(|i| ma >> i & 1 == 1)).unwrap();
            let b = SubsetHandle::from_indices(g, (0..16).filter(|i| mb >> i & 1 == 1)).unwrap();
            let via_boundary = (0..=g.diameter()).find(|&t| t_boundary(&a, t).intersects(&b)).unwrap();
            assert_eq!(set_distance(&a, &b).unwrap(), via_boundary);
        }
    }

    #[test]
    fn segments_minimise_boundary_growth() {
        for (k, n) in [(2, 3), (3, 2)] {
            let g = Grid::new(k, n).unwrap();
            let size = g.size();
            for mask in 1u32..(1 << size) {
                let a = SubsetHandle::from_indices(g, (0..size).filter(|i| mask >> i & 1 == 1)).unwrap();
                let seg = initial_segment(g, a.len()).unwrap();
                for t in 1..=g.diameter() {
                    assert!(t_boundary(&a, t).len() >= t_boundary(&seg, t).len());
                }
            }
        }
    }

    /// Literal search over every pair of masks.
    fn naive_max(g: Grid, r: usize, s: usize) -> usize {
        let size = g.size();
        let mut best = 0;
        for_each_subset(0, size, r, |ma| {
            for_each_subset(0, size, s, |mb| {
                let a = SubsetHandle::from_indices(g, (0..size).filter(|i| ma >> i & 1 == 1)).unwrap();
                let b = SubsetHandle::from_indices(g, (0..size).filter(|i| mb >> i & 1 == 1)).unwrap();
                best = best.max(set_distance(&a, &b).unwrap());
            });
        });
        best
    }

    #[test]
    fn extremal_examples() {
        let v = verify_extremal_pairs(Grid::new(2, 2).unwrap(), 1, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!((v.brute_max, v.segment_distance, v.agree), (2, 2, true));
        let v = verify_extremal_pairs(Grid::new(3, 2).unwrap(), 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!((v.brute_max, v.segment_distance, v.agree), (2, 2, true));
        assert_eq!(v.search_space, 36 * 36);
    }

    #[test]
    fn extremal_search_matches_naive() {
        for (k, n) in [(2, 2), (3, 2), (2, 3)] {
            let g = Grid::new(k, n).unwrap();
            for r in 1..=g.size() {
                for s in 1..=g.size() {
                    let v = verify_extremal_pairs(g, r, s, DEFAULT_BUDGET).unwrap();
                    assert_eq!(v.brute_max, naive_max(g, r, s), "k {k} n {n} r {r} s {s}");
                    if r + s > g.size() {
                        assert_eq!(v.brute_max, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn extremal_guards() {
        let g = Grid::new(2, 6).unwrap();
        assert!(verify_extremal_pairs(g, 1, 1, DEFAULT_BUDGET).is_err());
        let g = Grid::new(2, 5).unwrap();
        assert!(matches!(verify_extremal_pairs(g, 16, 16, 1000), Err(Error::BudgetExceeded { .. })));
        assert!(verify_extremal_pairs(g, 0, 1, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn subset_enumeration_counts() {
        for (n, r) in [(5, 2), (8, 4), (10, 0), (6, 6)] {
            let mut count = 0u128;
            for_each_subset(0, n, r, |m| {
                assert_eq!(m.count_ones() as usize, r);
                count += 1;
            });
            assert_eq!(count, binomial(n, r));
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count_cells_sum_le(3, 2, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(count_cells_sum_le(4, 3, 9).unwrap(), BigUint::from(64u32));
        for n in 1..12 {
            for s in 0..=n {
                let oracle: u128 = (0..=s).map(|j| binomial(n, j)).sum();
                assert_eq!(count_cells_sum_le(2, n, s).unwrap(), BigUint::from(oracle));
            }
        }
        for (k, n) in [(3, 4), (5, 3)] {
            let top = n * (k - 1);
            let total = BigUint::from(k).pow(n as u32);
            for s in 0..top {
                let sum = count_cells_sum_le(k, n, s).unwrap() + count_cells_sum_le(k, n, top - s - 1).unwrap();
                assert_eq!(sum, total);
            }
        }
        assert!(count_cells_sum_le(3, 2, 5).is_err());
    }

    #[test]
    fn scaling_interval_and_clt() {
        let r = scaled_max_distance(1, 10_000, 0.2, DEFAULT_BUDGET).unwrap();
        assert!((r.lattice_value - 0.6).abs() < 1e-3);
        let r = scaled_max_distance(30, 64, 0.1, DEFAULT_BUDGET).unwrap();
        assert!((r.lattice_value / 0.74 - 1.0).abs() < 0.1, "{}", r.lattice_value);
        assert!((r.continuous_target - 0.74).abs() < 1e-3);
        let near_half = scaled_max_distance(10, 8, 0.499_999, DEFAULT_BUDGET).unwrap();
        assert!(near_half.lattice_value < 0.1);
        assert!(matches!(scaled_max_distance(100, 1000, 0.1, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn scaling_monotone_in_eps() {
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let v = scaled_max_distance(12, 10, i as f64 / 100.0, DEFAULT_BUDGET).unwrap().lattice_value;
            assert!(v <= prev);
            prev = v;
        }
    }
}
