//! Exact sparse linear algebra over the rationals.
//!
//! Conventions: a [`SparseMatrix`] of a linear map has one column per source
//! basis vector, so `kernel` lives in the source space and `image` in the
//! target space. Every basis returned here is in reduced row echelon form, so
//! results do not depend on pivoting choices made along the way.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{self, Rational};

pub type SparseVec = BTreeMap<usize, Rational>;

/// Matrices smaller than this in both dimensions use dense Bareiss for `rank`.
pub const DENSE_CUTOFF: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankKernelImage {
    pub rank: usize,
    /// Basis of the null space, one vector per free column, in RREF order.
    pub kernel: Vec<Vec<Rational>>,
    /// Basis of the column space in reduced row echelon form.
    pub image: Vec<Vec<Rational>>,
    /// Pivot columns of the reduced row echelon form of the matrix.
    pub pivots: Vec<usize>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged dense matrix");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| rational::int(x)).collect())
            .collect();
        let mut m = Self::from_dense(&dense);
        if rows.is_empty() {
            m.cols = 0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of range");
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    /// Adds `v` to entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of range");
        let sum = self.get(r, c) + v;
        self.set(r, c, sum);
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.data[r]
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    axpy_entry(&mut acc, *j, a * b);
                }
            }
            out.data[i] = acc;
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "dimension mismatch in product");
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.data
            .iter()
            .map(|row| {
                let mut d = vec![Rational::zero(); self.cols];
                for (j, v) in row {
                    d[*j] = v.clone();
                }
                d
            })
            .collect()
    }

    /// Rank, through dense Bareiss for small matrices and sparse elimination
    /// otherwise.
    pub fn rank(&self) -> usize {
        if self.rows < DENSE_CUTOFF && self.cols < DENSE_CUTOFF {
            bareiss_rank(self)
        } else {
            markowitz_row_basis(&self.data, self.cols).len()
        }
    }

    pub fn rank_kernel_image(&self) -> RankKernelImage {
        let rows = rref(&markowitz_row_basis(&self.data, self.cols));
        let pivots: Vec<usize> = rows.iter().map(|r| *r.keys().next().unwrap()).collect();
        let kernel = kernel_from_rref(&rows, &pivots, self.cols);
        let col_rows = rref(&markowitz_row_basis(&self.transpose().data, self.rows));
        let image = col_rows.iter().map(|r| densify(r, self.rows)).collect();
        RankKernelImage {
            rank: pivots.len(),
            kernel,
            image,
            pivots,
        }
    }

    /// Canonical solution of `self · x = b` (free variables zero), if any.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let aug: Vec<SparseVec> = self
            .data
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                if !bi.is_zero() {
                    r.insert(self.cols, bi.clone());
                }
                r
            })
            .collect();
        let red = rref(&markowitz_row_basis(&aug, self.cols + 1));
        let mut x = vec![Rational::zero(); self.cols];
        for row in &red {
            let p = *row.keys().next().unwrap();
            if p == self.cols {
                return None;
            }
            x[p] = row.get(&self.cols).cloned().unwrap_or_else(Rational::zero);
        }
        Some(x)
    }
}

fn axpy_entry(acc: &mut SparseVec, j: usize, v: Rational) {
    if v.is_zero() {
        return;
    }
    let sum = acc.get(&j).cloned().unwrap_or_else(Rational::zero) + v;
    if sum.is_zero() {
        acc.remove(&j);
    } else {
        acc.insert(j, sum);
    }
}

/// `target -= factor * source`.
fn sub_scaled(target: &mut SparseVec, source: &SparseVec, factor: &Rational) {
    for (j, v) in source {
        axpy_entry(target, *j, -(v * factor));
    }
}

fn densify(v: &SparseVec, n: usize) -> Vec<Rational> {
    let mut d = vec![Rational::zero(); n];
    for (j, x) in v {
        d[*j] = x.clone();
    }
    d
}

pub(crate) fn sparsify(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// Gaussian elimination with Markowitz pivoting; returns a basis of the row
/// space (rows in elimination order, not reduced).
fn markowitz_row_basis(rows: &[SparseVec], cols: usize) -> Vec<SparseVec> {
    let mut active: BTreeMap<usize, SparseVec> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| (i, r.clone()))
        .collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cols];
    for (i, r) in &active {
        for j in r.keys() {
            col_rows[*j].insert(*i);
        }
    }
    let mut basis = Vec::new();
    while !active.is_empty() {
        // candidate rows: the few sparsest; pivot column: sparsest within them
        let mut by_len: Vec<(usize, usize)> = active.iter().map(|(i, r)| (r.len(), *i)).collect();
        by_len.sort_unstable();
        let mut best: Option<(usize, usize, usize)> = None;
        for &(len, i) in by_len.iter().take(4) {
            for j in active[&i].keys() {
                let cost = (len - 1) * (col_rows[*j].len() - 1);
                if best.is_none_or(|(c, _, _)| cost < c) {
                    best = Some((cost, i, *j));
                }
            }
        }
        let (_, pr, pc) = best.expect("active rows are nonempty");
        let pivot_row = active.remove(&pr).unwrap();
        for j in pivot_row.keys() {
            col_rows[*j].remove(&pr);
        }
        let pivot_inv = pivot_row[&pc].recip();
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for t in targets {
            let row = active.get_mut(&t).unwrap();
            let factor = &row[&pc] * &pivot_inv;
            let before: BTreeSet<usize> = row.keys().copied().collect();
            sub_scaled(row, &pivot_row, &factor);
            for j in pivot_row.keys() {
                let now = row.contains_key(j);
                if now && !before.contains(j) {
                    col_rows[*j].insert(t);
                } else if !now && before.contains(j) {
                    col_rows[*j].remove(&t);
                }
            }
            if row.is_empty() {
                active.remove(&t);
            }
        }
        basis.push(pivot_row);
    }
    basis
}

/// Reduced row echelon form of linearly independent rows (sorted by pivot).
fn rref(rows: &[SparseVec]) -> Vec<SparseVec> {
    let mut work: Vec<SparseVec> = rows.iter().filter(|r| !r.is_empty()).cloned().collect();
    let mut done: Vec<SparseVec> = Vec::new();
    while !work.is_empty() {
        let (k, _) = work
            .iter()
            .enumerate()
            .min_by_key(|(_, r)| (*r.keys().next().unwrap(), r.len()))
            .unwrap();
        let mut p = work.swap_remove(k);
        let pc = *p.keys().next().unwrap();
        let inv = p[&pc].recip();
        for v in p.values_mut() {
            *v *= &inv;
        }
        for r in work.iter_mut().chain(done.iter_mut()) {
            if let Some(f) = r.get(&pc).cloned() {
                sub_scaled(r, &p, &f);
            }
        }
        work.retain(|r| !r.is_empty());
        done.push(p);
    }
    done.sort_by_key(|r| *r.keys().next().unwrap());
    done
}

fn kernel_from_rref(rows: &[SparseVec], pivots: &[usize], cols: usize) -> Vec<Vec<Rational>> {
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    (0..cols)
        .filter(|c| !pivot_set.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, p) in rows.iter().zip(pivots) {
                if let Some(x) = row.get(&free) {
                    v[*p] = -x.clone();
                }
            }
            v
        })
        .collect()
}

/// Fraction-free dense elimination; rows are scaled to integers first.
pub fn bareiss_rank(m: &SparseMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .data
        .iter()
        .map(|row| {
            let l = rational::denominator_lcm(row.values());
            let mut d = vec![BigInt::zero(); m.cols];
            for (j, v) in row {
                d[*j] = (v * Rational::from_integer(l.clone())).to_integer();
            }
            d
        })
        .collect();
    let (nr, nc) = (m.rows, m.cols);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..nc {
        if rank == nr {
            break;
        }
        let Some(p) = (rank..nr).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..nr {
            for c in col + 1..nc {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Cohomology of a cochain complex at one degree, with canonical
/// representatives: the reduced echelon basis of the cocycles after reduction
/// modulo the coboundaries.
#[derive(Clone, Debug)]
pub struct CohomologySpace {
    pub dim: usize,
    pub cocycle_dim: usize,
    pub boundary_dim: usize,
    boundaries: Vec<SparseVec>,
    reps: Vec<SparseVec>,
}

impl CohomologySpace {
    /// `incoming`: matrix of `d` into this degree; `outgoing`: out of it.
    pub fn compute(incoming: Option<&SparseMatrix>, outgoing: Option<&SparseMatrix>, dim: usize) -> Self {
        let cocycles: Vec<SparseVec> = match outgoing {
            Some(d) => {
                assert_eq!(d.cols(), dim, "outgoing differential has wrong source");
                d.rank_kernel_image().kernel.iter().map(|v| sparsify(v)).collect()
            }
            None => (0..dim).map(|i| SparseVec::from([(i, Rational::one())])).collect(),
        };
        let boundaries: Vec<SparseVec> = match incoming {
            Some(d) => {
                assert_eq!(d.rows(), dim, "incoming differential has wrong target");
                d.rank_kernel_image().image.iter().map(|v| sparsify(v)).collect()
            }
            None => Vec::new(),
        };
        let reduced: Vec<SparseVec> = cocycles
            .iter()
            .map(|z| reduce(z, &boundaries))
            .filter(|z| !z.is_empty())
            .collect();
        let reps = rref(&markowitz_row_basis(&reduced, dim));
        CohomologySpace {
            dim,
            cocycle_dim: cocycles.len(),
            boundary_dim: boundaries.len(),
            boundaries,
            reps,
        }
    }

    pub fn betti(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> Vec<Vec<Rational>> {
        self.reps.iter().map(|r| densify(r, self.dim)).collect()
    }

    /// Coordinates of the class of a cocycle in the representative basis;
    /// `None` if `z` is not in the span of cocycles.
    pub fn coordinates(&self, z: &[Rational]) -> Option<Vec<Rational>> {
        let mut r = reduce(&sparsify(z), &self.boundaries);
        let mut coords = Vec::with_capacity(self.reps.len());
        for rep in &self.reps {
            let p = *rep.keys().next().unwrap();
            let c = r.get(&p).cloned().unwrap_or_else(Rational::zero);
            if !c.is_zero() {
                sub_scaled(&mut r, rep, &c);
            }
            coords.push(c);
        }
        r.is_empty().then_some(coords)
    }

    /// Whether a cocycle is a coboundary.
    pub fn is_exact(&self, z: &[Rational]) -> bool {
        reduce(&sparsify(z), &self.boundaries).is_empty()
    }
}

/// Reduces a vector modulo rows in reduced echelon form.
fn reduce(v: &SparseVec, rref_rows: &[SparseVec]) -> SparseVec {
    let mut r = v.clone();
    for row in rref_rows {
        let p = *row.keys().next().unwrap();
        if let Some(c) = r.get(&p).cloned() {
            sub_scaled(&mut r, row, &c);
        }
    }
    r
}
