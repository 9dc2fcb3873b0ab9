//! Dense matrices over a [`Scalar`] with exact Gauss-Jordan elimination.
//! Row-major storage; pivoting is deterministic (first nonzero entry in
//! column order), so reduced forms, kernels, and quotient representatives
//! are reproducible byte for byte.

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<Vec<S>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        let mut m = Matrix::zero(r, c);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Matrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &Matrix<S>) -> Matrix<S> {
        assert!(self.rows == other.rows && self.cols == other.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        assert!(self.rows == other.rows && self.cols == other.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, c: &S) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * c.clone())
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn hcat(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv_lead = S::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].clone() * inv_lead.clone();
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let delta = f.clone() * self[(r, j)].clone();
                        self[(i, j)] = self[(i, j)].clone() - delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut basis = Vec::new();
        for fc in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![S::zero(); self.cols];
            v[fc] = S::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(pr, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b` for each column of `b`; `None` when inconsistent.
    pub fn solve(&self, b: &Matrix<S>) -> Option<Matrix<S>> {
        assert_eq!(self.rows, b.rows);
        let mut aug = self.hcat(b);
        let pivots = aug.rref_in_place();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zero(self.cols, b.cols);
        for (pr, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(pc, j)] = aug[(pr, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<S>> {
        assert_eq!(self.rows, self.cols);
        let x = self.solve(&Matrix::identity(self.rows))?;
        if self.mul(&x) == Matrix::identity(self.rows) {
            Some(x)
        } else {
            None
        }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// A subspace `W` of `Q^dim` held in reduced form, supporting canonical
/// representatives of cosets and a basis of a complement.
#[derive(Clone, Debug)]
pub struct Quotient<S> {
    pub dim: usize,
    reduced: Vec<Vec<S>>,
    pivots: Vec<usize>,
    pub free: Vec<usize>,
}

impl<S: Scalar> Quotient<S> {
    pub fn by_span(dim: usize, spanning: &[Vec<S>]) -> Self {
        let mut m = Matrix::from_rows(
            spanning
                .iter()
                .map(|v| {
                    assert_eq!(v.len(), dim);
                    v.clone()
                })
                .collect(),
        );
        if spanning.is_empty() {
            m = Matrix::zero(0, dim);
        }
        let pivots = m.rref_in_place();
        let reduced = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        let free = (0..dim).filter(|c| !pivots.contains(c)).collect();
        Quotient {
            dim,
            reduced,
            pivots,
            free,
        }
    }

    pub fn subspace_dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn quotient_dim(&self) -> usize {
        self.free.len()
    }

    /// Canonical representative of `v + W`: eliminate all pivot coordinates.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.dim);
        let mut out = v.to_vec();
        for (row, &pc) in self.reduced.iter().zip(&self.pivots) {
            if !out[pc].is_zero() {
                let f = out[pc].clone();
                for j in 0..self.dim {
                    let delta = f.clone() * row[j].clone();
                    out[j] = out[j].clone() - delta;
                }
            }
        }
        out
    }

    /// Coordinates of `v + W` with respect to the complement basis
    /// `{e_i : i free}`.
    pub fn coset_coords(&self, v: &[S]) -> Vec<S> {
        let r = self.reduce(v);
        self.free.iter().map(|&i| r[i].clone()).collect()
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// The complement basis vector for quotient coordinate `idx`.
    pub fn lift(&self, idx: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim];
        v[self.free[idx]] = S::one();
        v
    }
}

/// Incrementally maintained span of vectors in `S^dim`, kept in reduced row
/// echelon form so membership tests and rank queries stay cheap while
/// generators stream in.
#[derive(Clone, Debug)]
pub struct SpanBuilder<S> {
    dim: usize,
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> SpanBuilder<S> {
    pub fn new(dim: usize) -> Self {
        SpanBuilder {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn reduce_vec(&self, v: &mut [S]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for j in 0..self.dim {
                    let delta = f.clone() * row[j].clone();
                    v[j] = v[j].clone() - delta;
                }
            }
        }
    }

    /// Add a vector to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[S]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut r = v.to_vec();
        self.reduce_vec(&mut r);
        let Some(p) = (0..self.dim).find(|&j| !r[j].is_zero()) else {
            return false;
        };
        let lead = r[p].clone();
        for x in &mut r {
            *x = x.clone() / lead.clone();
        }
        for row in &mut self.rows {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for j in 0..self.dim {
                    let delta = f.clone() * r[j].clone();
                    row[j] = row[j].clone() - delta;
                }
            }
        }
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    pub fn contains(&self, v: &[S]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut r = v.to_vec();
        self.reduce_vec(&mut r);
        r.iter().all(|x| x.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, Q};
    use num_traits::Zero;

    fn m(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_kernel_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(a.apply(&k[0]).iter().all(|x| x.is_zero()));

        let b = m(&[&[1, 2], &[3, 5]]);
        let inv = b.inverse().unwrap();
        assert_eq!(b.mul(&inv), Matrix::identity(2));

        let rhs = m(&[&[3], &[8]]);
        let x = b.solve(&rhs).unwrap();
        assert_eq!(b.mul(&x), rhs);

        let inconsistent = m(&[&[1, 1], &[2, 2]]).solve(&m(&[&[1], &[3]]));
        assert!(inconsistent.is_none());
    }

    #[test]
    fn span_builder_tracks_rank_and_membership() {
        let mut sp: SpanBuilder<Q> = SpanBuilder::new(3);
        assert!(sp.insert(&[q(1, 1), q(2, 1), q(0, 1)]));
        assert!(sp.insert(&[q(0, 1), q(1, 1), q(1, 1)]));
        // A combination of the first two adds nothing.
        assert!(!sp.insert(&[q(2, 1), q(5, 1), q(1, 1)]));
        assert_eq!(sp.rank(), 2);
        assert!(sp.contains(&[q(1, 1), q(3, 1), q(1, 1)]));
        assert!(!sp.contains(&[q(0, 1), q(0, 1), q(1, 1)]));
        // Reduced basis is canonical regardless of insertion order.
        let mut other: SpanBuilder<Q> = SpanBuilder::new(3);
        other.insert(&[q(0, 1), q(1, 1), q(1, 1)]);
        other.insert(&[q(1, 1), q(2, 1), q(0, 1)]);
        assert_eq!(sp.basis(), other.basis());
    }

    #[test]
    fn quotient_representatives() {
        // W = span{(1,1,0), (0,0,1)} in Q^3.
        let w = vec![
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
        ];
        let quo = Quotient::by_span(3, &w);
        assert_eq!(quo.quotient_dim(), 1);
        assert!(quo.contains(&[q(2, 1), q(2, 1), q(-5, 1)]));
        let r = quo.coset_coords(&[q(0, 1), q(3, 1), q(7, 1)]);
        assert_eq!(r, vec![q(3, 1)]);
    }
}
