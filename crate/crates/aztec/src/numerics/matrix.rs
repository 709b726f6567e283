use super::Field;
use crate::error::{Error, Result};
use std::ops::{Index, IndexMut};

/// Which triangle of a triangular matrix may be nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Lower,
    Upper,
}

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero_value(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one_value();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols, "block out of range");
        Self::from_fn(r1 - r0, c1 - c0, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    /// Writes `b` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for r in 0..b.rows {
            for c in 0..b.cols {
                self[(r0 + r, c0 + c)] = b.get(r, c).clone();
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero_value() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero_value() {
                        let v = out.get(r, c).plus(&a.times(b));
                        out[(r, c)] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!("{}x{} versus {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.plus(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.minus(b))
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.negated())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let v = self.get(r, c);
                    if r == c {
                        *v == T::one_value()
                    } else {
                        v.is_zero_value()
                    }
                })
            })
    }

    pub fn is_triangular(&self, o: Orientation) -> bool {
        (0..self.rows).all(|r| {
            (0..self.cols).all(|c| {
                let zero_here = match o {
                    Orientation::Lower => c > r,
                    Orientation::Upper => c < r,
                };
                !zero_here || self.get(r, c).is_zero_value()
            })
        })
    }

    /// Exact determinant by elimination with full pivoting. The pivot is the
    /// first nonzero entry of the remaining block in row-major order.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("det of {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one_value();
        let mut negate = false;
        for k in 0..n {
            let pivot = (k..n).flat_map(|r| (k..n).map(move |c| (r, c))).find(|&(r, c)| !a.get(r, c).is_zero_value());
            let Some((pr, pc)) = pivot else {
                return Ok(T::zero_value());
            };
            if pr != k {
                a.swap_rows(pr, k);
                negate = !negate;
            }
            if pc != k {
                a.swap_cols(pc, k);
                negate = !negate;
            }
            let p = a.get(k, k).clone();
            det = det.times(&p);
            for r in k + 1..n {
                let f = a.get(r, k).clone();
                if f.is_zero_value() {
                    continue;
                }
                let f = f.over(&p);
                for c in k + 1..n {
                    let v = a.get(k, c);
                    if !v.is_zero_value() {
                        let nv = a.get(r, c).minus(&f.times(v));
                        a[(r, c)] = nv;
                    }
                }
                a[(r, k)] = T::zero_value();
            }
        }
        Ok(if negate { det.negated() } else { det })
    }

    /// Exact inverse by Gauss-Jordan elimination; the pivot is the first
    /// nonzero entry at or below the diagonal.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let Some(pr) = (k..n).find(|&r| !a.get(r, k).is_zero_value()) else {
                return Err(Error::Singular { det: T::zero_value().render() });
            };
            if pr != k {
                a.swap_rows(pr, k);
                inv.swap_rows(pr, k);
            }
            let p = a.get(k, k).clone();
            for c in 0..n {
                let v = a.get(k, c).over(&p);
                a[(k, c)] = v;
                let w = inv.get(k, c).over(&p);
                inv[(k, c)] = w;
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a.get(r, k).clone();
                if f.is_zero_value() {
                    continue;
                }
                for c in 0..n {
                    let v = a.get(k, c);
                    if !v.is_zero_value() {
                        let nv = a.get(r, c).minus(&f.times(v));
                        a[(r, c)] = nv;
                    }
                    let w = inv.get(k, c);
                    if !w.is_zero_value() {
                        let nw = inv.get(r, c).minus(&f.times(w));
                        inv[(r, c)] = nw;
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Inverse of a triangular matrix by substitution. Only the stated
    /// triangle of `self` is read.
    pub fn triangular_inverse(&self, o: Orientation) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of {}x{} matrix", self.rows, self.cols)));
        }
        if !self.is_triangular(o) {
            return Err(Error::Structural(format!("matrix is not {o:?} triangular")));
        }
        if o == Orientation::Upper {
            return Ok(self.transpose().triangular_inverse(Orientation::Lower)?.transpose());
        }
        let n = self.rows;
        if let Some(index) = (0..n).find(|&i| self.get(i, i).is_zero_value()) {
            return Err(Error::ZeroDiagonal { index });
        }
        let mut inv = Self::zeros(n, n);
        for c in 0..n {
            inv[(c, c)] = T::one_value().over(self.get(c, c));
            for r in c + 1..n {
                let mut s = T::zero_value();
                for k in c..r {
                    let l = self.get(r, k);
                    if !l.is_zero_value() {
                        let x = inv.get(k, c);
                        if !x.is_zero_value() {
                            s = s.plus(&l.times(x));
                        }
                    }
                }
                inv[(r, c)] = s.negated().over(self.get(r, r));
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `P·self·Q` where row `i` of the result is row `rows[i]` of `self`
    /// and column `j` is column `cols[j]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        &mut self.data[r * self.cols + c]
    }
}
