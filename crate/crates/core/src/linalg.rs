//! Small dense integer and rational matrices.
//!
//! Everything here is sized for the lattices in this crate (rank at most a
//! dozen or so), so the algorithms are the textbook ones: Bareiss for
//! determinants and Gauss-Jordan over `Rational64` for inverses and solves.
//! Integer arithmetic relies on the workspace-wide `overflow-checks`.

use std::fmt;

use num_rational::Rational64;

pub type Rational = Rational64;

/// Row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows; panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[i64]>>(cols: &[C]) -> Self {
        let rows = cols.first().map_or(0, |c| c.as_ref().len());
        Self::from_fn(rows, cols.len(), |i, j| cols[j].as_ref()[i])
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let base = i * out.cols;
                for (j, &b) in orow.iter().enumerate() {
                    out.data[base + j] += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, k: u32) -> IntMatrix {
        assert!(self.is_square());
        (0..k).fold(IntMatrix::identity(self.rows), |acc, _| acc.mul(self))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|i| self.row(i).iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                    return 0;
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).expect("determinant overflows i64")
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| Rational::from_integer(self.get(i, j)))
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Row-major matrix over `Rational64`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::from_integer(0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| Rational::from_integer(i64::from(i == j)))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        RatMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `Some` when every entry is an integer.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(IntMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_integer()))
        } else {
            None
        }
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != Rational::from_integer(0))?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / p);
                inv.set(col, j, inv.get(col, j) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor == Rational::from_integer(0) {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - factor * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - factor * inv.get(col, j));
                }
            }
        }
        Some(inv)
    }

    /// Solves `self · x = b` for a matrix of full column rank. Returns `None`
    /// when the system is inconsistent or the columns are dependent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(self.rows, b.len());
        let (m, n) = (self.rows, self.cols);
        let zero = Rational::from_integer(0);
        let mut a = RatMatrix::from_fn(m, n + 1, |i, j| if j < n { self.get(i, j) } else { b[i] });
        let mut row = 0;
        for col in 0..n {
            let pivot = (row..m).find(|&r| a.get(r, col) != zero)?;
            a.swap_rows(pivot, row);
            let p = a.get(row, col);
            for j in 0..=n {
                a.set(row, j, a.get(row, j) / p);
            }
            for r in 0..m {
                if r != row {
                    let factor = a.get(r, col);
                    if factor != zero {
                        for j in 0..=n {
                            a.set(r, j, a.get(r, j) - factor * a.get(row, j));
                        }
                    }
                }
            }
            row += 1;
        }
        if (row..m).any(|r| a.get(r, n) != zero) {
            return None;
        }
        Some((0..n).map(|i| a.get(i, n)).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// `aᵀ G b` for an integer Gram matrix.
pub fn bilinear(gram: &IntMatrix, a: &[i64], b: &[i64]) -> i64 {
    let mut acc = 0;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let row = gram.row(i);
        for (j, &y) in b.iter().enumerate() {
            acc += x * row[j] * y;
        }
    }
    acc
}

/// Rational version of [`bilinear`].
pub fn bilinear_rational(gram: &IntMatrix, a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::from_integer(0);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let g = gram.get(i, j);
            if g != 0 {
                acc += x * y * g;
            }
        }
    }
    acc
}

/// Floor of the square root of a nonnegative rational.
pub fn floor_sqrt(q: Rational) -> i64 {
    assert!(q >= Rational::from_integer(0));
    let mut k = (*q.numer() as f64 / *q.denom() as f64).sqrt().floor() as i64;
    while Rational::from_integer(k * k) > q {
        k -= 1;
    }
    while Rational::from_integer((k + 1) * (k + 1)) <= q {
        k += 1;
    }
    k
}

/// Inertia `(positive, negative, zero)` of a symmetric integer matrix,
/// computed by exact symmetric elimination.
pub fn inertia(gram: &IntMatrix) -> (usize, usize, usize) {
    assert!(gram.is_symmetric(), "inertia of a non-symmetric matrix");
    let n = gram.rows();
    let zero = Rational::from_integer(0);
    let mut a = gram.to_rational();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| a.get(i, i) != zero);
        let p = match pivot {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish: mix two basis vectors
                let pair = active.iter().copied().find_map(|i| {
                    active
                        .iter()
                        .copied()
                        .find(|&j| j != i && a.get(i, j) != zero)
                        .map(|j| (i, j))
                });
                let Some((i, j)) = pair else { break };
                for k in 0..n {
                    a.set(i, k, a.get(i, k) + a.get(j, k));
                }
                for k in 0..n {
                    a.set(k, i, a.get(k, i) + a.get(k, j));
                }
                i
            }
        };
        let d = a.get(p, p);
        if d > zero {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            let factor = a.get(i, p) / d;
            if factor == zero {
                continue;
            }
            for &j in &active {
                a.set(i, j, a.get(i, j) - factor * a.get(p, j));
            }
            a.set(i, p, zero);
        }
        for &j in &active {
            a.set(p, j, zero);
        }
    }
    (pos, neg, n - pos - neg)
}
