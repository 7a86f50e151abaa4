use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            write!(f, "[{}]", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Q;
    fn index(&self, (r, c): (usize, usize)) -> &Q {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_fn(rows.len(), cols, |r, c| q(rows[r][c]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Q>]) -> Self {
        Self::from_fn(rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let sparse_rows: Vec<Vec<(usize, &Q)>> = (0..other.rows)
            .map(|k| {
                (0..other.cols)
                    .filter_map(|c| {
                        let b = &other[(k, c)];
                        (!b.is_zero()).then_some((c, b))
                    })
                    .collect()
            })
            .collect();
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for (k, row) in sparse_rows.iter().enumerate() {
                let a = &self[(r, k)];
                if a.is_zero() || row.is_empty() {
                    continue;
                }
                for &(c, b) in row {
                    out[(r, c)] += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: &Q) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&q(-1))
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .filter(|&c| !v[c].is_zero())
                    .map(|c| &self[(r, c)] * &v[c])
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let a = &self[(r / other.rows, c / other.cols)];
            if a.is_zero() {
                Q::zero()
            } else {
                a * &other[(r % other.rows, c % other.cols)]
            }
        })
    }

    /// Block matrix from a grid of blocks with the given row and column sizes.
    pub fn blocks(row_sizes: &[usize], col_sizes: &[usize], block: impl Fn(usize, usize) -> Option<Matrix>) -> Matrix {
        let rows = row_sizes.iter().sum();
        let cols = col_sizes.iter().sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut r0 = 0;
        for (i, &rs) in row_sizes.iter().enumerate() {
            let mut c0 = 0;
            for (j, &cs) in col_sizes.iter().enumerate() {
                if let Some(b) = block(i, j) {
                    assert_eq!((b.rows, b.cols), (rs, cs), "block size mismatch");
                    for r in 0..rs {
                        for c in 0..cs {
                            out[(r0 + r, c0 + c)] = b[(r, c)].clone();
                        }
                    }
                }
                c0 += cs;
            }
            r0 += rs;
        }
        out
    }

    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        Matrix::blocks(&[self.rows, other.rows], &[self.cols, other.cols], |i, j| match (i, j) {
            (0, 0) => Some(self.clone()),
            (1, 1) => Some(other.clone()),
            _ => None,
        })
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = m[(row, col)].recip();
            let support: Vec<usize> = (col..m.cols).filter(|&c| !m[(row, c)].is_zero()).collect();
            for &c in &support {
                m[(row, c)] = &m[(row, c)] * &inv;
            }
            let pivot_row: Vec<(usize, Q)> = support.iter().map(|&c| (c, m[(row, c)].clone())).collect();
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    for (c, x) in &pivot_row {
                        m[(r, *c)] -= &factor * x;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// Basis of the null space, as columns.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::blocks(&[n], &[n, n], |_, j| {
            Some(if j == 0 { self.clone() } else { Matrix::identity(n) })
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Solves `self · x = b`, if solvable.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                b[r].clone()
            }
        });
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = m[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Solves `self · X = B` column by column with a single elimination.
    pub fn solve_many(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows, "dimension mismatch");
        let aug = Matrix::from_fn(self.rows, self.cols + b.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                b[(r, c - self.cols)].clone()
            }
        });
        let (m, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                x[(p, c)] = m[(i, self.cols + c)].clone();
            }
        }
        Some(x)
    }

    pub fn max_abs_entry(&self) -> Q {
        self.data.iter().map(Signed::abs).max().unwrap_or_else(Q::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_kernel_inverse() {
        let m = Matrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(Zero::is_zero));
        let a = Matrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m.inverse().is_none());
        let x = a.solve(&[q(3), q(2)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        let b = Matrix::from_rows(&[vec![3, 2], vec![2, 1]]);
        assert_eq!(a.mul(&a.solve_many(&b).unwrap()), b);
        assert!(m.solve_many(&Matrix::identity(3)).is_none());
    }

    #[test]
    fn kron_and_blocks() {
        let a = Matrix::from_rows(&[vec![1, 2]]);
        let b = Matrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k, Matrix::from_rows(&[vec![1, 0, 2, 0], vec![0, 1, 0, 2]]));
        let s = Matrix::identity(1).direct_sum(&a);
        assert_eq!((s.rows(), s.cols()), (2, 3));
        assert_eq!(Matrix::zeros(0, 3).rank(), 0);
    }
}
