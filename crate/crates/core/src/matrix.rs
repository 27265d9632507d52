//! Dense rational matrices and vector helpers.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rat;

pub type Vector = Vec<Rat>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RatMatrix {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn diagonal(d: &[Rat]) -> RatMatrix {
        let mut m = RatMatrix::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Result<RatMatrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(RatMatrix { rows: nrows, cols, data })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> RatMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let rs = rows.iter().map(|r| r.iter().map(|&v| Rat::from_int(v)).collect()).collect();
        RatMatrix::from_rows(rs, cols).expect("ragged integer rows")
    }

    pub fn from_columns(cols: &[Vector], rows: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ v` without forming the transpose.
    pub fn tr_mul_vec(&self, v: &[Rat]) -> Vector {
        assert_eq!(self.rows, v.len(), "transpose-vector dimensions");
        let mut out = vec![Rat::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += &(a * vi);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum dimensions");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn neg(&self) -> RatMatrix {
        self.scale(&Rat::from_int(-1))
    }

    pub fn quad_form(&self, v: &[Rat]) -> Rat {
        dot(v, &self.mul_vec(v))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        RatMatrix::from_rows(rows, self.cols).expect("row selection")
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn vstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.cols, "vstack widths");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, other.rows, "hstack heights");
        let mut m = RatMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                            m[(i, j)] = v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(i, free)];
            }
            basis.push(v);
        }
        basis
    }

    /// Indices of a maximal linearly independent subset of rows (first-come).
    pub fn independent_rows(&self) -> Vec<usize> {
        self.transpose().rref().1
    }

    /// Basis of the column space, taken from the original pivot columns.
    pub fn column_space(&self) -> Vec<Vector> {
        self.rref().1.into_iter().map(|j| self.column(j)).collect()
    }

    /// Some solution of `self x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vector> {
        assert_eq!(self.rows, b.len(), "right-hand side length");
        let aug = self.hstack(&RatMatrix::from_columns(&[b.to_vec()], self.rows));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Solution of `self x = b` when it exists and is unique.
    pub fn solve_unique(&self, b: &[Rat]) -> Option<Vector> {
        if self.rank() < self.cols {
            return None;
        }
        self.solve(b)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&RatMatrix::identity(n)).rref();
        if (0..n).any(|i| pivots.get(i) != Some(&i)) {
            return None;
        }
        Some(r.select(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
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

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<RatMatrix, D::Error> {
        let rows = Vec::<Vec<Rat>>::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        RatMatrix::from_rows(rows, cols).map_err(serde::de::Error::custom)
    }
}

/// Result of a symmetric pivoted LDLᵀ factorization.
#[derive(Debug, Clone)]
pub struct Ldl {
    pub psd: bool,
    /// Pivot indices with positive diagonal, in elimination order. For a PSD
    /// matrix their principal submatrix is nonsingular of full rank.
    pub pivots: Vec<usize>,
}

/// Symmetric pivoted LDLᵀ in exact arithmetic.
pub fn ldl(m: &RatMatrix) -> Result<Ldl> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.nrows();
    let mut s = m.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    loop {
        if remaining.is_empty() {
            return Ok(Ldl { psd: true, pivots });
        }
        if remaining.iter().any(|&i| s[(i, i)].is_negative()) {
            return Ok(Ldl { psd: false, pivots });
        }
        let Some(&k) = remaining.iter().find(|&&i| s[(i, i)].is_positive()) else {
            // All remaining diagonal entries vanish: PSD only if the block is zero.
            let zero = remaining.iter().all(|&i| remaining.iter().all(|&j| s[(i, j)].is_zero()));
            return Ok(Ldl { psd: zero, pivots });
        };
        remaining.retain(|&i| i != k);
        let d = s[(k, k)].clone();
        for &i in &remaining {
            if s[(i, k)].is_zero() {
                continue;
            }
            let f = &s[(i, k)] / &d;
            for &j in &remaining {
                if !s[(k, j)].is_zero() {
                    let v = &s[(i, j)] - &(&f * &s[(k, j)]);
                    s[(i, j)] = v;
                }
            }
        }
        pivots.push(k);
    }
}

/// Exact positive-semidefiniteness test. Errors on non-symmetric input.
pub fn psd_check(m: &RatMatrix) -> Result<bool> {
    Ok(ldl(m)?.psd)
}

/// Symmetric reflexive generalized inverse of a PSD matrix, built from a
/// maximal nonsingular principal block.
pub fn psd_pseudo_inverse(m: &RatMatrix) -> Result<RatMatrix> {
    let f = ldl(m)?;
    if !f.psd {
        return Err(Error::NotPsd);
    }
    let mut idx = f.pivots;
    idx.sort_unstable();
    let block = m.select(&idx, &idx).inverse().expect("principal pivot block is nonsingular");
    let mut g = RatMatrix::zeros(m.nrows(), m.ncols());
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            g[(i, j)] = block[(a, b)].clone();
        }
    }
    Ok(g)
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot product lengths");
    let mut s = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += &(x * y);
        }
    }
    s
}

pub fn vadd(a: &[Rat], b: &[Rat]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector lengths");
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[Rat], b: &[Rat]) -> Vector {
    assert_eq!(a.len(), b.len(), "vector lengths");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vscale(a: &[Rat], s: &Rat) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn vneg(a: &[Rat]) -> Vector {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Rat::is_zero)
}

pub fn zeros(n: usize) -> Vector {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn norm2_sq(a: &[Rat]) -> Rat {
    dot(a, a)
}

pub fn to_f64_vec(a: &[Rat]) -> Vec<f64> {
    a.iter().map(Rat::to_f64).collect()
}

pub fn ints(v: &[i64]) -> Vector {
    v.iter().map(|&x| Rat::from_int(x)).collect()
}
