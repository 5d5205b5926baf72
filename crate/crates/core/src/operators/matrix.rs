//! Dense complex matrices in row-major order.
//!
//! This is the substrate every other module builds on: Kronecker products,
//! partial traces, Hilbert-Schmidt inner products, and the usual arithmetic.
//! Dimensions stay small (≤ 64) by design, so everything is a plain dense
//! `Vec<Complex64>` with no sparsity or blocking.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zeros matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a row-major entry vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::shape("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix with the given real diagonal.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Matrix unit |r⟩⟨c| of the given square dimension.
    pub fn matrix_unit(dim: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.set(r, c, Complex64::new(1.0, 0.0));
        m
    }

    /// Outer product |u⟩⟨v| (v is conjugated).
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
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
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert-Schmidt inner product ⟨A,B⟩ = tr(A†B).
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute deviation from the conjugate transpose.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// (A + A†)/2.
    pub fn symmetrize(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    /// Kronecker product. The left factor carries the slow (most significant)
    /// index: `(A ⊗ B)[(i1,i2),(j1,j2)] = A[i1,j1]·B[i2,j2]` with row index
    /// `i1·rows(B) + i2`.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.set(
                            i1 * other.rows + i2,
                            j1 * other.cols + j2,
                            a * other.get(i2, j2),
                        );
                    }
                }
            }
        }
        out
    }

    /// Trace out one tensor factor of a square matrix on a bipartite space
    /// with dimensions `dims = (d1, d2)` (left factor slow). `keep = 0`
    /// retains the left factor, `keep = 1` the right.
    pub fn partial_trace(&self, dims: (usize, usize), keep: usize) -> Result<Self> {
        let (d1, d2) = dims;
        if !self.is_square() || self.rows != d1 * d2 {
            return Err(Error::shape(format!(
                "partial trace expects a {}x{} matrix for dims ({}, {}), got {}x{}",
                d1 * d2,
                d1 * d2,
                d1,
                d2,
                self.rows,
                self.cols
            )));
        }
        match keep {
            0 => {
                let mut out = Self::zeros(d1, d1);
                for i in 0..d1 {
                    for j in 0..d1 {
                        let mut s = Complex64::new(0.0, 0.0);
                        for t in 0..d2 {
                            s += self.get(i * d2 + t, j * d2 + t);
                        }
                        out.set(i, j, s);
                    }
                }
                Ok(out)
            }
            1 => {
                let mut out = Self::zeros(d2, d2);
                for i in 0..d2 {
                    for j in 0..d2 {
                        let mut s = Complex64::new(0.0, 0.0);
                        for t in 0..d1 {
                            s += self.get(t * d2 + i, t * d2 + j);
                        }
                        out.set(i, j, s);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::shape("keep index must be 0 or 1")),
        }
    }

    /// Largest entry magnitude of the difference, for tolerance checks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }
}

// Wire format: row-major nested arrays of [re, im] pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let nested: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| [self.get(r, c).re, self.get(r, c).im]).collect())
            .collect();
        nested.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let nested: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows = nested.len();
        if rows == 0 {
            return Err(D::Error::custom("matrix must have at least one row"));
        }
        let cols = nested[0].len();
        if cols == 0 {
            return Err(D::Error::custom("matrix must have at least one column"));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for row in &nested {
            if row.len() != cols {
                return Err(D::Error::custom("ragged matrix rows"));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err(D::Error::custom("matrix entries must be finite"));
                }
                data.push(Complex64::new(re, im));
            }
        }
        Ok(ComplexMatrix { rows, cols, data })
    }
}
