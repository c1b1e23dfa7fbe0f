// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra.
//!
//! Everything here works on matrices of dimension at most a few dozen, so the
//! algorithms favour simplicity over asymptotic speed: cyclic Jacobi for the
//! Hermitian eigenproblem, Gauss-Jordan for inverses and Newton's iteration
//! for the unitary polar factor.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{DaptError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(DaptError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(DaptError::Shape("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector]) -> Result<Self> {
        let rows = columns.first().map_or(0, CVector::dim);
        if columns.iter().any(|c| c.dim() != rows) {
            return Err(DaptError::Shape("columns of unequal length".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        self.map(|z| z * k)
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.map(|z| z * k)
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row(&self, i: usize) -> CVector {
        CVector::from_vec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn set_column(&mut self, j: usize, v: &CVector) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Copy of the rectangular block starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Embeds `self` in the top-left corner of a `rows x cols` zero matrix.
    pub fn padded(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)]
            } else {
                ZERO
            }
        })
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "mul_vec shape mismatch");
        CVector::from_vec(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(v.iter())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sum of all entry moduli.
    pub fn abs_sum(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).sum()
    }

    /// `max |A - A^dagger|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// `max |A^dagger A - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Self::identity(self.cols)).max_abs()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(DaptError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .unwrap();
            let pv = a[(pivot, col)];
            if pv.norm() <= 1e-14 * scale {
                return Err(DaptError::Singular {
                    sigma_min: pv.norm(),
                });
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let r = ONE / pv;
            for j in 0..n {
                a[(col, j)] *= r;
                inv[(col, j)] *= r;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let (aj, ij) = (a[(col, j)], inv[(col, j)]);
                    a[(i, j)] -= f * aj;
                    inv[(i, j)] -= f * ij;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.cols {
            self.data.swap(r1 * self.cols + j, r2 * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

macro_rules! elementwise {
    ($ty:ident, $trait:ident, $method:ident, $op:tt) => {
        impl $trait<&$ty> for &$ty {
            type Output = $ty;
            // `$op=` is not a token the macro can build, so the fix-it would pick one operator for all.
            #[allow(clippy::assign_op_pattern)]
            fn $method(self, rhs: &$ty) -> $ty {
                assert_eq!(self.data.len(), rhs.data.len(), "shape mismatch");
                let mut out = self.clone();
                for (o, &r) in out.data.iter_mut().zip(&rhs.data) {
                    *o = *o $op r;
                }
                out
            }
        }
        impl $trait<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                &self $op &rhs
            }
        }
    };
}

elementwise!(CMatrix, Add, add, +);
elementwise!(CMatrix, Sub, sub, -);

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.data.len(), rhs.data.len(), "shape mismatch");
        for (o, &r) in self.data.iter_mut().zip(&rhs.data) {
            *o += r;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.data.len(), rhs.data.len(), "shape mismatch");
        for (o, &r) in self.data.iter_mut().zip(&rhs.data) {
            *o -= r;
        }
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Mul<CMatrix> for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        self.matmul(&rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

/// Dense complex column vector.
#[derive(Clone, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![ZERO; dim],
        }
    }

    pub fn from_vec(data: Vec<C64>) -> Self {
        Self { data }
    }

    /// Unit vector along axis `k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.data.iter()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// `<self|other>`, conjugating the left argument.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "dot shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    /// Returns the vector divided by its norm; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(C64::from(1.0 / n))
        }
    }

    pub fn axpy(&mut self, a: C64, x: &Self) {
        assert_eq!(self.dim(), x.dim(), "axpy shape mismatch");
        for (y, &xi) in self.data.iter_mut().zip(&x.data) {
            *y += a * xi;
        }
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

impl fmt::Debug for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.data.iter().map(|z| (z.re, z.im)))
            .finish()
    }
}

elementwise!(CVector, Add, add, +);
elementwise!(CVector, Sub, sub, -);

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const HERMITIAN_TOL: f64 = 1e-12;
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(a: &CMatrix) -> Result<Eigh> {
    if !a.is_square() {
        return Err(DaptError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let scale = a.max_abs();
    let defect = a.hermiticity_defect();
    let allowed = HERMITIAN_TOL * scale;
    if defect > allowed {
        return Err(DaptError::NotHermitian { defect, allowed });
    }
    let n = a.rows;
    // Symmetrize so rounding in the input cannot bias the rotations.
    let mut m = CMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let mut v = CMatrix::identity(n);
    let target = JACOBI_TOL * m.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..m.rows {
        for j in 0..m.cols {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p,q]` with a unitary rotation in the (p, q) plane.
fn jacobi_rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    // A phase on q makes the pivot real; then an ordinary real rotation finishes it.
    let phase = apq / mag;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let gpp = C64::from(c);
    let gpq = C64::from(s);
    let gqp = -s * phase.conj();
    let gqq = c * phase.conj();

    let n = m.rows;
    for k in 0..n {
        let (xp, xq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = xp * gpp + xq * gqp;
        m[(k, q)] = xp * gpq + xq * gqq;
    }
    for k in 0..n {
        let (xp, xq) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = gpp.conj() * xp + gqp.conj() * xq;
        m[(q, k)] = gpq.conj() * xp + gqq.conj() * xq;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::from(m[(p, p)].re);
    m[(q, q)] = C64::from(m[(q, q)].re);
    for k in 0..n {
        let (xp, xq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = xp * gpp + xq * gqp;
        v[(k, q)] = xp * gpq + xq * gqq;
    }
}

const POLAR_TOL: f64 = 1e-13;
const POLAR_MAX_ITER: usize = 50;
const SINGULAR_TOL: f64 = 1e-12;

/// Unitary factor of the polar decomposition, by Newton's iteration.
pub fn nearest_unitary(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(DaptError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let sigma_min = smallest_singular_value(a)?;
    if sigma_min <= SINGULAR_TOL {
        return Err(DaptError::Singular { sigma_min });
    }
    let mut x = a.clone();
    for it in 0..POLAR_MAX_ITER {
        let xinv = x.inverse()?;
        // Frobenius-norm scaling speeds up the early iterations; it is dropped
        // once the iterate is close to unitary so the final steps are pure Newton.
        let gamma = if it < 8 && x.unitarity_defect() > 1e-2 {
            (xinv.frobenius_norm() / x.frobenius_norm()).sqrt()
        } else {
            1.0
        };
        let next = (&x.scale_re(gamma) + &xinv.adjoint().scale_re(1.0 / gamma)).scale_re(0.5);
        let change = (&next - &x).frobenius_norm();
        x = next;
        if change <= POLAR_TOL * x.frobenius_norm().max(1.0) {
            break;
        }
    }
    Ok(x)
}

fn smallest_singular_value(a: &CMatrix) -> Result<f64> {
    let gram = a.adjoint().matmul(a);
    let e = eigh(&gram)?;
    Ok(e.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Maximum absolute column sum.
pub fn norm_col1(a: &CMatrix) -> f64 {
    (0..a.cols)
        .map(|j| (0..a.rows).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Uniform grid `start + i * step`, `i = 0..=n_steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub end: f64,
    pub n_steps: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 || !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(DaptError::InvalidArgument(format!(
                "grid [{start}, {end}] with {n_steps} steps"
            )));
        }
        Ok(Self {
            start,
            end,
            n_steps,
        })
    }

    pub fn unit(n_steps: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n_steps)
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / self.n_steps as f64
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.end
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Values that can be integrated and differentiated on a grid.
pub trait GridValue: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, k: f64, other: &Self);
}

impl GridValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, k: f64, other: &Self) {
        *self += k * other;
    }
}

impl GridValue for C64 {
    fn zero_like(&self) -> Self {
        ZERO
    }
    fn add_scaled(&mut self, k: f64, other: &Self) {
        *self += k * other;
    }
}

impl GridValue for CMatrix {
    fn zero_like(&self) -> Self {
        CMatrix::zeros(self.rows, self.cols)
    }
    fn add_scaled(&mut self, k: f64, other: &Self) {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        for (o, &r) in self.data.iter_mut().zip(&other.data) {
            *o += k * r;
        }
    }
}

impl GridValue for CVector {
    fn zero_like(&self) -> Self {
        CVector::zeros(self.dim())
    }
    fn add_scaled(&mut self, k: f64, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "shape mismatch");
        for (o, &r) in self.data.iter_mut().zip(&other.data) {
            *o += k * r;
        }
    }
}

/// Running trapezoid integral; the first entry is zero.
pub fn cumulative_trapezoid<T: GridValue>(samples: &[T], step: f64) -> Result<Vec<T>> {
    if samples.len() < 2 {
        return Err(DaptError::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = samples[0].zero_like();
    out.push(acc.clone());
    for w in samples.windows(2) {
        acc.add_scaled(0.5 * step, &w[0]);
        acc.add_scaled(0.5 * step, &w[1]);
        out.push(acc.clone());
    }
    Ok(out)
}

/// Second-order finite-difference derivative: central inside, one-sided at the ends.
pub fn grid_derivative<T: GridValue>(samples: &[T], step: f64) -> Result<Vec<T>> {
    let n = samples.len();
    if n < 3 {
        return Err(DaptError::TooFewSamples { needed: 3, got: n });
    }
    let h = 1.0 / step;
    let mut out = Vec::with_capacity(n);
    let mut d = samples[0].zero_like();
    d.add_scaled(-1.5 * h, &samples[0]);
    d.add_scaled(2.0 * h, &samples[1]);
    d.add_scaled(-0.5 * h, &samples[2]);
    out.push(d);
    for i in 1..n - 1 {
        let mut d = samples[i].zero_like();
        d.add_scaled(0.5 * h, &samples[i + 1]);
        d.add_scaled(-0.5 * h, &samples[i - 1]);
        out.push(d);
    }
    let mut d = samples[n - 1].zero_like();
    d.add_scaled(1.5 * h, &samples[n - 1]);
    d.add_scaled(-2.0 * h, &samples[n - 2]);
    d.add_scaled(0.5 * h, &samples[n - 3]);
    out.push(d);
    Ok(out)
}

/// One classic Runge-Kutta step of `y' = f(s, y)`.
pub fn rk4_step<T: GridValue>(f: &impl Fn(f64, &T) -> T, s: f64, y: &T, h: f64) -> T {
    let k1 = f(s, y);
    let mut y2 = y.clone();
    y2.add_scaled(0.5 * h, &k1);
    let k2 = f(s + 0.5 * h, &y2);
    let mut y3 = y.clone();
    y3.add_scaled(0.5 * h, &k2);
    let k3 = f(s + 0.5 * h, &y3);
    let mut y4 = y.clone();
    y4.add_scaled(h, &k3);
    let k4 = f(s + h, &y4);
    let mut out = y.clone();
    out.add_scaled(h / 6.0, &k1);
    out.add_scaled(h / 3.0, &k2);
    out.add_scaled(h / 3.0, &k3);
    out.add_scaled(h / 6.0, &k4);
    out
}

/// Fixed-step RK4 trajectory on `grid`, including the initial state.
pub fn ode_rk4<T: GridValue>(f: impl Fn(f64, &T) -> T, y0: T, grid: &UniformGrid) -> Vec<T> {
    let h = grid.step();
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    for i in 0..grid.n_steps {
        let next = rk4_step(&f, grid.point(i), &out[i], h);
        out.push(next);
    }
    out
}
