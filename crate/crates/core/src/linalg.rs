//! Dense complex linear algebra for operators on at most six qubits.
//!
//! Qubit convention: qubit 1 is the most significant bit of a composite
//! index and `|up>` is index 0. Functions taking qubit *positions* are
//! zero-based, so position 0 is qubit 1.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues in `[-CLAMP_TOLERANCE, 0)` are treated as exact zeros.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

const JACOBI_RELATIVE_TOLERANCE: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
const COMPLETION_SKIP_NORM: f64 = 1e-8;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
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
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Column vector from amplitudes.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| columns[c][r]))
    }

    /// `|v><w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |r, c| v[r] * w[c].conj())
    }

    /// `|v><v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
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

    pub fn col(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M^dagger|` entrywise; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `Tr(A^dagger B)`.
    pub fn inner(&self, other: &Self) -> C64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<v|M|w>`.
    pub fn expectation(&self, v: &[C64], w: &[C64]) -> C64 {
        let mw = self.mul_vec(w);
        v.iter().zip(&mw).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * m * self^dagger`.
    pub fn sandwich(&self, m: &Self) -> Self {
        self.matmul(m).matmul(&self.adjoint())
    }

    /// `max |self - other|` entrywise.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Replaces the matrix by `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    fn check_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Validates the density-operator invariants: Hermitian to 1e-12, unit
    /// trace to 1e-12 and no eigenvalue below `-CLAMP_TOLERANCE`.
    pub fn check_density(&self) -> Result<()> {
        self.check_square()?;
        let defect = self.hermiticity_defect();
        if defect > 1e-12 {
            return Err(Error::NotDensity(format!("hermiticity defect {defect:e}")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > 1e-12 {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let eig = herm_eig(self)?;
        let min = eig.min();
        if min < -CLAMP_TOLERANCE {
            return Err(Error::NotDensity(format!("min eigenvalue {min:e}")));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
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
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl std::iter::Sum for ComplexMatrix {
    fn sum<It: Iterator<Item = Self>>(mut iter: It) -> Self {
        let first = iter.next().expect("sum of an empty matrix iterator");
        iter.fold(first, |acc, m| &acc + &m)
    }
}

/// Tensor product; `a` acts on the more significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut it = factors.iter();
    let first = (*it.next().expect("kron of no factors")).clone();
    it.fold(first, |acc, m| kron(&acc, m))
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Number of qubits of a square `2^n`-dimensional operator.
pub fn qubit_count(m: &ComplexMatrix) -> Result<usize> {
    let n = m.check_square()?;
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

fn normalize_positions(positions: &[usize], qubits: usize) -> Result<Vec<usize>> {
    let mut p = positions.to_vec();
    p.sort_unstable();
    if p.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSelection(format!(
            "duplicate qubit positions in {positions:?}"
        )));
    }
    if let Some(&bad) = p.iter().find(|&&q| q >= qubits) {
        return Err(Error::QubitOutOfRange {
            position: bad,
            qubits,
        });
    }
    Ok(p)
}

/// Bit mask of a zero-based qubit position in an `n`-qubit index.
#[inline]
fn bit(position: usize, qubits: usize) -> usize {
    1 << (qubits - 1 - position)
}

/// Spreads the bits of `value` over the given qubit positions (most
/// significant position first).
fn scatter(value: usize, positions: &[usize], qubits: usize) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(0, |acc, (i, &p)| {
        if value & (1 << (k - 1 - i)) != 0 {
            acc | bit(p, qubits)
        } else {
            acc
        }
    })
}

/// Reduced operator on the kept qubit positions (zero-based, any order;
/// the result orders them ascending).
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let n = qubit_count(m)?;
    let keep = normalize_positions(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kd = 1 << keep.len();
    let td = 1 << traced.len();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for a in 0..kd {
        let ia = scatter(a, &keep, n);
        for b in 0..kd {
            let ib = scatter(b, &keep, n);
            let mut acc = ZERO;
            for t in 0..td {
                let it = scatter(t, &traced, n);
                acc += m[(ia | it, ib | it)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the tensor factor formed by the given qubit positions.
pub fn partial_transpose(m: &ComplexMatrix, positions: &[usize]) -> Result<ComplexMatrix> {
    let n = qubit_count(m)?;
    let positions = normalize_positions(positions, n)?;
    let mask = positions.iter().fold(0, |acc, &p| acc | bit(p, n));
    let dim = m.rows;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let r2 = (r & !mask) | (c & mask);
            let c2 = (c & !mask) | (r & mask);
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermEigen {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V f(diag(lambda)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * v[(c, k)].conj() * fl[k]).sum()
        })
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver for Hermitian input.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEigen> {
    let n = m.check_square()?;
    let defect = m.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian { defect });
    }
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = JACOBI_RELATIVE_TOLERANCE * scale;

    let mut converged = scale == 0.0 || off_diagonal_norm(&a) < target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) < target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermEigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows;

    // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane.
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Clamps eigenvalue dust in `[-CLAMP_TOLERANCE, 0)` to zero.
pub fn clamp_eigenvalue(l: f64) -> Result<f64> {
    if l < -CLAMP_TOLERANCE {
        Err(Error::NotPositive { min_eigenvalue: l })
    } else {
        Ok(l.max(0.0))
    }
}

/// Hermitian square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    clamp_eigenvalue(eig.min())?;
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// `max |V^dagger V - 1|` entrywise.
pub fn isometry_residual(v: &ComplexMatrix) -> f64 {
    v.adjoint()
        .matmul(v)
        .max_diff(&ComplexMatrix::identity(v.cols))
}

/// Extends orthonormal columns to a unitary whose leading columns are the
/// input columns, unchanged. Candidates are the canonical basis vectors in
/// order, orthogonalized by two passes of modified Gram-Schmidt.
pub fn complete_isometry(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, k) = (v.rows, v.cols);
    if k > n {
        return Err(Error::DimensionMismatch(format!(
            "{k} columns cannot be orthonormal in dimension {n}"
        )));
    }
    let residual = isometry_residual(v);
    if residual > 1e-10 {
        return Err(Error::NotIsometry { residual });
    }
    let mut basis: Vec<Vec<C64>> = (0..k).map(|c| v.col(c)).collect();
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut w = vec![ZERO; n];
        w[e] = ONE;
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < COMPLETION_SKIP_NORM {
            continue;
        }
        basis.push(w.into_iter().map(|z| z / norm).collect());
    }
    if basis.len() != n {
        return Err(Error::NotIsometry { residual });
    }
    ComplexMatrix::from_columns(&basis)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, -ONE]).unwrap()
}

/// Computational basis vector `|index>` of dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    u.adjoint()
        .matmul(u)
        .distance(&ComplexMatrix::identity(u.cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(seed: &[f64], n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |r, k| {
            let i = 2 * (r * n + k);
            c(seed[i % seed.len()], seed[(i + 1) % seed.len()])
        })
    }

    fn random_hermitian(seed: &[f64], n: usize) -> ComplexMatrix {
        let x = random_matrix(seed, n);
        (&x + &x.adjoint()).scale_real(0.5)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let yy = kron(&pauli_y(), &pauli_y());
        assert!(yy.matmul(&yy).max_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn kron_places_first_factor_leftmost() {
        let p0 = ComplexMatrix::projector(&basis_vector(2, 0));
        let p1 = ComplexMatrix::projector(&basis_vector(2, 1));
        let p = kron(&p0, &p1);
        let expected = ComplexMatrix::projector(&basis_vector(4, 1));
        assert_eq!(p, expected);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(0.7, 0.), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.)],
        )
        .unwrap();
        let sigma =
            ComplexMatrix::from_vec(2, 2, vec![c(2.0, 0.), c(0.5, 0.), c(0.5, 0.), c(1.0, 0.)])
                .unwrap();
        let prod = kron(&rho, &sigma);
        let reduced = partial_trace(&prod, &[0]).unwrap();
        assert!(reduced.max_diff(&rho.scale_real(3.0)) < 1e-15);
        let other = partial_trace(&prod, &[1]).unwrap();
        assert!(other.max_diff(&sigma) < 1e-15);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(s, 0.), ZERO, ZERO, c(s, 0.)];
        let rho = ComplexMatrix::projector(&phi);
        let red = partial_trace(&rho, &[0]).unwrap();
        assert!(red.max_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_positions() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2]),
            Err(Error::QubitOutOfRange {
                position: 2,
                qubits: 2
            })
        ));
        assert!(partial_trace(&m, &[0, 0]).is_err());
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(3), &[0]),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn partial_transpose_product_and_involution() {
        let seed = [
            0.3, -0.2, 0.9, 0.1, -0.5, 0.7, 0.2, 0.4, -0.8, 0.6, 0.05, -0.33,
        ];
        let a = random_matrix(&seed, 4);
        let b = random_matrix(&seed[3..], 4);
        let m = kron(&a, &b);
        let pt = partial_transpose(&m, &[2, 3]).unwrap();
        assert!(pt.max_diff(&kron(&a, &b.transpose())) < 1e-15);
        assert_eq!(partial_transpose(&pt, &[2, 3]).unwrap(), m);
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(s, 0.), ZERO, ZERO, c(s, 0.)];
        let pt = partial_transpose(&ComplexMatrix::projector(&phi), &[1]).unwrap();
        let eig = herm_eig(&pt).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (l, e) in eig.values.iter().zip(expected) {
            assert!((l - e).abs() < 1e-14, "{:?}", eig.values);
        }
    }

    #[test]
    fn eig_of_diagonal_and_pauli() {
        let d = ComplexMatrix::real_diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(herm_eig(&d).unwrap().values, vec![3.0, 2.0, 1.0]);
        let y = herm_eig(&pauli_y()).unwrap();
        assert!((y.values[0] - 1.0).abs() < 1e-15);
        assert!((y.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_residual_degenerate() {
        // Degenerate spectrum with complex couplings.
        let p = ComplexMatrix::projector(&[c(0.5, 0.), c(0.0, 0.5), c(0.5, 0.), c(-0.5, 0.)]);
        let m = &p.scale_real(2.0) + &ComplexMatrix::identity(4);
        let eig = herm_eig(&m).unwrap();
        let lam = ComplexMatrix::real_diagonal(&eig.values);
        let res = m.matmul(&eig.vectors).distance(&eig.vectors.matmul(&lam));
        assert!(res <= 1e-10 * m.frobenius_norm());
        assert!((eig.values[0] - 3.0).abs() < 1e-14);
        assert!((eig.values[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psd_sqrt_cases() {
        let i4 = ComplexMatrix::identity(4);
        assert!(psd_sqrt(&i4).unwrap().max_diff(&i4) < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = ComplexMatrix::projector(&[c(s, 0.), ZERO, c(0., s), ZERO]);
        assert!(
            psd_sqrt(&p.scale_real(4.0))
                .unwrap()
                .max_diff(&p.scale_real(2.0))
                < 1e-14
        );
        assert!(psd_sqrt(&p).unwrap().max_diff(&p) < 1e-14);
        let neg = ComplexMatrix::real_diagonal(&[1.0, -1e-3]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPositive { .. })));
        let dust = ComplexMatrix::real_diagonal(&[1.0, -1e-12]);
        assert!(psd_sqrt(&dust).is_ok());
    }

    #[test]
    fn completion_of_canonical_columns() {
        let v = ComplexMatrix::from_fn(64, 4, |r, k| if r == k { ONE } else { ZERO });
        let u = complete_isometry(&v).unwrap();
        assert!(unitarity_residual(&u) < 1e-12);
        for k in 0..4 {
            assert_eq!(u.col(k), v.col(k));
        }
    }

    #[test]
    fn completion_rejects_non_orthonormal() {
        let v = ComplexMatrix::from_fn(4, 2, |_, _| ONE);
        assert!(matches!(
            complete_isometry(&v),
            Err(Error::NotIsometry { .. })
        ));
    }

    fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, 2 * n * n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn kron_trace_factorizes(a in entries(4), b in entries(4)) {
            let a = random_matrix(&a, 4);
            let b = random_matrix(&b, 4);
            let lhs = kron(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn eigenvalue_sum_is_trace(seed in entries(16)) {
            let m = random_hermitian(&seed, 16);
            let eig = herm_eig(&m).unwrap();
            let sum: f64 = eig.values.iter().sum();
            prop_assert!((sum - m.trace().re).abs() < 1e-10);
            prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
            let lam = ComplexMatrix::real_diagonal(&eig.values);
            let res = m.matmul(&eig.vectors).distance(&eig.vectors.matmul(&lam));
            prop_assert!(res <= 1e-10 * m.frobenius_norm());
        }

        #[test]
        fn sqrt_squares_back(seed in entries(8)) {
            let x = random_matrix(&seed, 8);
            let m = x.adjoint().matmul(&x);
            let r = psd_sqrt(&m).unwrap();
            prop_assert!(r.matmul(&r).distance(&m) < 1e-9);
            prop_assert!(r.is_hermitian(1e-12));
        }

        #[test]
        fn transpose_does_not_change_kept_marginal(seed in entries(16)) {
            let m = random_hermitian(&seed, 16);
            let direct = partial_trace(&m, &[0, 1]).unwrap();
            let via = partial_trace(&partial_transpose(&m, &[2, 3]).unwrap(), &[0, 1]).unwrap();
            prop_assert!(direct.max_diff(&via) < 1e-14);
        }

        #[test]
        fn completion_is_unitary(seed in entries(8)) {
            // Orthonormalize four random 8-vectors, embed them in 64 dims.
            let x = random_matrix(&seed, 8);
            let mut cols: Vec<Vec<C64>> = Vec::new();
            for k in 0..4 {
                let mut w: Vec<C64> = x.col(k);
                w.resize(64, ZERO);
                for b in &cols {
                    let p: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    for (wi, bi) in w.iter_mut().zip(b) { *wi -= p * bi; }
                }
                let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                prop_assume!(nrm > 1e-3);
                cols.push(w.into_iter().map(|z| z / nrm).collect());
            }
            let v = ComplexMatrix::from_columns(&cols).unwrap();
            let u = complete_isometry(&v).unwrap();
            prop_assert!(unitarity_residual(&u) <= 1e-9);
            for k in 0..4 { prop_assert_eq!(u.col(k), v.col(k)); }
        }
    }
}
