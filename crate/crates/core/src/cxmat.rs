//! Dense complex matrices and the handful of spectral routines the rest of
//! the crate is built on.
//!
//! Everything here is a value type: operations take `&Mat` and return new
//! matrices. Hermitian eigenproblems are solved with cyclic complex Jacobi
//! rotations, which is deterministic and accurate for the small (at most a
//! few dozen rows) matrices this crate produces.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Cx = Complex64;

pub const ZERO: Cx = Cx::new(0.0, 0.0);
pub const ONE: Cx = Cx::new(1.0, 0.0);
pub const I: Cx = Cx::new(0.0, 1.0);

/// Tolerance used by axiom checks when the caller does not pick one.
pub const DEFAULT_AXIOM_TOL: f64 = 1e-9;
/// Tolerance used for pure arithmetic identities.
pub const DEFAULT_ARITH_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major complex matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Cx>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        Mat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn scalar(z: Cx) -> Self {
        Mat {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting empty shapes and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cx>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        let m = Mat { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<Cx>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Dimension {
                op: "from_rows",
                left: (r, c),
                right: (1, bad.len()),
            });
        }
        Mat::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Mat::from_vec(rows, cols, data.iter().map(|&x| Cx::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[Cx]) -> Self {
        let mut m = Mat::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Column vector.
    pub fn column(values: &[Cx]) -> Self {
        Mat {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Cx] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            Some(k) => Err(Error::NonFinite {
                row: k / self.cols,
                col: k % self.cols,
            }),
            None => Ok(()),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<Cx>> {
        self.data.chunks(self.cols).map(<[Cx]>::to_vec).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Cx> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> Mat {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Cx) -> Cx) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, z: Cx) -> Mat {
        self.map(|w| w * z)
    }

    pub fn try_mul(&self, rhs: &Mat) -> Result<Mat> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                op: "matmul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Mat, op: &'static str, f: impl Fn(Cx, Cx) -> Cx) -> Result<Mat> {
        if self.shape() != rhs.shape() {
            return Err(Error::Dimension {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Mat) -> Result<Mat> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Mat) -> Result<Mat> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, rhs: &Mat) -> Result<Mat> {
        self.zip_with(rhs, "hadamard", |a, b| a * b)
    }

    pub fn kron(&self, rhs: &Mat) -> Mat {
        let (p, q) = rhs.shape();
        Mat::from_fn(self.rows * p, self.cols * q, |i, j| {
            self[(i / p, j / q)] * rhs[(i % p, j % q)]
        })
    }

    pub fn trace(&self) -> Cx {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of the difference; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Mat) -> f64 {
        if self.shape() != rhs.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    /// Copies `block` into `self` with its top-left corner at (`r0`, `c0`).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Row-major flattening, the coordinate map used for matrix-unit bases.
    pub fn vec(&self) -> Vec<Cx> {
        self.data.clone()
    }

    pub fn unvec(rows: usize, cols: usize, v: &[Cx]) -> Mat {
        assert_eq!(v.len(), rows * cols);
        Mat {
            rows,
            cols,
            data: v.to_vec(),
        }
    }

    /// Matrix unit E_ij of the given shape.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        m[(i, j)] = ONE;
        m
    }

    /// The `rows*cols` matrix units in row-major order.
    pub fn unit_basis(rows: usize, cols: usize) -> Vec<Mat> {
        (0..rows * cols)
            .map(|k| Mat::unit(rows, cols, k / cols, k % cols))
            .collect()
    }

    pub fn hermitian_part(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Cx;
    fn index(&self, (i, j): (usize, usize)) -> &Cx {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matmul shape mismatch")
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.try_add(rhs).expect("add shape mismatch")
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.try_sub(rhs).expect("sub shape mismatch")
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|z| -z)
    }
}

pub fn adjoint(m: &Mat) -> Mat {
    m.adjoint()
}

pub fn transpose(m: &Mat) -> Mat {
    m.transpose()
}

pub fn conjugate(m: &Mat) -> Mat {
    m.conjugate()
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order; `vectors` holds the matching orthonormal eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver. Only the Hermitian part of `m` is used.
pub fn eigh(m: &Mat) -> Result<Eigh> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "eigh",
            rows: m.rows,
            cols: m.cols,
        });
    }
    m.check_finite()?;
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = Mat::identity(n);
    let scale = a.frobenius();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if scale == 0.0 || off_diagonal_norm(&a) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-18 * scale {
                    continue;
                }
                // Phase the pair to a real symmetric 2x2 block, then rotate.
                let phase = (apq / mag).conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // u = [[c, s], [-s*phase, c*phase]] acting on columns p, q.
                let u = [
                    [Cx::new(c, 0.0), Cx::new(s, 0.0)],
                    [phase * -s, phase * c],
                ];
                for k in 0..n {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    a[(k, p)] = x * u[0][0] + y * u[1][0];
                    a[(k, q)] = x * u[0][1] + y * u[1][1];
                }
                for k in 0..n {
                    let x = a[(p, k)];
                    let y = a[(q, k)];
                    a[(p, k)] = u[0][0].conj() * x + u[1][0].conj() * y;
                    a[(q, k)] = u[0][1].conj() * x + u[1][1].conj() * y;
                }
                for k in 0..n {
                    let x = v[(k, p)];
                    let y = v[(k, q)];
                    v[(k, p)] = x * u[0][0] + y * u[1][0];
                    v[(k, q)] = x * u[0][1] + y * u[1][1];
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Cx::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Cx::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Mat::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigh { values, vectors })
}

/// Largest singular value, i.e. the C*-norm of `m` as an operator.
pub fn op_norm(m: &Mat) -> f64 {
    let gram = if m.rows <= m.cols {
        m * &m.adjoint()
    } else {
        &m.adjoint() * m
    };
    let top = eigh(&gram).expect("Gram matrix is square").values[0];
    top.max(0.0).sqrt()
}

pub fn is_psd(m: &Mat, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "is_psd",
            rows: m.rows,
            cols: m.cols,
        });
    }
    let bound = tol * (1.0 + op_norm(m));
    if op_norm(&(m - &m.adjoint())) > bound {
        return Ok(false);
    }
    let min = *eigh(m)?.values.last().expect("non-empty");
    Ok(min >= -bound)
}

/// Result of quotienting a positive semidefinite Gram matrix by its null
/// space.
#[derive(Debug, Clone)]
pub struct GramQuotient {
    pub dim: usize,
    /// Columns `v_k / sqrt(lambda_k)` over the retained eigenpairs, so that
    /// `isometry* . g . isometry = identity(dim)`.
    pub isometry: Mat,
    /// Orthonormal basis of the discarded (null) eigenspace, if any.
    pub null_basis: Option<Mat>,
    pub eigenvalues: Vec<f64>,
}

pub fn gram_quotient(g: &Mat, tol: f64) -> Result<GramQuotient> {
    if !g.is_square() {
        return Err(Error::NotSquare {
            op: "gram_quotient",
            rows: g.rows,
            cols: g.cols,
        });
    }
    let norm = op_norm(g);
    let herm = op_norm(&(g - &g.adjoint()));
    if herm > tol * (1.0 + norm) {
        return Err(Error::NotHermitian { residual: herm });
    }
    let eig = eigh(g)?;
    let top = eig.values[0];
    let min = *eig.values.last().expect("non-empty");
    if min < -tol * (1.0 + top.abs()) {
        return Err(Error::NotPsd { eigenvalue: min });
    }
    if top <= 0.0 {
        return Err(Error::Domain("Gram matrix has no positive eigenvalue".into()));
    }
    let threshold = tol * top;
    let n = g.rows;
    let kept: Vec<usize> = (0..n).filter(|&k| eig.values[k] > threshold).collect();
    let dropped: Vec<usize> = (0..n).filter(|&k| eig.values[k] <= threshold).collect();
    let isometry = Mat::from_fn(n, kept.len(), |i, c| {
        let k = kept[c];
        eig.vectors[(i, k)] / eig.values[k].sqrt()
    });
    let null_basis = (!dropped.is_empty())
        .then(|| Mat::from_fn(n, dropped.len(), |i, c| eig.vectors[(i, dropped[c])]));
    Ok(GramQuotient {
        dim: kept.len(),
        isometry,
        null_basis,
        eigenvalues: eig.values,
    })
}

/// Singular values in descending order, by one-sided Jacobi rotations on
/// the columns of the thinner orientation. Small singular values keep full
/// relative accuracy, unlike square roots of Gram eigenvalues.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    let a = if m.rows >= m.cols { m.clone() } else { m.adjoint() };
    let n = a.cols;
    let mut cols: Vec<Vec<Cx>> = (0..n).map(|j| a.col(j)).collect();
    let sq = |v: &[Cx]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = sq(&cols[p]);
                let beta = sq(&cols[q]);
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*xp, *xq * phase.conj());
                    *xp = x * c - y * s;
                    *xq = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values: Vec<f64> = cols.iter().map(|c| sq(c).sqrt()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Numerical rank: singular values above `tol * sigma_max`.
pub fn rank(m: &Mat, tol: f64) -> usize {
    let values = singular_values(m);
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > tol * top).count()
}

/// Moore–Penrose inverse of a Hermitian matrix, dropping eigenvalues below
/// `tol * |lambda|_max`.
pub fn hermitian_pinv(h: &Mat, tol: f64) -> Result<Mat> {
    let eig = eigh(h)?;
    let top = eig.values.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let n = h.rows;
    let mut out = Mat::zeros(n, n);
    for (k, &l) in eig.values.iter().enumerate() {
        if l.abs() <= tol * top || l == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() / l;
            }
        }
    }
    Ok(out)
}

/// Standard inner product, conjugate-linear in the first slot.
pub fn inner(x: &[Cx], y: &[Cx]) -> Cx {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}
