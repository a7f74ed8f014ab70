//! Dense complex linear algebra on small matrices.
//!
//! Everything downstream works with `CMatrix` (a dynamically sized
//! `nalgebra` matrix of `Complex64`). Dimensions never exceed 24 here, so
//! all routines favour robustness over speed.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Default tolerance of [`matrix_exp`].
pub const EXP_TOL: f64 = 1e-12;
/// Eigenvalue floor applied by [`matrix_log_psd`].
pub const EIGEN_FLOOR: f64 = 1e-15;

const MAX_TAYLOR_TERMS: usize = 60;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `|i><j|` in an `n`-dimensional space.
pub fn ket_bra(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    let n = diag.len();
    CMatrix::from_fn(
        n,
        n,
        |i, j| if i == j { c(diag[i], 0.0) } else { c(0.0, 0.0) },
    )
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Largest entry modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Maximum absolute row sum.
pub fn inf_norm(a: &CMatrix) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

fn ensure_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    ensure_square(a)?;
    let deviation = hermiticity_deviation(a);
    if deviation > 1e-12 * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Kronecker product, with `a` as the slow (outer) index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    factors.iter().fold(identity(1), |acc, f| kron(&acc, f))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    ensure_hermitian(a)?;
    let eig = SymmetricEigen::new(hermitian_part(a));
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (values, vectors) = eigh(a)?;
    let mapped: Vec<f64> = values.into_iter().map(f).collect();
    Ok(&vectors * from_real_diagonal(&mapped) * vectors.adjoint())
}

/// Matrix exponential by scaling and squaring around a Taylor kernel.
///
/// The input is scaled by `2^-s` until its 1-norm is at most 1/2, the series
/// is summed until the next term drops below the scaled tolerance, and the
/// result is squared `s` times.
pub fn matrix_exp(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    ensure_square(a)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * c(scale, 0.0);
    let term_tol = (1e-3 * tol * scale).max(1e-300);

    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = (&term * &x) * c(1.0 / k as f64, 0.0);
        sum += &term;
        if max_abs(&term) <= term_tol.max(f64::EPSILON * 1e-3 * max_abs(&sum)) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Logarithm of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues below `eigen_floor` are raised to it before the logarithm.
pub fn matrix_log_psd(a: &CMatrix, eigen_floor: f64) -> Result<CMatrix> {
    hermitian_function(a, |x| x.max(eigen_floor).ln())
}

/// Solves `a x = 0` subject to `constraint_row · x = 1`.
///
/// The left singular vector of the smallest singular value identifies the
/// linear dependency among the rows of `a`; the row carrying the largest
/// weight in it is the most redundant one and is replaced by the constraint.
/// Returns an `n x 1` column.
pub fn null_vector(a: &CMatrix, constraint_row: &CMatrix) -> Result<CMatrix> {
    ensure_square(a)?;
    let n = a.nrows();
    if constraint_row.nrows() != 1 || constraint_row.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "constraint row must be 1x{n}, got {}x{}",
            constraint_row.nrows(),
            constraint_row.ncols()
        )));
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let sigma = &svd.singular_values;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[i].total_cmp(&sigma[j]));
    let sigma_max = sigma[order[n - 1]];
    let kernel_tol = 1e-12 * sigma_max.max(f64::MIN_POSITIVE);
    let dimension = order.iter().filter(|&&k| sigma[k] <= kernel_tol).count();
    if dimension > 1 {
        return Err(Error::DegenerateKernel { dimension });
    }

    let left = u.column(order[0]);
    let redundant = (0..n)
        .max_by(|&i, &j| left[i].norm().total_cmp(&left[j].norm()))
        .expect("non-empty matrix");

    let mut system = a.clone();
    system.set_row(redundant, &constraint_row.row(0));
    let mut rhs = CMatrix::zeros(n, 1);
    rhs[(redundant, 0)] = c(1.0, 0.0);
    let x = system.lu().solve(&rhs).ok_or(Error::SingularConstraint)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularConstraint);
    }
    Ok(x)
}
