//! Dense complex linear algebra on small composite systems.
//!
//! Composite indices are row-major with the first subsystem most significant:
//! for a bipartite space `A ⊗ B` the basis vector `|a⟩|b⟩` sits at index
//! `a * d_b + b`. Every routine in the crate (tensor products, partial traces,
//! embeddings of measurement effects) uses this one convention.
//!
//! Matrix functions are evaluated through a Hermitian eigendecomposition.
//! Eigenvalues at or below `rank_tol * max|λ|` are treated as zero and mapped
//! to zero, so negative powers act as pseudo-inverses on the support.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

/// Relative eigenvalue cutoff used when callers have no reason to pick another.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Which half of a bipartite system a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `U f(Λ) U†` with `f` applied eigenvalue-wise.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Kronecker product; row index of the result is `i_a * rows_b + i_b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &StateVector, b: &StateVector) -> StateVector {
    a.kronecker(b)
}

/// `|v⟩⟨v|`.
pub fn projector(v: &StateVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs_entry(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_entry(&(m - m.adjoint())) <= tol
}

/// Trace over one half of a `dim_a * dim_b` square operator.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension(format!(
            "partial trace over ({dim_a}, {dim_b}) needs a {n}x{n} operator, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    };
    Ok(out)
}

/// Reduce a multipartite operator to the subsystems listed in `keep`
/// (ascending indices into `dims`), tracing out all others.
pub fn partial_trace_multi(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let n: usize = dims.iter().product();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, subsystem dims {:?} multiply to {n}",
            m.nrows(),
            m.ncols(),
            dims
        )));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "kept subsystems {:?} must be ascending indices below {}",
            keep,
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let n_keep: usize = kept_dims.iter().product();
    let n_trace: usize = traced_dims.iter().product();

    // place kept digits and traced digits back into a full composite index
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut rest = kept_idx;
        for (pos, &sys) in keep.iter().enumerate().rev() {
            digits[sys] = rest % kept_dims[pos];
            rest /= kept_dims[pos];
        }
        let mut rest = traced_idx;
        for (pos, &sys) in traced.iter().enumerate().rev() {
            digits[sys] = rest % traced_dims[pos];
            rest /= traced_dims[pos];
        }
        digits
            .iter()
            .zip(dims)
            .fold(0usize, |acc, (&digit, &dim)| acc * dim + digit)
    };

    let index: Vec<Vec<usize>> = (0..n_keep)
        .map(|i| (0..n_trace).map(|t| compose(i, t)).collect())
        .collect();
    Ok(ComplexMatrix::from_fn(n_keep, n_keep, |i, j| {
        (0..n_trace).map(|t| m[(index[i][t], index[j][t])]).sum()
    }))
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigendecomposition of a matrix that must be positive semidefinite up to
/// `rank_tol`; also returns the absolute support threshold.
pub fn eigh_psd(m: &ComplexMatrix, rank_tol: f64) -> Result<(EigenDecomposition, f64)> {
    let eig = eigh(m)?;
    let threshold = rank_tol * eig.max_abs_eigenvalue();
    if let Some(&low) = eig.eigenvalues.first() {
        if low < -threshold {
            return Err(Error::NotPositive {
                eigenvalue: low,
                floor: -threshold,
            });
        }
    }
    Ok((eig, threshold))
}

/// `m^exponent` on the support of `m`; zero on its kernel.
pub fn func_on_support(m: &ComplexMatrix, exponent: f64, rank_tol: f64) -> Result<ComplexMatrix> {
    let (eig, threshold) = eigh_psd(m, rank_tol)?;
    Ok(eig.map(|lam| {
        if lam > threshold {
            lam.powf(exponent)
        } else {
            0.0
        }
    }))
}

/// Orthogonal projector onto the eigenspaces with eigenvalue above `rank_tol * λ_max`.
pub fn support_projector(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let (eig, threshold) = eigh_psd(m, rank_tol)?;
    Ok(eig.map(|lam| if lam > threshold { 1.0 } else { 0.0 }))
}

/// Number of eigenvalues above `rank_tol * λ_max`.
pub fn numerical_rank(m: &ComplexMatrix, rank_tol: f64) -> Result<usize> {
    let (eig, threshold) = eigh_psd(m, rank_tol)?;
    Ok(eig.eigenvalues.iter().filter(|&&l| l > threshold).count())
}

/// The swap `F = Σ_{s,t} |t⟩⟨s| ⊗ |s⟩⟨t|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = c(1.0, 0.0);
        }
    }
    f
}

/// Fidelity of `sigma` with the pure target `psi`, i.e. `⟨ψ|σ|ψ⟩`.
pub fn pure_target_fidelity(psi: &StateVector, sigma: &ComplexMatrix) -> f64 {
    (psi.adjoint() * sigma * psi)[(0, 0)].re
}

/// `(1/√d) Σ_j |j⟩|j⟩`.
pub fn max_entangled(d: usize) -> StateVector {
    let amp = c(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = StateVector::zeros(d * d);
    for j in 0..d {
        v[j * d + j] = amp;
    }
    v
}

/// Computational basis vector `|k⟩` of `C^d`.
pub fn basis_vector(d: usize, k: usize) -> StateVector {
    let mut v = StateVector::zeros(d);
    v[k] = c(1.0, 0.0);
    v
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
