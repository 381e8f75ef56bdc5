//! Density matrices and seeded samplers for pure, mixed and separable states.
//!
//! Randomness comes from ChaCha20 keyed by [`SeedSpec::seed`] with
//! [`SeedSpec::stream`] selecting an independent 64-bit stream, so a given
//! `(seed, stream)` pair yields the same draws on every platform. Gaussian
//! variates use the Box–Muller transform.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{
    self, eigh, hermitian_part, max_abs_entry, partial_trace, partial_trace_multi, ComplexMatrix,
    StateVector, Subsystem,
};

const HERMITIAN_TOL: f64 = 1e-11;
const TRACE_TOL: f64 = 1e-11;
const EIGEN_FLOOR: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    pub fn source(&self) -> RandomSource {
        RandomSource { rng: self.rng() }
    }
}

/// Uniform and Gaussian draws on top of a ChaCha20 stream.
///
/// Every uniform consumes exactly one `u64` (two ChaCha words).
pub struct RandomSource {
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn from_rng(rng: ChaCha20Rng) -> Self {
        Self { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A pair of independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * std::f64::consts::PI * u2;
        (r * phi.cos(), r * phi.sin())
    }

    /// Standard complex Gaussian, `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let (x, y) = self.normal_pair();
        Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        // fill row by row so the draw order is independent of storage layout
        let mut g = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                g[(i, j)] = self.complex_gaussian();
            }
        }
        g
    }

    /// Exponential(1) variate.
    pub fn exponential(&mut self) -> f64 {
        -(1.0 - self.uniform()).ln()
    }
}

/// Trace-one positive operator on a composite space with declared subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity; stores the Hermitian part.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dimension(format!("invalid subsystem dims {dims:?}")));
        }
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need a {n}x{n} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !linops::is_hermitian(&matrix, HERMITIAN_TOL) {
            return Err(Error::Parameter("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Parameter(format!("density matrix has trace {tr}")));
        }
        let matrix = hermitian_part(&matrix);
        let low = eigh(&matrix)?.eigenvalues[0];
        if low < EIGEN_FLOOR {
            return Err(Error::NotPositive {
                eigenvalue: low,
                floor: EIGEN_FLOOR,
            });
        }
        Ok(Self { matrix, dims })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn from_pure(psi: &StateVector, dims: Vec<usize>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!("state vector has norm {norm}")));
        }
        Self::new(linops::projector(psi), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            matrix: linops::identity(n).scale(1.0 / n as f64),
            dims,
        }
    }

    /// `ρ ⊗ σ`, concatenating subsystem lists.
    pub fn product(&self, other: &DensityMatrix) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: linops::tensor(&self.matrix, &other.matrix),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `(d_A, d_B)` for a bipartite state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            &[a, b] => Ok((a, b)),
            other => Err(Error::Dimension(format!(
                "expected a bipartite state, got subsystem dims {other:?}"
            ))),
        }
    }

    /// Reduced state on a bipartite half.
    pub fn marginal(&self, keep: Subsystem) -> Result<DensityMatrix> {
        let (da, db) = self.bipartite_dims()?;
        let m = partial_trace(&self.matrix, da, db, keep)?;
        let dims = vec![if keep == Subsystem::A { da } else { db }];
        Ok(Self {
            matrix: hermitian_part(&m),
            dims,
        })
    }

    /// Reduced state on the listed subsystems (ascending indices).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace_multi(&self.matrix, &self.dims, keep)?;
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self {
            matrix: hermitian_part(&m),
            dims,
        })
    }

    pub fn purity(&self) -> f64 {
        linops::trace_product(&self.matrix, &self.matrix).re
    }

    /// Convex combination `(1 - t) ρ + t 𝟙/d`.
    pub fn depolarize(&self, t: f64) -> Self {
        let n = self.dim();
        let mixed = linops::identity(n).scale(1.0 / n as f64);
        Self {
            matrix: self.matrix.scale(1.0 - t) + mixed.scale(t),
            dims: self.dims.clone(),
        }
    }

    pub fn to_file(&self) -> DensityMatrixFile {
        let n = self.dim();
        DensityMatrixFile {
            dims: self.dims.clone(),
            re: (0..n)
                .map(|i| (0..n).map(|j| self.matrix[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| self.matrix[(i, j)].im).collect())
                .collect(),
        }
    }
}

/// On-disk density matrix: `{"dims": [..], "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DensityMatrixFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format("$", e.to_string()))
    }

    pub fn into_density(self) -> Result<DensityMatrix> {
        let n: usize = self.dims.iter().product();
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != n {
                return Err(Error::format(
                    name,
                    format!("expected {n} rows, found {}", part.len()),
                ));
            }
            for (i, row) in part.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::format(
                        format!("{name}[{i}]"),
                        format!("expected {n} entries, found {}", row.len()),
                    ));
                }
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(self.re[i][j], self.im[i][j]));
        DensityMatrix::new(m, self.dims)
    }
}

/// Haar-random unit vector in `C^d`.
pub fn random_pure(d: usize, seed: SeedSpec) -> StateVector {
    random_pure_from(d, &mut seed.source())
}

pub fn random_pure_from(d: usize, src: &mut RandomSource) -> StateVector {
    loop {
        let v = StateVector::from_fn(d, |_, _| src.complex_gaussian());
        let norm = v.norm();
        if norm > 1e-300 {
            return v.unscale(norm);
        }
    }
}

/// Ginibre-induced mixed state `G G† / Tr(G G†)` with `G` of shape `d × rank`.
pub fn random_density(d: usize, rank: usize, seed: SeedSpec) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::Parameter(format!(
            "rank must lie in 1..={d}, got {rank}"
        )));
    }
    let m = random_density_matrix(d, rank, &mut seed.source());
    DensityMatrix::new(m, vec![d])
}

/// Same as [`random_density`] but with explicit subsystem dims.
pub fn random_density_with_dims(
    dims: Vec<usize>,
    rank: usize,
    seed: SeedSpec,
) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::Parameter(format!(
            "rank must lie in 1..={d}, got {rank}"
        )));
    }
    let m = random_density_matrix(d, rank, &mut seed.source());
    DensityMatrix::new(m, dims)
}

fn random_density_matrix(d: usize, rank: usize, src: &mut RandomSource) -> ComplexMatrix {
    let g = src.ginibre(d, rank);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    hermitian_part(&w.unscale(tr))
}

/// Haar-random unitary via Gram–Schmidt on Ginibre columns.
pub fn random_unitary(d: usize, seed: SeedSpec) -> ComplexMatrix {
    random_unitary_from(d, &mut seed.source())
}

pub fn random_unitary_from(d: usize, src: &mut RandomSource) -> ComplexMatrix {
    let mut q = src.ginibre(d, d);
    for j in 0..d {
        // two passes keep the columns orthonormal to ~1e-16
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..d).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..d {
                    let qik = q[(i, k)];
                    q[(i, j)] -= proj * qik;
                }
            }
        }
        let norm = (0..d).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..d {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// A separable state together with its product decomposition.
#[derive(Debug, Clone)]
pub struct SeparableSample {
    pub weights: Vec<f64>,
    pub factors_a: Vec<DensityMatrix>,
    pub factors_b: Vec<DensityMatrix>,
    pub state: DensityMatrix,
}

/// Mixture `Σ_j p_j ρ_A^j ⊗ ρ_B^j` with flat-simplex weights and full-rank Ginibre factors.
pub fn random_separable(
    d_a: usize,
    d_b: usize,
    terms: usize,
    seed: SeedSpec,
) -> Result<DensityMatrix> {
    Ok(random_separable_decomposed(d_a, d_b, terms, seed)?.state)
}

pub fn random_separable_decomposed(
    d_a: usize,
    d_b: usize,
    terms: usize,
    seed: SeedSpec,
) -> Result<SeparableSample> {
    if terms == 0 {
        return Err(Error::Parameter(
            "a separable mixture needs at least one term".into(),
        ));
    }
    let mut src = seed.source();
    let raw: Vec<f64> = (0..terms).map(|_| src.exponential()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let mut factors_a = Vec::with_capacity(terms);
    let mut factors_b = Vec::with_capacity(terms);
    let mut acc = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
    for &w in &weights {
        let ra = random_density_matrix(d_a, d_a, &mut src);
        let rb = random_density_matrix(d_b, d_b, &mut src);
        acc += linops::tensor(&ra, &rb).scale(w);
        factors_a.push(DensityMatrix::new(ra, vec![d_a])?);
        factors_b.push(DensityMatrix::new(rb, vec![d_b])?);
    }
    let state = DensityMatrix::new(acc, vec![d_a, d_b])?;
    Ok(SeparableSample {
        weights,
        factors_a,
        factors_b,
        state,
    })
}

/// Minimal purification `Σ_i √λ_i |v_i⟩ ⊗ |i⟩_E` over the numerical support of `rho`.
///
/// The purifying system is appended last and has dimension equal to the
/// numerical rank.
pub fn purify(rho: &DensityMatrix, rank_tol: f64) -> Result<(StateVector, usize)> {
    let eig = eigh(rho.matrix())?;
    let threshold = rank_tol * eig.max_abs_eigenvalue();
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .rev()
        .filter(|&i| eig.eigenvalues[i] > threshold)
        .collect();
    let n = rho.dim();
    let r = kept.len();
    let mut psi = StateVector::zeros(n * r);
    for (e, &i) in kept.iter().enumerate() {
        let amp = eig.eigenvalues[i].sqrt();
        for row in 0..n {
            psi[row * r + e] = eig.eigenvectors[(row, i)] * amp;
        }
    }
    let norm = psi.norm();
    Ok((psi.unscale(norm), r))
}

/// Squared Schmidt coefficients of a bipartite pure state, descending.
pub fn schmidt_values(psi: &StateVector, d_a: usize, d_b: usize) -> Result<Vec<f64>> {
    if psi.len() != d_a * d_b {
        return Err(Error::Dimension(format!(
            "vector of length {} does not split as {d_a} x {d_b}",
            psi.len()
        )));
    }
    let rho_a = partial_trace(&linops::projector(psi), d_a, d_b, Subsystem::A)?;
    let mut values: Vec<f64> = eigh(&rho_a)?
        .eigenvalues
        .into_iter()
        .rev()
        .map(|v| v.max(0.0))
        .collect();
    let total: f64 = values.iter().sum();
    for v in &mut values {
        *v /= total;
    }
    Ok(values)
}

/// Maximum entrywise deviation between two density matrices.
pub fn max_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    max_abs_entry(&(a - b))
}
