//! Collision-type entropies and the pretty good measurement.
//!
//! All logarithms are base 2. Powers of `ρ_B` are taken on its support
//! (see [`crate::linops::func_on_support`]).
//!
//! Optimal-strategy quantities are not computed here. For reference they sit
//! around the pretty good ones as
//! `P_guess² ≤ P_guess^pg ≤ P_guess`, `F(A|B)² ≤ F^pg(A|B) ≤ F(A|B)` and
//! `H_min(A|B) ≤ H_2'(A|B)`, where the optimal versions need a semidefinite
//! program.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::designs::{Effect, MeasurementFamily};
use crate::error::{Error, Result};
use crate::linops::{
    self, func_on_support, identity, max_entangled, support_projector, tensor, trace_product,
    ComplexMatrix, StateVector, Subsystem,
};
use crate::states::DensityMatrix;

/// Probability-table normalization tolerance.
pub const TABLE_TOL: f64 = 1e-9;

fn check_nu(nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::Parameter(format!("nu must lie in [0, 1], got {nu}")));
    }
    Ok(())
}

/// `(𝟙 ⊗ L) m (𝟙 ⊗ R)` for `m` on `A ⊗ B`.
fn sandwich_b(
    m: &ComplexMatrix,
    d_a: usize,
    left: &ComplexMatrix,
    right: &ComplexMatrix,
) -> ComplexMatrix {
    let id = identity(d_a);
    tensor(&id, left) * m * tensor(&id, right)
}

/// `H_{2,ν}(A|B) = −log Tr[ρ_ν† ρ_ν]` with
/// `ρ_ν = (𝟙 ⊗ ρ_B^{−(1−ν)/4}) ρ_AB (𝟙 ⊗ ρ_B^{−(1+ν)/4})`.
///
/// `ν = 0` is the usual conditional collision entropy `H_2(A|B)`,
/// `ν = 1` the variant `H_2'(A|B) = −log Tr[ρ_AB² (𝟙 ⊗ ρ_B^{−1})]`.
pub fn h2nu(rho: &DensityMatrix, nu: f64, rank_tol: f64) -> Result<f64> {
    check_nu(nu)?;
    let (d_a, _) = rho.bipartite_dims()?;
    let rho_b = rho.marginal(Subsystem::B)?;
    let left = func_on_support(rho_b.matrix(), -(1.0 - nu) / 4.0, rank_tol)?;
    let right = func_on_support(rho_b.matrix(), -(1.0 + nu) / 4.0, rank_tol)?;
    let x = sandwich_b(rho.matrix(), d_a, &left, &right);
    Ok(-x.norm_squared().log2())
}

/// `H_2(A|B)`.
pub fn h2(rho: &DensityMatrix, rank_tol: f64) -> Result<f64> {
    h2nu(rho, 0.0, rank_tol)
}

/// Unnormalized conditional operator `Tr_A[(E ⊗ 𝟙) ρ_AB]` for a rank-one effect.
pub fn conditional_operator(rho: &DensityMatrix, effect: &Effect) -> Result<ComplexMatrix> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    if effect.vector.len() != d_a {
        return Err(Error::Dimension(format!(
            "effect acts on dimension {}, state has d_A = {d_a}",
            effect.vector.len()
        )));
    }
    let v = &effect.vector;
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(d_b, d_b, |b, bp| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..d_a {
            let va = v[a].conj();
            if va == Complex64::new(0.0, 0.0) {
                continue;
            }
            for ap in 0..d_a {
                acc += va * m[(a * d_b + b, ap * d_b + bp)] * v[ap];
            }
        }
        acc * effect.weight
    });
    Ok(linops::hermitian_part(&out))
}

/// Conditional states `ρ_B^k = Tr_A[(|k⟩⟨k| ⊗ 𝟙) ρ_AB (|k⟩⟨k| ⊗ 𝟙)]` for an orthonormal basis on `A`.
pub fn measure_in_basis(rho: &DensityMatrix, basis: &[StateVector]) -> Result<Vec<ComplexMatrix>> {
    let (d_a, _) = rho.bipartite_dims()?;
    if basis.len() != d_a {
        return Err(Error::Dimension(format!(
            "a basis of A needs {d_a} vectors, got {}",
            basis.len()
        )));
    }
    basis
        .iter()
        .map(|v| conditional_operator(rho, &Effect::new(1.0, v.clone())))
        .collect()
}

/// Conditional operators for an arbitrary rank-one POVM on `A`.
pub fn measure_effects(rho: &DensityMatrix, effects: &[Effect]) -> Result<Vec<ComplexMatrix>> {
    effects
        .iter()
        .map(|e| conditional_operator(rho, e))
        .collect()
}

/// Pretty good measurement `Π^k = ρ_B^{−1/2} ρ_B^k ρ_B^{−1/2}` with `ρ_B = Σ_k ρ_B^k`.
pub fn pgm_operators(conds: &[ComplexMatrix], rank_tol: f64) -> Result<Vec<ComplexMatrix>> {
    let rho_b = sum_operators(conds)?;
    let s = func_on_support(&rho_b, -0.5, rank_tol)?;
    Ok(conds.iter().map(|rk| &s * rk * &s).collect())
}

/// `P_guess^pg(K|B) = Σ_k Tr[Π^k ρ_B^k]`.
pub fn pgm_guess_prob(conds: &[ComplexMatrix], rank_tol: f64) -> Result<f64> {
    let pis = pgm_operators(conds, rank_tol)?;
    Ok(pis
        .iter()
        .zip(conds)
        .map(|(p, r)| trace_product(p, r).re)
        .sum())
}

/// `Σ_k Tr[M_k† M_k]` with `M_k = ρ_B^{−(1−ν)/4} ρ_B^k ρ_B^{−(1+ν)/4}`: the
/// collision term of `H_{2,ν}(K|B)` for one classical-quantum state.
pub fn cq_collision(conds: &[ComplexMatrix], nu: f64, rank_tol: f64) -> Result<f64> {
    check_nu(nu)?;
    let rho_b = sum_operators(conds)?;
    let left = func_on_support(&rho_b, -(1.0 - nu) / 4.0, rank_tol)?;
    let right = func_on_support(&rho_b, -(1.0 + nu) / 4.0, rank_tol)?;
    Ok(conds
        .iter()
        .map(|rk| (&left * rk * &right).norm_squared())
        .sum())
}

fn sum_operators(conds: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let first = conds
        .first()
        .ok_or_else(|| Error::Parameter("empty list of conditional operators".into()))?;
    let mut total = ComplexMatrix::zeros(first.nrows(), first.ncols());
    for c in conds {
        if c.shape() != first.shape() {
            return Err(Error::Dimension(
                "conditional operators differ in shape".into(),
            ));
        }
        total += c;
    }
    Ok(total)
}

/// Post-measurement classical-quantum data `ρ_KBΘ`: per setting, the
/// conditional operators of every outcome, plus the setting weights.
#[derive(Debug, Clone)]
pub struct CqEnsemble {
    pub settings: Vec<Vec<ComplexMatrix>>,
    pub weights: Vec<f64>,
}

impl CqEnsemble {
    pub fn from_family(rho: &DensityMatrix, family: &MeasurementFamily) -> Result<Self> {
        let (d_a, _) = rho.bipartite_dims()?;
        if family.d() != d_a {
            return Err(Error::Dimension(format!(
                "family acts on dimension {}, state has d_A = {d_a}",
                family.d()
            )));
        }
        let settings = family
            .settings()
            .iter()
            .map(|s| measure_effects(rho, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            settings,
            weights: family.setting_weights().to_vec(),
        })
    }

    pub fn d_b(&self) -> usize {
        self.settings[0][0].nrows()
    }

    /// `Σ_θ p_θ Σ_k Tr[M_θk† M_θk]`, i.e. `2^{−H_{2,ν}(K|BΘ)}`.
    pub fn collision(&self, nu: f64, rank_tol: f64) -> Result<f64> {
        let mut total = 0.0;
        for (conds, w) in self.settings.iter().zip(&self.weights) {
            total += w * cq_collision(conds, nu, rank_tol)?;
        }
        Ok(total)
    }

    /// `H_{2,ν}(K|BΘ)`.
    pub fn h2nu(&self, nu: f64, rank_tol: f64) -> Result<f64> {
        Ok(-self.collision(nu, rank_tol)?.log2())
    }

    pub fn guess_probabilities(&self, rank_tol: f64) -> Result<GuessProbabilities> {
        let per_setting = self
            .settings
            .iter()
            .map(|c| pgm_guess_prob(c, rank_tol))
            .collect::<Result<Vec<_>>>()?;
        let average = per_setting
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| p * w)
            .sum();
        Ok(GuessProbabilities {
            per_setting,
            average,
        })
    }

    /// Block-diagonal density matrix `Σ_θ p_θ Σ_k |k⟩⟨k| ⊗ ρ_B^{θk} ⊗ |θ⟩⟨θ|`
    /// with subsystem dims `[K, B·Θ]`.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let d_k = self.settings.iter().map(Vec::len).max().unwrap_or(0);
        let d_b = self.d_b();
        let n_theta = self.settings.len();
        let cond_dim = d_b * n_theta;
        let mut m = DMatrix::zeros(d_k * cond_dim, d_k * cond_dim);
        for (theta, (conds, w)) in self.settings.iter().zip(&self.weights).enumerate() {
            for (k, rk) in conds.iter().enumerate() {
                for b in 0..d_b {
                    for bp in 0..d_b {
                        let row = (k * d_b + b) * n_theta + theta;
                        let col = (k * d_b + bp) * n_theta + theta;
                        m[(row, col)] = rk[(b, bp)] * *w;
                    }
                }
            }
        }
        DensityMatrix::new(m, vec![d_k, cond_dim])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessProbabilities {
    pub per_setting: Vec<f64>,
    pub average: f64,
}

/// Pretty-good guessing probability for every setting of `family` and their weighted average.
pub fn family_guess_prob(
    rho: &DensityMatrix,
    family: &MeasurementFamily,
    rank_tol: f64,
) -> Result<GuessProbabilities> {
    CqEnsemble::from_family(rho, family)?.guess_probabilities(rank_tol)
}

/// `F^pg(A|B) = 2^{−H_2(A|B)} / d_A`.
pub fn pg_recovery_fidelity(rho: &DensityMatrix, rank_tol: f64) -> Result<f64> {
    let (d_a, _) = rho.bipartite_dims()?;
    Ok(2f64.powf(-h2(rho, rank_tol)?) / d_a as f64)
}

/// The pretty good recovery map `Λ^pg_{B→A'}` built from a bipartite state:
/// `Λ(X) = (1/d_A) E†(ρ_B^{−1/2} X ρ_B^{−1/2})` where `E†` is the adjoint of
/// the Choi map `E(Y) = d_A Tr_A[(Yᵀ ⊗ 𝟙) ρ_AB]`. This reduces to
/// `Λ(X) = (Tr_B[(𝟙 ⊗ ρ_B^{−1/2} X ρ_B^{−1/2}) ρ_AB])ᵀ`.
pub struct PrettyGoodRecovery {
    state: ComplexMatrix,
    inv_sqrt_b: ComplexMatrix,
    d_a: usize,
    d_b: usize,
}

impl PrettyGoodRecovery {
    pub fn new(rho: &DensityMatrix, rank_tol: f64) -> Result<Self> {
        let (d_a, d_b) = rho.bipartite_dims()?;
        let rho_b = rho.marginal(Subsystem::B)?;
        Ok(Self {
            state: rho.matrix().clone(),
            inv_sqrt_b: func_on_support(rho_b.matrix(), -0.5, rank_tol)?,
            d_a,
            d_b,
        })
    }

    /// Image of a `d_B × d_B` operator, a `d_A × d_A` operator on `A'`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let z = &self.inv_sqrt_b * x * &self.inv_sqrt_b;
        let (d_a, d_b) = (self.d_a, self.d_b);
        // M[i, j] = Σ_{b,b'} Z[b, b'] ρ[(i, b'), (j, b)], then transpose
        ComplexMatrix::from_fn(d_a, d_a, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..d_b {
                for bp in 0..d_b {
                    acc += z[(b, bp)] * self.state[(j * d_b + bp, i * d_b + b)];
                }
            }
            acc
        })
    }

    /// `(𝟙_R ⊗ Λ)(ω)` for `ω` on `R ⊗ B` with `dim R = d_r`.
    pub fn apply_to_second(&self, omega: &ComplexMatrix, d_r: usize) -> ComplexMatrix {
        let d_b = self.d_b;
        let d_a = self.d_a;
        let mut out = ComplexMatrix::zeros(d_r * d_a, d_r * d_a);
        for i in 0..d_r {
            for j in 0..d_r {
                let block = omega.view((i * d_b, j * d_b), (d_b, d_b)).into_owned();
                let image = self.apply(&block);
                out.view_mut((i * d_a, j * d_a), (d_a, d_a))
                    .copy_from(&image);
            }
        }
        out
    }
}

/// `F(Φ_AA', (𝟙 ⊗ Λ^pg)(ρ_AB))` evaluated by applying the recovery map explicitly.
pub fn pg_recovery_fidelity_explicit(rho: &DensityMatrix, rank_tol: f64) -> Result<f64> {
    let (d_a, _) = rho.bipartite_dims()?;
    let map = PrettyGoodRecovery::new(rho, rank_tol)?;
    let sigma = map.apply_to_second(rho.matrix(), d_a);
    Ok(linops::pure_target_fidelity(&max_entangled(d_a), &sigma))
}

/// `H_2(K|L) = −log Σ_l p(l) Σ_k p(k|l)²` for a table indexed `[k][l]`.
/// Columns with `p(l) = 0` are skipped.
pub fn classical_h2_cond(table: &[Vec<f64>]) -> f64 {
    let cols = table.first().map_or(0, Vec::len);
    let mut collision = 0.0;
    for l in 0..cols {
        let pl: f64 = table.iter().map(|row| row[l]).sum();
        if pl <= 0.0 {
            continue;
        }
        collision += table.iter().map(|row| row[l] * row[l]).sum::<f64>() / pl;
    }
    -collision.log2()
}

/// Joint outcome table `p(k, l) = ⟨a_k b_l|ρ|a_k b_l⟩` from local basis measurements.
pub fn joint_from_state(
    rho: &DensityMatrix,
    basis_a: &[StateVector],
    basis_b: &[StateVector],
) -> Result<Vec<Vec<f64>>> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    if basis_a.len() != d_a || basis_b.len() != d_b {
        return Err(Error::Dimension(
            "local bases do not match the state".into(),
        ));
    }
    Ok(basis_a
        .iter()
        .map(|a| {
            basis_b
                .iter()
                .map(|b| {
                    let ab = linops::tensor_vec(a, b);
                    linops::pure_target_fidelity(&ab, rho.matrix()).max(0.0)
                })
                .collect()
        })
        .collect())
}

/// One setting of a joint distribution: Alice's MUB index and the `d_A × d_B` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSetting {
    pub theta: usize,
    pub table: Vec<Vec<f64>>,
}

/// Measurement statistics for the entanglement witness:
/// `{"d_a", "d_b", "settings": [{"theta", "table": [[p(k,l)]]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub d_a: usize,
    pub d_b: usize,
    pub settings: Vec<JointSetting>,
}

impl JointDistribution {
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: Self =
            serde_json::from_str(text).map_err(|e| Error::format("$", e.to_string()))?;
        parsed.validate()?;
        Ok(parsed)
    }

    /// Shape, sign, normalization and MUB-label checks; errors carry the offending path.
    pub fn validate(&self) -> Result<()> {
        if self.d_a < 2 {
            return Err(Error::format("d_a", "must be at least 2"));
        }
        if self.d_b == 0 {
            return Err(Error::format("d_b", "must be positive"));
        }
        if self.settings.is_empty() {
            return Err(Error::format("settings", "no settings given"));
        }
        if self.settings.len() > self.d_a + 1 {
            return Err(Error::format(
                "settings",
                format!("at most d_a + 1 = {} MUB settings exist", self.d_a + 1),
            ));
        }
        let mut used = vec![false; self.d_a + 1];
        for (s, setting) in self.settings.iter().enumerate() {
            let path = format!("settings[{s}]");
            if setting.theta > self.d_a {
                return Err(Error::format(
                    format!("{path}.theta"),
                    format!("MUB index {} out of range 0..={}", setting.theta, self.d_a),
                ));
            }
            if std::mem::replace(&mut used[setting.theta], true) {
                return Err(Error::format(
                    format!("{path}.theta"),
                    format!("MUB index {} used twice", setting.theta),
                ));
            }
            if setting.table.len() != self.d_a {
                return Err(Error::format(
                    format!("{path}.table"),
                    format!("expected {} rows, found {}", self.d_a, setting.table.len()),
                ));
            }
            let mut total = 0.0;
            for (k, row) in setting.table.iter().enumerate() {
                if row.len() != self.d_b {
                    return Err(Error::format(
                        format!("{path}.table[{k}]"),
                        format!("expected {} entries, found {}", self.d_b, row.len()),
                    ));
                }
                for (l, &p) in row.iter().enumerate() {
                    if !p.is_finite() || p < 0.0 {
                        return Err(Error::format(
                            format!("{path}.table[{k}][{l}]"),
                            format!("invalid probability {p}"),
                        ));
                    }
                }
                total += row.iter().sum::<f64>();
            }
            if (total - 1.0).abs() > TABLE_TOL {
                return Err(Error::format(
                    format!("{path}.table"),
                    format!("normalization error: probabilities sum to {total}"),
                ));
            }
        }
        Ok(())
    }
}

/// `D_0(ρ‖σ) = −log Tr[ρ⁰ σ]` with `ρ⁰` the support projector of `ρ`.
pub fn d0_relative(rho: &ComplexMatrix, sigma: &ComplexMatrix, rank_tol: f64) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::Dimension("D_0 arguments differ in shape".into()));
    }
    let proj = support_projector(rho, rank_tol)?;
    let overlap = trace_product(&proj, sigma).re;
    if overlap <= rank_tol {
        return Err(Error::InfiniteDivergence {
            overlap,
            threshold: rank_tol,
        });
    }
    Ok(-overlap.log2())
}
