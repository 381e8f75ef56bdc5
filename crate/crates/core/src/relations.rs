//! Executable forms of the entanglement–uncertainty relations.
//!
//! Every check returns a [`RelationReport`]. Equalities report `|lhs − rhs|`;
//! inequalities are written `lhs ≤ rhs` and report the one-sided violation
//! `max(0, lhs − rhs)`, so a verdict can only improve as the tolerance grows.

use serde::{Deserialize, Serialize};

use crate::designs::{design_defect, FamilyKind, MeasurementFamily};
use crate::entropies::{self, classical_h2_cond, d0_relative, CqEnsemble, JointDistribution};
use crate::error::{Error, Result};
use crate::linops::{self, eigh, identity, tensor, StateVector};
use crate::states::DensityMatrix;

/// Default tolerance for equalities and bound checks.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Default tolerance for the monogamy equation.
pub const MONOGAMY_TOL: f64 = 1e-8;
/// Largest design defect accepted by [`equality_report`].
pub const DESIGN_CERT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub family_kind: Option<String>,
    pub d: usize,
    pub d_b: Option<usize>,
    pub nu: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub metadata: ReportMetadata,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl RelationReport {
    fn build(
        relation: &str,
        lhs: f64,
        rhs: f64,
        defect: f64,
        tolerance: f64,
        metadata: ReportMetadata,
    ) -> Self {
        let verdict = if defect <= tolerance {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        Self {
            relation: relation.into(),
            lhs,
            rhs,
            defect,
            tolerance,
            verdict,
            metadata,
            warnings: Vec::new(),
        }
    }

    /// `lhs = rhs`.
    pub fn equality(
        relation: &str,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        metadata: ReportMetadata,
    ) -> Self {
        Self::build(relation, lhs, rhs, (lhs - rhs).abs(), tolerance, metadata)
    }

    /// `lhs ≤ rhs`.
    pub fn at_most(
        relation: &str,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        metadata: ReportMetadata,
    ) -> Self {
        Self::build(
            relation,
            lhs,
            rhs,
            (lhs - rhs).max(0.0),
            tolerance,
            metadata,
        )
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

fn certified_constant(family: &MeasurementFamily) -> Result<f64> {
    let defect = design_defect(family);
    if defect.is_nan() || defect >= DESIGN_CERT_TOL {
        return Err(Error::DesignDefect {
            defect,
            tolerance: DESIGN_CERT_TOL,
        });
    }
    family.equality_constant().ok_or_else(|| {
        Error::UnsupportedFamily(format!(
            "{} family carries no equality constant",
            family.kind().label()
        ))
    })
}

/// `H_{2,ν}(K|BΘ) = log c − log(2^{−H_{2,ν}(A|B)} + 1)` for a certified 2-design family.
///
/// The left side is evaluated from the post-measurement conditional operators,
/// the right side from `ρ_AB` directly.
pub fn equality_report(
    rho: &DensityMatrix,
    family: &MeasurementFamily,
    nu: f64,
    rank_tol: f64,
    tolerance: f64,
) -> Result<RelationReport> {
    let constant = certified_constant(family)?;
    let (d_a, d_b) = rho.bipartite_dims()?;
    let lhs = CqEnsemble::from_family(rho, family)?.h2nu(nu, rank_tol)?;
    let h_ab = entropies::h2nu(rho, nu, rank_tol)?;
    let rhs = constant.log2() - (2f64.powf(-h_ab) + 1.0).log2();
    let meta = ReportMetadata {
        family_kind: Some(family.kind().label()),
        d: d_a,
        d_b: Some(d_b),
        nu: Some(nu),
        n: Some(family.len()),
    };
    Ok(RelationReport::equality(
        "main-equality",
        lhs,
        rhs,
        tolerance,
        meta,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `F^pg ≤ 1/d`.
    Heisenberg,
    /// `F^pg > 1/d`.
    Epr,
}

impl Regime {
    pub fn of(f_pg: f64, d: usize) -> Self {
        if f_pg <= 1.0 / d as f64 {
            Regime::Heisenberg
        } else {
            Regime::Epr
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Upper,
    Lower,
}

/// Tight lower and upper bounds on `P^pg(n)` at recovery fidelity `f_pg`.
///
/// For `n ≤ d` the lower bound is `max(1/d, F)`; the upper bound is
/// `(d/n) F + (n−1)/(n d)` in the Heisenberg regime and `((n−1)/n) F + 1/n`
/// in the EPR regime. At `n = d + 1` both equal `(d F + 1)/(d + 1)`.
pub fn bound_curves(d: usize, n: usize, f_pg: f64) -> Result<(f64, f64)> {
    if d < 2 || n == 0 || n > d + 1 {
        return Err(Error::Parameter(format!(
            "need d >= 2 and 1 <= n <= d + 1, got d = {d}, n = {n}"
        )));
    }
    let (df, nf) = (d as f64, n as f64);
    if n == d + 1 {
        let v = (df * f_pg + 1.0) / (df + 1.0);
        return Ok((v, v));
    }
    Ok(match Regime::of(f_pg, d) {
        Regime::Heisenberg => (1.0 / df, df / nf * f_pg + (nf - 1.0) / (nf * df)),
        Regime::Epr => (f_pg, (nf - 1.0) / nf * f_pg + 1.0 / nf),
    })
}

/// `P^pg(n)` measured on a state next to its bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBasisPoint {
    pub n: usize,
    pub f_pg: f64,
    pub p_n: f64,
    pub lower: f64,
    pub upper: f64,
    pub regime: Regime,
}

fn require_complete_mubs(mubs: &MeasurementFamily) -> Result<()> {
    if mubs.kind() != FamilyKind::MubComplete {
        return Err(Error::UnsupportedFamily(format!(
            "a complete MUB set is required, got {}",
            mubs.kind().label()
        )));
    }
    Ok(())
}

/// Per-setting pretty-good guessing probabilities together with `F^pg(A|B)`.
pub fn nbasis_profile(
    rho: &DensityMatrix,
    mubs: &MeasurementFamily,
    rank_tol: f64,
) -> Result<(Vec<f64>, f64)> {
    require_complete_mubs(mubs)?;
    let per_setting = entropies::family_guess_prob(rho, mubs, rank_tol)?.per_setting;
    let f_pg = entropies::pg_recovery_fidelity(rho, rank_tol)?;
    Ok((per_setting, f_pg))
}

/// `P^pg(n)`: the average over the first `n` settings.
pub fn prefix_average(per_setting: &[f64], n: usize) -> f64 {
    per_setting[..n].iter().sum::<f64>() / n as f64
}

pub fn nbasis_point(
    rho: &DensityMatrix,
    mubs: &MeasurementFamily,
    n: usize,
    rank_tol: f64,
) -> Result<NBasisPoint> {
    let d = mubs.d();
    if n == 0 || n > d + 1 {
        return Err(Error::Parameter(format!(
            "n must lie in 1..={}, got {n}",
            d + 1
        )));
    }
    let (per_setting, f_pg) = nbasis_profile(rho, mubs, rank_tol)?;
    let (lower, upper) = bound_curves(d, n, f_pg)?;
    Ok(NBasisPoint {
        n,
        f_pg,
        p_n: prefix_average(&per_setting, n),
        lower,
        upper,
        regime: Regime::of(f_pg, d),
    })
}

/// Lower-bound and upper-bound reports for `P^pg(n)`.
pub fn nbasis_bounds(
    rho: &DensityMatrix,
    mubs: &MeasurementFamily,
    n: usize,
    rank_tol: f64,
    tolerance: f64,
) -> Result<(RelationReport, RelationReport)> {
    let point = nbasis_point(rho, mubs, n, rank_tol)?;
    Ok(point_reports(&point, mubs.d(), tolerance))
}

pub fn point_reports(
    point: &NBasisPoint,
    d: usize,
    tolerance: f64,
) -> (RelationReport, RelationReport) {
    let meta = ReportMetadata {
        family_kind: Some(FamilyKind::MubComplete.label()),
        d,
        d_b: None,
        nu: Some(0.0),
        n: Some(point.n),
    };
    (
        RelationReport::at_most(
            "nbasis-lower",
            point.lower,
            point.p_n,
            tolerance,
            meta.clone(),
        ),
        RelationReport::at_most("nbasis-upper", point.p_n, point.upper, tolerance, meta),
    )
}

fn bisect<F: Fn(f64) -> f64>(f: F, target: f64, increasing: bool) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let above = f(mid) > target;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Spectrum `(1 − t) e_0 + t 𝟙/d`.
fn interpolated_spectrum(d: usize, t: f64) -> Vec<f64> {
    let df = d as f64;
    (0..d)
        .map(|i| if i == 0 { 1.0 - t + t / df } else { t / df })
        .collect()
}

/// A state on `C^d ⊗ C^d` whose `(F^pg, P^pg(n))` lies on the requested bound.
///
/// `mix` is the target `F^pg`: in `[1/d², 1/d]` for the Heisenberg regime and
/// `[1/d, 1]` for the EPR regime. Upper bounds use setting 0 (inside the
/// first `n`), lower bounds use setting `n` (the first one left out), so lower
/// bounds need `n ≤ d`.
///
/// EPR states are pure with their Schmidt basis on `A` equal to the chosen
/// MUB; Heisenberg states are `ρ_A ⊗ 𝟙/d` with `ρ_A` diagonal in it.
pub fn achiever_state(
    d: usize,
    regime: Regime,
    which: BoundSide,
    mubs: &MeasurementFamily,
    n: usize,
    mix: f64,
) -> Result<DensityMatrix> {
    require_complete_mubs(mubs)?;
    if mubs.d() != d {
        return Err(Error::Parameter(format!(
            "MUB family has dimension {}, requested d = {d}",
            mubs.d()
        )));
    }
    if n == 0 || n > d + 1 {
        return Err(Error::Parameter(format!(
            "n must lie in 1..={}, got {n}",
            d + 1
        )));
    }
    let basis_index = match which {
        BoundSide::Upper => 0,
        BoundSide::Lower if n <= d => n,
        BoundSide::Lower => {
            return Err(Error::Parameter(
                "lower-bound achievers need an excluded basis, so n <= d".into(),
            ))
        }
    };
    let basis: Vec<StateVector> = mubs.settings()[basis_index]
        .iter()
        .map(|e| e.vector.clone())
        .collect();
    let df = d as f64;
    match regime {
        Regime::Heisenberg => {
            if !(1.0 / (df * df) - 1e-12..=1.0 / df + 1e-12).contains(&mix) {
                return Err(Error::Parameter(format!(
                    "Heisenberg targets lie in [1/d², 1/d], got {mix}"
                )));
            }
            // F^pg of ρ_A ⊗ σ_B is Tr ρ_A² / d
            let purity = |t: f64| {
                interpolated_spectrum(d, t)
                    .iter()
                    .map(|l| l * l)
                    .sum::<f64>()
            };
            let t = bisect(purity, df * mix, false);
            let spectrum = interpolated_spectrum(d, t);
            let mut rho_a = linops::ComplexMatrix::zeros(d, d);
            for (v, lam) in basis.iter().zip(&spectrum) {
                rho_a += linops::projector(v).scale(*lam);
            }
            let m = tensor(&rho_a, &identity(d).scale(1.0 / df));
            DensityMatrix::new(m, vec![d, d])
        }
        Regime::Epr => {
            if !(1.0 / df - 1e-12..=1.0 + 1e-12).contains(&mix) {
                return Err(Error::Parameter(format!(
                    "EPR targets lie in [1/d, 1], got {mix}"
                )));
            }
            // F^pg of a pure state is (Σ √λ_i)² / d
            let root_sum = |t: f64| {
                let s: f64 = interpolated_spectrum(d, t).iter().map(|l| l.sqrt()).sum();
                s * s
            };
            let t = bisect(root_sum, df * mix, true);
            let spectrum = interpolated_spectrum(d, t);
            let mut psi = StateVector::zeros(d * d);
            for (i, (v, lam)) in basis.iter().zip(&spectrum).enumerate() {
                psi += linops::tensor_vec(v, &linops::basis_vector(d, i)).scale(lam.sqrt());
            }
            let norm = psi.norm();
            DensityMatrix::from_pure(&psi.unscale(norm), vec![d, d])
        }
    }
}

/// `(d (2 p₂ − 1) + 1) / (d + 1)`: a lower bound on `P^pg(d+1)` from `P^pg(2)`.
pub fn two_to_full_bound(p2: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Parameter(format!("d must be at least 2, got {d}")));
    }
    let df = d as f64;
    if !(1.0 / df - 1e-9..=1.0 + 1e-9).contains(&p2) {
        return Err(Error::Parameter(format!(
            "P^pg(2) must lie in [1/d, 1], got {p2}"
        )));
    }
    Ok((df * (2.0 * p2 - 1.0) + 1.0) / (df + 1.0))
}

/// Checks `two_to_full_bound(P^pg(2)) ≤ P^pg(d+1)` on a state.
pub fn two_to_full_report(
    rho: &DensityMatrix,
    mubs: &MeasurementFamily,
    rank_tol: f64,
    tolerance: f64,
) -> Result<RelationReport> {
    let (per_setting, _) = nbasis_profile(rho, mubs, rank_tol)?;
    let d = mubs.d();
    let bound = two_to_full_bound(prefix_average(&per_setting, 2), d)?;
    let full = prefix_average(&per_setting, d + 1);
    let meta = ReportMetadata {
        family_kind: Some(FamilyKind::MubComplete.label()),
        d,
        d_b: None,
        nu: Some(0.0),
        n: Some(d + 1),
    };
    Ok(RelationReport::at_most(
        "two-to-all",
        bound,
        full,
        tolerance,
        meta,
    ))
}

/// Separable states satisfy `Σ_θ 2^{−H_2(K_θ|L_θ)} ≤ 1 + (n − 1)/d_A`.
/// A `Violated` verdict certifies entanglement.
pub fn witness(joints: &JointDistribution, tolerance: f64) -> Result<RelationReport> {
    joints.validate()?;
    let n = joints.settings.len();
    let lhs: f64 = joints
        .settings
        .iter()
        .map(|s| 2f64.powf(-classical_h2_cond(&s.table)))
        .sum();
    let rhs = 1.0 + (n as f64 - 1.0) / joints.d_a as f64;
    let meta = ReportMetadata {
        family_kind: Some(if n == joints.d_a + 1 {
            FamilyKind::MubComplete.label()
        } else {
            FamilyKind::MubSubset(n).label()
        }),
        d: joints.d_a,
        d_b: Some(joints.d_b),
        nu: None,
        n: Some(n),
    };
    Ok(RelationReport::at_most(
        "witness", lhs, rhs, tolerance, meta,
    ))
}

/// `D_0(ρ_AE ‖ 𝟙/d_A ⊗ ρ_E) = log d_A − log((d_A + 1) 2^{−H_2'(K|BΘ)} − 1)`
/// for a pure state on `A ⊗ B ⊗ E`.
///
/// A warning is attached when an eigenvalue of `ρ_AE` lies within a factor
/// of ten of the support cutoff.
pub fn monogamy_report(
    psi_abe: &StateVector,
    dims: [usize; 3],
    mubs: &MeasurementFamily,
    rank_tol: f64,
    tolerance: f64,
) -> Result<RelationReport> {
    require_complete_mubs(mubs)?;
    let [d_a, d_b, d_e] = dims;
    if psi_abe.len() != d_a * d_b * d_e {
        return Err(Error::Dimension(format!(
            "vector of length {} does not split as {d_a} x {d_b} x {d_e}",
            psi_abe.len()
        )));
    }
    if mubs.d() != d_a {
        return Err(Error::Dimension(format!(
            "MUB family has dimension {}, d_A = {d_a}",
            mubs.d()
        )));
    }
    let rho = DensityMatrix::from_pure(psi_abe, dims.to_vec())?;
    let rho_ab = rho.reduce(&[0, 1])?;
    let rho_ae = rho.reduce(&[0, 2])?;
    let rho_e = rho.reduce(&[2])?;

    let reference = tensor(&identity(d_a).scale(1.0 / d_a as f64), rho_e.matrix());
    let lhs = d0_relative(rho_ae.matrix(), &reference, rank_tol)?;

    let h2_prime_cq = CqEnsemble::from_family(&rho_ab, mubs)?.h2nu(1.0, rank_tol)?;
    let df = d_a as f64;
    let rhs = df.log2() - ((df + 1.0) * 2f64.powf(-h2_prime_cq) - 1.0).log2();

    let meta = ReportMetadata {
        family_kind: Some(mubs.kind().label()),
        d: d_a,
        d_b: Some(d_b),
        nu: Some(1.0),
        n: Some(mubs.len()),
    };
    let mut report = RelationReport::equality("monogamy", lhs, rhs, tolerance, meta);

    let eig = eigh(rho_ae.matrix())?;
    let cutoff = rank_tol * eig.max_abs_eigenvalue();
    if let Some(lam) = eig
        .eigenvalues
        .iter()
        .find(|&&l| l > cutoff / 10.0 && l < cutoff * 10.0)
    {
        report.warnings.push(format!(
            "rank-tolerance sensitive: eigenvalue {lam:e} of rho_AE is within 10x of the cutoff {cutoff:e}"
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub f_pg: f64,
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Bound curves for every `n ∈ 1..=d+1` over an evenly spaced grid of `F^pg ∈ [0, 1]`.
pub fn bound_sweep(d: usize, grid: usize) -> Result<Vec<BoundRow>> {
    if !crate::designs::is_prime(d) {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "bound sweeps are tied to complete MUB sets, built for prime d".into(),
        });
    }
    if grid < 2 {
        return Err(Error::Parameter(format!(
            "grid needs at least 2 points, got {grid}"
        )));
    }
    let mut rows = Vec::with_capacity(grid * (d + 1));
    for i in 0..grid {
        let f_pg = i as f64 / (grid - 1) as f64;
        for n in 1..=d + 1 {
            let (lower, upper) = bound_curves(d, n, f_pg)?;
            rows.push(BoundRow {
                f_pg,
                n,
                lower,
                upper,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{mub_family, sic_povm};
    use crate::entropies::JointSetting;
    use crate::linops::{basis_vector, max_entangled, DEFAULT_RANK_TOL};

    const TOL: f64 = DEFAULT_RANK_TOL;

    fn phi(d: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&max_entangled(d), vec![d, d]).unwrap()
    }

    #[test]
    fn max_entangled_equality_is_zero_zero() {
        let fam = mub_family(3).unwrap();
        let r = equality_report(&phi(3), &fam, 0.0, TOL, EQUALITY_TOL).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn uncertified_family_rejected() {
        let fam = mub_family(3).unwrap().mub_prefix(2).unwrap();
        let err = equality_report(&phi(3), &fam, 0.0, TOL, EQUALITY_TOL).unwrap_err();
        assert!(matches!(err, Error::DesignDefect { .. }));
    }

    #[test]
    fn sic_constant_used() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        let r = equality_report(&rho, &sic_povm(2).unwrap(), 0.0, TOL, EQUALITY_TOL).unwrap();
        // H_2(A|B) = 1, so rhs = log 6 - log 1.5 = 2
        assert!((r.rhs - 2.0).abs() < 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn bounds_at_full_set_coincide() {
        for f in [0.0, 0.2, 0.5, 1.0] {
            let (lo, hi) = bound_curves(5, 6, f).unwrap();
            assert_eq!(lo, hi);
            assert!((lo - (5.0 * f + 1.0) / 6.0).abs() < 1e-15);
        }
        let (lo, hi) = bound_curves(5, 1, 0.2).unwrap();
        assert!((lo - 0.2).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        assert!(bound_curves(5, 7, 0.5).is_err());
    }

    #[test]
    fn max_entangled_bounds_forced() {
        let fam = mub_family(5).unwrap();
        let p = nbasis_point(&phi(5), &fam, 2, TOL).unwrap();
        assert!((p.lower - 1.0).abs() < 1e-12 && (p.upper - 1.0).abs() < 1e-12);
        assert!((p.p_n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn epr_upper_achiever_example() {
        let fam = mub_family(5).unwrap();
        let rho = achiever_state(5, Regime::Epr, BoundSide::Upper, &fam, 2, 0.5).unwrap();
        let p = nbasis_point(&rho, &fam, 2, TOL).unwrap();
        assert!((p.f_pg - 0.5).abs() < 1e-9);
        assert!((p.p_n - 0.75).abs() < 1e-9);
    }

    #[test]
    fn heisenberg_upper_achiever_pure_marginal() {
        let fam = mub_family(5).unwrap();
        let rho = achiever_state(5, Regime::Heisenberg, BoundSide::Upper, &fam, 1, 0.2).unwrap();
        let p = nbasis_point(&rho, &fam, 1, TOL).unwrap();
        assert!((p.f_pg - 0.2).abs() < 1e-9);
        assert!((p.p_n - 1.0).abs() < 1e-9);
    }

    #[test]
    fn epr_lower_achiever_hits_fidelity() {
        let fam = mub_family(5).unwrap();
        let rho = achiever_state(5, Regime::Epr, BoundSide::Lower, &fam, 5, 0.6).unwrap();
        let p = nbasis_point(&rho, &fam, 5, TOL).unwrap();
        assert!((p.p_n - p.f_pg).abs() < 1e-9);
    }

    #[test]
    fn achiever_parameter_errors() {
        let fam = mub_family(3).unwrap();
        assert!(achiever_state(3, Regime::Epr, BoundSide::Lower, &fam, 4, 0.5).is_err());
        assert!(achiever_state(3, Regime::Epr, BoundSide::Upper, &fam, 2, 0.1).is_err());
        assert!(achiever_state(3, Regime::Heisenberg, BoundSide::Upper, &fam, 2, 0.9).is_err());
        assert!(achiever_state(5, Regime::Epr, BoundSide::Upper, &fam, 2, 0.5).is_err());
    }

    #[test]
    fn two_to_full_values() {
        for d in [2, 3, 7] {
            assert!((two_to_full_bound(1.0, d).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((two_to_full_bound(0.5, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(two_to_full_bound(0.1, 2).is_err());
    }

    fn ideal_tables(d: usize, n: usize) -> JointDistribution {
        let table: Vec<Vec<f64>> = (0..d)
            .map(|k| {
                (0..d)
                    .map(|l| if k == l { 1.0 / d as f64 } else { 0.0 })
                    .collect()
            })
            .collect();
        JointDistribution {
            d_a: d,
            d_b: d,
            settings: (0..n)
                .map(|theta| JointSetting {
                    theta,
                    table: table.clone(),
                })
                .collect(),
        }
    }

    #[test]
    fn witness_fires_on_ideal_statistics() {
        let r = witness(&ideal_tables(2, 2), EQUALITY_TOL).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-15 && (r.rhs - 1.5).abs() < 1e-15);
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn witness_silent_on_uniform_statistics() {
        let uniform = JointDistribution {
            d_a: 3,
            d_b: 2,
            settings: (0..3)
                .map(|theta| JointSetting {
                    theta,
                    table: vec![vec![1.0 / 6.0; 2]; 3],
                })
                .collect(),
        };
        let r = witness(&uniform, EQUALITY_TOL).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12);
        assert!(r.holds());
    }

    #[test]
    fn monogamy_analytic_cases() {
        let d = 3;
        let fam = mub_family(d).unwrap();
        // Φ_AB ⊗ |e⟩
        let psi = linops::tensor_vec(&max_entangled(d), &basis_vector(2, 0));
        let r = monogamy_report(&psi, [d, d, 2], &fam, TOL, MONOGAMY_TOL).unwrap();
        assert!(r.lhs.abs() < 1e-10 && r.rhs.abs() < 1e-10);
        // |a⟩ ⊗ Φ_BE
        let psi = linops::tensor_vec(&basis_vector(d, 1), &max_entangled(2));
        let r = monogamy_report(&psi, [d, 2, 2], &fam, TOL, MONOGAMY_TOL).unwrap();
        let log_d = (d as f64).log2();
        assert!((r.lhs - log_d).abs() < 1e-10 && (r.rhs - log_d).abs() < 1e-10);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn sweep_rejects_bad_input() {
        assert!(matches!(
            bound_sweep(4, 10),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(bound_sweep(5, 1), Err(Error::Parameter(_))));
        assert_eq!(bound_sweep(5, 3).unwrap().len(), 18);
    }

    #[test]
    fn report_verdict_tracks_tolerance() {
        let meta = ReportMetadata::default();
        assert!(RelationReport::at_most("x", 1.0, 2.0, 0.0, meta.clone()).holds());
        assert!(!RelationReport::at_most("x", 2.0, 1.0, 0.5, meta.clone()).holds());
        assert!(RelationReport::equality("x", 1.0, 1.0 + 1e-12, 1e-9, meta.clone()).holds());
        assert!(!RelationReport::equality("x", f64::NAN, 0.0, 1e-9, meta).holds());
    }
}
