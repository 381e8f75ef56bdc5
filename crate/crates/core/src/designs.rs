//! Measurement families whose pooled vectors form complex projective 2-designs.
//!
//! A family is a list of settings; each setting is a POVM of rank-1 effects
//! `w |v⟩⟨v|`. Families that certify the uncertainty equality carry an
//! equality constant `c` with `Σ_θ p_θ Σ_k E_θk ⊗ E_θk = (𝟙 + F) / c`:
//! `d + 1` for complete MUB sets and Clifford orbits, `d (d + 1)` for SIC-POVMs.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{
    self, basis_vector, c, identity, projector, swap_operator, ComplexMatrix, StateVector,
};

const COMPLETENESS_TOL: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-11;

/// Rank-one POVM element `weight · |vector⟩⟨vector|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    pub weight: f64,
    pub vector: StateVector,
}

impl Effect {
    pub fn new(weight: f64, vector: StateVector) -> Self {
        Self { weight, vector }
    }

    pub fn operator(&self) -> ComplexMatrix {
        projector(&self.vector).scale(self.weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    MubComplete,
    MubSubset(usize),
    Sic,
    CliffordOrbit,
    Custom,
}

impl FamilyKind {
    pub fn label(&self) -> String {
        match self {
            FamilyKind::MubComplete => "mub-complete".into(),
            FamilyKind::MubSubset(n) => format!("mub-subset({n})"),
            FamilyKind::Sic => "sic".into(),
            FamilyKind::CliffordOrbit => "clifford-orbit".into(),
            FamilyKind::Custom => "custom".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFamily {
    d: usize,
    kind: FamilyKind,
    settings: Vec<Vec<Effect>>,
    setting_weights: Vec<f64>,
    equality_constant: Option<f64>,
}

impl MeasurementFamily {
    /// Builds a family after checking completeness of every setting,
    /// normalization of every vector and that the setting weights sum to one.
    ///
    /// The equality constant is fixed by `kind`; for [`FamilyKind::Custom`]
    /// the caller's `custom_constant` is kept as given.
    pub fn new(
        d: usize,
        kind: FamilyKind,
        settings: Vec<Vec<Effect>>,
        setting_weights: Vec<f64>,
        custom_constant: Option<f64>,
    ) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::Parameter(
                "a family needs at least one setting".into(),
            ));
        }
        if setting_weights.len() != settings.len() {
            return Err(Error::Parameter(format!(
                "{} setting weights for {} settings",
                setting_weights.len(),
                settings.len()
            )));
        }
        if setting_weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::Parameter(
                "setting weights must be nonnegative".into(),
            ));
        }
        let total: f64 = setting_weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("setting weights sum to {total}")));
        }
        for (s, setting) in settings.iter().enumerate() {
            let mut sum = ComplexMatrix::zeros(d, d);
            for (k, effect) in setting.iter().enumerate() {
                if effect.vector.len() != d {
                    return Err(Error::Dimension(format!(
                        "setting {s} effect {k} has length {}, expected {d}",
                        effect.vector.len()
                    )));
                }
                if (effect.vector.norm() - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::Parameter(format!(
                        "setting {s} effect {k} is not normalized"
                    )));
                }
                if effect.weight.is_nan() || effect.weight < 0.0 {
                    return Err(Error::Parameter(format!(
                        "setting {s} effect {k} has negative weight"
                    )));
                }
                sum += effect.operator();
            }
            if linops::max_abs_entry(&(sum - identity(d))) > COMPLETENESS_TOL {
                return Err(Error::Parameter(format!(
                    "effects of setting {s} do not sum to the identity"
                )));
            }
        }
        let df = d as f64;
        let equality_constant = match kind {
            FamilyKind::MubComplete | FamilyKind::CliffordOrbit => Some(df + 1.0),
            FamilyKind::Sic => Some(df * (df + 1.0)),
            FamilyKind::MubSubset(_) => None,
            FamilyKind::Custom => custom_constant,
        };
        Ok(Self {
            d,
            kind,
            settings,
            setting_weights,
            equality_constant,
        })
    }

    /// Uniformly weighted family of orthonormal bases (columns of each unitary).
    pub fn from_bases(d: usize, kind: FamilyKind, bases: Vec<Vec<StateVector>>) -> Result<Self> {
        let n = bases.len();
        let settings = bases
            .into_iter()
            .map(|b| b.into_iter().map(|v| Effect::new(1.0, v)).collect())
            .collect();
        Self::new(d, kind, settings, vec![1.0 / n as f64; n], None)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn settings(&self) -> &[Vec<Effect>] {
        &self.settings
    }

    pub fn setting_weights(&self) -> &[f64] {
        &self.setting_weights
    }

    pub fn equality_constant(&self) -> Option<f64> {
        self.equality_constant
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    /// True if every setting is `d` unit-weight orthonormal vectors.
    pub fn is_basis_family(&self) -> bool {
        self.settings.iter().all(|s| {
            s.len() == self.d
                && s.iter().all(|e| (e.weight - 1.0).abs() < 1e-12)
                && s.iter().enumerate().all(|(i, a)| {
                    s.iter().enumerate().all(|(j, b)| {
                        let ip = (a.vector.adjoint() * &b.vector)[(0, 0)].norm();
                        let target = if i == j { 1.0 } else { 0.0 };
                        (ip - target).abs() < 1e-10
                    })
                })
        })
    }

    /// The first `n` bases of a complete MUB family, uniformly weighted.
    pub fn mub_prefix(&self, n: usize) -> Result<Self> {
        if self.kind != FamilyKind::MubComplete {
            return Err(Error::UnsupportedFamily(format!(
                "prefix subsets are taken from complete MUB sets, not {}",
                self.kind.label()
            )));
        }
        if n == 0 || n > self.len() {
            return Err(Error::Parameter(format!(
                "subset size must lie in 1..={}, got {n}",
                self.len()
            )));
        }
        if n == self.len() {
            return Ok(self.clone());
        }
        let settings = self.settings[..n].to_vec();
        Self::new(
            self.d,
            FamilyKind::MubSubset(n),
            settings,
            vec![1.0 / n as f64; n],
            None,
        )
    }

    /// Every vector of every setting, in construction order.
    pub fn pooled_vectors(&self) -> impl Iterator<Item = &StateVector> {
        self.settings.iter().flatten().map(|e| &e.vector)
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            d: self.d,
            kind: self.kind,
            settings: self
                .settings
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|e| EffectFile {
                            weight: e.weight,
                            re: e.vector.iter().map(|z| z.re).collect(),
                            im: e.vector.iter().map(|z| z.im).collect(),
                        })
                        .collect()
                })
                .collect(),
            setting_weights: Some(self.setting_weights.clone()),
            equality_constant: self.equality_constant,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("family serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile =
            serde_json::from_str(text).map_err(|e| Error::format("$", e.to_string()))?;
        file.into_family()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectFile {
    pub weight: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// JSON form of a family: `{d, kind, settings: [[{weight, re, im}]], equality_constant}`.
/// `setting_weights` is optional and defaults to uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub d: usize,
    pub kind: FamilyKind,
    pub settings: Vec<Vec<EffectFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub equality_constant: Option<f64>,
}

impl FamilyFile {
    pub fn into_family(self) -> Result<MeasurementFamily> {
        let n = self.settings.len();
        let mut settings = Vec::with_capacity(n);
        for (s, setting) in self.settings.into_iter().enumerate() {
            let mut effects = Vec::with_capacity(setting.len());
            for (k, e) in setting.into_iter().enumerate() {
                if e.re.len() != self.d || e.im.len() != self.d {
                    return Err(Error::format(
                        format!("settings[{s}][{k}]"),
                        format!("expected {} amplitudes", self.d),
                    ));
                }
                let v = StateVector::from_iterator(
                    self.d,
                    e.re.iter().zip(&e.im).map(|(&r, &i)| Complex64::new(r, i)),
                );
                effects.push(Effect::new(e.weight, v));
            }
            settings.push(effects);
        }
        let weights = self
            .setting_weights
            .unwrap_or_else(|| vec![1.0 / n.max(1) as f64; n]);
        let family =
            MeasurementFamily::new(self.d, self.kind, settings, weights, self.equality_constant)?;
        if let (Some(given), Some(fixed)) = (self.equality_constant, family.equality_constant) {
            if (given - fixed).abs() > 1e-12 {
                return Err(Error::format(
                    "equality_constant",
                    format!(
                        "{} families use constant {fixed}, file says {given}",
                        self.kind.label()
                    ),
                ));
            }
        }
        Ok(family)
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

fn root_of_unity(d: usize, power: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (power % d) as f64 / d as f64)
}

/// Complete set of `d + 1` mutually unbiased bases for prime `d`.
///
/// Setting 0 is the computational basis. For `d = 2` the remaining settings
/// are the X and Y eigenbases; for odd primes they are
/// `|v^a_k⟩ = d^{-1/2} Σ_j ω^{a j² + k j} |j⟩` for `a = 0..d`.
pub fn mub_family(d: usize) -> Result<MeasurementFamily> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension {
            d,
            reason: "complete MUB sets are only constructed for prime dimensions".into(),
        });
    }
    let mut bases: Vec<Vec<StateVector>> = vec![(0..d).map(|k| basis_vector(d, k)).collect()];
    if d == 2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mk = |a: Complex64, b: Complex64| StateVector::from_vec(vec![a, b]);
        bases.push(vec![mk(c(h, 0.0), c(h, 0.0)), mk(c(h, 0.0), c(-h, 0.0))]);
        bases.push(vec![mk(c(h, 0.0), c(0.0, h)), mk(c(h, 0.0), c(0.0, -h))]);
    } else {
        let amp = 1.0 / (d as f64).sqrt();
        for a in 0..d {
            let basis = (0..d)
                .map(|k| StateVector::from_fn(d, |j, _| root_of_unity(d, a * j * j + k * j) * amp))
                .collect();
            bases.push(basis);
        }
    }
    MeasurementFamily::from_bases(d, FamilyKind::MubComplete, bases)
}

/// Weyl–Heisenberg SIC-POVM for `d ∈ {2, 3}`: the orbit of a fixed fiducial
/// under `X^p Z^q`, effects `(1/d) |ψ_k⟩⟨ψ_k|`.
pub fn sic_povm(d: usize) -> Result<MeasurementFamily> {
    let fiducial = match d {
        2 => {
            // tetrahedron vertex: cos θ = 1/√3, azimuth π/4
            let cos_t = 1.0 / 3.0_f64.sqrt();
            let a = ((1.0 + cos_t) / 2.0).sqrt();
            let b = ((1.0 - cos_t) / 2.0).sqrt();
            StateVector::from_vec(vec![c(a, 0.0), Complex64::from_polar(b, PI / 4.0)])
        }
        3 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            StateVector::from_vec(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0)])
        }
        _ => {
            return Err(Error::UnsupportedDimension {
                d,
                reason: "SIC-POVMs are provided for d = 2 and d = 3 only".into(),
            })
        }
    };
    let weight = 1.0 / d as f64;
    let mut effects = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            effects.push(Effect::new(weight, weyl_displace(&fiducial, p, q)));
        }
    }
    MeasurementFamily::new(d, FamilyKind::Sic, vec![effects], vec![1.0], None)
}

/// `X^p Z^q |ψ⟩` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j |j⟩`.
pub fn weyl_displace(psi: &StateVector, p: usize, q: usize) -> StateVector {
    let d = psi.len();
    let z = StateVector::from_fn(d, |j, _| psi[j] * root_of_unity(d, q * j));
    StateVector::from_fn(d, |j, _| z[(j + d - p % d) % d])
}

/// Makes the first entry of non-negligible magnitude real and positive.
fn fix_global_phase(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.nrows();
    for i in 0..n {
        for j in 0..u.ncols() {
            let z = u[(i, j)];
            if z.norm() > 1e-9 {
                let phase = z.conj() / z.norm();
                return u.map(|w| w * phase);
            }
        }
    }
    u.clone()
}

fn phase_key(u: &ComplexMatrix) -> Vec<(i64, i64)> {
    // row-major so the key does not depend on storage order
    let mut key = Vec::with_capacity(u.len());
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            let z = u[(i, j)];
            key.push(((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64));
        }
    }
    key
}

/// Single-qubit Clifford group modulo global phase, generated by closure
/// from the Hadamard and phase gates. Each element is phase-fixed.
pub fn clifford_group() -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard =
        ComplexMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
    let phase =
        ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
    let generators = [hadamard, phase];

    let start = identity(2);
    let mut seen: HashSet<Vec<(i64, i64)>> = HashSet::new();
    seen.insert(phase_key(&start));
    let mut group = vec![start];
    let mut frontier = 0;
    while frontier < group.len() {
        let current = group[frontier].clone();
        frontier += 1;
        for g in &generators {
            let next = fix_global_phase(&(g * &current));
            if seen.insert(phase_key(&next)) {
                group.push(next);
            }
        }
    }
    group
}

/// Whether `u` equals some element of `group` up to a global phase.
pub fn contains_up_to_phase(group: &[ComplexMatrix], u: &ComplexMatrix) -> bool {
    let key = phase_key(&fix_global_phase(u));
    group.iter().any(|g| phase_key(g) == key)
}

/// Rotated computational bases `{U|0⟩, U|1⟩}` over the 24 single-qubit Cliffords.
pub fn clifford_orbit_family() -> Result<MeasurementFamily> {
    let bases = clifford_group()
        .into_iter()
        .map(|u| (0..2).map(|k| u.column(k).into_owned()).collect())
        .collect();
    MeasurementFamily::from_bases(2, FamilyKind::CliffordOrbit, bases)
}

/// Frobenius distance between the uniform second moment of the pooled
/// vectors and `(𝟙 + F) / (d (d + 1))`.
pub fn design_defect(family: &MeasurementFamily) -> f64 {
    let d = family.d();
    let mut moment = ComplexMatrix::zeros(d * d, d * d);
    let mut count = 0usize;
    for v in family.pooled_vectors() {
        let vv = linops::tensor_vec(v, v);
        moment += projector(&vv);
        count += 1;
    }
    moment /= c(count as f64, 0.0);
    let target = (identity(d * d) + swap_operator(d)).scale(1.0 / (d * (d + 1)) as f64);
    (moment - target).norm()
}

/// Largest deviation of a cross-basis overlap `|⟨x|y⟩|²` from `1/d`.
pub fn unbiasedness_defect(family: &MeasurementFamily) -> Result<f64> {
    if !family.is_basis_family() {
        return Err(Error::UnsupportedFamily(format!(
            "unbiasedness is defined for orthonormal-basis settings, not {}",
            family.kind().label()
        )));
    }
    let inv_d = 1.0 / family.d() as f64;
    let settings = family.settings();
    let mut worst = 0.0_f64;
    for (i, a) in settings.iter().enumerate() {
        for b in &settings[i + 1..] {
            for x in a {
                for y in b {
                    let ov = (x.vector.adjoint() * &y.vector)[(0, 0)].norm_sqr();
                    worst = worst.max((ov - inv_d).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overlap_sq(a: &StateVector, b: &StateVector) -> f64 {
        (a.adjoint() * b)[(0, 0)].norm_sqr()
    }

    #[test]
    fn pauli_bases_are_unbiased() {
        let fam = mub_family(2).unwrap();
        assert_eq!(fam.len(), 3);
        assert!(unbiasedness_defect(&fam).unwrap() < 1e-15);
        assert_eq!(fam.equality_constant(), Some(3.0));
    }

    #[test]
    fn mub_five_is_a_design() {
        let fam = mub_family(5).unwrap();
        assert_eq!(fam.len(), 6);
        assert!(design_defect(&fam) < 1e-11);
    }

    #[test]
    fn composite_dimension_rejected() {
        assert!(matches!(
            mub_family(4),
            Err(Error::UnsupportedDimension { d: 4, .. })
        ));
        assert!(matches!(
            mub_family(1),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn mub_seven_unbiased() {
        assert!(unbiasedness_defect(&mub_family(7).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn duplicated_basis_is_maximally_biased() {
        for d in [2, 3] {
            let basis: Vec<StateVector> = (0..d).map(|k| basis_vector(d, k)).collect();
            let fam =
                MeasurementFamily::from_bases(d, FamilyKind::Custom, vec![basis.clone(), basis])
                    .unwrap();
            let defect = unbiasedness_defect(&fam).unwrap();
            assert!((defect - (1.0 - 1.0 / d as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn sic_qubit_is_tetrahedron() {
        let fam = sic_povm(2).unwrap();
        let vecs: Vec<_> = fam.pooled_vectors().cloned().collect();
        assert_eq!(vecs.len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!((overlap_sq(&vecs[i], &vecs[j]) - 1.0 / 3.0).abs() < 1e-12);
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(2, 2);
        for e in &fam.settings()[0] {
            sum += e.operator();
        }
        assert!(linops::max_abs_entry(&(sum - identity(2))) < 1e-11);
        assert_eq!(fam.equality_constant(), Some(6.0));
    }

    #[test]
    fn sic_qutrit_overlaps_and_design() {
        let fam = sic_povm(3).unwrap();
        let vecs: Vec<_> = fam.pooled_vectors().cloned().collect();
        assert_eq!(vecs.len(), 9);
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    assert!((overlap_sq(&vecs[i], &vecs[j]) - 0.25).abs() < 1e-10);
                }
            }
        }
        assert!(design_defect(&fam) < 1e-10);
        assert!(matches!(
            sic_povm(4),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            unbiasedness_defect(&fam),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn clifford_group_has_24_elements_and_closes() {
        let group = clifford_group();
        assert_eq!(group.len(), 24);
        for a in &group {
            assert!(linops::max_abs_entry(&(a.adjoint() * a - identity(2))) < 1e-12);
            for b in &group {
                assert!(contains_up_to_phase(&group, &(a * b)));
            }
        }
    }

    #[test]
    fn clifford_orbit_of_zero_is_octahedron() {
        let group = clifford_group();
        let zero = basis_vector(2, 0);
        let orbit: Vec<StateVector> = group.iter().map(|u| u * &zero).collect();
        // group the orbit into classes of equal rays
        let mut classes: Vec<(StateVector, usize)> = Vec::new();
        for v in orbit {
            match classes
                .iter_mut()
                .find(|(r, _)| (overlap_sq(r, &v) - 1.0).abs() < 1e-10)
            {
                Some(entry) => entry.1 += 1,
                None => classes.push((v, 1)),
            }
        }
        assert_eq!(classes.len(), 6);
        assert!(classes.iter().all(|(_, m)| *m == 4));
        // octahedron: distinct rays overlap 0 or 1/2
        for (i, (a, _)) in classes.iter().enumerate() {
            for (b, _) in &classes[i + 1..] {
                let ov = overlap_sq(a, b);
                assert!(ov.abs() < 1e-12 || (ov - 0.5).abs() < 1e-12);
            }
        }
        assert!(design_defect(&clifford_orbit_family().unwrap()) < 1e-11);
    }

    #[test]
    fn single_basis_design_defect() {
        let basis: Vec<StateVector> = (0..2).map(|k| basis_vector(2, k)).collect();
        let fam = MeasurementFamily::from_bases(2, FamilyKind::Custom, vec![basis]).unwrap();
        let defect = design_defect(&fam);
        assert!((defect - (1.0f64 / 6.0).sqrt()).abs() < 1e-12, "{defect}");
    }

    #[test]
    fn incomplete_setting_rejected() {
        let effects = vec![Effect::new(1.0, basis_vector(2, 0))];
        let err = MeasurementFamily::new(2, FamilyKind::Custom, vec![effects], vec![1.0], None)
            .unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn family_json_round_trip() {
        let fam = mub_family(3).unwrap();
        let back = MeasurementFamily::from_json(&fam.to_json()).unwrap();
        assert_eq!(back.kind(), FamilyKind::MubComplete);
        assert_eq!(back.len(), 4);
        assert!(design_defect(&back) < 1e-11);
        let mut file = fam.to_file();
        file.equality_constant = Some(12.0);
        let text = serde_json::to_string(&file).unwrap();
        assert!(matches!(
            MeasurementFamily::from_json(&text),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn mub_prefix_subsets() {
        let fam = mub_family(5).unwrap();
        let sub = fam.mub_prefix(2).unwrap();
        assert_eq!(sub.kind(), FamilyKind::MubSubset(2));
        assert_eq!(sub.equality_constant(), None);
        assert!(fam.mub_prefix(0).is_err() && fam.mub_prefix(7).is_err());
    }
}
