//! Monte Carlo simulation of the uncertainty game.
//!
//! Alice draws a setting and measures `A`; Bob applies the pretty good
//! measurement for that setting to `B` and wins when his outcome matches.
//! Each trial consumes exactly three uniforms, so trial `t` always reads the
//! same slice of the ChaCha20 stream and sharded runs are bit-identical to a
//! sequential one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designs::MeasurementFamily;
use crate::entropies::{measure_effects, pgm_operators};
use crate::error::{Error, Result};
use crate::linops::trace_product;
use crate::states::{DensityMatrix, RandomSource, SeedSpec};

/// ChaCha words consumed per trial (three `u64` draws).
const WORDS_PER_TRIAL: u128 = 6;
/// Trials per parallel shard.
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingTally {
    pub setting: usize,
    pub trials: u64,
    pub wins: u64,
    pub empirical_rate: f64,
    pub analytic_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub trials: u64,
    pub wins: u64,
    pub empirical_rate: f64,
    pub analytic_rate: f64,
    pub std_error: f64,
    pub seed: SeedSpec,
    pub per_setting: Vec<SettingTally>,
}

impl GameResult {
    /// `|empirical − analytic|` in units of the standard error.
    /// Zero when both rates coincide, even if the standard error vanishes.
    pub fn z_score(&self) -> f64 {
        let diff = (self.empirical_rate - self.analytic_rate).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn within_band(&self, sigmas: f64) -> bool {
        self.z_score() <= sigmas
    }
}

/// Cumulative distribution for inverse-CDF sampling.
#[derive(Debug, Clone)]
struct Categorical {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl Categorical {
    fn new(probs: &[f64]) -> Self {
        let clipped: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let mut acc = 0.0;
        let cumulative = clipped
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect();
        let last_positive = clipped.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Self {
            cumulative,
            last_positive,
        }
    }

    fn sample(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.last_positive)
            .min(self.last_positive)
    }
}

/// Sampling tables for one setting: Alice's outcome distribution and, per
/// outcome, Bob's conditional PGM distribution.
#[derive(Debug, Clone)]
struct SettingTables {
    alice: Categorical,
    bob: Vec<Option<Categorical>>,
    analytic: f64,
}

fn setting_tables(
    rho: &DensityMatrix,
    effects: &[crate::designs::Effect],
    rank_tol: f64,
) -> Result<SettingTables> {
    let conds = measure_effects(rho, effects)?;
    let pgm = pgm_operators(&conds, rank_tol)?;
    let alice_probs: Vec<f64> = conds.iter().map(|c| c.trace().re).collect();
    let mut analytic = 0.0;
    let bob = conds
        .iter()
        .zip(&alice_probs)
        .enumerate()
        .map(|(k, (rk, &pk))| {
            if pk <= 0.0 {
                return None;
            }
            let joint: Vec<f64> = pgm.iter().map(|pj| trace_product(pj, rk).re).collect();
            analytic += joint[k];
            Some(Categorical::new(&joint))
        })
        .collect();
    Ok(SettingTables {
        alice: Categorical::new(&alice_probs),
        bob,
        analytic,
    })
}

/// Simulates `trials` rounds of the game on `ρ_AB` with the given basis family.
pub fn simulate_game(
    rho: &DensityMatrix,
    family: &MeasurementFamily,
    trials: u64,
    seed: SeedSpec,
    rank_tol: f64,
) -> Result<GameResult> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    if !family.is_basis_family() {
        return Err(Error::Parameter(format!(
            "the game needs a family of bases, got {}",
            family.kind().label()
        )));
    }
    let (d_a, _) = rho.bipartite_dims()?;
    if family.d() != d_a {
        return Err(Error::Dimension(format!(
            "family acts on dimension {}, state has d_A = {d_a}",
            family.d()
        )));
    }
    let tables = family
        .settings()
        .iter()
        .map(|s| setting_tables(rho, s, rank_tol))
        .collect::<Result<Vec<_>>>()?;
    let setting_dist = Categorical::new(family.setting_weights());
    let n_settings = tables.len();

    let n_chunks = trials.div_ceil(CHUNK);
    let (counts, wins) = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(trials);
            let mut rng = seed.rng();
            rng.set_word_pos(start as u128 * WORDS_PER_TRIAL);
            let mut src = RandomSource::from_rng(rng);
            let mut counts = vec![0u64; n_settings];
            let mut wins = vec![0u64; n_settings];
            for _ in start..end {
                let theta = setting_dist.sample(src.uniform());
                let t = &tables[theta];
                let k = t.alice.sample(src.uniform());
                let u_bob = src.uniform();
                counts[theta] += 1;
                if let Some(bob) = &t.bob[k] {
                    if bob.sample(u_bob) == k {
                        wins[theta] += 1;
                    }
                }
            }
            (counts, wins)
        })
        .reduce(
            || (vec![0u64; n_settings], vec![0u64; n_settings]),
            |(mut c1, mut w1), (c2, w2)| {
                for i in 0..n_settings {
                    c1[i] += c2[i];
                    w1[i] += w2[i];
                }
                (c1, w1)
            },
        );

    let analytic_rate: f64 = tables
        .iter()
        .zip(family.setting_weights())
        .map(|(t, w)| w * t.analytic)
        .sum();
    let total_wins: u64 = wins.iter().sum();
    let per_setting = (0..n_settings)
        .map(|i| SettingTally {
            setting: i,
            trials: counts[i],
            wins: wins[i],
            empirical_rate: if counts[i] > 0 {
                wins[i] as f64 / counts[i] as f64
            } else {
                0.0
            },
            analytic_rate: tables[i].analytic,
        })
        .collect();
    let p = analytic_rate.clamp(0.0, 1.0);
    Ok(GameResult {
        trials,
        wins: total_wins,
        empirical_rate: total_wins as f64 / trials as f64,
        analytic_rate,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        seed,
        per_setting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::mub_family;
    use crate::entropies::family_guess_prob;
    use crate::linops::{max_entangled, DEFAULT_RANK_TOL};
    use crate::states::random_density_with_dims;

    #[test]
    fn max_entangled_always_wins() {
        let rho = DensityMatrix::from_pure(&max_entangled(2), vec![2, 2]).unwrap();
        let r = simulate_game(
            &rho,
            &mub_family(2).unwrap(),
            10_000,
            SeedSpec::new(1, 0),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(r.wins, r.trials);
        assert_eq!(r.empirical_rate, 1.0);
        assert!(r.within_band(4.0));
    }

    #[test]
    fn maximally_mixed_wins_half() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        let r = simulate_game(
            &rho,
            &mub_family(2).unwrap(),
            100_000,
            SeedSpec::new(3, 0),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert!((r.analytic_rate - 0.5).abs() < 1e-12);
        assert!(r.within_band(4.0), "z = {}", r.z_score());
    }

    #[test]
    fn analytic_rate_matches_guess_probability() {
        let rho = random_density_with_dims(vec![3, 2], 3, SeedSpec::new(5, 0)).unwrap();
        let fam = mub_family(3).unwrap();
        let r = simulate_game(&rho, &fam, 100_000, SeedSpec::new(9, 0), DEFAULT_RANK_TOL).unwrap();
        let g = family_guess_prob(&rho, &fam, DEFAULT_RANK_TOL).unwrap();
        assert!((r.analytic_rate - g.average).abs() < 1e-12);
        for (t, p) in r.per_setting.iter().zip(&g.per_setting) {
            assert!((t.analytic_rate - p).abs() < 1e-12);
            let sigma = (p * (1.0 - p) / t.trials as f64).sqrt();
            assert!((t.empirical_rate - p).abs() <= 5.0 * sigma);
        }
        assert!(r.within_band(4.0), "z = {}", r.z_score());
    }

    #[test]
    fn sharding_matches_sequential_stream() {
        let rho = random_density_with_dims(vec![2, 2], 2, SeedSpec::new(11, 0)).unwrap();
        let fam = mub_family(2).unwrap();
        let seed = SeedSpec::new(4, 2);
        let trials = 2 * CHUNK + 17;
        let r = simulate_game(&rho, &fam, trials, seed, DEFAULT_RANK_TOL).unwrap();

        let tables: Vec<_> = fam
            .settings()
            .iter()
            .map(|s| setting_tables(&rho, s, DEFAULT_RANK_TOL).unwrap())
            .collect();
        let dist = Categorical::new(fam.setting_weights());
        let mut src = seed.source();
        let mut wins = 0u64;
        for _ in 0..trials {
            let t = &tables[dist.sample(src.uniform())];
            let k = t.alice.sample(src.uniform());
            let u = src.uniform();
            if t.bob[k].as_ref().is_some_and(|b| b.sample(u) == k) {
                wins += 1;
            }
        }
        assert_eq!(r.wins, wins);
        let again = simulate_game(&rho, &fam, trials, seed, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn rejects_zero_trials_and_povms() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        let s = SeedSpec::new(0, 0);
        assert!(simulate_game(&rho, &mub_family(2).unwrap(), 0, s, DEFAULT_RANK_TOL).is_err());
        let sic = crate::designs::sic_povm(2).unwrap();
        assert!(matches!(
            simulate_game(&rho, &sic, 10, s, DEFAULT_RANK_TOL),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn categorical_never_picks_zero_mass() {
        let c = Categorical::new(&[0.5, 0.5, 0.0]);
        assert_eq!(c.sample(0.0), 0);
        assert_eq!(c.sample(0.999_999_999_999), 1);
        assert_eq!(c.sample(1.0), 1);
    }
}
