use approx::assert_relative_eq;
use proptest::prelude::*;

use euq_core::designs::{mub_family, sic_povm};
use euq_core::entropies::{
    classical_h2_cond, family_guess_prob, h2, h2nu, joint_from_state, measure_in_basis,
    pg_recovery_fidelity, pg_recovery_fidelity_explicit, pgm_guess_prob, JointDistribution,
    JointSetting,
};
use euq_core::linops::{
    max_abs_entry, partial_trace, swap_operator, tensor, trace, trace_product, Subsystem,
    DEFAULT_RANK_TOL,
};
use euq_core::relations::{
    bound_curves, equality_report, nbasis_point, two_to_full_bound, witness, EQUALITY_TOL,
};
use euq_core::states::{
    random_density, random_density_with_dims, random_pure, random_separable_decomposed,
    random_unitary, schmidt_values,
};
use euq_core::{DensityMatrix, SeedSpec, StateVector};

const TOL: f64 = DEFAULT_RANK_TOL;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn prime_d() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 3, 5])
}

/// Random bipartite state with a random rank.
fn state(d_a: usize, d_b: usize, seed: u64, rank_frac: f64) -> DensityMatrix {
    let dim = d_a * d_b;
    let rank = 1 + ((dim - 1) as f64 * rank_frac) as usize;
    random_density_with_dims(vec![d_a, d_b], rank, SeedSpec::new(seed, 0)).unwrap()
}

fn basis_columns(u: &euq_core::ComplexMatrix) -> Vec<StateVector> {
    (0..u.ncols()).map(|j| u.column(j).into_owned()).collect()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn swap_trick(seed in any::<u64>(), d in 2usize..5) {
        let a = random_density(d, d, SeedSpec::new(seed, 0)).unwrap();
        let b = random_density(d, 1, SeedSpec::new(seed, 1)).unwrap();
        let lhs = trace(&(tensor(a.matrix(), b.matrix()) * swap_operator(d)));
        let rhs = trace_product(a.matrix(), b.matrix());
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let a = random_density(da, da, SeedSpec::new(seed, 0)).unwrap();
        let b = random_density(db, db, SeedSpec::new(seed, 1)).unwrap();
        let ab = tensor(a.matrix(), b.matrix());
        let ra = partial_trace(&ab, da, db, Subsystem::A).unwrap();
        let rb = partial_trace(&ab, da, db, Subsystem::B).unwrap();
        prop_assert!(max_abs_entry(&(ra - a.matrix())) < 1e-12);
        prop_assert!(max_abs_entry(&(rb - b.matrix())) < 1e-12);
    }

    #[test]
    fn pure_state_collision_from_schmidt(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        // 2^{−H_2(A|B)} of a pure state is (Σ √λ_i)²
        let psi = random_pure(da * db, SeedSpec::new(seed, 0));
        let rho = DensityMatrix::from_pure(&psi, vec![da, db]).unwrap();
        let root_sum: f64 = schmidt_values(&psi, da, db).unwrap().iter().filter(|&&l| l > 1e-12).map(|l| l.sqrt()).sum();
        prop_assert!((2f64.powf(-h2(&rho, TOL).unwrap()) - root_sum * root_sum).abs() < 1e-9);
    }

    #[test]
    fn collision_entropy_range(seed in any::<u64>(), da in 2usize..4, db in 1usize..4, r in 0.0f64..1.0, nu in 0.0f64..1.0) {
        let rho = state(da, db, seed, r);
        let h = h2nu(&rho, nu, TOL).unwrap();
        let log_d = (da as f64).log2();
        prop_assert!(h >= -log_d - 1e-9 && h <= log_d + 1e-9);
    }

    #[test]
    fn entropy_invariant_under_local_unitaries(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let rho = state(da, db, seed, 0.5);
        let u = tensor(
            &random_unitary(da, SeedSpec::new(seed, 1)),
            &random_unitary(db, SeedSpec::new(seed, 2)),
        );
        let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint(), vec![da, db]).unwrap();
        for nu in [0.0, 0.5, 1.0] {
            let h0 = h2nu(&rho, nu, TOL).unwrap();
            let h1 = h2nu(&rotated, nu, TOL).unwrap();
            prop_assert!((h0 - h1).abs() < 1e-9);
        }
    }

    #[test]
    fn recovery_routes_agree(seed in any::<u64>(), da in 2usize..4, db in 1usize..4, r in 0.0f64..1.0) {
        let rho = state(da, db, seed, r);
        let f = pg_recovery_fidelity(&rho, TOL).unwrap();
        let g = pg_recovery_fidelity_explicit(&rho, TOL).unwrap();
        prop_assert!((f - g).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn main_equality_all_nu(seed in any::<u64>(), d in prime_d(), db in 1usize..4, r in 0.0f64..1.0, nu in 0.0f64..1.0) {
        let rho = state(d, db, seed, r);
        let report = equality_report(&rho, &mub_family(d).unwrap(), nu, TOL, EQUALITY_TOL).unwrap();
        prop_assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn sic_equality(seed in any::<u64>(), d in 2usize..4, db in 1usize..4, r in 0.0f64..1.0) {
        let rho = state(d, db, seed, r);
        let report = equality_report(&rho, &sic_povm(d).unwrap(), 0.0, TOL, EQUALITY_TOL).unwrap();
        prop_assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn full_set_guessing_is_affine_in_fidelity(seed in any::<u64>(), d in prime_d(), db in 1usize..4, r in 0.0f64..1.0) {
        let rho = state(d, db, seed, r);
        let p = family_guess_prob(&rho, &mub_family(d).unwrap(), TOL).unwrap().average;
        let f = pg_recovery_fidelity(&rho, TOL).unwrap();
        let df = d as f64;
        prop_assert!((p - (df * f + 1.0) / (df + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn nbasis_points_inside_bounds(seed in any::<u64>(), d in prime_d(), db in 1usize..4, r in 0.0f64..1.0, n_frac in 0.0f64..1.0) {
        let rho = state(d, db, seed, r);
        let n = 1 + (d as f64 * n_frac) as usize;
        let p = nbasis_point(&rho, &mub_family(d).unwrap(), n, TOL).unwrap();
        prop_assert!(p.p_n >= p.lower - 1e-9 && p.p_n <= p.upper + 1e-9, "{p:?}");
    }

    #[test]
    fn single_basis_guessing_floor(seed in any::<u64>(), d in 2usize..5, db in 1usize..4, r in 0.0f64..1.0) {
        let rho = state(d, db, seed, r);
        let basis = basis_columns(&random_unitary(d, SeedSpec::new(seed, 7)));
        let p = pgm_guess_prob(&measure_in_basis(&rho, &basis).unwrap(), TOL).unwrap();
        let f = pg_recovery_fidelity(&rho, TOL).unwrap();
        prop_assert!(p >= f - 1e-9 && p >= 1.0 / d as f64 - 1e-9);
    }

    #[test]
    fn two_to_all(seed in any::<u64>(), d in prime_d(), db in 1usize..4, r in 0.0f64..1.0) {
        let rho = state(d, db, seed, r);
        let g = family_guess_prob(&rho, &mub_family(d).unwrap(), TOL).unwrap();
        let p2 = (g.per_setting[0] + g.per_setting[1]) / 2.0;
        prop_assert!(g.average >= two_to_full_bound(p2, d).unwrap() - 1e-9);
    }

    #[test]
    fn data_processing(seed in any::<u64>(), d in 2usize..4, db in 2usize..4, r in 0.0f64..1.0) {
        let rho = state(d, db, seed, r);
        let basis_a = basis_columns(&random_unitary(d, SeedSpec::new(seed, 3)));
        let basis_b = basis_columns(&random_unitary(db, SeedSpec::new(seed, 4)));
        let quantum = pgm_guess_prob(&measure_in_basis(&rho, &basis_a).unwrap(), TOL).unwrap();
        // 2^{−H_2(K|B)} is the PGM guessing probability; measuring B cannot raise it
        let table = joint_from_state(&rho, &basis_a, &basis_b).unwrap();
        prop_assert!(2f64.powf(-classical_h2_cond(&table)) <= quantum + 1e-10);
    }

    #[test]
    fn separable_never_fires_witness(seed in any::<u64>(), d in 2usize..4, terms in 1usize..5, n_frac in 0.0f64..1.0) {
        let sample = random_separable_decomposed(d, d, terms, SeedSpec::new(seed, 0)).unwrap();
        let mubs = mub_family(d).unwrap();
        let n = 2 + ((d - 1) as f64 * n_frac) as usize;
        let settings = (0..n)
            .map(|theta| {
                let basis_a: Vec<StateVector> = mubs.settings()[theta].iter().map(|e| e.vector.clone()).collect();
                let basis_b = basis_columns(&random_unitary(d, SeedSpec::new(seed, 100 + theta as u64)));
                JointSetting { theta, table: joint_from_state(&sample.state, &basis_a, &basis_b).unwrap() }
            })
            .collect();
        let joints = JointDistribution { d_a: d, d_b: d, settings };
        let report = witness(&joints, EQUALITY_TOL).unwrap();
        prop_assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn bounds_are_ordered(d in prime_d(), t in 0.0f64..1.0, n_frac in 0.0f64..1.0) {
        // no state has F^pg below 1/d²
        let floor = 1.0 / (d * d) as f64;
        let f = floor + t * (1.0 - floor);
        let n = 1 + (d as f64 * n_frac) as usize;
        let (lo, hi) = bound_curves(d, n, f).unwrap();
        prop_assert!(lo <= hi + 1e-15);
    }
}

#[test]
fn mixed_ranks_reach_both_extremes() {
    let low = state(3, 2, 1, 0.0);
    let high = state(3, 2, 1, 1.0);
    assert_relative_eq!(low.purity(), 1.0, epsilon = 1e-12);
    assert!(high.purity() < 1.0);
}
