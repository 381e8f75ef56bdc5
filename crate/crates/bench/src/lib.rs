//! Benchmark fixtures shared by the criterion targets.

use euq_core::states::random_density_with_dims;
use euq_core::{DensityMatrix, SeedSpec};

/// Full-rank seeded state on `C^d_a ⊗ C^d_b`.
pub fn fixture(d_a: usize, d_b: usize) -> DensityMatrix {
    random_density_with_dims(vec![d_a, d_b], d_a * d_b, SeedSpec::new(42, 0))
        .expect("valid dimensions")
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixture_is_deterministic() {
        assert_eq!(super::fixture(3, 2), super::fixture(3, 2));
    }
}
