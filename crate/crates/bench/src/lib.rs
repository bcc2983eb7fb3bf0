//! Shared fixtures for the kernel benchmarks under `benches/`.

use fracext::knapp::{build_family, KnappFamily, KnappParams, PhiSpec};
use fracext::measure::{build_self_similar, discretize_power_density, PowerDensity, DEFAULT_ATOM_CAP};
use fracext::{DiscreteMeasure, SimilarityIfs};

pub fn cantor(depth: usize) -> DiscreteMeasure {
    build_self_similar(&SimilarityIfs::middle_third(), depth, DEFAULT_ATOM_CAP).expect("cantor measure")
}

pub fn power_density(exponent: f64, cells: usize) -> DiscreteMeasure {
    discretize_power_density(&PowerDensity::new(exponent).expect("exponent"), cells).expect("power density")
}

/// The `α = β = (0.4, 0.4)` family at `ε = 1`.
pub fn pair_family(n_max: usize, seed: u64) -> KnappFamily {
    build_family(&KnappParams {
        k: 2,
        alphas: vec![0.4, 0.4],
        betas: vec![0.4, 0.4],
        phi: PhiSpec { epsilon: 1.0 },
        n_max,
        seed,
    })
    .expect("pair family")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(cantor(4).len(), 16);
        assert_eq!(power_density(0.6, 64).len(), 64);
        assert_eq!(pair_family(2, 0).k(), 2);
    }
}
