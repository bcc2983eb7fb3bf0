use fracext::combinatorics::{count_solutions, g_histogram, norm_identity_check};
use fracext::convolution::{convolve_grid, density_lp_norm};
use fracext::dimension::lq_dimension_homogeneous;
use fracext::extension::{evaluate_on_grid, lq_freq_norm};
use fracext::knapp::{build_family, knapp_indicator, KnappParams, PhiSpec};
use fracext::measure::{build_self_similar, discretize_power_density, PowerDensity, DEFAULT_ATOM_CAP};
use fracext::{FrequencyGrid, SimilarityIfs};

fn pair(n_max: usize, seed: u64) -> KnappParams {
    KnappParams {
        k: 2,
        alphas: vec![0.4, 0.4],
        betas: vec![0.4, 0.4],
        phi: PhiSpec { epsilon: 1.0 },
        n_max,
        seed,
    }
}

#[test]
fn cantor_transform_matches_product_formula() {
    let mu = build_self_similar(&SimilarityIfs::middle_third(), 6, DEFAULT_ATOM_CAP).unwrap();
    let grid = FrequencyGrid::new(20.0, 0.25).unwrap();
    let vals = evaluate_on_grid(&mu, None, &grid).unwrap();
    for (j, v) in vals.iter().enumerate() {
        let xi = grid.point(j);
        let expected: f64 = (1..=6)
            .map(|n| (2.0 * std::f64::consts::PI * xi / 3f64.powi(n)).cos().abs())
            .product();
        assert!((v.norm() - expected).abs() < 1e-9, "xi = {xi}");
    }
    let moduli: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
    assert!(lq_freq_norm(&moduli, &grid, f64::INFINITY).unwrap() <= 1.0 + 1e-12);
}

#[test]
fn convolution_preserves_mass() {
    let pd = discretize_power_density(&PowerDensity::new(0.5).unwrap(), 512).unwrap();
    let d = convolve_grid(&[pd.clone(), pd], 512).unwrap();
    let mass = PowerDensity::new(0.5).unwrap().total_mass().powi(2);
    assert!((d.mass() - mass).abs() < 1e-9);
    assert!((density_lp_norm(&d, 1.0).unwrap() - d.mass()).abs() < 1e-9);
}

#[test]
fn cantor_lq_dimension_is_constant_in_q() {
    let d = (2f64).ln() / 3f64.ln();
    for q in [0.0, 1.0, 2.0, 5.0] {
        assert!((lq_dimension_homogeneous(&[0.5, 0.5], 1.0 / 3.0, q).unwrap() - d).abs() < 1e-12);
    }
}

#[test]
fn families_are_reproducible_and_count_consistently() {
    let a = build_family(&pair(3, 4)).unwrap();
    let b = build_family(&pair(3, 4)).unwrap();
    assert_eq!(a, b);
    let sets: Vec<Vec<i128>> = (0..2)
        .map(|m| {
            let ind = knapp_indicator(&a, 1, m).unwrap();
            a.endpoints[m]
                .0
                .iter()
                .zip(ind)
                .filter(|(_, w)| *w > 0.0)
                .map(|(e, _)| *e as i128)
                .collect()
        })
        .collect();
    let h = g_histogram(&sets, 1).unwrap();
    let sizes: u128 = sets.iter().map(|s| s.len() as u128).product();
    assert!(count_solutions(&h) >= sizes.into());
}

#[test]
fn norm_identity_holds_for_a_built_family() {
    let family = build_family(&pair(3, 1)).unwrap();
    let grid = FrequencyGrid::new(2000.0, 1.0 / 32.0).unwrap();
    let report = norm_identity_check(&family, 1, 1, &grid).unwrap();
    assert!(report.rel_error < 1e-2, "{report:?}");
}
