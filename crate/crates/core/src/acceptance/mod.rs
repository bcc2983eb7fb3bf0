//! The end-to-end acceptance criteria, runnable from tests and the CLI.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    count_solutions, cs_lower_bound, g_histogram, gamma_bound, norm_identity_check, sumset_cardinality, Progression,
};
use crate::convolution::{check_corollary_hypotheses, convolve_grid, verify_theorem31, CorollaryParams, RefinementLevel, Verdict};
use crate::dimension::{energy_integral, lq_dimension_homogeneous};
use crate::knapp::{build_family, choose_profiles, is_mli, mli_set, validate_family, KnappParams, MliMethod, PhiSpec};
use crate::measure::{build_self_similar, discretize_power_density, PowerDensity, DEFAULT_ATOM_CAP};
use crate::region::{evaluate_boundary, region_report, RegionBoundary};
use crate::{FrequencyGrid, SimilarityIfs};

pub mod oracles;

struct Outcome {
    pass: bool,
    detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: f64,
    pub budget_ms: f64,
}

impl CriterionResult {
    /// `PASS criterion  n name: detail [elapsed of budget]`.
    pub fn line(&self) -> String {
        let over = if self.elapsed_ms < self.budget_ms { "" } else { ", over budget" };
        format!(
            "{} criterion {:>2} {}: {} [{:.1} ms of {:.0} ms{over}]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_ms,
            self.budget_ms
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
    pub passed: usize,
    pub total: usize,
}

impl AcceptanceReport {
    pub fn all_pass(&self) -> bool {
        self.passed == self.total
    }
}

type Check = fn() -> Outcome;

const CRITERIA: [(&str, u64, Check); 10] = [
    ("power-density convolution closed form", 30, power_density_closed_form),
    ("weighted Cantor pair hypothesis", 1, weighted_cantor_hypothesis),
    ("independent progressions and sumsets", 60, independent_progressions),
    ("equal-sum counting identity", 60, counting_identity),
    ("B-spline norm identity", 120, norm_identity),
    ("Knapp divergence trend", 30, divergence_trend),
    ("finite-level ball and decay bounds", 120, ball_and_decay),
    ("integrable-convolution harness", 120, theorem31_harness),
    ("region algebra", 1, region_algebra),
    ("dimension sanity", 30, dimension_sanity),
];

/// Runs every criterion in order, calling `on_result` as each finishes.
/// A criterion passes only if its check holds within its time budget.
pub fn run_all(mut on_result: impl FnMut(&CriterionResult)) -> AcceptanceReport {
    let criteria: Vec<CriterionResult> = CRITERIA
        .iter()
        .enumerate()
        .map(|(i, &(name, budget, check))| {
            let budget = Duration::from_secs(budget);
            let start = Instant::now();
            let out = check();
            let elapsed = start.elapsed();
            let result = CriterionResult {
                id: i + 1,
                name: name.to_string(),
                pass: out.pass && elapsed < budget,
                detail: out.detail,
                elapsed_ms: elapsed.as_secs_f64() * 1e3,
                budget_ms: budget.as_secs_f64() * 1e3,
            };
            on_result(&result);
            result
        })
        .collect();
    AcceptanceReport {
        passed: criteria.iter().filter(|c| c.pass).count(),
        total: criteria.len(),
        criteria,
    }
}

fn power_density_closed_form() -> Outcome {
    let cells = 1 << 14;
    let mu = discretize_power_density(&PowerDensity::new(0.6).unwrap(), cells).unwrap();
    let d = convolve_grid(&[mu.clone(), mu], cells).unwrap();
    let ratios: Vec<f64> = (0..d.values.len())
        .filter(|&i| (0.1..=0.9).contains(&d.center(i)))
        .map(|i| d.values[i] / d.center(i).powf(-0.2))
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean;
    let constant = oracles::beta(0.4, 0.4);
    let err = (mean - constant).abs() / constant;
    Outcome {
        pass: spread <= 0.02 && err <= 0.01,
        detail: format!("spread {spread:.2e}, constant {mean:.5} vs Beta(0.4,0.4) = {constant:.5} (rel {err:.1e})"),
    }
}

fn weighted_cantor_hypothesis() -> Outcome {
    let rho = vec![0.1, 0.65, 0.25];
    let mut worst = 0.0f64;
    let mut all_hold = true;
    let mut gate = f64::NAN;
    for gamma in [0.3, 0.4, 0.5, 0.6, 0.7] {
        let r = check_corollary_hypotheses(&CorollaryParams::Ex34 { rho: rho.clone(), gamma, p0: 2.0 }).unwrap();
        all_hold &= r.holds;
        worst = worst
            .max((r.values["lq_dim_first"] - oracles::correlation_dimension(&rho, 0.25)).abs())
            .max((r.values["lq_dim_second"] - oracles::correlation_dimension(&[gamma, 1.0 - gamma], 1.0 / 3.0)).abs());
        gate = r.values["dimension_gate"];
    }
    Outcome {
        pass: all_hold && worst <= 1e-9 && (gate - 1.4236).abs() <= 1e-3,
        detail: format!("hypothesis holds for all gamma: {all_hold}, max D2 error {worst:.1e}, gate {gate:.5}"),
    }
}

fn independent_progressions() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in 1..=30u64 {
        for k in 1..=4usize {
            let ds = mli_set(m, k).unwrap();
            let signed: Vec<i64> = ds.iter().map(|&d| d as i64).collect();
            let check = is_mli(&signed, m).unwrap();
            if !(check.independent && check.method == MliMethod::Exhaustive) {
                failures.push(format!("M={m} k={k} mli"));
            }
            for len in [1, m.div_ceil(2), m] {
                let aps: Vec<Progression> = ds
                    .iter()
                    .map(|&d| Progression { start: 1, step: d as i128, len })
                    .collect();
                let size = sumset_cardinality(&aps).unwrap();
                if size != len.pow(k as u32) {
                    failures.push(format!("M={m} k={k} len={len}: {size}"));
                }
                checked += 1;
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{checked} sumsets exact, failures {failures:?}"),
    }
}

fn counting_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let instances = 1200;
    let mut mismatches = 0;
    let mut bound_violations = 0;
    for _ in 0..instances {
        let k = rng.random_range(1..=3);
        let r = rng.random_range(1..=2u32);
        let sets: Vec<Vec<i128>> = (0..k)
            .map(|_| {
                let n = rng.random_range(1..=10);
                let mut s: Vec<i128> = (0..n).map(|_| rng.random_range(-40..=40)).collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let h = g_histogram(&sets, r).unwrap();
        let count = count_solutions(&h);
        if count != BigUint::from(oracles::equal_half_sums(&sets, r)) {
            mismatches += 1;
        }
        if cs_lower_bound(&h) > BigRational::from_integer(count.into()) {
            bound_violations += 1;
        }
    }
    Outcome {
        pass: mismatches == 0 && bound_violations == 0,
        detail: format!("{instances} instances, {mismatches} count mismatches, {bound_violations} bound violations"),
    }
}

fn pair_params(epsilon: f64, n_max: usize, seed: u64) -> KnappParams {
    KnappParams {
        k: 2,
        alphas: vec![0.4, 0.4],
        betas: vec![0.4, 0.4],
        phi: PhiSpec { epsilon },
        n_max,
        seed,
    }
}

fn norm_identity() -> Outcome {
    let fam = build_family(&pair_params(1.0, 4, 7)).unwrap();
    let big = fam.profiles.big_psi(4);
    let psi: f64 = big.to_string().parse().unwrap();
    let step = 1.0 / 32.0;
    let reports: Vec<_> = [8.0, 16.0]
        .iter()
        .map(|mult| norm_identity_check(&fam, 1, 1, &FrequencyGrid::new(mult * psi, step).unwrap()).unwrap())
        .collect();
    let (coarse, fine) = (&reports[0], &reports[1]);
    Outcome {
        pass: psi <= 500.0 && coarse.rel_error <= 0.01 && fine.rel_error < coarse.rel_error,
        detail: format!(
            "Psi(N) = {big}, rel error {:.2e} at R = {}, {:.2e} at R = {}",
            coarse.rel_error, coarse.radius, fine.rel_error, fine.radius
        ),
    }
}

fn sci(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn divergence_trend() -> Outcome {
    let profiles = choose_profiles(&pair_params(1.0, 6, 0)).unwrap();
    let series = |q: f64| -> Vec<f64> {
        (1..=5)
            .map(|l| gamma_bound(&profiles, l, q, 2.0, 2).unwrap().gamma_inverse)
            .collect()
    };
    let below = series(2.0);
    let above = series(4.0);
    let threshold = 4.0 / 0.8 - 2.0;
    let increasing = below.windows(2).all(|w| w[1] > w[0]);
    let non_increasing = above.windows(2).all(|w| w[1] <= w[0]);
    Outcome {
        pass: threshold == 3.0 && increasing && non_increasing,
        detail: format!(
            "q=2 increasing {increasing} {}; q=4 non-increasing {non_increasing} {}",
            sci(&below),
            sci(&above)
        ),
    }
}

fn ball_and_decay() -> Outcome {
    let n = 5;
    let freq = (1.0, 1e3);
    let mut sups = vec![Vec::new(); 2];
    let mut passes = true;
    let mut constants = Vec::new();
    for seed in [11u64, 12] {
        let fam = build_family(&pair_params(1.0, n, seed)).unwrap();
        let rep = validate_family(&fam, n, freq).unwrap();
        passes &= rep.passes();
        for b in &rep.balls {
            constants.push(format!("s{seed}/m{}: [{:.3}, {:.3}]", b.m, b.lower_constant, b.upper_constant));
        }
        for d in &rep.decay {
            passes &= d.sup_product.is_finite();
            sups[d.m].push(d.sup_product);
        }
    }
    let spread = sups
        .iter()
        .map(|v| v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Outcome {
        pass: passes && spread <= 4.0,
        detail: format!("ball constants {constants:?}, decay sup spread across seeds {spread:.3}"),
    }
}

fn theorem31_harness() -> Outcome {
    let pd = PowerDensity::new(0.6).unwrap();
    let level = |cells: usize| {
        let mu = discretize_power_density(&pd, cells).unwrap();
        RefinementLevel {
            measures: vec![mu.clone(), mu],
            cells,
        }
    };
    let grid = FrequencyGrid::new(50.0, 1.0 / 16.0).unwrap();
    let rep = verify_theorem31(&[level(1 << 10), level(1 << 11)], 2.0, 4.0, 64, 5, &grid).unwrap();
    let m = &rep.trials.max_ratio_by_level;
    Outcome {
        pass: rep.verdict == Verdict::Pass && rep.hypothesis.p0 == Some(2.0),
        detail: format!(
            "verdict {:?}, p0 {:?}, max ratios {m:.4?} (growth {:.2}%)",
            rep.verdict,
            rep.hypothesis.p0,
            100.0 * (m[1] / m[0] - 1.0)
        ),
    }
}

fn region_algebra() -> Outcome {
    let p_grid: Vec<f64> = (1..=200).map(|i| 1.0 + i as f64 * 0.1).collect();
    let mut worst = 0.0f64;
    for alphas in [vec![0.4, 0.4], vec![0.3, 0.1], vec![0.45, 0.2]] {
        let doubled: Vec<f64> = alphas.iter().map(|a| 2.0 * a).collect();
        let t32 = RegionBoundary::Thm32 { alphas: alphas.clone(), betas: doubled };
        let tr = RegionBoundary::Trainor { d: 1.0, gammas: alphas.clone() };
        for &p in &p_grid {
            let (x, y) = (evaluate_boundary(&t32, p).unwrap(), evaluate_boundary(&tr, p).unwrap());
            worst = worst.max((x - y).abs());
        }
    }
    let sample_grid = [1.25, 1.5, 2.0, 4.0, 16.0];
    let boundaries = |alphas: &[f64], betas: &[f64]| {
        vec![
            RegionBoundary::Thm32 { alphas: alphas.to_vec(), betas: betas.to_vec() },
            RegionBoundary::Trainor { d: 1.0, gammas: alphas.to_vec() },
            RegionBoundary::TopLid { d: 1.0, box_dims: alphas.to_vec() },
            RegionBoundary::LinearST { d: 1.0, alphas: alphas.to_vec(), betas: betas.to_vec() },
        ]
    };
    let mut below_one = true;
    for (a, b) in [(vec![0.4, 0.4], vec![0.4, 0.4]), (vec![0.3, 0.2], vec![0.3, 0.2]), (vec![0.45, 0.5], vec![0.6, 0.5])] {
        let rep = region_report(&boundaries(&a, &b), &sample_grid, &a, &b).unwrap();
        let claim = rep.figure_claim.unwrap();
        below_one &= claim.applies && claim.holds;
    }
    let (a, b) = (vec![0.8, 0.8], vec![0.4, 0.4]);
    let above = region_report(&boundaries(&a, &b), &sample_grid, &a, &b).unwrap().figure_claim.unwrap();
    let (a, b) = (vec![0.4, 0.4], vec![0.4, 0.4]);
    let gap = region_report(&boundaries(&a, &b), &sample_grid, &a, &b).unwrap().gap.unwrap();
    let gap_ok = (gap.lower - 3.0).abs() < 1e-12 && (gap.upper - 4.0).abs() < 1e-12;
    Outcome {
        pass: worst <= 1e-12 && below_one && !above.holds && gap_ok,
        detail: format!(
            "doubled-beta vs Trainor max diff {worst:.1e}; claim holds below one {below_one}; fails above one at p {:?}; gap ({}, {}) at p = {}",
            above.failing_p, gap.lower, gap.upper, gap.p
        ),
    }
}

fn dimension_sanity() -> Outcome {
    let qs = [0.0, 0.5, 1.0, 2.0, 4.0, 64.0];
    let mut monotone = true;
    for probs in [vec![0.5, 0.5], vec![0.1, 0.65, 0.25], vec![0.2, 0.8]] {
        let ratio = 1.0 / (probs.len() as f64 + 1.0);
        let dims: Vec<f64> = qs.iter().map(|&q| lq_dimension_homogeneous(&probs, ratio, q).unwrap()).collect();
        monotone &= dims.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    }
    let d2 = lq_dimension_homogeneous(&[0.5, 0.5], 1.0 / 3.0, 2.0).unwrap();
    let d2_err = (d2 - 2f64.ln() / 3f64.ln()).abs();
    let cantor = SimilarityIfs::middle_third();
    let energy = |depth: usize, s: f64| {
        energy_integral(&build_self_similar(&cantor, depth, DEFAULT_ATOM_CAP).unwrap(), s).unwrap()
    };
    let (e6, e8) = (energy(6, 0.5), energy(8, 0.5));
    let stable = (e8 - e6).abs() / e6 <= 0.05;
    let (f6, f8) = (energy(6, 0.7), energy(8, 0.7));
    let diverging = f8 >= 1.2 * f6;
    Outcome {
        pass: monotone && d2_err <= 1e-12 && stable && diverging,
        detail: format!(
            "monotone {monotone}, D2 error {d2_err:.1e}, s=0.5 energy {e6:.4} -> {e8:.4} ({:+.1}%), s=0.7 energy {f6:.4} -> {f8:.4} ({:+.1}%)",
            100.0 * (e8 / e6 - 1.0),
            100.0 * (f8 / f6 - 1.0)
        ),
    }
}
