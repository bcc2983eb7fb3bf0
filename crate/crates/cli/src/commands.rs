//! One function per subcommand: load the config, compute, write the run directory.

use std::fs;

use fracext::combinatorics::{
    count_solutions, cs_lower_bound, g_histogram, gamma_bound, norm_identity, norm_identity_check, sumset_cardinality,
};
use fracext::convolution::{
    check_corollary_hypotheses, convolve_grid_capped, density_lp_norm, random_functions, verify_theorem31,
    RefinementLevel, DEFAULT_CONVOLUTION_CAP,
};
use fracext::dimension::{box_counts, decay_profile, energy_integral, fourier_decay_fit, frostman_fit, lq_dimension_homogeneous};
use fracext::extension::{evaluate_on_grid, lp_norm_on_measure, lq_freq_norm, multilinear_ratio};
use fracext::knapp::{build_family_capped, build_family_hl, choose_profiles, validate_family, KnappFamily};
use fracext::measure::{check_separation, rational_to_f64, rational_to_string, MeasureKind};
use fracext::region::{region_report, render_svg};
use fracext::DiscreteMeasure;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;
use crate::error::CliError;
use crate::run::{Manifest, RunDir};
use crate::GlobalOpts;

fn load<T: DeserializeOwned + Default>(g: &GlobalOpts) -> Result<T, CliError> {
    let Some(path) = &g.config else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn finish<C: Serialize>(run: RunDir, command: &str, g: &GlobalOpts, seed: u64, config: &C) -> Result<(), CliError> {
    run.finish(Manifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        seed,
        threads: g.threads,
        cap_atoms: g.cap_atoms,
        config: serde_json::to_value(config).expect("configs serialize"),
        outputs: Vec::new(),
    })
}

/// Shortest round-trip text, scientific only for extreme magnitudes.
fn f(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn build_all(specs: &[MeasureSpec], cap: usize) -> Result<Vec<DiscreteMeasure>, CliError> {
    Ok(specs.iter().map(|s| s.build(cap)).collect::<fracext::Result<_>>()?)
}

fn functions(spec: &FunctionSpec, measures: &[DiscreteMeasure], seed: u64) -> Result<Vec<Vec<f64>>, CliError> {
    Ok(match spec {
        FunctionSpec::Ones => measures.iter().map(|m| vec![1.0; m.len()]).collect(),
        FunctionSpec::Random => random_functions(measures, seed),
        FunctionSpec::Values(v) => {
            if let Some(m) = measures.iter().find(|m| m.len() != v.len()) {
                return Err(fracext::Error::InvalidArgument(format!(
                    "{} function values for a measure with {} atoms",
                    v.len(),
                    m.len()
                ))
                .into());
            }
            vec![v.clone(); measures.len()]
        }
    })
}

fn measure_summary(m: &DiscreteMeasure, spec: &MeasureSpec) -> Value {
    let (lo, hi) = m.support();
    let block_width = match m.kind() {
        MeasureKind::Atomic => None,
        MeasureKind::Block { width } => Some(rational_to_string(width)),
    };
    json!({
        "atoms": m.len(),
        "total_mass": m.total_mass(),
        "support": [rational_to_string(&lo), rational_to_string(&hi)],
        "diameter": m.diameter(),
        "block_width": block_width,
        "separation": spec.ifs().map(|ifs| check_separation(ifs).to_string()),
    })
}

pub fn measure_build(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: MeasureBuildConfig = load(g)?;
    let m = cfg.measure.build(g.cap_atoms)?;
    let mut run = RunDir::create(&g.out)?;
    run.csv(
        "measure.csv",
        &["position", "position_f64", "weight"],
        m.atoms()
            .iter()
            .map(|a| [rational_to_string(&a.position), f(rational_to_f64(&a.position)), f(a.weight)]),
    )?;
    run.json("measure.json", &measure_summary(&m, &cfg.measure))?;
    finish(run, "measure build", g, 0, &cfg)
}

pub fn measure_dims(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: MeasureDimsConfig = load(g)?;
    let m = cfg.measure.build(g.cap_atoms)?;
    let homogeneous = cfg
        .measure
        .ifs()
        .and_then(|ifs| ifs.homogeneous_ratio().map(|r| (ifs.probs_f64(), rational_to_f64(r).abs())));
    let lq = match (&homogeneous, cfg.q_values.is_empty()) {
        (_, true) => Vec::new(),
        (Some((probs, ratio)), false) => cfg
            .q_values
            .iter()
            .map(|&q| Ok(json!({"q": q, "dimension": lq_dimension_homogeneous(probs, *ratio, q)?})))
            .collect::<fracext::Result<Vec<_>>>()?,
        (None, false) => {
            return Err(fracext::Error::InvalidArgument(
                "L^q dimensions need a self-similar measure with one contraction ratio".into(),
            )
            .into())
        }
    };
    let energies = cfg
        .energy_s
        .iter()
        .map(|&s| Ok(json!({"s": s, "energy": energy_integral(&m, s)?})))
        .collect::<fracext::Result<Vec<_>>>()?;
    let frostman = if cfg.frostman_scales.is_empty() {
        None
    } else {
        Some(frostman_fit(&m, &cfg.frostman_scales)?)
    };
    let boxes = box_counts(&m, &cfg.box_deltas)?;
    let mut run = RunDir::create(&g.out)?;
    run.json(
        "dims.json",
        &json!({
            "atoms": m.len(),
            "lq_dimensions": lq,
            "energies": energies,
            "frostman": frostman,
        }),
    )?;
    run.csv(
        "box_counts.csv",
        &["delta", "N_delta"],
        boxes.iter().map(|(d, n)| [rational_to_string(d), n.to_string()]),
    )?;
    finish(run, "measure dims", g, 0, &cfg)
}

pub fn measure_decay(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: MeasureDecayConfig = load(g)?;
    let m = cfg.measure.build(g.cap_atoms)?;
    let fit = fourier_decay_fit(&m, cfg.xi_min, cfg.xi_max, cfg.samples)?;
    let profile = decay_profile(&m, cfg.xi_min, cfg.xi_max, cfg.samples)?;
    let mut run = RunDir::create(&g.out)?;
    run.json("decay.json", &fit)?;
    run.csv(
        "decay.csv",
        &["xi", "abs_fhat", "envelope"],
        profile.iter().map(|s| [f(s.xi), f(s.abs_fhat), f(s.envelope)]),
    )?;
    finish(run, "measure decay", g, 0, &cfg)
}

pub fn extend_norm(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: ExtendNormConfig = load(g)?;
    let seed = g.seed.unwrap_or(0);
    let m = cfg.measure.build(g.cap_atoms)?;
    let grid = cfg.grid.grid()?;
    grid.check_resolution(m.diameter())?;
    let fs = functions(&cfg.function, std::slice::from_ref(&m), seed)?;
    let values = evaluate_on_grid(&m, Some(&fs[0]), &grid)?;
    let moduli: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let norm = lq_freq_norm(&moduli, &grid, cfg.q)?;
    let mut run = RunDir::create(&g.out)?;
    run.csv(
        "transform.csv",
        &["xi", "re", "im", "abs"],
        values
            .iter()
            .enumerate()
            .map(|(j, v)| [f(grid.point(j)), f(v.re), f(v.im), f(v.norm())]),
    )?;
    run.json(
        "norm.json",
        &json!({
            "q": cfg.q,
            "lq_norm": norm,
            "sup": moduli.iter().fold(0.0f64, |a, &b| a.max(b)),
            "l2_norm_on_measure": lp_norm_on_measure(&m, &fs[0], 2.0)?,
            "grid_points": grid.len(),
        }),
    )?;
    finish(run, "extend norm", g, seed, &cfg)
}

pub fn extend_ratio(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: ExtendRatioConfig = load(g)?;
    let seed = g.seed.unwrap_or(0);
    let measures = build_all(&cfg.measures, g.cap_atoms)?;
    let grid = cfg.grid.grid()?;
    grid.check_resolution(measures.iter().map(|m| m.diameter()).sum())?;
    let fs = functions(&cfg.function, &measures, seed)?;
    let ratio = multilinear_ratio(&measures, &fs, cfg.p, cfg.q, &grid)?;
    let mut run = RunDir::create(&g.out)?;
    run.json(
        "ratio.json",
        &json!({"p": cfg.p, "q": cfg.q, "ratio": ratio, "atoms": measures.iter().map(|m| m.len()).collect::<Vec<_>>()}),
    )?;
    finish(run, "extend ratio", g, seed, &cfg)
}

pub fn convolve_run(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: ConvolveRunConfig = load(g)?;
    let measures = build_all(&cfg.measures, g.cap_atoms)?;
    let d = convolve_grid_capped(&measures, cfg.cells, DEFAULT_CONVOLUTION_CAP)?;
    let norms = cfg
        .p_norms
        .iter()
        .map(|&p| Ok(json!({"p": p, "norm": density_lp_norm(&d, p)?})))
        .collect::<fracext::Result<Vec<_>>>()?;
    let mut run = RunDir::create(&g.out)?;
    run.csv(
        "density.csv",
        &["x", "density"],
        d.values.iter().enumerate().map(|(i, v)| [f(d.center(i)), f(*v)]),
    )?;
    run.json(
        "convolve.json",
        &json!({
            "origin": d.origin,
            "cell_width": d.cell_width,
            "cells": d.values.len(),
            "mass": d.mass(),
            "lp_norms": norms,
        }),
    )?;
    finish(run, "convolve run", g, 0, &cfg)
}

pub fn verify_thm31(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: VerifyConfig = load(g)?;
    let seed = g.seed.unwrap_or(0);
    let levels = cfg
        .levels
        .iter()
        .map(|l| {
            Ok(RefinementLevel {
                measures: build_all(&l.measures, g.cap_atoms)?,
                cells: l.cells,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let report = verify_theorem31(&levels, cfg.p, cfg.q, cfg.trials, seed, &cfg.grid.grid()?)?;
    let corollary = cfg.corollary.as_ref().map(check_corollary_hypotheses).transpose()?;
    let mut run = RunDir::create(&g.out)?;
    run.json("thm31.json", &json!({"report": report, "corollary": corollary}))?;
    finish(run, "convolve verify-thm31", g, seed, &cfg)
}

fn build_spec(spec: &mut FamilySpec, g: &GlobalOpts) -> Result<KnappFamily, CliError> {
    if let Some(s) = g.seed {
        spec.set_seed(s);
    }
    Ok(match spec {
        FamilySpec::Progressive(p) => build_family_capped(p, g.cap_atoms)?,
        FamilySpec::SingleScale {
            base,
            t0,
            n0,
            levels,
            seed,
        } => build_family_hl(*base, t0, *n0, *levels, *seed, g.cap_atoms)?,
    })
}

pub fn knapp_build(g: &GlobalOpts) -> Result<(), CliError> {
    let mut cfg: KnappBuildConfig = load(g)?;
    let family = build_spec(&mut cfg.family, g)?;
    let mut run = RunDir::create(&g.out)?;
    run.json("family.json", &family)?;
    finish(run, "knapp build", g, family.seed, &cfg)
}

pub fn knapp_validate(g: &GlobalOpts) -> Result<(), CliError> {
    let mut cfg: KnappValidateConfig = load(g)?;
    let family = build_spec(&mut cfg.family, g)?;
    let level = cfg.level.unwrap_or(family.depth());
    let report = validate_family(&family, level, cfg.freq)?;
    let mut run = RunDir::create(&g.out)?;
    run.json("validate.json", &json!({"passes": report.passes(), "report": report}))?;
    finish(run, "knapp validate", g, family.seed, &cfg)
}

pub fn ratio_trend(g: &GlobalOpts) -> Result<(), CliError> {
    let mut cfg: RatioTrendConfig = load(g)?;
    if let Some(s) = g.seed {
        cfg.params.seed = s;
    }
    cfg.params.validate()?;
    let r = cfg
        .params
        .r()
        .ok_or_else(|| fracext::Error::Precondition("the ratio bound needs some beta_m > 0".into()))?;
    let profiles = choose_profiles(&cfg.params)?;
    let mut reports = Vec::new();
    for &q in &cfg.q_values {
        for level in 1..=profiles.depth() {
            reports.push(gamma_bound(&profiles, level, q, cfg.p, r)?);
        }
    }
    let mut run = RunDir::create(&g.out)?;
    run.csv(
        "gamma.csv",
        &["q", "level", "gamma_inverse", "leading_term", "lower_order_term"],
        reports.iter().map(|x| {
            [
                f(x.q),
                x.level.to_string(),
                f(x.gamma_inverse),
                f(x.leading_term),
                f(x.lower_order_term),
            ]
        }),
    )?;
    run.json("gamma.json", &json!({"r": r, "profiles": profiles, "levels": reports}))?;
    finish(run, "knapp ratio-trend", g, cfg.params.seed, &cfg)
}

fn widen(sets: &[Vec<i64>]) -> Vec<Vec<i128>> {
    sets.iter().map(|s| s.iter().map(|&a| a as i128).collect()).collect()
}

fn ratio_json(q: &BigRational) -> Value {
    json!({"exact": q.to_string(), "approx": q.to_f64()})
}

pub fn oracle_count(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: OracleCountConfig = load(g)?;
    let h = g_histogram(&widen(&cfg.sets), cfg.r)?;
    let sumset = if cfg.progressions.is_empty() {
        None
    } else {
        Some(sumset_cardinality(&cfg.progressions)?)
    };
    let mut run = RunDir::create(&g.out)?;
    run.csv(
        "histogram.csv",
        &["z", "g"],
        h.entries.iter().map(|(z, c)| [z.to_string(), c.to_string()]),
    )?;
    run.json(
        "count.json",
        &json!({
            "r": cfg.r,
            "solutions": count_solutions(&h).to_string(),
            "cs_lower_bound": ratio_json(&cs_lower_bound(&h)),
            "support": h.support(),
            "l1": h.l1().to_string(),
            "sumset_cardinality": sumset,
            "progression_length_product": cfg.progressions.iter().map(|p| p.len as u128).product::<u128>(),
        }),
    )?;
    finish(run, "oracle count", g, 0, &cfg)
}

pub fn oracle_identity(g: &GlobalOpts) -> Result<(), CliError> {
    let mut cfg: OracleIdentityConfig = load(g)?;
    let grid = cfg.grid.grid()?;
    let (report, seed) = match &mut cfg.input {
        IdentitySource::Family { params, level } => {
            if let Some(s) = g.seed {
                params.seed = s;
            }
            let family = build_family_capped(params, g.cap_atoms)?;
            (norm_identity_check(&family, *level, cfg.r, &grid)?, params.seed)
        }
        IdentitySource::Sets { sets, scale, masses } => {
            (norm_identity(&widen(sets), *scale as u128, masses, cfg.r, &grid)?, 0)
        }
    };
    let mut run = RunDir::create(&g.out)?;
    run.json("identity.json", &report)?;
    finish(run, "oracle identity", g, seed, &cfg)
}

pub fn regions_plot(g: &GlobalOpts) -> Result<(), CliError> {
    let cfg: RegionsConfig = load(g)?;
    let report = region_report(&cfg.boundaries, &cfg.p_grid, &cfg.alphas, &cfg.betas)?;
    let svg = render_svg(&cfg.boundaries)?;
    let mut run = RunDir::create(&g.out)?;
    run.csv(
        "region.csv",
        &["kind", "inv_p", "inv_q", "direction"],
        report
            .samples
            .iter()
            .map(|s| [s.kind.as_str().to_string(), f(s.inv_p), f(s.inv_q), s.direction.as_str().to_string()]),
    )?;
    run.text("region.svg", &svg)?;
    run.json("region.json", &report)?;
    finish(run, "regions plot", g, 0, &cfg)
}

pub fn accept(g: &GlobalOpts) -> Result<(), CliError> {
    let report = fracext::acceptance::run_all(|r| println!("{}", r.line()));
    println!("acceptance: {} of {} criteria pass", report.passed, report.total);
    let mut run = RunDir::create(&g.out)?;
    run.json("acceptance.json", &report)?;
    finish(run, "accept", g, 0, &Value::Null)?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::Acceptance {
            failed: report.total - report.passed,
            total: report.total,
        })
    }
}
