//! Empirical ball-mass and Fourier-decay checks of a built family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{Construction, KnappFamily};
use crate::dimension::{fourier_decay_fit, sup_product_at};
use crate::error::{invalid, Result};

/// Log-spaced frequency samples used by the decay check.
pub const DECAY_SAMPLES: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCheck {
    pub m: usize,
    /// Largest `μ(I)·log(1/|I|)/|I|^α` (single-scale families drop the logarithm).
    pub upper_constant: f64,
    /// Smallest `μ(I)·φ(1/|I|)·log(1/|I|)/|I|^α` (single-scale families: `μ(I)/|I|^α`).
    pub lower_constant: f64,
    pub intervals: usize,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    pub m: usize,
    /// `β_m/2`.
    pub exponent: f64,
    /// `max |ξ|^{β_m/2}|μ̂(ξ)|` over the sampled range.
    pub sup_product: f64,
    pub fitted_exponent: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub level: usize,
    pub freq_range: (f64, f64),
    pub balls: Vec<BallCheck>,
    pub decay: Vec<DecayCheck>,
}

impl FamilyReport {
    pub fn passes(&self) -> bool {
        self.balls.iter().all(|b| b.passes) && self.decay.iter().all(|d| d.passes)
    }
}

/// Mass of `[a − S/2, a + S/2]` for unit blocks at sorted integer endpoints, in block units.
fn centered_mass(ends: &[u128], a: u128, span: u128) -> f64 {
    // Doubled coordinates keep the half-span integral.
    let lo = 2 * a as i128 - span as i128;
    let hi = 2 * a as i128 + span as i128;
    let first = ends.partition_point(|&b| 2 * b as i128 + 2 <= lo);
    let last = ends.partition_point(|&b| 2 * (b as i128) < hi);
    if first >= last {
        return 0.0;
    }
    let overlap = |b: u128| {
        let (s, e) = (2 * b as i128, 2 * b as i128 + 2);
        (e.min(hi) - s.max(lo)).max(0) as f64 / 2.0
    };
    if last - first == 1 {
        return overlap(ends[first]);
    }
    overlap(ends[first]) + overlap(ends[last - 1]) + (last - first - 2) as f64
}

/// Two-sided ball bounds at scales `1/Ψ(j)`, `j ≤ level`, around every level
/// endpoint, and the decay of `μ̂` at exponent `β_m/2` on `freq`.
pub fn validate_family(family: &KnappFamily, level: usize, freq: (f64, f64)) -> Result<FamilyReport> {
    if level == 0 || level > family.depth() {
        return Err(invalid(format!("level {level} must lie in 1..={}", family.depth())));
    }
    let logged = match &family.construction {
        Construction::Progressive { epsilon } => Some(super::PhiSpec::new(*epsilon)?),
        Construction::SingleScale { .. } => None,
    };
    let p = &family.profiles;
    let big_n = p.big_psi(level);
    let tasks: Vec<(usize, usize)> = (0..family.k()).flat_map(|m| (1..=level).map(move |j| (m, j))).collect();
    let ends: Vec<Vec<u128>> = (0..family.k())
        .map(|m| family.level_endpoints(level, m))
        .collect::<Result<_>>()?;
    let per_task: Vec<(usize, f64, f64, usize)> = tasks
        .par_iter()
        .map(|&(m, j)| {
            let span: u128 = (&big_n / p.big_psi(j)).try_into().expect("fits u128");
            let width = 1.0 / super::profiles::big_ln(&p.big_psi(j)).exp();
            let alpha = p.alphas[m];
            let block_mass = 1.0 / ends[m].len() as f64;
            let log = (1.0 / width).ln();
            let (up_norm, lo_norm) = match &logged {
                Some(phi) => (log / width.powf(alpha), phi.phi(1.0 / width) * log / width.powf(alpha)),
                None => (1.0 / width.powf(alpha), 1.0 / width.powf(alpha)),
            };
            let (mut up, mut lo) = (0.0f64, f64::INFINITY);
            for &a in &ends[m] {
                let mass = centered_mass(&ends[m], a, span) * block_mass;
                up = up.max(mass * up_norm);
                lo = lo.min(mass * lo_norm);
            }
            (m, up, lo, ends[m].len())
        })
        .collect();
    let mut balls: Vec<BallCheck> = (0..family.k())
        .map(|m| BallCheck {
            m,
            upper_constant: 0.0,
            lower_constant: f64::INFINITY,
            intervals: 0,
            passes: false,
        })
        .collect();
    for (m, up, lo, count) in per_task {
        let b = &mut balls[m];
        b.upper_constant = b.upper_constant.max(up);
        b.lower_constant = b.lower_constant.min(lo);
        b.intervals += count;
    }
    for b in &mut balls {
        b.passes = b.upper_constant.is_finite() && b.lower_constant > 0.0;
    }
    let decay = (0..family.k())
        .map(|m| {
            let mu = family.measure(level, m)?;
            let exponent = p.betas[m] / 2.0;
            let sup_product = sup_product_at(&mu, freq.0, freq.1, DECAY_SAMPLES, exponent)?;
            let fit = fourier_decay_fit(&mu, freq.0, freq.1, DECAY_SAMPLES)?;
            Ok(DecayCheck {
                m,
                exponent,
                sup_product,
                fitted_exponent: fit.exponent,
                passes: sup_product.is_finite(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyReport {
        level,
        freq_range: freq,
        balls,
        decay,
    })
}
