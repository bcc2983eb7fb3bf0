//! Dimension statistics of discrete measures: closed-form `L^q` dimensions of
//! homogeneous self-similar measures, Riesz energies, ball-mass exponent fits,
//! box counts and Fourier decay fits.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::extension::{evaluate_at, evaluate_on_grid, evaluate_uniform, FrequencyGrid};
use crate::measure::{DiscreteMeasure, Rational};

/// `D_q` of the self-similar measure with weights `probs` and common ratio `ratio`.
///
/// Zero weights are dropped. `q = f64::INFINITY` gives `log max p / log λ`.
pub fn lq_dimension_homogeneous(probs: &[f64], ratio: f64, q: f64) -> Result<f64> {
    if q.is_nan() || q < 0.0 {
        return Err(invalid(format!("q = {q} must be nonnegative")));
    }
    let lambda = ratio.abs();
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid(format!("ratio {ratio} must have modulus in (0, 1)")));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(invalid("probabilities must be finite and nonnegative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("probabilities sum to {total}, not 1")));
    }
    let ps: Vec<f64> = probs.iter().copied().filter(|&p| p > 0.0).collect();
    let log_l = lambda.ln();
    if q.is_infinite() {
        let max = ps.iter().fold(0.0f64, |m, &p| m.max(p));
        return Ok(max.ln() / log_l);
    }
    if q == 1.0 {
        let h: f64 = ps.iter().map(|p| p * p.ln()).sum();
        return Ok(h / log_l);
    }
    let s: f64 = ps.iter().map(|p| p.powf(q)).sum();
    Ok(s.ln() / ((q - 1.0) * log_l))
}

/// `Σ_{i≠j} w_i w_j |x_i − x_j|^{-s}`; block measures use block centres.
pub fn energy_integral(measure: &DiscreteMeasure, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("s = {s} must lie in (0, 1)")));
    }
    if measure.len() < 2 {
        return Err(invalid("energy needs at least two atoms"));
    }
    let x = measure.centers_f64();
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("coincident atom positions; merge atoms first"));
    }
    let w = measure.weights();
    let rows: Vec<f64> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut row = 0.0;
            for j in i + 1..x.len() {
                row += w[j] * (x[j] - x[i]).powf(-s);
            }
            w[i] * row
        })
        .collect();
    Ok(2.0 * rows.iter().sum::<f64>())
}

/// `∫_{-R}^{R} |μ̂(ξ)|² |ξ|^{s-1} dξ` on the given grid.
///
/// The first cell is integrated against `|ξ|^{s-1}` exactly with `|μ̂|²` frozen at 0.
pub fn frequency_energy(measure: &DiscreteMeasure, s: f64, grid: &FrequencyGrid) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("s = {s} must lie in (0, 1)")));
    }
    let vals = evaluate_on_grid(measure, None, grid)?;
    let h = grid.step;
    let mid = grid.half_len();
    let sq = |j: usize| vals[j].norm_sqr();
    let f = |j: usize| sq(j) * grid.point(j).abs().powf(s - 1.0);
    let mut half = 0.5 * (sq(mid) + sq(mid + 1)) * h.powf(s) / s;
    for j in mid + 1..vals.len() - 1 {
        half += 0.5 * (f(j) + f(j + 1)) * h;
    }
    let mut other = 0.5 * (sq(mid) + sq(mid - 1)) * h.powf(s) / s;
    for j in 1..mid {
        other += 0.5 * (f(j) + f(j - 1)) * h;
    }
    Ok(half + other)
}

/// Ball-mass exponents of a measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrostmanFit {
    /// Best `α` in `μ(B(x, r)) ≲ r^α`.
    pub upper_exponent: f64,
    /// Best `α + ε` in `r^{α+ε} ≲ μ(B(x, r))`.
    pub lower_exponent: f64,
}

fn slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (b, my - b * mx)
}

/// Fits ball-mass exponents from balls centred at the atoms.
///
/// For each radius the smallest and largest normalized ball masses are
/// recorded; the exponents are the log-log slopes of these two envelopes, which
/// absorbs the implicit constants of the two-sided bound. With one radius the
/// exponents are `log μ(B)/log r` of the envelopes.
pub fn frostman_fit(measure: &DiscreteMeasure, scales: &[f64]) -> Result<FrostmanFit> {
    if scales.is_empty() {
        return Err(invalid("at least one scale is required"));
    }
    if scales.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(invalid("scales must be positive"));
    }
    let centers = measure.centers_f64();
    let total = measure.total_mass();
    let envelopes: Vec<(f64, f64)> = scales
        .par_iter()
        .map(|&r| {
            centers.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
                let m = measure.interval_mass(x - r, x + r) / total;
                (lo.min(m), hi.max(m))
            })
        })
        .collect();
    let logr: Vec<f64> = scales.iter().map(|r| r.ln()).collect();
    let log_min: Vec<f64> = envelopes.iter().map(|e| e.0.ln()).collect();
    let log_max: Vec<f64> = envelopes.iter().map(|e| e.1.ln()).collect();
    let (a, b) = if scales.len() == 1 {
        (log_max[0] / logr[0], log_min[0] / logr[0])
    } else {
        (slope(&logr, &log_max).0, slope(&logr, &log_min).0)
    };
    let fix = |v: f64| if v == 0.0 { 0.0 } else { v };
    Ok(FrostmanFit {
        upper_exponent: fix(a.min(b)),
        lower_exponent: fix(a.max(b)),
    })
}

/// Number of cells `[kδ, (k+1)δ)` meeting the support, for each `δ`.
pub fn box_counts(measure: &DiscreteMeasure, deltas: &[Rational]) -> Result<Vec<(Rational, u64)>> {
    if deltas.iter().any(|d| !d.is_positive()) {
        return Err(invalid("mesh sizes must be positive"));
    }
    Ok(deltas
        .iter()
        .map(|delta| {
            let count = match measure.block_width() {
                None => {
                    let mut cells: Vec<BigInt> = measure
                        .atoms()
                        .iter()
                        .map(|a| (&a.position / delta).floor().to_integer())
                        .collect();
                    cells.dedup();
                    cells.len() as u64
                }
                Some(h) => {
                    let mut count = BigInt::zero();
                    let mut covered_to: Option<BigInt> = None;
                    for a in measure.atoms() {
                        let lo = (&a.position / delta).floor().to_integer();
                        let hi = ((&a.position + h) / delta).ceil().to_integer() - 1;
                        let lo = match &covered_to {
                            Some(c) if c >= &lo => c + 1,
                            _ => lo,
                        };
                        if hi >= lo {
                            count += &hi - &lo + 1;
                            covered_to = Some(hi);
                        }
                    }
                    u64::try_from(count).unwrap_or(u64::MAX)
                }
            };
            (delta.clone(), count)
        })
        .collect())
}

/// Least-squares power-law fit to the windowed maxima of `|μ̂|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub constant: f64,
    /// `max_ξ |ξ|^exponent |μ̂(ξ)|` over the samples.
    pub sup_product: f64,
    pub freq_range: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub xi: f64,
    pub abs_fhat: f64,
    pub envelope: f64,
}

fn check_decay_args(xi_min: f64, xi_max: f64, samples: usize) -> Result<()> {
    if !(xi_min >= 1.0 && xi_max > xi_min && xi_max.is_finite()) {
        return Err(invalid(format!(
            "frequency range [{xi_min}, {xi_max}] must satisfy 1 <= min < max"
        )));
    }
    if samples < 100 {
        return Err(invalid(format!("{samples} samples; at least 100 are required")));
    }
    Ok(())
}

fn log_spaced(xi_min: f64, xi_max: f64, samples: usize) -> Vec<f64> {
    let ratio = (xi_max / xi_min).ln();
    (0..samples)
        .map(|j| xi_min * (ratio * j as f64 / (samples - 1) as f64).exp())
        .collect()
}

/// Upper bound on dense points per window.
const WINDOW_POINTS: usize = 1 << 16;

/// `|μ̂|` at the log-spaced samples and on a dense uniform grid of each window.
struct Windows {
    xis: Vec<f64>,
    abs: Vec<f64>,
    /// `(lo, hi)` sample index ranges.
    bounds: Vec<(usize, usize)>,
    /// Dense `(ξ, |μ̂(ξ)|)` per window, step at most `1/(4·diam)`.
    dense: Vec<Vec<(f64, f64)>>,
}

impl Windows {
    fn new(measure: &DiscreteMeasure, xi_min: f64, xi_max: f64, samples: usize) -> Result<Self> {
        check_decay_args(xi_min, xi_max, samples)?;
        let xis = log_spaced(xi_min, xi_max, samples);
        let abs: Vec<f64> = evaluate_at(measure, None, &xis)?.iter().map(|z| z.norm()).collect();
        let count = samples / 20;
        let bounds: Vec<(usize, usize)> = (0..count)
            .map(|w| (w * samples / count, (w + 1) * samples / count))
            .collect();
        let diam = measure.diameter();
        let step = if diam > 0.0 { 1.0 / (4.0 * diam) } else { f64::INFINITY };
        let mut dense = Vec::with_capacity(count);
        for &(lo, hi) in &bounds {
            let a = xis[lo];
            let b = if hi < samples { xis[hi] } else { xis[samples - 1] };
            let n = ((b - a) / step).ceil().clamp(1.0, WINDOW_POINTS as f64) as usize;
            let h = (b - a) / n as f64;
            let vals = evaluate_uniform(measure, None, a, h, n + 1)?;
            dense.push(
                vals.iter()
                    .enumerate()
                    .map(|(j, z)| (a + j as f64 * h, z.norm()))
                    .collect(),
            );
        }
        Ok(Self { xis, abs, bounds, dense })
    }

    /// Location and value of the largest `|μ̂|` in window `w`.
    fn peak(&self, w: usize) -> (f64, f64) {
        let (lo, hi) = self.bounds[w];
        let sampled = (lo..hi).map(|j| (self.xis[j], self.abs[j]));
        sampled
            .chain(self.dense[w].iter().copied())
            .fold((self.xis[lo], -1.0), |best, p| if p.1 > best.1 { p } else { best })
    }

    fn sup_product(&self, exponent: f64) -> f64 {
        let sampled = self.xis.iter().copied().zip(self.abs.iter().copied());
        sampled
            .chain(self.dense.iter().flatten().copied())
            .map(|(x, v)| x.powf(exponent) * v)
            .fold(0.0, f64::max)
    }
}

/// Samples `|μ̂|` at log-spaced frequencies together with the window envelope.
///
/// The envelope of a window is the largest `|μ̂|` found on a uniform grid of
/// step `1/(4·diam)` spanning the window, so narrow peaks between log-spaced
/// samples are not missed.
pub fn decay_profile(
    measure: &DiscreteMeasure,
    xi_min: f64,
    xi_max: f64,
    samples: usize,
) -> Result<Vec<DecaySample>> {
    let win = Windows::new(measure, xi_min, xi_max, samples)?;
    let mut out = Vec::with_capacity(samples);
    for (w, &(lo, hi)) in win.bounds.iter().enumerate() {
        let env = win.peak(w).1;
        for j in lo..hi {
            out.push(DecaySample {
                xi: win.xis[j],
                abs_fhat: win.abs[j],
                envelope: env,
            });
        }
    }
    Ok(out)
}

/// Fits `|μ̂(ξ)| ≈ C|ξ|^{-e}` to the window envelope, clamping `e ≥ 0`.
pub fn fourier_decay_fit(
    measure: &DiscreteMeasure,
    xi_min: f64,
    xi_max: f64,
    samples: usize,
) -> Result<DecayFit> {
    let win = Windows::new(measure, xi_min, xi_max, samples)?;
    let mut xs = Vec::with_capacity(win.bounds.len());
    let mut ys = Vec::with_capacity(win.bounds.len());
    for w in 0..win.bounds.len() {
        let (x, v) = win.peak(w);
        if v > 0.0 {
            xs.push(x.ln());
            ys.push(v.ln());
        }
    }
    let (exponent, log_c) = if xs.len() < 2 {
        (0.0, ys.first().copied().unwrap_or(f64::NEG_INFINITY))
    } else {
        let (b, a) = slope(&xs, &ys);
        if b <= 0.0 {
            (-b, a)
        } else {
            (0.0, ys.iter().sum::<f64>() / ys.len() as f64)
        }
    };
    Ok(DecayFit {
        exponent,
        constant: log_c.exp(),
        sup_product: win.sup_product(exponent),
        freq_range: (xi_min, xi_max),
    })
}

/// `max_ξ |ξ|^exponent |μ̂(ξ)|` over the same sample set as [`fourier_decay_fit`].
pub fn sup_product_at(
    measure: &DiscreteMeasure,
    xi_min: f64,
    xi_max: f64,
    samples: usize,
    exponent: f64,
) -> Result<f64> {
    Ok(Windows::new(measure, xi_min, xi_max, samples)?.sup_product(exponent))
}

/// Integer `ceil(diam/δ) + 1`, an upper bound for any box count.
pub fn box_count_bound(measure: &DiscreteMeasure, delta: &Rational) -> BigInt {
    let (lo, hi) = measure.support();
    let cells = ((hi - lo) / delta).ceil().to_integer();
    cells + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{build_self_similar, parse_rational, SimilarityIfs};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn cantor(depth: usize) -> DiscreteMeasure {
        build_self_similar(&SimilarityIfs::middle_third(), depth, 1 << 22).unwrap()
    }

    #[test]
    fn lq_examples() {
        let l23 = 2f64.ln() / 3f64.ln();
        assert!((lq_dimension_homogeneous(&[0.5, 0.5], 1.0 / 3.0, 2.0).unwrap() - l23).abs() < 1e-15);
        assert!((lq_dimension_homogeneous(&[0.5, 0.5], 1.0 / 3.0, 1.0).unwrap() - l23).abs() < 1e-15);
        let d = lq_dimension_homogeneous(&[0.1, 0.65, 0.25], 0.25, 2.0).unwrap();
        // Oracle: Σp² = 0.495 by hand.
        assert!((d - 0.495f64.ln() / -(4f64.ln())).abs() < 1e-15);
        assert!((d - 0.50725).abs() < 1e-5);
        assert!(lq_dimension_homogeneous(&[0.5, 0.5], 1.0 / 3.0, -1.0).is_err());
    }

    #[test]
    fn lq_limits() {
        let p = [0.1, 0.65, 0.25];
        let inf = lq_dimension_homogeneous(&p, 0.25, f64::INFINITY).unwrap();
        assert!((inf - 0.65f64.ln() / 0.25f64.ln()).abs() < 1e-15);
        let zero = lq_dimension_homogeneous(&[0.5, 0.0, 0.5], 1.0 / 3.0, 0.0).unwrap();
        assert!((zero - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn energy_single_pair() {
        let mu = DiscreteMeasure::atomic(vec![(q("0"), 0.5), (q("1"), 0.5)]).unwrap();
        assert_eq!(energy_integral(&mu, 0.5).unwrap(), 0.5);
        assert!(energy_integral(&DiscreteMeasure::dirac(q("0")), 0.5).is_err());
        assert!(energy_integral(&mu, 1.5).is_err());
    }

    #[test]
    fn energy_trends() {
        // Successive increments shrink geometrically below the correlation
        // dimension and grow above it; the ratio tends to 3^s/2.
        let increments = |s: f64| {
            let e: Vec<f64> = (5..=8).map(|n| energy_integral(&cantor(n), s).unwrap()).collect();
            [(e[2] - e[1]) / (e[1] - e[0]), (e[3] - e[2]) / (e[2] - e[1])]
        };
        for r in increments(0.5) {
            assert!(r < 1.0 && (r - 3f64.sqrt() / 2.0).abs() < 0.01, "{r}");
        }
        for r in increments(0.7) {
            assert!(r > 1.0 && (r - 3f64.powf(0.7) / 2.0).abs() < 0.01, "{r}");
        }
        let e6 = energy_integral(&cantor(6), 0.7).unwrap();
        let e8 = energy_integral(&cantor(8), 0.7).unwrap();
        assert!(e8 >= 1.2 * e6, "{e6} {e8}");
    }

    #[test]
    fn parseval_ratio_is_stable() {
        let grid = FrequencyGrid::new(200.0, 1.0 / 16.0).unwrap();
        let ratio = |depth| {
            let mu = cantor(depth);
            energy_integral(&mu, 0.5).unwrap() / frequency_energy(&mu, 0.5, &grid).unwrap()
        };
        let (a, b) = (ratio(6), ratio(8));
        assert!((b / a - 1.0).abs() < 0.5, "{a} {b}");
    }

    #[test]
    fn frostman_examples() {
        let u = DiscreteMeasure::uniform(1024).unwrap();
        let scales: Vec<f64> = (2..=8).map(|j| 2f64.powi(-j)).collect();
        let fit = frostman_fit(&u, &scales).unwrap();
        assert!((fit.upper_exponent - 1.0).abs() < 0.05, "{fit:?}");
        assert!((fit.lower_exponent - 1.0).abs() < 0.05, "{fit:?}");

        let d = DiscreteMeasure::dirac(q("1/2"));
        let fit = frostman_fit(&d, &scales).unwrap();
        assert_eq!((fit.upper_exponent, fit.lower_exponent), (0.0, 0.0));

        let scales: Vec<f64> = (2..=8).map(|j| 3f64.powi(-j)).collect();
        let fit = frostman_fit(&cantor(10), &scales).unwrap();
        let l23 = 2f64.ln() / 3f64.ln();
        assert!((fit.upper_exponent - l23).abs() < 0.05, "{fit:?}");
        assert!((fit.lower_exponent - l23).abs() < 0.05, "{fit:?}");
        assert!(frostman_fit(&d, &[]).is_err());
    }

    #[test]
    fn box_count_examples() {
        let u = DiscreteMeasure::uniform(16).unwrap();
        assert_eq!(box_counts(&u, &[q("1/4")]).unwrap()[0].1, 4);

        let c4 = cantor(4);
        let blocks = DiscreteMeasure::blocks(
            q("1/81"),
            c4.atoms().iter().map(|a| (a.position.clone(), a.weight)).collect(),
        )
        .unwrap();
        assert_eq!(box_counts(&blocks, &[q("1/27")]).unwrap()[0].1, 8);

        let d = DiscreteMeasure::dirac(q("1/3"));
        for (_, n) in box_counts(&d, &[q("1"), q("1/7"), q("1/1000")]).unwrap() {
            assert_eq!(n, 1);
        }
        assert!(box_counts(&d, &[q("0")]).is_err());
    }

    #[test]
    fn decay_examples() {
        let u = DiscreteMeasure::uniform(1).unwrap();
        let fit = fourier_decay_fit(&u, 1.0, 1e3, 2000).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.1, "{fit:?}");

        let d = DiscreteMeasure::dirac(q("0"));
        let fit = fourier_decay_fit(&d, 1.0, 1e3, 200).unwrap();
        assert_eq!(fit.exponent, 0.0);
        assert!((fit.sup_product - 1.0).abs() < 1e-12);

        let fit = fourier_decay_fit(&cantor(12), 1.0, 3f64.powi(10), 4000).unwrap();
        assert!(fit.exponent < 0.1, "{fit:?}");
        assert!(fourier_decay_fit(&d, 0.5, 10.0, 200).is_err());
        assert!(fourier_decay_fit(&d, 1.0, 10.0, 99).is_err());
    }
}
