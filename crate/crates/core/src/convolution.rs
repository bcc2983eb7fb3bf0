//! Grid convolution of measures, density norms, the exponent algebra that
//! turns a bilinear `(p, q)` pair into an `L^{p₀}` hypothesis, a numerical
//! harness for that implication, and checkers for its dimension-based
//! sufficient conditions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dimension::lq_dimension_homogeneous;
use crate::error::{invalid, Error, Result};
use crate::extension::{multilinear_ratio, FrequencyGrid};
use crate::measure::{check_separation, rational_to_f64, DiscreteMeasure, Separation, SimilarityIfs};

/// Default bound on `Σ atoms × cells` for [`convolve_grid`].
pub const DEFAULT_CONVOLUTION_CAP: u128 = 1 << 40;

/// A piecewise-constant density on `[origin, origin + cells·cell_width)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub origin: f64,
    pub cell_width: f64,
    pub values: Vec<f64>,
}

impl DensityEstimate {
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_width
    }

    pub fn center(&self, i: usize) -> f64 {
        self.origin + (i as f64 + 0.5) * self.cell_width
    }

    /// The density as a block measure, for transforming it.
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        let width = f64_to_rational(self.cell_width);
        let origin = f64_to_rational(self.origin);
        let atoms = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (&origin + &width * crate::measure::Rational::from_integer(i.into()), v * self.cell_width))
            .collect();
        DiscreteMeasure::blocks(width, atoms)
    }
}

fn f64_to_rational(x: f64) -> crate::measure::Rational {
    crate::measure::Rational::from_float(x).expect("finite")
}

/// Masses of `measure` on cells `[lo + ih, lo + (i+1)h)`; blocks are split by overlap.
fn bin(measure: &DiscreteMeasure, lo: f64, h: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let last = len - 1;
    let cell = |x: f64| (((x - lo) / h).floor().max(0.0) as usize).min(last);
    let pos = measure.positions_f64();
    let w = measure.weights();
    match measure.block_width_f64() {
        None => {
            for (x, m) in pos.iter().zip(w) {
                out[cell(*x)] += m;
            }
        }
        Some(bw) => {
            for (a, m) in pos.iter().zip(w) {
                let (a, b) = (*a, a + bw);
                let (i0, i1) = (cell(a), cell(b));
                if i0 == i1 {
                    out[i0] += m;
                    continue;
                }
                let density = m / bw;
                let mut assigned = 0.0;
                for (i, slot) in out.iter_mut().enumerate().take(i1).skip(i0) {
                    let c_lo = lo + i as f64 * h;
                    let overlap = (b.min(c_lo + h) - a.max(c_lo)).max(0.0);
                    let part = density * overlap;
                    *slot += part;
                    assigned += part;
                }
                out[i1] += (m - assigned).max(0.0);
            }
        }
    }
    out
}

const DIRECT_LIMIT: usize = 1 << 20;

/// Linear convolution of two nonnegative sequences.
pub fn convolve_sequences(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len() + b.len() - 1;
    if a.len().saturating_mul(b.len()) <= DIRECT_LIMIT {
        let mut out = vec![0.0; n];
        for (i, x) in a.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = n.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| {
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        buf.resize(size, Complex64::new(0.0, 0.0));
        buf
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..n].iter().map(|z| (z.re * scale).max(0.0)).collect()
}

/// Density of `μ_1 ∗ ⋯ ∗ μ_k` on a uniform grid.
///
/// The cell width is `Σ diam(μ_m) / cells`. Each measure is binned onto cells
/// of that width starting at its own left end, the mass sequences are
/// convolved, and the result is divided by the cell width. Cell `s` of the
/// result collects sums of cells whose indices add up to `s`, so it is centred
/// at `Σ lo_m + (s + k/2)·h`.
pub fn convolve_grid(measures: &[DiscreteMeasure], cells: usize) -> Result<DensityEstimate> {
    convolve_grid_capped(measures, cells, DEFAULT_CONVOLUTION_CAP)
}

pub fn convolve_grid_capped(measures: &[DiscreteMeasure], cells: usize, cap: u128) -> Result<DensityEstimate> {
    if measures.len() < 2 {
        return Err(invalid("convolution needs at least two measures"));
    }
    if cells < 16 {
        return Err(invalid(format!("{cells} cells; at least 16 are required")));
    }
    let atoms: u128 = measures.iter().map(|m| m.len() as u128).sum();
    let requested = atoms.saturating_mul(cells as u128);
    if requested > cap {
        return Err(Error::ResourceLimit {
            what: "convolution atoms x cells",
            requested,
            cap,
        });
    }
    let supports: Vec<(f64, f64)> = measures.iter().map(|m| m.support_f64()).collect();
    let total_diam: f64 = supports.iter().map(|(a, b)| b - a).sum();
    let h = if total_diam > 0.0 {
        total_diam / cells as f64
    } else {
        1.0 / cells as f64
    };
    let mut acc: Option<Vec<f64>> = None;
    for (mu, (lo, hi)) in measures.iter().zip(&supports) {
        let len = ((hi - lo) / h).floor() as usize + 1;
        let binned = bin(mu, *lo, h, len);
        acc = Some(match acc {
            None => binned,
            Some(prev) => convolve_sequences(&prev, &binned),
        });
    }
    let masses = acc.expect("at least two measures");
    let k = measures.len() as f64;
    let lo_sum: f64 = supports.iter().map(|s| s.0).sum();
    Ok(DensityEstimate {
        origin: lo_sum + (k - 1.0) * h / 2.0,
        cell_width: h,
        values: masses.iter().map(|m| m / h).collect(),
    })
}

/// `(Σ v^p h)^{1/p}`; `p = ∞` gives the maximum.
pub fn density_lp_norm(d: &DensityEstimate, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("p = {p} must be at least 1")));
    }
    if p.is_infinite() {
        return Ok(d.values.iter().fold(0.0, |m, v| m.max(*v)));
    }
    let s: f64 = d.values.iter().map(|v| v.powf(p)).sum();
    Ok((s * d.cell_width).powf(1.0 / p))
}

/// Integrability exponent required of the convolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConvolutionExponent {
    Finite(f64),
    /// `q(p−1) = p`: the convolution must be bounded.
    Infinite,
    /// `q(p−1) < p`: not expressible as an integrability condition.
    Undefined,
}

impl ConvolutionExponent {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => Some(f64::INFINITY),
            Self::Undefined => None,
        }
    }
}

/// `p₀ = q(p−1)/(q(p−1) − p)`.
pub fn theorem31_exponent(p: f64, q: f64) -> Result<ConvolutionExponent> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("p = {p} must be at least 1")));
    }
    if q.is_nan() || q < 2.0 {
        return Err(invalid(format!("q = {q} must be at least 2")));
    }
    if p.is_infinite() {
        return Ok(if q.is_infinite() {
            ConvolutionExponent::Finite(1.0)
        } else {
            ConvolutionExponent::Finite(q / (q - 1.0))
        });
    }
    if q.is_infinite() {
        return Ok(if p > 1.0 {
            ConvolutionExponent::Finite(1.0)
        } else {
            ConvolutionExponent::Undefined
        });
    }
    let a = q * (p - 1.0);
    let denom = a - p;
    if denom.abs() <= 1e-12 * a.max(p) {
        Ok(ConvolutionExponent::Infinite)
    } else if denom < 0.0 {
        Ok(ConvolutionExponent::Undefined)
    } else {
        Ok(ConvolutionExponent::Finite(a / denom))
    }
}

/// One refinement level for [`verify_theorem31`].
#[derive(Clone, Debug)]
pub struct RefinementLevel {
    pub measures: Vec<DiscreteMeasure>,
    /// Cells used when convolving this level.
    pub cells: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "HYPOTHESIS-FAIL")]
    HypothesisFail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// `None` encodes `p₀ = ∞`.
    pub p0: Option<f64>,
    pub norms: Vec<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub max_ratio_by_level: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem31Report {
    pub hypothesis: HypothesisReport,
    pub trials: TrialReport,
    pub verdict: Verdict,
}

/// Relative change allowed between consecutive density norms.
pub const NORM_STABILITY: f64 = 0.10;
/// Relative growth allowed between consecutive maximal ratios.
pub const RATIO_GROWTH: f64 = 0.25;

/// Random per-atom values, i.i.d. uniform on `[0, 1]`, one vector per measure.
pub fn random_functions(measures: &[DiscreteMeasure], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    measures
        .iter()
        .map(|m| (0..m.len()).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Numerical check that an integrable convolution yields a bounded multilinear ratio.
///
/// The hypothesis holds when the `L^{p₀}` norms of consecutive levels differ by
/// less than [`NORM_STABILITY`]. Trial `t` draws its functions from seed
/// `seed + t`. The verdict is `Pass` when each level's maximal ratio exceeds the
/// previous one by less than [`RATIO_GROWTH`].
pub fn verify_theorem31(
    levels: &[RefinementLevel],
    p: f64,
    q: f64,
    trials: usize,
    seed: u64,
    grid: &FrequencyGrid,
) -> Result<Theorem31Report> {
    let p0 = match theorem31_exponent(p, q)? {
        ConvolutionExponent::Undefined => {
            return Err(Error::Precondition(format!(
                "q(p-1) < p for p = {p}, q = {q}: no integrability exponent"
            )))
        }
        e => e.value().expect("defined"),
    };
    if levels.len() < 2 {
        return Err(Error::Precondition("at least two refinement levels are required".into()));
    }
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let mut norms = Vec::with_capacity(levels.len());
    for level in levels {
        let d = convolve_grid(&level.measures, level.cells)?;
        norms.push(density_lp_norm(&d, p0)?);
    }
    let holds = norms
        .windows(2)
        .all(|w| w[0].is_finite() && (w[1] - w[0]).abs() < NORM_STABILITY * w[0].abs());
    let mut max_ratio_by_level = Vec::with_capacity(levels.len());
    for level in levels {
        let ratios = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let fs = random_functions(&level.measures, seed.wrapping_add(t));
                multilinear_ratio(&level.measures, &fs, p, q, grid)
            })
            .collect::<Result<Vec<f64>>>()?;
        max_ratio_by_level.push(ratios.into_iter().fold(0.0, f64::max));
    }
    let stable = max_ratio_by_level
        .windows(2)
        .all(|w| w[1] < (1.0 + RATIO_GROWTH) * w[0]);
    let verdict = if !holds {
        Verdict::HypothesisFail
    } else if stable {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Theorem31Report {
        hypothesis: HypothesisReport {
            p0: p0.is_finite().then_some(p0),
            norms,
            holds,
        },
        trials: TrialReport { max_ratio_by_level },
        verdict,
    })
}

/// Parameters of the dimension-based sufficient conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CorollaryParams {
    /// `d − D_{p₀}(μ) < dim_F ν`.
    Cor32 {
        d: f64,
        lq_dim_mu: f64,
        fourier_dim_nu: f64,
    },
    /// Two homogeneous IFS with separated images, an irrational log-ratio of
    /// contractions, `Σ log m_j/|log λ_j| > 1`, and `D_{p₀}(μ_1) + D_{p₀}(μ_2) > 1`.
    Cor33 {
        first: SimilarityIfs,
        second: SimilarityIfs,
        p0: f64,
        /// The caller's assertion that `log|λ₂|/log|λ₁|` is irrational.
        irrational_log_ratio: bool,
    },
    /// Ratios 1/4 and 1/3 with weights `rho` and `(γ, 1−γ)`.
    Ex34 { rho: Vec<f64>, gamma: f64, p0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub holds: bool,
    /// Smallest slack among the strict inequalities; positive iff they all hold.
    pub margin: f64,
    pub values: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

fn homogeneous_parts(ifs: &SimilarityIfs, which: &str) -> Result<(f64, Vec<f64>)> {
    let ratio = ifs
        .homogeneous_ratio()
        .ok_or_else(|| invalid(format!("{which} IFS must share one contraction ratio")))?;
    Ok((rational_to_f64(ratio).abs(), ifs.probs_f64()))
}

/// `log m_1/|log λ_1| + log m_2/|log λ_2|` for the maps counts and ratios given.
pub fn similarity_dimension_sum(parts: &[(usize, f64)]) -> f64 {
    parts
        .iter()
        .map(|&(m, l)| (m as f64).ln() / l.abs().ln().abs())
        .sum()
}

pub fn check_corollary_hypotheses(params: &CorollaryParams) -> Result<CorollaryReport> {
    let mut values = BTreeMap::new();
    let mut flags = Vec::new();
    match params {
        CorollaryParams::Cor32 {
            d,
            lq_dim_mu,
            fourier_dim_nu,
        } => {
            let margin = fourier_dim_nu - (d - lq_dim_mu);
            values.insert("d_minus_lq_dim".into(), d - lq_dim_mu);
            values.insert("fourier_dim".into(), *fourier_dim_nu);
            Ok(CorollaryReport {
                holds: margin > 0.0,
                margin,
                values,
                flags,
            })
        }
        CorollaryParams::Cor33 {
            first,
            second,
            p0,
            irrational_log_ratio,
        } => {
            let (l1, p1) = homogeneous_parts(first, "first")?;
            let (l2, p2) = homogeneous_parts(second, "second")?;
            let gate = similarity_dimension_sum(&[(first.len(), l1), (second.len(), l2)]);
            let d1 = lq_dimension_homogeneous(&p1, l1, *p0)?;
            let d2 = lq_dimension_homogeneous(&p2, l2, *p0)?;
            let sep = [check_separation(first), check_separation(second)];
            values.insert("dimension_gate".into(), gate);
            values.insert("lq_dim_first".into(), d1);
            values.insert("lq_dim_second".into(), d2);
            values.insert("lq_dim_sum".into(), d1 + d2);
            let separated = sep.iter().all(|s| *s == Separation::Ssc);
            if !separated {
                flags.push(format!("separation not certified: {} / {}", sep[0], sep[1]));
            }
            if !irrational_log_ratio {
                flags.push("irrationality of log|l2|/log|l1| not asserted by caller".into());
            }
            let margin = (gate - 1.0).min(d1 + d2 - 1.0);
            Ok(CorollaryReport {
                holds: margin > 0.0 && separated && *irrational_log_ratio,
                margin,
                values,
                flags,
            })
        }
        CorollaryParams::Ex34 { rho, gamma, p0 } => {
            if !(0.0..=1.0).contains(gamma) {
                return Err(invalid(format!("gamma = {gamma} must lie in [0, 1]")));
            }
            let d1 = lq_dimension_homogeneous(rho, 0.25, *p0)?;
            let d2 = lq_dimension_homogeneous(&[*gamma, 1.0 - gamma], 1.0 / 3.0, *p0)?;
            let gate = similarity_dimension_sum(&[(3, 0.25), (2, 1.0 / 3.0)]);
            values.insert("dimension_gate".into(), gate);
            values.insert("lq_dim_first".into(), d1);
            values.insert("lq_dim_second".into(), d2);
            values.insert("lq_dim_sum".into(), d1 + d2);
            let margin = d1 + d2 - 1.0;
            Ok(CorollaryReport {
                holds: margin > 0.0 && gate > 1.0,
                margin,
                values,
                flags,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::extension_transform;
    use crate::measure::{discretize_power_density, parse_rational, PowerDensity, SimilarityMap};

    fn q(s: &str) -> crate::measure::Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn tent_from_uniforms() {
        let u = DiscreteMeasure::uniform(1 << 10).unwrap();
        let d = convolve_grid(&[u.clone(), u], 1 << 10).unwrap();
        let peak = density_lp_norm(&d, f64::INFINITY).unwrap();
        assert!((peak - 1.0).abs() < 0.02, "{peak}");
        assert!((d.mass() - 1.0).abs() < 1e-9);
        // Tent: value at x is min(x, 2 - x).
        for i in (0..d.values.len()).step_by(97) {
            let x = d.center(i);
            assert!((d.values[i] - x.min(2.0 - x)).abs() < 0.01, "x = {x}");
        }
    }

    #[test]
    fn dirac_is_identity() {
        let mu = DiscreteMeasure::uniform(64).unwrap();
        let d = convolve_grid(&[DiscreteMeasure::dirac(q("0")), mu.clone()], 64).unwrap();
        assert!((d.cell_width - 1.0 / 64.0).abs() < 1e-15);
        for v in &d.values[..64] {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let shifted = convolve_grid(&[DiscreteMeasure::dirac(q("1/2")), mu], 64).unwrap();
        assert!((shifted.center(0) - (0.5 + 1.0 / 64.0)).abs() < 1e-15);
    }

    #[test]
    fn power_density_convolution() {
        let pd = PowerDensity::new(0.6).unwrap();
        let mu = discretize_power_density(&pd, 1 << 12).unwrap();
        let d = convolve_grid(&[mu.clone(), mu], 1 << 12).unwrap();
        let ratios: Vec<f64> = (0..d.values.len())
            .filter(|&i| (0.1..=0.9).contains(&d.center(i)))
            .map(|i| d.values[i] / d.center(i).powf(-0.2))
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo < 1.02, "{lo} {hi}");
        assert!((d.mass() - 6.25).abs() < 1e-9 * 6.25);
    }

    #[test]
    fn norms() {
        let d = DensityEstimate {
            origin: 0.0,
            cell_width: 0.5,
            values: vec![1.0; 4],
        };
        assert!((density_lp_norm(&d, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(density_lp_norm(&d, f64::INFINITY).unwrap(), 1.0);
        assert!(density_lp_norm(&d, 0.5).is_err());
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(theorem31_exponent(2.0, 4.0).unwrap(), ConvolutionExponent::Finite(2.0));
        assert_eq!(theorem31_exponent(4.0 / 3.0, 4.0).unwrap(), ConvolutionExponent::Infinite);
        assert_eq!(theorem31_exponent(1.0, 3.0).unwrap(), ConvolutionExponent::Undefined);
        assert_eq!(theorem31_exponent(2.0, 2.0).unwrap(), ConvolutionExponent::Infinite);
    }

    #[test]
    fn fft_matches_direct() {
        let a: Vec<f64> = (0..1500).map(|i| ((i * 37 % 101) as f64) / 101.0).collect();
        let b: Vec<f64> = (0..900).map(|i| ((i * 13 % 17) as f64) / 17.0).collect();
        let fast = convolve_sequences(&a, &b);
        let mut slow = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn transform_factorizes() {
        let cantor = crate::measure::build_self_similar(&SimilarityIfs::middle_third(), 6, 1000).unwrap();
        let u = DiscreteMeasure::uniform(8).unwrap();
        let cells = 1 << 12;
        let d = convolve_grid(&[cantor.clone(), u.clone()], cells).unwrap();
        let conv = d.to_measure().unwrap();
        let limit = cells as f64 / (8.0 * 2.0);
        for xi in [0.0, 0.7, 3.0, 11.5, 40.0, limit] {
            let lhs = extension_transform(&conv, None, xi).unwrap();
            let rhs = extension_transform(&cantor, None, xi).unwrap() * extension_transform(&u, None, xi).unwrap();
            assert!((lhs - rhs).norm() <= 0.03 * rhs.norm().max(1e-3), "xi = {xi}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn verify_examples() {
        let grid = FrequencyGrid::new(50.0, 1.0 / 16.0).unwrap();
        let level = |cells: usize| {
            let u = DiscreteMeasure::uniform(cells).unwrap();
            RefinementLevel {
                measures: vec![u.clone(), u],
                cells,
            }
        };
        let r = verify_theorem31(&[level(64), level(256)], 2.0, 4.0, 8, 1, &grid).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert_eq!(r.hypothesis.p0, Some(2.0));

        let d = DiscreteMeasure::dirac(q("0"));
        let dl = |cells| RefinementLevel {
            measures: vec![d.clone(), d.clone()],
            cells,
        };
        let r = verify_theorem31(&[dl(64), dl(256)], 2.0, 4.0, 4, 1, &grid).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesisFail, "{r:?}");
        assert!(verify_theorem31(&[dl(64), dl(256)], 1.0, 4.0, 4, 1, &grid).is_err());
    }

    #[test]
    fn example_34_margins() {
        let rho = vec![0.1, 0.65, 0.25];
        let r = check_corollary_hypotheses(&CorollaryParams::Ex34 { rho: rho.clone(), gamma: 0.5, p0: 2.0 }).unwrap();
        assert!(r.holds);
        assert!((r.margin - 0.138).abs() < 1e-3, "{}", r.margin);
        let r = check_corollary_hypotheses(&CorollaryParams::Ex34 { rho, gamma: 0.3, p0: 2.0 }).unwrap();
        assert!(r.holds);
        assert!((r.margin - 0.003).abs() < 1e-3, "{}", r.margin);
        assert!((r.values["dimension_gate"] - 1.4236).abs() < 1e-3);
    }

    #[test]
    fn corollary_33_requires_assertion() {
        let quarter = SimilarityIfs::new(
            ["0", "3/8", "3/4"].iter().map(|t| SimilarityMap::new(q("1/4"), q(t))).collect(),
            vec![q("1/10"), q("13/20"), q("1/4")],
        )
        .unwrap();
        let cantor = SimilarityIfs::middle_third();
        let mut params = CorollaryParams::Cor33 {
            first: quarter.clone(),
            second: cantor.clone(),
            p0: 2.0,
            irrational_log_ratio: false,
        };
        let r = check_corollary_hypotheses(&params).unwrap();
        assert!(!r.holds && r.margin > 0.0 && r.flags.len() == 1, "{r:?}");
        if let CorollaryParams::Cor33 { irrational_log_ratio, .. } = &mut params {
            *irrational_log_ratio = true;
        }
        let r = check_corollary_hypotheses(&params).unwrap();
        assert!(r.holds && r.flags.is_empty());
    }

    #[test]
    fn corollary_32() {
        let r = check_corollary_hypotheses(&CorollaryParams::Cor32 {
            d: 1.0,
            lq_dim_mu: 0.6,
            fourier_dim_nu: 0.5,
        })
        .unwrap();
        assert!(r.holds && (r.margin - 0.1).abs() < 1e-12);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::measure::build_self_similar;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn mass_preserved_and_commutative(depth in 1usize..7, cells in 16usize..600, width in 1usize..40) {
            let mu = build_self_similar(&SimilarityIfs::middle_third(), depth, 1000).unwrap();
            let nu = DiscreteMeasure::uniform(width).unwrap();
            let a = convolve_grid(&[mu.clone(), nu.clone()], cells).unwrap();
            let b = convolve_grid(&[nu, mu], cells).unwrap();
            prop_assert!((a.mass() - 1.0).abs() < 1e-9);
            prop_assert_eq!(a.values.len(), b.values.len());
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn p0_non_increasing_in_q(p in 1.01f64..10.0, q1 in 2.0f64..50.0, dq in 0.0f64..50.0) {
            let a = theorem31_exponent(p, q1).unwrap().value();
            let b = theorem31_exponent(p, q1 + dq).unwrap().value();
            if let (Some(a), Some(b)) = (a, b) {
                prop_assert!(b <= a * (1.0 + 1e-12));
            }
        }
    }
}
