//! Fourier extension transforms of discrete measures, frequency-side norms,
//! multilinear ratios and the cardinal B-spline kernel.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measure::DiscreteMeasure;

/// `sin(πx)/(πx)`, equal to 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// `e^{-2πiθ}` with the argument reduced mod 1 first.
fn unit_phase(theta: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * theta.rem_euclid(1.0)).sin_cos();
    Complex64::new(c, -s)
}

fn check_values(measure: &DiscreteMeasure, f: Option<&[f64]>) -> Result<()> {
    match f {
        Some(f) if f.len() != measure.len() => Err(invalid(format!(
            "function has {} values but the measure has {} atoms",
            f.len(),
            measure.len()
        ))),
        _ => Ok(()),
    }
}

/// Factor `e^{-πihξ}·sinc(hξ)` shared by every block of width `h`.
fn block_factor(measure: &DiscreteMeasure, xi: f64) -> Complex64 {
    match measure.block_width_f64() {
        None => Complex64::one(),
        Some(h) => unit_phase(0.5 * h * xi) * sinc(h * xi),
    }
}

/// `∫ f e^{-2πixξ} dμ(x)`; `f ≡ 1` when `None`.
pub fn extension_transform(measure: &DiscreteMeasure, f: Option<&[f64]>, xi: f64) -> Result<Complex64> {
    check_values(measure, f)?;
    Ok(transform_at(measure, f, xi))
}

fn transform_at(measure: &DiscreteMeasure, f: Option<&[f64]>, xi: f64) -> Complex64 {
    let pos = measure.positions_f64();
    let w = measure.weights();
    let mut acc = Complex64::zero();
    for i in 0..pos.len() {
        let c = f.map_or(1.0, |f| f[i]) * w[i];
        if c != 0.0 {
            acc += unit_phase(pos[i] * xi) * c;
        }
    }
    acc * block_factor(measure, xi)
}

/// Symmetric uniform frequency grid on `[-radius, radius]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub radius: f64,
    pub step: f64,
}

impl FrequencyGrid {
    /// The step is shrunk so that `radius` is an exact multiple of it.
    pub fn new(radius: f64, step: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("grid radius {radius} must be positive")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(invalid(format!("grid step {step} must be positive")));
        }
        let n = (radius / step).ceil().max(1.0);
        Ok(Self {
            radius,
            step: radius / n,
        })
    }

    /// Default step `1/(8·diam)` for a support of diameter `diam`.
    pub fn for_diameter(radius: f64, diam: f64) -> Result<Self> {
        let step = if diam > 0.0 { 1.0 / (8.0 * diam) } else { 0.125 };
        Self::new(radius, step)
    }

    pub fn half_len(&self) -> usize {
        (self.radius / self.step).round() as usize
    }

    pub fn len(&self) -> usize {
        2 * self.half_len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> f64 {
        (j as f64 - self.half_len() as f64) * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }

    /// Rejects steps coarser than `1/(4·diam)`.
    pub fn check_resolution(&self, diam: f64) -> Result<()> {
        if diam > 0.0 && self.step > 1.0 / (4.0 * diam) * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "grid step {} exceeds 1/(4·diam) = {} for support diameter {diam}",
                self.step,
                1.0 / (4.0 * diam)
            )));
        }
        Ok(())
    }
}

const CHUNK: usize = 64;

/// Transform at arbitrary frequencies, evaluated in parallel point by point.
pub fn evaluate_at(measure: &DiscreteMeasure, f: Option<&[f64]>, xis: &[f64]) -> Result<Vec<Complex64>> {
    check_values(measure, f)?;
    Ok(xis.par_iter().map(|&xi| transform_at(measure, f, xi)).collect())
}

/// Transform on every grid point.
pub fn evaluate_on_grid(
    measure: &DiscreteMeasure,
    f: Option<&[f64]>,
    grid: &FrequencyGrid,
) -> Result<Vec<Complex64>> {
    evaluate_uniform(measure, f, -grid.radius, grid.step, grid.len())
}

/// Transform at `start + j·step` for `j < count`.
///
/// Points are processed in chunks of 64; inside a chunk each atom's phase is
/// advanced by repeated multiplication and re-seeded at each chunk start.
/// Results do not depend on the number of threads.
pub fn evaluate_uniform(
    measure: &DiscreteMeasure,
    f: Option<&[f64]>,
    start: f64,
    step: f64,
    count: usize,
) -> Result<Vec<Complex64>> {
    check_values(measure, f)?;
    let pos = measure.positions_f64();
    let w = measure.weights();
    let coeffs: Vec<(f64, f64)> = (0..pos.len())
        .map(|i| (pos[i], f.map_or(1.0, |f| f[i]) * w[i]))
        .filter(|&(_, c)| c != 0.0)
        .collect();
    let point = |j: usize| start + j as f64 * step;
    let chunks: Vec<Vec<Complex64>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let first = c * CHUNK;
            let len = CHUNK.min(count - first);
            let xi0 = point(first);
            let mut acc = vec![Complex64::zero(); len];
            for &(a, coeff) in &coeffs {
                let rot = unit_phase(a * step);
                let mut z = unit_phase(a * xi0) * coeff;
                for slot in acc.iter_mut() {
                    *slot += z;
                    z *= rot;
                }
            }
            for (j, slot) in acc.iter_mut().enumerate() {
                *slot *= block_factor(measure, point(first + j));
            }
            acc
        })
        .collect();
    Ok(chunks.concat())
}

/// `L^q` norm over the grid by the trapezoid rule; `q = ∞` gives the maximum.
pub fn lq_freq_norm(values: &[f64], grid: &FrequencyGrid, q: f64) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(invalid(format!(
            "{} samples for a grid of {} points",
            values.len(),
            grid.len()
        )));
    }
    if q.is_nan() || q < 1.0 {
        return Err(invalid(format!("q = {q} must be at least 1")));
    }
    if q.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let n = values.len();
    let mut sum = 0.0;
    for (j, v) in values.iter().enumerate() {
        let t = v.abs().powf(q);
        sum += if j == 0 || j + 1 == n { 0.5 * t } else { t };
    }
    Ok((sum * grid.step).powf(1.0 / q))
}

/// `(Σ |f(a)|^p w_a)^{1/p}`; `p = ∞` gives the max over atoms of positive weight.
pub fn lp_norm_on_measure(measure: &DiscreteMeasure, f: &[f64], p: f64) -> Result<f64> {
    check_values(measure, Some(f))?;
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("p = {p} must be at least 1")));
    }
    let w = measure.weights();
    if p.is_infinite() {
        return Ok(f
            .iter()
            .zip(w)
            .filter(|(_, &w)| w > 0.0)
            .fold(0.0, |m, (v, _)| m.max(v.abs())));
    }
    let s: f64 = f.iter().zip(w).map(|(v, w)| v.abs().powf(p) * w).sum();
    Ok(s.powf(1.0 / p))
}

/// Absolute value of `∏_m (f_m dμ_m)^(ξ)` on the grid.
pub fn product_modulus(
    measures: &[DiscreteMeasure],
    fs: &[Vec<f64>],
    grid: &FrequencyGrid,
) -> Result<Vec<f64>> {
    if measures.is_empty() {
        return Err(invalid("need at least one measure"));
    }
    if fs.len() != measures.len() {
        return Err(invalid("one function per measure is required"));
    }
    let mut prod = vec![1.0; grid.len()];
    for (mu, f) in measures.iter().zip(fs) {
        let vals = evaluate_on_grid(mu, Some(f), grid)?;
        for (p, v) in prod.iter_mut().zip(vals) {
            *p *= v.norm();
        }
    }
    Ok(prod)
}

/// `‖∏ (f_m dμ_m)^‖_{L^q(grid)} / ∏ ‖f_m‖_{L^p(μ_m)}`.
pub fn multilinear_ratio(
    measures: &[DiscreteMeasure],
    fs: &[Vec<f64>],
    p: f64,
    q: f64,
    grid: &FrequencyGrid,
) -> Result<f64> {
    let prod = product_modulus(measures, fs, grid)?;
    let mut denom = 1.0;
    for (mu, f) in measures.iter().zip(fs) {
        let n = lp_norm_on_measure(mu, f, p)?;
        if n == 0.0 {
            return Err(invalid("a function has zero L^p norm"));
        }
        denom *= n;
    }
    Ok(lq_freq_norm(&prod, grid, q)? / denom)
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(invalid(format!("B-spline order {n} must be even and positive")));
    }
    Ok(())
}

/// `n`-fold autoconvolution of `1_{[-1/2, 1/2]}`, the Fourier transform of `sinc^n`.
pub fn bspline_hat_k(n: u32, x: f64) -> Result<f64> {
    check_order(n)?;
    let half = n as f64 / 2.0;
    // Evaluate on the left flank where fewer terms of the alternating sum survive.
    let x = -x.abs();
    if x <= -half {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut fact = 1.0;
    for i in 1..n {
        fact *= i as f64;
    }
    for j in 0..=n {
        let u = x + half - j as f64;
        if u <= 0.0 {
            break;
        }
        let term = binom * u.powi(n as i32 - 1);
        sum += if j % 2 == 0 { term } else { -term };
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    Ok((sum / fact).max(0.0))
}

/// Exact value of [`bspline_hat_k`] at an integer argument.
pub fn bspline_hat_k_exact(n: u32, x: i64) -> Result<BigRational> {
    check_order(n)?;
    let half = (n / 2) as i64;
    let x = -x.abs();
    if x <= -half {
        return Ok(BigRational::zero());
    }
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=n as i64 {
        let u = x + half - j;
        if u <= 0 {
            break;
        }
        let term = &binom * num_traits::pow(BigInt::from(u), n as usize - 1);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        binom = binom * BigInt::from(n as i64 - j) / BigInt::from(j + 1);
    }
    let fact: BigInt = (1..n as i64).map(BigInt::from).product();
    let r = BigRational::new(sum, fact);
    debug_assert!(!r.is_negative());
    Ok(r)
}

/// `∫ sinc^n`, which equals the kernel's value at the origin.
pub fn sinc_power_integral(n: u32) -> Result<f64> {
    Ok(bspline_hat_k_exact(n, 0)?.to_f64().unwrap_or(f64::NAN))
}
