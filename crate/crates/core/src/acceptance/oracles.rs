//! Reference computations that share no code path with the checked kernels.

use std::collections::HashMap;

/// `∫₀¹ y^{a−1}(1−y)^{b−1} dy`, split at 1/2 and desingularised by `y = u^{1/a}`
/// (resp. `1 − y = u^{1/b}`), then composite Simpson.
pub fn beta(a: f64, b: f64) -> f64 {
    half_beta(a, b) + half_beta(b, a)
}

fn half_beta(a: f64, b: f64) -> f64 {
    let top = 0.5f64.powf(a);
    let f = |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0) / a;
    let n = 200_000;
    let h = top / n as f64;
    let mut s = f(0.0) + f(top);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

/// `Σ_z c(z)²` by listing every half-tuple sum and counting equal pairs.
pub fn equal_half_sums(sets: &[Vec<i128>], r: u32) -> u128 {
    let slots: Vec<&Vec<i128>> = (0..r).flat_map(|_| sets.iter()).collect();
    let mut sums: Vec<i128> = vec![0];
    for s in slots {
        sums = sums.iter().flat_map(|acc| s.iter().map(move |x| acc + x)).collect();
    }
    let mut counts: HashMap<i128, u128> = HashMap::new();
    for z in sums {
        *counts.entry(z).or_default() += 1;
    }
    counts.values().map(|c| c * c).sum()
}

/// `D_2` of a homogeneous self-similar measure.
pub fn correlation_dimension(probs: &[f64], ratio: f64) -> f64 {
    probs.iter().map(|p| p * p).sum::<f64>().ln() / ratio.ln()
}
