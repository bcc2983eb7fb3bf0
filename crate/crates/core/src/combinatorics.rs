//! Exact counting behind the Knapp lower bound: sumsets of progressions,
//! representation histograms of `r`-fold sums, their `ℓ²` mass, and the
//! B-spline identity that turns an `L^{2r}` norm into a lattice sum.

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::extension::{bspline_hat_k_exact, lq_freq_norm, product_modulus, FrequencyGrid};
use crate::knapp::{knapp_indicator, KnappFamily, KnappProfiles};
use crate::measure::{rational_to_f64, DiscreteMeasure, Rational};

/// Bound on the brute-force size of [`sumset_cardinality`].
pub const SUMSET_CAP: u128 = 100_000_000;
/// Bound on `∏|𝒜_m|^r` for [`g_histogram`].
pub const HISTOGRAM_CAP: u128 = 1_000_000_000;
/// Bound on `Ψ(N)` for [`norm_identity_check`].
pub const IDENTITY_PSI_CAP: u128 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub start: i128,
    pub step: i128,
    pub len: u64,
}

impl Progression {
    pub fn iter(&self) -> impl Iterator<Item = i128> + '_ {
        (0..self.len as i128).map(move |j| self.start + j * self.step)
    }
}

/// `|V_1 + ⋯ + V_k|` by enumerating every sum.
pub fn sumset_cardinality(aps: &[Progression]) -> Result<u64> {
    if aps.is_empty() {
        return Err(invalid("at least one progression is required"));
    }
    let total = aps
        .iter()
        .try_fold(1u128, |acc, v| acc.checked_mul(v.len as u128))
        .unwrap_or(u128::MAX);
    if total > SUMSET_CAP {
        return Err(Error::ResourceLimit {
            what: "sumset brute force",
            requested: total,
            cap: SUMSET_CAP,
        });
    }
    let mut sums: HashSet<i128> = HashSet::with_capacity(total as usize);
    let mut partial = vec![0i128];
    for (i, v) in aps.iter().enumerate() {
        if i + 1 == aps.len() {
            for s in &partial {
                for x in v.iter() {
                    sums.insert(s + x);
                }
            }
        } else {
            partial = partial.iter().flat_map(|s| v.iter().map(move |x| s + x)).collect();
        }
    }
    Ok(sums.len() as u64)
}

/// `g(z)`: the number of `r·k`-tuples, `r` entries drawn from each `𝒜_m`, summing to `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumHistogram {
    pub entries: BTreeMap<i128, BigUint>,
    pub r: u32,
    pub source_sizes: Vec<usize>,
}

impl SumHistogram {
    pub fn l1(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn support(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, z: i128) -> BigUint {
        self.entries.get(&z).cloned().unwrap_or_default()
    }

    /// `(g⋆g)(Δ) = Σ_z g(z) g(z + Δ)`.
    pub fn autocorrelation(&self, delta: i128) -> BigUint {
        self.entries
            .iter()
            .filter_map(|(z, g)| self.entries.get(&(z + delta)).map(|h| g * h))
            .sum()
    }
}

impl Serialize for SumHistogram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            r: u32,
            source_sizes: &'a [usize],
            entries: Vec<(String, String)>,
        }
        Repr {
            r: self.r,
            source_sizes: &self.source_sizes,
            entries: self.entries.iter().map(|(z, g)| (z.to_string(), g.to_string())).collect(),
        }
        .serialize(s)
    }
}

fn convolve<T: Clone + CheckedAdd + CheckedMul + Zero>(
    acc: &BTreeMap<i128, T>,
    h: &BTreeMap<i128, T>,
) -> Option<BTreeMap<i128, T>> {
    let mut out: BTreeMap<i128, T> = BTreeMap::new();
    for (z, g) in acc {
        for (x, c) in h {
            let add = g.checked_mul(c)?;
            let slot = out.entry(z + x).or_insert_with(T::zero);
            *slot = slot.checked_add(&add)?;
        }
    }
    Some(out)
}

fn histogram_with<T: Clone + CheckedAdd + CheckedMul + Zero + One>(
    sets: &[Vec<i128>],
    r: u32,
) -> Option<BTreeMap<i128, T>> {
    let singles: Vec<BTreeMap<i128, T>> = sets
        .iter()
        .map(|s| {
            let mut h: BTreeMap<i128, T> = BTreeMap::new();
            for x in s {
                let slot = h.entry(*x).or_insert_with(T::zero);
                *slot = slot.checked_add(&T::one()).expect("count fits");
            }
            h
        })
        .collect();
    let mut acc: BTreeMap<i128, T> = BTreeMap::from([(0, T::one())]);
    for _ in 0..r {
        for h in &singles {
            acc = convolve(&acc, h)?;
        }
    }
    Some(acc)
}

/// Histogram of `Σ_{n≤r} Σ_m a_{n,m}` over `a_{n,m} ∈ 𝒜_m`, by `r·k` successive convolutions.
///
/// Entries of a list are counted with multiplicity. Counts are accumulated in
/// 64 bits and recomputed with arbitrary precision if that overflows.
pub fn g_histogram(atom_sets: &[Vec<i128>], r: u32) -> Result<SumHistogram> {
    g_histogram_capped(atom_sets, r, HISTOGRAM_CAP)
}

pub fn g_histogram_capped(atom_sets: &[Vec<i128>], r: u32, cap: u128) -> Result<SumHistogram> {
    if atom_sets.is_empty() || atom_sets.iter().any(|s| s.is_empty()) {
        return Err(invalid("every atom set must be nonempty"));
    }
    if r == 0 {
        return Err(invalid("r must be positive"));
    }
    let tuples = atom_sets
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul((s.len() as u128).checked_pow(r)?))
        .unwrap_or(u128::MAX);
    if tuples > cap {
        return Err(Error::ResourceLimit {
            what: "histogram tuples",
            requested: tuples,
            cap,
        });
    }
    let entries = match histogram_with::<u64>(atom_sets, r) {
        Some(small) => small.into_iter().map(|(z, g)| (z, BigUint::from(g))).collect(),
        None => histogram_with::<BigUint>(atom_sets, r).expect("arbitrary precision cannot overflow"),
    };
    Ok(SumHistogram {
        entries,
        r,
        source_sizes: atom_sets.iter().map(Vec::len).collect(),
    })
}

/// `Σ_z g(z)²`, the number of `2r·k`-tuples whose two halves have equal sums.
pub fn count_solutions(h: &SumHistogram) -> BigUint {
    h.entries.values().map(|g| g * g).sum()
}

/// `‖g‖₁² / |supp g|`.
pub fn cs_lower_bound(h: &SumHistogram) -> BigRational {
    let l1 = BigInt::from(h.l1());
    BigRational::new(&l1 * &l1, BigInt::from(h.support()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub level: usize,
    pub p: f64,
    pub q: f64,
    pub r: u64,
    /// `Γ(ℓ)^{−1}` up to the absolute constant of the lower bound.
    pub gamma_inverse: f64,
    pub ln_gamma_inverse: f64,
    /// `r^{kℓ+1} ∏τ · ∏τ^{q/p−q} t^{q−q/p} / Ψ(ℓ)`.
    pub leading_term: f64,
    /// `r L · ∏τ^{q/p−q} t^{q−q/p} / Ψ(ℓ)`.
    pub lower_order_term: f64,
    /// `L = ∏(r(τ−1)+1) − r^{kℓ}∏τ`, exact.
    pub lower_order_coefficient: String,
    pub modulo_constant: bool,
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().map_or(f64::INFINITY, f64::ln)
    } else {
        let shift = bits - 900;
        (x >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// The quantity whose reciprocal bounds the multilinear ratio of the level-`ℓ` Knapp functions.
///
/// `Γ(ℓ) = [r^{kℓ+1}∏τ + rL] · ∏_{i≤ℓ,m} τ^{q/p−q} t^{q−q/p} / Ψ(ℓ)` with the
/// family's own `t`, `τ` and `Ψ`; the bracket equals `r∏(r(τ−1)+1)` exactly.
pub fn gamma_bound(profiles: &KnappProfiles, level: usize, q: f64, p: f64, r: u64) -> Result<GammaReport> {
    if level > profiles.depth() {
        return Err(invalid(format!("level {level} exceeds depth {}", profiles.depth())));
    }
    if !(p >= 1.0) {
        return Err(invalid(format!("p = {p} must be at least 1")));
    }
    if !(q >= 1.0) {
        return Err(invalid(format!("q = {q} must be at least 1")));
    }
    let sum_beta: f64 = profiles.betas.iter().sum();
    if sum_beta <= 0.0 {
        return Err(invalid("the betas must not all vanish"));
    }
    let expected = (1.0 / sum_beta - 1e-12).ceil().max(1.0) as u64;
    if r != expected {
        return Err(invalid(format!("r = {r} must equal ceil(1/sum beta) = {expected}")));
    }
    if q > 2.0 * r as f64 {
        return Err(invalid(format!("q = {q} exceeds 2r = {}", 2 * r)));
    }
    let k = profiles.k();
    let rb = BigUint::from(r);
    let mut expanded = BigUint::one();
    let mut tau_prod = BigUint::one();
    let mut ln_e = 0.0;
    let (a_tau, a_t) = (q / p - q, q - q / p);
    for l in &profiles.levels[..level] {
        for m in 0..k {
            expanded *= &rb * (l.tau[m] - 1) + 1u8;
            tau_prod *= l.tau[m];
            ln_e += a_tau * (l.tau[m] as f64).ln() + a_t * (l.t[m] as f64).ln();
        }
    }
    let leading = rb.pow((k * level + 1) as u32) * &tau_prod;
    let lower = BigInt::from(expanded.clone()) - BigInt::from(rb.pow((k * level) as u32) * &tau_prod);
    let bracket = &rb * &expanded;
    let ln_psi = profiles.ln_big_psi(level);
    let ln_gamma = big_ln(&bracket) + ln_e - ln_psi;
    let scale = (ln_e - ln_psi).exp();
    let lower_f = lower.to_f64().unwrap_or(f64::NAN) * r as f64;
    Ok(GammaReport {
        level,
        p,
        q,
        r,
        gamma_inverse: (-ln_gamma).exp(),
        ln_gamma_inverse: -ln_gamma,
        leading_term: (big_ln(&leading) + ln_e - ln_psi).exp(),
        lower_order_term: lower_f * scale,
        lower_order_coefficient: lower.to_string(),
        modulo_constant: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub step: f64,
}

/// Compares `‖∏_m (f_m dμ_m)^‖_{L^{2r}}^{2r}` by quadrature with its lattice expansion.
///
/// Measure `m` puts mass `masses[m]` on each block `[a/S, (a+1)/S)`, `a ∈ sets[m]`.
/// The expansion is `(∏ masses)^{2r} · S · Σ_Δ (g⋆g)(Δ) K̂(Δ)` where `K̂` is the
/// B-spline of order `2kr`, supported on `|Δ| < kr`.
pub fn norm_identity(
    sets: &[Vec<i128>],
    scale: u128,
    masses: &[f64],
    r: u32,
    grid: &FrequencyGrid,
) -> Result<IdentityReport> {
    if sets.len() != masses.len() {
        return Err(invalid("one mass per atom set is required"));
    }
    if scale == 0 || r == 0 {
        return Err(invalid("scale and r must be positive"));
    }
    let k = sets.len();
    let width = Rational::new(1.into(), BigInt::from(scale));
    let measures: Vec<DiscreteMeasure> = sets
        .iter()
        .zip(masses)
        .map(|(s, &w)| {
            let atoms = s
                .iter()
                .map(|a| (Rational::new(BigInt::from(*a), BigInt::from(scale)), w))
                .collect();
            DiscreteMeasure::blocks(width.clone(), atoms)
        })
        .collect::<Result<_>>()?;
    let total_diam: f64 = measures.iter().map(|m| m.diameter()).sum();
    grid.check_resolution(2.0 * r as f64 * total_diam)
        .map_err(|_| invalid(format!("step {} too coarse: the Nyquist guard needs step <= 1/(8 r sum diam)", grid.step)))?;
    let ones: Vec<Vec<f64>> = measures.iter().map(|m| vec![1.0; m.len()]).collect();
    let modulus = product_modulus(&measures, &ones, grid)?;
    let two_r = 2.0 * r as f64;
    let lhs = lq_freq_norm(&modulus, grid, two_r)?.powf(two_r);

    let h = g_histogram(sets, r)?;
    let order = 2 * k as u32 * r;
    let reach = (k as i128) * r as i128;
    let mut lattice = Rational::zero();
    for delta in (1 - reach)..reach {
        let c = h.autocorrelation(delta);
        if c.is_zero() {
            continue;
        }
        let kernel = bspline_hat_k_exact(order, delta as i64)?;
        lattice += Rational::from_integer(BigInt::from(c)) * kernel;
    }
    let prefactor: f64 = masses.iter().map(|w| w.powf(two_r)).product::<f64>() * scale as f64;
    let rhs = prefactor * rational_to_f64(&lattice);
    Ok(IdentityReport {
        lhs,
        rhs,
        rel_error: (lhs - rhs).abs() / rhs.abs(),
        radius: grid.radius,
        step: grid.step,
    })
}

/// [`norm_identity`] for `f_{ℓ,m} dμ_{N,m}` of a built family at its deepest level.
pub fn norm_identity_check(family: &KnappFamily, level: usize, r: u32, grid: &FrequencyGrid) -> Result<IdentityReport> {
    let depth = family.depth();
    let scale = family
        .profiles
        .big_psi(depth)
        .to_u128()
        .filter(|&s| s <= IDENTITY_PSI_CAP)
        .ok_or_else(|| Error::ResourceLimit {
            what: "Psi(N) for the norm identity",
            requested: family.profiles.big_psi(depth).to_u128().unwrap_or(u128::MAX),
            cap: IDENTITY_PSI_CAP,
        })?;
    let mut sets = Vec::with_capacity(family.k());
    let mut masses = Vec::with_capacity(family.k());
    for m in 0..family.k() {
        let f = knapp_indicator(family, level, m)?;
        sets.push(
            family.endpoints[m]
                .0
                .iter()
                .zip(&f)
                .filter(|(_, v)| **v > 0.0)
                .map(|(a, _)| *a as i128)
                .collect(),
        );
        masses.push(1.0 / family.profiles.branch_product(depth, m) as f64);
    }
    norm_identity(&sets, scale, &masses, r, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapp::{build_family, KnappParams, PhiSpec};
    use proptest::prelude::*;

    fn ap(start: i128, step: i128, len: u64) -> Progression {
        Progression { start, step, len }
    }

    #[test]
    fn sumsets() {
        assert_eq!(sumset_cardinality(&[ap(0, 2, 3), ap(0, 7, 3), ap(0, 28, 3)]).unwrap(), 27);
        assert_eq!(sumset_cardinality(&[ap(0, 1, 2), ap(0, 1, 2)]).unwrap(), 3);
        assert_eq!(sumset_cardinality(&[ap(5, -3, 11)]).unwrap(), 11);
        assert!(matches!(
            sumset_cardinality(&[ap(0, 1, 100_000), ap(0, 1, 100_000)]),
            Err(Error::ResourceLimit { .. })
        ));
    }

    fn hist(pairs: &[(i128, u64)]) -> BTreeMap<i128, BigUint> {
        pairs.iter().map(|&(z, g)| (z, BigUint::from(g))).collect()
    }

    #[test]
    fn histograms() {
        let h = g_histogram(&[vec![0, 1]], 2).unwrap();
        assert_eq!(h.entries, hist(&[(0, 1), (1, 2), (2, 1)]));
        assert_eq!(count_solutions(&h), BigUint::from(6u8));
        assert_eq!(cs_lower_bound(&h), BigRational::new(16.into(), 3.into()));
        let h = g_histogram(&[vec![0, 1], vec![0, 10]], 1).unwrap();
        assert_eq!(h.entries, hist(&[(0, 1), (1, 1), (10, 1), (11, 1)]));
        assert_eq!(count_solutions(&h), BigUint::from(4u8));
        assert_eq!(cs_lower_bound(&h), BigRational::from_integer(4.into()));
        let single = g_histogram(&[vec![7], vec![-3]], 3).unwrap();
        assert_eq!(count_solutions(&single), BigUint::one());
        assert!(g_histogram(&[vec![]], 1).is_err());
        assert!(matches!(
            g_histogram(&[(0..1000).collect()], 4),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn big_counters() {
        let sets = vec![vec![0i128; 1 << 12]; 2];
        let h = g_histogram_capped(&sets, 3, u128::MAX).unwrap();
        assert_eq!(h.get(0), BigUint::from(1u8) << 72);
    }

    #[test]
    fn unit_atom_identity() {
        let grid = FrequencyGrid::new(400.0, 1.0 / 16.0).unwrap();
        let rep = norm_identity(&[vec![0]], 1, &[1.0], 1, &grid).unwrap();
        assert!((rep.rhs - 1.0).abs() < 1e-15);
        assert!(rep.rel_error < 2e-3, "{rep:?}");
    }

    #[test]
    fn two_atom_identity() {
        let grid = FrequencyGrid::new(200.0, 1.0 / 64.0).unwrap();
        let rep = norm_identity(&[vec![0, 1]], 2, &[0.5], 1, &grid).unwrap();
        assert!(rep.rel_error < 1e-3, "{rep:?}");
        let coarse = FrequencyGrid::new(200.0, 1.0).unwrap();
        assert!(norm_identity(&[vec![0, 1]], 2, &[0.5], 1, &coarse).is_err());
    }

    #[test]
    fn family_identity() {
        let fam = build_family(&KnappParams {
            k: 2,
            alphas: vec![0.4, 0.4],
            betas: vec![0.4, 0.4],
            phi: PhiSpec { epsilon: 1.0 },
            n_max: 2,
            seed: 42,
        })
        .unwrap();
        let grid = FrequencyGrid::new(400.0, 1.0 / 16.0).unwrap();
        let rep = norm_identity_check(&fam, 1, 1, &grid).unwrap();
        assert!(rep.rel_error < 1e-2, "{rep:?}");
    }

    #[test]
    fn gamma_at_level_zero() {
        let fam = build_family(&KnappParams {
            k: 2,
            alphas: vec![0.4, 0.4],
            betas: vec![0.4, 0.4],
            phi: PhiSpec { epsilon: 1.0 },
            n_max: 3,
            seed: 1,
        })
        .unwrap();
        let g = gamma_bound(&fam.profiles, 0, 2.0, 2.0, 2).unwrap();
        assert!((g.gamma_inverse - 0.5).abs() < 1e-15);
        assert!(gamma_bound(&fam.profiles, 1, 5.0, 2.0, 2).is_err());
        assert!(gamma_bound(&fam.profiles, 1, 2.0, 2.0, 3).is_err());
        for level in 1..=3 {
            let g = gamma_bound(&fam.profiles, level, 3.0, 2.0, 2).unwrap();
            let sum = g.leading_term + g.lower_order_term;
            assert!((sum * g.gamma_inverse - 1.0).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn histogram_invariants(
            sets in prop::collection::vec(prop::collection::vec(-20i128..20, 1..6), 1..4),
            r in 1u32..3,
        ) {
            let h = g_histogram(&sets, r).unwrap();
            let expected: BigUint = sets.iter().map(|s| BigUint::from(s.len()).pow(r)).product();
            prop_assert_eq!(h.l1(), expected);
            prop_assert!(h.entries.values().all(|g| !g.is_zero()));
            let bound = cs_lower_bound(&h);
            prop_assert!(bound <= BigRational::from_integer(BigInt::from(count_solutions(&h))));
        }
    }
}
