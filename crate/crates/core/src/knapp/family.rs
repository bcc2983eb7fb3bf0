//! Random Cantor families with embedded progressions.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::profiles::{ratio_constant, KnappProfiles, LevelProfile};
use super::validate::{validate_family, FamilyReport};
use super::{choose_profiles, mli_set, u128_vec_str, KnappParams};
use crate::error::{infeasible, invalid, Error, Result};
use crate::measure::{DiscreteMeasure, Rational, DEFAULT_ATOM_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Construction {
    /// Slowly growing branching `ψ(N)` with per-level profiles.
    Progressive { epsilon: f64 },
    /// Constant branching `base^{2 n0}` with `t0_m^{2 n0}` children per interval.
    SingleScale { base: u64, t0: Vec<u64>, n0: u32 },
}

/// Sorted endpoint numerators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Endpoints(#[serde(with = "u128_vec_str")] pub Vec<u128>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnappFamily {
    pub construction: Construction,
    pub seed: u64,
    pub profiles: KnappProfiles,
    /// Per measure, left endpoints of the deepest level as numerators over `Ψ(depth)`.
    pub endpoints: Vec<Endpoints>,
}

impl KnappFamily {
    pub fn k(&self) -> usize {
        self.profiles.k()
    }

    pub fn depth(&self) -> usize {
        self.profiles.depth()
    }

    fn big_psi_u128(&self, level: usize) -> u128 {
        self.profiles.big_psi(level).to_u128().expect("checked at build time")
    }

    /// Level-`ℓ` endpoints of measure `m`, as numerators over `Ψ(ℓ)`.
    pub fn level_endpoints(&self, level: usize, m: usize) -> Result<Vec<u128>> {
        self.check_level(level)?;
        let div = self.big_psi_u128(self.depth()) / self.big_psi_u128(level);
        let mut out: Vec<u128> = self.endpoints[m].0.iter().map(|a| a / div).collect();
        out.dedup();
        Ok(out)
    }

    /// `P_{ℓ,m}` as numerators over `Ψ(ℓ)`.
    pub fn progression_set(&self, level: usize, m: usize) -> Result<Vec<u128>> {
        self.check_level(level)?;
        let mut set = vec![0u128];
        for l in &self.profiles.levels[..level] {
            let w: Vec<u128> = l.progression(m).map(u128::from).collect();
            set = set
                .iter()
                .flat_map(|p| w.iter().map(move |x| p * l.psi as u128 + x))
                .collect();
        }
        Ok(set)
    }

    /// `𝒜_{ℓ,N,m}`: deepest-level endpoints lying in `F_{ℓ,m}`, as numerators over `Ψ(N)`.
    pub fn structured_endpoints(&self, level: usize, m: usize) -> Result<Vec<u128>> {
        let f = knapp_indicator(self, level, m)?;
        Ok(self.endpoints[m]
            .0
            .iter()
            .zip(f)
            .filter(|(_, v)| *v > 0.0)
            .map(|(a, _)| *a)
            .collect())
    }

    /// `μ_{N,m}` at level `N`: uniform on the level-`N` intervals.
    pub fn measure(&self, level: usize, m: usize) -> Result<DiscreteMeasure> {
        let ends = self.level_endpoints(level, m)?;
        let denom = self.profiles.big_psi(level);
        let width = Rational::new(1.into(), denom.clone().into());
        let mass = 1.0 / ends.len() as f64;
        let atoms = ends
            .iter()
            .map(|a| (Rational::new(BigUint::from(*a).into(), denom.clone().into()), mass))
            .collect();
        DiscreteMeasure::blocks(width, atoms)
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            return Err(invalid(format!("level {level} exceeds built depth {}", self.depth())));
        }
        Ok(())
    }

    /// Checks every construction invariant with exact integers; returns the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        let p = &self.profiles;
        for (i, l) in p.levels.iter().enumerate() {
            let d: Vec<i64> = l.d.iter().map(|&x| x as i64).collect();
            if !super::is_mli(&d, l.m_li)?.independent {
                return Err(infeasible(format!("level {}: differences are not {}-LI", i + 1, l.m_li)));
            }
            for m in 0..self.k() {
                if !(1 <= l.tau[m] && l.tau[m] <= l.t[m] && l.t[m] <= l.psi) {
                    return Err(infeasible(format!("level {}: tau <= t <= psi", i + 1)));
                }
                if l.progression_max(m) >= l.psi {
                    return Err(infeasible(format!("level {}: W within [psi]", i + 1)));
                }
            }
        }
        for m in 0..self.k() {
            let mut parents = vec![0u128];
            for (i, l) in p.levels.iter().enumerate() {
                let level = i + 1;
                let here = self.level_endpoints(level, m)?;
                if here.len() as u128 != parents.len() as u128 * l.t[m] as u128 {
                    return Err(infeasible(format!("level {level}: t digits per parent")));
                }
                let w: Vec<u128> = l.progression(m).map(u128::from).collect();
                let present: HashSet<u128> = here.iter().copied().collect();
                for a in &parents {
                    for x in &w {
                        if !present.contains(&(a * l.psi as u128 + x)) {
                            return Err(infeasible(format!("level {level}: W inside every digit set")));
                        }
                    }
                }
                let progression = self.progression_set(level, m)?;
                if !progression.iter().all(|x| present.contains(x)) {
                    return Err(infeasible(format!("level {level}: P within A")));
                }
                parents = here;
            }
        }
        Ok(())
    }
}

fn child_digits(rng: &mut ChaCha8Rng, l: &LevelProfile, m: usize) -> Vec<u64> {
    let w: Vec<u64> = l.progression(m).collect();
    let extra = (l.t[m] - l.tau[m]) as usize;
    let pool = (l.psi - l.tau[m]) as usize;
    let mut digits = w.clone();
    for i in index::sample(rng, pool, extra) {
        // The i-th digit of [ψ] outside W.
        let mut x = i as u64;
        for &v in &w {
            if v <= x {
                x += 1;
            } else {
                break;
            }
        }
        digits.push(x);
    }
    digits.sort_unstable();
    digits
}

fn populate(profiles: &KnappProfiles, seed: u64, cap: usize) -> Result<Vec<Endpoints>> {
    let depth = profiles.depth();
    if profiles.big_psi(depth).to_u128().is_none() {
        return Err(Error::ResourceLimit {
            what: "Psi(N) as a 128-bit endpoint denominator",
            requested: u128::MAX,
            cap: u128::MAX,
        });
    }
    let atoms: u128 = (0..profiles.k()).map(|m| profiles.branch_product(depth, m)).sum();
    if atoms > cap as u128 {
        return Err(Error::ResourceLimit {
            what: "family atoms",
            requested: atoms,
            cap: cap as u128,
        });
    }
    let mut out = Vec::with_capacity(profiles.k());
    for m in 0..profiles.k() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(m as u64);
        let mut ends = vec![0u128];
        for l in &profiles.levels {
            let mut next = Vec::with_capacity(ends.len() * l.t[m] as usize);
            for a in &ends {
                for x in child_digits(&mut rng, l, m) {
                    next.push(a * l.psi as u128 + x as u128);
                }
            }
            ends = next;
        }
        out.push(Endpoints(ends));
    }
    Ok(out)
}

/// Draws the random digit sets for the chosen profiles.
///
/// Each parent interval independently receives a uniformly random digit set of
/// size `t_{N,m}` containing `W_{N,m}`. Measure `m` uses the ChaCha8 stream `m`
/// of `seed`.
pub fn build_family(params: &KnappParams) -> Result<KnappFamily> {
    build_family_capped(params, DEFAULT_ATOM_CAP)
}

pub fn build_family_capped(params: &KnappParams, cap: usize) -> Result<KnappFamily> {
    let profiles = choose_profiles(params)?;
    let endpoints = populate(&profiles, params.seed, cap)?;
    Ok(KnappFamily {
        construction: Construction::Progressive {
            epsilon: params.phi.epsilon,
        },
        seed: params.seed,
        profiles,
        endpoints,
    })
}

/// Largest `n0` tried when searching.
pub const MAX_N0: u32 = 8;

/// Single-scale family: every level branches into `N = base^{2 n0}` digits, keeps
/// `t_m = t0_m^{2 n0}` of them, and embeds a progression of length `t0_m^{n0}`
/// with offset 0. With `n0 = 0` the least admissible `n0 ≤ 8` is used.
pub fn build_family_hl(base: u64, t0: &[u64], n0: u32, levels: usize, seed: u64, cap: usize) -> Result<KnappFamily> {
    let k = t0.len();
    if k == 0 || levels == 0 {
        return Err(invalid("need at least one measure and one level"));
    }
    if base < 3 {
        return Err(invalid("base must be at least 3"));
    }
    if let Some(&bad) = t0.iter().find(|&&t| t <= 1 || t >= base) {
        return Err(invalid(format!("t0 = {bad} must satisfy 1 < t0 < base")));
    }
    let alphas: Vec<f64> = t0.iter().map(|&t| (t as f64).ln() / (base as f64).ln()).collect();
    if t0.windows(2).any(|w| w[1] >= w[0]) {
        return Err(infeasible("alpha_k < ... < alpha_1"));
    }
    if (k - 1) as f64 * alphas[0] + alphas[k - 1] >= 2.0 {
        return Err(infeasible("(k-1) alpha_1 + alpha_k < 2"));
    }
    let sum_alpha: f64 = alphas.iter().sum();
    let r = (1.0 / sum_alpha - 1e-12).ceil().max(1.0) as u64;
    let candidates: Vec<u32> = if n0 == 0 { (1..=MAX_N0).collect() } else { vec![n0] };
    let mut chosen = None;
    for n in candidates {
        if let Some(found) = single_scale_level(base, t0, n, r) {
            chosen = Some((n, found));
            break;
        }
    }
    let (n0, (branch, t, len, m_li, d)) = chosen.ok_or_else(|| {
        infeasible(format!(
            "no n0 <= {MAX_N0} gives d_m <= N^(1 - alpha_m/2) with (len - 1) d_m < N"
        ))
    })?;
    let mut big = BigUint::from(1u8);
    let mut profile_levels = Vec::with_capacity(levels);
    for j in 1..=levels {
        big *= branch;
        profile_levels.push(LevelProfile {
            level: j,
            psi: branch,
            big_psi: big.clone(),
            t: t.clone(),
            tau: len.clone(),
            theta: vec![1.0; k],
            vartheta: vec![1.0; k],
            d: d.clone(),
            m_li,
            w_offset: 0,
        });
    }
    let mut profiles = KnappProfiles {
        alphas: alphas.clone(),
        betas: alphas,
        n0: 1,
        ratio_constant: 1.0,
        corridor: 1.0,
        levels: profile_levels,
    };
    profiles.ratio_constant = ratio_constant(&profiles, 1);
    let endpoints = populate(&profiles, seed, cap)?;
    Ok(KnappFamily {
        construction: Construction::SingleScale {
            base,
            t0: t0.to_vec(),
            n0,
        },
        seed,
        profiles,
        endpoints,
    })
}

type SingleScale = (u64, Vec<u64>, Vec<u64>, u64, Vec<u64>);

fn single_scale_level(base: u64, t0: &[u64], n: u32, r: u64) -> Option<SingleScale> {
    let branch = base.checked_pow(2 * n)?;
    let t: Vec<u64> = t0.iter().map(|x| x.checked_pow(2 * n)).collect::<Option<_>>()?;
    let len: Vec<u64> = t0.iter().map(|x| x.checked_pow(n)).collect::<Option<_>>()?;
    let m_li = r.checked_mul(len[0] - 1)?.checked_add(1)?;
    let d = mli_set(m_li, t0.len()).ok()?;
    let fits = (0..t0.len()).all(|m| {
        let bound_ok = d[m].checked_mul(len[m]).is_some_and(|x| x <= branch);
        let top_ok = (len[m] - 1).checked_mul(d[m]).is_some_and(|x| x < branch);
        bound_ok && top_ok
    });
    fits.then_some((branch, t, len, m_li, d))
}

/// `1_{F_{ℓ,m}}` on the atoms of the deepest level of measure `m`.
pub fn knapp_indicator(family: &KnappFamily, level: usize, m: usize) -> Result<Vec<f64>> {
    if m >= family.k() {
        return Err(invalid(format!("measure index {m} out of range")));
    }
    let set: HashSet<u128> = family.progression_set(level, m)?.into_iter().collect();
    let div = family.big_psi_u128(family.depth()) / family.big_psi_u128(level);
    Ok(family.endpoints[m]
        .0
        .iter()
        .map(|a| if set.contains(&(a / div)) { 1.0 } else { 0.0 })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidatedFamily {
    pub family: KnappFamily,
    pub report: FamilyReport,
    pub attempts: u32,
}

/// Builds with seeds `seed, seed + 1, …` until every decay constant is at most
/// `decay_limit`, giving up after `max_attempts` draws.
pub fn build_validated_family(
    params: &KnappParams,
    freq: (f64, f64),
    decay_limit: f64,
    max_attempts: u32,
) -> Result<ValidatedFamily> {
    let mut last = None;
    for attempt in 0..max_attempts.max(1) {
        let mut p = params.clone();
        p.seed = params.seed.wrapping_add(attempt as u64);
        let family = build_family(&p)?;
        let report = validate_family(&family, family.depth(), freq)?;
        let ok = report.decay.iter().all(|d| d.sup_product <= decay_limit);
        last = Some(ValidatedFamily {
            family,
            report,
            attempts: attempt + 1,
        });
        if ok {
            break;
        }
    }
    Ok(last.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{extension_transform, lp_norm_on_measure};
    use crate::knapp::PhiSpec;

    fn params(seed: u64, n_max: usize) -> KnappParams {
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
    fn built_family_invariants() {
        let fam = build_family(&params(42, 5)).unwrap();
        fam.check_invariants().unwrap();
        let again = build_family(&params(42, 5)).unwrap();
        assert_eq!(fam, again);
    }

    #[test]
    fn point_family() {
        let p = KnappParams {
            k: 1,
            alphas: vec![0.0],
            betas: vec![0.0],
            phi: PhiSpec { epsilon: 1.0 },
            n_max: 5,
            seed: 3,
        };
        let fam = build_family(&p).unwrap();
        fam.check_invariants().unwrap();
        for level in 0..=5 {
            assert_eq!(fam.level_endpoints(level, 0).unwrap().len(), 1);
            assert_eq!(fam.progression_set(level, 0).unwrap().len(), 1);
        }
    }

    #[test]
    fn indicator_norms() {
        let fam = build_family(&params(7, 5)).unwrap();
        let n = fam.depth();
        for m in 0..2 {
            let mu = fam.measure(n, m).unwrap();
            for level in 0..=n {
                let f = knapp_indicator(&fam, level, m).unwrap();
                let expected = fam.profiles.mass_ratio(level, m);
                for p in [1.0, 2.0, 3.5] {
                    let norm = lp_norm_on_measure(&mu, &f, p).unwrap();
                    assert!((norm - expected.powf(1.0 / p)).abs() < 1e-12);
                }
                let at_zero = extension_transform(&mu, Some(&f), 0.0).unwrap();
                assert!((at_zero.re - expected).abs() < 1e-12 && at_zero.im.abs() < 1e-12);
            }
        }
        assert!(knapp_indicator(&fam, n + 1, 0).is_err());
    }

    #[test]
    fn cylinder_masses_exact() {
        let fam = build_family(&params(11, 5)).unwrap();
        let n = fam.depth();
        for m in 0..2 {
            let total = fam.endpoints[m].0.len() as u128;
            for j in 0..=n {
                let per = fam.profiles.branch_product(j, m);
                let div = fam.big_psi_u128(n) / fam.big_psi_u128(j);
                let mut counts = std::collections::BTreeMap::new();
                for a in &fam.endpoints[m].0 {
                    *counts.entry(a / div).or_insert(0u128) += 1;
                }
                assert!(counts.values().all(|&c| c * per == total));
            }
        }
    }

    #[test]
    fn single_scale() {
        let fam = build_family_hl(4, &[3, 2], 0, 1, 5, DEFAULT_ATOM_CAP).unwrap();
        fam.check_invariants().unwrap();
        let Construction::SingleScale { n0, .. } = fam.construction else {
            panic!()
        };
        let l = &fam.profiles.levels[0];
        let n = l.psi;
        assert_eq!(n, 4u64.pow(2 * n0));
        for m in 0..2 {
            assert_eq!(l.tau[m] * l.tau[m], l.t[m]);
            assert_eq!(l.w_offset, 0);
            assert!(l.progression_max(m) < n);
            assert!(l.d[m] * l.tau[m] <= n);
        }
        assert!((fam.profiles.ratio_constant - 1.0).abs() < 1e-9);
        assert!(build_family_hl(4, &[2, 3], 0, 1, 5, DEFAULT_ATOM_CAP).is_err());
        let cantor = build_family_hl(3, &[2], 0, 2, 1, DEFAULT_ATOM_CAP).unwrap();
        cantor.check_invariants().unwrap();
    }

    #[test]
    fn atom_cap() {
        assert!(matches!(
            build_family_capped(&params(1, 5), 4),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
