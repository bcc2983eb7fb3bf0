//! Per-level branching numbers `t_{N,m}` and progression lengths `τ_{N,m}`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{biguint_str, mli_set, psi_sequence, KnappParams, PsiEntry};
use crate::error::{infeasible, Result};

/// The two bands `θ` and `ϑ` are drawn from.
pub const ALLOWED_FACTORS: [(f64, f64); 2] = [(0.25, 0.5), (2.0, 4.0)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelProfile {
    pub level: usize,
    pub psi: u64,
    #[serde(with = "biguint_str")]
    pub big_psi: BigUint,
    pub t: Vec<u64>,
    pub tau: Vec<u64>,
    /// Realized `t / ψ^α`.
    pub theta: Vec<f64>,
    /// Realized `τ / ψ^{α−β/2}`.
    pub vartheta: Vec<f64>,
    /// Common differences of the progressions.
    pub d: Vec<u64>,
    /// Coefficient bound the differences are independent for.
    pub m_li: u64,
    /// First term of every progression at this level.
    pub w_offset: u64,
}

impl LevelProfile {
    /// `{w_offset + j·d_m : j < τ_m}`.
    pub fn progression(&self, m: usize) -> impl Iterator<Item = u64> + '_ {
        (0..self.tau[m]).map(move |j| self.w_offset + j * self.d[m])
    }

    pub fn progression_max(&self, m: usize) -> u64 {
        self.w_offset + (self.tau[m] - 1) * self.d[m]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnappProfiles {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// First level with nontrivial branching; earlier levels have `t = τ = 1`.
    pub n0: usize,
    /// Smallest `C` with `∏ τ_i/t_i ∈ [Ψ^{−β/2}/C, C·Ψ^{−β/2}]` at every level from `n0` on.
    pub ratio_constant: f64,
    /// Largest factor by which a running product of `θ` or `ϑ` strays from its target.
    pub corridor: f64,
    pub levels: Vec<LevelProfile>,
}

impl KnappProfiles {
    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `Ψ(ℓ)`, with `Ψ(0) = 1`.
    pub fn big_psi(&self, level: usize) -> BigUint {
        if level == 0 {
            BigUint::from(1u8)
        } else {
            self.levels[level - 1].big_psi.clone()
        }
    }

    pub fn ln_big_psi(&self, level: usize) -> f64 {
        self.levels[..level].iter().map(|l| (l.psi as f64).ln()).sum()
    }

    /// `∏_{i≤ℓ} τ_{i,m}/t_{i,m}`.
    pub fn mass_ratio(&self, level: usize, m: usize) -> f64 {
        self.levels[..level]
            .iter()
            .map(|l| l.tau[m] as f64 / l.t[m] as f64)
            .product()
    }

    /// `t_{1,m}⋯t_{ℓ,m}`.
    pub fn branch_product(&self, level: usize, m: usize) -> u128 {
        self.levels[..level].iter().map(|l| l.t[m] as u128).product()
    }
}

#[cfg(test)]
fn in_allowed(x: f64) -> bool {
    ALLOWED_FACTORS.iter().any(|(lo, hi)| (lo - 1e-12..=hi + 1e-12).contains(&x))
}

/// Point of the allowed bands nearest to `want` on a log scale.
fn nearest_allowed(want: f64) -> f64 {
    let mut best = ALLOWED_FACTORS[0].0;
    let mut best_gap = f64::INFINITY;
    for (lo, hi) in ALLOWED_FACTORS {
        let x = want.clamp(lo, hi);
        let gap = (x.ln() - want.ln()).abs();
        if gap < best_gap {
            best = x;
            best_gap = gap;
        }
    }
    best
}

/// `ψ(N+1)^α log(8Ψ(N+1))`, the target for the running products up to level `N`.
fn target(next: &PsiEntry, alpha: f64) -> f64 {
    let ln_psi = big_ln(&next.big_psi);
    (next.psi as f64).powf(alpha) * (8f64.ln() + ln_psi)
}

pub(crate) fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_string().parse::<f64>().map(f64::ln).unwrap_or(f64::INFINITY)
    } else {
        let shifted: BigUint = x >> (bits - 64);
        shifted.to_string().parse::<f64>().unwrap().ln() + (bits - 64) as f64 * std::f64::consts::LN_2
    }
}

/// Whether some integer `t ≤ ψ` has `t/ψ^α` in an allowed band.
fn branching_admissible(psi: u64, alpha: f64) -> bool {
    if alpha == 0.0 {
        return true;
    }
    let scale = (psi as f64).powf(alpha);
    ALLOWED_FACTORS.iter().any(|(lo, hi)| {
        let first = (lo * scale - 1e-9).ceil().max(1.0);
        first <= (hi * scale + 1e-9).floor() && first <= psi as f64
    })
}

/// Greedy choice of the branching profile.
///
/// Below `n0`, `t = τ = 1`. From `n0` on, `θ` and `ϑ` are taken from the allowed
/// bands so that the realized running products from `n0` move toward
/// `ψ(N+1)^α log(8Ψ(N+1))`, normalized to 1 at `N = n0 − 1`.
/// They are then rounded to integers `1 ≤ τ ≤ t ≤ ψ`, and `τ` is lowered until
/// every progression fits in `[ψ]`. A measure with `α_m = 0` is a single point.
pub fn choose_profiles(params: &KnappParams) -> Result<KnappProfiles> {
    params.validate()?;
    let k = params.k;
    let psis = psi_sequence(&params.phi, params.n_max + 1)?;
    let n0 = (1..=params.n_max)
        .find(|&n| {
            params
                .alphas
                .iter()
                .all(|&a| branching_admissible(psis[n - 1].psi, a))
        })
        .ok_or_else(|| {
            infeasible(format!(
                "no level <= {} admits an integer t with t/psi^alpha in [1/4,1/2] or [2,4]",
                params.n_max
            ))
        })?;
    let r = params.r();
    let mut theta_run = vec![1.0f64; k];
    let mut vartheta_run = vec![1.0f64; k];
    let mut corridor: f64 = 1.0;
    let mut levels = Vec::with_capacity(params.n_max);
    for n in 1..=params.n_max {
        let entry = &psis[n - 1];
        let psi = entry.psi;
        let mut t = vec![1u64; k];
        let mut tau = vec![1u64; k];
        if n >= n0 {
            for m in 0..k {
                let (a, b) = (params.alphas[m], params.betas[m]);
                if a == 0.0 {
                    continue;
                }
                let goal = target(&psis[n], a) / target(&psis[n0 - 1], a);
                let scale_t = (psi as f64).powf(a);
                let theta = nearest_allowed(goal / theta_run[m]);
                t[m] = ((scale_t * theta).round() as u64).clamp(1, psi);
                let scale_tau = (psi as f64).powf(a - b / 2.0);
                let vartheta = nearest_allowed(goal / vartheta_run[m]);
                tau[m] = ((scale_tau * vartheta).round() as u64).clamp(1, t[m]);
            }
            if r.is_none() {
                tau.iter_mut().for_each(|x| *x = 1);
            }
        }
        let (m_li, d) = fit_progressions(&mut tau, psi, r, k)?;
        let mut theta = vec![1.0; k];
        let mut vartheta = vec![1.0; k];
        for m in 0..k {
            let (a, b) = (params.alphas[m], params.betas[m]);
            theta[m] = t[m] as f64 / (psi as f64).powf(a);
            vartheta[m] = tau[m] as f64 / (psi as f64).powf(a - b / 2.0);
            if n >= n0 && a > 0.0 {
                theta_run[m] *= theta[m];
                vartheta_run[m] *= vartheta[m];
                let goal = target(&psis[n], a) / target(&psis[n0 - 1], a);
                corridor = corridor
                    .max((theta_run[m] / goal).max(goal / theta_run[m]))
                    .max((vartheta_run[m] / goal).max(goal / vartheta_run[m]));
            }
        }
        levels.push(LevelProfile {
            level: n,
            psi,
            big_psi: entry.big_psi.clone(),
            t,
            tau,
            theta,
            vartheta,
            d,
            m_li,
            w_offset: 1,
        });
    }
    let mut profiles = KnappProfiles {
        alphas: params.alphas.clone(),
        betas: params.betas.clone(),
        n0,
        ratio_constant: 1.0,
        corridor,
        levels,
    };
    profiles.ratio_constant = ratio_constant(&profiles, n0);
    Ok(profiles)
}

pub(crate) fn ratio_constant(p: &KnappProfiles, from: usize) -> f64 {
    let mut c: f64 = 1.0;
    for n in from.max(1)..=p.depth() {
        let ln_psi = p.ln_big_psi(n);
        for m in 0..p.k() {
            let dev = p.mass_ratio(n, m).ln() + p.betas[m] / 2.0 * ln_psi;
            c = c.max(dev.abs().exp());
        }
    }
    c
}

/// Lowers progression lengths until `1 + (τ_m − 1)d_m ≤ ψ − 1` for every `m`.
fn fit_progressions(tau: &mut [u64], psi: u64, r: Option<u64>, k: usize) -> Result<(u64, Vec<u64>)> {
    loop {
        let tau_max = *tau.iter().max().expect("k >= 1");
        let m_li = match (tau_max, r) {
            (1, _) | (_, None) => 1,
            (t, Some(r)) => r * (t - 1) + 1,
        };
        let violating = match mli_set(m_li, k) {
            Ok(d) => {
                let bad = (0..k)
                    .filter(|&m| {
                        (tau[m] - 1)
                            .checked_mul(d[m])
                            .and_then(|x| x.checked_add(1))
                            .is_none_or(|x| x > psi - 1)
                    })
                    .max_by_key(|&m| (tau[m], m));
                match bad {
                    None => return Ok((m_li, d)),
                    Some(m) => m,
                }
            }
            Err(_) => (0..k).max_by_key(|&m| (tau[m], m)).expect("k >= 1"),
        };
        if tau[violating] == 1 {
            return Err(infeasible("1 + (tau - 1) d <= psi - 1 with tau = 1"));
        }
        tau[violating] -= 1;
    }
}
