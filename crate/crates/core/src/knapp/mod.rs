//! Cantor-type families with embedded arithmetic progressions whose common
//! differences are linearly independent with bounded coefficients, and the
//! indicator functions that make multilinear extension ratios blow up.

mod family;
mod mli;
mod profiles;
mod validate;

pub use family::{
    build_family, build_family_capped, build_family_hl, build_validated_family, knapp_indicator, Construction, KnappFamily,
    ValidatedFamily,
};
pub use mli::{is_mli, mli_set, MliCheck, MliMethod, EXHAUSTIVE_CAP};
pub use profiles::{choose_profiles, KnappProfiles, LevelProfile, ALLOWED_FACTORS};
pub use validate::{validate_family, BallCheck, DecayCheck, FamilyReport};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{infeasible, invalid, Result};

/// `φ(t) = (log t)^ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSpec {
    pub epsilon: f64,
}

impl PhiSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid(format!("epsilon = {epsilon} must be positive")));
        }
        Ok(Self { epsilon })
    }

    pub fn phi(&self, t: f64) -> f64 {
        t.ln().powf(self.epsilon)
    }

    /// `⌈φ(2^n)^{1/2}⌉ + 2`.
    pub fn psi(&self, n: usize) -> Result<u64> {
        let x = (n as f64 * std::f64::consts::LN_2).powf(self.epsilon / 2.0);
        if !(x.is_finite() && x < (1u64 << 53) as f64) {
            return Err(invalid(format!("psi({n}) exceeds 2^53 for epsilon = {}", self.epsilon)));
        }
        Ok(x.ceil() as u64 + 2)
    }
}

/// `ψ(N)` and `Ψ(N) = ψ(1)⋯ψ(N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiEntry {
    pub psi: u64,
    #[serde(with = "biguint_str")]
    pub big_psi: BigUint,
}

pub fn psi_sequence(phi: &PhiSpec, n_max: usize) -> Result<Vec<PsiEntry>> {
    if n_max == 0 {
        return Err(invalid("N_max must be at least 1"));
    }
    let mut out = Vec::with_capacity(n_max);
    let mut acc = BigUint::from(1u8);
    for n in 1..=n_max {
        let psi = phi.psi(n)?;
        acc *= psi;
        out.push(PsiEntry {
            psi,
            big_psi: acc.clone(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnappParams {
    pub k: usize,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub phi: PhiSpec,
    pub n_max: usize,
    #[serde(default)]
    pub seed: u64,
}

impl KnappParams {
    /// Shape errors are invalid arguments; violated exponent constraints are infeasibilities.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if self.alphas.len() != self.k || self.betas.len() != self.k {
            return Err(invalid(format!(
                "expected {} alphas and betas, got {} and {}",
                self.k,
                self.alphas.len(),
                self.betas.len()
            )));
        }
        if self.n_max == 0 {
            return Err(invalid("n_max must be at least 1"));
        }
        PhiSpec::new(self.phi.epsilon)?;
        for (m, (&a, &b)) in self.alphas.iter().zip(&self.betas).enumerate() {
            if !(0.0..1.0).contains(&a) {
                return Err(infeasible(format!("0 <= alpha_{} < 1 (alpha = {a})", m + 1)));
            }
            if !(0.0..=a).contains(&b) {
                return Err(infeasible(format!("0 <= beta_{0} <= alpha_{0} (beta = {b}, alpha = {a})", m + 1)));
            }
        }
        let gaps: Vec<f64> = self.alphas.iter().zip(&self.betas).map(|(a, b)| a - b / 2.0).collect();
        for j in 1..self.k {
            if gaps[j] > gaps[j - 1] + 1e-12 {
                return Err(infeasible(format!(
                    "alpha_{0} - beta_{0}/2 <= alpha_{1} - beta_{1}/2",
                    j + 1,
                    j
                )));
            }
        }
        if gaps[self.k - 1] + (self.k - 1) as f64 * gaps[0] >= 1.0 {
            return Err(infeasible("(alpha_k - beta_k/2) + (k-1)(alpha_1 - beta_1/2) < 1"));
        }
        Ok(())
    }

    /// `⌈1/Σβ_m⌉`, or `None` when every `β_m` vanishes.
    pub fn r(&self) -> Option<u64> {
        let s: f64 = self.betas.iter().sum();
        (s > 0.0).then(|| (1.0 / s - 1e-12).ceil().max(1.0) as u64)
    }
}

pub(crate) mod biguint_str {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

pub(crate) mod u128_vec_str {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u128], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u128>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| x.parse().map_err(D::Error::custom))
            .collect()
    }
}
