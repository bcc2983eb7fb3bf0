//! Sets of integers with no small vanishing integer combination.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Coefficient vectors examined by [`is_mli`] before it falls back to the sufficient condition.
pub const EXHAUSTIVE_CAP: u128 = 100_000_000;

/// `d_1 = 2`, `d_m = M(d_1 + ⋯ + d_{m−1}) + 1 = (2M+1)(M+1)^{m−2}`.
pub fn mli_set(m: u64, k: usize) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(invalid("M must be positive"));
    }
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let mut ds: Vec<u64> = Vec::with_capacity(k);
    let mut sum: u64 = 0;
    for i in 0..k {
        let d = if i == 0 {
            2
        } else {
            m.checked_mul(sum)
                .and_then(|x| x.checked_add(1))
                .ok_or_else(|| invalid(format!("d_{} overflows for M = {m}", i + 1)))?
        };
        sum = sum
            .checked_add(d)
            .ok_or_else(|| invalid(format!("partial sum overflows for M = {m}")))?;
        ds.push(d);
    }
    Ok(ds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MliMethod {
    Exhaustive,
    /// `d_m > M(d_1 + ⋯ + d_{m−1})` for every `m ≥ 2`; a negative answer is inconclusive.
    Sufficient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MliCheck {
    pub independent: bool,
    pub method: MliMethod,
}

/// Whether no nonzero `ℓ ∈ (−M, M)^k` has `Σ ℓ_m d_m = 0`.
pub fn is_mli(ds: &[i64], m: u64) -> Result<MliCheck> {
    if m == 0 {
        return Err(invalid("M must be positive"));
    }
    let k = ds.len();
    let width = 2 * m as u128 - 1;
    let work = (k as u128).saturating_mul(width.saturating_pow(k as u32));
    if work <= EXHAUSTIVE_CAP {
        return Ok(MliCheck {
            independent: exhaustive(ds, m as i64),
            method: MliMethod::Exhaustive,
        });
    }
    let mut sum: i128 = 0;
    let mut ok = true;
    for (i, d) in ds.iter().enumerate() {
        let d = *d as i128;
        if i > 0 && d.abs() <= m as i128 * sum {
            ok = false;
        }
        sum += d.abs();
    }
    Ok(MliCheck {
        independent: ok,
        method: MliMethod::Sufficient,
    })
}

fn exhaustive(ds: &[i64], m: i64) -> bool {
    match ds.len() {
        0 => true,
        1 => ds[0] != 0,
        _ => {
            // Up to sign, a relation has its first nonzero coefficient positive.
            let (first, rest) = (ds[0] as i128, &ds[1..]);
            let rest_has_relation = !exhaustive(rest, m);
            if rest_has_relation {
                return false;
            }
            !(1..m).into_par_iter().any(|l0| {
                let target = -(l0 as i128) * first;
                representable(rest, m, target)
            })
        }
    }
}

/// Whether `target = Σ ℓ_i d_i` for some `ℓ ∈ (−M, M)^len`.
fn representable(ds: &[i64], m: i64, target: i128) -> bool {
    match ds.split_first() {
        None => target == 0,
        Some((d, rest)) => {
            let d = *d as i128;
            let bound: i128 = rest.iter().map(|x| (x.unsigned_abs() as i128) * (m as i128 - 1)).sum();
            (-(m - 1)..m).any(|l| {
                let remaining = target - l as i128 * d;
                remaining.abs() <= bound && representable(rest, m, remaining)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets() {
        assert_eq!(mli_set(3, 3).unwrap(), vec![2, 7, 28]);
        assert_eq!(mli_set(7, 1).unwrap(), vec![2]);
        assert_eq!(mli_set(1, 2).unwrap(), vec![2, 3]);
        for m in 1..6u64 {
            for (i, d) in mli_set(m, 5).unwrap().iter().enumerate().skip(1) {
                assert_eq!(*d, (2 * m + 1) * (m + 1).pow(i as u32 - 1));
            }
        }
    }

    #[test]
    fn checks() {
        let c = is_mli(&[2, 7, 28], 3).unwrap();
        assert!(c.independent);
        assert_eq!(c.method, MliMethod::Exhaustive);
        assert!(!is_mli(&[1, 2], 3).unwrap().independent);
        assert!(is_mli(&[5], 100).unwrap().independent);
        assert!(!is_mli(&[0], 1).unwrap().independent);
        // 2·7 − 7·2 = 0 needs |ℓ| = 7 ≥ M.
        assert!(is_mli(&[2, 7], 7).unwrap().independent);
        assert!(!is_mli(&[2, 7], 8).unwrap().independent);
        let ds: Vec<i64> = mli_set(1000, 3).unwrap().iter().map(|&d| d as i64).collect();
        let big = is_mli(&ds, 1000).unwrap();
        assert_eq!(big.method, MliMethod::Sufficient);
        assert!(big.independent);
        assert!(!is_mli(&[2, 2001, 2_003_000], 1000).unwrap().independent);
    }

    fn brute(ds: &[i64], m: i64) -> bool {
        let k = ds.len() as u32;
        let w = (2 * m - 1) as i64;
        (0..w.pow(k)).all(|mut code| {
            let mut s = 0i64;
            let mut nonzero = false;
            for d in ds {
                let l = code % w - (m - 1);
                code /= w;
                nonzero |= l != 0;
                s += l * d;
            }
            !nonzero || s != 0
        })
    }

    #[test]
    fn agrees_with_enumeration() {
        for m in 1..5i64 {
            for a in -6..7i64 {
                for b in -6..7i64 {
                    for c in [1i64, 3, 9] {
                        let ds = [a, b, c];
                        assert_eq!(is_mli(&ds, m as u64).unwrap().independent, brute(&ds, m), "{ds:?} M={m}");
                    }
                }
            }
        }
    }
}
