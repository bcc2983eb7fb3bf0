//! Finite measures on the line: self-similar measures truncated at a finite
//! depth, block (interval) measures, power-weighted densities and their
//! pushforwards under scaling.
//!
//! Atom positions are exact rationals. Weights are `f64`; they only feed
//! quadrature and norms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Rational = BigRational;

/// Default bound on the number of atoms a constructor may materialize.
pub const DEFAULT_ATOM_CAP: usize = 10_000_000;

/// Parses `"num/den"`, a plain integer, or a finite decimal such as `"0.65"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if s.contains('/') {
            return Err(Error::Parse(format!("cannot mix '/' and '.' in {s:?}")));
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(numer, denom);
        return Ok(if negative { -r } else { r });
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(s)
            .map(Rational::from_integer)
            .map_err(|e| Error::Parse(format!("{s:?}: {e}"))),
    }
}

pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter storing a [`Rational`] as a `"num/den"` string.
pub mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec_str {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&rational_to_string(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// The similarity `x ↦ ratio·x + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityMap {
    #[serde(with = "rational_str")]
    pub ratio: Rational,
    #[serde(with = "rational_str")]
    pub translation: Rational,
}

impl SimilarityMap {
    pub fn new(ratio: Rational, translation: Rational) -> Self {
        Self { ratio, translation }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.ratio * x + &self.translation
    }

    pub fn fixed_point(&self) -> Rational {
        &self.translation / (Rational::one() - &self.ratio)
    }
}

#[derive(Deserialize)]
struct IfsRepr {
    maps: Vec<SimilarityMap>,
    #[serde(with = "rational_vec_str")]
    probs: Vec<Rational>,
}

/// A similarity IFS together with its probability vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IfsRepr")]
pub struct SimilarityIfs {
    maps: Vec<SimilarityMap>,
    #[serde(with = "rational_vec_str")]
    probs: Vec<Rational>,
}

impl TryFrom<IfsRepr> for SimilarityIfs {
    type Error = Error;

    fn try_from(r: IfsRepr) -> Result<Self> {
        SimilarityIfs::new(r.maps, r.probs)
    }
}

impl SimilarityIfs {
    pub fn new(maps: Vec<SimilarityMap>, probs: Vec<Rational>) -> Result<Self> {
        if maps.is_empty() {
            return Err(invalid("IFS needs at least one map"));
        }
        if maps.len() != probs.len() {
            return Err(invalid(format!(
                "{} maps but {} probabilities",
                maps.len(),
                probs.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            let a = m.ratio.abs();
            if a.is_zero() || a >= Rational::one() {
                return Err(invalid(format!(
                    "map {i}: |ratio| = {} is not in (0, 1)",
                    rational_to_string(&a)
                )));
            }
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(invalid("probabilities must be nonnegative"));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(invalid(format!(
                "probabilities sum to {}, not 1",
                rational_to_string(&total)
            )));
        }
        Ok(Self { maps, probs })
    }

    /// Homogeneous IFS with equal weights: maps `x·ratio + t` for each `t`.
    pub fn natural(ratio: Rational, translations: &[Rational]) -> Result<Self> {
        let m = translations.len();
        if m == 0 {
            return Err(invalid("IFS needs at least one map"));
        }
        let p = Rational::new(BigInt::one(), BigInt::from(m));
        Self::new(
            translations
                .iter()
                .map(|t| SimilarityMap::new(ratio.clone(), t.clone()))
                .collect(),
            vec![p; m],
        )
    }

    /// The middle-third Cantor IFS `{x/3, x/3 + 2/3}` with weights `(1/2, 1/2)`.
    pub fn middle_third() -> Self {
        let third = Rational::new(1.into(), 3.into());
        Self::natural(third, &[Rational::zero(), Rational::new(2.into(), 3.into())])
            .expect("valid IFS")
    }

    pub fn maps(&self) -> &[SimilarityMap] {
        &self.maps
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.probs.iter().map(rational_to_f64).collect()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// The common ratio, when every map shares it.
    pub fn homogeneous_ratio(&self) -> Option<&Rational> {
        let r = &self.maps[0].ratio;
        self.maps.iter().all(|m| &m.ratio == r).then_some(r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    Atomic,
    /// Uniform density `weight / width` on `[position, position + width)`.
    Block { width: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub position: Rational,
    pub weight: f64,
}

/// A finitely supported measure on ℝ, either atomic or a union of equal-width blocks.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    kind: MeasureKind,
    atoms: Vec<Atom>,
    total_mass: f64,
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl PartialEq for DiscreteMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.atoms == other.atoms && self.total_mass == other.total_mass
    }
}

const MASS_TOLERANCE: f64 = 1e-12;

impl DiscreteMeasure {
    /// Atomic measure; coincident positions are merged by adding weights.
    pub fn atomic(atoms: Vec<(Rational, f64)>) -> Result<Self> {
        let atoms = sort_and_merge(atoms)?;
        let total = atoms.iter().map(|a| a.weight).sum();
        Self::from_parts(MeasureKind::Atomic, atoms, total)
    }

    /// Block measure of common `width`; `atoms` hold left endpoints and block masses.
    pub fn blocks(width: Rational, atoms: Vec<(Rational, f64)>) -> Result<Self> {
        let total = atoms.iter().map(|a| a.1).sum();
        Self::blocks_with_mass(width, atoms, total)
    }

    pub(crate) fn blocks_with_mass(
        width: Rational,
        mut atoms: Vec<(Rational, f64)>,
        total_mass: f64,
    ) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let atoms = atoms
            .into_iter()
            .map(|(position, weight)| Atom { position, weight })
            .collect();
        Self::from_parts(MeasureKind::Block { width }, atoms, total_mass)
    }

    /// Validates every invariant of the type. `atoms` must already be sorted.
    pub fn from_parts(kind: MeasureKind, atoms: Vec<Atom>, total_mass: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("a measure needs at least one atom"));
        }
        for a in &atoms {
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(invalid(format!("weight {} is not a finite nonnegative real", a.weight)));
            }
        }
        for w in atoms.windows(2) {
            if w[0].position >= w[1].position {
                return Err(invalid("atom positions must be strictly increasing"));
            }
        }
        if let MeasureKind::Block { width } = &kind {
            if !width.is_positive() {
                return Err(invalid("block width must be positive"));
            }
            for w in atoms.windows(2) {
                if &w[0].position + width > w[1].position {
                    return Err(invalid("blocks overlap"));
                }
            }
        }
        let sum: f64 = atoms.iter().map(|a| a.weight).sum();
        if !total_mass.is_finite() || (sum - total_mass).abs() > MASS_TOLERANCE * total_mass.abs().max(f64::MIN_POSITIVE) {
            return Err(invalid(format!(
                "weights sum to {sum} but total mass is {total_mass}"
            )));
        }
        let positions = atoms.iter().map(|a| rational_to_f64(&a.position)).collect();
        let weights = atoms.iter().map(|a| a.weight).collect();
        Ok(Self {
            kind,
            atoms,
            total_mass,
            positions,
            weights,
        })
    }

    /// Unit point mass at `position`.
    pub fn dirac(position: Rational) -> Self {
        Self::atomic(vec![(position, 1.0)]).expect("valid dirac")
    }

    /// Lebesgue measure on `[0, 1]` split into `cells` equal blocks.
    pub fn uniform(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(invalid("cells must be positive"));
        }
        let width = Rational::new(1.into(), BigInt::from(cells));
        let w = 1.0 / cells as f64;
        let atoms = (0..cells)
            .map(|i| (Rational::from_integer(i.into()) * &width, w))
            .collect();
        Self::blocks_with_mass(width, atoms, 1.0)
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Atom positions (block left endpoints) as `f64`.
    pub fn positions_f64(&self) -> &[f64] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn block_width(&self) -> Option<&Rational> {
        match &self.kind {
            MeasureKind::Atomic => None,
            MeasureKind::Block { width } => Some(width),
        }
    }

    pub fn block_width_f64(&self) -> Option<f64> {
        self.block_width().map(rational_to_f64)
    }

    pub fn is_block(&self) -> bool {
        matches!(self.kind, MeasureKind::Block { .. })
    }

    /// Closed convex hull of the support.
    pub fn support(&self) -> (Rational, Rational) {
        let lo = self.atoms[0].position.clone();
        let mut hi = self.atoms[self.atoms.len() - 1].position.clone();
        if let Some(w) = self.block_width() {
            hi += w;
        }
        (lo, hi)
    }

    pub fn support_f64(&self) -> (f64, f64) {
        let (lo, hi) = self.support();
        (rational_to_f64(&lo), rational_to_f64(&hi))
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.support();
        rational_to_f64(&(hi - lo))
    }

    /// Representative points: atoms themselves, or block centres.
    pub fn centers_f64(&self) -> Vec<f64> {
        match self.block_width_f64() {
            None => self.positions.clone(),
            Some(h) => self.positions.iter().map(|x| x + 0.5 * h).collect(),
        }
    }

    /// Mass of the closed interval `[lo, hi]`; blocks contribute pro rata.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        match self.block_width_f64() {
            None => {
                let start = self.positions.partition_point(|&x| x < lo);
                let end = self.positions.partition_point(|&x| x <= hi);
                self.weights[start..end].iter().sum()
            }
            Some(h) => {
                let start = self.positions.partition_point(|&x| x + h <= lo);
                let end = self.positions.partition_point(|&x| x <= hi);
                let mut mass = 0.0;
                for i in start..end {
                    let a = self.positions[i];
                    let overlap = (hi.min(a + h) - lo.max(a)).max(0.0);
                    mass += self.weights[i] * (overlap / h).min(1.0);
                }
                mass
            }
        }
    }
}

fn sort_and_merge(mut atoms: Vec<(Rational, f64)>) -> Result<Vec<Atom>> {
    atoms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for (position, weight) in atoms {
        match out.last_mut() {
            Some(last) if last.position == position => last.weight += weight,
            _ => out.push(Atom { position, weight }),
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block_width: Option<String>,
    total_mass: f64,
    atoms: Vec<(String, f64)>,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            kind: if self.is_block() { "block" } else { "atomic" }.into(),
            block_width: self.block_width().map(rational_to_string),
            total_mass: self.total_mass,
            atoms: self
                .atoms
                .iter()
                .map(|a| (rational_to_string(&a.position), a.weight))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MeasureRepr::deserialize(d)?;
        let atoms = r
            .atoms
            .iter()
            .map(|(p, w)| parse_rational(p).map(|position| Atom { position, weight: *w }))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let kind = match (r.kind.as_str(), r.block_width) {
            ("atomic", None) => MeasureKind::Atomic,
            ("block", Some(w)) => MeasureKind::Block {
                width: parse_rational(&w).map_err(D::Error::custom)?,
            },
            (k, _) => {
                return Err(D::Error::custom(format!(
                    "kind {k:?} with inconsistent block_width"
                )))
            }
        };
        DiscreteMeasure::from_parts(kind, atoms, r.total_mass).map_err(D::Error::custom)
    }
}

/// Atoms of the depth-`depth` approximation in word order, with exact weights.
///
/// The word `(i_1, …, i_n)` contributes the point `φ_{i_1}∘…∘φ_{i_n}(0)` with
/// weight `p_{i_1}⋯p_{i_n}`.
pub fn self_similar_words(
    ifs: &SimilarityIfs,
    depth: usize,
    cap: usize,
) -> Result<Vec<(Rational, Rational)>> {
    if depth == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    let m = ifs.len() as u128;
    let count = m.checked_pow(depth as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::ResourceLimit {
            what: "self-similar atoms",
            requested: count,
            cap: cap as u128,
        });
    }
    let mut level: Vec<(Rational, Rational)> = vec![(Rational::zero(), Rational::one())];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * ifs.len());
        for (map, p) in ifs.maps().iter().zip(ifs.probs()) {
            for (x, w) in &level {
                next.push((map.apply(x), w * p));
            }
        }
        level = next;
    }
    Ok(level)
}

/// Depth-`depth` atomic approximation of the self-similar measure of `ifs`.
pub fn build_self_similar(ifs: &SimilarityIfs, depth: usize, cap: usize) -> Result<DiscreteMeasure> {
    let words = self_similar_words(ifs, depth, cap)?;
    let atoms = words
        .into_iter()
        .map(|(x, w)| (x, rational_to_f64(&w)))
        .collect();
    let mut mu = DiscreteMeasure::atomic(atoms)?;
    // The weights of a probability IFS sum to exactly one.
    mu.total_mass = mu.weights.iter().sum();
    Ok(mu)
}

/// Pushforward under `x ↦ u·x`.
pub fn pushforward_scale(measure: &DiscreteMeasure, u: &Rational) -> Result<DiscreteMeasure> {
    if u.is_zero() {
        return Err(invalid("scale factor must be nonzero"));
    }
    let mut atoms: Vec<Atom> = match measure.block_width() {
        None => measure
            .atoms
            .iter()
            .map(|a| Atom {
                position: &a.position * u,
                weight: a.weight,
            })
            .collect(),
        Some(h) => measure
            .atoms
            .iter()
            .map(|a| {
                // A reflected block [a, a+h) lands on (u(a+h), u·a].
                let position = if u.is_negative() {
                    (&a.position + h) * u
                } else {
                    &a.position * u
                };
                Atom {
                    position,
                    weight: a.weight,
                }
            })
            .collect(),
    };
    if u.is_negative() {
        atoms.reverse();
    }
    let kind = match &measure.kind {
        MeasureKind::Atomic => MeasureKind::Atomic,
        MeasureKind::Block { width } => MeasureKind::Block { width: width * u.abs() },
    };
    DiscreteMeasure::from_parts(kind, atoms, measure.total_mass)
}

/// The density `x^{-exponent}` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerDensity {
    exponent: f64,
}

impl PowerDensity {
    pub fn new(exponent: f64) -> Result<Self> {
        if !exponent.is_finite() || exponent < 0.0 {
            return Err(invalid(format!("exponent {exponent} must be in [0, 1)")));
        }
        if exponent >= 1.0 {
            return Err(invalid(format!(
                "exponent {exponent} >= 1: x^-exponent is not integrable on [0, 1]"
            )));
        }
        Ok(Self { exponent })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `∫_0^x t^{-exponent} dt`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let e = 1.0 - self.exponent;
        x.powf(e) / e
    }

    pub fn total_mass(&self) -> f64 {
        1.0 / (1.0 - self.exponent)
    }

    pub fn density(&self, x: f64) -> f64 {
        x.powf(-self.exponent)
    }
}

/// Block measure on `cells` equal cells of `[0, 1]` carrying the exact cell integrals.
pub fn discretize_power_density(pd: &PowerDensity, cells: usize) -> Result<DiscreteMeasure> {
    if cells < 2 {
        return Err(invalid("cells must be at least 2"));
    }
    let width = Rational::new(1.into(), BigInt::from(cells));
    let n = cells as f64;
    let mut prev = 0.0;
    let mut atoms = Vec::with_capacity(cells);
    for i in 0..cells {
        let next = if i + 1 == cells {
            pd.total_mass()
        } else {
            pd.antiderivative((i + 1) as f64 / n)
        };
        atoms.push((Rational::from_integer(i.into()) * &width, next - prev));
        prev = next;
    }
    DiscreteMeasure::blocks_with_mass(width, atoms, pd.total_mass())
}

/// Certificate produced by [`check_separation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Separation {
    /// First-level images of the attractor's hull are pairwise disjoint.
    Ssc,
    /// Images of the open hull are disjoint (they always lie inside it).
    OscInterval,
    Unverified,
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Separation::Ssc => "SSC",
            Separation::OscInterval => "OSC-interval",
            Separation::Unverified => "Unverified",
        })
    }
}

fn image(map: &SimilarityMap, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let a = map.apply(lo);
    let b = map.apply(hi);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Exact convex hull `[a, b]` of the attractor.
///
/// Each endpoint is the image of an endpoint under some map, so the hull solves
/// one of finitely many 2×2 linear systems; the right one is the system whose
/// solution is invariant under the union of the images.
pub fn attractor_hull(ifs: &SimilarityIfs) -> (Rational, Rational) {
    let maps = ifs.maps();
    let one = Rational::one();
    for i in maps {
        for j in maps {
            for lo_uses_hi in [false, true] {
                for hi_uses_hi in [false, true] {
                    // a - λ_i·(a|b) = t_i ; b - λ_j·(a|b) = t_j
                    let (a11, a12) = if lo_uses_hi {
                        (one.clone(), -i.ratio.clone())
                    } else {
                        (&one - &i.ratio, Rational::zero())
                    };
                    let (a21, a22) = if hi_uses_hi {
                        (Rational::zero(), &one - &j.ratio)
                    } else {
                        (-j.ratio.clone(), one.clone())
                    };
                    let det = &a11 * &a22 - &a12 * &a21;
                    if det.is_zero() {
                        continue;
                    }
                    let a = (&i.translation * &a22 - &a12 * &j.translation) / &det;
                    let b = (&a11 * &j.translation - &a21 * &i.translation) / &det;
                    if a > b {
                        continue;
                    }
                    let mut lo = None::<Rational>;
                    let mut hi = None::<Rational>;
                    for m in maps {
                        let (l, h) = image(m, &a, &b);
                        if lo.as_ref().is_none_or(|x| &l < x) {
                            lo = Some(l);
                        }
                        if hi.as_ref().is_none_or(|x| &h > x) {
                            hi = Some(h);
                        }
                    }
                    if lo.as_ref() == Some(&a) && hi.as_ref() == Some(&b) {
                        return (a, b);
                    }
                }
            }
        }
    }
    unreachable!("a contracting IFS always has an invariant hull")
}

/// Interval-based separation certificate for `ifs`.
pub fn check_separation(ifs: &SimilarityIfs) -> Separation {
    if ifs.len() == 1 {
        return Separation::Ssc;
    }
    let (a, b) = attractor_hull(ifs);
    let mut images: Vec<(Rational, Rational)> =
        ifs.maps().iter().map(|m| image(m, &a, &b)).collect();
    images.sort_by(|x, y| match x.0.cmp(&y.0) {
        Ordering::Equal => x.1.cmp(&y.1),
        o => o,
    });
    if images.windows(2).all(|w| w[0].1 < w[1].0) {
        return Separation::Ssc;
    }
    if a < b && images.windows(2).all(|w| w[0].1 <= w[1].0) {
        return Separation::OscInterval;
    }
    Separation::Unverified
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn ifs(maps: &[(&str, &str)], probs: &[&str]) -> SimilarityIfs {
        SimilarityIfs::new(
            maps.iter().map(|(r, t)| SimilarityMap::new(q(r), q(t))).collect(),
            probs.iter().map(|p| q(p)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(q("1/3"), Rational::new(1.into(), 3.into()));
        assert_eq!(q("-2/6"), Rational::new((-1).into(), 3.into()));
        assert_eq!(q("0.65"), Rational::new(13.into(), 20.into()));
        assert_eq!(q("-0.5"), Rational::new((-1).into(), 2.into()));
        assert_eq!(q("7"), Rational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn middle_third_depth_one_and_two() {
        let cantor = SimilarityIfs::middle_third();
        let mu = build_self_similar(&cantor, 1, DEFAULT_ATOM_CAP).unwrap();
        let got: Vec<_> = mu.atoms().iter().map(|a| (a.position.clone(), a.weight)).collect();
        assert_eq!(got, vec![(q("0"), 0.5), (q("2/3"), 0.5)]);

        let mu = build_self_similar(&cantor, 2, DEFAULT_ATOM_CAP).unwrap();
        let pos: Vec<_> = mu.atoms().iter().map(|a| a.position.clone()).collect();
        assert_eq!(pos, vec![q("0"), q("2/9"), q("2/3"), q("8/9")]);
        assert!(mu.weights().iter().all(|&w| w == 0.25));
        assert_eq!(mu.total_mass(), 1.0);
    }

    #[test]
    fn single_map_is_a_fixed_point() {
        let f = ifs(&[("1/2", "0")], &["1"]);
        for depth in [1, 5, 20] {
            let mu = build_self_similar(&f, depth, DEFAULT_ATOM_CAP).unwrap();
            assert_eq!(mu.len(), 1);
            assert_eq!(mu.atoms()[0].position, q("0"));
            assert_eq!(mu.total_mass(), 1.0);
        }
    }

    #[test]
    fn atom_cap_is_enforced() {
        let cantor = SimilarityIfs::middle_third();
        let err = build_self_similar(&cantor, 10, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { requested: 1024, cap: 1000, .. }));
    }

    #[test]
    fn invalid_ifs_rejected() {
        let bad_ratio = SimilarityIfs::new(vec![SimilarityMap::new(q("1"), q("0"))], vec![q("1")]);
        assert!(bad_ratio.is_err());
        let bad_probs = SimilarityIfs::new(
            vec![SimilarityMap::new(q("1/2"), q("0")), SimilarityMap::new(q("1/2"), q("1/2"))],
            vec![q("1/2"), q("1/3")],
        );
        assert!(bad_probs.is_err());
        assert!(SimilarityIfs::new(vec![], vec![]).is_err());
    }

    #[test]
    fn ifs_json_schema() {
        let json = r#"{"maps":[{"ratio":"1/3","translation":"0"},{"ratio":"1/3","translation":"2/3"}],"probs":["1/2","1/2"]}"#;
        let f: SimilarityIfs = serde_json::from_str(json).unwrap();
        assert_eq!(f, SimilarityIfs::middle_third());
        assert_eq!(serde_json::to_string(&f).unwrap(), json);
        let bad = r#"{"maps":[{"ratio":"1/3","translation":"0"}],"probs":["1/2"]}"#;
        assert!(serde_json::from_str::<SimilarityIfs>(bad).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let mu = build_self_similar(&SimilarityIfs::middle_third(), 1, 10).unwrap();
        let scaled = pushforward_scale(&mu, &q("3")).unwrap();
        let pos: Vec<_> = scaled.atoms().iter().map(|a| a.position.clone()).collect();
        assert_eq!(pos, vec![q("0"), q("2")]);
        assert_eq!(pushforward_scale(&mu, &q("1")).unwrap(), mu);
        let reflected = pushforward_scale(&mu, &q("-1")).unwrap();
        let pos: Vec<_> = reflected.atoms().iter().map(|a| a.position.clone()).collect();
        assert_eq!(pos, vec![q("-2/3"), q("0")]);
        assert!(pushforward_scale(&mu, &q("0")).is_err());
    }

    #[test]
    fn pushforward_reflects_blocks() {
        let u = DiscreteMeasure::blocks(q("1/4"), vec![(q("0"), 0.25), (q("1/2"), 0.75)]).unwrap();
        let r = pushforward_scale(&u, &q("-2")).unwrap();
        let pos: Vec<_> = r.atoms().iter().map(|a| a.position.clone()).collect();
        assert_eq!(pos, vec![q("-3/2"), q("-1/2")]);
        assert_eq!(r.block_width(), Some(&q("1/2")));
        assert_eq!(r.weights(), &[0.75, 0.25]);
    }

    #[test]
    fn power_density_examples() {
        let uniform = discretize_power_density(&PowerDensity::new(0.0).unwrap(), 4).unwrap();
        assert_eq!(uniform.weights(), &[0.25; 4]);

        let half = discretize_power_density(&PowerDensity::new(0.5).unwrap(), 2).unwrap();
        let s2 = 2f64.sqrt();
        assert!((half.weights()[0] - s2).abs() < 1e-15);
        assert!((half.weights()[1] - (2.0 - s2)).abs() < 1e-15);

        let fine = discretize_power_density(&PowerDensity::new(0.6).unwrap(), 1 << 14).unwrap();
        assert!((fine.total_mass() - 2.5).abs() < 1e-12);
        let coarse = discretize_power_density(&PowerDensity::new(0.6).unwrap(), 1 << 13).unwrap();
        assert_eq!(fine.total_mass(), coarse.total_mass());

        assert!(PowerDensity::new(1.0).is_err());
        assert!(PowerDensity::new(1.5).is_err());
        assert!(discretize_power_density(&PowerDensity::new(0.2).unwrap(), 1).is_err());
    }

    #[test]
    fn separation_examples() {
        assert_eq!(check_separation(&SimilarityIfs::middle_third()), Separation::Ssc);
        let halves = ifs(&[("1/2", "0"), ("1/2", "1/2")], &["1/2", "1/2"]);
        assert_eq!(check_separation(&halves), Separation::OscInterval);
        let overlap = ifs(&[("0.6", "0"), ("0.6", "0.4")], &["1/2", "1/2"]);
        assert_eq!(check_separation(&overlap), Separation::Unverified);
    }

    #[test]
    fn hull_with_reflections() {
        // x ↦ -x/3 + 1/3 and x ↦ x/3 + 2/3 both preserve [0, 1].
        let f = ifs(&[("-1/3", "1/3"), ("1/3", "2/3")], &["1/2", "1/2"]);
        assert_eq!(attractor_hull(&f), (q("0"), q("1")));
        assert_eq!(check_separation(&f), Separation::Ssc);
    }

    #[test]
    fn block_overlap_rejected() {
        let r = DiscreteMeasure::blocks(q("1/2"), vec![(q("0"), 0.5), (q("1/4"), 0.5)]);
        assert!(r.is_err());
    }

    #[test]
    fn measure_json_roundtrip() {
        let mu = build_self_similar(&SimilarityIfs::middle_third(), 3, 100).unwrap();
        let s = serde_json::to_string(&mu).unwrap();
        let back: DiscreteMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, mu);
        let u = DiscreteMeasure::uniform(4).unwrap();
        let back: DiscreteMeasure = serde_json::from_str(&serde_json::to_string(&u).unwrap()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn interval_mass_blocks_pro_rata() {
        let u = DiscreteMeasure::uniform(4).unwrap();
        assert!((u.interval_mass(0.125, 0.625) - 0.5).abs() < 1e-15);
        assert!((u.interval_mass(-1.0, 2.0) - 1.0).abs() < 1e-15);
        let mu = build_self_similar(&SimilarityIfs::middle_third(), 2, 100).unwrap();
        assert_eq!(mu.interval_mass(0.0, 0.3), 0.5);
        assert_eq!(mu.interval_mass(0.0, 0.0), 0.25);
    }
}
