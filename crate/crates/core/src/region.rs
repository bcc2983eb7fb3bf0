//! Boundaries of the `(1/p, 1/q)` regions where multilinear extension
//! estimates are known to hold or to fail, and a Figure-style rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::convolution::{theorem31_exponent, ConvolutionExponent};
use crate::error::{invalid, Result};

/// Which side of `q(p)` the boundary speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Necessary condition: the estimate fails for `q` strictly below the boundary.
    ForbiddenBelow,
    /// Sufficient condition: the estimate holds for `q` at or above the boundary.
    AdmissibleAbove,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::ForbiddenBelow => "forbidden-below",
            Direction::AdmissibleAbove => "admissible-above",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    Thm32,
    Thm34,
    Trainor,
    TopLid,
    Suff31,
    LinearST,
}

impl BoundaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Thm32 => "Thm32",
            BoundaryKind::Thm34 => "Thm34",
            BoundaryKind::Trainor => "Trainor",
            BoundaryKind::TopLid => "TopLid",
            BoundaryKind::Suff31 => "Suff31",
            BoundaryKind::LinearST => "LinearST",
        }
    }
}

fn default_d() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RegionBoundary {
    /// Knapp families with LI progressions: `q < (2p(1−Σα) + pΣβ)/((p−1)Σβ)` fails.
    Thm32 { alphas: Vec<f64>, betas: Vec<f64> },
    /// Single-scale families: `q < p(2−Σα)/((p−1)Σα)` fails.
    Thm34 { alphas: Vec<f64> },
    /// `q ≥ d p′/Σγ` is necessary.
    Trainor {
        #[serde(default = "default_d")]
        d: f64,
        gammas: Vec<f64>,
    },
    /// `q ≥ 2d/Σ dim_B supp μ_m` is necessary.
    TopLid {
        #[serde(default = "default_d")]
        d: f64,
        box_dims: Vec<f64>,
    },
    /// Least `q ≥ 2` whose convolution exponent `q(p−1)/(q(p−1)−p)` is at most `p0`.
    Suff31 { p0: f64 },
    /// Hölder applied to the single-measure `L²` estimate `q ≥ 2 + 4(d−α)/β` at `kq`.
    LinearST {
        #[serde(default = "default_d")]
        d: f64,
        alphas: Vec<f64>,
        betas: Vec<f64>,
    },
}

fn positive_sum(xs: &[f64], name: &str) -> Result<f64> {
    if xs.is_empty() || xs.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(invalid(format!("{name} must be a nonempty list of nonnegative numbers")));
    }
    let s: f64 = xs.iter().sum();
    if s <= 0.0 {
        return Err(invalid(format!("the sum of {name} must be positive")));
    }
    Ok(s)
}

/// `p′ = p/(p−1)`, infinite at `p = 1`.
fn conjugate(p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("p = {p} must be at least 1")));
    }
    Ok(if p == 1.0 { f64::INFINITY } else if p.is_infinite() { 1.0 } else { p / (p - 1.0) })
}

impl RegionBoundary {
    pub fn kind(&self) -> BoundaryKind {
        match self {
            RegionBoundary::Thm32 { .. } => BoundaryKind::Thm32,
            RegionBoundary::Thm34 { .. } => BoundaryKind::Thm34,
            RegionBoundary::Trainor { .. } => BoundaryKind::Trainor,
            RegionBoundary::TopLid { .. } => BoundaryKind::TopLid,
            RegionBoundary::Suff31 { .. } => BoundaryKind::Suff31,
            RegionBoundary::LinearST { .. } => BoundaryKind::LinearST,
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            RegionBoundary::Suff31 { .. } | RegionBoundary::LinearST { .. } => Direction::AdmissibleAbove,
            _ => Direction::ForbiddenBelow,
        }
    }

    fn dimension(&self) -> f64 {
        match self {
            RegionBoundary::Trainor { d, .. } | RegionBoundary::TopLid { d, .. } | RegionBoundary::LinearST { d, .. } => *d,
            _ => 1.0,
        }
    }

    fn arity(&self) -> Option<usize> {
        match self {
            RegionBoundary::Thm32 { alphas, .. } | RegionBoundary::Thm34 { alphas } | RegionBoundary::LinearST { alphas, .. } => {
                Some(alphas.len())
            }
            RegionBoundary::Trainor { gammas, .. } => Some(gammas.len()),
            RegionBoundary::TopLid { box_dims, .. } => Some(box_dims.len()),
            RegionBoundary::Suff31 { .. } => None,
        }
    }
}

/// The boundary exponent `q(p)`; `+∞` where the condition is vacuous or unavailable.
pub fn evaluate_boundary(b: &RegionBoundary, p: f64) -> Result<f64> {
    let pc = conjugate(p)?;
    match b {
        RegionBoundary::Thm32 { alphas, betas } => {
            if alphas.len() != betas.len() {
                return Err(invalid("alphas and betas must have equal length"));
            }
            positive_sum(alphas, "alphas")?;
            let sb = positive_sum(betas, "betas")?;
            let sa: f64 = alphas.iter().sum();
            Ok(pc * (2.0 * (1.0 - sa) + sb) / sb)
        }
        RegionBoundary::Thm34 { alphas } => {
            let sa = positive_sum(alphas, "alphas")?;
            Ok(pc * (2.0 - sa) / sa)
        }
        RegionBoundary::Trainor { d, gammas } => {
            check_dimension(*d)?;
            Ok(d * pc / positive_sum(gammas, "gammas")?)
        }
        RegionBoundary::TopLid { d, box_dims } => {
            check_dimension(*d)?;
            Ok(2.0 * d / positive_sum(box_dims, "box dimensions")?)
        }
        RegionBoundary::Suff31 { p0 } => suff31(p, *p0),
        RegionBoundary::LinearST { d, alphas, betas } => {
            check_dimension(*d)?;
            if alphas.len() != betas.len() || alphas.is_empty() {
                return Err(invalid("alphas and betas must be nonempty and of equal length"));
            }
            if alphas.iter().zip(betas).any(|(a, b)| !(*b > 0.0) || !(*a >= 0.0) || *a > *d) {
                return Err(invalid("each beta must be positive and each alpha must lie in [0, d]"));
            }
            if p < 2.0 {
                return Ok(f64::INFINITY);
            }
            let k = alphas.len() as f64;
            let worst = alphas
                .iter()
                .zip(betas)
                .map(|(a, b)| 2.0 + 4.0 * (d - a) / b)
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(worst / k)
        }
    }
}

fn check_dimension(d: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(invalid(format!("dimension d = {d} must be positive")));
    }
    Ok(())
}

fn suff31(p: f64, p0: f64) -> Result<f64> {
    if p0.is_nan() || p0 < 1.0 {
        return Err(invalid(format!("p0 = {p0} must be at least 1")));
    }
    if p == 1.0 || p0 == 1.0 {
        return Ok(f64::INFINITY);
    }
    let pc = p / (p - 1.0);
    let q = if p0.is_infinite() { pc } else { p0 * pc / (p0 - 1.0) };
    let q = q.max(2.0);
    // The closed form sits on the boundary of the exponent's finite range; confirm it.
    match theorem31_exponent(p, q)? {
        ConvolutionExponent::Finite(e) if e <= p0 * (1.0 + 1e-9) => Ok(q),
        ConvolutionExponent::Infinite if p0.is_infinite() => Ok(q),
        _ => Ok(f64::INFINITY),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub kind: BoundaryKind,
    pub inv_p: f64,
    pub inv_q: f64,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    /// Index into the boundary list whose region is the larger one.
    pub outer: usize,
    pub inner: usize,
    /// `outer`'s region contains `inner`'s at every grid `p`.
    pub holds: bool,
    /// Containment is strict at every grid `p`.
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureClaim {
    pub sum_alpha: f64,
    /// `Σα < 1`, the regime the claim is made for.
    pub applies: bool,
    /// `max(Thm32, TopLid) > Trainor` at every grid `p`.
    pub holds: bool,
    pub failing_p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub p: f64,
    /// Thm32 boundary: smaller `q` fail.
    pub lower: f64,
    /// Linear-theory boundary: larger `q` hold.
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub p_grid: Vec<f64>,
    pub samples: Vec<RegionSample>,
    pub containment: Vec<Containment>,
    pub figure_claim: Option<FigureClaim>,
    /// `(Thm32, LinearST)` at `p = 2` when the first is smaller.
    pub gap: Option<Gap>,
}

fn inverse(q: f64) -> f64 {
    if q.is_infinite() {
        0.0
    } else {
        1.0 / q
    }
}

/// Samples every boundary on `p_grid`, compares regions of equal direction
/// pairwise, and checks the Figure-1 claim and the linear-theory gap when the
/// relevant boundaries are present.
pub fn region_report(boundaries: &[RegionBoundary], p_grid: &[f64], alphas: &[f64], betas: &[f64]) -> Result<RegionReport> {
    if alphas.len() != betas.len() {
        return Err(invalid("alphas and betas must have equal length"));
    }
    if let Some(b) = boundaries.iter().find(|b| b.dimension() != boundaries[0].dimension()) {
        return Err(invalid(format!("{} uses a different dimension d", b.kind().as_str())));
    }
    let k = boundaries.iter().find_map(RegionBoundary::arity);
    if let Some(b) = boundaries.iter().find(|b| b.arity().is_some_and(|a| Some(a) != k)) {
        return Err(invalid(format!("{} uses a different number of measures", b.kind().as_str())));
    }
    let values: Vec<Vec<f64>> = boundaries
        .iter()
        .map(|b| p_grid.iter().map(|&p| evaluate_boundary(b, p)).collect())
        .collect::<Result<_>>()?;
    let mut samples = Vec::with_capacity(boundaries.len() * p_grid.len());
    for (b, qs) in boundaries.iter().zip(&values) {
        for (&p, &q) in p_grid.iter().zip(qs) {
            samples.push(RegionSample {
                kind: b.kind(),
                inv_p: 1.0 / p,
                inv_q: inverse(q),
                direction: b.direction(),
            });
        }
    }
    let mut containment = Vec::new();
    for (i, a) in boundaries.iter().enumerate() {
        for (j, b) in boundaries.iter().enumerate() {
            if i == j || a.direction() != b.direction() {
                continue;
            }
            // Forbidden-below regions grow with q; admissible-above regions shrink.
            let sign = if a.direction() == Direction::ForbiddenBelow { 1.0 } else { -1.0 };
            let pairs = values[i].iter().zip(&values[j]);
            containment.push(Containment {
                outer: i,
                inner: j,
                holds: pairs.clone().all(|(x, y)| sign * (x - y) >= 0.0 || x == y),
                strict: pairs.clone().all(|(x, y)| sign * (x - y) > 0.0),
            });
        }
    }
    let find = |kind: BoundaryKind| boundaries.iter().position(|b| b.kind() == kind);
    let figure_claim = match (find(BoundaryKind::Thm32), find(BoundaryKind::Trainor)) {
        (Some(t), Some(tr)) => {
            let lid = find(BoundaryKind::TopLid);
            let failing_p: Vec<f64> = p_grid
                .iter()
                .enumerate()
                .filter(|&(g, _)| {
                    let ours = lid.map_or(values[t][g], |l| values[t][g].max(values[l][g]));
                    !(ours > values[tr][g])
                })
                .map(|(_, &p)| p)
                .collect();
            let sum_alpha: f64 = alphas.iter().sum();
            Some(FigureClaim {
                sum_alpha,
                applies: sum_alpha < 1.0,
                holds: failing_p.is_empty(),
                failing_p,
            })
        }
        _ => None,
    };
    let gap = match (find(BoundaryKind::Thm32), find(BoundaryKind::LinearST)) {
        (Some(t), Some(l)) => {
            let lower = evaluate_boundary(&boundaries[t], 2.0)?;
            let upper = evaluate_boundary(&boundaries[l], 2.0)?;
            (lower < upper).then_some(Gap { p: 2.0, lower, upper })
        }
        _ => None,
    };
    Ok(RegionReport {
        p_grid: p_grid.to_vec(),
        samples,
        containment,
        figure_claim,
        gap,
    })
}

/// Columns of the shaded figure.
pub const SVG_COLUMNS: usize = 256;
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 50.0;

/// A 640×480 plot over `1/p ∈ (0, 1)`, `1/q ∈ [0, 1]`.
///
/// Trainor's necessary region is shaded light grey, the region allowed by the
/// remaining necessary conditions dark grey; sufficient boundaries are drawn
/// as lines and `1/q = 1/2` is dashed.
pub fn render_svg(boundaries: &[RegionBoundary]) -> Result<String> {
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |inv_p: f64| MARGIN + inv_p * plot_w;
    let y = |inv_q: f64| HEIGHT - MARGIN - inv_q.min(1.0) * plot_h;
    let col_w = plot_w / SVG_COLUMNS as f64;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    let necessary = |filter: &dyn Fn(&RegionBoundary) -> bool, inv_p: f64| -> Result<Option<f64>> {
        let mut q_min: Option<f64> = None;
        for b in boundaries.iter().filter(|b| b.direction() == Direction::ForbiddenBelow && filter(b)) {
            let q = evaluate_boundary(b, 1.0 / inv_p)?;
            q_min = Some(q_min.map_or(q, |m: f64| m.max(q)));
        }
        Ok(q_min)
    };
    for (fill, filter) in [
        ("#d0d0d0", &(|b: &RegionBoundary| b.kind() == BoundaryKind::Trainor) as &dyn Fn(&RegionBoundary) -> bool),
        ("#707070", &|b: &RegionBoundary| b.kind() != BoundaryKind::Trainor),
    ] {
        for c in 0..SVG_COLUMNS {
            let inv_p = (c as f64 + 0.5) / SVG_COLUMNS as f64;
            if let Some(q) = necessary(filter, inv_p)? {
                let top = inverse(q);
                if top > 0.0 {
                    writeln!(
                        svg,
                        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                        x(c as f64 / SVG_COLUMNS as f64),
                        y(top),
                        col_w + 0.05,
                        y(0.0) - y(top)
                    )
                    .unwrap();
                }
            }
        }
    }
    for (i, b) in boundaries.iter().enumerate() {
        let mut pts = String::new();
        for c in 0..SVG_COLUMNS {
            let inv_p = (c as f64 + 0.5) / SVG_COLUMNS as f64;
            let q = evaluate_boundary(b, 1.0 / inv_p)?;
            write!(pts, "{:.2},{:.2} ", x(inv_p), y(inverse(q))).unwrap();
        }
        let (stroke, dash) = match b.direction() {
            Direction::ForbiddenBelow => ("black", ""),
            Direction::AdmissibleAbove => ("#1f4e9c", r#" stroke-dasharray="2,3""#),
        };
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.2"{dash}/>"#,
            pts.trim_end()
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" font-family="sans-serif">{}</text>"#,
            WIDTH - MARGIN + 4.0 - 40.0,
            MARGIN + 14.0 * (i as f64 + 1.0),
            b.kind().as_str()
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-dasharray="6,4"/>"#,
        x(0.0),
        y(0.5),
        x(1.0),
        y(0.5)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" font-family="sans-serif">1/p</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="12" y="{:.1}" font-size="13" font-family="sans-serif">1/q</text>"#,
        HEIGHT / 2.0
    )
    .unwrap();
    for t in [0.0, 0.5, 1.0] {
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" font-family="sans-serif">{t}</text>"#,
            x(t) - 6.0,
            HEIGHT - MARGIN + 14.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" font-family="sans-serif">{t}</text>"#,
            MARGIN - 24.0,
            y(t) + 4.0
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair() -> Vec<f64> {
        vec![0.4, 0.4]
    }

    #[test]
    fn closed_forms() {
        let t32 = RegionBoundary::Thm32 { alphas: pair(), betas: pair() };
        assert!((evaluate_boundary(&t32, 2.0).unwrap() - 3.0).abs() < 1e-12);
        let tr = RegionBoundary::Trainor { d: 1.0, gammas: pair() };
        assert!((evaluate_boundary(&tr, 2.0).unwrap() - 2.5).abs() < 1e-12);
        let dim = 2f64.ln() / 3f64.ln();
        let lid = RegionBoundary::TopLid { d: 1.0, box_dims: vec![dim, dim] };
        assert!((evaluate_boundary(&lid, 3.0).unwrap() - 1.0 / dim).abs() < 1e-12);
        assert_eq!(evaluate_boundary(&lid, 3.0).unwrap(), evaluate_boundary(&lid, 1.5).unwrap());
        let lin = RegionBoundary::LinearST { d: 1.0, alphas: pair(), betas: pair() };
        assert!((evaluate_boundary(&lin, 2.0).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(evaluate_boundary(&lin, 1.5).unwrap(), f64::INFINITY);
        assert_eq!(evaluate_boundary(&t32, 1.0).unwrap(), f64::INFINITY);
        let t34 = RegionBoundary::Thm34 { alphas: pair() };
        assert!((evaluate_boundary(&t34, 2.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        let t32 = RegionBoundary::Thm32 { alphas: pair(), betas: vec![0.0, 0.0] };
        assert!(evaluate_boundary(&t32, 2.0).is_err());
        let tr = RegionBoundary::Trainor { d: 1.0, gammas: pair() };
        assert!(evaluate_boundary(&tr, 0.5).is_err());
        assert!(evaluate_boundary(&RegionBoundary::Suff31 { p0: 0.5 }, 2.0).is_err());
    }

    #[test]
    fn sufficient_boundary() {
        assert_eq!(evaluate_boundary(&RegionBoundary::Suff31 { p0: 2.0 }, 2.0).unwrap(), 4.0);
        assert_eq!(evaluate_boundary(&RegionBoundary::Suff31 { p0: 1.0 }, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(evaluate_boundary(&RegionBoundary::Suff31 { p0: f64::INFINITY }, 4.0).unwrap(), 2.0);
        assert_eq!(evaluate_boundary(&RegionBoundary::Suff31 { p0: 3.0 }, 10.0).unwrap(), 2.0);
    }

    #[test]
    fn report_and_svg() {
        let bs = vec![
            RegionBoundary::Thm32 { alphas: pair(), betas: pair() },
            RegionBoundary::Trainor { d: 1.0, gammas: pair() },
            RegionBoundary::TopLid { d: 1.0, box_dims: pair() },
            RegionBoundary::LinearST { d: 1.0, alphas: pair(), betas: pair() },
        ];
        let grid = [1.25, 1.5, 2.0, 4.0, 16.0];
        let rep = region_report(&bs, &grid, &pair(), &pair()).unwrap();
        assert_eq!(rep.samples.len(), 20);
        let claim = rep.figure_claim.unwrap();
        assert!(claim.applies && claim.holds);
        let gap = rep.gap.unwrap();
        assert!((gap.lower - 3.0).abs() < 1e-12 && (gap.upper - 4.0).abs() < 1e-12);
        let thm_over_trainor = rep.containment.iter().find(|c| c.outer == 0 && c.inner == 1).unwrap();
        assert!(thm_over_trainor.holds && thm_over_trainor.strict);
        let svg = render_svg(&bs).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains(r#"width="640""#) && svg.contains("#707070"));
        assert!(region_report(
            &[bs[0].clone(), RegionBoundary::Trainor { d: 2.0, gammas: pair() }],
            &grid,
            &pair(),
            &pair()
        )
        .is_err());
    }

    #[test]
    fn claim_fails_above_one() {
        let big = vec![0.8, 0.8];
        let bs = vec![
            RegionBoundary::Thm32 { alphas: big.clone(), betas: pair() },
            RegionBoundary::Trainor { d: 1.0, gammas: big.clone() },
            RegionBoundary::TopLid { d: 1.0, box_dims: big.clone() },
        ];
        let rep = region_report(&bs, &[1.25, 1.5, 2.0, 4.0, 16.0], &big, &pair()).unwrap();
        let claim = rep.figure_claim.unwrap();
        assert!(!claim.applies && !claim.holds);
        assert!(claim.failing_p.contains(&1.25));
    }

    proptest! {
        #[test]
        fn doubled_betas_match_trainor(a1 in 0.01f64..0.5, a2 in 0.01f64..0.5, p in 1.01f64..50.0) {
            let t32 = RegionBoundary::Thm32 { alphas: vec![a1, a2], betas: vec![2.0 * a1, 2.0 * a2] };
            let tr = RegionBoundary::Trainor { d: 1.0, gammas: vec![a1, a2] };
            let (x, y) = (evaluate_boundary(&t32, p).unwrap(), evaluate_boundary(&tr, p).unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * y.max(1.0));
        }

        #[test]
        fn monotone_in_p(a in 0.05f64..0.45, b in 0.05f64..0.9, p in 1.01f64..20.0, dp in 0.01f64..5.0) {
            for bnd in [
                RegionBoundary::Thm32 { alphas: vec![a, a], betas: vec![b, b] },
                RegionBoundary::Thm34 { alphas: vec![a, a] },
                RegionBoundary::Trainor { d: 1.0, gammas: vec![a, a] },
                RegionBoundary::Suff31 { p0: 1.0 + b },
            ] {
                prop_assert!(evaluate_boundary(&bnd, p + dp).unwrap() <= evaluate_boundary(&bnd, p).unwrap());
            }
        }
    }
}
