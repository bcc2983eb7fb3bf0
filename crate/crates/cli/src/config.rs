//! JSON run configurations, one per subcommand. Every struct rejects unknown
//! fields so a typo surfaces as a schema error with its path.

use fracext::combinatorics::Progression;
use fracext::convolution::CorollaryParams;
use fracext::knapp::{KnappParams, PhiSpec};
use fracext::measure::{rational_str, PowerDensity};
use fracext::region::RegionBoundary;
use fracext::{DiscreteMeasure, FrequencyGrid, Rational, SimilarityIfs};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    #[serde(with = "rational_str")]
    pub position: Rational,
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureSpec {
    SelfSimilar {
        ifs: SimilarityIfs,
        depth: usize,
    },
    PowerDensity {
        exponent: f64,
        cells: usize,
    },
    Uniform {
        cells: usize,
    },
    Dirac {
        #[serde(with = "rational_str")]
        position: Rational,
    },
    Atomic {
        atoms: Vec<AtomSpec>,
    },
    Blocks {
        #[serde(with = "rational_str")]
        width: Rational,
        atoms: Vec<AtomSpec>,
    },
}

impl MeasureSpec {
    pub fn build(&self, cap: usize) -> fracext::Result<DiscreteMeasure> {
        let pairs = |atoms: &[AtomSpec]| atoms.iter().map(|a| (a.position.clone(), a.weight)).collect();
        match self {
            MeasureSpec::SelfSimilar { ifs, depth } => fracext::measure::build_self_similar(ifs, *depth, cap),
            MeasureSpec::PowerDensity { exponent, cells } => {
                check_cells(*cells, cap)?;
                fracext::measure::discretize_power_density(&PowerDensity::new(*exponent)?, *cells)
            }
            MeasureSpec::Uniform { cells } => {
                check_cells(*cells, cap)?;
                DiscreteMeasure::uniform(*cells)
            }
            MeasureSpec::Dirac { position } => Ok(DiscreteMeasure::dirac(position.clone())),
            MeasureSpec::Atomic { atoms } => DiscreteMeasure::atomic(pairs(atoms)),
            MeasureSpec::Blocks { width, atoms } => DiscreteMeasure::blocks(width.clone(), pairs(atoms)),
        }
    }

    pub fn ifs(&self) -> Option<&SimilarityIfs> {
        match self {
            MeasureSpec::SelfSimilar { ifs, .. } => Some(ifs),
            _ => None,
        }
    }

    fn cantor(depth: usize) -> Self {
        MeasureSpec::SelfSimilar {
            ifs: SimilarityIfs::middle_third(),
            depth,
        }
    }
}

fn check_cells(cells: usize, cap: usize) -> fracext::Result<()> {
    if cells > cap {
        return Err(fracext::Error::ResourceLimit {
            what: "atoms",
            requested: cells as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub radius: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn grid(&self) -> fracext::Result<FrequencyGrid> {
        FrequencyGrid::new(self.radius, self.step)
    }
}

/// Per-atom values of the functions fed to the extension operator.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionSpec {
    #[default]
    Ones,
    /// I.i.d. uniform on `[0, 1]` from the run seed.
    Random,
    Values(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureBuildConfig {
    pub measure: MeasureSpec,
}

impl Default for MeasureBuildConfig {
    fn default() -> Self {
        MeasureBuildConfig {
            measure: MeasureSpec::cantor(8),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDimsConfig {
    pub measure: MeasureSpec,
    #[serde(default)]
    pub q_values: Vec<f64>,
    #[serde(default)]
    pub energy_s: Vec<f64>,
    #[serde(default)]
    pub frostman_scales: Vec<f64>,
    #[serde(default, with = "fracext::measure::rational_vec_str")]
    pub box_deltas: Vec<Rational>,
}

impl Default for MeasureDimsConfig {
    fn default() -> Self {
        let third = |n: u32| Rational::new(1.into(), 3.into()).pow(n as i32);
        MeasureDimsConfig {
            measure: MeasureSpec::cantor(8),
            q_values: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            energy_s: vec![0.5, 0.7],
            frostman_scales: (2..=6).map(|n| 3f64.powi(-n)).collect(),
            box_deltas: (1..=6).map(third).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDecayConfig {
    pub measure: MeasureSpec,
    pub xi_min: f64,
    pub xi_max: f64,
    pub samples: usize,
}

impl Default for MeasureDecayConfig {
    fn default() -> Self {
        MeasureDecayConfig {
            measure: MeasureSpec::Uniform { cells: 1024 },
            xi_min: 1.0,
            xi_max: 1e3,
            samples: 400,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendNormConfig {
    pub measure: MeasureSpec,
    #[serde(default)]
    pub function: FunctionSpec,
    pub grid: GridSpec,
    pub q: f64,
}

impl Default for ExtendNormConfig {
    fn default() -> Self {
        ExtendNormConfig {
            measure: MeasureSpec::cantor(6),
            function: FunctionSpec::Ones,
            grid: GridSpec { radius: 100.0, step: 0.125 },
            q: 4.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendRatioConfig {
    pub measures: Vec<MeasureSpec>,
    #[serde(default)]
    pub function: FunctionSpec,
    pub p: f64,
    pub q: f64,
    pub grid: GridSpec,
}

impl Default for ExtendRatioConfig {
    fn default() -> Self {
        ExtendRatioConfig {
            measures: vec![MeasureSpec::cantor(6), MeasureSpec::cantor(6)],
            function: FunctionSpec::Random,
            p: 2.0,
            q: 4.0,
            grid: GridSpec { radius: 100.0, step: 0.0625 },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolveRunConfig {
    pub measures: Vec<MeasureSpec>,
    pub cells: usize,
    #[serde(default)]
    pub p_norms: Vec<f64>,
}

impl Default for ConvolveRunConfig {
    fn default() -> Self {
        let pd = MeasureSpec::PowerDensity { exponent: 0.6, cells: 1 << 14 };
        ConvolveRunConfig {
            measures: vec![pd.clone(), pd],
            cells: 1 << 14,
            p_norms: vec![1.0, 2.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    pub measures: Vec<MeasureSpec>,
    pub cells: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub levels: Vec<LevelSpec>,
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    pub grid: GridSpec,
    #[serde(default)]
    pub corollary: Option<CorollaryParams>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let level = |cells: usize| {
            let pd = MeasureSpec::PowerDensity { exponent: 0.6, cells };
            LevelSpec {
                measures: vec![pd.clone(), pd],
                cells,
            }
        };
        VerifyConfig {
            levels: vec![level(1 << 10), level(1 << 11)],
            p: 2.0,
            q: 4.0,
            trials: 64,
            grid: GridSpec { radius: 50.0, step: 0.0625 },
            corollary: None,
        }
    }
}

fn default_pair() -> KnappParams {
    KnappParams {
        k: 2,
        alphas: vec![0.4, 0.4],
        betas: vec![0.4, 0.4],
        phi: PhiSpec { epsilon: 1.0 },
        n_max: 4,
        seed: 0,
    }
}

/// Which Knapp family to build.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum FamilySpec {
    Progressive(KnappParams),
    SingleScale {
        base: u64,
        t0: Vec<u64>,
        n0: u32,
        levels: usize,
        #[serde(default)]
        seed: u64,
    },
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Progressive(default_pair())
    }
}

impl FamilySpec {
    pub fn set_seed(&mut self, new: u64) {
        match self {
            FamilySpec::Progressive(p) => p.seed = new,
            FamilySpec::SingleScale { seed, .. } => *seed = new,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnappBuildConfig {
    pub family: FamilySpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnappValidateConfig {
    pub family: FamilySpec,
    /// Defaults to the deepest level.
    #[serde(default)]
    pub level: Option<usize>,
    pub freq: (f64, f64),
}

impl Default for KnappValidateConfig {
    fn default() -> Self {
        KnappValidateConfig {
            family: FamilySpec::default(),
            level: None,
            freq: (1.0, 1e3),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioTrendConfig {
    pub params: KnappParams,
    pub p: f64,
    pub q_values: Vec<f64>,
}

impl Default for RatioTrendConfig {
    fn default() -> Self {
        RatioTrendConfig {
            params: KnappParams { n_max: 6, ..default_pair() },
            p: 2.0,
            q_values: vec![2.0, 3.0, 4.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCountConfig {
    pub sets: Vec<Vec<i64>>,
    pub r: u32,
    /// Progressions whose sumset size is reported alongside.
    #[serde(default)]
    pub progressions: Vec<Progression>,
}

impl Default for OracleCountConfig {
    fn default() -> Self {
        OracleCountConfig {
            sets: vec![vec![0, 1, 5], vec![0, 2, 7]],
            r: 2,
            progressions: vec![
                Progression { start: 1, step: 2, len: 3 },
                Progression { start: 1, step: 7, len: 3 },
            ],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum IdentitySource {
    /// The level-`level` Knapp functions of a built family.
    Family {
        params: KnappParams,
        level: usize,
    },
    /// Blocks `[a/scale, (a+1)/scale)` of mass `masses[m]` for `a` in `sets[m]`.
    Sets {
        sets: Vec<Vec<i64>>,
        scale: u64,
        masses: Vec<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleIdentityConfig {
    pub input: IdentitySource,
    pub r: u32,
    pub grid: GridSpec,
}

impl Default for OracleIdentityConfig {
    fn default() -> Self {
        OracleIdentityConfig {
            input: IdentitySource::Family {
                params: default_pair(),
                level: 1,
            },
            r: 1,
            grid: GridSpec { radius: 1536.0, step: 1.0 / 32.0 },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsConfig {
    pub boundaries: Vec<RegionBoundary>,
    pub p_grid: Vec<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl Default for RegionsConfig {
    fn default() -> Self {
        let pair = vec![0.4, 0.4];
        RegionsConfig {
            boundaries: vec![
                RegionBoundary::Thm32 { alphas: pair.clone(), betas: pair.clone() },
                RegionBoundary::Trainor { d: 1.0, gammas: pair.clone() },
                RegionBoundary::TopLid { d: 1.0, box_dims: pair.clone() },
                RegionBoundary::LinearST { d: 1.0, alphas: pair.clone(), betas: pair.clone() },
            ],
            p_grid: vec![1.25, 1.5, 2.0, 4.0, 16.0],
            alphas: pair.clone(),
            betas: pair,
        }
    }
}
