//! TOML scenario configuration. Every field has a default, so an empty file
//! (or no file) reproduces the reference runs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polya::Harmonic;
use crate::rmf::{RmfKind, TupleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    PolyaCheck,
    RmfOracle,
    BiasSearch,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Theorem1,
        Scenario::Theorem2,
        Scenario::Theorem3,
        Scenario::Theorem4,
        Scenario::PolyaCheck,
        Scenario::RmfOracle,
        Scenario::BiasSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Theorem1 => "theorem1",
            Scenario::Theorem2 => "theorem2",
            Scenario::Theorem3 => "theorem3",
            Scenario::Theorem4 => "theorem4",
            Scenario::PolyaCheck => "polya_check",
            Scenario::RmfOracle => "rmf_oracle",
            Scenario::BiasSearch => "bias_search",
        }
    }
}

/// How the window length H is derived from q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum HRule {
    /// H = value
    Absolute { value: u64 },
    /// H = round(q / value)
    Ratio { value: f64 },
    /// H = round(q / ln(q)^a)
    LogPower { a: f64 },
}

impl HRule {
    pub fn resolve(&self, q: u64) -> Result<u64> {
        let h = match *self {
            HRule::Absolute { value } => value,
            HRule::Ratio { value } => {
                if !(value >= 1.0) {
                    return Err(Error::Config(format!("ratio rule needs q/H >= 1, got {value}")));
                }
                (q as f64 / value).round() as u64
            }
            HRule::LogPower { a } => {
                if !(a >= 0.0) {
                    return Err(Error::Config(format!("log-power rule needs A >= 0, got {a}")));
                }
                (q as f64 / (q as f64).ln().powf(a)).round() as u64
            }
        };
        if h == 0 || h > q {
            return Err(Error::Config(format!("H rule {self:?} gives H = {h} outside 1..={q}")));
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub format: OutputFormat,
    pub histogram_bins: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: "out".into(),
            format: OutputFormat::Csv,
            histogram_bins: 40,
        }
    }
}

/// Calibrated constants for the desk-scale stand-ins of asymptotic bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calibration {
    pub version: u32,
    /// max window error ≤ C·ln q
    pub polya_window: f64,
    /// prime average ≤ C·(second moment + N(Σ|α|)²/Q^0.99)
    pub prime_average: f64,
    /// |series moment − Gaussian moment| tolerance for even orders up to 4
    pub moment_even: f64,
    /// tolerance for odd orders
    pub moment_odd: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            version: 1,
            polya_window: 20.0,
            prime_average: 3.0,
            moment_even: 0.15,
            moment_odd: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Config {
    pub qlo: u64,
    pub qhi: u64,
    /// Kernel length δq/H, also the bias-search cutoff.
    pub x: u64,
    pub deltas: Vec<f64>,
    pub tau: f64,
    pub min_alpha: f64,
    pub max_primes: usize,
    pub deficit_target: f64,
    pub gmean_target: f64,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Theorem1Config {
            qlo: 10_000,
            qhi: 1_000_000,
            x: 10,
            deltas: vec![0.01, 0.05, 0.1, 0.5, 1.0],
            tau: 0.95,
            min_alpha: 0.6,
            max_primes: 3,
            deficit_target: 0.95,
            gmean_target: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem2Config {
    pub q: u64,
    /// Bias-search cutoff; the kernel length δq/H is set to the same value.
    pub x: u64,
    pub thresh: f64,
    pub deltas: Vec<f64>,
    pub tau: f64,
    pub max_characters: usize,
    pub deficit_target: f64,
    pub gmean_target: f64,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Theorem2Config {
            q: 10_007,
            x: 10,
            thresh: 0.6,
            deltas: vec![0.01, 0.05, 0.1, 0.5, 1.0],
            tau: 0.95,
            max_characters: 3,
            deficit_target: 0.95,
            gmean_target: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem3Config {
    pub q: u64,
    pub h: HRule,
    pub max_order: u32,
    pub tau: f64,
    /// Primes from the first prime ≥ sweep_qlo (0 disables the sweep).
    pub sweep_qlo: u64,
    pub sweep_count: usize,
    pub sweep_max_order: u32,
}

impl Default for Theorem3Config {
    fn default() -> Self {
        Theorem3Config {
            q: 100_003,
            h: HRule::Ratio { value: 20.0 },
            max_order: 8,
            tau: 0.95,
            sweep_qlo: 10_000,
            sweep_count: 20,
            sweep_max_order: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem4Config {
    pub q: u64,
    pub h: HRule,
    pub pairs: Vec<(u32, u32)>,
}

impl Default for Theorem4Config {
    fn default() -> Self {
        Theorem4Config {
            q: 1009,
            h: HRule::Ratio { value: 5.0 },
            pairs: vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolyaConfig {
    pub q: u64,
    pub h: u64,
    /// Character indices; empty means the Legendre character only.
    pub characters: Vec<u64>,
    pub cutoffs: Vec<u64>,
}

impl Default for PolyaConfig {
    fn default() -> Self {
        PolyaConfig {
            q: 1009,
            h: 100,
            characters: Vec::new(),
            cutoffs: vec![10, 100, 1009],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientChoice {
    Ones,
    /// i.i.d. uniform on [−1, 1], drawn from the scenario seed
    RandomReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSpec {
    pub set: TupleSet,
    pub n: u64,
    pub j: usize,
    #[serde(rename = "J")]
    pub cap_j: usize,
    pub k: usize,
    #[serde(rename = "K")]
    pub cap_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RmfOracleConfig {
    pub kind: RmfKind,
    pub harmonic: Harmonic,
    pub n: usize,
    pub coefficients: CoefficientChoice,
    pub pairs: Vec<(u32, u32)>,
    pub samples: usize,
    pub counts: Vec<CountSpec>,
    /// Prime-average trials: N, Q and the number of random real vectors.
    pub prime_average_n: usize,
    pub prime_average_q: u64,
    pub prime_average_trials: usize,
}

impl Default for RmfOracleConfig {
    fn default() -> Self {
        RmfOracleConfig {
            kind: RmfKind::ExtendedRademacher,
            harmonic: Harmonic::Cosine,
            n: 8,
            coefficients: CoefficientChoice::Ones,
            pairs: vec![(0, 2), (2, 2)],
            samples: 100_000,
            counts: vec![
                CountSpec { set: TupleSet::A, n: 20, j: 2, cap_j: 2, k: 2, cap_k: 2 },
                CountSpec { set: TupleSet::B, n: 20, j: 2, cap_j: 2, k: 2, cap_k: 2 },
            ],
            prime_average_n: 30,
            prime_average_q: 10_000,
            prime_average_trials: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiasSearchConfig {
    pub qlo: u64,
    pub qhi: u64,
    pub x: u64,
    pub top: usize,
    /// Complex search modulus (0 disables it).
    pub complex_q: u64,
    pub complex_x: u64,
    pub complex_thresh: f64,
}

impl Default for BiasSearchConfig {
    fn default() -> Self {
        BiasSearchConfig {
            qlo: 10_000,
            qhi: 100_000,
            x: 10,
            top: 20,
            complex_q: 1009,
            complex_x: 10,
            complex_thresh: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub output: OutputConfig,
    pub calibration: Calibration,
    pub theorem1: Theorem1Config,
    pub theorem2: Theorem2Config,
    pub theorem3: Theorem3Config,
    pub theorem4: Theorem4Config,
    pub polya_check: PolyaConfig,
    pub rmf_oracle: RmfOracleConfig,
    pub bias_search: BiasSearchConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 1,
            output: OutputConfig::default(),
            calibration: Calibration::default(),
            theorem1: Theorem1Config::default(),
            theorem2: Theorem2Config::default(),
            theorem3: Theorem3Config::default(),
            theorem4: Theorem4Config::default(),
            polya_check: PolyaConfig::default(),
            rmf_oracle: RmfOracleConfig::default(),
            bias_search: BiasSearchConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}
