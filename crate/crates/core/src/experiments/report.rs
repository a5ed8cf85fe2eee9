//! Report rows. Each row type knows its CSV header and record so empty
//! tables still produce a header line.

use serde::{Deserialize, Serialize};

use crate::experiments::config::Scenario;
use crate::rmf::TupleCountReport;
use crate::short_sums::GateVerdict;

pub trait Tabular {
    const HEADER: &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

fn s(x: impl ToString) -> String {
    x.to_string()
}

fn verdict(v: GateVerdict) -> String {
    match v {
        GateVerdict::Blocked => "blocked".into(),
        GateVerdict::Inconclusive => "inconclusive".into(),
    }
}

/// One (j, k) moment against its Gaussian target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub q: u64,
    pub h: u64,
    pub character: u64,
    /// "sliding", "cosine", "sine" or "residual"
    pub source: String,
    pub j: u32,
    pub k: u32,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub target: f64,
    pub discrepancy: f64,
    /// Quadrature size, 0 for exact enumeration over start points.
    pub nodes: usize,
}

impl Tabular for MomentRow {
    const HEADER: &'static [&'static str] = &[
        "q", "h", "character", "source", "j", "k", "empirical_re", "empirical_im", "target", "discrepancy", "nodes",
    ];
    fn record(&self) -> Vec<String> {
        vec![
            s(self.q),
            s(self.h),
            s(self.character),
            s(&self.source),
            s(self.j),
            s(self.k),
            s(self.empirical_re),
            s(self.empirical_im),
            s(self.target),
            s(self.discrepancy),
            s(self.nodes),
        ]
    }
}

/// KS distance, second moment and gate verdict of one sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub q: u64,
    pub h: u64,
    pub source: String,
    pub samples: usize,
    /// Absent for complex-valued samples.
    pub ks: Option<f64>,
    pub second_moment: f64,
    pub tau: f64,
    pub gate: GateVerdict,
}

impl Tabular for DistributionRow {
    const HEADER: &'static [&'static str] = &["q", "h", "source", "samples", "ks", "second_moment", "tau", "gate"];
    fn record(&self) -> Vec<String> {
        vec![
            s(self.q),
            s(self.h),
            s(&self.source),
            s(self.samples),
            self.ks.map(s).unwrap_or_default(),
            s(self.second_moment),
            s(self.tau),
            verdict(self.gate),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub q: u64,
    pub character: u64,
    pub h: u64,
    pub delta: f64,
    pub kernel_length: u64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub deficit: f64,
    pub gmean: f64,
    pub tau: f64,
    pub gate: GateVerdict,
    /// α forced to 0 as a control row
    pub synthetic: bool,
}

impl Tabular for KernelRow {
    const HEADER: &'static [&'static str] = &[
        "q", "character", "h", "delta", "kernel_length", "alpha_re", "alpha_im", "deficit", "gmean", "tau", "gate", "synthetic",
    ];
    fn record(&self) -> Vec<String> {
        vec![
            s(self.q),
            s(self.character),
            s(self.h),
            s(self.delta),
            s(self.kernel_length),
            s(self.alpha_re),
            s(self.alpha_im),
            s(self.deficit),
            s(self.gmean),
            s(self.tau),
            verdict(self.gate),
            s(self.synthetic),
        ]
    }
}

/// Character average against the Steinhaus oracle for one (j, k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeRow {
    pub q: u64,
    pub h: u64,
    pub kmax: usize,
    pub harmonic: String,
    pub j: u32,
    pub k: u32,
    pub character_average: f64,
    pub rmf_exact: f64,
    pub difference: f64,
    /// (kmax − 1)^(j+k) < q: every product in the expansion is a unit below q.
    pub orthogonality_exact: bool,
}

impl Tabular for BridgeRow {
    const HEADER: &'static [&'static str] = &[
        "q", "h", "kmax", "harmonic", "j", "k", "character_average", "rmf_exact", "difference", "orthogonality_exact",
    ];
    fn record(&self) -> Vec<String> {
        vec![
            s(self.q),
            s(self.h),
            s(self.kmax),
            s(&self.harmonic),
            s(self.j),
            s(self.k),
            s(self.character_average),
            s(self.rmf_exact),
            s(self.difference),
            s(self.orthogonality_exact),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaRow {
    pub q: u64,
    pub character: u64,
    /// "window", "partial", "tail", "half_sum_sq", "replacement_gap"
    pub check: String,
    pub parameter: u64,
    pub max_error: f64,
    pub mean_error: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Tabular for PolyaRow {
    const HEADER: &'static [&'static str] =
        &["q", "character", "check", "parameter", "max_error", "mean_error", "bound", "pass"];
    fn record(&self) -> Vec<String> {
        vec![
            s(self.q),
            s(self.character),
            s(&self.check),
            s(self.parameter),
            s(self.max_error),
            s(self.mean_error),
            s(self.bound),
            s(self.pass),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub kind: String,
    pub harmonic: String,
    pub n: usize,
    pub j: u32,
    pub k: u32,
    pub exact: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub samples: usize,
    /// |estimate − exact| / stderr (0 when both vanish)
    pub z: f64,
}

impl Tabular for OracleRow {
    const HEADER: &'static [&'static str] =
        &["kind", "harmonic", "n", "j", "k", "exact", "mc_estimate", "mc_stderr", "samples", "z"];
    fn record(&self) -> Vec<String> {
        vec![
            s(&self.kind),
            s(&self.harmonic),
            s(self.n),
            s(self.j),
            s(self.k),
            s(self.exact),
            s(self.mc_estimate),
            s(self.mc_stderr),
            s(self.samples),
            s(self.z),
        ]
    }
}

impl Tabular for TupleCountReport {
    const HEADER: &'static [&'static str] = &["set", "order", "n", "j", "J", "k", "K", "total", "non_permutation"];
    fn record(&self) -> Vec<String> {
        vec![
            format!("{:?}", self.set),
            match self.order {
                crate::rmf::EnumerationOrder::Lexicographic => "lexicographic".into(),
                crate::rmf::EnumerationOrder::Bucketed => "bucketed".into(),
            },
            s(self.n),
            s(self.j),
            s(self.cap_j),
            s(self.k),
            s(self.cap_k),
            s(self.total),
            s(self.non_permutation),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeAverageRow {
    pub trial: usize,
    pub n: usize,
    pub big_q: u64,
    pub prime_average: f64,
    pub rmf_second_moment: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl Tabular for PrimeAverageRow {
    const HEADER: &'static [&'static str] =
        &["trial", "n", "Q", "prime_average", "rmf_second_moment", "bound", "ratio", "pass"];
    fn record(&self) -> Vec<String> {
        vec![
            s(self.trial),
            s(self.n),
            s(self.big_q),
            s(self.prime_average),
            s(self.rmf_second_moment),
            s(self.bound),
            s(self.ratio),
            s(self.pass),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRow {
    /// "real" or "complex"
    pub kind: String,
    pub q: u64,
    pub character: u64,
    pub x: u64,
    pub bias: f64,
}

impl Tabular for BiasRow {
    const HEADER: &'static [&'static str] = &["kind", "q", "character", "x", "bias"];
    fn record(&self) -> Vec<String> {
        vec![s(&self.kind), s(self.q), s(self.character), s(self.x), s(self.bias)]
    }
}

/// Per-prime moment-closeness outcome in the prime sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: u64,
    pub h: u64,
    pub source: String,
    pub max_discrepancy: f64,
    pub pass: bool,
}

impl Tabular for SweepRow {
    const HEADER: &'static [&'static str] = &["q", "h", "source", "max_discrepancy", "pass"];
    fn record(&self) -> Vec<String> {
        vec![s(self.q), s(self.h), s(&self.source), s(self.max_discrepancy), s(self.pass)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub name: String,
    /// (bin_left, bin_right, count)
    pub bins: Vec<(f64, f64, u64)>,
}

impl Tabular for (f64, f64, u64) {
    const HEADER: &'static [&'static str] = &["bin_left", "bin_right", "count"];
    fn record(&self) -> Vec<String> {
        vec![s(self.0), s(self.1), s(self.2)]
    }
}

/// Everything a scenario produces. Tables a scenario does not produce stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub seed: u64,
    /// For scenarios that demonstrate a mechanism: whether it was exhibited.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demonstrated: Option<bool>,
    pub notices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<MomentRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distributions: Option<Vec<DistributionRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<KernelRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridge: Option<Vec<BridgeRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polya: Option<Vec<PolyaRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<TupleCountReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_average: Option<Vec<PrimeAverageRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<Vec<BiasRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
    pub histograms: Vec<Histogram>,
}

impl Report {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Report {
            scenario,
            seed,
            demonstrated: None,
            notices: Vec::new(),
            moments: None,
            distributions: None,
            kernel: None,
            bridge: None,
            polya: None,
            oracle: None,
            counts: None,
            prime_average: None,
            bias: None,
            sweep: None,
            histograms: Vec::new(),
        }
    }
}
