//! Output records. Every document is an [`Envelope`] around one of the
//! command bodies below; exact integers and rationals are decimal strings.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub command: String,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointOut {
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalOut {
    pub prime: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightOut {
    pub curve: Vec<String>,
    pub point: PointOut,
    pub finite: Vec<LocalOut>,
    pub archimedean: f64,
    pub global: f64,
    /// Absolute error bound on `archimedean` and `global`.
    pub error_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyOut {
    pub curve: Vec<String>,
    pub point: PointOut,
    pub q: String,
    pub finite: Vec<LocalOut>,
    pub finite_sum: f64,
    pub log_denominator: f64,
    pub finite_product_is_denominator: bool,
    pub archimedean: f64,
    pub total: f64,
    pub twice_height: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PadicPointOut {
    /// Residue modulo `p^precision`.
    pub residue: String,
    /// Base-p digits, least significant first.
    pub digits: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PadicOut {
    pub prime: u64,
    pub q: String,
    pub k: u32,
    pub entropy: f64,
    pub n: u32,
    pub precision: u32,
    pub count: String,
    pub enumerated: String,
    pub all_fixed: bool,
    pub pairwise_distinct: bool,
    pub verified_digits: u32,
    /// Present when the count is small enough to list.
    pub points: Option<Vec<PadicPointOut>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub n: u32,
    pub min: String,
    pub max: String,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaOut {
    pub beta: String,
    pub exact_beta: bool,
    pub entropy: f64,
    pub rows: Vec<BetaRow>,
    /// First `n` not computed because of the enumeration budget.
    pub truncated_at: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MahlerOut {
    /// Coefficients, highest degree first.
    pub poly: Vec<String>,
    pub root_path: f64,
    pub integral_path: f64,
    pub samples: usize,
    pub integral_converged: bool,
    /// `|root_path − integral_path|`.
    pub error_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub n: u32,
    pub count: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolenoidOut {
    pub a: String,
    pub b: String,
    pub entropy: f64,
    pub rows: Vec<CountRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdsRow {
    pub n: u32,
    pub term: String,
    /// `O_n`, the Möbius orbit count, as a reduced fraction.
    pub orbit_count: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdsOut {
    pub curve: Vec<String>,
    pub point: PointOut,
    pub rows: Vec<EdsRow>,
    pub zero_terms: Vec<u32>,
    pub divisibility_pairs_checked: usize,
    pub divisibility_violations: Vec<[u32; 2]>,
    pub realizable: bool,
    pub realizability_first_failure: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRowOut {
    pub n: u32,
    pub per_finite: String,
    pub log_per_finite: f64,
    pub per_beta_min: String,
    pub per_beta_max: String,
    pub log_per_beta: f64,
    pub log_per_total: f64,
    pub log_nu: f64,
    pub log_bn_nu: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOut {
    pub curve: Vec<String>,
    pub point: PointOut,
    pub q: String,
    pub support: Vec<String>,
    pub log_beta: f64,
    pub rows: Vec<GrowthRowOut>,
    pub truncated_at: Option<u32>,
    /// Cap on the gap at the last computed `n`.
    pub tolerance: f64,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeConditionOut {
    pub prime: String,
    pub valuation: i64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleOut {
    pub multiple: u32,
    pub point: PointOut,
    pub archimedean_height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckPointOut {
    pub curve: Vec<String>,
    pub point: PointOut,
    pub passes: bool,
    pub bad_primes: Vec<PrimeConditionOut>,
    pub archimedean_height: f64,
    pub archimedean_passes: bool,
    pub failures: Vec<String>,
    pub search_bound: u32,
    pub admissible: Option<AdmissibleOut>,
    pub admissible_error: Option<String>,
}
