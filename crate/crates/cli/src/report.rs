//! JSON report shapes. Keep in sync with docs/report.schema.json.

use mdl_core::error::MdlError;
use mdl_core::integrator::{EvaluationResult, Plan};
use num_complex::Complex64;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct Job {
    pub r: usize,
    pub s: Vec<Cplx>,
    pub n0: u64,
    pub sequences: Vec<String>,
    pub tol: f64,
}

#[derive(Debug, Serialize)]
pub struct MethodReport {
    pub method: &'static str,
    pub value: Cplx,
    pub error_estimate: f64,
    #[serde(rename = "in_D")]
    pub in_d: bool,
    #[serde(rename = "in_D0")]
    pub in_d0: bool,
    pub plan: Plan,
    pub wall_time_s: Option<f64>,
}

impl MethodReport {
    pub fn new(res: &EvaluationResult, timing: bool) -> Self {
        Self {
            method: res.method.as_str(),
            value: res.value.into(),
            error_estimate: res.error_estimate,
            in_d: res.in_d,
            in_d0: res.in_d0,
            plan: res.plan.clone(),
            wall_time_s: timing.then_some(res.wall_time.as_secs_f64()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub job: Job,
    #[serde(flatten)]
    pub result: MethodReport,
}

#[derive(Debug, Serialize)]
pub struct Skipped {
    pub method: &'static str,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Delta {
    pub a: &'static str,
    pub b: &'static str,
    pub delta: f64,
    pub combined_error: f64,
    pub within: bool,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub job: Job,
    #[serde(rename = "in_D")]
    pub in_d: bool,
    #[serde(rename = "in_D0")]
    pub in_d0: bool,
    pub results: Vec<MethodReport>,
    pub skipped: Vec<Skipped>,
    pub deltas: Vec<Delta>,
}

#[derive(Debug, Serialize)]
pub struct RegionReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub r: usize,
    pub s: Vec<Cplx>,
    #[serde(rename = "in_D")]
    pub in_d: bool,
    #[serde(rename = "in_D0")]
    pub in_d0: bool,
    pub classification: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CharacterEntry {
    pub label: String,
    pub exponents: Vec<u64>,
    pub principal: bool,
    /// chi(n) for n = 1..=q as [numerator, denominator] of the turn, or null off units.
    pub values: Vec<Option<[u64; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct CharactersReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub modulus: u64,
    pub convention: String,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    pub characters: Vec<CharacterEntry>,
}

#[derive(Debug, Serialize)]
pub struct LemmaReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_relative_gap: f64,
    pub max_finite_difference_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct KernelReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub r: usize,
    pub s: Vec<Cplx>,
    pub t: Vec<f64>,
    pub n0: u64,
    pub value: Cplx,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<mdl_core::kernel::KernelTerm>>,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_value: Option<Cplx>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_error_estimate: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub command: String,
    pub error: ErrorBody,
}

pub fn error_kind(e: &MdlError) -> &'static str {
    match e {
        MdlError::Region(_) => "region",
        MdlError::Budget { .. } => "budget",
        MdlError::UnsupportedRank(..) => "unsupported-rank",
        MdlError::Argument(_) | MdlError::Format(_) | MdlError::Io(_) => "usage",
    }
}

pub fn error_body(e: &MdlError) -> ErrorBody {
    let (best_value, best_error_estimate) = match e {
        MdlError::Budget { best: Some(b), .. } => (Some(b.value.into()), Some(b.error_estimate)),
        _ => (None, None),
    };
    ErrorBody {
        kind: error_kind(e),
        message: e.to_string(),
        best_value,
        best_error_estimate,
    }
}
