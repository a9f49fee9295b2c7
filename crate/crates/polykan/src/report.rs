//! Compression report: per-spline certificates, budgets, and totals.
//!
//! Reports serialize to the `polykan-report/1` JSON schema. Wall-clock
//! timings are collected in memory but excluded from serialization by
//! default so that repeated runs of the same compression produce
//! byte-identical report files; `with_timings` opts them in.

use serde::{Deserialize, Serialize};

/// One compressed spline: where it lives in the network, how many knots it
/// had and kept, the certified sup-norm error of the replacement, and the
/// budget it had to fit in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplineRecord {
    pub layer: usize,
    pub out_index: usize,
    pub in_index: usize,
    pub knots_before: usize,
    pub knots_after: usize,
    pub certified_error: f64,
    pub budget: f64,
    /// Merge-feasibility checks performed by the dynamic program; equals
    /// k(k+1)/2 for a spline with k pieces and doubles as a deterministic
    /// cost proxy for the fit work.
    pub feasibility_calls: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportTotals {
    pub knots_before: usize,
    pub knots_after: usize,
    pub compression_ratio: f64,
    pub max_certified_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompressionReport {
    pub format: String,
    pub eps: f64,
    pub budget_policy: String,
    pub fit_method: String,
    pub layer_budgets: Vec<f64>,
    pub records: Vec<SplineRecord>,
    pub totals: ReportTotals,
    /// Per-record wall-clock compression times, parallel to `records`.
    /// Omitted from JSON unless explicitly requested, keeping report files
    /// deterministic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Vec<f64>>,
}

impl CompressionReport {
    /// Enables timing serialization (report files stop being run-to-run
    /// byte-identical).
    pub fn with_timings(mut self, timings_ms: Vec<f64>) -> Self {
        self.timings_ms = Some(timings_ms);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(s: &str) -> crate::Result<Self> {
        let report: CompressionReport = serde_json::from_str(s)?;
        if report.format != crate::REPORT_FORMAT {
            return Err(crate::Error::schema(
                "format",
                format!(
                    "unsupported report format {:?}, expected {:?}",
                    report.format,
                    crate::REPORT_FORMAT
                ),
            ));
        }
        Ok(report)
    }
}
