//! Serialization of analysis results for reports and external viewers.

pub mod dot;
pub mod graphml;
pub mod radar;
pub mod report;

pub use dot::export_dot;
pub use graphml::export_graphml;
pub use radar::export_radar_csv;
pub use report::{export_report_json, AnalysisReport, CommunityReport, GraphSummary, ReportSettings};

/// Round to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub(crate) fn format_number(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}

/// Affine map of `values` onto `[lo, hi]`; a constant input maps to `lo`.
pub(crate) fn scale_into(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    crate::prioritize::min_max(values)
        .into_iter()
        .map(|t| lo + t * (hi - lo))
        .collect()
}
