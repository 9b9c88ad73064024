//! Confidence calibration and evaluation metrics: threshold tuning,
//! POS × error histograms, LCS similarity, correlation, and error rates.

pub mod histogram;
pub mod metrics;
pub mod threshold;

pub use histogram::{
    confidence_histogram, HistogramKey, HistogramTable, PosClass, TokenErrorClass, TokenPosition,
};
pub use metrics::{error_rates, pearson, rouge_l, ErrorRateReport, OutputErrorRate, RougeScore};
pub use threshold::{
    output_score, tune_threshold, tune_threshold_with, ThresholdOptions, ThresholdReport,
    DEFAULT_THRESHOLD,
};
