//! Joint histograms, fit metrics, and sampling-zero / structural-zero accounting.

mod joint;
mod metrics;
mod report;
mod sweep;
mod zeros;

pub use joint::{combo_key, combo_set, empirical_joint, Combo, ComboSet, JointHistogram};
pub use metrics::{pearson, r2, scatter_data, srmse};
pub use report::{subset_label, write_metrics_csv, MetricsRow};
pub use sweep::{
    additional_ratio_percent, dimension_sweep, sample_models, sample_seed, sweep_samples, SweepRow,
    DEFAULT_SAMPLE_SIZE,
};
pub use zeros::{ratio_curve, zero_analysis, CurvePoint, ZeroReport};
