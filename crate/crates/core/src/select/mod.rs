//! Model selection: fold assignment, exhaustive grid search, nested
//! cross-validation and the mean-predictor baseline.

mod cv;
mod folds;
mod grid;
mod metrics;
mod table;

pub use cv::{majority_config, nested_cv, CvPlan, NestedCvResult, OuterTrace};
pub use folds::{complement, kfold};
pub use grid::{grid_search, GridResult, GridScore, Param, SearchGrid};
pub use metrics::{metrics, FoldMetrics, MeanSd, MetricReport, NaiveBaseline};
pub(crate) use metrics::fmt_fixed;
pub use table::{write_metrics_table, TableRow};
