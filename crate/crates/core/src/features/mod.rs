//! Label and predictor preparation: rate harmonisation, unit and oxide
//! conversion, anomaly and outlier filters, and one-hot encoding.

mod encode;
mod ops;
mod records;
mod registry;

pub use encode::{one_hot_encode, Design, Encoded, OneHotEncoder, RawTable, RowKey};
pub use ops::{
    deflate_prices, harmonize_rate, iqr_bounds, iqr_filter, oxide_conversion, quantile_sorted, rate_from_totals,
    weighted_group_rate, Element, GroupRate, ATOMIC_MASS_K, ATOMIC_MASS_O, ATOMIC_MASS_P,
};
pub use records::{
    filter_anomalies, label_index, labeled_to_records, parse_season, read_labeled, read_rate_records, select_labeled,
    write_labeled, IngestStats, LabeledRow, RateRecord, ANOMALY_THRESHOLD,
};
pub use registry::{Category, FeatureRegistry, FeatureSpec, Kind};
