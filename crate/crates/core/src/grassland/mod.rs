//! Grassland and fodder fertilizer shares.
//!
//! Reports give the fertilizer used on grasslands and fodder crops (Q_f)
//! against all agricultural use (Q_a), alongside the areas A_f and A_a.
//! Their intensity ratio `R = (Q_f·A_a)/(Q_a·A_f)` is averaged or
//! interpolated across years and turned back into shares with the yearly
//! area fractions. Country decisions live in TOML rule files.

mod equations;
mod io;
mod rules;

pub use equations::{
    evaluate_share_mae, interpolate, ratio_rfa, share_from_interp_r, share_from_mean_r, share_midpoint_cap, AreaSeries,
    ShareMethod, ShareObservation, SharePoint, ShareSeries,
};
pub use io::{read_areas, read_observations, read_share_table, share_rows, write_share_table, ShareRow};
pub use rules::{
    apply_country_rule, load_rules_dir, Anchor, CountryRule, MethodSpec, NutrientRule, ObsFilter, RuleData, RuleOutput,
    Segment,
};
