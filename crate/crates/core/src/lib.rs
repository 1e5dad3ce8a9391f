//! Crop- and country-level fertilizer application rates, from labelled
//! survey records to mass-conserving gridded maps.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`features`]: ingestion, unit harmonisation, filters and one-hot encoding
//! * [`gbdt`]: histogram gradient-boosted trees with missing-value routing
//! * [`select`]: metrics, the naive baseline, grid search and nested CV
//! * [`shap`]: exact path-dependent TreeSHAP and importance rankings
//! * [`geo`]: grids, rasters, cell areas, climate indices and cost distance
//! * [`grassland`]: grassland/fodder fertilizer shares from intensity ratios
//! * [`reconcile`]: scaling crop predictions to national nutrient budgets
//! * [`downscale`]: yearly harvested-area maps and fertilizer rasters
//! * [`validate`]: MAE/MAPE comparison against reference series
//! * [`fixture`]: synthetic inputs for tests, examples and desk-scale runs
//! * [`cli`]: configuration and stage orchestration behind the `cropfert` binary

pub mod cli;
pub mod domain;
pub mod downscale;
pub mod error;
pub mod features;
pub mod fixture;
pub mod gbdt;
pub mod geo;
pub mod grassland;
pub mod reconcile;
pub mod select;
pub mod shap;
pub mod validate;

pub use domain::{CropClass, Nutrient};
pub use error::{Error, Result};
