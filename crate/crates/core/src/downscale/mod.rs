//! Yearly gridded harvested areas and fertilizer rasters.
//!
//! The base-year crop maps are carried forward with yearly cropland:
//! rice follows its own cropland layer, other crops keep their base-year
//! share of non-rice cropland, and newly cultivated cells borrow the share
//! from the nearest ring of cultivated neighbours. The resulting layers are
//! truncated at the cell surface, aligned to national harvested areas with
//! cap-and-redistribute, and multiplied by the reconciled rates.

mod align;
mod fert;
mod harvest;
mod neighbor;
mod output;
mod plan;

pub use align::{align_layers, align_layers_named, align_to_national, AlignStats, MAX_ROUNDS, TOLERANCE};
pub use fert::fertilizer_raster;
pub use harvest::{build_harea_year, cap_cell_totals, CropMapSet2000, YearlyCropland};
pub use neighbor::{neighbor_ratio, NeighborIndex, RINGS};
pub use output::{layer_file_name, read_manifest, sha256_file, write_manifest, ManifestEntry};
pub use plan::{
    downscale_to_dir, fertilizer_layer, harvested_areas, rate_table, CountryFraction, CountryLayer, DownscaleInputs,
    RateTable, YearAreas, YearReport,
};
