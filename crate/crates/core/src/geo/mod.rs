//! Regular lat/lon grids, rasters with GeoTIFF I/O, spherical cell areas,
//! climate indices, crop-weighted environmental means and cost distance.

mod climate;
mod cost;
mod env;
mod grid;
mod raster;

pub use climate::{derive_climate, Climate, MONTH_DAYS};
pub use cost::cost_distance;
pub use env::aggregate_environmental;
pub use grid::{cell_area_ha, haversine_m, GridSpec, EARTH_RADIUS_M};
pub use raster::{Raster, NODATA};
