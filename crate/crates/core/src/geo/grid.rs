use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius of the spherical model, in metres.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A regular latitude/longitude grid, rows running north to south from a
/// north-west origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Cell edge in degrees.
    pub cell_size: f64,
    /// Latitude of the northern edge.
    pub origin_lat: f64,
    /// Longitude of the western edge.
    pub origin_lon: f64,
    #[serde(default = "default_datum")]
    pub datum: String,
}

fn default_datum() -> String {
    "WGS84".to_string()
}

impl GridSpec {
    pub fn new(n_rows: usize, n_cols: usize, cell_size: f64, origin_lat: f64, origin_lon: f64) -> Result<Self> {
        let g = GridSpec {
            n_rows,
            n_cols,
            cell_size,
            origin_lat,
            origin_lon,
            datum: default_datum(),
        };
        g.validate()?;
        Ok(g)
    }

    /// 5 arc-minute global grid, 90°N/180°W origin.
    pub fn global_5arcmin() -> Self {
        GridSpec {
            n_rows: 2160,
            n_cols: 4320,
            cell_size: 5.0 / 60.0,
            origin_lat: 90.0,
            origin_lon: -180.0,
            datum: default_datum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eps = 1e-9;
        if !(self.cell_size > 0.0) || self.n_rows == 0 || self.n_cols == 0 {
            return Err(Error::Config("grid needs positive cell size and dimensions".into()));
        }
        if self.n_rows as f64 * self.cell_size > 180.0 + eps || self.n_cols as f64 * self.cell_size > 360.0 + eps {
            return Err(Error::Config("grid extent exceeds the globe".into()));
        }
        if self.origin_lat > 90.0 + eps || self.origin_lat - self.n_rows as f64 * self.cell_size < -90.0 - eps {
            return Err(Error::Config("grid rows leave [-90, 90]".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n_cols + col
    }

    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.n_cols, idx % self.n_cols)
    }

    /// (north, south) edge latitudes of a row.
    pub fn row_edges(&self, row: usize) -> (f64, f64) {
        let top = self.origin_lat - row as f64 * self.cell_size;
        (top, top - self.cell_size)
    }

    /// (lat, lon) of a cell centre.
    pub fn center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin_lat - (row as f64 + 0.5) * self.cell_size,
            self.origin_lon + (col as f64 + 0.5) * self.cell_size,
        )
    }

    /// Area of one cell in `row` on the sphere, in hectares.
    pub fn cell_area_ha(&self, row: usize) -> f64 {
        cell_area_ha(self, row)
    }

    /// Per-row cell areas.
    pub fn row_areas_ha(&self) -> Vec<f64> {
        (0..self.n_rows).map(|r| self.cell_area_ha(r)).collect()
    }
}

/// Spherical band area `R²·Δλ·(sin φ_top − sin φ_bottom)` in hectares.
pub fn cell_area_ha(spec: &GridSpec, row: usize) -> f64 {
    let (top, bottom) = spec.row_edges(row);
    let dlon = spec.cell_size.to_radians();
    EARTH_RADIUS_M * EARTH_RADIUS_M * dlon * (top.to_radians().sin() - bottom.to_radians().sin()) / 1e4
}

/// Great-circle distance in metres between two (lat, lon) points in degrees.
pub fn haversine_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let dp = p2 - p1;
    let dl = (b.1 - a.1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}
