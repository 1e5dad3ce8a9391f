use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use tiff::decoder::{Decoder, DecodingResult};
use tiff::encoder::{colortype::Gray32Float, TiffEncoder};
use tiff::tags::Tag;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Nodata value written to files. In memory nodata is NaN.
pub const NODATA: f64 = -9999.0;

/// A single-band georeferenced grid; NaN cells are nodata.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub unit: String,
}

impl Raster {
    pub fn new(spec: GridSpec, values: Vec<f64>, unit: impl Into<String>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::invalid(format!(
                "raster has {} values for a {}x{} grid",
                values.len(),
                spec.n_rows,
                spec.n_cols
            )));
        }
        Ok(Raster { spec, values, unit: unit.into() })
    }

    pub fn filled(spec: &GridSpec, value: f64, unit: impl Into<String>) -> Self {
        Raster {
            values: vec![value; spec.len()],
            spec: spec.clone(),
            unit: unit.into(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.spec.index(row, col)]
    }

    /// The value, or `None` for nodata.
    pub fn value(&self, idx: usize) -> Option<f64> {
        let v = self.values[idx];
        (!v.is_nan()).then_some(v)
    }

    /// Sum of data cells.
    pub fn sum(&self) -> f64 {
        self.values.iter().filter(|v| !v.is_nan()).sum()
    }

    pub fn same_grid(&self, other: &Raster) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::invalid("rasters do not share a grid"));
        }
        Ok(())
    }

    /// Single-band 32-bit float GeoTIFF with geographic georeferencing.
    pub fn write_geotiff(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        let mut enc = TiffEncoder::new(file)?;
        let mut img = enc.new_image::<Gray32Float>(self.spec.n_cols as u32, self.spec.n_rows as u32)?;
        let s = &self.spec;
        let dir = img.encoder();
        dir.write_tag(Tag::ModelPixelScaleTag, &[s.cell_size, s.cell_size, 0.0][..])?;
        dir.write_tag(Tag::ModelTiepointTag, &[0.0, 0.0, 0.0, s.origin_lon, s.origin_lat, 0.0][..])?;
        // GeoTIFF keys: model type geographic, raster pixel-is-area, WGS84.
        let keys: [u16; 16] = [1, 1, 0, 3, 1024, 0, 1, 2, 1025, 0, 1, 1, 2048, 0, 1, 4326];
        dir.write_tag(Tag::GeoKeyDirectoryTag, &keys[..])?;
        dir.write_tag(Tag::GdalNodata, "-9999")?;
        dir.write_tag(Tag::ImageDescription, format!("unit={};datum={}", self.unit, s.datum).as_str())?;
        let data: Vec<f32> = self
            .values
            .iter()
            .map(|&v| if v.is_nan() { NODATA as f32 } else { v as f32 })
            .collect();
        img.write_data(&data)?;
        Ok(())
    }

    pub fn read_geotiff(path: &Path) -> Result<Raster> {
        let bad = |msg: &str| Error::parse(path, msg);
        let mut dec = Decoder::new(BufReader::new(File::open(path)?))?;
        let (w, h) = dec.dimensions()?;
        let scale = dec.get_tag_f64_vec(Tag::ModelPixelScaleTag)?;
        let tie = dec.get_tag_f64_vec(Tag::ModelTiepointTag)?;
        if scale.len() < 2 || tie.len() < 6 || (scale[0] - scale[1]).abs() > 1e-12 {
            return Err(bad("unsupported georeferencing"));
        }
        let nodata: f64 = dec
            .get_tag_ascii_string(Tag::GdalNodata)
            .ok()
            .and_then(|s| s.trim().trim_end_matches('\0').parse().ok())
            .unwrap_or(NODATA);
        let desc = dec.get_tag_ascii_string(Tag::ImageDescription).unwrap_or_default();
        let field = |k: &str| {
            desc.split(';')
                .find_map(|kv| kv.strip_prefix(k).and_then(|v| v.strip_prefix('=')))
                .map(|v| v.trim_end_matches('\0').to_string())
        };
        let spec = GridSpec {
            n_rows: h as usize,
            n_cols: w as usize,
            cell_size: scale[0],
            origin_lat: tie[4] - tie[1] * scale[1],
            origin_lon: tie[3] - tie[0] * scale[0],
            datum: field("datum").unwrap_or_else(|| "WGS84".into()),
        };
        let values: Vec<f64> = match dec.read_image()? {
            DecodingResult::F32(v) => v.into_iter().map(f64::from).collect(),
            DecodingResult::F64(v) => v,
            _ => return Err(bad("expected a floating-point band")),
        };
        let values = values.into_iter().map(|v| if v == nodata { f64::NAN } else { v }).collect();
        Raster::new(spec, values, field("unit").unwrap_or_default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geotiff_round_trip() {
        let spec = GridSpec::new(3, 4, 0.5, 10.0, -20.0).unwrap();
        let mut values: Vec<f64> = (0..12).map(|i| i as f64 * 0.25).collect();
        values[5] = f64::NAN;
        let r = Raster::new(spec, values, "kg").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.tiff");
        r.write_geotiff(&p).unwrap();
        let back = Raster::read_geotiff(&p).unwrap();
        assert_eq!(back.spec, r.spec);
        assert_eq!(back.unit, "kg");
        assert!(back.values[5].is_nan());
        for i in (0..12).filter(|&i| i != 5) {
            assert_eq!(back.values[i], r.values[i]);
        }
    }

    #[test]
    fn length_checked() {
        let spec = GridSpec::new(2, 2, 1.0, 0.0, 0.0).unwrap();
        assert!(Raster::new(spec, vec![0.0; 3], "").is_err());
    }

    #[test]
    fn sum_skips_nodata() {
        let spec = GridSpec::new(1, 3, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(Raster::new(spec, vec![1.0, f64::NAN, 2.0], "").unwrap().sum(), 3.0);
    }
}
