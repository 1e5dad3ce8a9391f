//! Yearly harvested-area maps and a fertilizer raster for the toy world,
//! with the per-country mass check.
//!
//! ```text
//! cargo run --release --example downscale_toy -- out_rasters
//! ```

use std::path::PathBuf;

use cropfert::downscale::{fertilizer_layer, harvested_areas};
use cropfert::fixture::ToyWorld;
use cropfert::{CropClass, Nutrient};

fn main() -> cropfert::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out_rasters".into()));
    std::fs::create_dir_all(&dir)?;
    let world = ToyWorld::generate(42)?;
    let (year, crop, nutrient) = (2002, CropClass::Maize, Nutrient::N);

    let areas = harvested_areas(&world.downscale, year, &world.national_areas)?;
    let fert = fertilizer_layer(&areas, &world.truth, crop, nutrient)?;
    let path = dir.join(format!("{}_{nutrient}_{year}.tiff", crop.file_name()));
    fert.write_geotiff(&path)?;
    println!("wrote {}", path.display());

    for cf in world.downscale.countries.iter().take(3) {
        let mapped: f64 = fert.values.iter().zip(&cf.frac.values).filter(|(_, f)| **f > 0.0).map(|(v, _)| v).sum();
        let key = (cf.country.clone(), crop, year);
        let national = world.truth[&(cf.country.clone(), crop, year, nutrient)] * world.national_areas[&key];
        println!("{}: mapped {mapped:.1} kg, national {national:.1} kg", cf.country);
    }
    Ok(())
}
