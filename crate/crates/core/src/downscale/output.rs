use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::domain::{CropClass, Nutrient};
use crate::error::{Error, Result};

/// `{CropName}{Fertilizer}{Year}.tiff`, e.g. `OtherCerealsP2O51995.tiff`.
pub fn layer_file_name(crop: CropClass, nutrient: Nutrient, year: i32) -> String {
    format!("{}{}{}.tiff", crop.file_name(), nutrient.as_str(), year)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = std::fs::File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub crop: CropClass,
    pub nutrient: Nutrient,
    pub year: i32,
    pub total_kg: f64,
    pub sha256: String,
}

/// Writes entries sorted by file name so the manifest itself is stable.
pub fn write_manifest<W: Write>(out: W, entries: &[ManifestEntry]) -> Result<()> {
    let mut sorted: Vec<&ManifestEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.file.cmp(&b.file));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["file", "crop", "nutrient", "year", "total_kg", "sha256"])?;
    for e in sorted {
        w.write_record([
            e.file.clone(),
            e.crop.file_name().to_string(),
            e.nutrient.to_string(),
            e.year.to_string(),
            format!("{:?}", e.total_kg),
            e.sha256.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_manifest<R: Read>(reader: R, origin: &Path) -> Result<Vec<ManifestEntry>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(|e| Error::parse(origin, e)))
        .collect()
}
