//! Every stage, from ingestion to validation, on the toy world through the
//! library API that backs the `cropfert` binary.
//!
//! ```text
//! cargo run --release --example pipeline_toy -- out_toy
//! ```

use std::path::PathBuf;

use cropfert::cli::{pipeline, PipelineConfig};
use cropfert::fixture::ToyWorld;

fn main() -> cropfert::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out_toy".into()));
    let inputs = out.join("inputs");
    ToyWorld::generate(42)?.write(&inputs)?;
    let mut cfg = PipelineConfig::load(&inputs.join("config.toml"))?;
    cfg.out_dir = out.clone();
    pipeline(&cfg)?;
    print!("{}", std::fs::read_to_string(out.join("validate/validation.txt"))?);
    Ok(())
}
