//! Writes the desk-scale toy world (10 countries, 13 crops, 5 years on a
//! 20×20 grid) as a pipeline input directory.
//!
//! ```text
//! cargo run --example toy_fixture -- fixtures/toy 42
//! cargo run -- --config fixtures/toy/config.toml pipeline
//! ```

use std::path::PathBuf;

use cropfert::fixture::ToyWorld;

fn main() -> cropfert::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "fixtures/toy".into()));
    let seed = args.next().map_or(Ok(42), |s| s.parse()).expect("seed must be an integer");
    let world = ToyWorld::generate(seed)?;
    world.write(&dir)?;
    println!(
        "wrote {} survey rows, {} feature rows, {} budgets for {} countries to {}",
        world.survey.len(),
        world.feature_rows.len(),
        world.budgets.len(),
        world.countries.len(),
        dir.display()
    );
    Ok(())
}
