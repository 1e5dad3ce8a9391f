//! Least-cost travel distance over a friction surface with a barrier.
//!
//! ```text
//! cargo run --example cost_distance
//! ```

use cropfert::geo::{cost_distance, GridSpec, Raster};

fn main() -> cropfert::Result<()> {
    // 8×12 cells of 0.5°, friction in cost units per metre.
    let spec = GridSpec::new(8, 12, 0.5, 48.0, 10.0)?;
    let mut friction = Raster::filled(&spec, 1.0, "1");
    for r in 0..6 {
        friction.values[spec.index(r, 6)] = f64::NAN;
    }
    let cost = cost_distance(&friction, &[spec.index(0, 0)])?;
    for r in 0..spec.n_rows {
        let line: Vec<String> = (0..spec.n_cols)
            .map(|c| match cost.get(r, c) {
                v if v.is_nan() => "    ##".into(),
                v => format!("{:>6.0}", v / 1000.0),
            })
            .collect();
        println!("{}", line.join(""));
    }
    Ok(())
}
