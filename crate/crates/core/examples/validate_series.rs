//! MAE and MAPE of predicted rates against a reference series, per
//! nutrient and for the N+P2O5+K2O sum.
//!
//! ```text
//! cargo run --example validate_series
//! ```

use cropfert::validate::{mae_mape, npk_sum_series, Series};

fn series(values: &[(i32, f64)]) -> Series {
    values.iter().copied().collect()
}

fn main() -> cropfert::Result<()> {
    let n = series(&[(2000, 110.0), (2001, 118.0), (2002, 121.0)]);
    let p = series(&[(2000, 40.0), (2001, 42.0), (2002, 39.0)]);
    let k = series(&[(2000, 35.0), (2001, 30.0)]);
    let reference_n = series(&[(2000, 100.0), (2001, 120.0), (2002, 125.0), (2003, 130.0)]);
    let reference_npk = series(&[(2000, 190.0), (2001, 185.0)]);

    let m = mae_mape(&n, &reference_n)?;
    println!("N: MAE {:.2} kg/ha, MAPE {:.2}% over {} years", m.mae, m.mape.unwrap_or(f64::NAN), m.n);
    let npk = npk_sum_series(&n, &p, &k);
    let m = mae_mape(&npk, &reference_npk)?;
    println!("NPK: MAE {:.2} kg/ha, MAPE {:.2}% over {} years", m.mae, m.mape.unwrap_or(f64::NAN), m.n);
    Ok(())
}
