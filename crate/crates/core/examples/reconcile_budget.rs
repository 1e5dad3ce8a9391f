//! Scaling crop-level predictions so they use exactly the national budget
//! left after the grassland share.
//!
//! ```text
//! cargo run --example reconcile_budget
//! ```

use cropfert::reconcile::{adjust_predictions, CountryBudget};
use cropfert::Nutrient;

fn main() -> cropfert::Result<()> {
    // kg/ha and ha for wheat, maize and vegetables.
    let rates = [120.0, 160.0, 90.0];
    let areas = [400_000.0, 250_000.0, 30_000.0];
    // 150 kt of N, 20% of it on grassland and fodder.
    let budget = CountryBudget::new("XYZ", Nutrient::N, 2000, 150_000.0, 0.2)?;
    let adj = adjust_predictions(&rates, &areas, budget.net_budget)?;

    let applied: f64 = adj.rates.iter().zip(&areas).map(|(r, a)| r * a).sum::<f64>() / 1000.0;
    println!("net budget {:.1} t, scale {:.4}", budget.net_budget, adj.scale);
    for (raw, new) in rates.iter().zip(&adj.rates) {
        println!("  {raw:>6.1} -> {new:>7.2} kg/ha");
    }
    println!("applied after adjustment {applied:.1} t");
    Ok(())
}
