//! Exact TreeSHAP attributions and a mean-|SHAP| feature ranking.
//!
//! ```text
//! cargo run --release --example shap_explain
//! ```

use cropfert::fixture::synthetic_regression;
use cropfert::gbdt::{fit, GbdtConfig};
use cropfert::shap::{explain_rows, importance_ranking};

fn main() -> cropfert::Result<()> {
    let (x, y) = synthetic_regression(800, 0.1, 3);
    let model = fit(&x, &y, &GbdtConfig { n_trees: 150, max_depth: 4, ..Default::default() })?;
    let shap = explain_rows(&model, &x)?;

    let s = &shap[0];
    println!("row 0: base {:.3} + sum(phi) {:.3} = {:.3}", s.base_value, s.values.iter().sum::<f64>(), s.prediction());
    println!("model prediction {:.3}", model.predict(x.row(0))?);

    let names: Vec<String> = ["z0", "z0_twin", "z1", "exp_z1", "z2"].map(String::from).to_vec();
    let rows: Vec<Vec<f64>> = shap.iter().map(|s| s.values.clone()).collect();
    for (rank, (name, v)) in importance_ranking(&names, &rows)?.iter().enumerate() {
        println!("{:>2}. {name:<8} mean|phi| {v:.3}", rank + 1);
    }
    Ok(())
}
