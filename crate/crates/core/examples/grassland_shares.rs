//! Grassland share estimation for a reconstructed Austrian nitrogen series:
//! a constant intensity ratio, interpolation between reports, and a rule
//! file combining segments.
//!
//! ```text
//! cargo run --example grassland_shares
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use cropfert::fixture::{austria_n, AUSTRIA_MEAN_R_N, AUSTRIA_RULE};
use cropfert::grassland::{
    apply_country_rule, evaluate_share_mae, ratio_rfa, share_from_interp_r, share_from_mean_r, CountryRule, RuleData,
};

fn main() -> cropfert::Result<()> {
    let (areas, obs) = austria_n();
    let reported: Vec<(i32, f64)> = obs.iter().map(|o| (o.year, o.share())).collect();

    let mean_r = share_from_mean_r(AUSTRIA_MEAN_R_N, &areas)?;
    println!("mean ratio {AUSTRIA_MEAN_R_N}: MAE {} pp", evaluate_share_mae(&mean_r, &reported)?.format(2));

    let knots = obs.iter().map(|o| Ok((o.year, ratio_rfa(o)?))).collect::<cropfert::Result<Vec<_>>>()?;
    let interp = share_from_interp_r(&knots, &[], &areas)?;
    println!("interpolated ratio: MAE {} pp (reproduces every report)", evaluate_share_mae(&interp, &reported)?.format(2));

    let rule = CountryRule::from_toml(AUSTRIA_RULE, Path::new("AUT.toml"))?;
    let all_areas: BTreeMap<String, _> = [("AUT".to_string(), areas)].into_iter().collect();
    for out in apply_country_rule(&rule, &RuleData { areas: &all_areas, observations: &obs })? {
        let first = out.series.points.first().expect("non-empty series");
        let last = out.series.points.last().expect("non-empty series");
        println!(
            "rule {} {}: {} years, {} {:.3} .. {} {:.3}",
            out.series.country,
            out.series.nutrient,
            out.series.points.len(),
            first.year,
            first.share,
            last.year,
            last.share
        );
    }
    Ok(())
}
