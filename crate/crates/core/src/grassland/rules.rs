use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::equations::{
    ratio_rfa, share_from_interp_r, share_from_mean_r, share_midpoint_cap, AreaSeries, ShareMethod, ShareObservation,
    SharePoint, ShareSeries,
};
use crate::domain::Nutrient;
use crate::error::{Error, Result};

/// Declarative share recipe for one country.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CountryRule {
    pub country: String,
    #[serde(default)]
    pub note: String,
    #[serde(rename = "nutrient")]
    pub nutrients: Vec<NutrientRule>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NutrientRule {
    pub nutrient: Nutrient,
    #[serde(rename = "segment")]
    pub segments: Vec<Segment>,
}

/// An inclusive span of years estimated with one method.
#[derive(Clone, Debug, Deserialize, PartialEq)]
pub struct Segment {
    pub from: i32,
    pub to: i32,
    #[serde(default)]
    pub note: String,
    #[serde(flatten)]
    pub method: MethodSpec,
}

/// Which observations a data-driven method uses. Empty means all of the
/// rule's own country.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
pub struct ObsFilter {
    /// Explicit report years.
    #[serde(default)]
    pub obs_years: Option<Vec<i32>>,
    /// Inclusive `[from, to]` window of report years.
    #[serde(default)]
    pub obs_span: Option<[i32; 2]>,
    /// Pool observations of these countries instead.
    #[serde(default)]
    pub countries: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MethodSpec {
    /// A constant share; without `value`, the mean observed Q_f/Q_a.
    Fixed {
        value: Option<f64>,
        #[serde(flatten)]
        filter: ObsFilter,
    },
    /// Mean intensity ratio times the area fraction; without `value`, the
    /// mean ratio of the selected observations.
    MeanR {
        value: Option<f64>,
        #[serde(flatten)]
        filter: ObsFilter,
    },
    /// Interpolated ratios of the selected observations, plus anchors.
    InterpR {
        #[serde(default)]
        anchors: Vec<Anchor>,
        #[serde(flatten)]
        filter: ObsFilter,
    },
    /// Year-wise average of two methods.
    Blend { a: Box<MethodSpec>, b: Box<MethodSpec> },
    /// `(1 + A_f/A_a) / 2`.
    MidpointCap {},
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
pub struct Anchor {
    pub year: i32,
    pub share: f64,
}

impl CountryRule {
    pub fn from_toml(text: &str, origin: &Path) -> Result<CountryRule> {
        toml::from_str(text).map_err(|e| Error::parse(origin, e))
    }

    pub fn load(path: &Path) -> Result<CountryRule> {
        CountryRule::from_toml(&std::fs::read_to_string(path)?, path)
    }
}

/// Every `*.toml` rule in `dir`, ordered by file name.
pub fn load_rules_dir(dir: &Path) -> Result<Vec<CountryRule>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths.iter().map(|p| CountryRule::load(p)).collect()
}

/// Inputs a rule may reference.
pub struct RuleData<'a> {
    pub areas: &'a BTreeMap<String, AreaSeries>,
    pub observations: &'a [ShareObservation],
}

impl RuleData<'_> {
    fn select(&self, country: &str, nutrient: Nutrient, f: &ObsFilter) -> Result<Vec<&ShareObservation>> {
        let own = [country.to_string()];
        let countries: &[String] = f.countries.as_deref().unwrap_or(&own);
        let picked: Vec<&ShareObservation> = self
            .observations
            .iter()
            .filter(|o| o.nutrient == nutrient && countries.contains(&o.country))
            .filter(|o| f.obs_years.as_ref().map_or(true, |ys| ys.contains(&o.year)))
            .filter(|o| f.obs_span.map_or(true, |[a, b]| (a..=b).contains(&o.year)))
            .collect();
        if picked.is_empty() {
            return Err(Error::Missing(format!(
                "share observations for {} {nutrient} matching {:?}",
                countries.join("+"),
                f
            )));
        }
        Ok(picked)
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

fn eval_method(m: &MethodSpec, country: &str, nutrient: Nutrient, areas: &AreaSeries, data: &RuleData) -> Result<Vec<SharePoint>> {
    match m {
        MethodSpec::Fixed { value, filter } => {
            let v = match value {
                Some(v) => *v,
                None => mean(data.select(country, nutrient, filter)?.iter().map(|o| o.share())),
            };
            Ok(areas.keys().map(|&y| SharePoint::new(y, v, ShareMethod::Fixed)).collect())
        }
        MethodSpec::MeanR { value, filter } => {
            let r = match value {
                Some(v) => *v,
                None => {
                    let obs = data.select(country, nutrient, filter)?;
                    let rs = obs.iter().map(|o| ratio_rfa(o)).collect::<Result<Vec<_>>>()?;
                    mean(rs.into_iter())
                }
            };
            share_from_mean_r(r, areas)
        }
        MethodSpec::InterpR { anchors, filter } => {
            let obs = data.select(country, nutrient, filter)?;
            let points = obs.iter().map(|o| Ok((o.year, ratio_rfa(o)?))).collect::<Result<Vec<_>>>()?;
            let anchors: Vec<(i32, f64)> = anchors.iter().map(|a| (a.year, a.share)).collect();
            share_from_interp_r(&points, &anchors, areas)
        }
        MethodSpec::Blend { a, b } => {
            let pa = eval_method(a, country, nutrient, areas, data)?;
            let pb = eval_method(b, country, nutrient, areas, data)?;
            Ok(pa
                .iter()
                .zip(&pb)
                .map(|(x, y)| SharePoint {
                    year: x.year,
                    share: 0.5 * (x.share + y.share),
                    method: ShareMethod::Blended,
                    clamped: x.clamped || y.clamped,
                })
                .collect())
        }
        MethodSpec::MidpointCap {} => share_midpoint_cap(areas),
    }
}

/// A share series plus the note of the segment behind each year.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleOutput {
    pub series: ShareSeries,
    pub notes: Vec<String>,
}

/// Evaluates every nutrient of `rule`; segments must tile a contiguous
/// span of years.
pub fn apply_country_rule(rule: &CountryRule, data: &RuleData) -> Result<Vec<RuleOutput>> {
    let areas = data
        .areas
        .get(&rule.country)
        .ok_or_else(|| Error::Missing(format!("area series for {}", rule.country)))?;
    let mut out = Vec::new();
    for nr in &rule.nutrients {
        let mut segs: Vec<&Segment> = nr.segments.iter().collect();
        segs.sort_by_key(|s| s.from);
        for w in segs.windows(2) {
            if w[1].from != w[0].to + 1 {
                return Err(Error::Config(format!(
                    "{} {}: segments {}-{} and {}-{} are not contiguous",
                    rule.country, nr.nutrient, w[0].from, w[0].to, w[1].from, w[1].to
                )));
            }
        }
        let mut points = Vec::new();
        let mut notes = Vec::new();
        for s in segs {
            if s.to < s.from {
                return Err(Error::Config(format!("{}: segment {}-{} is reversed", rule.country, s.from, s.to)));
            }
            if let Some(y) = (s.from..=s.to).find(|y| !areas.contains_key(y)) {
                return Err(Error::Missing(format!("areas for {} {y}", rule.country)));
            }
            let all = eval_method(&s.method, &rule.country, nr.nutrient, areas, data)?;
            for p in all.into_iter().filter(|p| (s.from..=s.to).contains(&p.year)) {
                points.push(p);
                notes.push(s.note.clone());
            }
        }
        out.push(RuleOutput {
            series: ShareSeries { country: rule.country.clone(), nutrient: nr.nutrient, points },
            notes,
        });
    }
    Ok(out)
}
