use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::Nutrient;
use crate::error::{Error, Result};
use crate::select::MeanSd;

/// One report of fertilizer use on grasslands and fodder crops.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareObservation {
    pub country: String,
    pub nutrient: Nutrient,
    pub year: i32,
    /// Fertilizer on grasslands and fodder crops, t.
    pub q_f: f64,
    /// Fertilizer on all agricultural land, t.
    pub q_a: f64,
    /// Grassland and fodder area, ha.
    pub a_f: f64,
    /// Agricultural area, ha.
    pub a_a: f64,
}

impl ShareObservation {
    pub fn share(&self) -> f64 {
        self.q_f / self.q_a
    }
}

/// Ratio of grassland/fodder fertilization intensity to the intensity over
/// all agricultural land: `(Q_f·A_a)/(Q_a·A_f)`.
pub fn ratio_rfa(obs: &ShareObservation) -> Result<f64> {
    if !(obs.q_a > 0.0) || !(obs.a_f > 0.0) {
        return Err(Error::invalid(format!(
            "{} {} {}: ratio needs positive Q_a and A_f",
            obs.country, obs.nutrient, obs.year
        )));
    }
    Ok(obs.q_f * obs.a_a / (obs.q_a * obs.a_f))
}

/// Grassland+fodder and agricultural areas per year, ha.
pub type AreaSeries = BTreeMap<i32, (f64, f64)>;

fn area_fraction(areas: &AreaSeries, year: i32) -> Result<f64> {
    let &(a_f, a_a) = areas
        .get(&year)
        .ok_or_else(|| Error::Missing(format!("areas for {year}")))?;
    if !(a_a > 0.0) || a_f < 0.0 {
        return Err(Error::invalid(format!("areas for {year}: need A_a > 0 and A_f >= 0")));
    }
    Ok(a_f / a_a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareMethod {
    InterpR,
    MeanR,
    Fixed,
    Blended,
    MidpointCap,
}

impl ShareMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ShareMethod::InterpR => "interp_r",
            ShareMethod::MeanR => "mean_r",
            ShareMethod::Fixed => "fixed",
            ShareMethod::Blended => "blended",
            ShareMethod::MidpointCap => "midpoint_cap",
        }
    }
}

impl fmt::Display for ShareMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ShareMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ShareMethod::InterpR,
            ShareMethod::MeanR,
            ShareMethod::Fixed,
            ShareMethod::Blended,
            ShareMethod::MidpointCap,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
        .ok_or_else(|| Error::invalid(format!("unknown share method {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharePoint {
    pub year: i32,
    /// Q_f/Q_a in [0, 1].
    pub share: f64,
    pub method: ShareMethod,
    /// The raw estimate fell outside [0, 1] and was clamped.
    pub clamped: bool,
}

impl SharePoint {
    pub fn new(year: i32, raw: f64, method: ShareMethod) -> Self {
        let share = raw.clamp(0.0, 1.0);
        let clamped = share != raw;
        if clamped {
            log::warn!("share {raw} in {year} clamped to {share}");
        }
        SharePoint { year, share, method, clamped }
    }
}

/// Yearly grassland/fodder shares for one country and nutrient.
#[derive(Clone, Debug, PartialEq)]
pub struct ShareSeries {
    pub country: String,
    pub nutrient: Nutrient,
    pub points: Vec<SharePoint>,
}

impl ShareSeries {
    pub fn clamp_count(&self) -> usize {
        self.points.iter().filter(|p| p.clamped).count()
    }

    pub fn get(&self, year: i32) -> Option<&SharePoint> {
        self.points.iter().find(|p| p.year == year)
    }
}

/// `share_i = R̄ · A_f,i / A_a,i` for every year of `areas`.
pub fn share_from_mean_r(mean_r: f64, areas: &AreaSeries) -> Result<Vec<SharePoint>> {
    if !(mean_r >= 0.0) {
        return Err(Error::invalid(format!("mean ratio {mean_r} must be non-negative")));
    }
    areas
        .keys()
        .map(|&y| Ok(SharePoint::new(y, mean_r * area_fraction(areas, y)?, ShareMethod::MeanR)))
        .collect()
}

/// Piecewise-linear value through `knots` (sorted by year), held at the
/// nearest end outside their range.
pub fn interpolate(knots: &[(i32, f64)], year: i32) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if year <= first.0 {
        return first.1;
    }
    if year >= last.0 {
        return last.1;
    }
    let k = knots.partition_point(|&(y, _)| y <= year);
    let (y0, v0) = knots[k - 1];
    let (y1, v1) = knots[k];
    if y0 == year {
        return v0;
    }
    v0 + (v1 - v0) * f64::from(year - y0) / f64::from(y1 - y0)
}

/// `share_i = R_i · A_f,i / A_a,i` with `R_i` interpolated between ratio
/// points. Anchors `(year, share)` become ratio knots and their years
/// are pinned to the given share.
pub fn share_from_interp_r(r_points: &[(i32, f64)], anchors: &[(i32, f64)], areas: &AreaSeries) -> Result<Vec<SharePoint>> {
    let mut knots: BTreeMap<i32, f64> = r_points.iter().copied().collect();
    for &(y, s) in anchors {
        // A zero anchor needs no areas, so it may sit before the series.
        let r = if s == 0.0 {
            0.0
        } else {
            let frac = area_fraction(areas, y)?;
            if frac > 0.0 {
                s / frac
            } else {
                0.0
            }
        };
        knots.insert(y, r);
    }
    if knots.is_empty() {
        return Err(Error::Missing("ratio points for interpolation".into()));
    }
    let knots: Vec<(i32, f64)> = knots.into_iter().collect();
    areas
        .keys()
        .map(|&y| {
            let raw = match anchors.iter().find(|a| a.0 == y) {
                Some(&(_, s)) => s,
                None => interpolate(&knots, y) * area_fraction(areas, y)?,
            };
            Ok(SharePoint::new(y, raw, ShareMethod::InterpR))
        })
        .collect()
}

/// Halfway between full allocation and the grassland/fodder area share.
pub fn share_midpoint_cap(areas: &AreaSeries) -> Result<Vec<SharePoint>> {
    areas
        .keys()
        .map(|&y| Ok(SharePoint::new(y, (1.0 + area_fraction(areas, y)?) / 2.0, ShareMethod::MidpointCap)))
        .collect()
}

/// Mean ± sample sd of absolute errors over overlapping years, in
/// percentage points.
pub fn evaluate_share_mae(points: &[SharePoint], reported: &[(i32, f64)]) -> Result<MeanSd> {
    let errors: Vec<f64> = reported
        .iter()
        .filter_map(|&(y, r)| points.iter().find(|p| p.year == y).map(|p| 100.0 * (p.share - r).abs()))
        .collect();
    MeanSd::of(&errors).ok_or_else(|| Error::Missing("no reported share overlaps the series".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn obs(q_f: f64, q_a: f64, a_f: f64, a_a: f64) -> ShareObservation {
        ShareObservation { country: "X".into(), nutrient: Nutrient::N, year: 2000, q_f, q_a, a_f, a_a }
    }

    fn flat_areas(years: std::ops::RangeInclusive<i32>, a_f: f64, a_a: f64) -> AreaSeries {
        years.map(|y| (y, (a_f, a_a))).collect()
    }

    #[test]
    fn ratio_cases() {
        assert_eq!(ratio_rfa(&obs(20.0, 100.0, 200.0, 1000.0)).unwrap(), 1.0);
        assert_eq!(ratio_rfa(&obs(10.0, 100.0, 200.0, 1000.0)).unwrap(), 0.5);
        assert_eq!(ratio_rfa(&obs(0.0, 100.0, 200.0, 1000.0)).unwrap(), 0.0);
        assert!(ratio_rfa(&obs(1.0, 0.0, 1.0, 1.0)).is_err());
        assert!(ratio_rfa(&obs(1.0, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn mean_r_cases() {
        let a = flat_areas(2000..=2002, 40.0, 100.0);
        assert!(share_from_mean_r(0.0, &a).unwrap().iter().all(|p| p.share == 0.0));
        let s = share_from_mean_r(0.5, &a).unwrap();
        assert!((s[1].share - 0.2).abs() < 1e-15);
        assert_eq!(s[1].method, ShareMethod::MeanR);
        let c = share_from_mean_r(4.0, &a).unwrap();
        assert!(c.iter().all(|p| p.share == 1.0 && p.clamped));
    }

    #[test]
    fn interp_midpoint_and_anchor() {
        let a = flat_areas(1950..=1990, 50.0, 100.0);
        let s = share_from_interp_r(&[(1960, 0.0), (1980, 1.0)], &[], &a).unwrap();
        let at = |y: i32| s.iter().find(|p| p.year == y).unwrap().share;
        assert!((at(1970) - 0.25).abs() < 1e-15);
        assert_eq!(at(1950), 0.0);
        assert_eq!(at(1990), 0.5);
        let pinned = share_from_interp_r(&[(1980, 1.0)], &[(1960, 0.0)], &a).unwrap();
        assert_eq!(pinned.iter().find(|p| p.year == 1960).unwrap().share, 0.0);
    }

    #[test]
    fn single_point_matches_mean_r() {
        let a: AreaSeries = (2000..2010).map(|y| (y, (10.0 + y as f64 - 2000.0, 100.0))).collect();
        let i = share_from_interp_r(&[(2004, 0.8)], &[], &a).unwrap();
        let m = share_from_mean_r(0.8, &a).unwrap();
        for (p, q) in i.iter().zip(&m) {
            assert_eq!(p.share, q.share);
        }
    }

    #[test]
    fn mae_conventions() {
        let pts: Vec<SharePoint> = [(1, 0.10), (2, 0.20)].iter().map(|&(y, s)| SharePoint::new(y, s, ShareMethod::Fixed)).collect();
        let zero = evaluate_share_mae(&pts, &[(1, 0.10), (2, 0.20)]).unwrap();
        assert_eq!((zero.mean, zero.sd), (0.0, 0.0));
        let e = evaluate_share_mae(&pts, &[(1, 0.12), (2, 0.24)]).unwrap();
        assert!((e.mean - 3.0).abs() < 1e-12);
        assert!((e.sd - 2f64.sqrt()).abs() < 1e-12);
        assert!(evaluate_share_mae(&pts, &[(9, 0.1)]).is_err());
    }

    #[test]
    fn midpoint_cap() {
        let a = flat_areas(2000..=2000, 90.0, 100.0);
        assert!((share_midpoint_cap(&a).unwrap()[0].share - 0.95).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn knots_reproduce_observed_shares(
            raw in prop::collection::btree_map(1960i32..2020, (0.0..50.0f64, 50.0..100.0f64, 1.0..500.0f64, 500.0..1000.0f64), 1..8)
        ) {
            let observations: Vec<ShareObservation> = raw
                .iter()
                .map(|(&y, &(q_f, q_a, a_f, a_a))| ShareObservation { year: y, ..obs(q_f, q_a, a_f, a_a) })
                .collect();
            let areas: AreaSeries = observations.iter().map(|o| (o.year, (o.a_f, o.a_a))).collect();
            let points: Vec<(i32, f64)> = observations.iter().map(|o| (o.year, ratio_rfa(o).unwrap())).collect();
            let s = share_from_interp_r(&points, &[], &areas).unwrap();
            for o in &observations {
                let p = s.iter().find(|p| p.year == o.year).unwrap();
                prop_assert!((p.share - o.share()).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&p.share));
            }
        }
    }
}
