use crate::error::{Error, Result};

/// Average rate over the whole crop area from the fertilized share and the
/// rate on fertilized land.
pub fn harmonize_rate(fertilized_share: f64, rate_on_fertilized: f64) -> Result<f64> {
    if !fertilized_share.is_finite() || !rate_on_fertilized.is_finite() {
        return Err(Error::invalid("non-finite rate input"));
    }
    if !(0.0..=1.0).contains(&fertilized_share) {
        return Err(Error::invalid(format!("fertilized share {fertilized_share} outside [0, 1]")));
    }
    if rate_on_fertilized < 0.0 {
        return Err(Error::invalid("negative application rate"));
    }
    Ok(fertilized_share * rate_on_fertilized)
}

/// kg/ha from a total in tonnes over a harvested area in hectares.
pub fn rate_from_totals(total_tonnes: f64, harvested_ha: f64) -> Result<f64> {
    if !(harvested_ha > 0.0) {
        return Err(Error::invalid("no harvested area"));
    }
    Ok(total_tonnes * 1000.0 / harvested_ha)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupRate {
    pub rate: f64,
    /// One member holds more than 90% of the area and its rate was used.
    pub single_crop: bool,
}

/// Area-weighted rate of a crop group from `(rate, area)` members.
pub fn weighted_group_rate(members: &[(f64, f64)]) -> Result<GroupRate> {
    if members.iter().any(|&(r, a)| !(a >= 0.0) || !r.is_finite()) {
        return Err(Error::invalid("negative or non-finite member area or rate"));
    }
    let total: f64 = members.iter().map(|m| m.1).sum();
    if !(total > 0.0) {
        return Err(Error::invalid("crop group without area"));
    }
    if let Some(&(rate, _)) = members.iter().find(|m| m.1 > 0.9 * total) {
        return Ok(GroupRate { rate, single_crop: true });
    }
    Ok(GroupRate {
        rate: members.iter().map(|(r, a)| r * a).sum::<f64>() / total,
        single_crop: false,
    })
}

pub const ATOMIC_MASS_P: f64 = 30.9738;
pub const ATOMIC_MASS_K: f64 = 39.0983;
pub const ATOMIC_MASS_O: f64 = 15.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Element {
    P,
    K,
}

impl std::str::FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "P" => Ok(Element::P),
            "K" => Ok(Element::K),
            other => Err(Error::invalid(format!("unknown element {other:?}"))),
        }
    }
}

impl Element {
    /// Oxide mass per unit of elemental mass: P2O5/P2 or K2O/K2.
    pub fn oxide_factor(self) -> f64 {
        match self {
            Element::P => (2.0 * ATOMIC_MASS_P + 5.0 * ATOMIC_MASS_O) / (2.0 * ATOMIC_MASS_P),
            Element::K => (2.0 * ATOMIC_MASS_K + ATOMIC_MASS_O) / (2.0 * ATOMIC_MASS_K),
        }
    }
}

pub fn oxide_conversion(element: Element, amount: f64) -> Result<f64> {
    if !(amount >= 0.0) {
        return Err(Error::invalid("negative nutrient amount"));
    }
    Ok(amount * element.oxide_factor())
}

pub fn deflate_prices(nominal: f64, cpi: f64) -> Result<f64> {
    if !(cpi > 0.0) {
        return Err(Error::invalid(format!("price index {cpi} must be positive")));
    }
    Ok(nominal / cpi)
}

/// Quantile by linear interpolation between order statistics of a sorted
/// slice: position `q·(n-1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Keeps values inside `[Q1 - 1.5 IQR, Q3 + 1.5 IQR]`, preserving order.
/// Fewer than four values pass through unchanged.
pub fn iqr_filter(values: &[f64]) -> Vec<f64> {
    match iqr_bounds(values) {
        Some((lo, hi)) => values.iter().copied().filter(|v| (lo..=hi).contains(v)).collect(),
        None => {
            log::warn!("iqr filter skipped: {} values", values.len());
            values.to_vec()
        }
    }
}

pub fn iqr_bounds(values: &[f64]) -> Option<(f64, f64)> {
    if values.len() < 4 {
        return None;
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&s, 0.25);
    let q3 = quantile_sorted(&s, 0.75);
    let iqr = q3 - q1;
    Some((q1 - 1.5 * iqr, q3 + 1.5 * iqr))
}
