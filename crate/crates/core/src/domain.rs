//! Closed vocabularies shared by every stage: crop classes and nutrients.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The thirteen crop classes used for labels, areas and output rasters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CropClass {
    Wheat,
    Maize,
    Rice,
    OtherCereals,
    Soybean,
    PalmOilFruit,
    OtherOilseeds,
    Vegetables,
    Fruits,
    RootsAndTubers,
    SugarCrops,
    FiberCrops,
    OtherCrops,
}

impl CropClass {
    pub const ALL: [CropClass; 13] = [
        CropClass::Wheat,
        CropClass::Maize,
        CropClass::Rice,
        CropClass::OtherCereals,
        CropClass::Soybean,
        CropClass::PalmOilFruit,
        CropClass::OtherOilseeds,
        CropClass::Vegetables,
        CropClass::Fruits,
        CropClass::RootsAndTubers,
        CropClass::SugarCrops,
        CropClass::FiberCrops,
        CropClass::OtherCrops,
    ];

    /// Identifier used in output file names, e.g. `OtherCereals`.
    pub fn file_name(self) -> &'static str {
        match self {
            CropClass::Wheat => "Wheat",
            CropClass::Maize => "Maize",
            CropClass::Rice => "Rice",
            CropClass::OtherCereals => "OtherCereals",
            CropClass::Soybean => "Soybean",
            CropClass::PalmOilFruit => "PalmOilFruit",
            CropClass::OtherOilseeds => "OtherOilseeds",
            CropClass::Vegetables => "Vegetables",
            CropClass::Fruits => "Fruits",
            CropClass::RootsAndTubers => "RootsAndTubers",
            CropClass::SugarCrops => "SugarCrops",
            CropClass::FiberCrops => "FiberCrops",
            CropClass::OtherCrops => "OtherCrops",
        }
    }

    /// Human-readable label, e.g. `Other Cereals`.
    pub fn label(self) -> &'static str {
        match self {
            CropClass::Wheat => "Wheat",
            CropClass::Maize => "Maize",
            CropClass::Rice => "Rice",
            CropClass::OtherCereals => "Other Cereals",
            CropClass::Soybean => "Soybean",
            CropClass::PalmOilFruit => "Palm Oil fruit",
            CropClass::OtherOilseeds => "Other Oilseeds",
            CropClass::Vegetables => "Vegetables",
            CropClass::Fruits => "Fruits",
            CropClass::RootsAndTubers => "Roots and tubers",
            CropClass::SugarCrops => "Sugar crops",
            CropClass::FiberCrops => "Fiber crops",
            CropClass::OtherCrops => "Other crops",
        }
    }

    pub fn is_rice(self) -> bool {
        self == CropClass::Rice
    }
}

impl fmt::Display for CropClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_name())
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

impl FromStr for CropClass {
    type Err = Error;

    /// Accepts file names, labels, and the numeric crop codes (`1_1` .. `7`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let code = match s.trim() {
            "1_1" => Some(CropClass::Wheat),
            "1_2" => Some(CropClass::Maize),
            "1_3" => Some(CropClass::Rice),
            "1_4" => Some(CropClass::OtherCereals),
            "2_1" => Some(CropClass::Soybean),
            "2_2" => Some(CropClass::PalmOilFruit),
            "2_3" => Some(CropClass::OtherOilseeds),
            "3_1" => Some(CropClass::Vegetables),
            "3_2" => Some(CropClass::Fruits),
            "4" => Some(CropClass::RootsAndTubers),
            "5" => Some(CropClass::SugarCrops),
            "6" => Some(CropClass::FiberCrops),
            "7" => Some(CropClass::OtherCrops),
            _ => None,
        };
        if let Some(c) = code {
            return Ok(c);
        }
        let key = squash(s);
        CropClass::ALL
            .iter()
            .copied()
            .find(|c| squash(c.file_name()) == key || squash(c.label()) == key)
            .or(match key.as_str() {
                "palmoil" | "oilpalm" | "oilpalmfruit" => Some(CropClass::PalmOilFruit),
                "soybeans" | "soya" => Some(CropClass::Soybean),
                "fibre" | "fibrecrops" | "cotton" => Some(CropClass::FiberCrops),
                _ => None,
            })
            .ok_or_else(|| Error::invalid(format!("unknown crop class {s:?}")))
    }
}

/// Fertilizer nutrient in its reporting form (P and K as oxides).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Nutrient {
    N,
    P2O5,
    K2O,
}

impl Nutrient {
    pub const ALL: [Nutrient; 3] = [Nutrient::N, Nutrient::P2O5, Nutrient::K2O];

    pub fn as_str(self) -> &'static str {
        match self {
            Nutrient::N => "N",
            Nutrient::P2O5 => "P2O5",
            Nutrient::K2O => "K2O",
        }
    }
}

impl fmt::Display for Nutrient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Nutrient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "N" => Ok(Nutrient::N),
            "P2O5" | "P₂O₅" => Ok(Nutrient::P2O5),
            "K2O" | "K₂O" => Ok(Nutrient::K2O),
            other => Err(Error::invalid(format!("unknown nutrient {other:?}"))),
        }
    }
}

macro_rules! string_conversions {
    ($t:ty) => {
        impl TryFrom<String> for $t {
            type Error = Error;
            fn try_from(s: String) -> Result<Self, Error> {
                s.parse()
            }
        }
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
    };
}
string_conversions!(CropClass);
string_conversions!(Nutrient);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crop_parsing_accepts_codes_and_labels() {
        assert_eq!("1_4".parse::<CropClass>().unwrap(), CropClass::OtherCereals);
        assert_eq!("Other Cereals".parse::<CropClass>().unwrap(), CropClass::OtherCereals);
        assert_eq!("roots_and_tubers".parse::<CropClass>().unwrap(), CropClass::RootsAndTubers);
        assert!("Tobacco leaves".parse::<CropClass>().is_err());
        for c in CropClass::ALL {
            assert_eq!(c.file_name().parse::<CropClass>().unwrap(), c);
            assert_eq!(c.label().parse::<CropClass>().unwrap(), c);
        }
    }

    #[test]
    fn nutrient_round_trip() {
        for n in Nutrient::ALL {
            assert_eq!(n.as_str().parse::<Nutrient>().unwrap(), n);
        }
        assert!("P".parse::<Nutrient>().is_err());
    }
}
