use crate::domain::Nutrient;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    /// Identification columns: year, crop, country, surface, region.
    General,
    Environmental,
    Agrological,
    Socioeconomic,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::General => "general",
            Category::Environmental => "environmental",
            Category::Agrological => "agrological",
            Category::Socioeconomic => "socioeconomic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Numeric,
    Categorical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSpec {
    /// Column name in feature tables.
    pub name: &'static str,
    pub description: &'static str,
    pub category: Category,
    pub unit: &'static str,
    /// `None` means every nutrient model uses the feature.
    pub nutrient: Option<Nutrient>,
    pub kind: Kind,
}

impl FeatureSpec {
    pub fn applies_to(&self, n: Nutrient) -> bool {
        self.nutrient.map_or(true, |m| m == n)
    }
}

#[derive(Clone, Debug)]
pub struct FeatureRegistry {
    specs: Vec<FeatureSpec>,
}

macro_rules! spec {
    ($name:literal, $desc:literal, $cat:ident, $unit:literal, $nut:expr, $kind:ident) => {
        FeatureSpec {
            name: $name,
            description: $desc,
            category: Category::$cat,
            unit: $unit,
            nutrient: $nut,
            kind: Kind::$kind,
        }
    };
}

const N: Option<Nutrient> = Some(Nutrient::N);
const P: Option<Nutrient> = Some(Nutrient::P2O5);
const K: Option<Nutrient> = Some(Nutrient::K2O);

impl FeatureRegistry {
    pub fn new(specs: Vec<FeatureSpec>) -> Self {
        FeatureRegistry { specs }
    }

    /// The predictor set of the rate models.
    pub fn standard() -> Self {
        FeatureRegistry::new(vec![
            spec!("year", "Year of the data", General, "", None, Numeric),
            spec!("crop", "Crop class", General, "", None, Categorical),
            spec!("country", "Country or region code", General, "", None, Categorical),
            spec!("country_surface", "Surface of the country", General, "km2", None, Numeric),
            spec!("region", "World region", General, "", None, Categorical),
            spec!("pet", "Annual potential evapotranspiration", Environmental, "mm/year", None, Numeric),
            spec!("map", "Annual precipitation", Environmental, "mm/year", None, Numeric),
            spec!("mat", "Average annual temperature", Environmental, "degC", None, Numeric),
            spec!("aridity", "Aridity index", Environmental, "", None, Numeric),
            spec!("soil_n", "Soil nitrogen at 0-30 cm", Environmental, "cg/kg", None, Numeric),
            spec!("soil_ocs", "Soil organic carbon stock at 0-30 cm", Environmental, "t/ha", None, Numeric),
            spec!("soil_sand", "Soil sand at 0-30 cm", Environmental, "g/kg", None, Numeric),
            spec!("soil_silt", "Soil silt at 0-30 cm", Environmental, "g/kg", None, Numeric),
            spec!("soil_clay", "Soil clay at 0-30 cm", Environmental, "g/kg", None, Numeric),
            spec!("soil_ph", "Soil pH at 0-30 cm", Environmental, "", None, Numeric),
            spec!("soil_cec", "Soil cation exchange capacity at pH 7, 0-30 cm", Environmental, "mmol(c)/kg", None, Numeric),
            spec!("crop_area", "Harvested area of the crop", Agrological, "ha", None, Numeric),
            spec!("crop_area_pct", "Crop area over total cropland", Agrological, "%", None, Numeric),
            spec!("country_n_per_ha", "N use per cropland area", Agrological, "t/ha", N, Numeric),
            spec!("country_p_per_ha", "P2O5 use per cropland area", Agrological, "t/ha", P, Numeric),
            spec!("country_k_per_ha", "K2O use per cropland area", Agrological, "t/ha", K, Numeric),
            spec!("country_n_use", "N use in the country", Agrological, "t", N, Numeric),
            spec!("country_p_use", "P2O5 use in the country", Agrological, "t", P, Numeric),
            spec!("country_k_use", "K2O use in the country", Agrological, "t", K, Numeric),
            spec!("holding_size", "Standardized average farm size", Agrological, "ha", None, Numeric),
            spec!("crop_n_content", "N content of the crop", Agrological, "kg/t", N, Numeric),
            spec!("crop_p_content", "P content of the crop", Agrological, "kg/t", P, Numeric),
            spec!("crop_k_content", "K content of the crop", Agrological, "kg/t", K, Numeric),
            spec!("crop_n_removal", "N removal per ha", Agrological, "kg/ha", N, Numeric),
            spec!("crop_p_removal", "P removal per ha", Agrological, "kg/ha", P, Numeric),
            spec!("crop_k_removal", "K removal per ha", Agrological, "kg/ha", K, Numeric),
            spec!("irrigation", "Share of agricultural land irrigated", Agrological, "%", None, Numeric),
            spec!("machinery", "Agricultural machinery per ha of arable land", Agrological, "1/ha", None, Numeric),
            spec!("urea_price", "Global urea price", Socioeconomic, "USD/t", N, Numeric),
            spec!("p_rock_price", "Global phosphate rock price", Socioeconomic, "USD/t", P, Numeric),
            spec!("k_price", "Global potash price", Socioeconomic, "USD/t", K, Numeric),
            spec!("global_crop_price", "Real global crop price", Socioeconomic, "USD/t", None, Numeric),
            spec!("education", "Share of GDP spent on education", Socioeconomic, "%", None, Numeric),
            spec!("gdp_per_capita", "GDP per capita", Socioeconomic, "USD", None, Numeric),
            spec!("n_cost_distance", "Cost distance to ammonia plants", Socioeconomic, "", N, Numeric),
            spec!("p_cost_distance", "Cost distance to phosphate mines", Socioeconomic, "", P, Numeric),
            spec!("k_cost_distance", "Cost distance to potash mines", Socioeconomic, "", K, Numeric),
            spec!("population_pressure", "Population per ha of agricultural land", Socioeconomic, "persons/ha", None, Numeric),
            spec!("national_crop_price", "Real producer price in the country", Socioeconomic, "USD/t", None, Numeric),
        ])
    }

    pub fn specs(&self) -> &[FeatureSpec] {
        &self.specs
    }

    pub fn get(&self, name: &str) -> Option<&FeatureSpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn category(&self, name: &str) -> Option<Category> {
        self.get(name).map(|s| s.category)
    }
}
