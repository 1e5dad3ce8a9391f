use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gbdt::GbdtConfig;
use crate::geo::GridSpec;
use crate::select::{Param, SearchGrid};

/// Run configuration. Relative paths resolve against the directory of the
/// configuration file. There is no default seed.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Years to reconcile and downscale.
    #[serde(default)]
    pub years: Vec<i32>,
    #[serde(default)]
    pub inputs: Inputs,
    /// Expected raster grid; rasters on any other grid are rejected.
    pub grid: Option<GridOverride>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub stages: StageToggles,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub rates: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub share_areas: Option<PathBuf>,
    pub share_observations: Option<PathBuf>,
    /// Directory of per-country rule files.
    pub share_rules: Option<PathBuf>,
    pub budgets: Option<PathBuf>,
    pub national_areas: Option<PathBuf>,
    /// Directory in the layout read by `DownscaleInputs::load`.
    pub rasters: Option<PathBuf>,
    pub reference: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    pub n_rows: usize,
    pub n_cols: usize,
    pub cell_size: f64,
    pub origin_lat: f64,
    pub origin_lon: f64,
}

impl GridOverride {
    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n_rows, self.n_cols, self.cell_size, self.origin_lat, self.origin_lon)
            .map_err(|e| Error::Config(format!("grid: {e}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPreset {
    /// `axes` if given, otherwise the base config alone.
    #[default]
    Custom,
    Singleton,
    Hgb,
    Xgb,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    /// Label of the model rows in the metrics table.
    pub model: String,
    pub grid: GridPreset,
    pub axes: Vec<(Param, Vec<f64>)>,
    pub k_outer: usize,
    pub k_inner: usize,
    pub base: GbdtConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: "HGB".into(),
            grid: GridPreset::Custom,
            axes: Vec::new(),
            k_outer: 10,
            k_inner: 5,
            base: GbdtConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn search_grid(&self) -> Result<SearchGrid> {
        match (self.grid, self.axes.is_empty()) {
            (GridPreset::Custom, _) => SearchGrid::new(self.axes.clone()),
            (_, false) => Err(Error::Config("`axes` only applies to the custom grid".into())),
            (GridPreset::Singleton, true) => Ok(SearchGrid::singleton()),
            (GridPreset::Hgb, true) => Ok(SearchGrid::hgb_full()),
            (GridPreset::Xgb, true) => Ok(SearchGrid::xgb_full()),
        }
    }
}

/// Stages run by `pipeline`; single-stage subcommands ignore these.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StageToggles {
    pub ingest: bool,
    pub train: bool,
    pub explain: bool,
    pub shares: bool,
    pub adjust: bool,
    pub downscale: bool,
    pub validate: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        StageToggles { ingest: true, train: true, explain: true, shares: true, adjust: true, downscale: true, validate: true }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve(base_dir);
        cfg.train.base.validate().map_err(|e| Error::Config(format!("train.base: {e}")))?;
        if cfg.train.k_outer < 2 || cfg.train.k_inner < 2 {
            return Err(Error::Config("k_outer and k_inner must be at least 2".into()));
        }
        cfg.train.search_grid()?;
        if let Some(g) = &cfg.grid {
            g.spec()?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_toml(&text, dir)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.out_dir);
        let i = &mut self.inputs;
        for p in [
            &mut i.rates,
            &mut i.features,
            &mut i.share_areas,
            &mut i.share_observations,
            &mut i.share_rules,
            &mut i.budgets,
            &mut i.national_areas,
            &mut i.rasters,
            &mut i.reference,
        ]
        .into_iter()
        .flatten()
        {
            join(p);
        }
    }

    /// An input path that must be configured and exist when a stage starts.
    pub fn input(&self, name: &str, value: &Option<PathBuf>) -> Result<PathBuf> {
        let p = value.as_ref().ok_or_else(|| Error::Config(format!("inputs.{name} is not set")))?;
        if !p.exists() {
            return Err(Error::Config(format!("inputs.{name}: {} does not exist", p.display())));
        }
        Ok(p.clone())
    }

    pub fn years(&self) -> Result<&[i32]> {
        if self.years.is_empty() {
            return Err(Error::Config("`years` is empty".into()));
        }
        Ok(&self.years)
    }
}
