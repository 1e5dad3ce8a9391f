//! Configuration and stage orchestration behind the `cropfert` binary.
//!
//! Every stage writes into its own directory under `out_dir` (`ingest/`,
//! `train/`, ...). Output is assembled in a scratch directory and moved
//! into place only when the stage succeeds, so a failed stage leaves the
//! previous artifacts untouched and no partial files behind.

mod config;
mod stages;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{GridOverride, GridPreset, Inputs, PipelineConfig, StageToggles, TrainConfig};
pub use stages::{adjust, downscale, explain, ingest, shares, train, validate};

use crate::error::Result;

/// Environment variable bounding the worker pool.
pub const WORKERS_ENV: &str = "CROPFERT_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "cropfert", version, about = "Crop fertilizer rate modelling and downscaling")]
pub struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(short, long, global = true, default_value = "cropfert.toml")]
    pub config: PathBuf,
    /// Overrides `seed` from the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `out_dir` from the configuration.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Harmonise survey rates into labels and encode the feature table.
    Ingest,
    /// Nested cross-validation, metrics table and production models.
    Train,
    /// TreeSHAP matrices, importance rankings and beeswarm tables.
    Explain,
    /// Grassland/fodder shares from the per-country rules.
    Shares,
    /// Scale predicted rates to net national budgets.
    Adjust,
    /// Yearly harvested areas and fertilizer rasters with a manifest.
    Downscale,
    /// Compare adjusted rates with reference series.
    Validate,
    /// Every enabled stage in order.
    Pipeline,
}

impl Cli {
    pub fn load_config(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out_dir {
            cfg.out_dir = o.clone();
        }
        Ok(cfg)
    }
}

/// Runs one subcommand.
pub fn run(command: Command, cfg: &PipelineConfig) -> Result<()> {
    match command {
        Command::Ingest => ingest(cfg),
        Command::Train => train(cfg),
        Command::Explain => explain(cfg),
        Command::Shares => shares(cfg),
        Command::Adjust => adjust(cfg),
        Command::Downscale => downscale(cfg),
        Command::Validate => validate(cfg),
        Command::Pipeline => pipeline(cfg),
    }
}

pub fn pipeline(cfg: &PipelineConfig) -> Result<()> {
    let s = &cfg.stages;
    let plan: [(bool, fn(&PipelineConfig) -> Result<()>); 7] = [
        (s.ingest, ingest),
        (s.train, train),
        (s.explain, explain),
        (s.shares, shares),
        (s.adjust, adjust),
        (s.downscale, downscale),
        (s.validate, validate),
    ];
    for (enabled, stage) in plan {
        if enabled {
            stage(cfg)?;
        }
    }
    Ok(())
}
