use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use super::config::PipelineConfig;
use crate::domain::Nutrient;
use crate::downscale::{downscale_to_dir, rate_table, write_manifest, DownscaleInputs};
use crate::error::{Error, Result};
use crate::features::{
    filter_anomalies, read_labeled, read_rate_records, select_labeled, write_labeled, Design, FeatureRegistry, LabeledRow,
    RateRecord, RawTable,
};
use crate::gbdt::{fit, TreeEnsemble};
use crate::grassland::{
    apply_country_rule, load_rules_dir, read_areas, read_observations, read_share_table, share_rows, write_share_table,
    RuleData,
};
use crate::reconcile::{
    build_budgets, read_adjusted, read_budget_totals, read_national_areas, read_rates, reconcile_all, write_adjusted,
    write_budgets, write_rates,
};
use crate::select::{majority_config, nested_cv, write_metrics_table, CvPlan, TableRow};
use crate::shap::{aggregate_groups, explain_rows, importance_ranking, write_beeswarm, write_ranking, write_shap_matrix};
use crate::validate::{compare, format_validation_table, read_reference, uncovered, write_comparison, write_validation_csv};

/// One structured log line.
pub(crate) fn emit(stage: &str, key: impl std::fmt::Display, metric: &str, value: impl std::fmt::Display) {
    info!("stage={stage} key={key} metric={metric} value={value}");
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| Error::Missing(format!("{}: {e}", path.display())))?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// An artifact written by an earlier stage.
fn artifact(cfg: &PipelineConfig, stage: &str, file: &str) -> Result<PathBuf> {
    let p = cfg.out_dir.join(stage).join(file);
    if !p.exists() {
        return Err(Error::Missing(format!("artifact {stage}/{file} (run `{stage}` first)")));
    }
    Ok(p)
}

/// Runs `body` against a scratch directory that replaces `out_dir/name`
/// only on success; on failure nothing of the attempt is left behind.
pub(crate) fn staged(cfg: &PipelineConfig, name: &str, body: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let tmp = cfg.out_dir.join(format!(".{name}.partial"));
    if tmp.exists() {
        std::fs::remove_dir_all(&tmp)?;
    }
    std::fs::create_dir_all(&tmp)?;
    match body(&tmp) {
        Ok(()) => {
            let dest = cfg.out_dir.join(name);
            if dest.exists() {
                std::fs::remove_dir_all(&dest)?;
            }
            std::fs::rename(&tmp, &dest)?;
            emit(name, "-", "status", "ok");
            Ok(())
        }
        Err(e) => {
            let _ = std::fs::remove_dir_all(&tmp);
            Err(e)
        }
    }
}

fn read_features(cfg: &PipelineConfig) -> Result<RawTable> {
    let path = cfg.input("features", &cfg.inputs.features)?;
    RawTable::read(open(&path)?, &path)
}

fn model_file(n: Nutrient) -> String {
    format!("model_{n}.txt")
}

pub fn ingest(cfg: &PipelineConfig) -> Result<()> {
    let rates = cfg.input("rates", &cfg.inputs.rates)?;
    let table = read_features(cfg)?;
    staged(cfg, "ingest", |dir| {
        let (records, stats) = read_rate_records(open(&rates)?, &rates)?;
        let (records, anomalies) = filter_anomalies(records);
        let labeled = select_labeled(&records);
        emit("ingest", "rates", "rows_read", stats.read);
        emit("ingest", "rates", "excluded", stats.excluded);
        emit("ingest", "rates", "superseded", stats.superseded);
        emit("ingest", "rates", "anomalies", anomalies);
        emit("ingest", "labels", "complete_triples", labeled.len());
        if labeled.is_empty() {
            return Err(Error::Missing("no complete (N, P2O5, K2O) label triples".into()));
        }
        write_labeled(create(&dir.join("labels.csv"))?, &labeled)?;
        let registry = FeatureRegistry::standard();
        for n in Nutrient::ALL {
            let design = Design::build(&table, &registry, n)?;
            emit("ingest", n, "design_columns", design.encoded.column_names.len());
            design.write(create(&dir.join(format!("design_{n}.csv")))?)?;
        }
        Ok(())
    })
}

/// Labeled rows and the design rows they map to.
fn labeled_rows(design: &Design, labels: &[LabeledRow]) -> Result<Vec<usize>> {
    let index: BTreeMap<_, usize> = design.keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    labels
        .iter()
        .map(|l| {
            index
                .get(&l.key())
                .copied()
                .ok_or_else(|| Error::Missing(format!("feature row for {} {} {}", l.country, l.crop, l.year)))
        })
        .collect()
}

fn read_labels(cfg: &PipelineConfig) -> Result<Vec<LabeledRow>> {
    let path = artifact(cfg, "ingest", "labels.csv")?;
    read_labeled(open(&path)?, &path)
}

pub fn train(cfg: &PipelineConfig) -> Result<()> {
    let labels = read_labels(cfg)?;
    let table = read_features(cfg)?;
    let grid = cfg.train.search_grid()?;
    let registry = FeatureRegistry::standard();
    staged(cfg, "train", |dir| {
        let mut table_rows = Vec::new();
        let mut predictions = Vec::new();
        let mut selection = String::new();
        for n in Nutrient::ALL {
            let design = Design::build(&table, &registry, n)?;
            let rows = labeled_rows(&design, &labels)?;
            let x = design.encoded.matrix.select_rows(&rows)?;
            let y: Vec<f64> = labels.iter().map(|l| l.rate(n)).collect();
            let mut base = cfg.train.base.clone();
            base.seed = cfg.seed;
            let plan = CvPlan { k_outer: cfg.train.k_outer, k_inner: cfg.train.k_inner, seed: cfg.seed };
            let cv = nested_cv(&x, &y, &grid, &base, plan)?;
            emit("train", n, "cv_mae", cv.report.mae.mean);
            emit("train", n, "naive_mae", cv.naive.mae.mean);
            table_rows.push(TableRow { fertilizer: n.to_string(), model: cfg.train.model.clone(), report: cv.report });
            table_rows.push(TableRow { fertilizer: n.to_string(), model: "Naive".into(), report: cv.naive });

            // Production model: the most frequently selected outer-fold
            // config refit on every labeled row.
            let chosen = majority_config(&cv.selected).ok_or(Error::NoRows)?;
            selection.push_str(&format!(
                "[{n}]\n{}\n",
                toml::to_string(&chosen).map_err(|e| Error::invalid(e.to_string()))?
            ));
            let model = fit(&x, &y, &chosen)?;
            std::fs::write(dir.join(model_file(n)), model.to_text())?;
            let pred = model.predict_matrix(&design.encoded.matrix)?;
            let mut clamped = 0;
            for ((country, crop, year), p) in design.keys.iter().zip(pred) {
                if p < 0.0 {
                    clamped += 1;
                }
                predictions.push(RateRecord { country: country.clone(), crop: *crop, year: *year, nutrient: n, rate: p.max(0.0) });
            }
            emit("train", n, "clamped_negative", clamped);
        }
        write_metrics_table(create(&dir.join("metrics.csv"))?, &table_rows)?;
        std::fs::write(dir.join("selected.toml"), selection)?;
        predictions.sort_by(|a, b| (&a.country, a.crop, a.year, a.nutrient).cmp(&(&b.country, b.crop, b.year, b.nutrient)));
        write_rates(create(&dir.join("predictions.csv"))?, &predictions)
    })
}

pub fn explain(cfg: &PipelineConfig) -> Result<()> {
    let labels = read_labels(cfg)?;
    let table = read_features(cfg)?;
    let models: Vec<PathBuf> = Nutrient::ALL.iter().map(|&n| artifact(cfg, "train", &model_file(n))).collect::<Result<_>>()?;
    let registry = FeatureRegistry::standard();
    staged(cfg, "explain", |dir| {
        let mut report = String::from("# SHAP values computed on all labeled rows\n");
        for (n, path) in Nutrient::ALL.iter().zip(&models) {
            let model = TreeEnsemble::from_text(&std::fs::read_to_string(path)?)?;
            let design = Design::build(&table, &registry, *n)?;
            let rows = labeled_rows(&design, &labels)?;
            let x = design.encoded.matrix.select_rows(&rows)?;
            let shap = explain_rows(&model, &x)?;
            let grouped = shap
                .par_iter()
                .map(|s| aggregate_groups(s, &design.encoded.grouping))
                .collect::<Result<Vec<_>>>()?;
            write_shap_matrix(create(&dir.join(format!("shap_{n}.csv")))?, &grouped)?;
            let groups = design.encoded.grouping.groups();
            let values: Vec<Vec<f64>> = grouped.iter().map(|g| g.values.clone()).collect();
            let mut ranking = importance_ranking(&groups, &values)?;
            ranking.truncate(10);
            let category = |g: &str| registry.category(g).map(|c| c.as_str().to_string());
            write_ranking(create(&dir.join(format!("ranking_{n}.csv")))?, &ranking, category)?;
            let raw: Vec<Vec<f64>> = shap.iter().map(|s| s.values.clone()).collect();
            let inputs: Vec<Vec<f64>> = x.rows().map(<[f64]>::to_vec).collect();
            write_beeswarm(create(&dir.join(format!("beeswarm_{n}.csv")))?, &design.encoded.column_names, &raw, &inputs)?;
            report.push_str(&format!("{n}: {} rows, top feature {}\n", rows.len(), ranking.first().map_or("NA", |r| r.0.as_str())));
            emit("explain", n, "rows", rows.len());
        }
        std::fs::write(dir.join("report.txt"), report)?;
        Ok(())
    })
}

pub fn shares(cfg: &PipelineConfig) -> Result<()> {
    let areas_path = cfg.input("share_areas", &cfg.inputs.share_areas)?;
    let obs_path = cfg.input("share_observations", &cfg.inputs.share_observations)?;
    let rules_dir = cfg.input("share_rules", &cfg.inputs.share_rules)?;
    staged(cfg, "shares", |dir| {
        let areas = read_areas(open(&areas_path)?, &areas_path)?;
        let observations = read_observations(open(&obs_path)?, &obs_path)?;
        let rules = load_rules_dir(&rules_dir)?;
        let data = RuleData { areas: &areas, observations: &observations };
        let mut outputs = Vec::new();
        for rule in &rules {
            outputs.extend(apply_country_rule(rule, &data)?);
        }
        let rows = share_rows(&outputs);
        emit("shares", "-", "countries", rules.len());
        emit("shares", "-", "clamped", rows.iter().filter(|r| r.point.clamped).count());
        write_share_table(create(&dir.join("shares.csv"))?, &rows)
    })
}

pub fn adjust(cfg: &PipelineConfig) -> Result<()> {
    let pred_path = artifact(cfg, "train", "predictions.csv")?;
    let shares_path = artifact(cfg, "shares", "shares.csv")?;
    let budgets_path = cfg.input("budgets", &cfg.inputs.budgets)?;
    let areas_path = cfg.input("national_areas", &cfg.inputs.national_areas)?;
    let years = cfg.years()?.to_vec();
    staged(cfg, "adjust", |dir| {
        let predictions = read_rates(open(&pred_path)?, &pred_path)?;
        let shares: BTreeMap<_, _> = read_share_table(open(&shares_path)?, &shares_path)?
            .into_iter()
            .map(|r| ((r.country, r.nutrient, r.point.year), r.point.share))
            .collect();
        let totals: Vec<_> = read_budget_totals(open(&budgets_path)?, &budgets_path)?
            .into_iter()
            .filter(|b| years.contains(&b.year))
            .collect();
        let areas = read_national_areas(open(&areas_path)?, &areas_path)?;
        let budgets = build_budgets(&totals, &shares)?;
        let adjusted = reconcile_all(&predictions, &areas, &budgets)?;
        for b in &budgets {
            let crop_t: f64 = adjusted
                .iter()
                .filter(|a| (&a.country, a.nutrient, a.year) == (&b.country, b.nutrient, b.year))
                .map(|a| a.rate_adjusted * areas.get(&(a.country.clone(), a.crop, a.year)).copied().unwrap_or(0.0) / 1000.0)
                .sum();
            emit("adjust", format!("{}/{}/{}", b.country, b.nutrient, b.year), "budget_residual_t", crop_t - b.net_budget);
        }
        write_budgets(create(&dir.join("budgets_net.csv"))?, &budgets)?;
        write_adjusted(create(&dir.join("adjusted_rates.csv"))?, &adjusted)
    })
}

pub fn downscale(cfg: &PipelineConfig) -> Result<()> {
    let adj_path = artifact(cfg, "adjust", "adjusted_rates.csv")?;
    let raster_dir = cfg.input("rasters", &cfg.inputs.rasters)?;
    let areas_path = cfg.input("national_areas", &cfg.inputs.national_areas)?;
    let years = cfg.years()?.to_vec();
    staged(cfg, "downscale", |dir| {
        let rates = rate_table(&read_adjusted(open(&adj_path)?, &adj_path)?);
        let national = read_national_areas(open(&areas_path)?, &areas_path)?;
        let inputs = DownscaleInputs::load(&raster_dir, &years)?;
        if let Some(g) = &cfg.grid {
            if &g.spec()? != inputs.spec() {
                return Err(Error::Config(format!("rasters in {} are not on the configured grid", raster_dir.display())));
            }
        }
        let (manifest, reports) = downscale_to_dir(&inputs, &years, &national, &rates, dir)?;
        for r in &reports {
            emit("downscale", r.year, "pre_capped_cells", r.pre_capped);
            emit("downscale", r.year, "align_rounds", r.align.rounds);
            emit("downscale", r.year, "align_capped_cells", r.align.capped);
        }
        emit("downscale", "-", "rasters", manifest.len());
        write_manifest(create(&dir.join("manifest.csv"))?, &manifest)
    })
}

pub fn validate(cfg: &PipelineConfig) -> Result<()> {
    let adj_path = artifact(cfg, "adjust", "adjusted_rates.csv")?;
    let ref_path = cfg.input("reference", &cfg.inputs.reference)?;
    staged(cfg, "validate", |dir| {
        let predictions: Vec<RateRecord> = read_adjusted(open(&adj_path)?, &adj_path)?
            .into_iter()
            .map(|a| RateRecord { country: a.country, crop: a.crop, year: a.year, nutrient: a.nutrient, rate: a.rate_adjusted })
            .collect();
        let reference = read_reference(open(&ref_path)?, &ref_path)?;
        for (c, k) in uncovered(&predictions, &reference) {
            emit("validate", format!("{c}/{}", k.file_name()), "uncovered", 1);
        }
        let (rows, points) = compare(&predictions, &reference)?;
        for r in &rows {
            emit("validate", format!("{}/{}/{}", r.country, r.crop.file_name(), r.measure), "mae", r.mae);
        }
        write_validation_csv(create(&dir.join("validation.csv"))?, &rows)?;
        let mut txt = create(&dir.join("validation.txt"))?;
        txt.write_all(format_validation_table(&rows)?.as_bytes())?;
        txt.flush()?;
        write_comparison(create(&dir.join("comparison.csv"))?, &points)
    })
}
