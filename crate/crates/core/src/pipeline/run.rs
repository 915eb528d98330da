//! Batch augmentation over ingested domains.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::augment::{self, AugmentParams, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::pipeline::dataset::{domain_dir_name, DatasetEntry, DomainDataset};
use crate::pipeline::imageio;
use crate::pipeline::lambda::LambdaMode;

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const DEFAULT_RESIZE: (usize, usize) = (256, 256);

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source_domains: Vec<usize>,
    pub target_domains: Vec<usize>,
    pub lambda_mode: LambdaMode,
    pub alpha: f64,
    pub seed: u64,
    /// `(height, width)` every image is resampled to before augmentation.
    pub resize: (usize, usize),
    pub output_dir: PathBuf,
    pub st_enabled: bool,
    pub low_freq_window: Option<f64>,
}

impl RunConfig {
    pub fn new(source_domains: Vec<usize>, target_domains: Vec<usize>, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            source_domains,
            target_domains,
            lambda_mode: LambdaMode::Uniform,
            alpha: DEFAULT_ALPHA,
            seed: 0,
            resize: DEFAULT_RESIZE,
            output_dir: output_dir.into(),
            st_enabled: true,
            low_freq_window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.source_domains.is_empty() || self.target_domains.is_empty() {
            return Err(Error::InvalidParameter(
                "source and target domain lists must be non-empty".into(),
            ));
        }
        self.lambda_mode.validate()?;
        self.validate_except_lambda()
    }

    fn validate_except_lambda(&self) -> Result<()> {
        if self.resize.0 == 0 || self.resize.1 == 0 {
            return Err(Error::InvalidParameter(format!(
                "resize must be positive, got {}x{}",
                self.resize.0, self.resize.1
            )));
        }
        // Lambda itself is checked per mode; reuse the parameter checks for alpha/window.
        AugmentParams {
            lambda: 1.0,
            alpha: self.alpha,
            st_enabled: self.st_enabled,
            low_freq_window: self.low_freq_window,
        }
        .validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub source: PathBuf,
    pub target: PathBuf,
    pub lambda: f64,
    /// Threshold fraction actually applied (0 when thresholding is off).
    pub alpha: f64,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub path: PathBuf,
    pub rows: Vec<ManifestRow>,
}

struct WorkItem<'a> {
    source: &'a DatasetEntry,
    source_domain: usize,
    target: &'a DatasetEntry,
    lambda: f64,
}

fn select<'a>(datasets: &'a [DomainDataset], ids: &[usize]) -> Result<Vec<(usize, &'a DatasetEntry)>> {
    let mut out = Vec::new();
    for &id in ids {
        let ds = datasets
            .iter()
            .find(|d| d.domain_id == id)
            .ok_or(Error::UnknownDomain(id))?;
        out.extend(ds.entries.iter().map(|e| (id, e)));
    }
    Ok(out)
}

/// For every source image (ordered by path) draws a target image uniformly
/// from the target domains and a lambda, then augments all pairs in parallel.
/// Outputs go to `output_dir/domain<k>/<stem>.png`; `manifest.csv` lists the
/// pairs in source-path order. The same seed gives identical files.
pub fn run_augmentation(config: &RunConfig, datasets: &[DomainDataset]) -> Result<Manifest> {
    config.validate()?;
    execute(config, datasets)
}

fn execute(config: &RunConfig, datasets: &[DomainDataset]) -> Result<Manifest> {
    config.validate_except_lambda()?;
    let mut sources = select(datasets, &config.source_domains)?;
    sources.sort_by(|a, b| a.1.image.cmp(&b.1.image));
    sources.dedup_by(|a, b| a.1.image == b.1.image);
    let targets = select(datasets, &config.target_domains)?;
    if targets.is_empty() {
        return Err(Error::InvalidParameter("target domains contain no images".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let work: Vec<WorkItem> = sources
        .iter()
        .map(|&(source_domain, source)| {
            let target = targets[rng.gen_range(0..targets.len())].1;
            let lambda = config.lambda_mode.sample(&mut rng);
            WorkItem {
                source,
                source_domain,
                target,
                lambda,
            }
        })
        .collect();

    let alpha = if config.st_enabled { config.alpha } else { 0.0 };
    let rows = work
        .par_iter()
        .map(|item| process(config, item, alpha))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    let path = config.output_dir.join(MANIFEST_FILE);
    write_manifest(&path, &rows)?;
    Ok(Manifest { path, rows })
}

fn load_resized(path: &Path, (h, w): (usize, usize)) -> Result<crate::types::ImageTensor> {
    let img = imageio::decode_image(path)?;
    imageio::resize_bilinear(&img, h, w).map_err(|e| e.in_file(path))
}

fn process(config: &RunConfig, item: &WorkItem, alpha: f64) -> Result<ManifestRow> {
    let source = load_resized(&item.source.image, config.resize)?;
    let target = load_resized(&item.target.image, config.resize)?;
    if source.channels() != target.channels() {
        return Err(Error::ShapeMismatch(format!(
            "source has {} channels, target {} has {}",
            source.channels(),
            item.target.image.display(),
            target.channels()
        ))
        .in_file(&item.source.image));
    }
    let params = AugmentParams {
        lambda: item.lambda,
        alpha,
        st_enabled: config.st_enabled,
        low_freq_window: config.low_freq_window,
    };
    let out = augment::augment(&source, &target, &params).map_err(|e| e.in_file(&item.source.image))?;

    let dir = config.output_dir.join(domain_dir_name(item.source_domain));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let output = dir.join(output_name(&item.source.image));
    imageio::encode_image(&out, &output)?;
    Ok(ManifestRow {
        source: item.source.image.clone(),
        target: item.target.image.clone(),
        lambda: item.lambda,
        alpha,
        output,
    })
}

/// `<stem>.png`, keeping a non-PNG extension in the stem so `a.png` and
/// `a.ppm` do not collide.
fn output_name(source: &Path) -> String {
    let stem = source.file_stem().unwrap_or_default().to_string_lossy();
    match source.extension().and_then(|e| e.to_str()) {
        Some(ext) if !ext.eq_ignore_ascii_case("png") => format!("{stem}_{ext}.png"),
        _ => format!("{stem}.png"),
    }
}

fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["source", "target", "lambda", "alpha", "output"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.source.display().to_string(),
            r.target.display().to_string(),
            r.lambda.to_string(),
            r.alpha.to_string(),
            r.output.display().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::dataset::ingest;
    use crate::synthetic;

    fn dataset(seed: u64) -> (tempfile::TempDir, Vec<DomainDataset>) {
        let dir = tempfile::tempdir().unwrap();
        synthetic::write_dataset(&dir.path().join("data"), 3, 2, (20, 24), seed).unwrap();
        let ds = ingest(&dir.path().join("data")).unwrap();
        (dir, ds)
    }

    #[test]
    fn zero_lambda_reproduces_resized_sources() {
        let (dir, ds) = dataset(1);
        let mut config = RunConfig::new(vec![1], vec![2, 3], dir.path().join("out"));
        config.lambda_mode = LambdaMode::Fixed(0.0);
        config.st_enabled = false;
        config.resize = (16, 16);
        assert!(run_augmentation(&config, &ds).is_err());
        let manifest = execute(&config, &ds).unwrap();
        assert_eq!(manifest.rows.len(), 2);
        for row in &manifest.rows {
            let expected = load_resized(&row.source, (16, 16)).unwrap();
            let got = imageio::decode_image(&row.output).unwrap();
            for (a, b) in got.data().iter().zip(expected.data()) {
                assert!((a - b).abs() <= 1.0 / 255.0 + 1e-12);
            }
        }
    }

    #[test]
    fn unknown_domain_is_rejected() {
        let (dir, ds) = dataset(2);
        let config = RunConfig::new(vec![1], vec![9], dir.path().join("out"));
        assert!(matches!(run_augmentation(&config, &ds), Err(Error::UnknownDomain(9))));
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(vec![], vec![1], "out");
        assert!(c.validate().is_err());
        c.source_domains = vec![1];
        assert!(c.validate().is_ok());
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        c.alpha = 0.05;
        c.resize = (0, 4);
        assert!(c.validate().is_err());
        c.resize = (4, 4);
        c.lambda_mode = LambdaMode::Fixed(0.0);
        assert!(c.validate().is_err());
    }
}
