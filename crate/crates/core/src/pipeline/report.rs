//! Metric evaluation over directories of predicted and ground-truth masks.
//!
//! Both directories use the dataset layout: `domain<k>/masks_cup/*.png` and
//! `domain<k>/masks_disc/*.png`. A directory with `masks_cup/` or
//! `masks_disc/` at its top level is treated as a single domain named `all`.
//! Every ground-truth mask needs a prediction with the same relative path.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics;
use crate::pipeline::dataset::{domain_dir_name, domain_ids, is_image_file, read_dir_sorted};
use crate::pipeline::imageio;
use crate::types::StructureLabel;

/// Why HD/ASD are missing for an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptyFlag {
    EmptyPrediction,
    EmptyTruth,
    EmptyBoth,
}

impl EmptyFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            EmptyFlag::EmptyPrediction => "empty_prediction",
            EmptyFlag::EmptyTruth => "empty_truth",
            EmptyFlag::EmptyBoth => "empty_both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageMetrics {
    pub domain: String,
    pub image: String,
    pub label: StructureLabel,
    /// Fraction in `[0, 1]`.
    pub dsc: f64,
    pub hd: Option<f64>,
    pub asd: Option<f64>,
    pub flag: Option<EmptyFlag>,
}

/// Mean over images; HD/ASD means skip flagged images.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub domain: String,
    pub label: StructureLabel,
    pub dsc: f64,
    pub hd: Option<f64>,
    pub asd: Option<f64>,
    pub images: usize,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    pub images: Vec<ImageMetrics>,
    pub domains: Vec<Aggregate>,
    /// Per structure, the mean of the per-domain means.
    pub average: Vec<Aggregate>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn domain_dirs(root: &Path) -> Result<Vec<(String, PathBuf)>> {
    if !root.is_dir() {
        return Err(Error::MissingDirectory(root.to_path_buf()));
    }
    let ids = domain_ids(root)?;
    if ids.is_empty() {
        return Ok(vec![("all".to_string(), root.to_path_buf())]);
    }
    Ok(ids
        .into_iter()
        .map(|id| (domain_dir_name(id), root.join(domain_dir_name(id))))
        .collect())
}

/// DSC for one mask pair, `(hd, asd)` when both masks are non-empty, and the
/// empty-mask flag otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub dsc: f64,
    pub distances: Option<(f64, f64)>,
    pub flag: Option<EmptyFlag>,
}

pub fn evaluate_pair(truth_path: &Path, pred_path: &Path, label: StructureLabel) -> Result<PairScore> {
    let truth = imageio::decode_mask(truth_path, label)?;
    let pred = imageio::decode_mask(pred_path, label)?;
    let dsc = metrics::dice(&truth, &pred).map_err(|e| e.in_file(pred_path))?;
    let flag = match (truth.is_empty(), pred.is_empty()) {
        (false, false) => None,
        (false, true) => Some(EmptyFlag::EmptyPrediction),
        (true, false) => Some(EmptyFlag::EmptyTruth),
        (true, true) => Some(EmptyFlag::EmptyBoth),
    };
    if flag.is_some() {
        return Ok(PairScore {
            dsc,
            distances: None,
            flag,
        });
    }
    let report = metrics::evaluate(&truth, &pred).map_err(|e| e.in_file(pred_path))?;
    Ok(PairScore {
        dsc,
        distances: Some((report.hd, report.asd)),
        flag: None,
    })
}

/// Evaluates every ground-truth mask under `truth_dir` against its
/// counterpart under `pred_dir`.
pub fn run_metrics(pred_dir: &Path, truth_dir: &Path) -> Result<MetricsTable> {
    let mut images = Vec::new();
    for (domain, truth_domain) in domain_dirs(truth_dir)? {
        let pred_domain = if truth_domain == truth_dir {
            pred_dir.to_path_buf()
        } else {
            pred_dir.join(&domain)
        };
        for label in StructureLabel::ALL {
            let truth_masks = truth_domain.join(label.mask_dir());
            if !truth_masks.is_dir() {
                continue;
            }
            for truth_path in read_dir_sorted(&truth_masks)?.into_iter().filter(|p| is_image_file(p)) {
                let name = truth_path.file_name().expect("listed file has a name");
                let pred_path = pred_domain.join(label.mask_dir()).join(name);
                if !pred_path.is_file() {
                    return Err(Error::MissingCounterpartFile(pred_path));
                }
                let PairScore { dsc, distances, flag } = evaluate_pair(&truth_path, &pred_path, label)?;
                images.push(ImageMetrics {
                    domain: domain.clone(),
                    image: name.to_string_lossy().into_owned(),
                    label,
                    dsc,
                    hd: distances.map(|d| d.0),
                    asd: distances.map(|d| d.1),
                    flag,
                });
            }
        }
    }
    Ok(aggregate(images))
}

/// Builds per-domain means and the across-domain average from per-image rows.
pub fn aggregate(images: Vec<ImageMetrics>) -> MetricsTable {
    let mut domain_names: Vec<&str> = Vec::new();
    for m in &images {
        if !domain_names.contains(&m.domain.as_str()) {
            domain_names.push(&m.domain);
        }
    }
    let mut domains = Vec::new();
    for label in StructureLabel::ALL {
        for &domain in &domain_names {
            let rows: Vec<&ImageMetrics> = images
                .iter()
                .filter(|m| m.label == label && m.domain == domain)
                .collect();
            if rows.is_empty() {
                continue;
            }
            domains.push(Aggregate {
                domain: domain.to_string(),
                label,
                dsc: mean(rows.iter().map(|m| m.dsc)).expect("non-empty"),
                hd: mean(rows.iter().filter_map(|m| m.hd)),
                asd: mean(rows.iter().filter_map(|m| m.asd)),
                images: rows.len(),
                flagged: rows.iter().filter(|m| m.flag.is_some()).count(),
            });
        }
    }
    let average = StructureLabel::ALL
        .iter()
        .filter_map(|&label| {
            let per: Vec<&Aggregate> = domains.iter().filter(|a| a.label == label).collect();
            Some(Aggregate {
                domain: "average".to_string(),
                label,
                dsc: mean(per.iter().map(|a| a.dsc))?,
                hd: mean(per.iter().filter_map(|a| a.hd)),
                asd: mean(per.iter().filter_map(|a| a.asd)),
                images: per.iter().map(|a| a.images).sum(),
                flagged: per.iter().map(|a| a.flagged).sum(),
            })
        })
        .collect();
    MetricsTable {
        images,
        domains,
        average,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with one row per image and per aggregate. DSC is written as a percentage.
pub fn write_metrics_csv(table: &MetricsTable, path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["scope", "domain", "image", "structure", "dsc", "hd", "asd", "images", "note"])
        .map_err(csv_err)?;
    for m in &table.images {
        w.write_record([
            "image".to_string(),
            m.domain.clone(),
            m.image.clone(),
            m.label.to_string(),
            (m.dsc * 100.0).to_string(),
            fmt_opt(m.hd),
            fmt_opt(m.asd),
            "1".to_string(),
            m.flag.map(|f| f.as_str().to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    for (scope, rows) in [("domain", &table.domains), ("average", &table.average)] {
        for a in rows {
            w.write_record([
                scope.to_string(),
                a.domain.clone(),
                String::new(),
                a.label.to_string(),
                (a.dsc * 100.0).to_string(),
                fmt_opt(a.hd),
                fmt_opt(a.asd),
                a.images.to_string(),
                if a.flagged > 0 {
                    format!("{} flagged", a.flagged)
                } else {
                    String::new()
                },
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
