use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pipeline::imageio;
use crate::types::StructureLabel;

pub const IMAGES_DIR: &str = "images";

/// One image with its optional structure masks (same file name in the mask directories).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub image: PathBuf,
    pub cup_mask: Option<PathBuf>,
    pub disc_mask: Option<PathBuf>,
    pub width: u32,
    pub height: u32,
}

impl DatasetEntry {
    pub fn mask(&self, label: StructureLabel) -> Option<&Path> {
        match label {
            StructureLabel::OpticCup => self.cup_mask.as_deref(),
            StructureLabel::OpticDisc => self.disc_mask.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDataset {
    /// 1-based domain number, taken from the `domain<N>` directory name.
    pub domain_id: usize,
    pub root: PathBuf,
    pub entries: Vec<DatasetEntry>,
}

impl DomainDataset {
    pub fn name(&self) -> String {
        domain_dir_name(self.domain_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn domain_dir_name(id: usize) -> String {
    format!("domain{id}")
}

/// Parses `domain<N>` with `N >= 1`.
pub fn parse_domain_dir(name: &str) -> Option<usize> {
    let digits = name.strip_prefix("domain")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&n| n >= 1)
}

pub(crate) fn read_dir_sorted(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        paths.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    paths.sort();
    Ok(paths)
}

pub(crate) fn is_image_file(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "ppm" | "pgm" | "pnm"))
}

/// Domain numbers present under `root`, ascending.
pub(crate) fn domain_ids(root: &Path) -> Result<Vec<usize>> {
    if !root.is_dir() {
        return Err(Error::MissingDirectory(root.to_path_buf()));
    }
    let mut ids: Vec<usize> = read_dir_sorted(root)?
        .iter()
        .filter(|p| p.is_dir())
        .filter_map(|p| p.file_name()?.to_str().and_then(parse_domain_dir))
        .collect();
    ids.sort_unstable();
    Ok(ids)
}

/// Loads `root/domain1 .. root/domainK`. Every domain directory from 1 to the
/// highest present number must exist and hold a non-empty `images/`
/// directory. Images are decoded to check them; masks must match their
/// image's dimensions.
pub fn ingest(root: &Path) -> Result<Vec<DomainDataset>> {
    let ids = domain_ids(root)?;
    let max = ids.last().copied().unwrap_or(0);
    if max == 0 {
        return Err(Error::MissingDirectory(root.join(domain_dir_name(1)).join(IMAGES_DIR)));
    }
    (1..=max).map(|id| ingest_domain(root, id)).collect()
}

fn ingest_domain(root: &Path, domain_id: usize) -> Result<DomainDataset> {
    let dir = root.join(domain_dir_name(domain_id));
    let images_dir = dir.join(IMAGES_DIR);
    if !images_dir.is_dir() {
        return Err(Error::MissingDirectory(images_dir));
    }
    let cup_dir = dir.join(StructureLabel::OpticCup.mask_dir());
    let disc_dir = dir.join(StructureLabel::OpticDisc.mask_dir());

    let mut entries = Vec::new();
    for image in read_dir_sorted(&images_dir)?.into_iter().filter(|p| is_image_file(p)) {
        let decoded = imageio::decode_image(&image)?;
        let (width, height) = (decoded.width() as u32, decoded.height() as u32);
        let name = image.file_name().expect("listed file has a name");
        let mut masks = [None, None];
        for (slot, mask_dir) in masks.iter_mut().zip([&cup_dir, &disc_dir]) {
            let candidate = mask_dir.join(name);
            if !candidate.is_file() {
                continue;
            }
            let (mask_w, mask_h) = imageio::image_dimensions(&candidate)?;
            if (mask_w, mask_h) != (width, height) {
                return Err(Error::MaskSizeMismatch {
                    path: candidate,
                    mask_w,
                    mask_h,
                    image_w: width,
                    image_h: height,
                });
            }
            *slot = Some(candidate);
        }
        let [cup_mask, disc_mask] = masks;
        entries.push(DatasetEntry {
            image,
            cup_mask,
            disc_mask,
            width,
            height,
        });
    }
    if entries.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} contains no PNG/PPM images",
            images_dir.display()
        )));
    }
    Ok(DomainDataset {
        domain_id,
        root: dir,
        entries,
    })
}
