//! Synthetic fundus-like images for tests and demos: an orange-red retina with
//! smooth texture and a few dark vessels, a bright elliptical optic disc and a
//! brighter cup inside it. Each domain gets its own colour cast, brightness
//! and noise level so amplitude spectra differ across domains.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pipeline::dataset::{domain_dir_name, IMAGES_DIR};
use crate::pipeline::imageio;
use crate::types::{ImageTensor, SegmentationMask, Shape, StructureLabel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainStyle {
    pub tint: [f64; 3],
    pub brightness: f64,
    pub noise: f64,
}

/// Fixed appearance for domain `id`, cycling through four presets.
pub fn domain_style(id: usize) -> DomainStyle {
    const PRESETS: [DomainStyle; 4] = [
        DomainStyle { tint: [1.0, 0.55, 0.30], brightness: 0.85, noise: 0.03 },
        DomainStyle { tint: [0.80, 0.45, 0.35], brightness: 0.65, noise: 0.06 },
        DomainStyle { tint: [1.0, 0.70, 0.40], brightness: 1.0, noise: 0.02 },
        DomainStyle { tint: [0.90, 0.50, 0.20], brightness: 0.75, noise: 0.08 },
    ];
    PRESETS[id.saturating_sub(1) % PRESETS.len()]
}

#[derive(Debug, Clone)]
pub struct SyntheticFundus {
    pub image: ImageTensor,
    pub cup: SegmentationMask,
    pub disc: SegmentationMask,
}

struct Ellipse {
    cy: f64,
    cx: f64,
    ry: f64,
    rx: f64,
}

impl Ellipse {
    /// Normalized radius; `<= 1` inside.
    fn rho(&self, y: f64, x: f64) -> f64 {
        (((y - self.cy) / self.ry).powi(2) + ((x - self.cx) / self.rx).powi(2)).sqrt()
    }
}

/// Generates one RGB image of `height x width` with its cup and disc masks.
pub fn generate(rng: &mut ChaCha8Rng, height: usize, width: usize, style: &DomainStyle) -> Result<SyntheticFundus> {
    let (hf, wf) = (height as f64, width as f64);
    let size = hf.min(wf);
    let disc = Ellipse {
        cy: hf * rng.gen_range(0.4..0.6),
        cx: wf * rng.gen_range(0.4..0.6),
        ry: size * rng.gen_range(0.18..0.26),
        rx: size * rng.gen_range(0.16..0.24),
    };
    let cup_scale = rng.gen_range(0.4..0.65);
    let cup = Ellipse {
        cy: disc.cy + disc.ry * rng.gen_range(-0.1..0.1),
        cx: disc.cx + disc.rx * rng.gen_range(-0.1..0.1),
        ry: disc.ry * cup_scale,
        rx: disc.rx * cup_scale,
    };

    // Low-frequency texture: a handful of random plane waves.
    let waves: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(0.5..4.0) / hf,
                rng.gen_range(0.5..4.0) / wf,
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.01..0.04),
            )
        })
        .collect();
    let vessels: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.5..2.0)))
        .collect();
    let noise: Vec<f64> = (0..height * width).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let mut data = vec![0.0; 3 * height * width];
    let plane = height * width;
    let vignette_r = 0.75 * size;
    for y in 0..height {
        for x in 0..width {
            let (yf, xf) = (y as f64 + 0.5, x as f64 + 0.5);
            let r = ((yf - hf / 2.0).powi(2) + (xf - wf / 2.0).powi(2)).sqrt() / vignette_r;
            let mut base = 0.55 * (1.0 - 0.5 * r.min(1.4).powi(2)).max(0.1);
            base += waves
                .iter()
                .map(|&(fy, fx, ph, amp)| amp * (std::f64::consts::TAU * (fy * yf + fx * xf) + ph).sin())
                .sum::<f64>();

            // Vessels: dark curves radiating from the disc centre.
            let (dy, dx) = (yf - disc.cy, xf - disc.cx);
            let angle = dy.atan2(dx);
            let dist = (dy * dy + dx * dx).sqrt();
            let vessel = vessels
                .iter()
                .map(|&(a0, bend)| {
                    let target = a0 + bend * 0.002 * dist;
                    let mut d = (angle - target).rem_euclid(std::f64::consts::TAU);
                    if d > std::f64::consts::PI {
                        d = std::f64::consts::TAU - d;
                    }
                    (-(d * dist / 1.5).powi(2)).exp()
                })
                .fold(0.0, f64::max);
            base *= 1.0 - 0.35 * vessel * (dist / size).min(1.0);

            let disc_glow = (1.0 - disc.rho(yf, xf)).clamp(0.0, 1.0).sqrt();
            let cup_glow = (1.0 - cup.rho(yf, xf)).clamp(0.0, 1.0).sqrt();
            let n = noise[y * width + x] * style.noise;
            for c in 0..3 {
                let retina = base * style.tint[c];
                let bright = [0.35, 0.35, 0.25][c] * disc_glow + [0.1, 0.15, 0.2][c] * cup_glow;
                data[c * plane + y * width + x] = (style.brightness * (retina + bright) + n).clamp(0.0, 1.0);
            }
        }
    }
    let image = ImageTensor::from_shape(Shape::new(3, height, width)?, data)?;
    let inside = |e: &Ellipse, r: usize, c: usize| e.rho(r as f64 + 0.5, c as f64 + 0.5) <= 1.0;
    Ok(SyntheticFundus {
        image,
        cup: SegmentationMask::from_fn(height, width, StructureLabel::OpticCup, |r, c| inside(&cup, r, c))?,
        disc: SegmentationMask::from_fn(height, width, StructureLabel::OpticDisc, |r, c| inside(&disc, r, c))?,
    })
}

/// Writes `root/domain<k>/{images,masks_cup,masks_disc}/img<NNN>.png` for
/// `domains` domains of `per_domain` images each, `size = (height, width)`.
pub fn write_dataset(root: &Path, domains: usize, per_domain: usize, size: (usize, usize), seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for id in 1..=domains {
        let dir = root.join(domain_dir_name(id));
        let dirs = [
            dir.join(IMAGES_DIR),
            dir.join(StructureLabel::OpticCup.mask_dir()),
            dir.join(StructureLabel::OpticDisc.mask_dir()),
        ];
        for d in &dirs {
            fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        let style = domain_style(id);
        for i in 0..per_domain {
            let sample = generate(&mut rng, size.0, size.1, &style)?;
            let name = format!("img{i:03}.png");
            imageio::encode_image(&sample.image, &dirs[0].join(&name))?;
            imageio::encode_mask(&sample.cup, &dirs[1].join(&name))?;
            imageio::encode_mask(&sample.disc, &dirs[2].join(&name))?;
        }
    }
    Ok(())
}
