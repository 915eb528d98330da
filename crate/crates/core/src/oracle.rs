//! Brute-force reference implementations.
//!
//! These evaluate the defining sums and set formulas literally and share no
//! code with the fast paths they check. They back the test suites and the
//! `selftest` command; they are far too slow for production use.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::types::{ImageTensor, SegmentationMask, Spectrum};

fn kernel(h: usize, u: usize, height: usize, w: usize, v: usize, width: usize, sign: f64) -> Complex64 {
    let phase = (h * u % height) as f64 / height as f64 + (w * v % width) as f64 / width as f64;
    Complex64::from_polar(1.0, sign * 2.0 * PI * phase)
}

/// Forward 2-D DFT by the full double sum, `O((HW)^2)` per channel.
pub fn direct_dft2(x: &ImageTensor) -> Vec<Complex64> {
    let (channels, height, width) = (x.channels(), x.height(), x.width());
    let mut out = Vec::with_capacity(channels * height * width);
    for c in 0..channels {
        for u in 0..height {
            for v in 0..width {
                out.push(direct_dft2_entry(x, c, u, v));
            }
        }
    }
    out
}

/// One forward coefficient `X(c, u, v)` by the full double sum.
pub fn direct_dft2_entry(x: &ImageTensor, c: usize, u: usize, v: usize) -> Complex64 {
    let (height, width) = (x.height(), x.width());
    let mut acc = Complex64::new(0.0, 0.0);
    for h in 0..height {
        for w in 0..width {
            acc += x.get(c, h, w) * kernel(h, u, height, w, v, width, -1.0);
        }
    }
    acc
}

/// Inverse 2-D DFT by the full double sum, including the `1/(HW)` factor.
/// Returns the complex result so callers can inspect the imaginary part.
pub fn direct_idft2(spectrum: &Spectrum) -> Vec<Complex64> {
    let shape = spectrum.shape();
    let (height, width) = (shape.height, shape.width);
    let scale = 1.0 / (height * width) as f64;
    let mut out = Vec::with_capacity(shape.len());
    for c in 0..shape.channels {
        for h in 0..height {
            for w in 0..width {
                let mut acc = Complex64::new(0.0, 0.0);
                for u in 0..height {
                    for v in 0..width {
                        acc += spectrum.get(c, u, v) * kernel(h, u, height, w, v, width, 1.0);
                    }
                }
                out.push(acc * scale);
            }
        }
    }
    out
}

fn direct_dft1(input: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = input.len();
    (0..n)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .map(|(j, x)| x * Complex64::from_polar(1.0, sign * 2.0 * PI * (j * k % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Direct (no fast algorithm) DFT over rows, then over columns.
///
/// The 2-D kernel factors as `exp(-2 pi i hu/H) exp(-2 pi i wv/W)`, so this is
/// the same double sum evaluated axis by axis, `O(HW(H+W))` per channel.
/// Used where the full double sum is too slow (256 x 256 planes).
pub fn separable_direct_dft2(data: &[Complex64], channels: usize, height: usize, width: usize, inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    let plane = height * width;
    let mut out = data.to_vec();
    for c in 0..channels {
        let ch = &mut out[c * plane..(c + 1) * plane];
        for r in 0..height {
            let row = direct_dft1(&ch[r * width..(r + 1) * width], sign);
            ch[r * width..(r + 1) * width].copy_from_slice(&row);
        }
        for col in 0..width {
            let column: Vec<Complex64> = (0..height).map(|r| ch[r * width + col]).collect();
            for (r, z) in direct_dft1(&column, sign).into_iter().enumerate() {
                ch[r * width + col] = z;
            }
        }
    }
    if inverse {
        let scale = 1.0 / plane as f64;
        for z in &mut out {
            *z *= scale;
        }
    }
    out
}

/// Amplitude mixing with optional soft thresholding of the target amplitude,
/// composed from the direct transforms. Returns the complex inverse so the
/// imaginary part is available.
pub fn augment_reference(source: &ImageTensor, target: &ImageTensor, lambda: f64, alpha: Option<f64>) -> Vec<Complex64> {
    let channels = source.channels();
    let plane = source.height() * source.width();
    let xs = direct_dft2(source);
    let xt = direct_dft2(target);
    let mut mixed = Vec::with_capacity(xs.len());
    for c in 0..channels {
        let range = c * plane..(c + 1) * plane;
        let max_t = xt[range.clone()].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let threshold = alpha.map_or(0.0, |a| a * max_t);
        for (zs, zt) in xs[range.clone()].iter().zip(&xt[range]) {
            let a_t = zt.norm();
            let a_t = match alpha {
                Some(_) => a_t.signum() * (a_t.abs() - threshold).max(0.0),
                None => a_t,
            };
            let a = (1.0 - lambda) * zs.norm() + lambda * a_t;
            let p = if zs.norm() == 0.0 { 0.0 } else { zs.arg() };
            mixed.push(Complex64::from_polar(a, p));
        }
    }
    let spec = Spectrum::from_shape(source.shape(), mixed).expect("finite spectrum");
    direct_idft2(&spec)
}

/// Foreground pixels with a background or out-of-bounds 4-neighbour, by
/// checking each neighbour explicitly. Row-major order.
pub fn boundary_points(mask: &SegmentationMask) -> Vec<(usize, usize)> {
    let (h, w) = (mask.height() as i64, mask.width() as i64);
    let on = |r: i64, c: i64| r >= 0 && c >= 0 && r < h && c < w && mask.is_set(r as usize, c as usize);
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if on(r, c) && [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)].iter().any(|&(a, b)| !on(a, b)) {
                out.push((r as usize, c as usize));
            }
        }
    }
    out
}

fn euclid(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dr = a.0 as f64 - b.0 as f64;
    let dc = a.1 as f64 - b.1 as f64;
    (dr * dr + dc * dc).sqrt()
}

/// `inf_{s in set} |p - s|` by exhaustive scan.
pub fn point_to_set(p: (usize, usize), set: &[(usize, usize)]) -> f64 {
    set.iter().map(|&s| euclid(p, s)).fold(f64::INFINITY, f64::min)
}

pub fn hausdorff(a: &[(usize, usize)], b: &[(usize, usize)]) -> f64 {
    let ab = a.iter().map(|&p| point_to_set(p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|&p| point_to_set(p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

pub fn average_surface_distance(a: &[(usize, usize)], b: &[(usize, usize)]) -> f64 {
    let ab: f64 = a.iter().map(|&p| point_to_set(p, b)).sum();
    let ba: f64 = b.iter().map(|&p| point_to_set(p, a)).sum();
    (ab + ba) / (a.len() + b.len()) as f64
}

/// Dice by explicit per-pixel case analysis; 1 when both masks are empty.
pub fn dice(truth: &SegmentationMask, pred: &SegmentationMask) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for r in 0..truth.height() {
        for c in 0..truth.width() {
            match (truth.is_set(r, c), pred.is_set(r, c)) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    if tp + fp + fn_ == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}
