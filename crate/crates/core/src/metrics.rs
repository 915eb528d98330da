//! Segmentation metrics between binary masks: Hausdorff distance, average
//! surface distance and the Dice similarity coefficient.
//!
//! Surfaces are the foreground pixels with at least one 4-neighbour that is
//! background or outside the image. Distances are Euclidean, in pixels.
//! Set-to-set distances come from an exact squared Euclidean distance
//! transform in integer arithmetic, so every distance is `sqrt` of the same
//! integer an exhaustive scan would produce.

use crate::error::{Error, Result};
use crate::types::{SegmentationMask, StructureLabel};

pub type Point = (usize, usize);

/// Surface pixels of a mask as `(row, col)`, in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPointSet {
    points: Vec<Point>,
}

impl BoundaryPointSet {
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        points.sort_unstable();
        points.dedup();
        Ok(BoundaryPointSet { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }
}

/// Per-structure evaluation result. `dsc` is a fraction in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub label: StructureLabel,
    pub dsc: f64,
    pub hd: f64,
    pub asd: f64,
}

pub fn extract_boundary(mask: &SegmentationMask) -> Result<BoundaryPointSet> {
    let (h, w) = (mask.height(), mask.width());
    let mut points = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if !mask.is_set(r, c) {
                continue;
            }
            let edge = r == 0
                || c == 0
                || r + 1 == h
                || c + 1 == w
                || !mask.is_set(r - 1, c)
                || !mask.is_set(r + 1, c)
                || !mask.is_set(r, c - 1)
                || !mask.is_set(r, c + 1);
            if edge {
                points.push((r, c));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyMask(format!("{} mask has no foreground", mask.label())));
    }
    Ok(BoundaryPointSet { points })
}

fn sq_dist(a: Point, b: Point) -> u64 {
    let dr = a.0.abs_diff(b.0) as u64;
    let dc = a.1.abs_diff(b.1) as u64;
    dr * dr + dc * dc
}

pub fn point_to_set_distance(p: Point, set: &BoundaryPointSet) -> Result<f64> {
    set.points
        .iter()
        .map(|&s| sq_dist(p, s))
        .min()
        .map(|d| (d as f64).sqrt())
        .ok_or(Error::EmptySet)
}

/// Fraction `num / den` with `den > 0`.
#[derive(Clone, Copy)]
struct Frac {
    num: i64,
    den: i64,
}

impl Frac {
    fn le(self, other: Frac) -> bool {
        self.num as i128 * other.den as i128 <= other.num as i128 * self.den as i128
    }

    fn lt_int(self, p: i64) -> bool {
        (self.num as i128) < p as i128 * self.den as i128
    }
}

/// Exact squared Euclidean distance transform over a `height x width` grid to
/// the given feature pixels. Every cell is finite when `features` is non-empty.
fn squared_edt(height: usize, width: usize, features: &[Point]) -> Vec<u64> {
    // Column pass: vertical distance to the nearest feature in the same column.
    let mut vertical: Vec<Option<i64>> = vec![None; height * width];
    let mut is_feature = vec![false; height * width];
    for &(r, c) in features {
        is_feature[r * width + c] = true;
    }
    for c in 0..width {
        let mut last: Option<usize> = None;
        for r in 0..height {
            if is_feature[r * width + c] {
                last = Some(r);
            }
            vertical[r * width + c] = last.map(|f| (r - f) as i64);
        }
        let mut next: Option<usize> = None;
        for r in (0..height).rev() {
            if is_feature[r * width + c] {
                next = Some(r);
            }
            if let Some(f) = next {
                let d = (f - r) as i64;
                let slot = &mut vertical[r * width + c];
                *slot = Some(slot.map_or(d, |cur| cur.min(d)));
            }
        }
    }

    // Row pass: lower envelope of parabolas (p - q)^2 + g(q)^2.
    let mut out = vec![0u64; height * width];
    let mut sites: Vec<i64> = Vec::with_capacity(width);
    let mut bounds: Vec<Option<Frac>> = Vec::with_capacity(width);
    for r in 0..height {
        let row = &vertical[r * width..(r + 1) * width];
        let f = |q: i64| {
            let g = row[q as usize].expect("site has a feature");
            g * g
        };
        sites.clear();
        bounds.clear();
        for q in 0..width as i64 {
            if row[q as usize].is_none() {
                continue;
            }
            loop {
                let Some(&v) = sites.last() else {
                    sites.push(q);
                    bounds.push(None);
                    break;
                };
                let s = Frac {
                    num: (f(q) + q * q) - (f(v) + v * v),
                    den: 2 * (q - v),
                };
                match bounds.last().copied().flatten() {
                    Some(z) if s.le(z) => {
                        sites.pop();
                        bounds.pop();
                    }
                    _ => {
                        sites.push(q);
                        bounds.push(Some(s));
                        break;
                    }
                }
            }
        }
        debug_assert!(!sites.is_empty(), "every row has a feature column after the column pass");
        let mut k = 0;
        for p in 0..width as i64 {
            while k + 1 < sites.len() && bounds[k + 1].is_some_and(|z| z.lt_int(p)) {
                k += 1;
            }
            let q = sites[k];
            out[r * width + p as usize] = ((p - q) * (p - q) + f(q)) as u64;
        }
    }
    out
}

/// Distances from every point of `from` to the set `to`, in `from` order.
fn directed_distances(from: &BoundaryPointSet, to: &BoundaryPointSet) -> Vec<f64> {
    let all = from.points.iter().chain(&to.points);
    let r0 = all.clone().map(|p| p.0).min().unwrap_or(0);
    let r1 = all.clone().map(|p| p.0).max().unwrap_or(0);
    let c0 = all.clone().map(|p| p.1).min().unwrap_or(0);
    let c1 = all.map(|p| p.1).max().unwrap_or(0);
    let (h, w) = (r1 - r0 + 1, c1 - c0 + 1);
    let local: Vec<Point> = to.points.iter().map(|&(r, c)| (r - r0, c - c0)).collect();
    let edt = squared_edt(h, w, &local);
    from.points
        .iter()
        .map(|&(r, c)| (edt[(r - r0) * w + (c - c0)] as f64).sqrt())
        .collect()
}

/// Symmetric Hausdorff distance `max(sup_y d(y, B), sup_b d(b, A))`.
pub fn hausdorff(a: &BoundaryPointSet, b: &BoundaryPointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let ab = directed_distances(a, b).into_iter().fold(0.0, f64::max);
    let ba = directed_distances(b, a).into_iter().fold(0.0, f64::max);
    Ok(ab.max(ba))
}

/// Mean over both sets of each point's distance to the other set.
pub fn average_surface_distance(a: &BoundaryPointSet, b: &BoundaryPointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let ab: f64 = directed_distances(a, b).iter().sum();
    let ba: f64 = directed_distances(b, a).iter().sum();
    Ok((ab + ba) / (a.len() + b.len()) as f64)
}

fn check_same_dims(a: &SegmentationMask, b: &SegmentationMask) -> Result<()> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// `2 TP / (2 TP + FP + FN)` over all pixels; 1 when both masks are empty.
pub fn dice(truth: &SegmentationMask, pred: &SegmentationMask) -> Result<f64> {
    check_same_dims(truth, pred)?;
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (&t, &p) in truth.data().iter().zip(pred.data()) {
        tp += u64::from(t & p);
        fp += u64::from(!t & p & 1);
        fn_ += u64::from(t & !p & 1);
    }
    if tp + fp + fn_ == 0 {
        return Ok(1.0);
    }
    Ok((2 * tp) as f64 / (2 * tp + fp + fn_) as f64)
}

/// All three metrics for one structure. Fails with `EmptyMask` if either
/// mask has no foreground.
pub fn evaluate(truth: &SegmentationMask, pred: &SegmentationMask) -> Result<MetricReport> {
    let dsc = dice(truth, pred)?;
    let yt = extract_boundary(truth)?;
    let yp = extract_boundary(pred)?;
    Ok(MetricReport {
        label: truth.label(),
        dsc,
        hd: hausdorff(&yt, &yp)?,
        asd: average_surface_distance(&yt, &yp)?,
    })
}
