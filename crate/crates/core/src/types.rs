//! Shared value types: spatial images, complex spectra, polar spectra,
//! per-channel thresholds and binary segmentation masks.
//!
//! All arrays are stored row-major in `(channel, row, column)` order and are
//! immutable once constructed.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dimensions of a `C x H x W` array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub fn new(channels: usize, height: usize, width: usize) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::DimensionMismatch(format!(
                "all dimensions must be positive, got {channels}x{height}x{width}"
            )));
        }
        Ok(Shape {
            channels,
            height,
            width,
        })
    }

    pub fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of elements in one channel plane.
    pub fn plane(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn index(&self, c: usize, h: usize, w: usize) -> usize {
        (c * self.height + h) * self.width + w
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{self} needs {} values, got {len}",
                self.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.channels, self.height, self.width)
    }
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteValue { index }),
        None => Ok(()),
    }
}

/// Real-valued spatial image.
///
/// Construction checks dimensions and finiteness only, so unclamped
/// augmentation results are representable. [`ImageTensor::validate`] adds the
/// `[0, 1]` pixel range check that decoded images satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    shape: Shape,
    data: Vec<f64>,
}

impl ImageTensor {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_shape(Shape::new(channels, height, width)?, data)
    }

    pub fn from_shape(shape: Shape, data: Vec<f64>) -> Result<Self> {
        shape.check_len(data.len())?;
        check_finite(&data)?;
        Ok(ImageTensor { shape, data })
    }

    pub fn filled(shape: Shape, value: f64) -> Result<Self> {
        Self::from_shape(shape, vec![value; shape.len()])
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(shape.len());
        for c in 0..shape.channels {
            for h in 0..shape.height {
                for w in 0..shape.width {
                    data.push(f(c, h, w));
                }
            }
        }
        Self::from_shape(shape, data)
    }

    /// Full invariant check, including the decoded pixel range.
    pub fn validate(&self) -> Result<()> {
        self.shape.check_len(self.data.len())?;
        check_finite(&self.data)?;
        match self.data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            Some(index) => Err(Error::OutOfRangePixel {
                index,
                value: self.data[index],
            }),
            None => Ok(()),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn channels(&self) -> usize {
        self.shape.channels
    }

    pub fn height(&self) -> usize {
        self.shape.height
    }

    pub fn width(&self) -> usize {
        self.shape.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, c: usize, h: usize, w: usize) -> f64 {
        self.data[self.shape.index(c, h, w)]
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let plane = self.shape.plane();
        &self.data[c * plane..(c + 1) * plane]
    }

    /// Copy with every value clamped into `[0, 1]`.
    pub fn clamped(&self) -> ImageTensor {
        ImageTensor {
            shape: self.shape,
            data: self.data.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        }
    }

    /// Mean value of each channel.
    pub fn channel_means(&self) -> Vec<f64> {
        (0..self.channels())
            .map(|c| self.channel(c).iter().sum::<f64>() / self.shape.plane() as f64)
            .collect()
    }
}

/// Complex spectrum indexed `(channel, u, v)`, origin at index `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    shape: Shape,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::from_shape(Shape::new(channels, height, width)?, data)
    }

    pub fn from_shape(shape: Shape, data: Vec<Complex64>) -> Result<Self> {
        shape.check_len(data.len())?;
        if let Some(index) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Spectrum { shape, data })
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.check_len(self.data.len())?;
        if let Some(index) = self
            .data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(())
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, c: usize, u: usize, v: usize) -> Complex64 {
        self.data[self.shape.index(c, u, v)]
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from conjugate symmetry `X(u, v) = conj(X(-u, -v))`,
    /// relative to the largest magnitude (0 for an all-zero spectrum).
    pub fn hermitian_deviation(&self) -> f64 {
        let Shape {
            channels,
            height,
            width,
        } = self.shape;
        let mut worst = 0.0f64;
        for c in 0..channels {
            for u in 0..height {
                for v in 0..width {
                    let mirror = self.get(c, (height - u) % height, (width - v) % width);
                    worst = worst.max((self.get(c, u, v) - mirror.conj()).norm());
                }
            }
        }
        let scale = self.max_magnitude();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol
    }
}

/// Real `C x H x W` array of non-negative magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude {
    shape: Shape,
    data: Vec<f64>,
}

impl Amplitude {
    pub fn new(shape: Shape, data: Vec<f64>) -> Result<Self> {
        shape.check_len(data.len())?;
        check_finite(&data)?;
        if let Some(index) = data.iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeAmplitude {
                index,
                value: data[index],
            });
        }
        Ok(Amplitude { shape, data })
    }

    /// Skips the per-element checks; callers guarantee non-negative finite data.
    pub(crate) fn from_trusted(shape: Shape, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.len(), data.len());
        Amplitude { shape, data }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, c: usize, u: usize, v: usize) -> f64 {
        self.data[self.shape.index(c, u, v)]
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let plane = self.shape.plane();
        &self.data[c * plane..(c + 1) * plane]
    }
}

/// Polar form of a spectrum: magnitudes plus principal-value phases in `(-pi, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudePhase {
    pub amplitude: Amplitude,
    pub phase: Vec<f64>,
}

impl AmplitudePhase {
    pub fn new(amplitude: Amplitude, phase: Vec<f64>) -> Result<Self> {
        amplitude.shape().check_len(phase.len())?;
        check_finite(&phase)?;
        Ok(AmplitudePhase { amplitude, phase })
    }

    pub fn shape(&self) -> Shape {
        self.amplitude.shape()
    }

    pub fn phase_in_range(&self) -> bool {
        self.phase.iter().all(|&p| p > -PI && p <= PI)
    }
}

/// Per-channel soft thresholds, all finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector(Vec<f64>);

impl ThresholdVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        if let Some(i) = values.iter().position(|&t| t < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold {} for channel {i} is negative",
                values[i]
            )));
        }
        Ok(ThresholdVector(values))
    }

    pub fn zeros(channels: usize) -> Self {
        ThresholdVector(vec![0.0; channels])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureLabel {
    OpticCup,
    OpticDisc,
}

impl StructureLabel {
    pub const ALL: [StructureLabel; 2] = [StructureLabel::OpticCup, StructureLabel::OpticDisc];

    pub fn as_str(&self) -> &'static str {
        match self {
            StructureLabel::OpticCup => "optic_cup",
            StructureLabel::OpticDisc => "optic_disc",
        }
    }

    /// Mask directory name inside a domain directory.
    pub fn mask_dir(&self) -> &'static str {
        match self {
            StructureLabel::OpticCup => "masks_cup",
            StructureLabel::OpticDisc => "masks_disc",
        }
    }
}

impl fmt::Display for StructureLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Binary `H x W` mask for one anatomical structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationMask {
    height: usize,
    width: usize,
    data: Vec<u8>,
    label: StructureLabel,
}

impl SegmentationMask {
    pub fn new(height: usize, width: usize, data: Vec<u8>, label: StructureLabel) -> Result<Self> {
        let mask = SegmentationMask {
            height,
            width,
            data,
            label,
        };
        mask.validate()?;
        Ok(mask)
    }

    pub fn empty(height: usize, width: usize, label: StructureLabel) -> Result<Self> {
        Self::new(height, width, vec![0; height * width], label)
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        label: StructureLabel,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(u8::from(f(r, c)));
            }
        }
        Self::new(height, width, data, label)
    }

    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 {
            return Err(Error::DimensionMismatch(format!(
                "mask dimensions must be positive, got {}x{}",
                self.height, self.width
            )));
        }
        if self.data.len() != self.height * self.width {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mask needs {} values, got {}",
                self.height,
                self.width,
                self.height * self.width,
                self.data.len()
            )));
        }
        match self.data.iter().position(|&v| v > 1) {
            Some(index) => Err(Error::NonBinaryMask {
                index,
                value: self.data[index],
            }),
            None => Ok(()),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn label(&self) -> StructureLabel {
        self.label
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn is_set(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col] == 1
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }
}
