//! Amplitude-spectrum mixing augmentation, with optional soft thresholding of
//! the target amplitude.
//!
//! An augmented image keeps the phase of the source and takes a convex
//! combination of the source and target amplitudes:
//!
//! ```text
//! A_mix = (1 - lambda) * A_src + lambda * S(A_tgt, T),   T_c = alpha * max(A_tgt[c])
//! ```
//!
//! where `S(a, t) = sign(a) * max(|a| - t, 0)`. With thresholding disabled
//! `S` is the identity. Outputs are not clamped; callers clamp at encode time.

use crate::error::{Error, Result};
use crate::fourier::{self, Reconstruction};
use crate::types::{Amplitude, ImageTensor, Shape, ThresholdVector};

/// Threshold fraction selected by grid search: 5% of the per-channel peak amplitude.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentParams {
    /// Mixing strength; 1 swaps the amplitude entirely.
    pub lambda: f64,
    /// Threshold as a fraction of the target's per-channel peak amplitude.
    pub alpha: f64,
    pub st_enabled: bool,
    /// Restrict mixing to a centred low-frequency square whose side is this
    /// fraction of each image dimension. `None` mixes the full spectrum.
    pub low_freq_window: Option<f64>,
}

impl AugmentParams {
    pub fn new(lambda: f64, alpha: f64, st_enabled: bool) -> Result<Self> {
        let params = AugmentParams {
            lambda,
            alpha,
            st_enabled,
            low_freq_window: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// Plain amplitude mixing, no thresholding.
    pub fn fdg(lambda: f64) -> Result<Self> {
        Self::new(lambda, 0.0, false)
    }

    /// Mixing with the soft-thresholded target amplitude.
    pub fn fdg_st(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(lambda, alpha, true)
    }

    pub fn with_low_freq_window(mut self, fraction: f64) -> Result<Self> {
        self.low_freq_window = Some(fraction);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be in (0, 1], got {}",
                self.lambda
            )));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in [0, 1), got {}",
                self.alpha
            )));
        }
        if let Some(f) = self.low_freq_window {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "low-frequency window fraction must be in (0, 1], got {f}"
                )));
            }
        }
        Ok(())
    }
}

/// `max(A - T_c, 0)` per channel; amplitudes are non-negative so the sign term is 1.
pub fn soft_threshold(amplitude: &Amplitude, thresholds: &ThresholdVector) -> Result<Amplitude> {
    let shape = amplitude.shape();
    if thresholds.len() != shape.channels {
        return Err(Error::ChannelCountMismatch {
            expected: shape.channels,
            got: thresholds.len(),
        });
    }
    let plane = shape.plane();
    let mut out = Vec::with_capacity(shape.len());
    for (channel, &t) in amplitude.data().chunks_exact(plane).zip(thresholds.values()) {
        out.extend(channel.iter().map(|&a| shrink(a, t)));
    }
    Ok(Amplitude::from_trusted(shape, out))
}

/// Scalar soft-threshold operator `sign(x) * max(|x| - t, 0)`.
#[inline]
pub fn shrink(x: f64, t: f64) -> f64 {
    let mag = (x.abs() - t).max(0.0);
    if x < 0.0 {
        -mag
    } else {
        mag
    }
}

/// `T_c = alpha * max_{u,v} A(c, u, v)`, independently per channel.
pub fn compute_thresholds(target: &Amplitude, alpha: f64) -> Result<ThresholdVector> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in [0, 1), got {alpha}"
        )));
    }
    let shape = target.shape();
    let values = (0..shape.channels)
        .map(|c| alpha * target.channel(c).iter().copied().fold(0.0, f64::max))
        .collect();
    ThresholdVector::new(values)
}

/// `(1 - lambda) * source + lambda * target`, elementwise. `lambda = 0` is accepted.
pub fn mix_amplitudes(source: &Amplitude, target: &Amplitude, lambda: f64) -> Result<Amplitude> {
    check_same_shape(source.shape(), target.shape())?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be in [0, 1], got {lambda}"
        )));
    }
    let data = source
        .data()
        .iter()
        .zip(target.data())
        .map(|(&s, &t)| (1.0 - lambda) * s + lambda * t)
        .collect();
    Ok(Amplitude::from_trusted(source.shape(), data))
}

/// Like [`mix_amplitudes`] but only inside a low-frequency square of side
/// `fraction * dim` around the zero frequency; outside it the source amplitude
/// is kept. Frequencies are measured as `min(k, N - k)`, so the window is
/// symmetric under `k -> N - k` and real images stay real.
pub fn mix_amplitudes_windowed(
    source: &Amplitude,
    target: &Amplitude,
    lambda: f64,
    fraction: f64,
) -> Result<Amplitude> {
    let mixed = mix_amplitudes(source, target, lambda)?;
    let shape = source.shape();
    let half_h = (fraction * shape.height as f64 / 2.0).floor() as usize;
    let half_w = (fraction * shape.width as f64 / 2.0).floor() as usize;
    let mut data = mixed.into_data();
    for c in 0..shape.channels {
        for u in 0..shape.height {
            let fu = u.min(shape.height - u);
            for v in 0..shape.width {
                let fv = v.min(shape.width - v);
                if fu > half_h || fv > half_w {
                    let i = shape.index(c, u, v);
                    data[i] = source.data()[i];
                }
            }
        }
    }
    Ok(Amplitude::from_trusted(shape, data))
}

fn check_same_shape(a: Shape, b: Shape) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!("{a} vs {b}")));
    }
    Ok(())
}

/// Intermediate products of one augmentation, for inspection and testing.
#[derive(Debug, Clone)]
pub struct AugmentTrace {
    pub thresholds: ThresholdVector,
    pub mixed_amplitude: Amplitude,
    pub reconstruction: Reconstruction,
}

/// Runs the full augmentation and returns the intermediate amplitudes with the
/// inverse transform. `params.lambda` may be 0 here.
pub fn augment_traced(
    source: &ImageTensor,
    target: &ImageTensor,
    params: &AugmentParams,
) -> Result<AugmentTrace> {
    check_same_shape(source.shape(), target.shape())?;
    let src = fourier::decompose(&fourier::dft2(source));
    let tgt = fourier::amplitude(&fourier::dft2(target));

    let (thresholds, tgt) = if params.st_enabled {
        let t = compute_thresholds(&tgt, params.alpha)?;
        let filtered = soft_threshold(&tgt, &t)?;
        (t, filtered)
    } else {
        (ThresholdVector::zeros(source.channels()), tgt)
    };

    let mixed = match params.low_freq_window {
        Some(fraction) => mix_amplitudes_windowed(&src.amplitude, &tgt, params.lambda, fraction)?,
        None => mix_amplitudes(&src.amplitude, &tgt, params.lambda)?,
    };
    let spectrum = fourier::recompose_parts(&mixed, &src.phase)?;
    let reconstruction = fourier::idft2(&spectrum)?;
    Ok(AugmentTrace {
        thresholds,
        mixed_amplitude: mixed,
        reconstruction,
    })
}

/// Amplitude mixing without thresholding; ignores `params.alpha`.
pub fn fdg_augment(
    source: &ImageTensor,
    target: &ImageTensor,
    params: &AugmentParams,
) -> Result<ImageTensor> {
    let params = AugmentParams {
        st_enabled: false,
        ..*params
    };
    Ok(augment_traced(source, target, &params)?.reconstruction.image)
}

/// Amplitude mixing with the soft-thresholded target amplitude.
pub fn fdg_st_augment(
    source: &ImageTensor,
    target: &ImageTensor,
    params: &AugmentParams,
) -> Result<ImageTensor> {
    let params = AugmentParams {
        st_enabled: true,
        ..*params
    };
    Ok(augment_traced(source, target, &params)?.reconstruction.image)
}

/// Dispatches on `params.st_enabled`.
pub fn augment(
    source: &ImageTensor,
    target: &ImageTensor,
    params: &AugmentParams,
) -> Result<ImageTensor> {
    Ok(augment_traced(source, target, params)?.reconstruction.image)
}
