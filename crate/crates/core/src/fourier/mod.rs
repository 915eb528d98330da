//! Per-channel 2-D discrete Fourier transform and polar decomposition.
//!
//! The forward transform is unnormalized and the inverse carries the
//! `1 / (H W)` factor. The zero frequency sits at index `(0, 0)`; nothing in
//! this module shifts the spectrum.

mod fft;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use fft::{Direction, FftPlan};

use crate::error::{Error, Result};
use crate::types::{Amplitude, AmplitudePhase, ImageTensor, Shape, Spectrum};

/// Default bound on the imaginary residual of an inverse transform, relative
/// to the largest output magnitude.
pub const IMAG_RESIDUAL_REL_TOL: f64 = 1e-6;

/// Result of an inverse transform: the real part plus the largest discarded
/// imaginary component.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub image: ImageTensor,
    pub max_imag_residual: f64,
    /// Largest modulus over the complex inverse output.
    pub max_magnitude: f64,
}

impl Reconstruction {
    /// Residual relative to the largest output magnitude (0 for a zero output).
    pub fn relative_residual(&self) -> f64 {
        if self.max_magnitude == 0.0 {
            0.0
        } else {
            self.max_imag_residual / self.max_magnitude
        }
    }
}

/// Columns gathered per pass so each one is contiguous while transformed.
const COLUMN_BLOCK: usize = 16;

/// Forward/inverse row and column plans for one image size.
#[derive(Debug, Clone)]
pub struct Fft2Plan {
    height: usize,
    width: usize,
    rows: FftPlan,
    cols: FftPlan,
}

impl Fft2Plan {
    pub fn new(height: usize, width: usize, direction: Direction) -> Self {
        Fft2Plan {
            height,
            width,
            rows: FftPlan::new(width, direction),
            cols: FftPlan::new(height, direction),
        }
    }

    /// Transforms every `H x W` plane of `data` in place (unnormalized).
    pub fn process(&self, data: &mut [Complex64]) {
        let plane = self.height * self.width;
        assert_eq!(data.len() % plane, 0, "data is not a whole number of planes");
        let mut scratch = Vec::new();
        let mut columns = vec![Complex64::new(0.0, 0.0); COLUMN_BLOCK * self.height];
        for channel in data.chunks_exact_mut(plane) {
            self.rows.process(channel, &mut scratch);
            if self.height == 1 {
                continue;
            }
            for w0 in (0..self.width).step_by(COLUMN_BLOCK) {
                let block = COLUMN_BLOCK.min(self.width - w0);
                for h in 0..self.height {
                    let row = &channel[h * self.width + w0..h * self.width + w0 + block];
                    for (b, &value) in row.iter().enumerate() {
                        columns[b * self.height + h] = value;
                    }
                }
                self.cols.process(&mut columns[..block * self.height], &mut scratch);
                for h in 0..self.height {
                    let row = &mut channel[h * self.width + w0..h * self.width + w0 + block];
                    for (b, slot) in row.iter_mut().enumerate() {
                        *slot = columns[b * self.height + h];
                    }
                }
            }
        }
    }
}

/// `X(c,u,v) = sum_h sum_w x(c,h,w) exp(-2 pi i (hu/H + wv/W))`.
pub fn dft2(image: &ImageTensor) -> Spectrum {
    let shape = image.shape();
    let mut data: Vec<Complex64> = image
        .data()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    Fft2Plan::new(shape.height, shape.width, Direction::Forward).process(&mut data);
    Spectrum::from_shape(shape, data).expect("forward transform of finite data is finite")
}

/// Inverse transform, returning the real part together with the imaginary residual.
pub fn idft2(spectrum: &Spectrum) -> Result<Reconstruction> {
    let shape = spectrum.shape();
    let mut data = spectrum.data().to_vec();
    Fft2Plan::new(shape.height, shape.width, Direction::Inverse).process(&mut data);
    let scale = 1.0 / shape.plane() as f64;
    let mut max_imag_residual = 0.0f64;
    let mut max_norm_sqr = 0.0f64;
    let real = data
        .iter()
        .map(|z| {
            let z = z * scale;
            max_imag_residual = max_imag_residual.max(z.im.abs());
            max_norm_sqr = max_norm_sqr.max(z.norm_sqr());
            z.re
        })
        .collect();
    Ok(Reconstruction {
        image: ImageTensor::from_shape(shape, real)?,
        max_imag_residual,
        max_magnitude: max_norm_sqr.sqrt(),
    })
}

/// Inverse transform that rejects spectra whose inverse is not real to within
/// `rel_tol` of the largest output magnitude.
pub fn idft2_strict(spectrum: &Spectrum, rel_tol: f64) -> Result<ImageTensor> {
    let rec = idft2(spectrum)?;
    let tolerance = rel_tol * rec.max_magnitude;
    if rec.max_imag_residual > tolerance {
        return Err(Error::ImaginaryResidualExceeded {
            residual: rec.max_imag_residual,
            tolerance,
        });
    }
    Ok(rec.image)
}

/// Principal angle of `z` in `(-pi, pi]`, with the angle of zero defined as 0.
pub fn principal_angle(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// `|X|` alone, for spectra whose phase is not needed.
pub fn amplitude(spectrum: &Spectrum) -> Amplitude {
    let data = spectrum.data().iter().map(|z| z.norm()).collect();
    Amplitude::from_trusted(spectrum.shape(), data)
}

pub fn decompose(spectrum: &Spectrum) -> AmplitudePhase {
    let shape = spectrum.shape();
    let amplitude = spectrum.data().iter().map(|z| z.norm()).collect();
    let phase = spectrum.data().iter().map(|&z| principal_angle(z)).collect();
    AmplitudePhase {
        amplitude: Amplitude::from_trusted(shape, amplitude),
        phase,
    }
}

/// Polar to rectangular: `A exp(+i P)`.
pub fn recompose(ap: &AmplitudePhase) -> Result<Spectrum> {
    recompose_parts(&ap.amplitude, &ap.phase)
}

/// [`recompose`] for an amplitude and a phase held separately, as when a
/// mixed amplitude is paired with the source phase.
pub fn recompose_parts(amplitude: &Amplitude, phase: &[f64]) -> Result<Spectrum> {
    let shape: Shape = amplitude.shape();
    if phase.len() != shape.len() {
        return Err(Error::ShapeMismatch(format!(
            "amplitude {shape} has {} entries but phase has {}",
            shape.len(),
            phase.len()
        )));
    }
    if let Some(index) = amplitude.data().iter().position(|&a| a < 0.0) {
        return Err(Error::NegativeAmplitude {
            index,
            value: amplitude.data()[index],
        });
    }
    let data = amplitude
        .data()
        .iter()
        .zip(phase)
        .map(|(&a, &p)| {
            let (s, c) = p.sin_cos();
            Complex64::new(a * c, a * s)
        })
        .collect();
    Spectrum::from_shape(shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> ImageTensor {
        let shape = Shape::new(c, h, w).unwrap();
        ImageTensor::from_fn(shape, |_, _, _| rng.gen()).unwrap()
    }

    fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_image_is_dc_only() {
        let (h, w) = (6, 10);
        let x = ImageTensor::filled(Shape::new(1, h, w).unwrap(), 0.7).unwrap();
        let spec = dft2(&x);
        let tol = 1e-9 * (h * w) as f64;
        assert!((spec.get(0, 0, 0) - Complex64::new(0.7 * (h * w) as f64, 0.0)).norm() < tol);
        for u in 0..h {
            for v in 0..w {
                if (u, v) != (0, 0) {
                    assert!(spec.get(0, u, v).norm() < tol);
                }
            }
        }
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let x = ImageTensor::from_fn(Shape::new(1, 5, 7).unwrap(), |_, h, w| {
            f64::from(h == 0 && w == 0)
        })
        .unwrap();
        for z in dft2(&x).data() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn random_8x8_matches_direct_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_image(&mut rng, 1, 8, 8);
        let fast = dft2(&x);
        let slow = oracle::direct_dft2(&x);
        assert!(max_abs_diff(fast.data(), &slow) <= 1e-9);
    }

    #[test]
    fn round_trip_3x16x16() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_image(&mut rng, 3, 16, 16);
        let back = idft2(&dft2(&x)).unwrap();
        for (a, b) in back.image.data().iter().zip(x.data()) {
            assert!((a - b).abs() <= 1e-9);
        }
        assert!(back.relative_residual() < 1e-12);
    }

    #[test]
    fn dc_inverse_is_constant_one() {
        let (h, w) = (4, 6);
        let mut data = vec![Complex64::new(0.0, 0.0); h * w];
        data[0] = Complex64::new((h * w) as f64, 0.0);
        let spec = Spectrum::new(1, h, w, data).unwrap();
        let rec = idft2(&spec).unwrap();
        assert!(rec.image.data().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn hermitian_8x8_inverse_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Hermitian spectrum built as the transform of a real image.
        let x = random_image(&mut rng, 1, 8, 8);
        let spec = Spectrum::new(1, 8, 8, oracle::direct_dft2(&x)).unwrap();
        assert!(spec.is_hermitian(1e-9));
        let fast = idft2(&spec).unwrap();
        let slow = oracle::direct_idft2(&spec);
        for (a, b) in fast.image.data().iter().zip(&slow) {
            assert!((a - b.re).abs() <= 1e-9);
        }
    }

    #[test]
    fn strict_inverse_rejects_non_hermitian() {
        let mut data = vec![Complex64::new(0.0, 0.0); 16];
        data[1] = Complex64::new(1.0, 0.0);
        let spec = Spectrum::new(1, 4, 4, data).unwrap();
        assert!(matches!(
            idft2_strict(&spec, IMAG_RESIDUAL_REL_TOL),
            Err(Error::ImaginaryResidualExceeded { .. })
        ));
        let x = ImageTensor::filled(Shape::new(1, 4, 4).unwrap(), 0.25).unwrap();
        assert!(idft2_strict(&dft2(&x), IMAG_RESIDUAL_REL_TOL).is_ok());
    }

    #[test]
    fn decompose_examples() {
        let spec = Spectrum::new(
            1,
            1,
            4,
            vec![
                Complex64::new(3.0, 4.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-2.0, 0.0),
                Complex64::new(-2.0, -0.0),
            ],
        )
        .unwrap();
        let ap = decompose(&spec);
        assert_eq!(ap.amplitude.data()[0], 5.0);
        assert_eq!(ap.phase[0], 4f64.atan2(3.0));
        assert_eq!((ap.amplitude.data()[1], ap.phase[1]), (0.0, 0.0));
        assert_eq!((ap.amplitude.data()[2], ap.phase[2]), (2.0, PI));
        // negative zero imaginary part still maps into (-pi, pi]
        assert_eq!(ap.phase[3], PI);
        assert!(ap.phase_in_range());
    }

    #[test]
    fn principal_angle_handles_signed_zeros() {
        assert_eq!(principal_angle(Complex64::new(-0.0, 0.0)), 0.0);
        assert_eq!(principal_angle(Complex64::new(0.0, -0.0)), 0.0);
        assert_eq!(principal_angle(Complex64::new(-1.0, -0.0)), PI);
    }

    #[test]
    fn recompose_examples() {
        let shape = Shape::new(1, 1, 1).unwrap();
        let ap = AmplitudePhase::new(
            Amplitude::new(shape, vec![5.0]).unwrap(),
            vec![4f64.atan2(3.0)],
        )
        .unwrap();
        let z = recompose(&ap).unwrap().get(0, 0, 0);
        assert!((z - Complex64::new(3.0, 4.0)).norm() < 1e-12);

        let shape = Shape::new(2, 3, 3).unwrap();
        let zero = AmplitudePhase::new(
            Amplitude::new(shape, vec![0.0; 18]).unwrap(),
            (0..18).map(|i| i as f64 * 0.3 - 2.0).collect(),
        )
        .unwrap();
        assert!(recompose(&zero).unwrap().data().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn polar_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<Complex64> = (0..2 * 5 * 6)
            .map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            .collect();
        let spec = Spectrum::new(2, 5, 6, data).unwrap();
        let back = recompose(&decompose(&spec)).unwrap();
        assert!(max_abs_diff(back.data(), spec.data()) <= 1e-12);
    }

    #[test]
    fn recompose_rejects_shape_mismatch() {
        let shape = Shape::new(1, 2, 2).unwrap();
        let amp = Amplitude::new(shape, vec![1.0; 4]).unwrap();
        assert!(matches!(
            recompose_parts(&amp, &[0.0; 3]),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
